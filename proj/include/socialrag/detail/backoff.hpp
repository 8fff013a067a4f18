#pragma once

#include <thread>

#include "socialrag/errors.hpp"

namespace socialrag {

template <typename Fn>
auto with_backoff(const RetryPolicy& policy, Fn&& fn) -> decltype(fn()) {
  auto delay = policy.initial_backoff;
  for (std::size_t attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const RetryableError&) {
      if (attempt >= policy.max_attempts) throw;
      std::this_thread::sleep_for(delay);
      delay = std::chrono::milliseconds(static_cast<long>(delay.count() * policy.multiplier));
    }
  }
}

}  // namespace socialrag
