#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace socialrag {

using Timestamp = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;

constexpr Duration days(long n) { return std::chrono::duration_cast<Duration>(std::chrono::days(n)); }

/// "2024-03-01T09:30:00Z"
std::string format_timestamp(Timestamp ts);

/// Accepts "YYYY-MM-DDTHH:MM:SSZ" and "YYYY-MM-DD". Throws InvalidInput.
Timestamp parse_timestamp(std::string_view text);

/// Whole UTC calendar days since the epoch (floors for negative times).
long utc_day_index(Timestamp ts);

}  // namespace socialrag
