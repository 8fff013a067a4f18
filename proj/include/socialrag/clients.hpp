#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "socialrag/paper_record.hpp"

namespace socialrag {

/// Paper metadata and citation graph source.
class MetadataClient {
 public:
  virtual ~MetadataClient() = default;

  /// Throws NotFound for unknown refs and RetryableError on transport failure.
  virtual PaperRecord fetch_paper_metadata(const PaperRef& ref) = 0;

  /// Papers written by an external author id (the member's linked publication record).
  virtual std::vector<PaperRef> fetch_author_papers(const std::string& author_id) = 0;
};

class RecommendationClient {
 public:
  virtual ~RecommendationClient() = default;

  /// Up to k records similar to the positives, never returning a positive.
  /// Throws InvalidInput when positives is empty.
  virtual std::vector<PaperRecord> fetch_recommendations(const std::vector<PaperRef>& positives,
                                                         std::size_t k) = 0;
};

struct CompletionRequest {
  std::string prompt;
  std::size_t max_output_chars = 0;
  std::uint64_t seed = 0;
};

class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual std::string complete(const CompletionRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// In-process mocks over a CorpusFixture.

class MockMetadataClient : public MetadataClient {
 public:
  explicit MockMetadataClient(std::shared_ptr<const CorpusFixture> corpus);

  PaperRecord fetch_paper_metadata(const PaperRef& ref) override;
  std::vector<PaperRef> fetch_author_papers(const std::string& author_id) override;

  std::size_t calls() const { return calls_.load(); }

 private:
  std::shared_ptr<const CorpusFixture> corpus_;
  std::atomic<std::size_t> calls_{0};
};

/// Ranks the corpus by maximum cosine similarity to any positive; ties by ref.
class MockRecommendationClient : public RecommendationClient {
 public:
  explicit MockRecommendationClient(std::shared_ptr<const CorpusFixture> corpus);

  std::vector<PaperRecord> fetch_recommendations(const std::vector<PaperRef>& positives,
                                                 std::size_t k) override;

 private:
  std::shared_ptr<const CorpusFixture> corpus_;
};

/// Deterministic completion: reads the directives in the prompt (required openings,
/// mandatory strings, bolding rules, limits) and fills them from the prompt's own
/// content. A pure function of (prompt, seed); output never exceeds max_output_chars.
class MockCompletionClient : public CompletionClient {
 public:
  std::string complete(const CompletionRequest& request) override;
};

// ---------------------------------------------------------------------------
// Decorators.

/// At most one upstream call per ref for the lifetime of the cache. Optionally
/// persisted as JSON lines keyed by canonical ref so replays need no network.
class CachingMetadataClient : public MetadataClient {
 public:
  explicit CachingMetadataClient(MetadataClient& upstream, std::optional<std::filesystem::path> store = {});

  PaperRecord fetch_paper_metadata(const PaperRef& ref) override;
  std::vector<PaperRef> fetch_author_papers(const std::string& author_id) override;

  std::size_t upstream_calls() const { return upstream_calls_; }

 private:
  MetadataClient& upstream_;
  std::optional<std::filesystem::path> store_;
  std::mutex mutex_;
  std::map<PaperRef, PaperRecord> records_;
  std::map<PaperRef, bool> missing_;
  std::map<std::string, std::vector<PaperRef>> author_papers_;
  std::size_t upstream_calls_ = 0;
};

/// Token bucket; acquire() blocks until a token is available.
class RateLimiter {
 public:
  RateLimiter(double tokens_per_second, double burst);
  void acquire();

 private:
  std::mutex mutex_;
  double rate_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

struct RetryPolicy {
  std::size_t max_attempts = 4;
  std::chrono::milliseconds initial_backoff{250};
  double multiplier = 2.0;
};

/// Runs fn, retrying RetryableError with exponential backoff.
template <typename Fn>
auto with_backoff(const RetryPolicy& policy, Fn&& fn) -> decltype(fn());

// ---------------------------------------------------------------------------
// Live HTTP clients.

struct HttpEndpoint {
  std::string base_url;  ///< scheme://host[:port][/prefix]
  std::optional<std::string> api_key;
  std::chrono::seconds timeout{30};
};

/// Reads PAPER_API_BASE_URL (defaults to the public academic graph host).
HttpEndpoint paper_api_endpoint_from_env();
/// Reads LLM_BASE_URL and LLM_API_KEY; throws ConfigurationError when the key is unset.
HttpEndpoint llm_endpoint_from_env();

/// Academic-graph style API: GET /graph/v1/paper/{id}, GET /graph/v1/author/{id}/papers,
/// POST /recommendations/v1/papers.
class HttpPaperClient : public MetadataClient, public RecommendationClient {
 public:
  explicit HttpPaperClient(HttpEndpoint endpoint, RetryPolicy retry = {}, double requests_per_second = 1.0);

  PaperRecord fetch_paper_metadata(const PaperRef& ref) override;
  std::vector<PaperRef> fetch_author_papers(const std::string& author_id) override;
  std::vector<PaperRecord> fetch_recommendations(const std::vector<PaperRef>& positives,
                                                 std::size_t k) override;

 private:
  HttpEndpoint endpoint_;
  RetryPolicy retry_;
  RateLimiter limiter_;
};

/// Chat-completions style endpoint: POST /v1/chat/completions with a bearer key.
class HttpCompletionClient : public CompletionClient {
 public:
  /// Throws ConfigurationError when the endpoint has no api key.
  explicit HttpCompletionClient(HttpEndpoint endpoint, std::string model = "gpt-4-turbo-preview",
                                RetryPolicy retry = {});

  std::string complete(const CompletionRequest& request) override;

 private:
  HttpEndpoint endpoint_;
  std::string model_;
  RetryPolicy retry_;
  RateLimiter limiter_;
};

/// Id used in academic-graph URLs: "arXiv:2301.00001", "DOI:10.1/x", or the raw hash.
std::string paper_api_id(const PaperRef& ref);

}  // namespace socialrag

#include "socialrag/detail/backoff.hpp"
