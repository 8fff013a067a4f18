#include "socialrag/clients.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>

#include <spdlog/spdlog.h>

#include "socialrag/errors.hpp"
#include "socialrag/retrieval.hpp"

namespace socialrag {

namespace {

// What an upstream source would return: no abstract means no usable embedding.
PaperRecord as_served(PaperRecord r) {
  if (!r.abstract || r.abstract->empty()) {
    r.abstract.reset();
    r.embedding.reset();
    r.degraded = true;
  }
  return r;
}

}  // namespace

MockMetadataClient::MockMetadataClient(std::shared_ptr<const CorpusFixture> corpus) : corpus_(std::move(corpus)) {
  if (!corpus_) throw InvalidInput("MockMetadataClient needs a corpus");
}

PaperRecord MockMetadataClient::fetch_paper_metadata(const PaperRef& ref) {
  ++calls_;
  const auto* r = corpus_->find(ref);
  if (!r) throw NotFound("no metadata for " + ref.str());
  return as_served(*r);
}

std::vector<PaperRef> MockMetadataClient::fetch_author_papers(const std::string& author_id) {
  std::vector<PaperRef> out;
  for (const auto& p : corpus_->papers()) {
    if (std::any_of(p.authors.begin(), p.authors.end(), [&](const Author& a) { return a.author_id == author_id; }))
      out.push_back(p.ref);
  }
  std::sort(out.begin(), out.end());
  return out;
}

MockRecommendationClient::MockRecommendationClient(std::shared_ptr<const CorpusFixture> corpus)
    : corpus_(std::move(corpus)) {
  if (!corpus_) throw InvalidInput("MockRecommendationClient needs a corpus");
}

std::vector<PaperRecord> MockRecommendationClient::fetch_recommendations(const std::vector<PaperRef>& positives,
                                                                         std::size_t k) {
  if (positives.empty()) throw InvalidInput("fetch_recommendations: positives must not be empty");
  std::vector<const std::vector<double>*> anchors;
  for (const auto& ref : positives) {
    if (const auto* r = corpus_->find(ref); r && r->embedding) anchors.push_back(&*r->embedding);
  }
  std::vector<std::pair<double, const PaperRecord*>> scored;
  for (const auto& p : corpus_->papers()) {
    if (std::find(positives.begin(), positives.end(), p.ref) != positives.end()) continue;
    double best = -std::numeric_limits<double>::infinity();
    if (p.embedding) {
      for (const auto* a : anchors) {
        if (a->size() == p.embedding->size()) best = std::max(best, cosine_similarity(*a, *p.embedding));
      }
    }
    scored.emplace_back(best, &p);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->ref < b.second->ref;
  });
  std::vector<PaperRecord> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(as_served(*scored[i].second));
  return out;
}

CachingMetadataClient::CachingMetadataClient(MetadataClient& upstream, std::optional<std::filesystem::path> store)
    : upstream_(upstream), store_(std::move(store)) {
  if (!store_ || !std::filesystem::exists(*store_)) return;
  std::ifstream in(*store_);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.contains("author_id")) {
        std::vector<PaperRef> refs;
        for (const auto& r : j.at("papers")) refs.push_back(PaperRef::parse(r.get<std::string>()));
        author_papers_[j.at("author_id").get<std::string>()] = std::move(refs);
      } else {
        auto rec = record_from_json(j);
        records_[rec.ref] = std::move(rec);
      }
      ++n;
    } catch (const std::exception& e) {
      spdlog::warn("skipping bad metadata cache line in {}: {}", store_->string(), e.what());
    }
  }
  spdlog::debug("loaded {} cached metadata entries", n);
}

PaperRecord CachingMetadataClient::fetch_paper_metadata(const PaperRef& ref) {
  std::lock_guard lock(mutex_);
  if (auto it = records_.find(ref); it != records_.end()) return it->second;
  if (missing_.contains(ref)) throw NotFound("no metadata for " + ref.str());
  ++upstream_calls_;
  PaperRecord rec;
  try {
    rec = upstream_.fetch_paper_metadata(ref);
  } catch (const NotFound&) {
    missing_[ref] = true;
    throw;
  }
  if (store_) {
    std::ofstream out(*store_, std::ios::app);
    out << record_to_json(rec).dump() << "\n";
  }
  return records_.emplace(ref, std::move(rec)).first->second;
}

std::vector<PaperRef> CachingMetadataClient::fetch_author_papers(const std::string& author_id) {
  std::lock_guard lock(mutex_);
  if (auto it = author_papers_.find(author_id); it != author_papers_.end()) return it->second;
  ++upstream_calls_;
  auto refs = upstream_.fetch_author_papers(author_id);
  if (store_) {
    nlohmann::ordered_json j;
    j["author_id"] = author_id;
    j["papers"] = nlohmann::json::array();
    for (const auto& r : refs) j["papers"].push_back(r.str());
    std::ofstream out(*store_, std::ios::app);
    out << j.dump() << "\n";
  }
  return author_papers_.emplace(author_id, std::move(refs)).first->second;
}

RateLimiter::RateLimiter(double tokens_per_second, double burst)
    : rate_(tokens_per_second), burst_(burst), tokens_(burst), last_(std::chrono::steady_clock::now()) {
  if (rate_ <= 0 || burst_ < 1) throw InvalidInput("RateLimiter: rate must be positive and burst >= 1");
}

void RateLimiter::acquire() {
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    tokens_ = std::min(burst_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    lock.unlock();
    std::this_thread::sleep_for(wait);
    lock.lock();
  }
}

namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

}  // namespace

HttpEndpoint paper_api_endpoint_from_env() {
  HttpEndpoint e;
  e.base_url = env("PAPER_API_BASE_URL").value_or("https://api.semanticscholar.org");
  e.api_key = env("PAPER_API_KEY");
  return e;
}

HttpEndpoint llm_endpoint_from_env() {
  HttpEndpoint e;
  e.base_url = env("LLM_BASE_URL").value_or("https://api.openai.com");
  e.api_key = env("LLM_API_KEY");
  if (!e.api_key) throw ConfigurationError("LLM_API_KEY is not set");
  return e;
}

std::string paper_api_id(const PaperRef& ref) {
  switch (ref.source) {
    case RefSource::arxiv:
      return "arXiv:" + ref.external_id;
    case RefSource::doi:
      return "DOI:" + ref.external_id;
    case RefSource::semantic_id:
      return ref.external_id;
  }
  return ref.external_id;
}

}  // namespace socialrag
