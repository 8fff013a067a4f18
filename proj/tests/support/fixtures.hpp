#pragma once

#include <filesystem>
#include <ostream>
#include <memory>
#include <string>
#include <vector>

#include "socialrag/agent.hpp"
#include "socialrag/clients.hpp"
#include "socialrag/event.hpp"
#include "socialrag/knowledge_base.hpp"
#include "socialrag/message.hpp"
#include "socialrag/retrieval.hpp"
#include "socialrag/simulator.hpp"

namespace socialrag {
inline void PrintTo(const PaperRef& r, std::ostream* os) { *os << r.str(); }
}  // namespace socialrag

namespace fixtures {

using namespace socialrag;

inline std::filesystem::path data_dir() { return SOCIALRAG_TEST_DATA_DIR; }

inline Timestamp at(const char* text) { return parse_timestamp(text); }

inline std::string url(const std::string& arxiv_id) { return "https://arxiv.org/abs/" + arxiv_id; }
inline PaperRef arxiv(const std::string& id) { return PaperRef{RefSource::arxiv, id}; }

/// Unit vector along axis i of an 8-dim space, optionally tilted toward axis j.
std::vector<double> axis(std::size_t i, std::size_t j = 0, double tilt = 0.0, std::size_t dim = 8);

PaperRecord record(const std::string& arxiv_id, const std::string& title, std::vector<Author> authors,
                   std::optional<std::string> venue, std::vector<double> embedding,
                   std::vector<std::string> cites = {});

/// Builds a well-formed single-channel event log with consecutive seqs.
class LogBuilder {
 public:
  explicit LogBuilder(std::string channel = "lab");

  Seq config(const ChannelConfig& config);
  Seq message(const std::string& actor, const std::string& text, Timestamp ts);
  Seq share(const std::string& actor, const std::string& arxiv_id, Timestamp ts);
  Seq react(const std::string& actor, Seq target, const std::string& emoji, Timestamp ts);
  Seq reply(const std::string& actor, Seq parent, const std::string& text, Timestamp ts);
  Seq bot_post(const PaperRef& paper, const std::string& body, Timestamp ts, const std::string& agent = "socialrag-bot");

  const std::vector<SocialEvent>& events() const { return events_; }
  const std::string& channel() const { return channel_; }
  KnowledgeBase kb(MetadataClient* metadata = nullptr) const;

 private:
  Seq push(const std::string& actor, Timestamp ts, EventPayload payload);

  std::string channel_;
  std::vector<SocialEvent> events_;
};

/// Randomized but well-formed log over the given papers: shares, reactions with mixed
/// emoji, replies, plain chatter and the odd bot post.
std::vector<SocialEvent> random_log(std::uint64_t seed, std::size_t n, const std::vector<PaperRef>& papers,
                                    const std::string& channel = "lab");

/// Corpus plus mock clients sharing it.
struct MockWorld {
  explicit MockWorld(std::vector<PaperRecord> papers);
  explicit MockWorld(CorpusFixture corpus);

  std::shared_ptr<const CorpusFixture> corpus;
  MockMetadataClient metadata;
  MockRecommendationClient recommender;
  MockCompletionClient llm;

  std::map<PaperRef, PaperRecord> records() const;
  AgentClients clients() { return {metadata, recommender, llm}; }
};

/// Small hand-checked corpus on disk (10 papers, 8 dims).
CorpusFixture small_corpus();

/// Transcript A: 30 days of synthetic activity with an inline corpus.
Transcript transcript_a();

/// A lived-in channel: transcript A replayed, its log rebuilt against mock clients over
/// the transcript corpus, observed just after the last event.
struct Scene {
  explicit Scene(std::uint64_t seed = 7);

  Transcript transcript;
  MockWorld world;
  KnowledgeBase kb;
  Timestamp now;

  /// Corpus papers the channel never mentioned, in corpus order.
  std::vector<PaperRecord> candidates();
  RetrievalContext retrieval() { return RetrievalContext::from_config(kb, now, &world.metadata); }
  /// Best signals for the candidate with the given categories dropped.
  SelectedSignals selected_for(const PaperRecord& candidate, unsigned keep_mask = 0b111);
  ChannelView view(std::set<std::string> cooling = {}) const;
};

/// Stand-in permalink used by Scene::view.
std::string permalink(Seq seq);

}  // namespace fixtures
