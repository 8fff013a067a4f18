#pragma once

// Brute-force reference computations used as test oracles. Everything here works from
// the raw event log and the corpus, never from KnowledgeBase indexes.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "socialrag/knowledge_base.hpp"
#include "socialrag/retrieval.hpp"
#include "socialrag/simulator.hpp"

namespace oracle {

using namespace socialrag;

enum class ActKind { mention, reaction, comment };

struct Act {
  ActKind kind;
  Seq seq;
  std::string actor;
  Timestamp ts;
  bool by_agent;
  Sentiment sentiment = Sentiment::neutral;
  std::string emoji;
  std::string text;
};

/// Paper -> every act touching it, from a straight pass over the log.
std::map<PaperRef, std::vector<Act>> scan(const std::vector<SocialEvent>& log);

/// Members as the log defines them: roster of the latest config plus every human actor.
std::map<std::string, Member> members_of(const std::vector<SocialEvent>& log);
std::set<std::string> agents_of(const std::vector<SocialEvent>& log);

EngagementSummary recount(const std::vector<SocialEvent>& log, const PaperRef& paper,
                          std::optional<Duration> window = std::nullopt, std::optional<Timestamp> now = std::nullopt);

/// Papers qualifying as seeds (mention in window plus positive reaction or comment in window).
std::set<PaperRef> seed_set(const std::vector<SocialEvent>& log, Duration window, Timestamp now);

/// Projection of a signal that the oracle can compute independently.
struct Fired {
  Heuristic heuristic;
  std::string subject;
  double score = 0;
  std::size_t engagement = 0;
  std::vector<Seq> evidence;
  /// h9: variant names in order; h5: relation name.
  std::string detail;

  bool operator==(const Fired& o) const;
  bool operator<(const Fired& o) const;
};

std::string describe(const Fired& f);
std::vector<Fired> project(const std::vector<SocialSignal>& signals);

struct OracleInputs {
  const std::vector<SocialEvent>& log;
  /// Metadata for papers in the log (missing entries mean no record).
  const std::map<PaperRef, PaperRecord>& records;
  Timestamp now;
  double tau = 0.6;
  Duration window = days(90);
  /// Each member's linked publications (for h9).
  std::map<std::string, std::vector<PaperRecord>> own_publications;
};

/// Every fired heuristic for the candidate, sorted.
std::vector<Fired> enumerate_signals(const PaperRecord& candidate, const OracleInputs& in);

std::set<Heuristic> heuristics_of(const std::vector<Fired>& fired);

/// Best signal per category via an explicit lexicographic key.
std::map<SignalCategory, SocialSignal> select_best(const std::vector<SocialSignal>& signals);

/// Corpus ranked by max cosine to any positive, positives excluded; ties by ref.
std::vector<PaperRef> rank_by_similarity(const CorpusFixture& corpus, const std::vector<PaperRef>& positives);

/// Per-day cumulative series recomputed from the log alone.
CumulativeSeries series_of(const std::vector<SocialEvent>& log, const std::string& channel);

/// Members tokenized as mentions in the `cooldown` bot posts preceding seq.
std::set<std::string> cooling_before(const std::vector<SocialEvent>& log, Seq seq, std::size_t cooldown);

}  // namespace oracle
