#pragma once

#include <span>
#include <vector>

#include "socialrag/knowledge_base.hpp"
#include "socialrag/signal.hpp"

namespace socialrag {

/// Cosine of the angle between two vectors. Throws InvalidInput on a dimension
/// mismatch, empty input or a zero vector.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Everything the detectors read. The knowledge base is treated as an immutable snapshot.
struct RetrievalContext {
  const KnowledgeBase& kb;
  Timestamp now{};
  double tau = 0.6;
  Duration heuristic_window = days(90);
  /// Source for members' linked publications and the papers those cite (h9). Optional.
  MetadataClient* metadata = nullptr;

  static RetrievalContext from_config(const KnowledgeBase& kb, Timestamp now, MetadataClient* metadata = nullptr);
};

// Scoring (higher = more important):
//   h1                    1.0
//   h2, h4                E / (E + 1), E = engagement events in the window on the supporting papers
//                         (human posts, positive reactions, human comments)
//   h3                    m / (m + 1), m = members sharing the affiliation
//   paper connection      cites / cited_by 1.0, shared authors 0.8, otherwise the cosine;
//                         h6 and h7 inherit the score of the h5 they decorate
//   member (h8)           maximum cosine over the member's interest papers
//   member (h9)           strongest support: citation 1.0, shared author 0.8, cosine, venue 0.5

/// h1-h4.
std::vector<SocialSignal> detect_metadata_signals(const PaperRecord& paper, const RetrievalContext& ctx);
/// h5-h7, one h5 per related earlier paper; h6/h7 only decorate papers that fired h5.
std::vector<SocialSignal> detect_paper_connection_signals(const PaperRecord& paper, const RetrievalContext& ctx);
/// h8-h9.
std::vector<SocialSignal> detect_member_signals(const PaperRecord& paper, const RetrievalContext& ctx);
std::vector<SocialSignal> detect_all_signals(const PaperRecord& paper, const RetrievalContext& ctx);

/// Keeps the best signal per category. Order: score, engagement, most recent evidence,
/// lower heuristic number, subject key.
SelectedSignals rank_and_select(std::span<const SocialSignal> signals);

/// True when `a` should be preferred over `b` by rank_and_select.
bool outranks(const SocialSignal& a, const SocialSignal& b);

/// Shared matching helpers (exposed for tests).
std::string normalize_affiliation(std::string_view s);
bool same_author(const Author& a, const Author& b);

}  // namespace socialrag
