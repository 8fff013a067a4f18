#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialrag/paper_ref.hpp"

namespace socialrag {

using Seq = std::uint64_t;

enum class Heuristic { h1 = 1, h2, h3, h4, h5, h6, h7, h8, h9 };

/// I: recommended-paper metadata, II: connections to earlier papers,
/// III: connections to members.
enum class SignalCategory { metadata, paper_connection, member_connection };

constexpr SignalCategory category_of(Heuristic h) {
  switch (h) {
    case Heuristic::h1:
    case Heuristic::h2:
    case Heuristic::h3:
    case Heuristic::h4:
      return SignalCategory::metadata;
    case Heuristic::h5:
    case Heuristic::h6:
    case Heuristic::h7:
      return SignalCategory::paper_connection;
    default:
      return SignalCategory::member_connection;
  }
}

std::string_view to_string(Heuristic h);
Heuristic heuristic_from_string(std::string_view s);
std::string_view to_string(SignalCategory c);

/// h1: an author of the candidate is a linked channel member.
struct AuthorIsMember {
  std::string author_id;
  std::string author_name;
  std::string member_id;
  bool operator==(const AuthorIsMember&) const = default;
};

/// h2: an author also wrote papers the channel engaged with recently.
struct AuthorRecentlyDiscussed {
  std::string author_id;
  std::string author_name;
  std::vector<PaperRef> papers;
  std::size_t count = 0;
  bool operator==(const AuthorRecentlyDiscussed&) const = default;
};

/// h3: an author affiliation matches member affiliations.
struct AffiliationOverlap {
  std::string affiliation;
  std::vector<std::string> member_ids;
  bool operator==(const AffiliationOverlap&) const = default;
};

/// h4: the venue appears on papers the channel engaged with recently.
struct VenueRecentlyDiscussed {
  std::string venue;
  std::vector<PaperRef> papers;
  std::size_t count = 0;
  bool operator==(const VenueRecentlyDiscussed&) const = default;
};

enum class PaperRelation { cites, cited_by, shared_authors, semantic };
std::string_view to_string(PaperRelation r);
PaperRelation paper_relation_from_string(std::string_view s);

/// h5: relation between the candidate and an earlier shared paper.
struct PriorPaperRelation {
  PaperRef prior_paper;
  PaperRelation relation = PaperRelation::semantic;
  std::vector<std::string> citation_contexts;
  std::vector<std::string> shared_authors;
  std::optional<double> similarity;
  bool operator==(const PriorPaperRelation&) const = default;
};

/// h6: how members engaged with the related earlier paper.
struct PriorPaperEngagement {
  PaperRef prior_paper;
  std::size_t reply_count = 0;
  std::map<std::string, std::size_t> reaction_counts;
  std::vector<std::string> reactors;
  std::vector<std::string> repliers;
  std::optional<std::string> sample_comment;
  std::size_t reaction_total() const;
  bool operator==(const PriorPaperEngagement&) const = default;
};

/// h7: the related earlier paper was written by a member.
struct PriorPaperByMember {
  PaperRef prior_paper;
  std::string member_id;
  bool operator==(const PriorPaperByMember&) const = default;
};

/// h8: the candidate is close to a member's interest papers.
struct MemberInterest {
  std::string member_id;
  double similarity = 0.0;
  PaperRef interest_paper;
  bool operator==(const MemberInterest&) const = default;
};

enum class InterestVariant {
  liked_similar_papers,
  liked_author_papers,
  liked_venue_papers,
  own_publications_similar,
  cites_similar
};
std::string_view to_string(InterestVariant v);
InterestVariant interest_variant_from_string(std::string_view s);

struct InterestEvidence {
  InterestVariant variant = InterestVariant::liked_similar_papers;
  std::vector<PaperRef> papers;
  /// Author name for liked_author_papers, venue for liked_venue_papers.
  std::optional<std::string> detail;
  bool operator==(const InterestEvidence&) const = default;
};

/// h9: the concrete reasons a member may care, strongest first.
struct MemberInterestRelation {
  std::string member_id;
  std::vector<InterestEvidence> variants;
  bool operator==(const MemberInterestRelation&) const = default;
};

using SignalPayload =
    std::variant<AuthorIsMember, AuthorRecentlyDiscussed, AffiliationOverlap, VenueRecentlyDiscussed,
                 PriorPaperRelation, PriorPaperEngagement, PriorPaperByMember, MemberInterest,
                 MemberInterestRelation>;

/// One fired heuristic. Higher score means more important; `engagement` counts the
/// reaction/comment/post events backing it and feeds tie-breaking.
struct SocialSignal {
  Heuristic heuristic = Heuristic::h1;
  SignalPayload payload;
  double score = 0.0;
  std::vector<Seq> evidence_seqs;
  std::size_t engagement = 0;

  bool operator==(const SocialSignal&) const = default;

  SignalCategory category() const { return category_of(heuristic); }
  /// Identifies the subject (member, prior paper, author...) for stable ordering.
  std::string subject_key() const;
  Seq latest_evidence() const;
  /// Earlier shared paper the signal points at (category II only).
  std::optional<PaperRef> prior_paper() const;
  /// Member the signal names, if any.
  std::optional<std::string> member() const;
};

/// At most one signal per category.
struct SelectedSignals {
  std::optional<SocialSignal> metadata;
  std::optional<SocialSignal> paper_connection;
  std::optional<SocialSignal> member_connection;

  bool operator==(const SelectedSignals&) const = default;

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  const std::optional<SocialSignal>& get(SignalCategory c) const;
  std::optional<SocialSignal>& get(SignalCategory c);
  std::vector<SocialSignal> all() const;
};

nlohmann::ordered_json signal_to_json(const SocialSignal& s);
SocialSignal signal_from_json(const nlohmann::json& j);
nlohmann::ordered_json selected_to_json(const SelectedSignals& s);
SelectedSignals selected_from_json(const nlohmann::json& j);

}  // namespace socialrag
