#include "socialrag/signal.hpp"

#include <algorithm>

#include "socialrag/errors.hpp"

namespace socialrag {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Heuristic h) {
  static constexpr std::array<std::string_view, 9> names{"h1", "h2", "h3", "h4", "h5", "h6", "h7", "h8", "h9"};
  return names[static_cast<int>(h) - 1];
}

Heuristic heuristic_from_string(std::string_view s) {
  if (s.size() == 2 && s[0] == 'h' && s[1] >= '1' && s[1] <= '9') return static_cast<Heuristic>(s[1] - '0');
  throw InvalidInput("unknown heuristic: " + std::string(s));
}

std::string_view to_string(SignalCategory c) {
  switch (c) {
    case SignalCategory::metadata:
      return "I";
    case SignalCategory::paper_connection:
      return "II";
    case SignalCategory::member_connection:
      return "III";
  }
  return "?";
}

std::string_view to_string(PaperRelation r) {
  switch (r) {
    case PaperRelation::cites:
      return "cites";
    case PaperRelation::cited_by:
      return "cited_by";
    case PaperRelation::shared_authors:
      return "shared_authors";
    case PaperRelation::semantic:
      return "semantic";
  }
  return "?";
}

PaperRelation paper_relation_from_string(std::string_view s) {
  if (s == "cites") return PaperRelation::cites;
  if (s == "cited_by") return PaperRelation::cited_by;
  if (s == "shared_authors") return PaperRelation::shared_authors;
  if (s == "semantic") return PaperRelation::semantic;
  throw InvalidInput("unknown paper relation: " + std::string(s));
}

std::string_view to_string(InterestVariant v) {
  switch (v) {
    case InterestVariant::liked_similar_papers:
      return "liked_similar_papers";
    case InterestVariant::liked_author_papers:
      return "liked_author_papers";
    case InterestVariant::liked_venue_papers:
      return "liked_venue_papers";
    case InterestVariant::own_publications_similar:
      return "own_publications_similar";
    case InterestVariant::cites_similar:
      return "cites_similar";
  }
  return "?";
}

InterestVariant interest_variant_from_string(std::string_view s) {
  for (auto v : {InterestVariant::liked_similar_papers, InterestVariant::liked_author_papers,
                 InterestVariant::liked_venue_papers, InterestVariant::own_publications_similar,
                 InterestVariant::cites_similar}) {
    if (to_string(v) == s) return v;
  }
  throw InvalidInput("unknown interest variant: " + std::string(s));
}

std::size_t PriorPaperEngagement::reaction_total() const {
  std::size_t n = 0;
  for (const auto& [_, c] : reaction_counts) n += c;
  return n;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::string> ref_strings(const std::vector<PaperRef>& refs) {
  std::vector<std::string> out;
  for (const auto& r : refs) out.push_back(r.str());
  return out;
}

std::vector<PaperRef> parse_refs(const json& j) {
  std::vector<PaperRef> out;
  for (const auto& s : j) out.push_back(PaperRef::parse(s.get<std::string>()));
  return out;
}

}  // namespace

std::string SocialSignal::subject_key() const {
  return std::visit(
      overloaded{
          [](const AuthorIsMember& p) { return p.author_id + "|" + p.member_id; },
          [](const AuthorRecentlyDiscussed& p) { return p.author_id + "|" + p.author_name; },
          [](const AffiliationOverlap& p) { return p.affiliation; },
          [](const VenueRecentlyDiscussed& p) { return p.venue; },
          [](const PriorPaperRelation& p) { return p.prior_paper.str(); },
          [](const PriorPaperEngagement& p) { return p.prior_paper.str(); },
          [](const PriorPaperByMember& p) { return p.prior_paper.str() + "|" + p.member_id; },
          [](const MemberInterest& p) { return p.member_id; },
          [](const MemberInterestRelation& p) { return p.member_id; },
      },
      payload);
}

Seq SocialSignal::latest_evidence() const {
  return evidence_seqs.empty() ? 0 : *std::max_element(evidence_seqs.begin(), evidence_seqs.end());
}

std::optional<PaperRef> SocialSignal::prior_paper() const {
  return std::visit(overloaded{
                        [](const PriorPaperRelation& p) -> std::optional<PaperRef> { return p.prior_paper; },
                        [](const PriorPaperEngagement& p) -> std::optional<PaperRef> { return p.prior_paper; },
                        [](const PriorPaperByMember& p) -> std::optional<PaperRef> { return p.prior_paper; },
                        [](const auto&) -> std::optional<PaperRef> { return std::nullopt; },
                    },
                    payload);
}

std::optional<std::string> SocialSignal::member() const {
  return std::visit(overloaded{
                        [](const AuthorIsMember& p) -> std::optional<std::string> { return p.member_id; },
                        [](const PriorPaperByMember& p) -> std::optional<std::string> { return p.member_id; },
                        [](const MemberInterest& p) -> std::optional<std::string> { return p.member_id; },
                        [](const MemberInterestRelation& p) -> std::optional<std::string> { return p.member_id; },
                        [](const auto&) -> std::optional<std::string> { return std::nullopt; },
                    },
                    payload);
}

std::size_t SelectedSignals::size() const {
  return (metadata ? 1 : 0) + (paper_connection ? 1 : 0) + (member_connection ? 1 : 0);
}

const std::optional<SocialSignal>& SelectedSignals::get(SignalCategory c) const {
  switch (c) {
    case SignalCategory::metadata:
      return metadata;
    case SignalCategory::paper_connection:
      return paper_connection;
    default:
      return member_connection;
  }
}

std::optional<SocialSignal>& SelectedSignals::get(SignalCategory c) {
  return const_cast<std::optional<SocialSignal>&>(std::as_const(*this).get(c));
}

std::vector<SocialSignal> SelectedSignals::all() const {
  std::vector<SocialSignal> out;
  for (const auto* s : {&metadata, &paper_connection, &member_connection}) {
    if (*s) out.push_back(**s);
  }
  return out;
}

ordered_json signal_to_json(const SocialSignal& s) {
  ordered_json j;
  j["heuristic"] = to_string(s.heuristic);
  j["category"] = to_string(s.category());
  j["score"] = s.score;
  j["engagement"] = s.engagement;
  j["evidence_seqs"] = s.evidence_seqs;
  ordered_json p;
  std::visit(overloaded{
                 [&](const AuthorIsMember& v) {
                   p["author_id"] = v.author_id;
                   p["author_name"] = v.author_name;
                   p["member_id"] = v.member_id;
                 },
                 [&](const AuthorRecentlyDiscussed& v) {
                   p["author_id"] = v.author_id;
                   p["author_name"] = v.author_name;
                   p["papers"] = ref_strings(v.papers);
                   p["count"] = v.count;
                 },
                 [&](const AffiliationOverlap& v) {
                   p["affiliation"] = v.affiliation;
                   p["member_ids"] = v.member_ids;
                 },
                 [&](const VenueRecentlyDiscussed& v) {
                   p["venue"] = v.venue;
                   p["papers"] = ref_strings(v.papers);
                   p["count"] = v.count;
                 },
                 [&](const PriorPaperRelation& v) {
                   p["prior_paper"] = v.prior_paper.str();
                   p["relation"] = to_string(v.relation);
                   p["citation_contexts"] = v.citation_contexts;
                   p["shared_authors"] = v.shared_authors;
                   p["similarity"] = v.similarity ? ordered_json(*v.similarity) : ordered_json(nullptr);
                 },
                 [&](const PriorPaperEngagement& v) {
                   p["prior_paper"] = v.prior_paper.str();
                   p["reply_count"] = v.reply_count;
                   ordered_json counts = ordered_json::object();
                   for (const auto& [e, c] : v.reaction_counts) counts[e] = c;
                   p["reaction_counts"] = counts;
                   p["reactors"] = v.reactors;
                   p["repliers"] = v.repliers;
                   p["sample_comment"] = v.sample_comment ? ordered_json(*v.sample_comment) : ordered_json(nullptr);
                 },
                 [&](const PriorPaperByMember& v) {
                   p["prior_paper"] = v.prior_paper.str();
                   p["member_id"] = v.member_id;
                 },
                 [&](const MemberInterest& v) {
                   p["member_id"] = v.member_id;
                   p["similarity"] = v.similarity;
                   p["interest_paper"] = v.interest_paper.str();
                 },
                 [&](const MemberInterestRelation& v) {
                   p["member_id"] = v.member_id;
                   p["variants"] = ordered_json::array();
                   for (const auto& e : v.variants) {
                     ordered_json ej;
                     ej["variant"] = to_string(e.variant);
                     ej["papers"] = ref_strings(e.papers);
                     ej["detail"] = e.detail ? ordered_json(*e.detail) : ordered_json(nullptr);
                     p["variants"].push_back(ej);
                   }
                 },
             },
             s.payload);
  j["payload"] = p;
  return j;
}

SocialSignal signal_from_json(const json& j) {
  SocialSignal s;
  try {
    s.heuristic = heuristic_from_string(j.at("heuristic").get<std::string>());
    s.score = j.at("score").get<double>();
    s.engagement = j.value("engagement", std::size_t{0});
    s.evidence_seqs = j.value("evidence_seqs", std::vector<Seq>{});
    const json& p = j.at("payload");
    auto opt_string = [&](const char* key) -> std::optional<std::string> {
      if (!p.contains(key) || p.at(key).is_null()) return std::nullopt;
      return p.at(key).get<std::string>();
    };
    switch (s.heuristic) {
      case Heuristic::h1:
        s.payload = AuthorIsMember{p.at("author_id"), p.at("author_name"), p.at("member_id")};
        break;
      case Heuristic::h2:
        s.payload = AuthorRecentlyDiscussed{p.at("author_id"), p.at("author_name"), parse_refs(p.at("papers")),
                                            p.at("count")};
        break;
      case Heuristic::h3:
        s.payload = AffiliationOverlap{p.at("affiliation"), p.at("member_ids").get<std::vector<std::string>>()};
        break;
      case Heuristic::h4:
        s.payload = VenueRecentlyDiscussed{p.at("venue"), parse_refs(p.at("papers")), p.at("count")};
        break;
      case Heuristic::h5: {
        PriorPaperRelation v;
        v.prior_paper = PaperRef::parse(p.at("prior_paper").get<std::string>());
        v.relation = paper_relation_from_string(p.at("relation").get<std::string>());
        v.citation_contexts = p.value("citation_contexts", std::vector<std::string>{});
        v.shared_authors = p.value("shared_authors", std::vector<std::string>{});
        if (p.contains("similarity") && !p.at("similarity").is_null()) v.similarity = p.at("similarity").get<double>();
        s.payload = v;
        break;
      }
      case Heuristic::h6: {
        PriorPaperEngagement v;
        v.prior_paper = PaperRef::parse(p.at("prior_paper").get<std::string>());
        v.reply_count = p.at("reply_count");
        for (const auto& [e, c] : p.at("reaction_counts").items()) v.reaction_counts[e] = c.get<std::size_t>();
        v.reactors = p.value("reactors", std::vector<std::string>{});
        v.repliers = p.value("repliers", std::vector<std::string>{});
        v.sample_comment = opt_string("sample_comment");
        s.payload = v;
        break;
      }
      case Heuristic::h7:
        s.payload = PriorPaperByMember{PaperRef::parse(p.at("prior_paper").get<std::string>()), p.at("member_id")};
        break;
      case Heuristic::h8:
        s.payload = MemberInterest{p.at("member_id"), p.at("similarity"),
                                   PaperRef::parse(p.at("interest_paper").get<std::string>())};
        break;
      case Heuristic::h9: {
        MemberInterestRelation v;
        v.member_id = p.at("member_id");
        for (const auto& ej : p.at("variants")) {
          InterestEvidence e;
          e.variant = interest_variant_from_string(ej.at("variant").get<std::string>());
          e.papers = parse_refs(ej.at("papers"));
          if (ej.contains("detail") && !ej.at("detail").is_null()) e.detail = ej.at("detail").get<std::string>();
          v.variants.push_back(std::move(e));
        }
        s.payload = v;
        break;
      }
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad signal: ") + e.what());
  }
  return s;
}

ordered_json selected_to_json(const SelectedSignals& s) {
  ordered_json j;
  auto put = [&](const char* key, const std::optional<SocialSignal>& sig) {
    j[key] = sig ? signal_to_json(*sig) : ordered_json(nullptr);
  };
  put("metadata", s.metadata);
  put("paper_connection", s.paper_connection);
  put("member_connection", s.member_connection);
  return j;
}

SelectedSignals selected_from_json(const json& j) {
  SelectedSignals s;
  auto get = [&](const char* key, std::optional<SocialSignal>& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = signal_from_json(j.at(key));
  };
  get("metadata", s.metadata);
  get("paper_connection", s.paper_connection);
  get("member_connection", s.member_connection);
  return s;
}

}  // namespace socialrag
