#include "socialrag/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "socialrag/errors.hpp"

namespace socialrag {
namespace {

double sat(std::size_t n) { return static_cast<double>(n) / (static_cast<double>(n) + 1.0); }

bool in_window(Timestamp ts, const RetrievalContext& ctx) {
  return ts <= ctx.now && ts >= ctx.now - ctx.heuristic_window;
}

// Human posts, positive reactions and human comments on the paper inside the heuristic window.
std::vector<Seq> window_engagement(const IndexedPaper& p, const RetrievalContext& ctx) {
  std::vector<Seq> seqs;
  for (const auto& m : p.mention_posts) {
    if (!m.by_agent && in_window(m.ts, ctx)) seqs.push_back(m.seq);
  }
  for (const auto& r : p.reactions) {
    if (r.sentiment == Sentiment::positive && !ctx.kb.is_agent(r.actor) && in_window(r.ts, ctx)) seqs.push_back(r.seq);
  }
  for (const auto& c : p.comments) {
    if (!ctx.kb.is_agent(c.actor) && in_window(c.ts, ctx)) seqs.push_back(c.seq);
  }
  std::sort(seqs.begin(), seqs.end());
  return seqs;
}

std::vector<Seq> all_activity(const IndexedPaper& p) {
  std::vector<Seq> seqs;
  for (const auto& m : p.mention_posts) seqs.push_back(m.seq);
  for (const auto& r : p.reactions) seqs.push_back(r.seq);
  for (const auto& c : p.comments) seqs.push_back(c.seq);
  std::sort(seqs.begin(), seqs.end());
  return seqs;
}

// The member's own events that make the paper one of their interests.
std::vector<Seq> member_activity(const IndexedPaper& p, const std::string& member) {
  std::vector<Seq> seqs;
  for (const auto& m : p.mention_posts) {
    if (m.actor == member) seqs.push_back(m.seq);
  }
  for (const auto& r : p.reactions) {
    if (r.actor == member && r.sentiment == Sentiment::positive) seqs.push_back(r.seq);
  }
  for (const auto& c : p.comments) {
    if (c.actor == member) seqs.push_back(c.seq);
  }
  std::sort(seqs.begin(), seqs.end());
  return seqs;
}

std::string collapse_ws_lower(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::optional<double> cosine_of(const PaperRecord& a, const PaperRecord& b) {
  if (!a.embedding || !b.embedding || a.embedding->size() != b.embedding->size()) return std::nullopt;
  try {
    return cosine_similarity(*a.embedding, *b.embedding);
  } catch (const InvalidInput&) {
    return std::nullopt;
  }
}

std::vector<std::string> shared_author_names(const PaperRecord& a, const PaperRecord& b) {
  std::vector<std::string> names;
  for (const auto& x : a.authors) {
    for (const auto& y : b.authors) {
      if (same_author(x, y)) {
        names.push_back(x.name);
        break;
      }
    }
  }
  return names;
}

bool is_human_member(const RetrievalContext& ctx, const std::string& id) { return !ctx.kb.is_agent(id); }

std::vector<std::pair<const IndexedPaper*, std::vector<Seq>>> engaged_papers(const PaperRecord& paper,
                                                                             const RetrievalContext& ctx) {
  std::vector<std::pair<const IndexedPaper*, std::vector<Seq>>> out;
  for (const auto& [ref, p] : ctx.kb.papers()) {
    if (ref == paper.ref || !p.record) continue;
    auto seqs = window_engagement(p, ctx);
    if (!seqs.empty()) out.emplace_back(&p, std::move(seqs));
  }
  return out;
}

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("cosine_similarity: empty vector");
  if (a.size() != b.size()) throw InvalidInput("cosine_similarity: dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) throw InvalidInput("cosine_similarity: zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

RetrievalContext RetrievalContext::from_config(const KnowledgeBase& kb, Timestamp now, MetadataClient* metadata) {
  return RetrievalContext{kb, now, kb.config().tau, kb.config().heuristic_window, metadata};
}

std::string normalize_affiliation(std::string_view s) { return collapse_ws_lower(s); }

bool same_author(const Author& a, const Author& b) {
  if (!a.author_id.empty() && !b.author_id.empty()) return a.author_id == b.author_id;
  return !a.name.empty() && collapse_ws_lower(a.name) == collapse_ws_lower(b.name);
}

std::vector<SocialSignal> detect_metadata_signals(const PaperRecord& paper, const RetrievalContext& ctx) {
  std::vector<SocialSignal> out;
  const auto& members = ctx.kb.members();

  // h1
  for (const auto& author : paper.authors) {
    if (author.author_id.empty()) continue;
    for (const auto& [id, m] : members) {
      if (!is_human_member(ctx, id) || m.linked_author_id != author.author_id) continue;
      SocialSignal s;
      s.heuristic = Heuristic::h1;
      s.payload = AuthorIsMember{author.author_id, author.name, id};
      s.score = 1.0;
      out.push_back(std::move(s));
    }
  }

  const auto engaged = engaged_papers(paper, ctx);

  // h2
  for (const auto& author : paper.authors) {
    AuthorRecentlyDiscussed payload{author.author_id, author.name, {}, 0};
    std::vector<Seq> evidence;
    for (const auto& [p, seqs] : engaged) {
      const bool wrote = std::any_of(p->record->authors.begin(), p->record->authors.end(),
                                     [&](const Author& a) { return same_author(a, author); });
      if (!wrote) continue;
      payload.papers.push_back(p->ref);
      evidence.insert(evidence.end(), seqs.begin(), seqs.end());
    }
    if (payload.papers.empty()) continue;
    payload.count = payload.papers.size();
    std::sort(evidence.begin(), evidence.end());
    SocialSignal s;
    s.heuristic = Heuristic::h2;
    s.payload = std::move(payload);
    s.score = sat(evidence.size());
    s.engagement = evidence.size();
    s.evidence_seqs = std::move(evidence);
    out.push_back(std::move(s));
  }

  // h3
  std::vector<std::string> seen;
  for (const auto& author : paper.authors) {
    for (const auto& aff : author.affiliations) {
      const std::string key = normalize_affiliation(aff);
      if (key.empty() || std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      seen.push_back(key);
      AffiliationOverlap payload{aff, {}};
      for (const auto& [id, m] : members) {
        if (is_human_member(ctx, id) && m.affiliation && normalize_affiliation(*m.affiliation) == key)
          payload.member_ids.push_back(id);
      }
      if (payload.member_ids.empty()) continue;
      SocialSignal s;
      s.heuristic = Heuristic::h3;
      s.score = sat(payload.member_ids.size());
      s.payload = std::move(payload);
      out.push_back(std::move(s));
    }
  }

  // h4
  if (paper.venue && !normalize_affiliation(*paper.venue).empty()) {
    const std::string key = normalize_affiliation(*paper.venue);
    VenueRecentlyDiscussed payload{*paper.venue, {}, 0};
    std::vector<Seq> evidence;
    for (const auto& [p, seqs] : engaged) {
      if (!p->record->venue || normalize_affiliation(*p->record->venue) != key) continue;
      payload.papers.push_back(p->ref);
      evidence.insert(evidence.end(), seqs.begin(), seqs.end());
    }
    if (!payload.papers.empty()) {
      payload.count = payload.papers.size();
      std::sort(evidence.begin(), evidence.end());
      SocialSignal s;
      s.heuristic = Heuristic::h4;
      s.payload = std::move(payload);
      s.score = sat(evidence.size());
      s.engagement = evidence.size();
      s.evidence_seqs = std::move(evidence);
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<SocialSignal> detect_paper_connection_signals(const PaperRecord& paper, const RetrievalContext& ctx) {
  std::vector<SocialSignal> out;
  const auto& members = ctx.kb.members();
  for (const auto& [ref, q] : ctx.kb.papers()) {
    if (ref == paper.ref) continue;
    PriorPaperRelation rel;
    rel.prior_paper = ref;
    std::optional<PaperRelation> kind;
    if (paper.cites(ref)) {
      kind = PaperRelation::cites;
      if (auto it = paper.citation_contexts.find(ref); it != paper.citation_contexts.end()) rel.citation_contexts = it->second;
    } else if (paper.is_cited_by(ref) || (q.record && q.record->cites(paper.ref))) {
      kind = PaperRelation::cited_by;
      if (q.record) {
        if (auto it = q.record->citation_contexts.find(paper.ref); it != q.record->citation_contexts.end())
          rel.citation_contexts = it->second;
      }
    }
    if (q.record) {
      rel.shared_authors = shared_author_names(paper, *q.record);
      rel.similarity = cosine_of(paper, *q.record);
      if (!kind && !rel.shared_authors.empty()) kind = PaperRelation::shared_authors;
      if (!kind && rel.similarity && *rel.similarity >= ctx.tau) kind = PaperRelation::semantic;
    }
    if (!kind) continue;
    rel.relation = *kind;

    SocialSignal h5;
    h5.heuristic = Heuristic::h5;
    switch (*kind) {
      case PaperRelation::cites:
      case PaperRelation::cited_by:
        h5.score = 1.0;
        break;
      case PaperRelation::shared_authors:
        h5.score = 0.8;
        break;
      case PaperRelation::semantic:
        h5.score = *rel.similarity;
        break;
    }
    h5.payload = std::move(rel);
    h5.evidence_seqs = all_activity(q);
    h5.engagement = q.reactions.size() + q.comments.size();
    std::vector<SocialSignal> decorations;

    if (!q.reactions.empty() || !q.comments.empty()) {
      PriorPaperEngagement eng;
      eng.prior_paper = ref;
      eng.reply_count = q.comments.size();
      std::set<std::string> reactors, repliers;
      std::vector<Seq> seqs;
      for (const auto& r : q.reactions) {
        ++eng.reaction_counts[r.emoji_name];
        reactors.insert(r.actor);
        seqs.push_back(r.seq);
      }
      for (const auto& c : q.comments) {
        repliers.insert(c.actor);
        seqs.push_back(c.seq);
      }
      eng.reactors.assign(reactors.begin(), reactors.end());
      eng.repliers.assign(repliers.begin(), repliers.end());
      if (!q.comments.empty()) eng.sample_comment = q.comments.front().text;
      std::sort(seqs.begin(), seqs.end());
      SocialSignal h6;
      h6.heuristic = Heuristic::h6;
      h6.payload = std::move(eng);
      h6.score = h5.score;
      h6.engagement = h5.engagement;
      h6.evidence_seqs = std::move(seqs);
      decorations.push_back(std::move(h6));
    }

    if (q.record) {
      std::set<std::string> authors_in_channel;
      for (const auto& a : q.record->authors) {
        if (a.author_id.empty()) continue;
        for (const auto& [id, m] : members) {
          if (is_human_member(ctx, id) && m.linked_author_id == a.author_id) authors_in_channel.insert(id);
        }
      }
      for (const auto& id : authors_in_channel) {
        SocialSignal h7;
        h7.heuristic = Heuristic::h7;
        h7.payload = PriorPaperByMember{ref, id};
        h7.score = h5.score;
        h7.engagement = h5.engagement;
        h7.evidence_seqs = h5.evidence_seqs;
        decorations.push_back(std::move(h7));
      }
    }
    out.push_back(std::move(h5));
    out.insert(out.end(), std::make_move_iterator(decorations.begin()), std::make_move_iterator(decorations.end()));
  }
  return out;
}

namespace {

struct Interest {
  const IndexedPaper* paper;
  std::vector<Seq> seqs;
};

std::vector<Interest> interests_of(const std::string& member, const PaperRecord& paper, const RetrievalContext& ctx) {
  std::vector<Interest> out;
  for (const auto& [ref, p] : ctx.kb.papers()) {
    if (ref == paper.ref || !p.interested_members.contains(member)) continue;
    out.push_back({&p, member_activity(p, member)});
  }
  return out;
}

std::optional<PaperRecord> record_for(const PaperRef& ref, const RetrievalContext& ctx) {
  if (const auto* p = ctx.kb.find(ref); p && p->record) return p->record;
  if (!ctx.metadata) return std::nullopt;
  try {
    return ctx.metadata->fetch_paper_metadata(ref);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<SocialSignal> detect_member_signals(const PaperRecord& paper, const RetrievalContext& ctx) {
  std::vector<SocialSignal> out;
  for (const auto& [id, member] : ctx.kb.members()) {
    if (!is_human_member(ctx, id)) continue;
    const auto interests = interests_of(id, paper, ctx);

    // h8
    const Interest* best = nullptr;
    double best_cos = -2.0;
    std::vector<std::pair<double, const Interest*>> similar;
    for (const auto& in : interests) {
      if (!in.paper->record) continue;
      const auto c = cosine_of(paper, *in.paper->record);
      if (!c) continue;
      if (*c > best_cos) {
        best_cos = *c;
        best = &in;
      }
      if (*c >= ctx.tau) similar.emplace_back(*c, &in);
    }
    if (best && best_cos >= ctx.tau) {
      SocialSignal s;
      s.heuristic = Heuristic::h8;
      s.payload = MemberInterest{id, best_cos, best->paper->ref};
      s.score = best_cos;
      s.evidence_seqs = best->seqs;
      s.engagement = best->seqs.size();
      out.push_back(std::move(s));
    }

    // h9
    struct Variant {
      InterestEvidence evidence;
      double support;
    };
    std::vector<Variant> variants;
    std::set<Seq> evidence;

    if (!similar.empty()) {
      std::stable_sort(similar.begin(), similar.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      InterestEvidence ev{InterestVariant::liked_similar_papers, {}, std::nullopt};
      for (const auto& [c, in] : similar) {
        ev.papers.push_back(in->paper->ref);
        evidence.insert(in->seqs.begin(), in->seqs.end());
      }
      variants.push_back({std::move(ev), similar.front().first});
    }

    for (const auto& author : paper.authors) {
      InterestEvidence ev{InterestVariant::liked_author_papers, {}, author.name};
      for (const auto& in : interests) {
        if (!in.paper->record) continue;
        const auto& as = in.paper->record->authors;
        if (std::any_of(as.begin(), as.end(), [&](const Author& a) { return same_author(a, author); })) {
          ev.papers.push_back(in.paper->ref);
          evidence.insert(in.seqs.begin(), in.seqs.end());
        }
      }
      if (!ev.papers.empty()) variants.push_back({std::move(ev), 0.8});
    }

    if (paper.venue && !normalize_affiliation(*paper.venue).empty()) {
      const std::string key = normalize_affiliation(*paper.venue);
      InterestEvidence ev{InterestVariant::liked_venue_papers, {}, *paper.venue};
      for (const auto& in : interests) {
        if (in.paper->record && in.paper->record->venue && normalize_affiliation(*in.paper->record->venue) == key) {
          ev.papers.push_back(in.paper->ref);
          evidence.insert(in.seqs.begin(), in.seqs.end());
        }
      }
      if (!ev.papers.empty()) variants.push_back({std::move(ev), 0.5});
    }

    if (member.linked_author_id && ctx.metadata) {
      std::vector<PaperRef> own;
      try {
        own = ctx.metadata->fetch_author_papers(*member.linked_author_id);
      } catch (const Error&) {
      }
      std::sort(own.begin(), own.end());
      InterestEvidence similar_pubs{InterestVariant::own_publications_similar, {}, std::nullopt};
      InterestEvidence citing_pubs{InterestVariant::cites_similar, {}, std::nullopt};
      double similar_support = 0.0;
      for (const auto& ref : own) {
        if (ref == paper.ref) continue;
        if (paper.cites(ref) || paper.is_cited_by(ref)) {
          citing_pubs.papers.push_back(ref);
          continue;
        }
        const auto rec = record_for(ref, ctx);
        if (!rec) continue;
        if (rec->cites(paper.ref)) {
          citing_pubs.papers.push_back(ref);
          continue;
        }
        double support = 0.0;
        if (!shared_author_names(paper, *rec).empty()) support = 0.8;
        if (const auto c = cosine_of(paper, *rec); c && *c >= ctx.tau) support = std::max(support, *c);
        if (support > 0.0) {
          similar_pubs.papers.push_back(ref);
          similar_support = std::max(similar_support, support);
        }
      }
      if (!citing_pubs.papers.empty()) variants.push_back({std::move(citing_pubs), 1.0});
      if (!similar_pubs.papers.empty()) variants.push_back({std::move(similar_pubs), similar_support});
    }

    if (variants.empty()) continue;
    std::stable_sort(variants.begin(), variants.end(), [](const Variant& a, const Variant& b) {
      if (a.support != b.support) return a.support > b.support;
      return a.evidence.variant < b.evidence.variant;
    });
    MemberInterestRelation payload{id, {}};
    for (auto& v : variants) payload.variants.push_back(std::move(v.evidence));
    SocialSignal s;
    s.heuristic = Heuristic::h9;
    s.score = variants.front().support;
    s.payload = std::move(payload);
    s.evidence_seqs.assign(evidence.begin(), evidence.end());
    s.engagement = s.evidence_seqs.size();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SocialSignal> detect_all_signals(const PaperRecord& paper, const RetrievalContext& ctx) {
  auto out = detect_metadata_signals(paper, ctx);
  auto two = detect_paper_connection_signals(paper, ctx);
  auto three = detect_member_signals(paper, ctx);
  out.insert(out.end(), std::make_move_iterator(two.begin()), std::make_move_iterator(two.end()));
  out.insert(out.end(), std::make_move_iterator(three.begin()), std::make_move_iterator(three.end()));
  return out;
}

bool outranks(const SocialSignal& a, const SocialSignal& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.engagement != b.engagement) return a.engagement > b.engagement;
  if (a.latest_evidence() != b.latest_evidence()) return a.latest_evidence() > b.latest_evidence();
  if (a.heuristic != b.heuristic) return a.heuristic < b.heuristic;
  return a.subject_key() < b.subject_key();
}

SelectedSignals rank_and_select(std::span<const SocialSignal> signals) {
  SelectedSignals out;
  for (const auto& s : signals) {
    auto& slot = out.get(s.category());
    if (!slot || outranks(s, *slot)) slot = s;
  }
  return out;
}

}  // namespace socialrag
