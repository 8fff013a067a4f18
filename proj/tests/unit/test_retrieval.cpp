#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "socialrag/errors.hpp"
#include "socialrag/retrieval.hpp"

using namespace socialrag;
using namespace fixtures;

namespace {

const Timestamp t0 = at("2024-03-01T09:00:00Z");
Timestamp day(long n) { return t0 + days(n); }

std::vector<double> cos_with_x(double c) {
  std::vector<double> v(8, 0.0);
  v[0] = c;
  v[1] = std::sqrt(1 - c * c);
  return v;
}

Author author(const std::string& id, const std::string& name, std::vector<std::string> affs = {}) {
  return Author{id, name, std::move(affs)};
}

std::vector<SocialSignal> of(const std::vector<SocialSignal>& all, Heuristic h) {
  std::vector<SocialSignal> out;
  for (const auto& s : all) {
    if (s.heuristic == h) out.push_back(s);
  }
  return out;
}

std::map<std::string, std::vector<PaperRecord>> own_pubs(MockWorld& world, const KnowledgeBase& kb) {
  std::map<std::string, std::vector<PaperRecord>> out;
  for (const auto& [id, m] : kb.members()) {
    if (!m.linked_author_id) continue;
    for (const auto& ref : world.metadata.fetch_author_papers(*m.linked_author_id))
      out[id].push_back(world.metadata.fetch_paper_metadata(ref));
  }
  return out;
}

// Detector output and brute-force enumeration for one candidate.
struct Both {
  std::vector<SocialSignal> signals;
  std::vector<oracle::Fired> detected;
  std::vector<oracle::Fired> expected;
};

Both run_both(MockWorld& world, const LogBuilder& b, const PaperRef& candidate, Timestamp now) {
  const auto kb = b.kb(&world.metadata);
  const auto cand = world.metadata.fetch_paper_metadata(candidate);
  auto ctx = RetrievalContext::from_config(kb, now, &world.metadata);
  Both r;
  r.signals = detect_all_signals(cand, ctx);
  r.detected = oracle::project(r.signals);
  const auto records = world.records();
  oracle::OracleInputs in{b.events(), records, now, kb.config().tau, kb.config().heuristic_window, own_pubs(world, kb)};
  r.expected = oracle::enumerate_signals(cand, in);
  return r;
}

std::string dump(const std::vector<oracle::Fired>& f) {
  std::string s;
  for (const auto& x : f) s += oracle::describe(x) + "\n";
  return s;
}

}  // namespace

TEST(Cosine, AnalyticCases) {
  const std::vector<double> x{1, 0}, y{0, 1}, d{1 / std::sqrt(2.0), 1 / std::sqrt(2.0)};
  EXPECT_DOUBLE_EQ(cosine_similarity(x, x), 1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(x, y), 0.0);
  EXPECT_NEAR(cosine_similarity(x, d), 0.7071, 1e-4);
  EXPECT_NEAR(cosine_similarity(x, d), std::sqrt(0.5), 1e-6);
}

TEST(Cosine, BadInputThrows) {
  const std::vector<double> x{1, 0}, z{0, 0}, three{1, 0, 0}, empty;
  EXPECT_THROW(cosine_similarity(x, three), InvalidInput);
  EXPECT_THROW(cosine_similarity(x, z), InvalidInput);
  EXPECT_THROW(cosine_similarity(empty, empty), InvalidInput);
}

TEST(MetadataSignals, AuthorIsLinkedMember) {
  MockWorld world({record("2401.00001", "Candidate", {author("A7", "Pat Lee")}, "CHI", cos_with_x(1.0))});
  LogBuilder b;
  ChannelConfig c;
  c.members = {Member{"P", "Pat", "A7", std::nullopt}};
  b.config(c);
  const auto r = run_both(world, b, arxiv("2401.00001"), day(0));
  const auto h1 = of(r.signals, Heuristic::h1);
  ASSERT_EQ(h1.size(), 1u);
  EXPECT_EQ(std::get<AuthorIsMember>(h1[0].payload).member_id, "P");
  EXPECT_EQ(r.detected, r.expected) << dump(r.expected);
}

TEST(MetadataSignals, VenueOfPaperLikedThirtyDaysAgo) {
  MockWorld world({record("2401.00001", "Candidate", {author("A1", "Ann")}, "CHI", cos_with_x(1.0)),
                   record("2401.00002", "Older", {author("A2", "Bo")}, "CHI", cos_with_x(0.0))});
  LogBuilder b;
  const Seq p = b.share("u1", "2401.00002", day(-31));
  b.react("u2", p, "thumbsup", day(-30));
  const auto r = run_both(world, b, arxiv("2401.00001"), day(0));
  const auto h4 = of(r.signals, Heuristic::h4);
  ASSERT_EQ(h4.size(), 1u);
  EXPECT_EQ(std::get<VenueRecentlyDiscussed>(h4[0].payload).venue, "CHI");
  EXPECT_EQ(r.detected, r.expected) << dump(r.expected);
}

TEST(MetadataSignals, NoOverlapNoSignals) {
  MockWorld world({record("2401.00001", "Candidate", {author("A1", "Ann", {"Lab X"})}, "CHI", cos_with_x(1.0)),
                   record("2401.00002", "Older", {author("A2", "Bo")}, "UIST", cos_with_x(0.0))});
  LogBuilder b;
  ChannelConfig c;
  c.members = {Member{"u1", "U", "A9", "Lab Y"}};
  b.config(c);
  const Seq p = b.share("u1", "2401.00002", day(-3));
  b.react("u2", p, "thumbsup", day(-2));
  const auto kb = b.kb(&world.metadata);
  const auto cand = world.metadata.fetch_paper_metadata(arxiv("2401.00001"));
  EXPECT_TRUE(detect_metadata_signals(cand, RetrievalContext::from_config(kb, day(0), &world.metadata)).empty());
}

TEST(MetadataSignals, AffiliationMatchIgnoresCaseAndSpacing) {
  MockWorld world({record("2401.00001", "Candidate", {author("A1", "Ann", {"Allen  Institute for AI"})}, "CHI",
                          cos_with_x(1.0))});
  LogBuilder b;
  ChannelConfig c;
  c.members = {Member{"u1", "U", std::nullopt, "allen institute for ai"}, Member{"u2", "V", std::nullopt, "MIT"}};
  b.config(c);
  const auto r = run_both(world, b, arxiv("2401.00001"), day(0));
  const auto h3 = of(r.signals, Heuristic::h3);
  ASSERT_EQ(h3.size(), 1u);
  EXPECT_EQ(std::get<AffiliationOverlap>(h3[0].payload).member_ids, std::vector<std::string>{"u1"});
  EXPECT_DOUBLE_EQ(h3[0].score, 0.5);
}

TEST(PaperConnection, CitesSharedPaperWithContexts) {
  auto cand = record("2401.00001", "Candidate", {author("A1", "Ann")}, "CHI", cos_with_x(0.1));
  cand.citations = {arxiv("2401.00002")};
  cand.citation_contexts[arxiv("2401.00002")] = {"builds on the reading circle design"};
  MockWorld world({cand, record("2401.00002", "Q", {author("A2", "Bo")}, "UIST", cos_with_x(1.0))});
  LogBuilder b;
  b.share("u1", "2401.00002", day(-5));
  const auto r = run_both(world, b, arxiv("2401.00001"), day(0));
  const auto h5 = of(r.signals, Heuristic::h5);
  ASSERT_EQ(h5.size(), 1u);
  const auto& rel = std::get<PriorPaperRelation>(h5[0].payload);
  EXPECT_EQ(rel.prior_paper, arxiv("2401.00002"));
  EXPECT_EQ(rel.relation, PaperRelation::cites);
  EXPECT_EQ(rel.citation_contexts, std::vector<std::string>{"builds on the reading circle design"});
  EXPECT_EQ(r.detected, r.expected) << dump(r.expected);
}

TEST(PaperConnection, EngagementOnPriorPaper) {
  MockWorld world({record("2401.00001", "Candidate", {author("A1", "Ann")}, "CHI", cos_with_x(1.0), {"2401.00002"}),
                   record("2401.00002", "Q", {author("A2", "Bo")}, "UIST", cos_with_x(0.0))});
  LogBuilder b;
  const Seq p = b.share("u1", "2401.00002", day(-5));
  b.reply("u2", p, "this is great", day(-4));
  b.reply("u3", p, "cc @u4", day(-4));
  b.react("u2", p, "thumbsup", day(-4));
  b.react("u4", p, "heart", day(-4));
  b.react("u5", p, "eyes", day(-4));
  const auto r = run_both(world, b, arxiv("2401.00001"), day(0));
  const auto h6 = of(r.signals, Heuristic::h6);
  ASSERT_EQ(h6.size(), 1u);
  const auto& eng = std::get<PriorPaperEngagement>(h6[0].payload);
  EXPECT_EQ(eng.reply_count, 2u);
  EXPECT_EQ(eng.reaction_total(), 3u);
  EXPECT_EQ(eng.reactors, (std::vector<std::string>{"u2", "u4", "u5"}));
  EXPECT_EQ(r.detected, r.expected) << dump(r.expected);
}

TEST(PaperConnection, PriorPaperByMember) {
  MockWorld world({record("2401.00001", "Candidate", {author("A1", "Ann")}, "CHI", cos_with_x(1.0), {"2401.00002"}),
                   record("2401.00002", "Q", {author("AM", "Mo")}, "UIST", cos_with_x(0.0))});
  LogBuilder b;
  ChannelConfig c;
  c.members = {Member{"M", "Mo", "AM", std::nullopt}};
  b.config(c);
  b.share("u1", "2401.00002", day(-5));
  const auto r = run_both(world, b, arxiv("2401.00001"), day(0));
  const auto h7 = of(r.signals, Heuristic::h7);
  ASSERT_EQ(h7.size(), 1u);
  EXPECT_EQ(std::get<PriorPaperByMember>(h7[0].payload).member_id, "M");
  EXPECT_EQ(r.detected, r.expected) << dump(r.expected);
}

TEST(MemberSignals, InterestSimilarityAboveTau) {
  MockWorld world({record("2401.00001", "Candidate", {author("A1", "Ann")}, "CHI", cos_with_x(1.0)),
                   record("2401.00002", "Q", {author("A2", "Bo")}, "UIST", cos_with_x(0.82))});
  LogBuilder b;
  const Seq p = b.share("u9", "2401.00002", day(-10));
  b.react("M", p, "thumbsup", day(-9));
  const auto r = run_both(world, b, arxiv("2401.00001"), day(0));
  std::vector<SocialSignal> h8;
  for (const auto& s : of(r.signals, Heuristic::h8)) {
    if (std::get<MemberInterest>(s.payload).member_id == "M") h8.push_back(s);
  }
  ASSERT_EQ(h8.size(), 1u);
  EXPECT_NEAR(std::get<MemberInterest>(h8[0].payload).similarity, 0.82, 1e-9);
  EXPECT_NEAR(h8[0].score, 0.82, 1e-9);
  EXPECT_EQ(r.detected, r.expected) << dump(r.expected);
}

TEST(MemberSignals, SharedAuthorWithLinkedPublications) {
  MockWorld world({record("2401.00001", "Candidate", {author("A1", "Ann"), author("A3", "Cy")}, "CHI", cos_with_x(1.0)),
                   record("2401.00005", "Own", {author("AM", "Mo"), author("A3", "Cy")}, "UIST", cos_with_x(0.0))});
  LogBuilder b;
  ChannelConfig c;
  c.members = {Member{"M", "Mo", "AM", std::nullopt}};
  b.config(c);
  const auto r = run_both(world, b, arxiv("2401.00001"), day(0));
  const auto h9 = of(r.signals, Heuristic::h9);
  ASSERT_EQ(h9.size(), 1u);
  const auto& rel = std::get<MemberInterestRelation>(h9[0].payload);
  EXPECT_EQ(rel.member_id, "M");
  ASSERT_FALSE(rel.variants.empty());
  EXPECT_EQ(rel.variants[0].variant, InterestVariant::own_publications_similar);
  EXPECT_EQ(r.detected, r.expected) << dump(r.expected);
}

TEST(MemberSignals, QuietMemberWithoutPublicationsGetsNothing) {
  MockWorld world({record("2401.00001", "Candidate", {author("A1", "Ann")}, "CHI", cos_with_x(1.0))});
  LogBuilder b;
  ChannelConfig c;
  c.members = {Member{"M", "Mo", std::nullopt, std::nullopt}};
  b.config(c);
  const auto kb = b.kb(&world.metadata);
  const auto cand = world.metadata.fetch_paper_metadata(arxiv("2401.00001"));
  EXPECT_TRUE(detect_member_signals(cand, RetrievalContext::from_config(kb, day(0), &world.metadata)).empty());
}

TEST(Selection, OnePerCategoryKeepsAll) {
  std::vector<SocialSignal> s(3);
  s[0].heuristic = Heuristic::h1, s[0].payload = AuthorIsMember{"a", "A", "m"};
  s[1].heuristic = Heuristic::h5, s[1].payload = PriorPaperRelation{};
  s[2].heuristic = Heuristic::h8, s[2].payload = MemberInterest{"m", 0.7, {}};
  const auto sel = rank_and_select(s);
  EXPECT_EQ(sel.size(), 3u);
  EXPECT_EQ(sel.metadata->heuristic, Heuristic::h1);
  EXPECT_EQ(sel.paper_connection->heuristic, Heuristic::h5);
  EXPECT_EQ(sel.member_connection->heuristic, Heuristic::h8);
}

TEST(Selection, HigherEngagementPriorPaperWins) {
  MockWorld world({record("2401.00001", "Candidate", {author("A1", "Ann")}, "CHI", cos_with_x(1.0), {"2401.00002", "2401.00003"}),
                   record("2401.00002", "Busy", {author("A2", "Bo")}, "UIST", cos_with_x(0.0)),
                   record("2401.00003", "Quiet", {author("A3", "Cy")}, "UIST", cos_with_x(0.0))});
  LogBuilder b;
  const Seq busy = b.share("u1", "2401.00002", day(-5));
  const Seq quiet = b.share("u1", "2401.00003", day(-4));
  b.react("u2", busy, "thumbsup", day(-4));
  b.react("u3", busy, "heart", day(-4));
  b.reply("u4", busy, "nice", day(-4));
  b.react("u2", quiet, "thumbsup", day(-3));
  const auto r = run_both(world, b, arxiv("2401.00001"), day(0));
  std::vector<SocialSignal> h5 = of(r.signals, Heuristic::h5);
  ASSERT_EQ(h5.size(), 2u);
  const auto sel = rank_and_select(h5);
  EXPECT_EQ(sel.paper_connection->prior_paper(), arxiv("2401.00002"));
  // The oracle's engagement for each prior paper agrees with the detector's.
  for (const auto& s : h5) {
    const auto rc = oracle::recount(b.events(), *s.prior_paper());
    EXPECT_EQ(s.engagement, rc.positive_reactions + rc.negative_reactions + rc.neutral_reactions + rc.comments);
  }
}

TEST(Selection, EmptyInputEmptySelection) { EXPECT_TRUE(rank_and_select({}).empty()); }

// Oracle equivalence on small randomized fixtures (<= 50 events, <= 10 papers).
TEST(RetrievalProperty, DetectorsMatchBruteForceOnRandomFixtures) {
  auto corpus = small_corpus();
  std::vector<PaperRef> refs;
  for (const auto& p : corpus.papers()) refs.push_back(p.ref);
  MockWorld world(corpus);
  std::set<Heuristic> covered;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto log = random_log(seed, 45, refs);
    LogBuilder b;
    for (const auto& e : log) {
      // Re-emit through the builder so the fixture helpers stay the single source of logs.
      if (const auto* c = e.as<ConfigPayload>()) {
        auto cfg = c->config;
        cfg.members.push_back(Member{"u3", "Ike", "a2", "KAIST"});
        b.config(cfg);
      } else if (const auto* m = e.as<MessagePayload>()) {
        b.message(e.actor, m->text, e.ts);
      } else if (const auto* r = e.as<ReactionPayload>()) {
        b.react(e.actor, r->target_seq, r->emoji_name, e.ts);
      } else if (const auto* r = e.as<ReplyPayload>()) {
        b.reply(e.actor, r->parent_seq, r->text, e.ts);
      } else if (const auto* p = e.as<BotPostPayload>()) {
        b.bot_post(p->message.paper, p->message.body, e.ts);
      }
    }
    const auto now = log.back().ts;
    for (const auto& cand : refs) {
      const auto r = run_both(world, b, cand, now);
      for (const auto& f : r.detected) covered.insert(f.heuristic);
      ASSERT_EQ(r.detected, r.expected) << "seed " << seed << " candidate " << cand.str() << "\n" << dump(r.expected)
                                        << "--- detected\n" << dump(r.detected);
    }
  }
  EXPECT_EQ(covered.size(), 9u) << "random fixtures should exercise every heuristic";
}

TEST(RetrievalProperty, DeterministicOnIdenticalSnapshots) {
  MockWorld world(small_corpus());
  std::vector<PaperRef> refs;
  for (const auto& p : world.corpus->papers()) refs.push_back(p.ref);
  const auto log = random_log(99, 50, refs);
  const auto kb1 = KnowledgeBase::rebuild("lab", log, &world.metadata);
  const auto kb2 = KnowledgeBase::rebuild("lab", log, &world.metadata);
  for (const auto& ref : refs) {
    const auto cand = world.metadata.fetch_paper_metadata(ref);
    const auto a = detect_all_signals(cand, RetrievalContext::from_config(kb1, log.back().ts, &world.metadata));
    const auto b = detect_all_signals(cand, RetrievalContext::from_config(kb2, log.back().ts, &world.metadata));
    EXPECT_EQ(a, b);
    EXPECT_EQ(rank_and_select(a), rank_and_select(b));
  }
}

// Adding a positive reaction or comment on an already-related paper never removes a signal.
TEST(RetrievalProperty, StrengtheningEvidenceNeverRemovesSignals) {
  MockWorld world(small_corpus());
  std::vector<PaperRef> refs;
  for (const auto& p : world.corpus->papers()) refs.push_back(p.ref);
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto log = random_log(seed, 40, refs);
    auto kb = KnowledgeBase::rebuild("lab", log, &world.metadata);
    const auto post_seqs = [&] {
      std::vector<Seq> out;
      for (const auto& e : log) {
        if (!kb.papers_at(e.seq).empty()) out.push_back(e.seq);
      }
      return out;
    }();
    const auto now = log.back().ts + std::chrono::hours(1);
    for (const auto& ref : refs) {
      const auto cand = world.metadata.fetch_paper_metadata(ref);
      const auto before = detect_all_signals(cand, RetrievalContext::from_config(kb, now, &world.metadata));
      auto stronger = kb;
      const Seq target = post_seqs[rng() % post_seqs.size()];
      const bool comment = rng() % 2;
      SocialEvent e{stronger.last_seq() + 1, now, "lab", "u2",
                    comment ? EventPayload{ReplyPayload{target, "+1"}} : EventPayload{ReactionPayload{target, "thumbsup"}}};
      stronger.ingest_event(e);
      const auto after = detect_all_signals(cand, RetrievalContext::from_config(stronger, now, &world.metadata));
      std::set<std::pair<Heuristic, std::string>> keys_after;
      for (const auto& s : after) keys_after.insert({s.heuristic, s.subject_key()});
      for (const auto& s : before) {
        EXPECT_TRUE(keys_after.contains({s.heuristic, s.subject_key()}))
            << to_string(s.heuristic) << " " << s.subject_key() << " lost after strengthening";
      }
    }
  }
}

TEST(RetrievalProperty, H8ScoreIsMaxPairwiseCosine) {
  MockWorld world(small_corpus());
  std::vector<PaperRef> refs;
  for (const auto& p : world.corpus->papers()) refs.push_back(p.ref);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto log = random_log(seed, 50, refs);
    const auto kb = KnowledgeBase::rebuild("lab", log, &world.metadata);
    for (const auto& ref : refs) {
      const auto cand = world.metadata.fetch_paper_metadata(ref);
      for (const auto& s : detect_member_signals(cand, RetrievalContext::from_config(kb, log.back().ts, &world.metadata))) {
        if (s.heuristic != Heuristic::h8) continue;
        const auto& member = std::get<MemberInterest>(s.payload).member_id;
        double best = -2;
        for (const auto& [r, p] : kb.papers()) {
          if (r == ref || !p.interested_members.contains(member) || !p.record || !p.record->embedding || !cand.embedding)
            continue;
          double dot = 0;
          for (std::size_t i = 0; i < cand.embedding->size(); ++i) dot += (*cand.embedding)[i] * (*p.record->embedding)[i];
          best = std::max(best, dot);
        }
        EXPECT_NEAR(s.score, best, 1e-12);
      }
    }
  }
}
