#include "fixtures.hpp"

#include <cmath>
#include <random>

#include <spdlog/spdlog.h>

namespace fixtures {

namespace {
// Keep test output readable; failures are reported through assertions.
const bool quiet_logs = [] {
  spdlog::set_level(spdlog::level::err);
  return true;
}();
}  // namespace

std::vector<double> axis(std::size_t i, std::size_t j, double tilt, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  v[i] = 1.0;
  if (tilt != 0.0) v[j] += tilt;
  double n = 0;
  for (double x : v) n += x * x;
  for (double& x : v) x /= std::sqrt(n);
  return v;
}

PaperRecord record(const std::string& arxiv_id, const std::string& title, std::vector<Author> authors,
                   std::optional<std::string> venue, std::vector<double> embedding, std::vector<std::string> cites) {
  PaperRecord r;
  r.ref = arxiv(arxiv_id);
  r.title = title;
  r.abstract = "We study " + title + ". Our results show clear gains.";
  r.authors = std::move(authors);
  r.venue = std::move(venue);
  r.year = 2023;
  r.embedding = std::move(embedding);
  for (const auto& c : cites) r.citations.push_back(arxiv(c));
  return r;
}

LogBuilder::LogBuilder(std::string channel) : channel_(std::move(channel)) {}

Seq LogBuilder::push(const std::string& actor, Timestamp ts, EventPayload payload) {
  SocialEvent e;
  e.seq = events_.size() + 1;
  e.ts = ts;
  e.channel = channel_;
  e.actor = actor;
  e.payload = std::move(payload);
  events_.push_back(std::move(e));
  return events_.back().seq;
}

Seq LogBuilder::config(const ChannelConfig& config) {
  ChannelConfig c = config;
  c.channel = channel_;
  const Timestamp ts = events_.empty() ? at("2024-01-01T00:00:00Z") : events_.back().ts;
  return push("admin", ts, ConfigPayload{c});
}

Seq LogBuilder::message(const std::string& actor, const std::string& text, Timestamp ts) {
  return push(actor, ts, MessagePayload{text});
}

Seq LogBuilder::share(const std::string& actor, const std::string& arxiv_id, Timestamp ts) {
  return message(actor, "worth a read " + url(arxiv_id), ts);
}

Seq LogBuilder::react(const std::string& actor, Seq target, const std::string& emoji, Timestamp ts) {
  return push(actor, ts, ReactionPayload{target, emoji});
}

Seq LogBuilder::reply(const std::string& actor, Seq parent, const std::string& text, Timestamp ts) {
  return push(actor, ts, ReplyPayload{parent, text});
}

Seq LogBuilder::bot_post(const PaperRef& paper, const std::string& body, Timestamp ts, const std::string& agent) {
  BotMessage m;
  m.paper = paper;
  m.body = body;
  return push(agent, ts, BotPostPayload{m});
}

KnowledgeBase LogBuilder::kb(MetadataClient* metadata) const {
  return KnowledgeBase::rebuild(channel_, events_, metadata);
}

std::vector<SocialEvent> random_log(std::uint64_t seed, std::size_t n, const std::vector<PaperRef>& papers,
                                    const std::string& channel) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t k) { return static_cast<std::size_t>(rng() % k); };
  static const std::vector<std::string> emoji{"thumbsup", "heart", "eyes", "thumbsdown", "tada", "thinking_face", "fire"};
  const std::vector<std::string> actors{"u1", "u2", "u3", "u4", "u5"};
  LogBuilder b(channel);
  ChannelConfig c;
  c.members = {Member{"u1", "Uma", "A1", "KAIST"}, Member{"u2", "Vik", std::nullopt, "MIT"}};
  b.config(c);
  Timestamp t = at("2024-01-01T08:00:00Z");
  std::vector<Seq> posts;
  for (std::size_t i = 0; i < n; ++i) {
    t += std::chrono::minutes(30 + pick(60 * 30));
    const auto& actor = actors[pick(actors.size())];
    const std::size_t roll = pick(100);
    if (posts.empty() || roll < 30) {
      std::string text = "look " + canonical_url(papers[pick(papers.size())]);
      if (pick(4) == 0) text += " and " + canonical_url(papers[pick(papers.size())]);
      posts.push_back(b.message(actor, text, t));
    } else if (roll < 35) {
      posts.push_back(b.bot_post(papers[pick(papers.size())], "bot says hi", t));
    } else if (roll < 70) {
      b.react(actor, posts[pick(posts.size())], emoji[pick(emoji.size())], t);
    } else if (roll < 90) {
      b.reply(actor, posts[pick(posts.size())], "thoughts from " + actor, t);
    } else {
      b.message(actor, "coffee anyone?", t);
    }
  }
  return b.events();
}

MockWorld::MockWorld(std::vector<PaperRecord> papers) : MockWorld(CorpusFixture(std::move(papers))) {}

MockWorld::MockWorld(CorpusFixture c)
    : corpus(std::make_shared<const CorpusFixture>(std::move(c))), metadata(corpus), recommender(corpus) {}

std::map<PaperRef, PaperRecord> MockWorld::records() const {
  std::map<PaperRef, PaperRecord> out;
  for (const auto& p : corpus->papers()) out[p.ref] = const_cast<MockMetadataClient&>(metadata).fetch_paper_metadata(p.ref);
  return out;
}

CorpusFixture small_corpus() { return CorpusFixture::load(data_dir() / "corpus_small.jsonl"); }

Transcript transcript_a() { return load_transcript(data_dir() / "transcript_a.json"); }

std::string permalink(Seq seq) { return "https://chat.example/lab/p" + std::to_string(seq); }

Scene::Scene(std::uint64_t seed)
    : transcript(transcript_a()),
      world(*transcript.corpus),
      kb(KnowledgeBase::rebuild(transcript.config.channel, replay(transcript, seed).kb.log(), &world.metadata)),
      now(*kb.last_ts() + std::chrono::hours(1)) {}

std::vector<PaperRecord> Scene::candidates() {
  std::vector<PaperRecord> out;
  for (const auto& p : world.corpus->papers()) {
    if (!kb.has_paper(p.ref)) out.push_back(world.metadata.fetch_paper_metadata(p.ref));
  }
  return out;
}

SelectedSignals Scene::selected_for(const PaperRecord& candidate, unsigned keep_mask) {
  const auto signals = detect_all_signals(candidate, retrieval());
  auto selected = rank_and_select(signals);
  if (!(keep_mask & 1u)) selected.metadata.reset();
  if (!(keep_mask & 2u)) selected.paper_connection.reset();
  if (!(keep_mask & 4u)) selected.member_connection.reset();
  return selected;
}

ChannelView Scene::view(std::set<std::string> cooling) const { return ChannelView{kb, std::move(cooling), permalink}; }

}  // namespace fixtures
