#include "socialrag/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "socialrag/errors.hpp"

namespace socialrag {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Transcript I/O and validation.

void Transcript::validate() const {
  try {
    config.validate();
  } catch (const Error& e) {
    throw ValidationError(std::string("transcript config: ") + e.what());
  }
  if (!corpus) throw ValidationError("transcript has no corpus");
  if (end <= start) throw ValidationError("transcript end must be after start");
  if (tick <= Duration::zero()) throw ValidationError("tick must be positive");
  Seq expected = 1;
  std::optional<Timestamp> last_ts;
  std::set<Seq> seen;
  for (const auto& te : events) {
    const auto& e = te.event;
    const std::string where = "transcript event " + std::to_string(e.seq);
    if (e.seq != expected) throw ValidationError(where + ": expected seq " + std::to_string(expected));
    ++expected;
    if (last_ts && e.ts < *last_ts) throw ValidationError(where + ": timestamps go backwards");
    last_ts = e.ts;
    if (e.ts > end) throw ValidationError(where + ": after the transcript end");
    if (e.channel != config.channel) throw ValidationError(where + ": channel " + e.channel + " != " + config.channel);
    if (e.actor.empty()) throw ValidationError(where + ": empty actor");
    if (e.actor == config.agent_id) throw ValidationError(where + ": transcripts cannot script the agent");
    Seq target = 0;
    switch (e.kind()) {
      case EventKind::message:
        for (const auto& ref : extract_item_refs(e.as<MessagePayload>()->text)) {
          if (!corpus->find(ref)) throw ValidationError(where + ": " + ref.str() + " is not in the corpus");
        }
        break;
      case EventKind::reaction:
        if (e.as<ReactionPayload>()->emoji_name.empty()) throw ValidationError(where + ": empty emoji name");
        target = e.as<ReactionPayload>()->target_seq;
        break;
      case EventKind::reply:
        target = e.as<ReplyPayload>()->parent_seq;
        break;
      case EventKind::config:
        if (e.as<ConfigPayload>()->config.channel != config.channel)
          throw ValidationError(where + ": config for another channel");
        break;
      case EventKind::bot_post:
        throw ValidationError(where + ": bot posts are produced by the replay, not scripted");
    }
    if (e.kind() == EventKind::reaction || e.kind() == EventKind::reply) {
      if (te.target_bot_post) {
        if (*te.target_bot_post == 0) throw ValidationError(where + ": target_bot_post counts from 1");
      } else if (!seen.contains(target)) {
        throw ValidationError(where + ": target " + std::to_string(target) + " does not precede it");
      }
    }
    seen.insert(e.seq);
  }
}

namespace {

TranscriptEvent transcript_event_from_json(const json& j, const std::string& channel) {
  json copy = j;
  if (!copy.contains("channel")) copy["channel"] = channel;
  TranscriptEvent te;
  if (copy.contains("target_bot_post")) {
    te.target_bot_post = copy["target_bot_post"].get<std::size_t>();
    copy.erase("target_bot_post");
    auto& p = copy["payload"];
    const auto kind = copy.at("kind").get<std::string>();
    if (kind == "reaction" && !p.contains("target_seq")) p["target_seq"] = 0;
    if (kind == "reply" && !p.contains("parent_seq")) p["parent_seq"] = 0;
  }
  try {
    te.event = event_from_json(copy);
  } catch (const InvalidInput& e) {
    throw ValidationError(e.what());
  }
  return te;
}

}  // namespace

Transcript transcript_from_json(const json& j, std::shared_ptr<const CorpusFixture> corpus) {
  Transcript t;
  try {
    t.config = config_from_json(j.at("config"));
    t.corpus = std::move(corpus);
    if (!t.corpus && j.contains("corpus") && j["corpus"].is_array()) {
      std::vector<PaperRecord> papers;
      for (const auto& r : j["corpus"]) papers.push_back(record_from_fixture_json(r));
      t.corpus = std::make_shared<CorpusFixture>(std::move(papers));
    }
    t.start = parse_timestamp(j.at("start").get<std::string>());
    t.end = parse_timestamp(j.at("end").get<std::string>());
    t.tick = Duration(j.value("tick_seconds", 3600));
    for (const auto& e : j.at("events")) t.events.push_back(transcript_event_from_json(e, t.config.channel));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad transcript: ") + e.what());
  } catch (const InvalidInput& e) {
    throw ValidationError(std::string("bad transcript: ") + e.what());
  }
  return t;
}

Transcript load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open transcript " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("transcript is not JSON: " + std::string(e.what()));
  }
  std::shared_ptr<const CorpusFixture> corpus;
  if (j.contains("corpus") && j["corpus"].is_string()) {
    auto p = std::filesystem::path(j["corpus"].get<std::string>());
    if (p.is_relative()) p = path.parent_path() / p;
    corpus = std::make_shared<CorpusFixture>(CorpusFixture::load(p));
  }
  return transcript_from_json(j, std::move(corpus));
}

ordered_json transcript_to_json(const Transcript& t) {
  ordered_json j;
  j["config"] = config_to_json(t.config);
  j["corpus"] = ordered_json::array();
  if (t.corpus) {
    for (const auto& p : t.corpus->papers()) j["corpus"].push_back(record_to_fixture_json(p));
  }
  j["start"] = format_timestamp(t.start);
  j["end"] = format_timestamp(t.end);
  j["tick_seconds"] = t.tick.count();
  j["events"] = ordered_json::array();
  for (const auto& te : t.events) {
    auto e = event_to_json(te.event);
    if (te.target_bot_post) e["target_bot_post"] = *te.target_bot_post;
    j["events"].push_back(std::move(e));
  }
  return j;
}

// ---------------------------------------------------------------------------
// Analytics.

SeriesPoint CumulativeSeries::final() const { return points.empty() ? SeriesPoint{} : points.back(); }

SeriesPoint CumulativeSeries::before_first_recommendation() const {
  SeriesPoint out;
  out.day = -1;
  for (const auto& p : points) {
    if (p.day >= 0) break;
    out = p;
    out.day = -1;
  }
  return out;
}

CumulativeSeries engagement_report(const KnowledgeBase& kb) {
  CumulativeSeries series;
  series.channel = kb.channel();
  const auto& log = kb.log();
  if (log.empty()) {
    series.points.push_back(SeriesPoint{});
    return series;
  }
  const auto bot_posts = kb.bot_post_seqs();
  const Timestamp anchor = bot_posts.empty() ? log.front().ts : kb.event(bot_posts.front())->ts;
  const long day0 = utc_day_index(anchor);
  auto is_bot_post = [&](Seq s) {
    const auto* e = kb.event(s);
    return e && e->kind() == EventKind::bot_post;
  };

  std::map<long, SeriesPoint> deltas;
  long first = 0, last = 0;
  bool any = false;
  for (const auto& e : log) {
    const long day = utc_day_index(e.ts) - day0;
    if (!any) first = last = day;
    first = std::min(first, day);
    last = std::max(last, day);
    any = true;
    auto& d = deltas[day];
    switch (e.kind()) {
      case EventKind::message:
        if (!kb.is_agent(e.actor) && !kb.papers_at(e.seq).empty()) ++d.human_recs;
        break;
      case EventKind::bot_post:
        ++d.bot_recs;
        break;
      case EventKind::reaction:
        ++d.emoji_reactions;
        if (is_bot_post(e.as<ReactionPayload>()->target_seq)) ++d.emoji_reactions_on_bot_posts;
        break;
      case EventKind::reply:
        ++d.comments;
        if (is_bot_post(e.as<ReplyPayload>()->parent_seq)) ++d.comments_on_bot_posts;
        break;
      case EventKind::config:
        break;
    }
  }
  first = std::min(first, 0L);
  SeriesPoint running;
  for (long day = first; day <= last; ++day) {
    if (auto it = deltas.find(day); it != deltas.end()) {
      running.human_recs += it->second.human_recs;
      running.bot_recs += it->second.bot_recs;
      running.emoji_reactions += it->second.emoji_reactions;
      running.comments += it->second.comments;
      running.emoji_reactions_on_bot_posts += it->second.emoji_reactions_on_bot_posts;
      running.comments_on_bot_posts += it->second.comments_on_bot_posts;
    }
    running.day = day;
    series.points.push_back(running);
  }
  return series;
}

ReportFormat report_format_from_string(std::string_view s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json" || s == "json-lines" || s == "jsonl" || s == "json_lines") return ReportFormat::json_lines;
  throw InvalidInput("unknown report format: " + std::string(s));
}

void export_report(const CumulativeSeries& series, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::csv) {
    out << "day,human_recs,bot_recs,emoji_reactions,comments\n";
    for (const auto& p : series.points) {
      out << p.day << ',' << p.human_recs << ',' << p.bot_recs << ',' << p.emoji_reactions << ',' << p.comments << '\n';
    }
    return;
  }
  for (const auto& p : series.points) {
    ordered_json j;
    j["channel"] = series.channel;
    j["day"] = p.day;
    j["human_recs"] = p.human_recs;
    j["bot_recs"] = p.bot_recs;
    j["emoji_reactions"] = p.emoji_reactions;
    j["comments"] = p.comments;
    j["emoji_reactions_on_bot_posts"] = p.emoji_reactions_on_bot_posts;
    j["comments_on_bot_posts"] = p.comments_on_bot_posts;
    out << j.dump() << '\n';
  }
}

void export_report(const CumulativeSeries& series, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigurationError("cannot write report to " + path.string());
  export_report(series, format, out);
}

std::string export_report(const CumulativeSeries& series, ReportFormat format) {
  std::ostringstream out;
  export_report(series, format, out);
  return out.str();
}

CumulativeSeries parse_report_json_lines(std::istream& in) {
  CumulativeSeries series;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      series.channel = j.at("channel").get<std::string>();
      SeriesPoint p;
      p.day = j.at("day").get<long>();
      p.human_recs = j.at("human_recs").get<std::size_t>();
      p.bot_recs = j.at("bot_recs").get<std::size_t>();
      p.emoji_reactions = j.at("emoji_reactions").get<std::size_t>();
      p.comments = j.at("comments").get<std::size_t>();
      p.emoji_reactions_on_bot_posts = j.value("emoji_reactions_on_bot_posts", std::size_t{0});
      p.comments_on_bot_posts = j.value("comments_on_bot_posts", std::size_t{0});
      series.points.push_back(p);
    } catch (const json::exception& e) {
      throw InvalidInput(std::string("bad report line: ") + e.what());
    }
  }
  return series;
}

// ---------------------------------------------------------------------------
// Replay.

ReplayResult replay(const Transcript& transcript, std::uint64_t seed) {
  transcript.validate();
  const std::string& channel = transcript.config.channel;

  MockMetadataClient metadata(transcript.corpus);
  CachingMetadataClient cached(metadata);
  MockRecommendationClient recommender(transcript.corpus);
  MockCompletionClient llm;
  const Timestamp first_ts =
      transcript.events.empty() ? transcript.start : std::min(transcript.start, transcript.events.front().event.ts);
  VirtualClock clock(first_ts);
  LoopbackConnector connector;
  Agent agent({cached, recommender, llm}, clock, connector, seed);
  agent.configure_channel(transcript.config, "admin");

  ReplayResult result{KnowledgeBase(channel), {}, {}, {}};
  std::map<Seq, Seq> local_to_global;
  std::size_t next = 0;
  std::size_t skipped = 0;

  auto ingest_due = [&](Timestamp until) {
    while (next < transcript.events.size() && transcript.events[next].event.ts <= until) {
      const auto& te = transcript.events[next++];
      SocialEvent e = te.event;
      auto resolve = [&](Seq local) -> std::optional<Seq> {
        if (te.target_bot_post) {
          const auto posts = agent.read(channel, [](const KnowledgeBase& kb) { return kb.bot_post_seqs(); });
          if (*te.target_bot_post > posts.size()) return std::nullopt;
          return posts[*te.target_bot_post - 1];
        }
        const auto it = local_to_global.find(local);
        if (it == local_to_global.end()) return std::nullopt;
        return it->second;
      };
      if (auto* r = std::get_if<ReactionPayload>(&e.payload)) {
        const auto g = resolve(r->target_seq);
        if (!g) {
          ++skipped;
          continue;
        }
        r->target_seq = *g;
      } else if (auto* r2 = std::get_if<ReplyPayload>(&e.payload)) {
        const auto g = resolve(r2->parent_seq);
        if (!g) {
          ++skipped;
          continue;
        }
        r2->parent_seq = *g;
      }
      e.seq = agent.read(channel, [](const KnowledgeBase& kb) { return kb.last_seq(); }) + 1;
      local_to_global[te.event.seq] = e.seq;
      agent.ingest_event(e);
    }
  };

  for (Timestamp t = transcript.start; t < transcript.end; t += transcript.tick) {
    ingest_due(t);
    clock.set(t);
    for (auto& c : agent.tick()) result.cycles.push_back(std::move(c));
  }
  ingest_due(transcript.end);
  if (skipped) spdlog::info("replay skipped {} events whose bot-post target never appeared", skipped);

  result.kb = agent.snapshot(channel);
  result.kb.set_metadata_source(nullptr);
  for (Seq s : result.kb.bot_post_seqs()) result.bot_posts.push_back(*result.kb.event(s));
  result.series = engagement_report(result.kb);
  return result;
}

// ---------------------------------------------------------------------------
// Synthetic data.

namespace {

struct Topic {
  std::vector<std::string> words;
  std::vector<std::string> verbs;
  std::string metric;
};

const std::vector<Topic>& topics() {
  static const std::vector<Topic> t{
      {{"Language Model", "Prompt", "Evaluation", "Benchmark", "Reasoning", "Alignment"},
       {"evaluates", "refines", "stress-tests"},
       "evaluation agreement"},
      {{"Collaborative", "Writing", "Interface", "Creativity", "Co-Design", "Sensemaking"},
       {"supports", "scaffolds", "augments"},
       "task completion"},
      {{"Recommendation", "Feedback", "Ranking", "Personalization", "Implicit Signals", "Exploration"},
       {"ranks", "personalizes", "adapts"},
       "click-through rate"},
      {{"Scholarly", "Citation", "Literature", "Discovery", "Reading", "Paper Alerts"},
       {"surfaces", "contextualizes", "summarizes"},
       "reading efficiency"},
      {{"Online Community", "Moderation", "Social Computing", "Discussion", "Group Awareness", "Norms"},
       {"moderates", "facilitates", "maps"},
       "participation"},
      {{"Qualitative", "Thematic Analysis", "Coding", "ChatGPT", "Annotation", "Interviews"},
       {"accelerates", "assists", "structures"},
       "coding reliability"},
  };
  return t;
}

const std::vector<std::string>& first_names() {
  static const std::vector<std::string> v{"Ada",  "Ben",   "Chen", "Dana",  "Eli",   "Fatima", "Goran", "Hana",
                                          "Ivan", "Jae",   "Kofi", "Lena",  "Mina",  "Nora",   "Omar",  "Priya",
                                          "Quinn", "Rosa", "Sami", "Tomas", "Uma",   "Vera",   "Wei",   "Yuki"};
  return v;
}

const std::vector<std::string>& last_names() {
  static const std::vector<std::string> v{"Kim",    "Park",   "Lee",    "Garcia", "Nguyen", "Smith",  "Müller",
                                          "Rossi",  "Tanaka", "Okafor", "Singh",  "Cohen",  "Novak",  "Silva",
                                          "Larsen", "Haddad", "Ivanova", "Chen",  "Brown",  "Weber"};
  return v;
}

std::string camel(std::string s) {
  std::string out;
  bool up = true;
  for (char c : s) {
    if (c == ' ' || c == '-') {
      up = true;
      continue;
    }
    out.push_back(up ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c);
    up = false;
  }
  return out;
}

}  // namespace

CorpusFixture synthetic_corpus(const SyntheticCorpusOptions& options, std::uint64_t seed) {
  if (options.papers == 0 || options.dimension == 0 || options.authors == 0)
    throw InvalidInput("synthetic_corpus: papers, dimension and authors must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto& tp = topics();

  std::vector<std::vector<double>> centroids;
  for (std::size_t k = 0; k < tp.size(); ++k) {
    std::vector<double> c(options.dimension);
    for (auto& x : c) x = unit(rng);
    centroids.push_back(unit_normalized(std::move(c)));
  }

  std::vector<Author> pool;
  std::vector<std::size_t> home_topic;
  for (std::size_t i = 0; i < options.authors; ++i) {
    Author a;
    a.author_id = "A" + std::to_string(1000 + i);
    a.name = first_names()[i % first_names().size()] + " " + last_names()[(i * 7 + i / first_names().size()) % last_names().size()];
    if (!options.affiliations.empty()) a.affiliations.push_back(options.affiliations[rng() % options.affiliations.size()]);
    pool.push_back(std::move(a));
    home_topic.push_back(i % tp.size());
  }

  std::vector<PaperRecord> papers;
  std::set<std::string> titles;
  for (std::size_t i = 0; i < options.papers; ++i) {
    const std::size_t k = rng() % tp.size();
    const auto& topic = tp[k];
    PaperRecord p;
    char id[32];
    std::snprintf(id, sizeof id, "24%02zu.%05zu", 1 + (i / 500) % 12, 10000 + i);
    p.ref = PaperRef::parse(std::string("arxiv:") + id);

    const auto& w = topic.words;
    const std::string a = w[rng() % w.size()], b = w[rng() % w.size()], c = w[rng() % w.size()];
    const std::string name = camel(a).substr(0, 6) + camel(c).substr(0, 4);
    std::string title;
    switch (rng() % 3) {
      case 0:
        title = name + ": " + a + " for " + b + " " + c;
        break;
      case 1:
        title = "Towards " + b + " " + a + " with " + name;
        break;
      default:
        title = name + ": Rethinking " + c + " in " + a;
        break;
    }
    while (titles.contains(title)) title += " II";
    titles.insert(title);
    p.title = title;

    const int participants = 8 + static_cast<int>(rng() % 40);
    const int gain = 5 + static_cast<int>(rng() % 55);
    if (rng() % 20 != 0) {
      p.abstract = "We study " + b + " and " + c + " in the context of " + a + ". We present " + name + ", a system that " +
                   topic.verbs[rng() % topic.verbs.size()] + " " + c + " for researchers. In a study with " +
                   std::to_string(participants) + " participants, " + name + " improved " + topic.metric + " by " +
                   std::to_string(gain) + "%.";
    }

    const std::size_t n_authors = 1 + rng() % 4;
    std::set<std::size_t> chosen;
    while (chosen.size() < n_authors) {
      std::size_t idx = rng() % pool.size();
      if (rng() % 3 != 0) idx = (k + tp.size() * (rng() % std::max<std::size_t>(1, pool.size() / tp.size()))) % pool.size();
      chosen.insert(idx);
    }
    for (auto idx : chosen) p.authors.push_back(pool[idx]);
    if (!options.venues.empty()) p.venue = options.venues[(k + rng() % 2) % options.venues.size()];
    p.year = 2019 + static_cast<int>(rng() % 6);

    if (p.abstract) {
      std::vector<double> v = centroids[k];
      for (auto& x : v) x += 0.35 * unit(rng);
      p.embedding = unit_normalized(std::move(v));
    }

    if (i > 0) {
      const std::size_t n_cites = rng() % 4;
      for (std::size_t c2 = 0; c2 < n_cites; ++c2) {
        const auto& target = papers[rng() % papers.size()];
        if (p.cites(target.ref)) continue;
        p.citations.push_back(target.ref);
        if (rng() % 2 == 0) {
          p.citation_contexts[target.ref] = {"Prior work on " + b + " motivates our design"};
        }
      }
    }
    papers.push_back(std::move(p));
  }
  return CorpusFixture(std::move(papers));
}

Transcript synthetic_transcript(std::shared_ptr<const CorpusFixture> corpus, const SyntheticTranscriptOptions& options,
                                std::uint64_t seed) {
  if (!corpus || corpus->papers().empty()) throw InvalidInput("synthetic_transcript needs a corpus");
  if (options.members == 0 || options.days <= 0) throw InvalidInput("synthetic_transcript: members and days must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  Transcript t;
  t.corpus = corpus;
  t.start = parse_timestamp("2024-03-01T00:00:00Z");
  t.end = t.start + days(options.days);
  t.tick = std::chrono::hours(1);
  t.config.channel = "paper-club";
  t.config.frequency = options.frequency;

  // A few members are linked to corpus authors so h1/h7/h9 have something to find.
  const auto& papers = corpus->papers();
  std::vector<Author> authors;
  for (const auto& p : papers) {
    for (const auto& a : p.authors) {
      if (std::none_of(authors.begin(), authors.end(), [&](const Author& x) { return x.author_id == a.author_id; }))
        authors.push_back(a);
    }
  }
  std::vector<std::string> member_ids;
  for (std::size_t i = 0; i < options.members; ++i) {
    Member m;
    m.member_id = "u" + std::to_string(i + 1);
    m.display_name = first_names()[(i * 5) % first_names().size()];
    if (i < 3 && i < authors.size()) {
      m.linked_author_id = authors[i].author_id;
      m.display_name = authors[i].name;
      if (!authors[i].affiliations.empty()) m.affiliation = authors[i].affiliations.front();
    }
    t.config.members.push_back(m);
    member_ids.push_back(m.member_id);
  }

  // Humans share from the first ~40% of the corpus; the rest stays available to the recommender.
  const std::size_t human_pool = std::max<std::size_t>(1, papers.size() * 2 / 5);
  const Timestamp history_start = t.start - days(7);
  const auto span = std::chrono::duration_cast<Duration>(t.end - history_start).count();
  std::vector<Timestamp> times;
  for (std::size_t i = 0; i < options.events; ++i) times.push_back(history_start + Duration(static_cast<long>(u01(rng) * span)));
  std::sort(times.begin(), times.end());
  // The first events land right at the start of history so seeds exist from day 0.
  if (!times.empty()) times.front() = history_start;

  static const std::vector<std::string> positive{"thumbsup", "+1", "heart", "tada", "fire", "star-struck", "clap"};
  static const std::vector<std::string> other{"eyes", "thinking_face", "thumbsdown", "confused", "white_check_mark"};
  static const std::vector<std::string> replies{"Interesting, thanks for sharing!", "cc @u2 this looks relevant",
                                                "I like the evaluation section.", "Not sure about the sample size.",
                                                "Adding this to my reading list.", "Great find!"};
  static const std::vector<std::string> openers{"Check out this paper", "New preprint", "Relevant to our project",
                                                "Saw this today", "Worth a read"};
  const auto period = period_of(options.frequency);

  std::vector<Seq> paper_posts;
  for (std::size_t i = 0; i < times.size(); ++i) {
    TranscriptEvent te;
    SocialEvent& e = te.event;
    e.seq = i + 1;
    e.ts = times[i];
    e.channel = t.config.channel;
    e.actor = member_ids[rng() % member_ids.size()];
    const double roll = u01(rng);
    const bool bots_exist = e.ts >= t.start;
    const std::size_t expected_posts =
        bots_exist ? static_cast<std::size_t>((e.ts - t.start) / period) + 1 : 0;
    const bool at_bot = expected_posts > 0 && u01(rng) < options.bot_feedback_share;

    if (paper_posts.empty() || roll < 0.3) {
      const auto& p = papers[rng() % human_pool];
      const std::string id = p.ref.external_id;
      const std::string link = rng() % 4 == 0 ? "https://arxiv.org/pdf/" + id + "v1" : "https://arxiv.org/abs/" + id;
      std::string text = openers[rng() % openers.size()] + ": " + link;
      if (rng() % 4 == 0) text += " cc @" + member_ids[rng() % member_ids.size()];
      e.payload = MessagePayload{text};
      paper_posts.push_back(e.seq);
    } else if (roll < 0.37) {
      e.payload = MessagePayload{"Reading group moves to Thursday this week."};
    } else if (roll < 0.75) {
      const std::string emoji =
          u01(rng) < 0.75 ? positive[rng() % positive.size()] : other[rng() % other.size()];
      if (at_bot) {
        te.target_bot_post = 1 + rng() % expected_posts;
        e.payload = ReactionPayload{0, emoji};
      } else {
        e.payload = ReactionPayload{paper_posts[rng() % paper_posts.size()], emoji};
      }
    } else {
      const std::string text = replies[rng() % replies.size()];
      if (at_bot) {
        te.target_bot_post = 1 + rng() % expected_posts;
        e.payload = ReplyPayload{0, text};
      } else {
        e.payload = ReplyPayload{paper_posts[rng() % paper_posts.size()], text};
      }
    }
    t.events.push_back(std::move(te));
  }
  return t;
}

}  // namespace socialrag
