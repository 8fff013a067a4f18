#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "socialrag/agent.hpp"
#include "socialrag/errors.hpp"
#include "socialrag/service.hpp"
#include "socialrag/simulator.hpp"

using namespace socialrag;
using nlohmann::json;

namespace {

std::vector<ChannelConfig> channel_configs(const json& j) {
  std::vector<ChannelConfig> out;
  if (j.contains("channels")) {
    for (const auto& c : j.at("channels")) out.push_back(config_from_json(c));
  } else {
    json c = j;
    c.erase("corpus");
    out.push_back(config_from_json(c));
  }
  return out;
}

int serve(const std::string& config_path, int port, const std::string& host, const std::string& data_dir,
          std::string corpus_path, bool live, long tick_ms, std::uint64_t seed) {
  std::ifstream in(config_path);
  if (!in) throw NotFound("cannot open config " + config_path);
  const json j = json::parse(in);
  if (corpus_path.empty() && j.contains("corpus") && j["corpus"].is_string()) {
    std::filesystem::path p = j["corpus"].get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(config_path).parent_path() / p;
    corpus_path = p.string();
  }

  std::unique_ptr<MetadataClient> meta_upstream;
  std::unique_ptr<RecommendationClient> recommender;
  std::unique_ptr<CompletionClient> llm;
  if (live) {
    auto paper = std::make_unique<HttpPaperClient>(paper_api_endpoint_from_env());
    recommender = std::make_unique<HttpPaperClient>(paper_api_endpoint_from_env());
    meta_upstream = std::move(paper);
    llm = std::make_unique<HttpCompletionClient>(llm_endpoint_from_env());
  } else {
    if (corpus_path.empty()) throw ConfigurationError("mock mode needs --corpus (or \"corpus\" in the config file)");
    auto corpus = std::make_shared<CorpusFixture>(CorpusFixture::load(corpus_path));
    meta_upstream = std::make_unique<MockMetadataClient>(corpus);
    recommender = std::make_unique<MockRecommendationClient>(corpus);
    llm = std::make_unique<MockCompletionClient>();
  }
  std::filesystem::create_directories(data_dir);
  CachingMetadataClient metadata(*meta_upstream, std::filesystem::path(data_dir) / "metadata_cache.jsonl");

  SystemClock clock;
  LoopbackConnector connector("http://" + host + ":" + std::to_string(port));
  Agent agent({metadata, *recommender, *llm}, clock, connector, seed);
  Service service(agent);
  service.persist_to(data_dir);
  for (const auto& c : channel_configs(j)) {
    const bool same = agent.has_channel(c.channel) &&
                      agent.read(c.channel, [&](const KnowledgeBase& kb) { return kb.config() == c; });
    if (!same) agent.configure_channel(c);
  }
  if (tick_ms > 0) service.start_scheduler(std::chrono::milliseconds(tick_ms));
  service.listen(host, port);
  return 0;
}

int replay_cmd(const std::string& transcript_path, std::uint64_t seed, const std::string& report_path,
               const std::string& format_name, const std::string& events_out) {
  const Transcript t = load_transcript(transcript_path);
  const ReplayResult r = replay(t, seed);
  if (!report_path.empty()) {
    std::string name = format_name;
    if (name.empty()) name = report_path.ends_with(".csv") ? "csv" : "json";
    export_report(r.series, report_format_from_string(name), std::filesystem::path(report_path));
  }
  if (!events_out.empty()) {
    std::ofstream out(events_out, std::ios::trunc);
    for (const auto& e : r.kb.log()) out << to_log_line(e) << '\n';
  }
  nlohmann::ordered_json summary;
  summary["channel"] = t.config.channel;
  summary["events"] = r.kb.log().size();
  summary["bot_posts"] = r.bot_posts.size();
  std::map<std::string, std::size_t> statuses;
  for (const auto& c : r.cycles) ++statuses[std::string(to_string(c.status))];
  summary["cycles"] = statuses;
  const auto f = r.series.final();
  summary["final"] = {{"human_recs", f.human_recs},
                      {"bot_recs", f.bot_recs},
                      {"emoji_reactions", f.emoji_reactions},
                      {"comments", f.comments}};
  std::cout << summary.dump(2) << std::endl;
  return 0;
}

int report_cmd(const std::string& channel, const std::string& format, const std::string& data_dir) {
  const auto path = std::filesystem::path(data_dir) / (channel + ".events.jsonl");
  const auto log = read_event_log(path);
  const auto kb = KnowledgeBase::rebuild(channel, log);
  export_report(engagement_report(kb), report_format_from_string(format), std::cout);
  return 0;
}

int synth_cmd(std::size_t events, long days_n, std::size_t papers, const std::string& frequency, std::uint64_t seed,
              const std::string& out_path) {
  SyntheticCorpusOptions co;
  co.papers = papers;
  auto corpus = std::make_shared<CorpusFixture>(synthetic_corpus(co, seed));
  SyntheticTranscriptOptions to;
  to.events = events;
  to.days = days_n;
  to.frequency = frequency_from_string(frequency);
  const auto t = synthetic_transcript(corpus, to, seed);
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw ConfigurationError("cannot write " + out_path);
  out << transcript_to_json(t).dump(1) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"socialrag: social-signal paper recommendations for group chats"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service with the scheduler");
  std::string config_path, host = "127.0.0.1", data_dir = "socialrag-data", corpus_path;
  int port = 8080;
  long tick_ms = 60000;
  bool live = false;
  std::uint64_t seed = 0;
  serve_cmd->add_option("--config", config_path, "Channel config JSON")->required();
  serve_cmd->add_option("--port", port, "Port to listen on")->required();
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--data-dir", data_dir, "Event logs and metadata cache");
  serve_cmd->add_option("--corpus", corpus_path, "Corpus fixture for the mock clients");
  serve_cmd->add_option("--tick-ms", tick_ms, "Scheduler period in ms (0 disables)");
  serve_cmd->add_option("--seed", seed, "Generation seed");
  serve_cmd->add_flag("--live", live, "Use the HTTP paper and completion clients (env configured)");

  auto* replay = app.add_subcommand("replay", "Replay a transcript in virtual time");
  std::string transcript, report_out, format_name, events_out;
  std::uint64_t replay_seed = 0;
  replay->add_option("--transcript", transcript, "Transcript JSON")->required();
  replay->add_option("--seed", replay_seed, "Seed")->required();
  replay->add_option("--report", report_out, "Write the engagement report here");
  replay->add_option("--format", format_name, "csv|json (default from the report extension)");
  replay->add_option("--events-out", events_out, "Write the final event log (JSON lines)");

  auto* report = app.add_subcommand("report", "Engagement report from a persisted channel log");
  std::string channel, format = "csv";
  report->add_option("--channel", channel, "Channel id")->required();
  report->add_option("--format", format, "csv|json")->required()->check(CLI::IsMember({"csv", "json"}));
  report->add_option("--data-dir", data_dir, "Directory holding <channel>.events.jsonl");

  auto* synth = app.add_subcommand("synth", "Write a synthetic transcript with an inline corpus");
  std::size_t synth_events = 500, synth_papers = 120;
  long synth_days = 30;
  std::string synth_freq = "every_other_day", synth_out;
  std::uint64_t synth_seed = 1;
  synth->add_option("--events", synth_events);
  synth->add_option("--days", synth_days);
  synth->add_option("--papers", synth_papers);
  synth->add_option("--frequency", synth_freq);
  synth->add_option("--seed", synth_seed);
  synth->add_option("--out", synth_out)->required();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*serve_cmd) return serve(config_path, port, host, data_dir, corpus_path, live, tick_ms, seed);
    if (*replay) return replay_cmd(transcript, replay_seed, report_out, format_name, events_out);
    if (*report) return report_cmd(channel, format, data_dir);
    if (*synth) return synth_cmd(synth_events, synth_days, synth_papers, synth_freq, synth_seed, synth_out);
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
