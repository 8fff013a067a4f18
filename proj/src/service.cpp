#include "socialrag/service.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "socialrag/errors.hpp"
#include "socialrag/simulator.hpp"

namespace socialrag {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json feed_entry(const SocialEvent& event) {
  ordered_json j = event_to_json(event);
  if (const auto* bp = event.as<BotPostPayload>()) {
    const auto& m = bp->message;
    ordered_json r;
    r["text"] = m.rendered_text();
    r["display"] = display_text(m.body);
    r["bold"] = ordered_json::array();
    for (const auto& s : bold_spans(m.body)) r["bold"].push_back(s.text);
    r["mentions"] = mention_tokens(m.body);
    r["links"] = ordered_json::array();
    for (const auto& l : link_tokens(m.body)) r["links"].push_back({{"url", l.url}, {"title", l.title}});
    r["heuristics"] = ordered_json::array();
    for (const auto& s : m.provenance.all()) r["heuristics"].push_back(std::string(to_string(s.heuristic)));
    j["rendered"] = std::move(r);
  }
  return j;
}

namespace {

void reply_json(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  ordered_json j;
  j["error"] = message;
  reply_json(res, status, j);
}

// Maps the error taxonomy onto status codes.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const NotFound& e) {
      reply_error(res, 404, e.what());
    } catch (const IntegrityError& e) {
      reply_error(res, 409, e.what());
    } catch (const InvalidInput& e) {
      reply_error(res, 400, e.what());
    } catch (const ValidationError& e) {
      reply_error(res, 400, e.what());
    } catch (const ConfigurationError& e) {
      reply_error(res, 400, e.what());
    } catch (const RetryableError& e) {
      reply_error(res, 503, e.what());
    } catch (const json::exception& e) {
      reply_error(res, 400, std::string("bad request body: ") + e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, e.what());
    }
  };
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto j = json::parse(req.body);
  if (!j.is_object()) throw InvalidInput("request body must be a JSON object");
  return j;
}

std::string required_string(const json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_string() || body[key].get<std::string>().empty())
    throw InvalidInput(std::string("missing or empty \"") + key + "\"");
  return body[key].get<std::string>();
}

Seq parse_seq(const std::string& s) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw InvalidInput("bad seq: " + s);
    return v;
  } catch (const std::logic_error&) {
    throw InvalidInput("bad seq: " + s);
  }
}

}  // namespace

Service::Service(Agent& agent) : agent_(agent), server_(std::make_unique<httplib::Server>()) { install_routes(); }

Service::~Service() { stop(); }

void Service::install_routes() {
  auto& srv = *server_;

  srv.Get("/channels", guarded([this](const httplib::Request&, httplib::Response& res) {
    ordered_json j = ordered_json::array();
    for (const auto& c : agent_.channels()) j.push_back(c);
    reply_json(res, 200, j);
  }));

  srv.Get(R"(/channels/([^/]+)/feed)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string channel = req.matches[1];
    const Seq since = req.has_param("since") ? parse_seq(req.get_param_value("since")) : 0;
    ordered_json j;
    j["channel"] = channel;
    j["events"] = ordered_json::array();
    agent_.read(channel, [&](const KnowledgeBase& kb) {
      for (const auto& e : kb.log()) {
        if (e.seq > since) j["events"].push_back(feed_entry(e));
      }
      j["last_seq"] = kb.last_seq();
      return 0;
    });
    reply_json(res, 200, j);
  }));

  srv.Post(R"(/channels/([^/]+)/messages)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string channel = req.matches[1];
    const json body = body_of(req);
    const auto e = agent_.append(channel, required_string(body, "actor"), MessagePayload{required_string(body, "text")});
    reply_json(res, 201, feed_entry(e));
  }));

  auto feedback = [this](const httplib::Request& req, httplib::Response& res, bool reaction) {
    const std::string channel = req.matches[1];
    const Seq target = parse_seq(req.matches[2]);
    const json body = body_of(req);
    const std::string actor = required_string(body, "actor");
    const bool exists = agent_.read(channel, [&](const KnowledgeBase& kb) { return kb.event(target) != nullptr; });
    if (!exists) throw NotFound("no message " + std::to_string(target) + " in " + channel);
    EventPayload payload = reaction ? EventPayload{ReactionPayload{target, required_string(body, "emoji_name")}}
                                    : EventPayload{ReplyPayload{target, required_string(body, "text")}};
    const auto e = agent_.append(channel, actor, std::move(payload));
    reply_json(res, 201, feed_entry(e));
  };
  srv.Post(R"(/channels/([^/]+)/messages/(\d+)/reactions)",
           guarded([feedback](const httplib::Request& req, httplib::Response& res) { feedback(req, res, true); }));
  srv.Post(R"(/channels/([^/]+)/messages/(\d+)/replies)",
           guarded([feedback](const httplib::Request& req, httplib::Response& res) { feedback(req, res, false); }));

  srv.Get(R"(/channels/([^/]+)/config)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string channel = req.matches[1];
    ordered_json j = agent_.read(channel, [](const KnowledgeBase& kb) { return config_to_json(kb.config()); });
    j["next_post_time"] = format_timestamp(agent_.next_post_time(channel));
    reply_json(res, 200, j);
  }));

  srv.Put(R"(/channels/([^/]+)/config)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string channel = req.matches[1];
    const json body = body_of(req);
    // Partial updates merge onto the current config (or the defaults for a new channel).
    json merged = agent_.has_channel(channel)
                      ? json(agent_.read(channel, [](const KnowledgeBase& kb) { return config_to_json(kb.config()); }))
                      : json(config_to_json(ChannelConfig{}));
    merged.merge_patch(body);
    merged.erase("next_post_time");
    merged["channel"] = channel;
    const std::string actor = body.contains("actor") && body["actor"].is_string() ? body["actor"].get<std::string>() : "admin";
    merged.erase("actor");
    const ChannelConfig config = config_from_json(merged);
    agent_.configure_channel(config, actor);
    ordered_json j = config_to_json(config);
    j["next_post_time"] = format_timestamp(agent_.next_post_time(channel));
    reply_json(res, 200, j);
  }));

  srv.Post(R"(/channels/([^/]+)/cycle)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string channel = req.matches[1];
    try {
      reply_json(res, 200, cycle_result_to_json(agent_.run_cycle(channel)));
    } catch (const ConnectorError& e) {
      reply_error(res, 502, e.what());
    }
  }));

  srv.Get(R"(/channels/([^/]+)/report)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string channel = req.matches[1];
    const auto format = report_format_from_string(req.has_param("format") ? req.get_param_value("format") : "json");
    const auto series = agent_.read(channel, [](const KnowledgeBase& kb) { return engagement_report(kb); });
    res.status = 200;
    res.set_content(export_report(series, format), format == ReportFormat::csv ? "text/csv" : "application/x-ndjson");
  }));
}

int Service::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw ConfigurationError("cannot bind " + host + ":" + std::to_string(port));
  running_ = true;
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  spdlog::info("service listening on {}:{}", host, bound);
  return bound;
}

void Service::listen(const std::string& host, int port) {
  running_ = true;
  spdlog::info("service listening on {}:{}", host, port);
  if (!server_->listen(host, port)) throw ConfigurationError("cannot listen on " + host + ":" + std::to_string(port));
}

void Service::stop() {
  running_ = false;
  if (server_) server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
  if (scheduler_thread_.joinable()) scheduler_thread_.join();
}

void Service::persist_to(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> logs;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.size() > 13 && name.ends_with(".events.jsonl")) logs.push_back(entry.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& path : logs) {
    std::size_t n = 0;
    for (const auto& e : read_event_log(path)) {
      agent_.ingest_event(e);
      ++n;
    }
    spdlog::info("restored {} events from {}", n, path.string());
  }
  agent_.on_event([this, dir](const SocialEvent& e) {
    std::lock_guard lock(writers_mutex_);
    auto& w = writers_[e.channel];
    if (!w) w = std::make_unique<EventLogWriter>(dir / (e.channel + ".events.jsonl"));
    w->append(e);
  });
}

void Service::start_scheduler(std::chrono::milliseconds interval) {
  running_ = true;
  scheduler_thread_ = std::thread([this, interval] {
    while (running_) {
      try {
        agent_.tick();
      } catch (const std::exception& e) {
        spdlog::error("scheduler tick failed: {}", e.what());
      }
      const auto until = std::chrono::steady_clock::now() + interval;
      while (running_ && std::chrono::steady_clock::now() < until)
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  });
}

}  // namespace socialrag
