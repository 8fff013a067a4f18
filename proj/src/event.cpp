#include "socialrag/event.hpp"

#include <istream>

#include "socialrag/errors.hpp"

namespace socialrag {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::message:
      return "message";
    case EventKind::reaction:
      return "reaction";
    case EventKind::reply:
      return "reply";
    case EventKind::bot_post:
      return "bot_post";
    case EventKind::config:
      return "config";
  }
  return "?";
}

EventKind event_kind_from_string(std::string_view s) {
  for (auto k : {EventKind::message, EventKind::reaction, EventKind::reply, EventKind::bot_post, EventKind::config}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidInput("unknown event kind: " + std::string(s));
}

ordered_json event_to_json(const SocialEvent& e) {
  ordered_json j;
  j["seq"] = e.seq;
  j["ts"] = format_timestamp(e.ts);
  j["channel"] = e.channel;
  j["kind"] = to_string(e.kind());
  j["actor"] = e.actor;
  ordered_json p;
  switch (e.kind()) {
    case EventKind::message:
      p["text"] = std::get<MessagePayload>(e.payload).text;
      break;
    case EventKind::reaction: {
      const auto& r = std::get<ReactionPayload>(e.payload);
      p["target_seq"] = r.target_seq;
      p["emoji_name"] = r.emoji_name;
      break;
    }
    case EventKind::reply: {
      const auto& r = std::get<ReplyPayload>(e.payload);
      p["parent_seq"] = r.parent_seq;
      p["text"] = r.text;
      break;
    }
    case EventKind::bot_post:
      p = bot_message_to_json(std::get<BotPostPayload>(e.payload).message);
      break;
    case EventKind::config:
      p = config_to_json(std::get<ConfigPayload>(e.payload).config);
      break;
  }
  j["payload"] = p;
  return j;
}

SocialEvent event_from_json(const json& j) {
  SocialEvent e;
  try {
    e.seq = j.at("seq").get<Seq>();
    e.ts = parse_timestamp(j.at("ts").get<std::string>());
    e.channel = j.at("channel").get<std::string>();
    e.actor = j.at("actor").get<std::string>();
    const json& p = j.at("payload");
    switch (event_kind_from_string(j.at("kind").get<std::string>())) {
      case EventKind::message:
        e.payload = MessagePayload{p.at("text").get<std::string>()};
        break;
      case EventKind::reaction:
        e.payload = ReactionPayload{p.at("target_seq").get<Seq>(), p.at("emoji_name").get<std::string>()};
        break;
      case EventKind::reply:
        e.payload = ReplyPayload{p.at("parent_seq").get<Seq>(), p.at("text").get<std::string>()};
        break;
      case EventKind::bot_post:
        e.payload = BotPostPayload{bot_message_from_json(p)};
        break;
      case EventKind::config:
        e.payload = ConfigPayload{config_from_json(p)};
        break;
    }
  } catch (const json::exception& ex) {
    throw InvalidInput(std::string("bad event record: ") + ex.what());
  }
  return e;
}

std::string to_log_line(const SocialEvent& e) { return event_to_json(e).dump(); }

SocialEvent from_log_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& ex) {
    throw InvalidInput(std::string("bad event log line: ") + ex.what());
  }
  return event_from_json(j);
}

std::vector<SocialEvent> read_event_log(std::istream& in) {
  std::vector<SocialEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    events.push_back(from_log_line(line));
  }
  return events;
}

std::vector<SocialEvent> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open event log " + path.string());
  return read_event_log(in);
}

EventLogWriter::EventLogWriter(const std::filesystem::path& path) : out_(path, std::ios::app) {
  if (!out_) throw ConfigurationError("cannot open event log for append: " + path.string());
}

void EventLogWriter::append(const SocialEvent& e) {
  out_ << to_log_line(e) << '\n';
  out_.flush();
}

}  // namespace socialrag
