#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialrag/bot_message.hpp"
#include "socialrag/channel_config.hpp"
#include "socialrag/signal.hpp"
#include "socialrag/time.hpp"

namespace socialrag {

enum class EventKind { message, reaction, reply, bot_post, config };

std::string_view to_string(EventKind k);
EventKind event_kind_from_string(std::string_view s);

struct MessagePayload {
  std::string text;
  bool operator==(const MessagePayload&) const = default;
};

struct ReactionPayload {
  Seq target_seq = 0;
  std::string emoji_name;
  bool operator==(const ReactionPayload&) const = default;
};

struct ReplyPayload {
  Seq parent_seq = 0;
  std::string text;
  bool operator==(const ReplyPayload&) const = default;
};

struct BotPostPayload {
  BotMessage message;
  bool operator==(const BotPostPayload&) const = default;
};

struct ConfigPayload {
  ChannelConfig config;
  bool operator==(const ConfigPayload&) const = default;
};

using EventPayload = std::variant<MessagePayload, ReactionPayload, ReplyPayload, BotPostPayload, ConfigPayload>;

/// One immutable group-interaction record.
struct SocialEvent {
  Seq seq = 0;
  Timestamp ts{};
  std::string channel;
  std::string actor;
  EventPayload payload;

  bool operator==(const SocialEvent&) const = default;

  EventKind kind() const { return static_cast<EventKind>(payload.index()); }

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&payload);
  }
};

/// Keys in fixed order: seq, ts, channel, kind, actor, payload.
nlohmann::ordered_json event_to_json(const SocialEvent& e);
SocialEvent event_from_json(const nlohmann::json& j);

/// One log line (no trailing newline). Serializing a parsed line reproduces it exactly.
std::string to_log_line(const SocialEvent& e);
SocialEvent from_log_line(std::string_view line);

std::vector<SocialEvent> read_event_log(std::istream& in);
std::vector<SocialEvent> read_event_log(const std::filesystem::path& path);

/// Append-only event log file, flushed per record.
class EventLogWriter {
 public:
  explicit EventLogWriter(const std::filesystem::path& path);
  void append(const SocialEvent& e);

 private:
  std::ofstream out_;
};

}  // namespace socialrag
