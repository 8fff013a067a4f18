#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "socialrag/clients.hpp"
#include "socialrag/knowledge_base.hpp"
#include "socialrag/message.hpp"

namespace socialrag {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

class SystemClock : public Clock {
 public:
  Timestamp now() const override;
};

class VirtualClock : public Clock {
 public:
  explicit VirtualClock(Timestamp start = Timestamp{}) : now_(start) {}
  Timestamp now() const override { return now_; }
  void set(Timestamp t) { now_ = t; }
  void advance(Duration d) { now_ += d; }

 private:
  Timestamp now_;
};

/// Chat-platform adapter.
class Connector {
 public:
  virtual ~Connector() = default;
  /// Returns the platform message id. Throws ConnectorError on failure.
  virtual std::string post_message(const std::string& channel, const BotMessage& message) = 0;
  virtual std::string permalink(const std::string& channel, Seq seq) const = 0;
  /// Registers a sink for events arriving from the platform.
  virtual void subscribe(const std::string& channel, std::function<void(const SocialEvent&)> sink) = 0;
};

/// Binds the engine to the built-in service: posting always succeeds, permalinks point
/// at the service's message routes, and subscribers see every event the agent appends.
class LoopbackConnector : public Connector {
 public:
  explicit LoopbackConnector(std::string base_url = "http://loopback") : base_url_(std::move(base_url)) {}

  std::string post_message(const std::string& channel, const BotMessage& message) override;
  std::string permalink(const std::string& channel, Seq seq) const override;
  void subscribe(const std::string& channel, std::function<void(const SocialEvent&)> sink) override;

  void deliver(const SocialEvent& event);
  std::size_t posted() const { return posted_; }

 private:
  std::string base_url_;
  std::size_t posted_ = 0;
  std::mutex mutex_;
  std::multimap<std::string, std::function<void(const SocialEvent&)>> sinks_;
};

enum class CycleStatus { posted, skipped_no_candidates, skipped_generation_failed };
std::string_view to_string(CycleStatus s);

struct CycleResult {
  CycleStatus status = CycleStatus::skipped_no_candidates;
  std::optional<Seq> posted_seq;
  std::optional<PaperRef> candidate;
  SelectedSignals selected;
  std::vector<PaperRef> seeds;
};

nlohmann::ordered_json cycle_result_to_json(const CycleResult& r);

/// last_post + {1, 2, 7} days under the current frequency; `now` when nothing was posted yet.
Timestamp next_post_time(const ChannelConfig& config, std::optional<Timestamp> last_post_ts, Timestamp now);

struct AgentClients {
  MetadataClient& metadata;
  RecommendationClient& recommender;
  CompletionClient& llm;
};

/// Runs recommendation cycles and owns every channel's event log. One writer per
/// channel at a time; different channels proceed independently.
class Agent {
 public:
  Agent(AgentClients clients, const Clock& clock, Connector& connector, std::uint64_t seed = 0);

  /// Creates the channel (appending its config event) or replaces its config.
  SocialEvent configure_channel(const ChannelConfig& config, const std::string& actor = "admin");
  bool has_channel(const std::string& channel) const;
  std::vector<std::string> channels() const;

  /// Appends a new event stamped with the clock and the next seq.
  SocialEvent append(const std::string& channel, const std::string& actor, EventPayload payload);
  /// Replays an already-sequenced event (restoring persisted logs).
  IndexUpdate ingest_event(const SocialEvent& event);

  /// Reaction or reply on an existing bot post. Throws IntegrityError otherwise.
  IndexUpdate apply_feedback(const SocialEvent& event);

  /// False iff the member was mention-tokenized in any of the last mention_cooldown bot posts.
  bool mention_allowed(const std::string& member, const std::string& channel) const;

  /// One full pass: seeds, recommender, dedup, signals, generation, post. Appends exactly
  /// one bot_post or nothing. Propagates ConnectorError (nothing appended).
  CycleResult run_cycle(const std::string& channel);

  /// Runs a cycle on every channel whose next post time has arrived. Connector failures
  /// are logged and retried on a later tick.
  std::vector<CycleResult> tick();

  Timestamp next_post_time(const std::string& channel) const;

  /// Copy of the channel's knowledge base.
  KnowledgeBase snapshot(const std::string& channel) const;

  template <typename Fn>
  auto read(const std::string& channel, Fn&& fn) const {
    auto& state = channel_state(channel);
    std::shared_lock lock(state.mutex);
    return fn(state.kb);
  }

  /// Called after every appended or ingested event (persistence, subscribers).
  void on_event(std::function<void(const SocialEvent&)> observer);

  const Clock& clock() const { return clock_; }
  Connector& connector() { return connector_; }

 private:
  struct ChannelState {
    explicit ChannelState(const std::string& channel, MetadataClient* metadata) : kb(channel, metadata) {}
    KnowledgeBase kb;
    mutable std::shared_mutex mutex;
    std::mutex cycle_mutex;
  };

  ChannelState& channel_state(const std::string& channel) const;
  IndexUpdate commit(ChannelState& state, const SocialEvent& event);
  std::set<std::string> cooling_members(const KnowledgeBase& kb) const;

  AgentClients clients_;
  const Clock& clock_;
  Connector& connector_;
  std::uint64_t seed_;
  mutable std::shared_mutex channels_mutex_;
  std::map<std::string, std::unique_ptr<ChannelState>> channels_;
  std::mutex observers_mutex_;
  std::vector<std::function<void(const SocialEvent&)>> observers_;
};

/// Members mention-tokenized in the last `cooldown` bot posts of the log.
std::set<std::string> recently_mentioned(const KnowledgeBase& kb, std::size_t cooldown);

}  // namespace socialrag
