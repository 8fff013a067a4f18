#include "socialrag/agent.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "socialrag/errors.hpp"
#include "socialrag/retrieval.hpp"

namespace socialrag {

Timestamp SystemClock::now() const {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::string LoopbackConnector::post_message(const std::string& channel, const BotMessage& message) {
  std::lock_guard lock(mutex_);
  ++posted_;
  spdlog::debug("loopback post to {}: {}", channel, message.paper.str());
  return "loopback-" + std::to_string(posted_);
}

std::string LoopbackConnector::permalink(const std::string& channel, Seq seq) const {
  std::string base = base_url_;
  while (!base.empty() && base.back() == '/') base.pop_back();
  return base + "/channels/" + channel + "/messages/" + std::to_string(seq);
}

void LoopbackConnector::subscribe(const std::string& channel, std::function<void(const SocialEvent&)> sink) {
  std::lock_guard lock(mutex_);
  sinks_.emplace(channel, std::move(sink));
}

void LoopbackConnector::deliver(const SocialEvent& event) {
  std::vector<std::function<void(const SocialEvent&)>> targets;
  {
    std::lock_guard lock(mutex_);
    auto [b, e] = sinks_.equal_range(event.channel);
    for (auto it = b; it != e; ++it) targets.push_back(it->second);
  }
  for (const auto& t : targets) t(event);
}

std::string_view to_string(CycleStatus s) {
  switch (s) {
    case CycleStatus::posted:
      return "posted";
    case CycleStatus::skipped_no_candidates:
      return "skipped_no_candidates";
    case CycleStatus::skipped_generation_failed:
      return "skipped_generation_failed";
  }
  return "?";
}

nlohmann::ordered_json cycle_result_to_json(const CycleResult& r) {
  nlohmann::ordered_json j;
  j["status"] = std::string(to_string(r.status));
  j["posted_seq"] = r.posted_seq ? nlohmann::ordered_json(*r.posted_seq) : nlohmann::ordered_json(nullptr);
  j["candidate"] = r.candidate ? nlohmann::ordered_json(r.candidate->str()) : nlohmann::ordered_json(nullptr);
  j["selected"] = selected_to_json(r.selected);
  j["seeds"] = nlohmann::ordered_json::array();
  for (const auto& s : r.seeds) j["seeds"].push_back(s.str());
  return j;
}

Timestamp next_post_time(const ChannelConfig& config, std::optional<Timestamp> last_post_ts, Timestamp now) {
  if (!last_post_ts) return now;
  return *last_post_ts + period_of(config.frequency);
}

std::set<std::string> recently_mentioned(const KnowledgeBase& kb, std::size_t cooldown) {
  std::set<std::string> out;
  const auto posts = kb.bot_post_seqs();
  const std::size_t from = posts.size() > cooldown ? posts.size() - cooldown : 0;
  for (std::size_t i = from; i < posts.size(); ++i) {
    const auto* e = kb.event(posts[i]);
    for (auto& id : mention_tokens(e->as<BotPostPayload>()->message.body)) out.insert(std::move(id));
  }
  return out;
}

Agent::Agent(AgentClients clients, const Clock& clock, Connector& connector, std::uint64_t seed)
    : clients_(clients), clock_(clock), connector_(connector), seed_(seed) {}

Agent::ChannelState& Agent::channel_state(const std::string& channel) const {
  std::shared_lock lock(channels_mutex_);
  const auto it = channels_.find(channel);
  if (it == channels_.end()) throw NotFound("unknown channel: " + channel);
  return *it->second;
}

bool Agent::has_channel(const std::string& channel) const {
  std::shared_lock lock(channels_mutex_);
  return channels_.contains(channel);
}

std::vector<std::string> Agent::channels() const {
  std::shared_lock lock(channels_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : channels_) out.push_back(id);
  return out;
}

void Agent::on_event(std::function<void(const SocialEvent&)> observer) {
  std::lock_guard lock(observers_mutex_);
  observers_.push_back(std::move(observer));
}

// Caller holds the channel's unique lock, so observers see events in log order.
IndexUpdate Agent::commit(ChannelState& state, const SocialEvent& event) {
  IndexUpdate update = state.kb.ingest_event(event);
  std::vector<std::function<void(const SocialEvent&)>> observers;
  {
    std::lock_guard lock(observers_mutex_);
    observers = observers_;
  }
  for (const auto& o : observers) o(event);
  return update;
}

SocialEvent Agent::configure_channel(const ChannelConfig& config, const std::string& actor) {
  config.validate();
  {
    std::unique_lock lock(channels_mutex_);
    if (!channels_.contains(config.channel))
      channels_.emplace(config.channel, std::make_unique<ChannelState>(config.channel, &clients_.metadata));
  }
  return append(config.channel, actor, ConfigPayload{config});
}

SocialEvent Agent::append(const std::string& channel, const std::string& actor, EventPayload payload) {
  auto& state = channel_state(channel);
  std::unique_lock lock(state.mutex);
  SocialEvent e;
  e.seq = state.kb.last_seq() + 1;
  e.ts = clock_.now();
  if (const auto last = state.kb.last_ts(); last && *last > e.ts) e.ts = *last;
  e.channel = channel;
  e.actor = actor;
  e.payload = std::move(payload);
  commit(state, e);
  return e;
}

IndexUpdate Agent::ingest_event(const SocialEvent& event) {
  {
    std::unique_lock lock(channels_mutex_);
    if (!channels_.contains(event.channel))
      channels_.emplace(event.channel, std::make_unique<ChannelState>(event.channel, &clients_.metadata));
  }
  auto& state = channel_state(event.channel);
  std::unique_lock lock(state.mutex);
  return commit(state, event);
}

IndexUpdate Agent::apply_feedback(const SocialEvent& event) {
  auto& state = channel_state(event.channel);
  Seq target = 0;
  if (const auto* r = event.as<ReactionPayload>()) {
    target = r->target_seq;
  } else if (const auto* r2 = event.as<ReplyPayload>()) {
    target = r2->parent_seq;
  } else {
    throw InvalidInput("feedback must be a reaction or a reply");
  }
  std::unique_lock lock(state.mutex);
  const auto* t = state.kb.event(target);
  if (!t || t->kind() != EventKind::bot_post) throw IntegrityError("feedback target " + std::to_string(target) + " is not a bot post");
  SocialEvent e = event;
  if (e.seq == 0) {
    e.seq = state.kb.last_seq() + 1;
    e.ts = std::max(clock_.now(), state.kb.last_ts().value_or(Timestamp{}));
  }
  return commit(state, e);
}

bool Agent::mention_allowed(const std::string& member, const std::string& channel) const {
  return read(channel, [&](const KnowledgeBase& kb) {
    return !recently_mentioned(kb, kb.config().mention_cooldown).contains(member);
  });
}

std::set<std::string> Agent::cooling_members(const KnowledgeBase& kb) const {
  return recently_mentioned(kb, kb.config().mention_cooldown);
}

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdull;
  x ^= x >> 33;
  return x;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

CycleResult Agent::run_cycle(const std::string& channel) {
  auto& state = channel_state(channel);
  std::lock_guard cycle_lock(state.cycle_mutex);
  const KnowledgeBase kb = [&] {
    std::shared_lock lock(state.mutex);
    return state.kb;
  }();
  const ChannelConfig& config = kb.config();
  const Timestamp now = clock_.now();

  CycleResult result;
  result.seeds = kb.candidate_seeds(config.seed_window, now);
  if (result.seeds.empty()) {
    spdlog::info("{}: no seeds, cycle skipped", channel);
    return result;
  }

  const auto recommendations = clients_.recommender.fetch_recommendations(result.seeds, config.recommendation_pool);
  const auto pick = std::find_if(recommendations.begin(), recommendations.end(),
                                 [&](const PaperRecord& r) { return !kb.has_paper(canonicalize(r.ref)); });
  if (pick == recommendations.end()) {
    spdlog::info("{}: all {} recommendations already in the channel", channel, recommendations.size());
    return result;
  }

  PaperRecord paper = *pick;
  paper.ref = canonicalize(paper.ref);
  try {
    paper = clients_.metadata.fetch_paper_metadata(paper.ref);
  } catch (const NotFound&) {
  } catch (const RetryableError& e) {
    spdlog::warn("{}: metadata for {} unavailable, using recommender record: {}", channel, paper.ref.str(), e.what());
  }
  result.candidate = paper.ref;

  const auto ctx = RetrievalContext::from_config(kb, now, &clients_.metadata);
  result.selected = rank_and_select(detect_all_signals(paper, ctx));

  const ChannelView view{kb, cooling_members(kb), [&](Seq s) { return connector_.permalink(channel, s); }};
  GenerationSettings settings;
  settings.limits = config.char_limits;
  settings.max_retries = config.max_retries;
  settings.seed = mix(mix(seed_, fnv1a(channel)), kb.bot_post_seqs().size());
  settings.metadata = &clients_.metadata;

  BotMessage message;
  try {
    message = generate_message(paper, result.selected, view, clients_.llm, settings);
  } catch (const GenerationFailed& e) {
    spdlog::warn("{}: generation failed for {}: {}", channel, paper.ref.str(), e.what());
    result.status = CycleStatus::skipped_generation_failed;
    return result;
  }

  connector_.post_message(channel, message);
  const SocialEvent posted = append(channel, config.agent_id, BotPostPayload{std::move(message)});
  result.status = CycleStatus::posted;
  result.posted_seq = posted.seq;
  spdlog::info("{}: posted {} at seq {}", channel, paper.ref.str(), posted.seq);
  return result;
}

Timestamp Agent::next_post_time(const std::string& channel) const {
  return read(channel, [&](const KnowledgeBase& kb) {
    return socialrag::next_post_time(kb.config(), kb.last_bot_post_ts(), clock_.now());
  });
}

std::vector<CycleResult> Agent::tick() {
  std::vector<CycleResult> results;
  const Timestamp now = clock_.now();
  for (const auto& channel : channels()) {
    if (next_post_time(channel) > now) continue;
    try {
      results.push_back(run_cycle(channel));
    } catch (const RetryableError& e) {
      spdlog::warn("{}: cycle aborted, will retry: {}", channel, e.what());
    }
  }
  return results;
}

KnowledgeBase Agent::snapshot(const std::string& channel) const {
  return read(channel, [](const KnowledgeBase& kb) { return kb; });
}

}  // namespace socialrag
