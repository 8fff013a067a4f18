#include "socialrag/channel_config.hpp"

#include "socialrag/errors.hpp"

namespace socialrag {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Frequency f) {
  switch (f) {
    case Frequency::daily:
      return "daily";
    case Frequency::every_other_day:
      return "every_other_day";
    case Frequency::weekly:
      return "weekly";
  }
  return "?";
}

Frequency frequency_from_string(std::string_view s) {
  if (s == "daily") return Frequency::daily;
  if (s == "every_other_day") return Frequency::every_other_day;
  if (s == "weekly") return Frequency::weekly;
  throw InvalidInput("frequency must be daily, every_other_day or weekly, got '" + std::string(s) + "'");
}

Duration period_of(Frequency f) {
  switch (f) {
    case Frequency::daily:
      return days(1);
    case Frequency::every_other_day:
      return days(2);
    case Frequency::weekly:
      return days(7);
  }
  return days(1);
}

void ChannelConfig::validate() const {
  if (channel.empty()) throw InvalidInput("channel id is empty");
  if (seed_window <= Duration::zero() || heuristic_window <= Duration::zero())
    throw InvalidInput("windows must be positive");
  if (!(tau >= -1.0 && tau <= 1.0)) throw InvalidInput("tau must lie in [-1, 1]");
  if (agent_id.empty()) throw InvalidInput("agent id is empty");
  if (char_limits.metadata == 0 || char_limits.prior_paper == 0 || char_limits.member == 0 ||
      char_limits.synthesis == 0)
    throw InvalidInput("character limits must be positive");
}

EmojiLexicon ChannelConfig::lexicon() const {
  return EmojiLexicon::default_lexicon().with_overrides(emoji_lexicon_overrides);
}

void to_json(json& j, const Member& m) {
  j = json{{"member_id", m.member_id}, {"display_name", m.display_name}};
  j["linked_author_id"] = m.linked_author_id ? json(*m.linked_author_id) : json(nullptr);
  j["affiliation"] = m.affiliation ? json(*m.affiliation) : json(nullptr);
}

void from_json(const json& j, Member& m) {
  m.member_id = j.at("member_id").get<std::string>();
  m.display_name = j.value("display_name", m.member_id);
  m.linked_author_id.reset();
  m.affiliation.reset();
  if (j.contains("linked_author_id") && !j["linked_author_id"].is_null())
    m.linked_author_id = j["linked_author_id"].get<std::string>();
  if (j.contains("affiliation") && !j["affiliation"].is_null()) m.affiliation = j["affiliation"].get<std::string>();
}

ordered_json config_to_json(const ChannelConfig& c) {
  ordered_json j;
  j["channel"] = c.channel;
  j["frequency"] = to_string(c.frequency);
  j["windows"] = ordered_json{{"seed_window_days", c.seed_window.count() / 86400.0},
                              {"heuristic_window_days", c.heuristic_window.count() / 86400.0}};
  j["tau"] = c.tau;
  j["char_limits"] = ordered_json{{"metadata", c.char_limits.metadata},
                                  {"prior_paper", c.char_limits.prior_paper},
                                  {"member", c.char_limits.member},
                                  {"synthesis", c.char_limits.synthesis}};
  ordered_json overrides = ordered_json::object();
  for (const auto& [name, s] : c.emoji_lexicon_overrides) overrides[name] = to_string(s);
  j["emoji_lexicon_overrides"] = overrides;
  j["mention_cooldown"] = c.mention_cooldown;
  j["members"] = ordered_json::array();
  for (const auto& m : c.members) {
    ordered_json mj;
    mj["member_id"] = m.member_id;
    mj["display_name"] = m.display_name;
    mj["linked_author_id"] = m.linked_author_id ? ordered_json(*m.linked_author_id) : ordered_json(nullptr);
    mj["affiliation"] = m.affiliation ? ordered_json(*m.affiliation) : ordered_json(nullptr);
    j["members"].push_back(mj);
  }
  j["agent_id"] = c.agent_id;
  j["recommendation_pool"] = c.recommendation_pool;
  j["max_retries"] = c.max_retries;
  return j;
}

namespace {

Duration days_value(const json& j) {
  const double d = j.get<double>();
  return Duration(static_cast<long long>(d * 86400.0));
}

}  // namespace

ChannelConfig config_from_json(const json& j) {
  ChannelConfig c;
  try {
    if (!j.is_object()) throw InvalidInput("config must be an object");
    c.channel = j.value("channel", std::string{});
    if (j.contains("frequency")) c.frequency = frequency_from_string(j.at("frequency").get<std::string>());
    if (j.contains("windows")) {
      const auto& w = j.at("windows");
      if (w.contains("seed_window_days")) c.seed_window = days_value(w.at("seed_window_days"));
      if (w.contains("heuristic_window_days")) c.heuristic_window = days_value(w.at("heuristic_window_days"));
    }
    if (j.contains("tau")) c.tau = j.at("tau").get<double>();
    if (j.contains("char_limits")) {
      const auto& l = j.at("char_limits");
      c.char_limits.metadata = l.value("metadata", c.char_limits.metadata);
      c.char_limits.prior_paper = l.value("prior_paper", c.char_limits.prior_paper);
      c.char_limits.member = l.value("member", c.char_limits.member);
      c.char_limits.synthesis = l.value("synthesis", c.char_limits.synthesis);
    }
    if (j.contains("emoji_lexicon_overrides")) {
      for (const auto& [name, s] : j.at("emoji_lexicon_overrides").items())
        c.emoji_lexicon_overrides[name] = sentiment_from_string(s.get<std::string>());
    }
    c.mention_cooldown = j.value("mention_cooldown", c.mention_cooldown);
    if (j.contains("members")) c.members = j.at("members").get<std::vector<Member>>();
    c.agent_id = j.value("agent_id", c.agent_id);
    c.recommendation_pool = j.value("recommendation_pool", c.recommendation_pool);
    c.max_retries = j.value("max_retries", c.max_retries);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad channel config: ") + e.what());
  }
  return c;
}

}  // namespace socialrag
