#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialrag/sentiment.hpp"
#include "socialrag/time.hpp"

namespace socialrag {

enum class Frequency { daily, every_other_day, weekly };

std::string_view to_string(Frequency f);
/// Throws InvalidInput for anything but "daily", "every_other_day", "weekly".
Frequency frequency_from_string(std::string_view s);
Duration period_of(Frequency f);

/// Per-stage output budgets for the prompt chain.
struct CharLimits {
  std::size_t metadata = 350;
  std::size_t prior_paper = 425;
  std::size_t member = 300;
  std::size_t synthesis = 386;

  bool operator==(const CharLimits&) const = default;
};

struct Member {
  std::string member_id;
  std::string display_name;
  std::optional<std::string> linked_author_id;
  std::optional<std::string> affiliation;

  bool operator==(const Member&) const = default;
};

struct ChannelConfig {
  std::string channel;
  Frequency frequency = Frequency::every_other_day;
  Duration seed_window = days(90);
  Duration heuristic_window = days(90);
  double tau = 0.6;
  CharLimits char_limits;
  std::map<std::string, Sentiment> emoji_lexicon_overrides;
  std::size_t mention_cooldown = 3;
  /// Known members with optional publication-record linkage.
  std::vector<Member> members;
  std::string agent_id = "socialrag-bot";
  std::size_t recommendation_pool = 100;
  std::size_t max_retries = 2;

  bool operator==(const ChannelConfig&) const = default;

  /// Throws InvalidInput when windows are non-positive, tau is outside [-1, 1]
  /// or the channel id is empty.
  void validate() const;

  EmojiLexicon lexicon() const;
};

void to_json(nlohmann::json& j, const Member& m);
void from_json(const nlohmann::json& j, Member& m);

nlohmann::ordered_json config_to_json(const ChannelConfig& config);
/// Missing keys keep their defaults; bad values throw InvalidInput.
ChannelConfig config_from_json(const nlohmann::json& j);

}  // namespace socialrag
