#include "socialrag/sentiment.hpp"

#include <algorithm>
#include <cctype>

#include "socialrag/errors.hpp"

namespace socialrag {

std::string_view to_string(Sentiment s) {
  switch (s) {
    case Sentiment::positive:
      return "positive";
    case Sentiment::negative:
      return "negative";
    case Sentiment::neutral:
      return "neutral";
  }
  return "neutral";
}

Sentiment sentiment_from_string(std::string_view s) {
  if (s == "positive") return Sentiment::positive;
  if (s == "negative") return Sentiment::negative;
  if (s == "neutral") return Sentiment::neutral;
  throw InvalidInput("unknown sentiment: " + std::string(s));
}

EmojiLexicon::EmojiLexicon(std::map<std::string, Sentiment> entries) {
  for (auto& [name, sentiment] : entries) entries_[normalize(name)] = sentiment;
}

const EmojiLexicon& EmojiLexicon::default_lexicon() {
  static const EmojiLexicon lexicon({
      {"thumbsup", Sentiment::positive},
      {"+1", Sentiment::positive},
      {"heart", Sentiment::positive},
      {"tada", Sentiment::positive},
      {"fire", Sentiment::positive},
      {"star", Sentiment::positive},
      {"star-struck", Sentiment::positive},
      {"raised_hands", Sentiment::positive},
      {"clap", Sentiment::positive},
      {"100", Sentiment::positive},
      {"heart_eyes", Sentiment::positive},
      {"bulb", Sentiment::positive},
      {"white_check_mark", Sentiment::positive},
      {"rocket", Sentiment::positive},
      {"sparkles", Sentiment::positive},
      {"bookmark", Sentiment::positive},
      {"thumbsdown", Sentiment::negative},
      {"-1", Sentiment::negative},
      {"x", Sentiment::negative},
      {"no_entry_sign", Sentiment::negative},
      {"disappointed", Sentiment::negative},
      {"face_with_rolling_eyes", Sentiment::negative},
  });
  return lexicon;
}

EmojiLexicon EmojiLexicon::with_overrides(const std::map<std::string, Sentiment>& overrides) const {
  EmojiLexicon out = *this;
  for (const auto& [name, sentiment] : overrides) out.entries_[normalize(name)] = sentiment;
  return out;
}

std::string EmojiLexicon::normalize(std::string_view emoji_name) {
  std::string name(emoji_name);
  // ":thumbsup::skin-tone-3:" -> "thumbsup"
  if (const auto tone = name.find("::skin-tone"); tone != std::string::npos) name.resize(tone);
  while (!name.empty() && (name.front() == ':' || std::isspace(static_cast<unsigned char>(name.front()))))
    name.erase(0, 1);
  while (!name.empty() && (name.back() == ':' || std::isspace(static_cast<unsigned char>(name.back()))))
    name.pop_back();
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
  return name;
}

Sentiment EmojiLexicon::classify(std::string_view emoji_name) const {
  const std::string name = normalize(emoji_name);
  if (name.empty()) throw InvalidInput("empty emoji name");
  const auto it = entries_.find(name);
  return it == entries_.end() ? Sentiment::neutral : it->second;
}

}  // namespace socialrag
