#pragma once

#include <map>
#include <string>
#include <string_view>

namespace socialrag {

enum class Sentiment { positive, negative, neutral };

std::string_view to_string(Sentiment s);
Sentiment sentiment_from_string(std::string_view s);

/// Emoji-name polarity table. Names are normalized (colons and skin-tone
/// modifiers stripped, lowercased) before lookup; unknown names are neutral.
class EmojiLexicon {
 public:
  EmojiLexicon() = default;
  explicit EmojiLexicon(std::map<std::string, Sentiment> entries);

  static const EmojiLexicon& default_lexicon();

  EmojiLexicon with_overrides(const std::map<std::string, Sentiment>& overrides) const;

  /// Throws InvalidInput for an empty name.
  Sentiment classify(std::string_view emoji_name) const;

  const std::map<std::string, Sentiment>& entries() const { return entries_; }

  static std::string normalize(std::string_view emoji_name);

 private:
  std::map<std::string, Sentiment> entries_;
};

inline Sentiment classify_reaction(std::string_view emoji_name,
                                   const EmojiLexicon& lexicon = EmojiLexicon::default_lexicon()) {
  return lexicon.classify(emoji_name);
}

}  // namespace socialrag
