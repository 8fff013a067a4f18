#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialrag/paper_ref.hpp"
#include "socialrag/signal.hpp"

namespace socialrag {

/// c1: TLDR only, c2: social signals through fixed templates, c3: templates plus TLDR,
/// c4: chained LLM synthesis.
enum class Condition { c1_tldr, c2_template, c3_template_tldr, c4_llm_synthesis };

std::string_view to_string(Condition c);
Condition condition_from_string(std::string_view s);

struct MetadataBlock {
  std::string title;
  std::vector<std::string> authors;
  std::string venue;
  int year = 0;
  std::string url;

  bool operator==(const MetadataBlock&) const = default;
};

/// A recommendation as posted. The body uses platform-neutral markup:
///   *bold*            single-asterisk bold span
///   <@member_id>      mention
///   <url|title>       link
struct BotMessage {
  PaperRef paper;
  std::string body;
  MetadataBlock metadata_block;
  SelectedSignals provenance;
  Condition condition = Condition::c4_llm_synthesis;

  bool operator==(const BotMessage&) const = default;

  /// Body followed by the structured metadata lines.
  std::string rendered_text() const;
};

struct BoldSpan {
  std::size_t begin = 0;  ///< offset of the opening '*'
  std::size_t end = 0;    ///< one past the closing '*'
  std::string text;
};

struct LinkToken {
  std::string url;
  std::string title;
};

std::vector<BoldSpan> bold_spans(std::string_view body);
/// Member ids of every <@...> token in order of appearance (duplicates kept).
std::vector<std::string> mention_tokens(std::string_view body);
std::vector<LinkToken> link_tokens(std::string_view body);
/// Text a reader sees: bold markers dropped, <@id> shown as @id, links as their title.
std::string display_text(std::string_view body);

nlohmann::ordered_json bot_message_to_json(const BotMessage& m);
BotMessage bot_message_from_json(const nlohmann::json& j);

}  // namespace socialrag
