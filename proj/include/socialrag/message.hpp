#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "socialrag/bot_message.hpp"
#include "socialrag/prompts.hpp"

namespace socialrag {

/// Channel state seen by message assembly.
struct ChannelView {
  const KnowledgeBase& kb;
  std::set<std::string> cooling_members;
  std::function<std::string(Seq)> permalink;

  PromptContext prompt_context(MetadataClient* metadata = nullptr) const { return {kb, cooling_members, metadata}; }
};

/// Turns raw generated text into a BotMessage: "@id" handles become <@id> once per
/// member (names under cooldown stay plain), the earlier thread of a category-II
/// signal is linked exactly once, and the metadata block is attached.
BotMessage assemble_message(std::string_view raw, const SelectedSignals& selected, const PaperRecord& paper,
                            const ChannelView& channel, Condition condition = Condition::c4_llm_synthesis);

struct MessageConstraints {
  std::size_t max_length = 386;
  std::size_t max_bold_spans = 3;
  std::vector<std::string> required_strings;
  std::vector<std::string> forbidden_bold_strings;
  std::set<std::string> members;
  std::set<std::string> cooling_members;
  /// Exactly this many link tokens, when set.
  std::optional<std::size_t> expected_links;

  /// Constraints for a synthesized message built from this chain.
  static MessageConstraints for_chain(const PromptChain& chain, const SelectedSignals& selected,
                                      const ChannelView& channel);
};

struct Violation {
  std::string rule_id;
  std::string detail;
  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;

  bool has(std::string_view rule_id) const;
};

/// Rule ids: bold_count, length, required_string, forbidden_bold, mention_unknown,
/// mention_repeat, mention_cooldown, link_count. Never throws.
ValidationReport validate_message(const BotMessage& msg, const MessageConstraints& constraints);

/// Extractive TLDR: leading abstract sentences up to the limit, or the title without an abstract.
std::string tldr(const PaperRecord& paper, std::size_t limit = 350);

/// Fixed-template sentences for the selected signals (one per line).
std::vector<std::string> template_sentences(const SelectedSignals& selected, const PaperRecord& paper,
                                            const ChannelView& channel);

inline constexpr std::string_view kTldrPrefix = "TLDR: ";
inline constexpr std::string_view kSectionSeparator = "\n\n";

struct GenerationSettings {
  CharLimits limits;
  std::size_t max_retries = 2;
  std::uint64_t seed = 0;
  MetadataClient* metadata = nullptr;
};

/// Full chain with format-safety loop: build, run, assemble, validate; retried with
/// fresh seeds until valid. Throws GenerationFailed after max_retries.
BotMessage generate_message(const PaperRecord& paper, const SelectedSignals& selected, const ChannelView& channel,
                            CompletionClient& llm, const GenerationSettings& settings);

/// c1 = TLDR only, c2 = template sentences only, c3 = c2 + separator + c1,
/// c4 = generate_message.
BotMessage render_condition(const PaperRecord& paper, const SelectedSignals& selected, Condition condition,
                            const ChannelView& channel, CompletionClient& llm, const GenerationSettings& settings);

}  // namespace socialrag
