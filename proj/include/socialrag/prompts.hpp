#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "socialrag/channel_config.hpp"
#include "socialrag/clients.hpp"
#include "socialrag/knowledge_base.hpp"
#include "socialrag/signal.hpp"

namespace socialrag {

enum class StageKind { metadata, prior_paper, member, synthesis };

std::string_view to_string(StageKind k);

struct PromptSpec {
  StageKind kind = StageKind::synthesis;
  std::string template_text;
  std::size_t char_limit = 0;
  std::vector<std::string> required_strings;
  /// The output must begin with this, when set (stages 2 and 3).
  std::string required_prefix;
  std::vector<std::string> forbidden_bold_strings;
};

/// Stages in execution order; the synthesis stage is always last.
struct PromptChain {
  std::vector<PromptSpec> stages;
  /// Synthesis input when no earlier stage contributes (summary-only form).
  std::string fallback_content;

  const PromptSpec* find(StageKind k) const;
  const PromptSpec& synthesis() const { return stages.back(); }
};

/// Slot in the synthesis template that run_chain fills with the earlier stage outputs.
inline constexpr std::string_view kStageOutputsSlot = "{{stage_outputs}}";

/// Placeholder names from the template set; none may survive instantiation.
const std::vector<std::string>& template_placeholders();

/// Channel facts the prompt builder needs beyond the selected signals.
struct PromptContext {
  const KnowledgeBase& kb;
  /// Members that must not be @-mentioned in this message.
  std::set<std::string> cooling_members;
  MetadataClient* metadata = nullptr;
};

/// How a member is referred to in prompts and output: "@id" when a mention is allowed,
/// the display name otherwise.
std::string member_handle(const PromptContext& ctx, const std::string& member_id);

PromptChain build_prompt_chain(const PaperRecord& paper, const SelectedSignals& selected, const CharLimits& limits,
                               const PromptContext& ctx);

/// Runs stages 1-3, feeds their outputs into the synthesis stage and returns its output.
/// Each stage output must respect its limit and required strings; a violating output
/// (or a RetryableError from the client) is retried with the next seed up to
/// max_retries times. Throws GenerationFailed, or RetryableError when the client kept failing.
std::string run_chain(const PromptChain& chain, CompletionClient& llm, std::uint64_t seed, std::size_t max_retries = 2);

/// Violations of a single stage output (empty when acceptable).
std::vector<std::string> stage_violations(const PromptSpec& stage, std::string_view output);

}  // namespace socialrag
