#include "socialrag/prompts.hpp"

#include <algorithm>
#include <map>

#include <spdlog/spdlog.h>

#include "socialrag/errors.hpp"

namespace socialrag {
namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  if (from.empty()) return;
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

// Prompt inputs must not carry our own markup characters into the model.
std::string clean(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '*' || c == '<' || c == '>' || c == '{' || c == '}') continue;
    out.push_back(c == '\n' || c == '\r' ? ' ' : c);
  }
  return out;
}

struct PaperText {
  std::string title;
  std::string abstract;
};

PaperText paper_text(const PromptContext& ctx, const PaperRef& ref) {
  if (const auto* p = ctx.kb.find(ref); p && p->record) {
    return {clean(p->record->title), clean(p->record->abstract.value_or(""))};
  }
  if (ctx.metadata) {
    try {
      const auto r = ctx.metadata->fetch_paper_metadata(ref);
      return {clean(r.title), clean(r.abstract.value_or(""))};
    } catch (const Error&) {
    }
  }
  return {ref.str(), ""};
}

const char* kMetadataTemplate =
    "You are a helpful assistant for paper summarization.\n"
    "The paper has the following details:\n"
    "* Abstract: [ABSTRACT_OF_RECOMMENDED_PAPER]\n"
    "* Authors: [AUTHORS_OF_RECOMMENDED_PAPER]\n"
    "In your summarization, you must\n"
    "[DIRECTIVES]"
    "* Keep your output less than [CHARACTER_LIMIT] characters.\n"
    "* Be informative.\n"
    "* If applicable, be specific about the numbers in the abstract that may refer to the proposed method's "
    "performance.";

const char* kPriorPaperTemplate =
    "You are a helpful assistant.\n"
    "Title: [TITLE_OF_RECOMMENDED_PAPER]\n"
    "Abstract: [ABSTRACT_OF_RECOMMENDED_PAPER]\n"
    "Title: [TITLE_OF_RELEVANT_PAPER]\n"
    "Abstract: [ABSTRACT_OF_PREVIOUS_PAPER]\n"
    "The first paragraph of your answer should explain and specify the relationship between "
    "[TITLE_OF_RECOMMENDED_PAPER] and [TITLE_OF_RELEVANT_PAPER]. Be informative.\n"
    "* In this first paragraph of your answer, you must explain and specify how [TITLE_OF_RECOMMENDED_PAPER] is "
    "related to [TITLE_OF_RELEVANT_PAPER] in one short sentence.\n"
    "* In this first paragraph of your answer, you must start with \"This paper might be related to "
    "[TITLE_OF_RELEVANT_PAPER] because\".\n"
    "[CITATION_DIRECTIVE]"
    "[SHARED_AUTHOR_DIRECTIVE]"
    "* The first paragraph should have no more than [CHARACTER_LIMIT_P1] characters.\n"
    "[THOUGHTS_SECTION]"
    "Your answer should replace [TITLE_OF_RECOMMENDED_PAPER] with \"this paper\".";

const char* kCitationDirective =
    "* In this first paragraph of your answer, you must specify how [CITING_TITLE] cites [CITED_TITLE] in one short "
    "sentence. The content from [CITING_TITLE] that cites [CITED_TITLE]: [CITATION_CONTEXT].\n";

const char* kSharedAuthorDirective =
    "* In this first paragraph of your answer, you must mention the following shared authors of the two papers: "
    "[SHARED_AUTHOR_NAMES].\n";

const char* kThoughtsSection =
    "The message from [USERNAME] who shared [TITLE_OF_RELEVANT_PAPER]: [MESSAGE]\n"
    "People's comments about [TITLE_OF_RELEVANT_PAPER]: [COMMENTS]\n"
    "People's reactions about [TITLE_OF_RELEVANT_PAPER]: [EMOJIS]\n"
    "The second paragraph of your answer should specify what people think about [TITLE_OF_RELEVANT_PAPER] and who "
    "these people are. Be informative.\n"
    "* In this second paragraph of your answer, you must start with \"thoughts about [TITLE_OF_RELEVANT_PAPER]\". "
    "Note that user A 'cc' user B means that A thought [TITLE_OF_RELEVANT_PAPER] is related to B's research, "
    "projects, or interests. Thoughts would not be negative.\n"
    "* In this second paragraph of your answer, you must appreciate that [USERNAME] shared "
    "[TITLE_OF_RELEVANT_PAPER].\n"
    "* In this second paragraph of your answer, you must NOT add in-line citations and citation numbers.\n"
    "* The second paragraph should have no more than [CHARACTER_LIMIT_P2] characters.\n";

const char* kMemberTemplate =
    "You are a helpful assistant in finding the relationships between two papers.\n"
    "Title: [TITLE_OF_RECOMMENDED_PAPER]\n"
    "Abstract: [ABSTRACT_OF_RECOMMENDED_PAPER]\n"
    "Title: [TITLE_OF_PAPER_SHARED_BY_RELEVANT_USER]\n"
    "Abstract: [ABSTRACT_OF_RELEVANT_USER_SHARED_PAPER]\n"
    "Your answer should explain and specify how [TITLE_OF_RECOMMENDED_PAPER] is related to and different from "
    "[TITLE_OF_PAPER_SHARED_BY_RELEVANT_USER] with no more than [CHARACTER_LIMIT] characters. If two papers are "
    "irrelevant, you should answer \"NONE\". Your answer must start with \"This paper is related to "
    "[TITLE_OF_PAPER_SHARED_BY_RELEVANT_USER] because both\". Be informative.";

const char* kSynthesisHead = "You are a helpful assistant for paper summarization.\n";

const char* kSynthesisTail =
    "First, you are required to shorten the above content with no more than [CHARACTER_LIMIT] characters. Note "
    "that:\n"
    "[REQUIRED_LINES]"
    "[PRIOR_PAPER_LINE]"
    "- Do not remove any person's name (with or without '@'), institution's name, number, and conference/journal's "
    "name.\n"
    "- Do not change the content's tone when it is low-confidence.\n"
    "- Keep a neutral, non-promotional tone without humor or emoji.\n"
    "Second, you are required to bold at most three key phrases of the shortened content by adding ONE '*' to the "
    "left of the bolded text and ONE '*' to the right of the bolded text.\n"
    "You should only bold the following text:\n"
    "- The text tells what a paper is about.\n"
    "- The text explains why a paper might be related to another paper or why a user might be interested in a "
    "paper, which is often after (does not include) the keywords such as \"because\" and \"due to\".\n"
    "[FORBIDDEN_SECTION]";

const char* kPriorPaperLine =
    "- Two papers are mentioned in [PROMPT_2_OUTPUT]. When you specify people's reactions or comments about "
    "[TITLE_OF_RELEVANT_PAPER], you should focus more on who reacted or commented and how these reactions or "
    "comments infer the potential reactions or comments about another paper based on the two papers' similarities "
    "than people's reactions or comments about [TITLE_OF_RELEVANT_PAPER].\n";

std::string metadata_directive(const SocialSignal& s, const PromptContext& ctx) {
  return std::visit(
      [&](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AuthorIsMember>) {
          const std::string handle = member_handle(ctx, p.member_id);
          const std::string name = clean(p.author_name);
          return "* Congratulate the following authors: " + (handle == name ? name : name + " (" + handle + ")") + ".\n";
        } else if constexpr (std::is_same_v<T, AuthorRecentlyDiscussed>) {
          return "* Mention the following authors: " + clean(p.author_name) + ".\n";
        } else if constexpr (std::is_same_v<T, AffiliationOverlap>) {
          return "* Mention " + clean(p.affiliation) + ".\n";
        } else if constexpr (std::is_same_v<T, VenueRecentlyDiscussed>) {
          return "* Mention the paper's conference or journal: " + clean(p.venue) + ".\n";
        } else {
          return "";
        }
      },
      s.payload);
}

std::string reactions_text(const IndexedPaper& prior, const PromptContext& ctx) {
  std::map<std::string, std::vector<std::string>> by_emoji;
  for (const auto& r : prior.reactions) by_emoji[r.emoji_name].push_back(member_handle(ctx, r.actor));
  std::vector<std::string> parts;
  for (const auto& [emoji, actors] : by_emoji) {
    parts.push_back(emoji + " x" + std::to_string(actors.size()) + " (" + join(actors, ", ") + ")");
  }
  return parts.empty() ? "none" : join(parts, "; ");
}

std::string comments_text(const IndexedPaper& prior, const PromptContext& ctx) {
  std::vector<std::string> parts;
  for (const auto& c : prior.comments) parts.push_back(member_handle(ctx, c.actor) + ": \"" + clean(c.text) + "\"");
  return parts.empty() ? "none" : join(parts, "; ");
}

PromptSpec prior_paper_stage(const PaperRecord& paper, const SocialSignal& signal, std::size_t limit,
                             const PromptContext& ctx) {
  const PaperRef prior_ref = *signal.prior_paper();
  const PaperText prior = paper_text(ctx, prior_ref);
  const IndexedPaper* indexed = ctx.kb.find(prior_ref);

  // Relation details come from whichever category-II heuristic won; h6/h7 carry the same prior paper.
  std::optional<PaperRelation> relation;
  std::vector<std::string> contexts;
  std::vector<std::string> shared;
  if (const auto* rel = std::get_if<PriorPaperRelation>(&signal.payload)) {
    relation = rel->relation;
    contexts = rel->citation_contexts;
    shared = rel->shared_authors;
  } else {
    if (paper.cites(prior_ref)) {
      relation = PaperRelation::cites;
      if (auto it = paper.citation_contexts.find(prior_ref); it != paper.citation_contexts.end()) contexts = it->second;
    }
  }

  std::string text = kPriorPaperTemplate;
  std::string citation;
  if (relation && (*relation == PaperRelation::cites || *relation == PaperRelation::cited_by) && !contexts.empty()) {
    citation = kCitationDirective;
    const bool forward = *relation == PaperRelation::cites;
    replace_all(citation, "[CITING_TITLE]", forward ? "[TITLE_OF_RECOMMENDED_PAPER]" : "[TITLE_OF_RELEVANT_PAPER]");
    replace_all(citation, "[CITED_TITLE]", forward ? "[TITLE_OF_RELEVANT_PAPER]" : "[TITLE_OF_RECOMMENDED_PAPER]");
    std::vector<std::string> cleaned;
    for (const auto& c : contexts) cleaned.push_back(clean(c));
    replace_all(citation, "[CITATION_CONTEXT]", join(cleaned, ", "));
  }
  replace_all(text, "[CITATION_DIRECTIVE]", citation);

  std::string shared_line;
  if (!shared.empty()) {
    shared_line = kSharedAuthorDirective;
    replace_all(shared_line, "[SHARED_AUTHOR_NAMES]", clean(join(shared, ", ")));
  }
  replace_all(text, "[SHARED_AUTHOR_DIRECTIVE]", shared_line);

  std::string thoughts;
  std::size_t first_limit = limit;
  if (indexed) {
    const MentionPost* sharer = indexed->first_human_mention();
    if (sharer || !indexed->comments.empty() || !indexed->reactions.empty()) {
      first_limit = limit * 3 / 5;
      thoughts = kThoughtsSection;
      std::string message = "none";
      std::string username = "a channel member";
      if (sharer) {
        username = member_handle(ctx, sharer->actor);
        if (const auto* ev = ctx.kb.event(sharer->seq); ev && ev->as<MessagePayload>())
          message = "\"" + clean(ev->as<MessagePayload>()->text) + "\"";
      }
      replace_all(thoughts, "[USERNAME]", username);
      replace_all(thoughts, "[MESSAGE]", message);
      replace_all(thoughts, "[COMMENTS]", comments_text(*indexed, ctx));
      replace_all(thoughts, "[EMOJIS]", reactions_text(*indexed, ctx));
      replace_all(thoughts, "[CHARACTER_LIMIT_P2]", std::to_string(limit - first_limit - 1));
    }
  }
  replace_all(text, "[THOUGHTS_SECTION]", thoughts);
  replace_all(text, "[CHARACTER_LIMIT_P1]", std::to_string(first_limit));
  replace_all(text, "[TITLE_OF_RECOMMENDED_PAPER]", clean(paper.title));
  replace_all(text, "[ABSTRACT_OF_RECOMMENDED_PAPER]", clean(paper.abstract.value_or("")));
  replace_all(text, "[TITLE_OF_RELEVANT_PAPER]", prior.title);
  replace_all(text, "[ABSTRACT_OF_PREVIOUS_PAPER]", prior.abstract);

  PromptSpec spec;
  spec.kind = StageKind::prior_paper;
  spec.template_text = std::move(text);
  spec.char_limit = limit;
  spec.required_prefix = "This paper might be related to " + prior.title + " because";
  spec.required_strings = {prior.title};
  return spec;
}

struct InterestPair {
  std::string member_id;
  PaperRef paper;
};

std::optional<InterestPair> interest_pair(const SocialSignal& s) {
  if (const auto* p = std::get_if<MemberInterest>(&s.payload)) return InterestPair{p->member_id, p->interest_paper};
  if (const auto* p = std::get_if<MemberInterestRelation>(&s.payload)) {
    for (const auto& v : p->variants) {
      if (!v.papers.empty()) return InterestPair{p->member_id, v.papers.front()};
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(StageKind k) {
  switch (k) {
    case StageKind::metadata:
      return "P1_metadata";
    case StageKind::prior_paper:
      return "P2_prior_paper";
    case StageKind::member:
      return "P3_member";
    case StageKind::synthesis:
      return "P4_synthesis";
  }
  return "?";
}

const PromptSpec* PromptChain::find(StageKind k) const {
  for (const auto& s : stages) {
    if (s.kind == k) return &s;
  }
  return nullptr;
}

const std::vector<std::string>& template_placeholders() {
  static const std::vector<std::string> names{
      "[ABSTRACT_OF_RECOMMENDED_PAPER]",
      "[AUTHORS_OF_RECOMMENDED_PAPER]",
      "[AUTHOR_NAME_TO_CONGRATULATE]",
      "[AUTHOR_NAME_TO_HIGHLIGHT]",
      "[AUTHOR_AFFILIATION_TO_HIGHLIGHT]",
      "[VENUE_TO_HIGHLIGHT]",
      "[CHARACTER_LIMIT]",
      "[TITLE_OF_RECOMMENDED_PAPER]",
      "[TITLE_OF_RELEVANT_PAPER]",
      "[ABSTRACT_OF_PREVIOUS_PAPER]",
      "[CITATION_CONTEXT]",
      "[SHARED_AUTHOR_NAMES]",
      "[CHARACTER_LIMIT_P1]",
      "[CHARACTER_LIMIT_P2]",
      "[USERNAME]",
      "[MESSAGE]",
      "[COMMENTS]",
      "[EMOJIS]",
      "[TITLE_OF_PAPER_SHARED_BY_RELEVANT_USER]",
      "[ABSTRACT_OF_RELEVANT_USER_SHARED_PAPER]",
      "[PROMPT_123_OUTPUTS]",
      "[PROMPT_2_OUTPUT]",
      "[RELEVANT_USER_SLACK_ID]",
      "[DIRECTIVES]",
      "[CITATION_DIRECTIVE]",
      "[SHARED_AUTHOR_DIRECTIVE]",
      "[THOUGHTS_SECTION]",
      "[REQUIRED_LINES]",
      "[PRIOR_PAPER_LINE]",
      "[FORBIDDEN_SECTION]",
      "[CITING_TITLE]",
      "[CITED_TITLE]",
  };
  return names;
}

std::string member_handle(const PromptContext& ctx, const std::string& member_id) {
  if (!ctx.cooling_members.contains(member_id)) return "@" + member_id;
  const auto& members = ctx.kb.members();
  const auto it = members.find(member_id);
  return it == members.end() ? member_id : it->second.display_name;
}

PromptChain build_prompt_chain(const PaperRecord& paper, const SelectedSignals& selected, const CharLimits& limits,
                               const PromptContext& ctx) {
  PromptChain chain;
  std::vector<std::string> required;
  std::vector<std::string> forbidden_bold;
  auto require = [&](const std::string& s) {
    if (s.empty()) return;
    if (std::find(required.begin(), required.end(), s) == required.end()) required.push_back(s);
    if (std::find(forbidden_bold.begin(), forbidden_bold.end(), s) == forbidden_bold.end()) forbidden_bold.push_back(s);
  };

  if (selected.metadata) {
    PromptSpec spec;
    spec.kind = StageKind::metadata;
    spec.char_limit = limits.metadata;
    std::string text = kMetadataTemplate;
    replace_all(text, "[DIRECTIVES]", metadata_directive(*selected.metadata, ctx));
    replace_all(text, "[ABSTRACT_OF_RECOMMENDED_PAPER]", "{" + clean(paper.abstract.value_or(paper.title)) + "}");
    replace_all(text, "[AUTHORS_OF_RECOMMENDED_PAPER]", clean(join(paper.author_names(), ", ")));
    replace_all(text, "[CHARACTER_LIMIT]", std::to_string(limits.metadata));
    spec.template_text = std::move(text);
    if (const auto* h1 = std::get_if<AuthorIsMember>(&selected.metadata->payload)) {
      const std::string handle = member_handle(ctx, h1->member_id);
      spec.required_strings.push_back(handle);
      require(handle);
    }
    chain.stages.push_back(std::move(spec));
  }

  std::string prior_title;
  if (selected.paper_connection) {
    auto spec = prior_paper_stage(paper, *selected.paper_connection, limits.prior_paper, ctx);
    prior_title = spec.required_strings.front();
    require(prior_title);
    chain.stages.push_back(std::move(spec));
  }

  if (selected.member_connection) {
    if (auto pair = interest_pair(*selected.member_connection)) {
      const PaperText interest = paper_text(ctx, pair->paper);
      PromptSpec spec;
      spec.kind = StageKind::member;
      spec.char_limit = limits.member;
      std::string text = kMemberTemplate;
      replace_all(text, "[TITLE_OF_RECOMMENDED_PAPER]", clean(paper.title));
      replace_all(text, "[ABSTRACT_OF_RECOMMENDED_PAPER]", clean(paper.abstract.value_or("")));
      replace_all(text, "[TITLE_OF_PAPER_SHARED_BY_RELEVANT_USER]", interest.title);
      replace_all(text, "[ABSTRACT_OF_RELEVANT_USER_SHARED_PAPER]", interest.abstract);
      replace_all(text, "[CHARACTER_LIMIT]", std::to_string(limits.member));
      spec.template_text = std::move(text);
      spec.required_prefix = "This paper is related to " + interest.title + " because both";
      chain.stages.push_back(std::move(spec));
      require(interest.title);
      require(member_handle(ctx, pair->member_id));
    }
  }

  PromptSpec synthesis;
  synthesis.kind = StageKind::synthesis;
  synthesis.char_limit = limits.synthesis;
  synthesis.required_strings = required;
  synthesis.forbidden_bold_strings = forbidden_bold;
  std::string text = std::string(kSynthesisHead) + std::string(kStageOutputsSlot) + "\n" + kSynthesisTail;
  std::string required_lines;
  for (const auto& r : required) required_lines += "- The shortened content must contain the following strings: " + r + "\n";
  replace_all(text, "[REQUIRED_LINES]", required_lines);
  std::string prior_line;
  if (!prior_title.empty()) {
    prior_line = kPriorPaperLine;
    replace_all(prior_line, "[PROMPT_2_OUTPUT]", "the above content");
    replace_all(prior_line, "[TITLE_OF_RELEVANT_PAPER]", prior_title);
  }
  replace_all(text, "[PRIOR_PAPER_LINE]", prior_line);
  std::string forbidden;
  if (!forbidden_bold.empty()) {
    forbidden = "You should not bold the following text:\n";
    for (const auto& f : forbidden_bold) forbidden += "- " + f + "\n";
  }
  replace_all(text, "[FORBIDDEN_SECTION]", forbidden);
  replace_all(text, "[CHARACTER_LIMIT]", std::to_string(limits.synthesis));
  while (!text.empty() && text.back() == '\n') text.pop_back();
  synthesis.template_text = std::move(text);
  chain.stages.push_back(std::move(synthesis));

  chain.fallback_content = clean(paper.abstract.value_or(paper.title));
  return chain;
}

std::vector<std::string> stage_violations(const PromptSpec& stage, std::string_view output) {
  std::vector<std::string> v;
  if (output.size() > stage.char_limit) {
    v.push_back("length " + std::to_string(output.size()) + " > " + std::to_string(stage.char_limit));
  }
  if (stage.kind == StageKind::member && output == "NONE") return v;
  if (!stage.required_prefix.empty() && !output.starts_with(stage.required_prefix)) {
    v.push_back("missing prefix \"" + stage.required_prefix + "\"");
  }
  for (const auto& r : stage.required_strings) {
    if (output.find(r) == std::string_view::npos) v.push_back("missing required string \"" + r + "\"");
  }
  return v;
}

namespace {

std::string run_stage(const PromptSpec& stage, std::string_view prompt, CompletionClient& llm, std::uint64_t seed,
                      std::size_t max_retries) {
  std::string last_problem;
  for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
    std::string out;
    try {
      out = llm.complete({std::string(prompt), stage.char_limit, seed + attempt});
    } catch (const RetryableError& e) {
      if (attempt == max_retries) throw;
      spdlog::warn("completion for {} failed, retrying: {}", to_string(stage.kind), e.what());
      continue;
    }
    const auto problems = stage_violations(stage, out);
    if (problems.empty()) return out;
    last_problem = problems.front();
    spdlog::warn("{} output rejected (attempt {}): {}", to_string(stage.kind), attempt + 1, last_problem);
  }
  throw GenerationFailed(std::string(to_string(stage.kind)) + " failed after retries: " + last_problem);
}

}  // namespace

std::string run_chain(const PromptChain& chain, CompletionClient& llm, std::uint64_t seed, std::size_t max_retries) {
  if (chain.stages.empty() || chain.stages.back().kind != StageKind::synthesis)
    throw InvalidInput("prompt chain must end with the synthesis stage");
  std::vector<std::string> outputs;
  for (std::size_t i = 0; i + 1 < chain.stages.size(); ++i) {
    const auto& stage = chain.stages[i];
    std::string out = run_stage(stage, stage.template_text, llm, seed + 1000 * (i + 1), max_retries);
    if (stage.kind == StageKind::member && out == "NONE") continue;
    outputs.push_back(std::move(out));
  }
  const auto& synthesis = chain.synthesis();
  const std::string content = outputs.empty() ? chain.fallback_content : join(outputs, "\n");
  std::string prompt = synthesis.template_text;
  replace_all(prompt, kStageOutputsSlot, "{" + content + "}");
  return run_stage(synthesis, prompt, llm, seed, max_retries);
}

}  // namespace socialrag
