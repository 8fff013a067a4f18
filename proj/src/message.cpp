#include "socialrag/message.hpp"

#include <algorithm>
#include <map>

#include <spdlog/spdlog.h>

#include "socialrag/errors.hpp"
#include "text_util.hpp"

namespace socialrag {
namespace {

std::string prior_title(const KnowledgeBase& kb, const PaperRef& ref) {
  if (const auto* p = kb.find(ref); p && p->record && !p->record->title.empty()) return p->record->title;
  return ref.str();
}

std::string thread_url(const ChannelView& channel, const PaperRef& prior) {
  const auto* p = channel.kb.find(prior);
  if (channel.permalink && p && p->first_mention_seq()) return channel.permalink(p->first_mention_seq());
  return canonical_url(prior);
}

// Replaces "@id" handles. First mention of an allowed member becomes a token; members
// under cooldown are written by name; repeats stay plain.
std::string tokenize_mentions(std::string_view raw, const ChannelView& channel) {
  const auto& members = channel.kb.members();
  std::set<std::string> mentioned;
  std::string out;
  std::size_t i = 0;
  while (i < raw.size()) {
    if (raw[i] == '<') {
      const auto close = raw.find('>', i);
      if (close != std::string_view::npos && raw.substr(i, 2) == "<@") {
        mentioned.insert(std::string(raw.substr(i + 2, close - i - 2)));
        out.append(raw.substr(i, close - i + 1));
        i = close + 1;
        continue;
      }
    }
    const bool boundary = i == 0 || !(text::is_handle_char(raw[i - 1]) || raw[i - 1] == '@');
    if (raw[i] != '@' || !boundary || i + 1 >= raw.size() || !text::is_handle_char(raw[i + 1])) {
      out.push_back(raw[i++]);
      continue;
    }
    std::size_t end = i + 1;
    while (end < raw.size() && text::is_handle_char(raw[end])) ++end;
    std::string id(raw.substr(i + 1, end - i - 1));
    while (!members.contains(id) && !id.empty() && (id.back() == '.' || id.back() == '-')) id.pop_back();
    const auto it = members.find(id);
    if (it == members.end() || channel.kb.is_agent(id)) {
      spdlog::warn("unresolved mention @{} left as plain text", id);
      out.append("@").append(id);
    } else if (channel.cooling_members.contains(id)) {
      out.append(it->second.display_name.empty() ? id : it->second.display_name);
    } else if (mentioned.insert(id).second) {
      out.append("<@").append(id).append(">");
    } else {
      out.append("@").append(id);
    }
    i = i + 1 + id.size();
  }
  return out;
}

// Positions of `needle` in body that lie outside <...> tokens.
std::size_t find_outside_tokens(const std::string& body, const std::string& needle) {
  for (std::size_t pos = body.find(needle); pos != std::string::npos; pos = body.find(needle, pos + 1)) {
    const auto open = body.rfind('<', pos);
    const auto close = body.rfind('>', pos);
    const bool inside = open != std::string::npos && (close == std::string::npos || close < open) &&
                        body.find('>', pos) != std::string::npos;
    if (!inside) return pos;
  }
  return std::string::npos;
}

std::string window_phrase(Duration window) {
  const auto d = std::chrono::duration_cast<std::chrono::hours>(window).count() / 24;
  if (d == 90) return "in the past three months";
  return "in the past " + std::to_string(d) + " days";
}

std::string plural(std::size_t n, std::string_view word) {
  return std::to_string(n) + " " + std::string(word) + (n == 1 ? "" : "s");
}

std::string thread_phrase(const IndexedPaper* p, const PromptContext& ctx) {
  if (!p) return "that was shared in a thread";
  const auto* sharer = p->first_human_mention();
  std::string s = sharer ? "that " + member_handle(ctx, sharer->actor) + " shared in a thread"
                         : "that was shared in a thread";
  const auto replies = p->comments.size();
  const auto reactions = p->reactions.size();
  if (replies || reactions) {
    s += " which received ";
    if (replies) s += (replies == 1 ? std::string("1 reply") : std::to_string(replies) + " replies");
    if (replies && reactions) s += " and ";
    if (reactions) s += plural(reactions, "reaction");
  }
  return s;
}

std::string variant_phrase(const InterestEvidence& v) {
  switch (v.variant) {
    case InterestVariant::liked_similar_papers:
      return "you've liked several similar papers in the channel";
    case InterestVariant::liked_author_papers:
      return "you've liked several of " + v.detail.value_or("this author") + "'s papers in the channel";
    case InterestVariant::liked_venue_papers:
      return "you've liked several " + v.detail.value_or("") + " papers in the channel";
    case InterestVariant::own_publications_similar:
      return "several of your publications are similar";
    case InterestVariant::cites_similar:
      return "you've cited similar papers before";
  }
  return "";
}

MetadataBlock metadata_block_for(const PaperRecord& paper) {
  MetadataBlock m;
  m.title = paper.title;
  m.authors = paper.author_names();
  m.venue = paper.venue.value_or("");
  m.year = paper.year;
  m.url = canonical_url(paper.ref);
  return m;
}

}  // namespace

BotMessage assemble_message(std::string_view raw, const SelectedSignals& selected, const PaperRecord& paper,
                            const ChannelView& channel, Condition condition) {
  BotMessage msg;
  msg.paper = paper.ref;
  msg.condition = condition;
  msg.provenance = selected;
  msg.metadata_block = metadata_block_for(paper);
  msg.body = tokenize_mentions(text::trim(raw), channel);

  if (selected.paper_connection) {
    if (const auto prior = selected.paper_connection->prior_paper()) {
      const std::string title = prior_title(channel.kb, *prior);
      const std::string url = thread_url(channel, *prior);
      const auto pos = find_outside_tokens(msg.body, title);
      if (pos != std::string::npos) {
        msg.body.replace(pos, title.size(), "<" + url + "|" + title + ">");
      } else {
        msg.body += (msg.body.empty() ? "" : " ") + std::string("<") + url + "|" + title + ">";
      }
    }
  }
  return msg;
}

MessageConstraints MessageConstraints::for_chain(const PromptChain& chain, const SelectedSignals& selected,
                                                 const ChannelView& channel) {
  MessageConstraints c;
  const auto& synthesis = chain.synthesis();
  c.max_length = synthesis.char_limit;
  c.required_strings = synthesis.required_strings;
  c.forbidden_bold_strings = synthesis.forbidden_bold_strings;
  for (const auto& [id, m] : channel.kb.members()) {
    if (!channel.kb.is_agent(id)) c.members.insert(id);
  }
  c.cooling_members = channel.cooling_members;
  c.expected_links = selected.paper_connection ? 1 : 0;
  return c;
}

bool ValidationReport::has(std::string_view rule_id) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.rule_id == rule_id; });
}

ValidationReport validate_message(const BotMessage& msg, const MessageConstraints& constraints) {
  ValidationReport r;
  auto add = [&](std::string rule, std::string detail) { r.violations.push_back({std::move(rule), std::move(detail)}); };

  const auto spans = bold_spans(msg.body);
  if (spans.size() > constraints.max_bold_spans) {
    add("bold_count", std::to_string(spans.size()) + " bold spans > " + std::to_string(constraints.max_bold_spans));
  }
  const std::string shown = display_text(msg.body);
  if (shown.size() > constraints.max_length) {
    add("length", std::to_string(shown.size()) + " chars > " + std::to_string(constraints.max_length));
  }
  for (const auto& s : constraints.required_strings) {
    if (shown.find(s) == std::string::npos) add("required_string", "missing \"" + s + "\"");
  }
  for (const auto& span : spans) {
    if (span.text.find("<@") != std::string::npos) add("forbidden_bold", "mention inside bold span");
    for (const auto& f : constraints.forbidden_bold_strings) {
      if (f.empty()) continue;
      for (auto pos = msg.body.find(f); pos != std::string::npos; pos = msg.body.find(f, pos + 1)) {
        if (pos < span.end && pos + f.size() > span.begin) {
          add("forbidden_bold", "\"" + f + "\" is bolded");
          break;
        }
      }
    }
  }
  std::set<std::string> seen;
  for (const auto& id : mention_tokens(msg.body)) {
    if (!constraints.members.contains(id)) add("mention_unknown", "<@" + id + "> is not a channel member");
    if (!seen.insert(id).second) add("mention_repeat", "<@" + id + "> mentioned more than once");
    if (constraints.cooling_members.contains(id)) add("mention_cooldown", "<@" + id + "> was mentioned recently");
  }
  if (constraints.expected_links) {
    const auto n = link_tokens(msg.body).size();
    if (n != *constraints.expected_links) {
      add("link_count", std::to_string(n) + " link tokens, expected " + std::to_string(*constraints.expected_links));
    }
  }
  r.ok = r.violations.empty();
  return r;
}

std::string tldr(const PaperRecord& paper, std::size_t limit) {
  const std::string source = paper.abstract && !text::trim(*paper.abstract).empty() ? *paper.abstract : paper.title;
  std::string out;
  for (const auto& sentence : text::split_sentences(source)) {
    const std::size_t extra = out.empty() ? sentence.size() : sentence.size() + 1;
    if (out.size() + extra > limit) break;
    if (!out.empty()) out.push_back(' ');
    out += sentence;
  }
  if (out.empty()) out = text::truncate_words(text::trim(source), limit);
  return out;
}

std::vector<std::string> template_sentences(const SelectedSignals& selected, const PaperRecord& paper,
                                            const ChannelView& channel) {
  (void)paper;
  const PromptContext ctx = channel.prompt_context();
  std::vector<std::string> lines;
  if (selected.metadata) {
    const auto& s = *selected.metadata;
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, AuthorIsMember>) {
            lines.push_back("Congrats " + member_handle(ctx, p.member_id) + "!");
          } else if constexpr (std::is_same_v<T, AuthorRecentlyDiscussed>) {
            lines.push_back(p.author_name + " also authored " + plural(p.count, "paper") + " that you've discussed " +
                            window_phrase(channel.kb.config().heuristic_window) + " in the channel.");
          } else if constexpr (std::is_same_v<T, AffiliationOverlap>) {
            lines.push_back("A paper from " + p.affiliation + ".");
          } else if constexpr (std::is_same_v<T, VenueRecentlyDiscussed>) {
            lines.push_back("You've reacted positively to other papers from " + p.venue + ".");
          }
        },
        s.payload);
  }
  if (selected.paper_connection) {
    const auto& s = *selected.paper_connection;
    const PaperRef prior = *s.prior_paper();
    const std::string title = prior_title(channel.kb, prior);
    const IndexedPaper* indexed = channel.kb.find(prior);
    std::string line;
    if (const auto* rel = std::get_if<PriorPaperRelation>(&s.payload)) {
      switch (rel->relation) {
        case PaperRelation::cites:
          line = "Cites: " + title + " " + thread_phrase(indexed, ctx);
          break;
        case PaperRelation::cited_by:
          line = "Cited by: " + title + " " + thread_phrase(indexed, ctx);
          break;
        case PaperRelation::shared_authors:
          line = "Shared authors: " + plural(rel->shared_authors.size(), "paper author") + ", " +
                 text::join(rel->shared_authors, ", ") + ", also contributed to " + title + " " +
                 thread_phrase(indexed, ctx);
          break;
        case PaperRelation::semantic:
          line = "Related paper: " + title + " " + thread_phrase(indexed, ctx);
          break;
      }
    } else if (const auto* by = std::get_if<PriorPaperByMember>(&s.payload)) {
      line = "Related paper: " + title + ", written by " + member_handle(ctx, by->member_id) + ", " +
             thread_phrase(indexed, ctx);
    } else {
      line = "Related paper: " + title + " " + thread_phrase(indexed, ctx);
    }
    lines.push_back("This paper might be related to another paper in the channel. " + line + ".");
  }
  if (selected.member_connection) {
    const auto& s = *selected.member_connection;
    const std::string handle = member_handle(ctx, *s.member());
    if (const auto* rel = std::get_if<MemberInterestRelation>(&s.payload); rel && !rel->variants.empty()) {
      lines.push_back("Possibly of interest to " + handle + ", because " + variant_phrase(rel->variants.front()) + ".");
    } else {
      lines.push_back("Possibly of interest to " + handle + ".");
    }
  }
  return lines;
}

BotMessage generate_message(const PaperRecord& paper, const SelectedSignals& selected, const ChannelView& channel,
                            CompletionClient& llm, const GenerationSettings& settings) {
  const PromptChain chain = build_prompt_chain(paper, selected, settings.limits, channel.prompt_context(settings.metadata));
  const auto constraints = MessageConstraints::for_chain(chain, selected, channel);
  std::string last;
  for (std::size_t attempt = 0; attempt <= settings.max_retries; ++attempt) {
    const std::uint64_t seed = settings.seed + attempt * 7919;
    std::string raw;
    try {
      raw = run_chain(chain, llm, seed, settings.max_retries);
    } catch (const GenerationFailed& e) {
      last = e.what();
      continue;
    }
    BotMessage msg = assemble_message(raw, selected, paper, channel, Condition::c4_llm_synthesis);
    const auto report = validate_message(msg, constraints);
    if (report.ok) return msg;
    last = report.violations.front().rule_id + ": " + report.violations.front().detail;
    spdlog::warn("generated message for {} rejected (attempt {}): {}", paper.ref.str(), attempt + 1, last);
    spdlog::debug("rejected body: {}", msg.body);
  }
  throw GenerationFailed("no valid message for " + paper.ref.str() + ": " + last);
}

BotMessage render_condition(const PaperRecord& paper, const SelectedSignals& selected, Condition condition,
                            const ChannelView& channel, CompletionClient& llm, const GenerationSettings& settings) {
  switch (condition) {
    case Condition::c1_tldr: {
      BotMessage msg = assemble_message("", {}, paper, channel, condition);
      msg.body = std::string(kTldrPrefix) + tldr(paper, settings.limits.metadata);
      return msg;
    }
    case Condition::c2_template:
      return assemble_message(text::join(template_sentences(selected, paper, channel), "\n"), selected, paper, channel,
                              condition);
    case Condition::c3_template_tldr: {
      BotMessage templ = render_condition(paper, selected, Condition::c2_template, channel, llm, settings);
      const BotMessage summary = render_condition(paper, selected, Condition::c1_tldr, channel, llm, settings);
      templ.body += std::string(kSectionSeparator) + summary.body;
      templ.condition = condition;
      return templ;
    }
    case Condition::c4_llm_synthesis:
      return generate_message(paper, selected, channel, llm, settings);
  }
  throw InvalidInput("unknown condition");
}

}  // namespace socialrag
