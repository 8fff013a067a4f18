#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "socialrag/errors.hpp"
#include "socialrag/message.hpp"
#include "socialrag/prompts.hpp"

using namespace socialrag;
using namespace fixtures;

namespace {

// Wraps a completion client and keeps every request/response pair.
class RecordingClient : public CompletionClient {
 public:
  explicit RecordingClient(CompletionClient& inner) : inner_(inner) {}
  std::string complete(const CompletionRequest& request) override {
    auto out = inner_.complete(request);
    calls.push_back({request, out});
    return out;
  }
  std::vector<std::pair<CompletionRequest, std::string>> calls;

 private:
  CompletionClient& inner_;
};

// Returns canned text regardless of the prompt.
class CannedClient : public CompletionClient {
 public:
  explicit CannedClient(std::string text) : text_(std::move(text)) {}
  std::string complete(const CompletionRequest&) override {
    ++calls;
    return text_;
  }
  std::size_t calls = 0;

 private:
  std::string text_;
};

std::vector<StageKind> kinds(const PromptChain& chain) {
  std::vector<StageKind> out;
  for (const auto& s : chain.stages) out.push_back(s.kind);
  return out;
}

Scene& scene() {
  static Scene s;
  return s;
}

struct Case {
  PaperRecord paper;
  SelectedSignals selected;
};

// Every candidate of the scene under every category mask that leaves something selected.
const std::vector<Case>& cases() {
  static const std::vector<Case> all = [] {
    std::vector<Case> out;
    for (const auto& c : scene().candidates()) {
      for (unsigned mask = 1; mask < 8; ++mask) {
        auto sel = scene().selected_for(c, mask);
        if (!sel.empty()) out.push_back({c, sel});
      }
    }
    return out;
  }();
  return all;
}

const Case* find_case(const std::function<bool(const Case&)>& pred) {
  for (const auto& c : cases()) {
    if (pred(c)) return &c;
  }
  return nullptr;
}

GenerationSettings settings(std::uint64_t seed = 1) {
  GenerationSettings s;
  s.seed = seed;
  s.metadata = &scene().world.metadata;
  return s;
}

bool has_member_stage(const Case& c) {
  const auto chain = build_prompt_chain(c.paper, c.selected, {}, scene().view().prompt_context());
  return chain.find(StageKind::member) != nullptr;
}

}  // namespace

TEST(PromptChain, AllCategoriesRunFourStagesInOrder) {
  const Case* c = find_case([](const Case& c) { return c.selected.size() == 3 && has_member_stage(c); });
  ASSERT_TRUE(c);
  const auto chain = build_prompt_chain(c->paper, c->selected, {}, scene().view().prompt_context());
  EXPECT_EQ(kinds(chain),
            (std::vector<StageKind>{StageKind::metadata, StageKind::prior_paper, StageKind::member, StageKind::synthesis}));
  EXPECT_EQ(chain.stages[0].char_limit, 350u);
  EXPECT_EQ(chain.stages[1].char_limit, 425u);
  EXPECT_EQ(chain.stages[2].char_limit, 300u);
  EXPECT_EQ(chain.stages[3].char_limit, 386u);
}

TEST(PromptChain, MetadataOnlyRunsFirstAndLastStage) {
  const Case* c = find_case([](const Case& c) { return c.selected.metadata && c.selected.size() == 1; });
  ASSERT_TRUE(c);
  const auto chain = build_prompt_chain(c->paper, c->selected, {}, scene().view().prompt_context());
  EXPECT_EQ(kinds(chain), (std::vector<StageKind>{StageKind::metadata, StageKind::synthesis}));
}

TEST(PromptChain, NoSignalsIsSummaryOnly) {
  const auto paper = scene().candidates().front();
  const auto chain = build_prompt_chain(paper, {}, {}, scene().view().prompt_context());
  EXPECT_EQ(kinds(chain), std::vector<StageKind>{StageKind::synthesis});
  EXPECT_EQ(chain.fallback_content, *paper.abstract);
  MockCompletionClient llm;
  const auto out = run_chain(chain, llm, 3);
  EXPECT_FALSE(out.empty());
  EXPECT_LE(out.size(), 386u);
}

TEST(PromptChain, NoPlaceholderSurvivesInstantiation) {
  for (const auto& c : cases()) {
    for (const auto& cooling : {std::set<std::string>{}, std::set<std::string>{"m1", "m2", "m3"}}) {
      const auto chain = build_prompt_chain(c.paper, c.selected, {}, scene().view(cooling).prompt_context());
      for (const auto& stage : chain.stages) {
        for (const auto& ph : template_placeholders()) {
          ASSERT_EQ(stage.template_text.find(ph), std::string::npos) << ph << " in " << to_string(stage.kind);
        }
      }
      EXPECT_NE(chain.synthesis().template_text.find(kStageOutputsSlot), std::string::npos);
    }
  }
}

TEST(PromptChain, PriorPaperStageRequiresPriorTitle) {
  const Case* c = find_case([](const Case& c) { return c.selected.paper_connection && c.selected.size() == 1; });
  ASSERT_TRUE(c);
  const auto chain = build_prompt_chain(c->paper, c->selected, {}, scene().view().prompt_context());
  const auto prior = *c->selected.paper_connection->prior_paper();
  const std::string title = scene().kb.find(prior)->record->title;
  const auto* stage = chain.find(StageKind::prior_paper);
  ASSERT_TRUE(stage);
  EXPECT_EQ(stage->required_prefix, "This paper might be related to " + title + " because");
  EXPECT_EQ(chain.synthesis().required_strings, std::vector<std::string>{title});
  MockCompletionClient llm;
  EXPECT_NE(run_chain(chain, llm, 5).find(title), std::string::npos);
}

TEST(RunChain, StageOutputsRespectTheirLimits) {
  const Case* c = find_case([](const Case& c) { return c.selected.size() == 3 && has_member_stage(c); });
  ASSERT_TRUE(c);
  const auto chain = build_prompt_chain(c->paper, c->selected, {}, scene().view().prompt_context());
  MockCompletionClient mock;
  RecordingClient llm(mock);
  run_chain(chain, llm, 11);
  ASSERT_EQ(llm.calls.size(), 4u);
  const std::vector<std::size_t> limits{350, 425, 300, 386};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(llm.calls[i].first.max_output_chars, limits[i]);
    EXPECT_LE(llm.calls[i].second.size(), limits[i]);
  }
  // Seeds: stage i uses seed + 1000*(i+1), synthesis uses the seed itself.
  EXPECT_EQ(llm.calls[0].first.seed, 1011u);
  EXPECT_EQ(llm.calls[3].first.seed, 11u);
}

TEST(RunChain, ViolatingStageIsRetriedThenFails) {
  PromptChain chain;
  PromptSpec p1;
  p1.kind = StageKind::metadata;
  p1.char_limit = 10;
  p1.template_text = "x";
  PromptSpec p4;
  p4.char_limit = 386;
  p4.template_text = std::string(kStageOutputsSlot);
  chain.stages = {p1, p4};
  CannedClient llm("this output is far longer than ten characters");
  EXPECT_THROW(run_chain(chain, llm, 1, 2), GenerationFailed);
  EXPECT_EQ(llm.calls, 3u);
}

TEST(RunChain, MemberNoneIsDropped) {
  PromptChain chain;
  PromptSpec p3;
  p3.kind = StageKind::member;
  p3.char_limit = 300;
  p3.required_prefix = "This paper is related to X because both";
  p3.template_text = "member";
  PromptSpec p4;
  p4.char_limit = 386;
  p4.template_text = std::string(kStageOutputsSlot);
  chain.stages = {p3, p4};
  chain.fallback_content = "fallback";
  EXPECT_TRUE(stage_violations(p3, "NONE").empty());
  CannedClient llm("NONE");
  EXPECT_EQ(run_chain(chain, llm, 1), "NONE");
  EXPECT_EQ(llm.calls, 2u);
}

TEST(RunChain, IsDeterministicForSeed) {
  MockCompletionClient a, b;
  for (const auto& c : cases()) {
    const auto chain = build_prompt_chain(c.paper, c.selected, {}, scene().view().prompt_context());
    EXPECT_EQ(run_chain(chain, a, 42), run_chain(chain, b, 42));
  }
}

TEST(StageViolations, ReportsLengthPrefixAndRequired) {
  PromptSpec s;
  s.kind = StageKind::prior_paper;
  s.char_limit = 20;
  s.required_prefix = "This paper";
  s.required_strings = {"Foo"};
  EXPECT_TRUE(stage_violations(s, "This paper Foo").empty());
  EXPECT_EQ(stage_violations(s, "That paper is about Foo and more").size(), 2u);
  EXPECT_EQ(stage_violations(s, "This paper").size(), 1u);
}

TEST(MemberHandle, CoolingMemberIsWrittenByName) {
  const auto& kb = scene().kb;
  const auto& [id, m] = *kb.members().begin();
  EXPECT_EQ(member_handle(scene().view().prompt_context(), id), "@" + id);
  EXPECT_EQ(member_handle(scene().view({id}).prompt_context(), id), m.display_name);
}

TEST(AssembleMessage, MentionTokenizedOnceAndCoolingMemberByName) {
  LogBuilder b;
  ChannelConfig c;
  c.members = {Member{"ana", "Ana Ruiz", std::nullopt, std::nullopt}, Member{"bo", "Bo Li", std::nullopt, std::nullopt}};
  b.config(c);
  const auto kb = b.kb();
  const ChannelView view{kb, {"bo"}, permalink};
  PaperRecord paper = record("2301.00001", "A Paper", {}, std::nullopt, {});
  const auto msg = assemble_message("Hi @ana, see this. Also @ana again and @bo, @ghost.", {}, paper, view);
  EXPECT_EQ(msg.body, "Hi <@ana>, see this. Also @ana again and Bo Li, @ghost.");
  EXPECT_EQ(mention_tokens(msg.body), std::vector<std::string>{"ana"});
}

TEST(AssembleMessage, PriorPaperLinkedExactlyOnceToItsThread) {
  LogBuilder b;
  b.message("u1", "chatter", at("2024-03-01T09:00:00Z"));
  for (Seq s = 2; s < 42; ++s) b.message("u1", "more chatter", at("2024-03-01T09:00:00Z"));
  const Seq post = b.share("u1", "2301.00002", at("2024-03-02T09:00:00Z"));
  ASSERT_EQ(post, 42u);
  MockWorld world(small_corpus());
  const auto kb = b.kb(&world.metadata);
  const ChannelView view{kb, {}, permalink};
  const std::string title = kb.find(arxiv("2301.00002"))->record->title;

  SocialSignal h5{Heuristic::h5, PriorPaperRelation{arxiv("2301.00002"), PaperRelation::cites, {}, {}, {}}, 1.0, {42}, 0};
  SelectedSignals sel;
  sel.paper_connection = h5;
  const auto paper = world.metadata.fetch_paper_metadata(arxiv("2301.00005"));

  const auto with_title = assemble_message("It builds on " + title + " and " + title + ".", sel, paper, view);
  auto links = link_tokens(with_title.body);
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0].url, permalink(42));
  EXPECT_EQ(links[0].title, title);

  const auto without_title = assemble_message("It builds on earlier work.", sel, paper, view);
  links = link_tokens(without_title.body);
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0].url, permalink(42));
}

TEST(ValidateMessage, BoldLengthAndCompliance) {
  MessageConstraints c;
  BotMessage four_bold;
  four_bold.body = "*a* b *c* d *e* f *g*";
  const auto r1 = validate_message(four_bold, c);
  EXPECT_FALSE(r1.ok);
  EXPECT_TRUE(r1.has("bold_count"));

  BotMessage long_msg;
  long_msg.body = std::string(400, 'x');
  EXPECT_TRUE(validate_message(long_msg, c).has("length"));

  BotMessage fine;
  fine.body = "This paper is about *clear gains* in reading.";
  const auto r3 = validate_message(fine, c);
  EXPECT_TRUE(r3.ok);
  EXPECT_TRUE(r3.violations.empty());
}

TEST(ValidateMessage, MentionAndStringRules) {
  MessageConstraints c;
  c.members = {"ana", "bo"};
  c.cooling_members = {"bo"};
  c.required_strings = {"Deep Reading"};
  c.forbidden_bold_strings = {"Deep Reading"};
  c.expected_links = 1;
  BotMessage m;
  m.body = "<@ana> <@ana> <@bo> <@zed> *Deep Reading* and *<@ana>*";
  const auto r = validate_message(m, c);
  for (const char* rule : {"mention_repeat", "mention_cooldown", "mention_unknown", "forbidden_bold", "link_count"})
    EXPECT_TRUE(r.has(rule)) << rule;
  EXPECT_FALSE(r.has("required_string"));
  m.body = "nothing here";
  EXPECT_TRUE(validate_message(m, c).has("required_string"));
}

TEST(ValidateMessage, LengthCountsDisplayedText) {
  MessageConstraints c;
  c.max_length = 10;
  BotMessage m;
  m.body = "<https://example.org/very/long/path|short> *x*";
  EXPECT_EQ(display_text(m.body), "short x");
  EXPECT_TRUE(validate_message(m, c).ok);
}

TEST(Tldr, LeadingSentencesWithinLimit) {
  PaperRecord p = record("2301.00001", "Title", {}, std::nullopt, {});
  p.abstract = "First sentence here. Second one follows. Third is long enough to push it over.";
  EXPECT_EQ(tldr(p, 45), "First sentence here. Second one follows.");
  EXPECT_EQ(tldr(p, 1000), *p.abstract);
  p.abstract.reset();
  EXPECT_EQ(tldr(p), "Title");
}

TEST(RenderCondition, FourConditionsHaveTheirShape) {
  const Case* c = find_case([](const Case& c) { return c.selected.size() == 3; });
  ASSERT_TRUE(c);
  MockCompletionClient llm;
  const auto view = scene().view();
  const auto c1 = render_condition(c->paper, c->selected, Condition::c1_tldr, view, llm, settings());
  const auto c2 = render_condition(c->paper, c->selected, Condition::c2_template, view, llm, settings());
  const auto c3 = render_condition(c->paper, c->selected, Condition::c3_template_tldr, view, llm, settings());
  const auto c4 = render_condition(c->paper, c->selected, Condition::c4_llm_synthesis, view, llm, settings());

  EXPECT_EQ(c1.body, "TLDR: " + tldr(c->paper));
  EXPECT_TRUE(c1.provenance.empty());
  for (const auto& line : template_sentences(c->selected, c->paper, view)) {
    EXPECT_EQ(c1.body.find(line), std::string::npos);
  }
  EXPECT_EQ(c2.body.find("TLDR"), std::string::npos);
  EXPECT_EQ(c2.body.find(tldr(c->paper)), std::string::npos);
  EXPECT_EQ(c3.body, c2.body + "\n\n" + c1.body);
  EXPECT_EQ(c3.provenance, c2.provenance);
  EXPECT_EQ(c4, generate_message(c->paper, c->selected, view, llm, settings()));
  EXPECT_EQ(c4.condition, Condition::c4_llm_synthesis);
}

TEST(TemplateSentences, OneLinePerCategory) {
  for (const auto& c : cases()) {
    EXPECT_EQ(template_sentences(c.selected, c.paper, scene().view()).size(), c.selected.size());
  }
}

TEST(GenerateMessage, FailsWhenEveryAttemptViolates) {
  const Case* c = find_case([](const Case& c) { return c.selected.paper_connection.has_value(); });
  ASSERT_TRUE(c);
  CannedClient llm("*a* *b* *c* *d*");
  EXPECT_THROW(generate_message(c->paper, c->selected, scene().view(), llm, settings()), GenerationFailed);
}

// Every generated message over realistic selections, cooldown sets and seeds passes validation.
TEST(MessageProperty, GeneratedMessagesAreFormatSafe) {
  MockCompletionClient llm;
  std::mt19937_64 rng(5);
  std::vector<std::string> ids;
  for (const auto& [id, _] : scene().kb.members()) ids.push_back(id);
  std::size_t checked = 0;
  for (const auto& c : cases()) {
    std::set<std::string> cooling;
    for (const auto& id : ids) {
      if (rng() % 3 == 0) cooling.insert(id);
    }
    const auto view = scene().view(cooling);
    const auto s = settings(rng() % 1000);
    const auto msg = generate_message(c.paper, c.selected, view, llm, s);
    const auto chain = build_prompt_chain(c.paper, c.selected, s.limits, view.prompt_context(s.metadata));
    const auto report = validate_message(msg, MessageConstraints::for_chain(chain, c.selected, view));
    EXPECT_TRUE(report.ok) << msg.body;
    EXPECT_LE(bold_spans(msg.body).size(), 3u);
    EXPECT_LE(display_text(msg.body).size(), 386u);
    for (const auto& id : mention_tokens(msg.body)) EXPECT_FALSE(cooling.contains(id));
    EXPECT_EQ(msg.provenance, c.selected);
    ++checked;
  }
  EXPECT_GT(checked, 50u);
}

// Tokenizing an already tokenized body changes nothing.
TEST(MessageProperty, MentionTokenizationIsIdempotent) {
  MockCompletionClient llm;
  for (const auto& c : cases()) {
    const auto view = scene().view();
    const auto once = assemble_message(render_condition(c.paper, c.selected, Condition::c2_template, view, llm,
                                                        settings())
                                           .body,
                                       {}, c.paper, view);
    const auto twice = assemble_message(once.body, {}, c.paper, view);
    EXPECT_EQ(once.body, twice.body);
  }
}

// Stages present in the chain correspond one to one with the selected categories.
TEST(MessageProperty, ChainStagesMatchSelection) {
  for (const auto& c : cases()) {
    const auto chain = build_prompt_chain(c.paper, c.selected, {}, scene().view().prompt_context());
    EXPECT_EQ(chain.find(StageKind::metadata) != nullptr, c.selected.metadata.has_value());
    EXPECT_EQ(chain.find(StageKind::prior_paper) != nullptr, c.selected.paper_connection.has_value());
    if (!c.selected.member_connection) EXPECT_EQ(chain.find(StageKind::member), nullptr);
    EXPECT_EQ(chain.stages.back().kind, StageKind::synthesis);
  }
}

TEST(MessageProperty, TemplatePlusTldrIsConcatenation) {
  MockCompletionClient llm;
  for (const auto& c : cases()) {
    const auto view = scene().view();
    const auto c1 = render_condition(c.paper, c.selected, Condition::c1_tldr, view, llm, settings());
    const auto c2 = render_condition(c.paper, c.selected, Condition::c2_template, view, llm, settings());
    const auto c3 = render_condition(c.paper, c.selected, Condition::c3_template_tldr, view, llm, settings());
    EXPECT_EQ(c3.body, c2.body + std::string(kSectionSeparator) + c1.body);
  }
}

TEST(BotMessage, JsonRoundTrip) {
  const Case* c = find_case([](const Case& c) { return c.selected.size() == 3; });
  ASSERT_TRUE(c);
  MockCompletionClient llm;
  const auto msg = generate_message(c->paper, c->selected, scene().view(), llm, settings());
  EXPECT_EQ(bot_message_from_json(bot_message_to_json(msg)), msg);
  EXPECT_NE(msg.rendered_text().find(msg.metadata_block.title), std::string::npos);
}
