#include "socialrag/knowledge_base.hpp"

#include <algorithm>

#include "socialrag/errors.hpp"

namespace socialrag {

Seq IndexedPaper::first_mention_seq() const { return mention_posts.empty() ? 0 : mention_posts.front().seq; }

const MentionPost* IndexedPaper::first_human_mention() const {
  for (const auto& m : mention_posts) {
    if (!m.by_agent) return &m;
  }
  return nullptr;
}

KnowledgeBase::KnowledgeBase(std::string channel, MetadataClient* metadata)
    : channel_(std::move(channel)), metadata_(metadata), lexicon_(EmojiLexicon::default_lexicon()) {
  config_.channel = channel_;
}

KnowledgeBase KnowledgeBase::rebuild(std::string channel, std::span<const SocialEvent> log,
                                     MetadataClient* metadata) {
  KnowledgeBase kb(std::move(channel), metadata);
  for (const auto& e : log) kb.ingest_event(e);
  return kb;
}

const SocialEvent* KnowledgeBase::event(Seq seq) const {
  if (seq == 0 || seq > log_.size()) return nullptr;
  return &log_[seq - 1];
}

std::optional<Timestamp> KnowledgeBase::last_ts() const {
  if (log_.empty()) return std::nullopt;
  return log_.back().ts;
}

const IndexedPaper* KnowledgeBase::find(const PaperRef& ref) const {
  const auto it = papers_.find(ref);
  return it == papers_.end() ? nullptr : &it->second;
}

std::vector<PaperRef> KnowledgeBase::papers_at(Seq seq) const {
  const auto it = post_refs_.find(seq);
  return it == post_refs_.end() ? std::vector<PaperRef>{} : it->second;
}

bool KnowledgeBase::is_agent(const std::string& actor) const {
  return actor == config_.agent_id || agents_.contains(actor);
}

std::optional<Timestamp> KnowledgeBase::last_bot_post_ts() const {
  if (bot_posts_.empty()) return std::nullopt;
  return event(bot_posts_.back())->ts;
}

std::vector<PaperRef> KnowledgeBase::bot_recommended() const {
  std::vector<PaperRef> out;
  for (Seq s : bot_posts_) out.push_back(event(s)->as<BotPostPayload>()->message.paper);
  return out;
}

void KnowledgeBase::attach_record(IndexedPaper& paper) {
  if (!metadata_ || paper.record) return;
  try {
    paper.record = metadata_->fetch_paper_metadata(paper.ref);
  } catch (const NotFound&) {
  } catch (const RetryableError&) {
  }
}

void KnowledgeBase::refresh_records() {
  for (auto& [_, p] : papers_) attach_record(p);
}

void KnowledgeBase::apply_config(const ChannelConfig& config) {
  config_ = config;
  config_.channel = channel_;
  lexicon_ = config_.lexicon();
  for (const auto& m : config_.members) members_[m.member_id] = m;
}

void KnowledgeBase::note_member(const std::string& actor) {
  if (is_agent(actor) || members_.contains(actor)) return;
  members_[actor] = Member{actor, actor, std::nullopt, std::nullopt};
}

IndexUpdate KnowledgeBase::ingest_event(const SocialEvent& e) {
  if (e.channel != channel_) throw IntegrityError("event for channel '" + e.channel + "' ingested into '" + channel_ + "'");
  if (e.seq != last_seq() + 1) {
    throw IntegrityError("non-monotone seq " + std::to_string(e.seq) + " after " + std::to_string(last_seq()) +
                         " in channel " + channel_);
  }

  // Validate fully before touching state.
  std::vector<PaperRef> refs;
  Seq target = 0;
  Sentiment sentiment = Sentiment::neutral;
  switch (e.kind()) {
    case EventKind::message:
      refs = extract_item_refs(e.as<MessagePayload>()->text);
      break;
    case EventKind::bot_post:
      refs = {canonicalize(e.as<BotPostPayload>()->message.paper)};
      break;
    case EventKind::reaction: {
      const auto* r = e.as<ReactionPayload>();
      target = r->target_seq;
      sentiment = lexicon_.classify(r->emoji_name);
      break;
    }
    case EventKind::reply:
      target = e.as<ReplyPayload>()->parent_seq;
      break;
    case EventKind::config:
      e.as<ConfigPayload>()->config.validate();
      break;
  }
  if ((e.kind() == EventKind::reaction || e.kind() == EventKind::reply) && (target == 0 || target >= e.seq)) {
    throw IntegrityError("event " + std::to_string(e.seq) + " references missing seq " + std::to_string(target));
  }

  log_.push_back(e);
  IndexUpdate update;
  auto touch = [&](const PaperRef& ref) {
    auto& list = std::find(update.created.begin(), update.created.end(), ref) != update.created.end() ? update.created
                                                                                                        : update.updated;
    if (std::find(list.begin(), list.end(), ref) == list.end()) list.push_back(ref);
  };

  switch (e.kind()) {
    case EventKind::config:
      apply_config(e.as<ConfigPayload>()->config);
      break;
    case EventKind::bot_post:
      agents_.insert(e.actor);
      bot_posts_.push_back(e.seq);
      [[fallthrough]];
    case EventKind::message: {
      const bool by_agent = is_agent(e.actor);
      if (!by_agent) note_member(e.actor);
      if (!refs.empty()) post_refs_[e.seq] = refs;
      for (const auto& ref : refs) {
        auto [it, inserted] = papers_.try_emplace(ref);
        IndexedPaper& paper = it->second;
        if (inserted) {
          paper.ref = ref;
          attach_record(paper);
          update.created.push_back(ref);
        } else {
          touch(ref);
        }
        paper.mention_posts.push_back({e.seq, e.actor, e.ts, by_agent});
        if (!by_agent) paper.interested_members.insert(e.actor);
      }
      break;
    }
    case EventKind::reaction: {
      const auto* r = e.as<ReactionPayload>();
      const bool by_agent = is_agent(e.actor);
      if (!by_agent) note_member(e.actor);
      for (const auto& ref : papers_at(target)) {
        IndexedPaper& paper = papers_.at(ref);
        paper.reactions.push_back({e.seq, target, r->emoji_name, sentiment, e.actor, e.ts});
        if (sentiment == Sentiment::positive && !by_agent) paper.interested_members.insert(e.actor);
        touch(ref);
      }
      break;
    }
    case EventKind::reply: {
      const auto* r = e.as<ReplyPayload>();
      const bool by_agent = is_agent(e.actor);
      if (!by_agent) note_member(e.actor);
      for (const auto& ref : papers_at(target)) {
        IndexedPaper& paper = papers_.at(ref);
        paper.comments.push_back({e.seq, target, e.actor, e.ts, r->text});
        if (!by_agent) paper.interested_members.insert(e.actor);
        touch(ref);
      }
      break;
    }
  }
  return update;
}

EngagementSummary KnowledgeBase::engagement_summary(const PaperRef& ref, std::optional<Duration> window,
                                                    std::optional<Timestamp> now) const {
  const IndexedPaper* paper = find(ref);
  if (!paper) throw NotFound("paper " + ref.str() + " is not indexed in channel " + channel_);
  const Timestamp hi = now ? *now : last_ts().value_or(Timestamp::max());
  const Timestamp lo = window ? hi - *window : Timestamp::min();
  auto inside = [&](Timestamp ts) { return ts >= lo && ts <= hi; };

  EngagementSummary s;
  s.paper = ref;
  auto seen = [&](Timestamp ts) {
    if (!s.last_activity_ts || ts > *s.last_activity_ts) s.last_activity_ts = ts;
  };
  for (const auto& m : paper->mention_posts) {
    if (!inside(m.ts)) continue;
    ++s.mentions;
    seen(m.ts);
  }
  for (const auto& r : paper->reactions) {
    if (!inside(r.ts)) continue;
    switch (r.sentiment) {
      case Sentiment::positive:
        ++s.positive_reactions;
        break;
      case Sentiment::negative:
        ++s.negative_reactions;
        break;
      case Sentiment::neutral:
        ++s.neutral_reactions;
        break;
    }
    seen(r.ts);
  }
  for (const auto& c : paper->comments) {
    if (!inside(c.ts)) continue;
    ++s.comments;
    seen(c.ts);
  }
  return s;
}

std::vector<PaperRef> KnowledgeBase::candidate_seeds(Duration window, std::optional<Timestamp> now) const {
  std::vector<EngagementSummary> picked;
  for (const auto& [ref, _] : papers_) {
    auto s = engagement_summary(ref, window, now);
    if (s.mentions >= 1 && (s.positive_reactions >= 1 || s.comments >= 1)) picked.push_back(std::move(s));
  }
  std::sort(picked.begin(), picked.end(), [](const EngagementSummary& a, const EngagementSummary& b) {
    if (a.last_activity_ts != b.last_activity_ts) return a.last_activity_ts > b.last_activity_ts;
    return a.paper < b.paper;
  });
  std::vector<PaperRef> out;
  out.reserve(picked.size());
  for (const auto& s : picked) out.push_back(s.paper);
  return out;
}

bool KnowledgeBase::operator==(const KnowledgeBase& o) const {
  return channel_ == o.channel_ && config_ == o.config_ && log_ == o.log_ && papers_ == o.papers_ &&
         post_refs_ == o.post_refs_ && members_ == o.members_ && bot_posts_ == o.bot_posts_ && agents_ == o.agents_;
}

}  // namespace socialrag
