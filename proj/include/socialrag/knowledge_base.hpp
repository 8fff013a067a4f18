#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "socialrag/channel_config.hpp"
#include "socialrag/clients.hpp"
#include "socialrag/event.hpp"
#include "socialrag/paper_record.hpp"

namespace socialrag {

struct MentionPost {
  Seq seq = 0;
  std::string actor;
  Timestamp ts{};
  bool by_agent = false;
  bool operator==(const MentionPost&) const = default;
};

struct ReactionRecord {
  Seq seq = 0;
  Seq target_seq = 0;
  std::string emoji_name;
  Sentiment sentiment = Sentiment::neutral;
  std::string actor;
  Timestamp ts{};
  bool operator==(const ReactionRecord&) const = default;
};

struct CommentRecord {
  Seq seq = 0;
  Seq parent_seq = 0;
  std::string actor;
  Timestamp ts{};
  std::string text;
  bool operator==(const CommentRecord&) const = default;
};

/// A paper joined with every post, reaction, comment and member that touched it.
struct IndexedPaper {
  PaperRef ref;
  std::optional<PaperRecord> record;
  std::vector<MentionPost> mention_posts;
  std::vector<ReactionRecord> reactions;
  std::vector<CommentRecord> comments;
  /// Human actors of mentions, positive reactions and comments.
  std::set<std::string> interested_members;

  bool operator==(const IndexedPaper&) const = default;

  /// Seq of the earliest post mentioning the paper (the thread a citation links to).
  Seq first_mention_seq() const;
  const MentionPost* first_human_mention() const;
};

struct IndexUpdate {
  std::vector<PaperRef> created;
  std::vector<PaperRef> updated;

  bool operator==(const IndexUpdate&) const = default;
  bool empty() const { return created.empty() && updated.empty(); }
};

struct EngagementSummary {
  PaperRef paper;
  std::size_t mentions = 0;
  std::size_t positive_reactions = 0;
  std::size_t negative_reactions = 0;
  std::size_t neutral_reactions = 0;
  std::size_t comments = 0;
  std::optional<Timestamp> last_activity_ts;

  bool operator==(const EngagementSummary&) const = default;
};

/// Event-sourced social knowledge base for one channel. The state is a pure function
/// of the ordered event log (plus the metadata source used to enrich new papers).
class KnowledgeBase {
 public:
  explicit KnowledgeBase(std::string channel, MetadataClient* metadata = nullptr);

  static KnowledgeBase rebuild(std::string channel, std::span<const SocialEvent> log,
                               MetadataClient* metadata = nullptr);

  /// Appends the event and indexes it. Throws IntegrityError when the seq is not
  /// last_seq()+1, the channel differs, or a reaction/reply target does not exist.
  IndexUpdate ingest_event(const SocialEvent& event);

  const std::string& channel() const { return channel_; }
  const std::vector<SocialEvent>& log() const { return log_; }
  const SocialEvent* event(Seq seq) const;
  Seq last_seq() const { return log_.empty() ? 0 : log_.back().seq; }
  std::optional<Timestamp> last_ts() const;

  const std::map<PaperRef, IndexedPaper>& papers() const { return papers_; }
  const IndexedPaper* find(const PaperRef& ref) const;
  bool has_paper(const PaperRef& ref) const { return find(ref) != nullptr; }
  /// Papers mentioned by the post at seq (empty for non-post events).
  std::vector<PaperRef> papers_at(Seq seq) const;

  const ChannelConfig& config() const { return config_; }
  /// Roster from the latest config event plus every human actor seen so far.
  const std::map<std::string, Member>& members() const { return members_; }
  bool is_member(const std::string& id) const { return members_.contains(id); }
  bool is_agent(const std::string& actor) const;

  std::vector<Seq> bot_post_seqs() const { return bot_posts_; }
  std::optional<Timestamp> last_bot_post_ts() const;
  /// Papers the agent has posted, in posting order.
  std::vector<PaperRef> bot_recommended() const;

  /// Counts restricted to events with now - window <= ts <= now, aggregated over all
  /// posts mentioning the paper. No window means the whole log; `now` defaults to the
  /// newest event. Throws NotFound for papers not indexed in this channel.
  EngagementSummary engagement_summary(const PaperRef& paper, std::optional<Duration> window = std::nullopt,
                                       std::optional<Timestamp> now = std::nullopt) const;

  /// Papers mentioned within the window that have >= 1 positive reaction or >= 1
  /// comment there, newest activity first (ties by ref).
  std::vector<PaperRef> candidate_seeds(Duration window, std::optional<Timestamp> now = std::nullopt) const;

  /// Fills missing records from the metadata source (e.g. after a transient failure).
  void refresh_records();
  /// Replaces the metadata source; nullptr detaches it (new papers then stay record-less).
  void set_metadata_source(MetadataClient* metadata) { metadata_ = metadata; }

  bool operator==(const KnowledgeBase& other) const;

 private:
  void attach_record(IndexedPaper& paper);
  void apply_config(const ChannelConfig& config);
  void note_member(const std::string& actor);

  std::string channel_;
  MetadataClient* metadata_ = nullptr;
  ChannelConfig config_;
  EmojiLexicon lexicon_;
  std::vector<SocialEvent> log_;
  std::map<PaperRef, IndexedPaper> papers_;
  std::map<Seq, std::vector<PaperRef>> post_refs_;
  std::map<std::string, Member> members_;
  std::vector<Seq> bot_posts_;
  std::set<std::string> agents_;
};

}  // namespace socialrag
