#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "socialrag/agent.hpp"
#include "socialrag/knowledge_base.hpp"
#include "socialrag/paper_record.hpp"

namespace socialrag {

/// A scripted channel event. Seqs are transcript-local (1, 2, ... without gaps); replay
/// re-sequences them around the agent's own posts. A reaction or reply may instead
/// target the n-th bot post of the run (`target_bot_post`).
struct TranscriptEvent {
  SocialEvent event;
  std::optional<std::size_t> target_bot_post;
};

struct Transcript {
  ChannelConfig config;
  std::shared_ptr<const CorpusFixture> corpus;
  Timestamp start{};
  Timestamp end{};
  Duration tick = std::chrono::hours(1);
  std::vector<TranscriptEvent> events;

  /// Throws ValidationError on broken seq ordering, dangling targets, refs missing from
  /// the corpus, or a bad config or time range.
  void validate() const;
};

/// JSON document: {config, corpus (path relative to the file, or inline records),
/// start, end, tick_seconds, events}.
Transcript load_transcript(const std::filesystem::path& path);
nlohmann::ordered_json transcript_to_json(const Transcript& t);
Transcript transcript_from_json(const nlohmann::json& j, std::shared_ptr<const CorpusFixture> corpus);

struct SeriesPoint {
  long day = 0;
  std::size_t human_recs = 0;
  std::size_t bot_recs = 0;
  std::size_t emoji_reactions = 0;
  std::size_t comments = 0;
  std::size_t emoji_reactions_on_bot_posts = 0;
  std::size_t comments_on_bot_posts = 0;

  bool operator==(const SeriesPoint&) const = default;
};

/// Per-day cumulative counts; day 0 is the day of the first bot recommendation
/// (the first event's day when the agent never posted).
struct CumulativeSeries {
  std::string channel;
  std::vector<SeriesPoint> points;

  bool operator==(const CumulativeSeries&) const = default;

  SeriesPoint final() const;
  /// Cumulative values at the end of day -1 (before the first recommendation).
  SeriesPoint before_first_recommendation() const;
};

CumulativeSeries engagement_report(const KnowledgeBase& kb);

enum class ReportFormat { csv, json_lines };
/// "csv", "json", "json-lines", "jsonl". Throws InvalidInput otherwise.
ReportFormat report_format_from_string(std::string_view s);

void export_report(const CumulativeSeries& series, ReportFormat format, std::ostream& out);
void export_report(const CumulativeSeries& series, ReportFormat format, const std::filesystem::path& path);
std::string export_report(const CumulativeSeries& series, ReportFormat format);
CumulativeSeries parse_report_json_lines(std::istream& in);

struct ReplayResult {
  KnowledgeBase kb;
  std::vector<SocialEvent> bot_posts;
  std::vector<CycleResult> cycles;
  CumulativeSeries series;
};

/// Advances virtual time over the transcript in tick steps, ingesting scripted events
/// due at each tick and letting the scheduler post. Mock clients only; deterministic
/// for a given (transcript, seed).
ReplayResult replay(const Transcript& transcript, std::uint64_t seed);

struct SyntheticCorpusOptions {
  std::size_t papers = 80;
  std::size_t dimension = 8;
  std::size_t authors = 30;
  std::vector<std::string> venues{"CHI", "CSCW", "UIST", "NeurIPS", "ACL"};
  std::vector<std::string> affiliations{"KAIST", "University of Washington", "Allen Institute for AI",
                                        "Carnegie Mellon University"};
};

CorpusFixture synthetic_corpus(const SyntheticCorpusOptions& options, std::uint64_t seed);

struct SyntheticTranscriptOptions {
  std::size_t events = 500;
  std::size_t members = 8;
  long days = 60;
  Frequency frequency = Frequency::every_other_day;
  /// Fraction of reactions/replies aimed at bot posts once any exist.
  double bot_feedback_share = 0.3;
};

/// Randomized but seed-deterministic channel activity over a synthetic corpus.
Transcript synthetic_transcript(std::shared_ptr<const CorpusFixture> corpus, const SyntheticTranscriptOptions& options,
                                std::uint64_t seed);

}  // namespace socialrag
