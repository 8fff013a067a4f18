#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialrag/paper_ref.hpp"

namespace socialrag {

struct Author {
  std::string author_id;
  std::string name;
  std::vector<std::string> affiliations;

  bool operator==(const Author&) const = default;
};

/// External metadata for one paper: bibliographic fields, citation edges and
/// an optional unit-norm embedding.
struct PaperRecord {
  PaperRef ref;
  std::string title;
  std::optional<std::string> abstract;
  std::vector<Author> authors;
  std::optional<std::string> venue;
  int year = 0;
  std::vector<PaperRef> citations;
  std::vector<PaperRef> cited_by;
  std::map<PaperRef, std::vector<std::string>> citation_contexts;
  std::optional<std::vector<double>> embedding;
  /// Set when the source had no abstract; such records carry no embedding.
  bool degraded = false;

  bool operator==(const PaperRecord&) const = default;

  bool cites(const PaperRef& other) const;
  bool is_cited_by(const PaperRef& other) const;
  std::vector<std::string> author_names() const;
};

/// Scales a vector to unit length; zero and already unit-length vectors are returned unchanged.
std::vector<double> unit_normalized(std::vector<double> v);

void to_json(nlohmann::json& j, const Author& a);
void from_json(const nlohmann::json& j, Author& a);

/// Fixture record layout: {ref, title, abstract, authors, venue, year, citations, embedding}.
/// `citations` entries are canonical ref strings or {"ref": ..., "contexts": [...]}.
nlohmann::ordered_json record_to_fixture_json(const PaperRecord& record);
PaperRecord record_from_fixture_json(const nlohmann::json& j);

/// Full record including cited_by and the degraded flag (used by the metadata cache).
nlohmann::ordered_json record_to_json(const PaperRecord& record);
PaperRecord record_from_json(const nlohmann::json& j);

/// Small self-contained corpus. Citation edges are made symmetric on load:
/// A cites B implies B is cited_by A.
class CorpusFixture {
 public:
  CorpusFixture() = default;
  explicit CorpusFixture(std::vector<PaperRecord> papers);

  static CorpusFixture load(const std::filesystem::path& path);
  static CorpusFixture parse(std::istream& in);
  void save(std::ostream& out) const;

  const std::vector<PaperRecord>& papers() const { return papers_; }
  const PaperRecord* find(const PaperRef& ref) const;
  std::size_t dimension() const { return dimension_; }

 private:
  void index();

  std::vector<PaperRecord> papers_;
  std::unordered_map<PaperRef, std::size_t> by_ref_;
  std::size_t dimension_ = 0;
};

}  // namespace socialrag
