#include "socialrag/paper_record.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "socialrag/errors.hpp"

namespace socialrag {

using nlohmann::json;
using nlohmann::ordered_json;

bool PaperRecord::cites(const PaperRef& other) const {
  return std::find(citations.begin(), citations.end(), other) != citations.end();
}

bool PaperRecord::is_cited_by(const PaperRef& other) const {
  return std::find(cited_by.begin(), cited_by.end(), other) != cited_by.end();
}

std::vector<std::string> PaperRecord::author_names() const {
  std::vector<std::string> names;
  names.reserve(authors.size());
  for (const auto& a : authors) names.push_back(a.name);
  return names;
}

std::vector<double> unit_normalized(std::vector<double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  // Leaving near-unit vectors untouched keeps save/load round trips bit-exact.
  if (norm > 0.0 && std::abs(norm - 1.0) > 1e-12) {
    for (double& x : v) x /= norm;
  }
  return v;
}

void to_json(json& j, const Author& a) {
  j = json{{"author_id", a.author_id}, {"name", a.name}, {"affiliations", a.affiliations}};
}

void from_json(const json& j, Author& a) {
  a.author_id = j.value("author_id", std::string{});
  a.name = j.value("name", std::string{});
  a.affiliations = j.value("affiliations", std::vector<std::string>{});
}

namespace {

ordered_json author_json(const Author& a) {
  ordered_json j;
  j["author_id"] = a.author_id;
  j["name"] = a.name;
  j["affiliations"] = a.affiliations;
  return j;
}

template <typename J>
void put_optional_string(J& j, const char* key, const std::optional<std::string>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

std::vector<PaperRef> ref_list(const json& j, const char* key) {
  std::vector<PaperRef> refs;
  if (!j.contains(key)) return refs;
  for (const auto& r : j.at(key)) refs.push_back(PaperRef::parse(r.get<std::string>()));
  return refs;
}

}  // namespace

ordered_json record_to_fixture_json(const PaperRecord& r) {
  ordered_json j;
  j["ref"] = r.ref.str();
  j["title"] = r.title;
  put_optional_string(j, "abstract", r.abstract);
  j["authors"] = ordered_json::array();
  for (const auto& a : r.authors) j["authors"].push_back(author_json(a));
  put_optional_string(j, "venue", r.venue);
  j["year"] = r.year;
  j["citations"] = ordered_json::array();
  for (const auto& c : r.citations) {
    const auto ctx = r.citation_contexts.find(c);
    if (ctx == r.citation_contexts.end() || ctx->second.empty()) {
      j["citations"].push_back(c.str());
    } else {
      ordered_json entry;
      entry["ref"] = c.str();
      entry["contexts"] = ctx->second;
      j["citations"].push_back(entry);
    }
  }
  if (r.embedding) {
    j["embedding"] = *r.embedding;
  } else {
    j["embedding"] = nullptr;
  }
  return j;
}

PaperRecord record_from_fixture_json(const json& j) {
  PaperRecord r;
  try {
    r.ref = PaperRef::parse(j.at("ref").get<std::string>());
    r.title = j.at("title").get<std::string>();
    r.abstract = optional_string(j, "abstract");
    if (j.contains("authors")) r.authors = j.at("authors").get<std::vector<Author>>();
    r.venue = optional_string(j, "venue");
    r.year = j.value("year", 0);
    if (j.contains("citations")) {
      for (const auto& c : j.at("citations")) {
        if (c.is_string()) {
          r.citations.push_back(PaperRef::parse(c.get<std::string>()));
        } else {
          auto ref = PaperRef::parse(c.at("ref").get<std::string>());
          r.citations.push_back(ref);
          auto contexts = c.value("contexts", std::vector<std::string>{});
          if (!contexts.empty()) r.citation_contexts[ref] = std::move(contexts);
        }
      }
    }
    if (j.contains("embedding") && !j.at("embedding").is_null()) {
      r.embedding = unit_normalized(j.at("embedding").get<std::vector<double>>());
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad paper record: ") + e.what());
  }
  return r;
}

ordered_json record_to_json(const PaperRecord& r) {
  ordered_json j = record_to_fixture_json(r);
  j["cited_by"] = ordered_json::array();
  for (const auto& c : r.cited_by) j["cited_by"].push_back(c.str());
  j["degraded"] = r.degraded;
  return j;
}

PaperRecord record_from_json(const json& j) {
  PaperRecord r = record_from_fixture_json(j);
  r.cited_by = ref_list(j, "cited_by");
  r.degraded = j.value("degraded", false);
  return r;
}

CorpusFixture::CorpusFixture(std::vector<PaperRecord> papers) : papers_(std::move(papers)) { index(); }

void CorpusFixture::index() {
  by_ref_.clear();
  dimension_ = 0;
  for (std::size_t i = 0; i < papers_.size(); ++i) {
    auto& p = papers_[i];
    p.ref = canonicalize(p.ref);
    if (!by_ref_.emplace(p.ref, i).second) throw InvalidInput("duplicate corpus ref: " + p.ref.str());
    if (p.embedding) {
      if (dimension_ == 0) dimension_ = p.embedding->size();
      if (p.embedding->size() != dimension_) throw InvalidInput("embedding dimension mismatch for " + p.ref.str());
    }
  }
  // Citation edges are symmetric inside the corpus.
  for (auto& p : papers_) p.cited_by.clear();
  for (const auto& p : papers_) {
    for (const auto& cited : p.citations) {
      if (auto it = by_ref_.find(cited); it != by_ref_.end()) papers_[it->second].cited_by.push_back(p.ref);
    }
  }
}

CorpusFixture CorpusFixture::parse(std::istream& in) {
  std::vector<PaperRecord> papers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      papers.push_back(record_from_fixture_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw InvalidInput("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return CorpusFixture(std::move(papers));
}

CorpusFixture CorpusFixture::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open corpus " + path.string());
  return parse(in);
}

void CorpusFixture::save(std::ostream& out) const {
  for (const auto& p : papers_) out << record_to_fixture_json(p).dump() << '\n';
}

const PaperRecord* CorpusFixture::find(const PaperRef& ref) const {
  const auto it = by_ref_.find(ref);
  return it == by_ref_.end() ? nullptr : &papers_[it->second];
}

}  // namespace socialrag
