#include "socialrag/paper_ref.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <unordered_set>

#include "socialrag/errors.hpp"

namespace socialrag {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && lower(s.substr(0, prefix.size())) == prefix;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

// Drops trailing sentence punctuation and unbalanced closing brackets picked up from chat text.
std::string_view trim_trailing_punctuation(std::string_view s) {
  while (!s.empty()) {
    const char c = s.back();
    if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == '\'' || c == '"' ||
        c == '*' || c == '_') {
      s.remove_suffix(1);
      continue;
    }
    if (c == ')' || c == ']' || c == '}') {
      const char open = c == ')' ? '(' : c == ']' ? '[' : '{';
      if (std::count(s.begin(), s.end(), open) < std::count(s.begin(), s.end(), c)) {
        s.remove_suffix(1);
        continue;
      }
    }
    break;
  }
  return s;
}

const std::regex& arxiv_new_style() {
  static const std::regex re(R"(^(\d{4}\.\d{4,5})(v\d+)?$)");
  return re;
}

const std::regex& arxiv_old_style() {
  static const std::regex re(R"(^([A-Za-z\-]+(?:\.[A-Za-z]{2})?/\d{7})(v\d+)?$)");
  return re;
}

std::optional<std::string> arxiv_id(std::string_view raw) {
  std::string s(raw);
  while (!s.empty() && s.back() == '/') s.pop_back();
  if (s.size() > 4 && lower(s.substr(s.size() - 4)) == ".pdf") s.resize(s.size() - 4);
  std::smatch m;
  if (std::regex_match(s, m, arxiv_new_style())) return m[1].str();
  if (std::regex_match(s, m, arxiv_old_style())) return m[1].str();
  return std::nullopt;
}

std::optional<std::string> doi_id(std::string_view raw) {
  std::string s = lower(percent_decode(raw));
  while (!s.empty() && s.back() == '/') s.pop_back();
  static const std::regex re(R"(^10\.\d{4,9}/\S+$)");
  if (!std::regex_match(s, re)) return std::nullopt;
  return s;
}

std::optional<std::string> semantic_id(std::string_view raw) {
  static const std::regex hash(R"(^[0-9a-fA-F]{40}$)");
  static const std::regex corpus(R"(^corpusid:(\d+)$)", std::regex::icase);
  const std::string s(raw);
  std::smatch m;
  if (std::regex_match(s, hash)) return lower(s);
  if (std::regex_match(s, m, corpus)) return "CorpusID:" + m[1].str();
  return std::nullopt;
}

struct UrlParts {
  std::string host;
  std::string path;
};

std::optional<UrlParts> split_url(std::string_view url) {
  const auto scheme = url.find("://");
  if (scheme == std::string_view::npos) return std::nullopt;
  std::string_view rest = url.substr(scheme + 3);
  const auto slash = rest.find('/');
  UrlParts parts;
  parts.host = lower(rest.substr(0, slash));
  if (const auto colon = parts.host.find(':'); colon != std::string::npos) parts.host.resize(colon);
  if (parts.host.starts_with("www.")) parts.host.erase(0, 4);
  if (slash == std::string_view::npos) return parts;
  std::string_view path = rest.substr(slash);
  path = path.substr(0, path.find_first_of("?#"));
  parts.path = std::string(path);
  return parts;
}

std::optional<PaperRef> from_url(std::string_view url) {
  const auto parts = split_url(url);
  if (!parts) return std::nullopt;
  const std::string& host = parts->host;
  const std::string& path = parts->path;

  if (host == "arxiv.org" || host == "export.arxiv.org") {
    static const std::regex re(R"(^/(?:abs|pdf|html|format)/(.+)$)");
    std::smatch m;
    if (std::regex_match(path, m, re)) {
      if (auto id = arxiv_id(m[1].str())) return PaperRef{RefSource::arxiv, *id};
    }
    return std::nullopt;
  }
  if (host == "doi.org" || host == "dx.doi.org") {
    if (path.size() > 1) {
      if (auto id = doi_id(std::string_view(path).substr(1))) return PaperRef{RefSource::doi, *id};
    }
    return std::nullopt;
  }
  if (host == "semanticscholar.org" || host == "api.semanticscholar.org") {
    static const std::regex paper(R"(^/paper/(?:[^/]+/)?([0-9a-fA-F]{40})/?$)");
    static const std::regex corpus(R"(^/(CorpusID:\d+)/?$)", std::regex::icase);
    std::smatch m;
    if (std::regex_match(path, m, paper) || std::regex_match(path, m, corpus)) {
      if (auto id = semantic_id(m[1].str())) return PaperRef{RefSource::semantic_id, *id};
    }
    return std::nullopt;
  }
  if (host == "link.springer.com") {
    static const std::regex re(R"(^/(?:article|chapter|book)/(10\..+)$)");
    std::smatch m;
    if (std::regex_match(path, m, re)) {
      if (auto id = doi_id(m[1].str())) return PaperRef{RefSource::doi, *id};
    }
    return std::nullopt;
  }
  if (host == "nature.com") {
    static const std::regex re(R"(^/articles/([A-Za-z0-9.\-]+)/?$)");
    std::smatch m;
    if (std::regex_match(path, m, re)) {
      if (auto id = doi_id("10.1038/" + m[1].str())) return PaperRef{RefSource::doi, *id};
    }
    return std::nullopt;
  }
  // Publisher digital libraries (ACM DL, Wiley, SAGE, T&F, ...) share the /doi/ route.
  static const std::regex publisher(R"(^/doi/(?:(?:abs|full|pdf|epdf|fullHtml|book|reader)/)?(10\.\d{4,9}/.+)$)");
  std::smatch m;
  if (std::regex_match(path, m, publisher)) {
    if (auto id = doi_id(m[1].str())) return PaperRef{RefSource::doi, *id};
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(RefSource source) {
  switch (source) {
    case RefSource::arxiv:
      return "arxiv";
    case RefSource::doi:
      return "doi";
    case RefSource::semantic_id:
      return "s2";
  }
  return "?";
}

std::string PaperRef::str() const { return std::string(to_string(source)) + ":" + external_id; }

PaperRef PaperRef::parse(std::string_view canonical) {
  const auto colon = canonical.find(':');
  if (colon == std::string_view::npos) throw InvalidInput("not a canonical paper ref: " + std::string(canonical));
  const std::string prefix = lower(canonical.substr(0, colon));
  const std::string_view id = canonical.substr(colon + 1);
  PaperRef ref;
  if (prefix == "arxiv") {
    ref.source = RefSource::arxiv;
  } else if (prefix == "doi") {
    ref.source = RefSource::doi;
  } else if (prefix == "s2") {
    ref.source = RefSource::semantic_id;
  } else {
    throw InvalidInput("unknown paper ref source: " + std::string(canonical));
  }
  ref.external_id = std::string(id);
  if (ref.external_id.empty()) throw InvalidInput("empty paper ref id: " + std::string(canonical));
  return canonicalize(ref);
}

PaperRef canonicalize(const PaperRef& ref) {
  PaperRef out = ref;
  switch (ref.source) {
    case RefSource::arxiv:
      if (auto id = arxiv_id(ref.external_id)) out.external_id = *id;
      break;
    case RefSource::doi:
      if (istarts_with(out.external_id, "https://doi.org/")) out.external_id.erase(0, 16);
      if (auto id = doi_id(out.external_id)) {
        out.external_id = *id;
      } else {
        out.external_id = lower(out.external_id);
      }
      break;
    case RefSource::semantic_id:
      if (auto id = semantic_id(ref.external_id)) out.external_id = *id;
      break;
  }
  return out;
}

std::optional<PaperRef> canonicalize_identifier(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (istarts_with(text, "http://") || istarts_with(text, "https://")) return from_url(text);

  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const std::string prefix = lower(text.substr(0, colon));
  std::string_view id = text.substr(colon + 1);
  while (!id.empty() && id.front() == ' ') id.remove_prefix(1);
  if (prefix == "arxiv") {
    if (auto a = arxiv_id(id)) return PaperRef{RefSource::arxiv, *a};
  } else if (prefix == "doi") {
    if (auto d = doi_id(id)) return PaperRef{RefSource::doi, *d};
  } else if (prefix == "s2") {
    if (auto s = semantic_id(id)) return PaperRef{RefSource::semantic_id, *s};
  }
  return std::nullopt;
}

std::vector<PaperRef> extract_item_refs(std::string_view text) {
  static const std::regex candidates(R"((https?://[^\s<>|"`]+)|(\b(?:arxiv|doi|s2):\s?(?!https?:)[^\s<>|"`,;]+))",
                                     std::regex::icase);
  std::vector<PaperRef> refs;
  std::unordered_set<PaperRef> seen;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), candidates); it != std::sregex_iterator(); ++it) {
    const std::string match = it->str();
    auto ref = canonicalize_identifier(trim_trailing_punctuation(match));
    if (ref && seen.insert(*ref).second) refs.push_back(std::move(*ref));
  }
  return refs;
}

std::string canonical_url(const PaperRef& ref) {
  switch (ref.source) {
    case RefSource::arxiv:
      return "https://arxiv.org/abs/" + ref.external_id;
    case RefSource::doi:
      return "https://doi.org/" + ref.external_id;
    case RefSource::semantic_id:
      if (ref.external_id.starts_with("CorpusID:")) return "https://api.semanticscholar.org/" + ref.external_id;
      return "https://www.semanticscholar.org/paper/" + ref.external_id;
  }
  return {};
}

}  // namespace socialrag
