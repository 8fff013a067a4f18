#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace socialrag {

enum class RefSource { arxiv, doi, semantic_id };

/// Canonical identity of a scholarly paper across mirrors and link styles.
///
/// Canonical strings are "arxiv:<id>" (version suffix stripped), "doi:<lowercased doi>"
/// and "s2:<lowercased paper hash or CorpusID:n>".
struct PaperRef {
  RefSource source = RefSource::arxiv;
  std::string external_id;

  auto operator<=>(const PaperRef&) const = default;
  bool operator==(const PaperRef&) const = default;

  std::string str() const;

  /// Parses a canonical string produced by str(). Throws InvalidInput.
  static PaperRef parse(std::string_view canonical);
};

PaperRef canonicalize(const PaperRef& ref);

/// Recognizes a single URL or bare identifier ("arXiv:2301.00001", "doi:10.1/x",
/// canonical strings). Returns nullopt for anything else.
std::optional<PaperRef> canonicalize_identifier(std::string_view text);

/// Every recognized paper reference in a chat message, canonical, deduplicated,
/// in order of first appearance. Unrecognized links are skipped.
std::vector<PaperRef> extract_item_refs(std::string_view text);

/// Public landing page for a canonical ref.
std::string canonical_url(const PaperRef& ref);

std::string_view to_string(RefSource source);

}  // namespace socialrag

template <>
struct std::hash<socialrag::PaperRef> {
  std::size_t operator()(const socialrag::PaperRef& ref) const noexcept {
    return std::hash<std::string>{}(ref.external_id) ^ (static_cast<std::size_t>(ref.source) << 1);
  }
};
