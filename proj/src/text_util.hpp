#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace socialrag::text {

/// Splits on sentence-final punctuation followed by whitespace, and on newlines.
/// Offsets inside any of `protect` occurrences are never split points.
std::vector<std::string> split_sentences(std::string_view s, const std::vector<std::string>& protect = {});

/// Cuts at the last word boundary at or before `limit` bytes and trims trailing
/// punctuation and spaces. Never cuts inside a word.
std::string truncate_words(std::string_view s, std::size_t limit);

std::string trim(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
void replace_all(std::string& s, std::string_view from, std::string_view to);
bool is_handle_char(char c);

}  // namespace socialrag::text
