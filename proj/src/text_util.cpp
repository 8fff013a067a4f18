#include "text_util.hpp"

#include <cctype>

namespace socialrag::text {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  if (from.empty()) return;
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

bool is_handle_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

std::vector<std::string> split_sentences(std::string_view s, const std::vector<std::string>& protect) {
  std::vector<bool> guarded(s.size(), false);
  for (const auto& p : protect) {
    if (p.empty()) continue;
    for (auto pos = s.find(p); pos != std::string_view::npos; pos = s.find(p, pos + 1)) {
      for (std::size_t i = pos; i < pos + p.size(); ++i) guarded[i] = true;
    }
  }
  std::vector<std::string> out;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    auto t = trim(s.substr(start, end - start));
    if (!t.empty()) out.push_back(std::move(t));
    start = end;
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\n') {
      flush(i);
      start = i + 1;
      continue;
    }
    if (guarded[i]) continue;
    if ((s[i] == '.' || s[i] == '!' || s[i] == '?') && i + 1 < s.size() && s[i + 1] == ' ') {
      // "e.g. x" and single-letter initials are not sentence ends.
      if (i >= 1 && std::isupper(static_cast<unsigned char>(s[i - 1])) &&
          (i < 2 || !std::isalpha(static_cast<unsigned char>(s[i - 2]))))
        continue;
      if (i >= 3 && (s.substr(i - 3, 4) == "e.g." || s.substr(i - 3, 4) == "i.e.")) continue;
      flush(i + 1);
    }
  }
  flush(s.size());
  return out;
}

std::string truncate_words(std::string_view s, std::size_t limit) {
  if (s.size() <= limit) return std::string(s);
  std::size_t cut = limit;
  while (cut > 0 && !std::isspace(static_cast<unsigned char>(s[cut]))) --cut;
  std::string out(s.substr(0, cut));
  while (!out.empty() && (std::isspace(static_cast<unsigned char>(out.back())) || out.back() == ',' ||
                          out.back() == ';' || out.back() == ':' || out.back() == '(' || out.back() == '-'))
    out.pop_back();
  return out;
}

}  // namespace socialrag::text
