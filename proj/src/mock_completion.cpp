#include <algorithm>
#include <cctype>
#include <random>
#include <regex>
#include <map>
#include <set>

#include "socialrag/clients.hpp"
#include "text_util.hpp"

namespace socialrag {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> lines_of(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '\n') {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string after(std::string_view line, std::string_view marker) {
  const auto pos = line.find(marker);
  if (pos == std::string_view::npos) return {};
  return text::trim(line.substr(pos + marker.size()));
}

std::string strip_final_period(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == ' ')) s.pop_back();
  return s;
}

std::string unbrace(std::string s) {
  s = text::trim(s);
  if (s.size() >= 2 && s.front() == '{' && s.back() == '}') s = s.substr(1, s.size() - 2);
  return s;
}

std::string scrub(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c != '*' && c != '<' && c != '>' && c != '{' && c != '}') out.push_back(c);
  }
  return out;
}

std::size_t number_word(const std::string& w) {
  static const std::map<std::string, std::size_t> words{{"zero", 0}, {"one", 1},  {"two", 2},
                                                        {"three", 3}, {"four", 4}, {"five", 5}};
  if (auto it = words.find(w); it != words.end()) return it->second;
  try {
    return static_cast<std::size_t>(std::stoul(w));
  } catch (const std::exception&) {
    return 3;
  }
}

const std::set<std::string>& stopwords() {
  static const std::set<std::string> s{"about", "above", "after", "again", "against", "among", "based", "being",
                                       "below", "between", "could", "their", "there", "these", "those", "through",
                                       "under", "using", "which", "while", "would", "paper", "papers", "study",
                                       "propose", "proposed", "present", "results", "show", "shows", "approach",
                                       "method", "methods", "other", "where", "within", "without", "across", "towards",
                                       "rethinking", "context"};
  return s;
}

std::vector<std::string> content_words(std::string_view s) {
  std::vector<std::string> out;
  std::string w;
  auto flush = [&] {
    if (w.size() >= 5 && !stopwords().contains(w) && std::find(out.begin(), out.end(), w) == out.end())
      out.push_back(w);
    w.clear();
  };
  for (char c : s) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::vector<std::string> shared_words(std::string_view a, std::string_view b) {
  const auto wa = content_words(a);
  const auto wb = content_words(b);
  std::vector<std::string> out;
  for (const auto& w : wa) {
    if (std::find(wb.begin(), wb.end(), w) != wb.end()) out.push_back(w);
  }
  return out;
}

// Keeps `lead` (if it fits) and then as many of `rest` as fit, in order.
std::string fit(const std::string& lead, const std::vector<std::string>& rest, std::size_t limit) {
  std::string out = lead;
  if (out.size() > limit) return text::truncate_words(out, limit);
  for (const auto& s : rest) {
    if (s.empty()) continue;
    const std::size_t extra = out.empty() ? s.size() : s.size() + 1;
    if (out.size() + extra > limit) continue;
    if (!out.empty()) out.push_back(' ');
    out += s;
  }
  return out;
}

// Fills a paragraph that must open with `start`, cutting words from the end if needed.
std::string paragraph(const std::string& start, const std::string& body, std::size_t limit) {
  std::string full = start.empty() ? body : (body.empty() ? start : start + " " + body);
  if (full.size() <= limit) return full;
  if (start.size() >= limit) return start;
  std::string cut = text::truncate_words(full, limit);
  if (cut.size() < start.size()) cut = start;
  if (!cut.empty() && cut.back() != '.' && cut.size() + 1 <= limit) cut.push_back('.');
  return cut;
}

// "<prefix><one of titles>: rest" -> rest. Titles may contain colons themselves.
std::string after_title(const std::string& line, const std::string& prefix, const std::vector<std::string>& titles) {
  for (const auto& t : titles) {
    if (line.starts_with(prefix + t + ": ")) return text::trim(line.substr(prefix.size() + t.size() + 2));
  }
  const auto pos = line.rfind(": ");
  return pos == std::string::npos ? std::string() : text::trim(line.substr(pos + 2));
}

// `@a: "text"; @b: "cc @c ..."` -> one sentence per comment, at most two.
std::vector<std::string> comment_sentences(const std::string& v) {
  static const std::regex item_re("([^;:\"]+): \"([^\"]*)\"");
  static const std::regex cc_re("^cc (@?[A-Za-z0-9_.-]+)");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(v.begin(), v.end(), item_re); it != std::sregex_iterator() && out.size() < 2;
       ++it) {
    const std::string who = text::trim((*it)[1].str());
    const std::string said = text::trim((*it)[2].str());
    std::smatch m;
    if (std::regex_search(said, m, cc_re)) {
      out.push_back(who + " pointed it out to " + m[1].str() + " as related to their work.");
    } else {
      out.push_back(who + " replied \"" + text::truncate_words(said, 80) + "\".");
    }
  }
  return out;
}

// "fire x2 (@a, @b); tada x1 (@c)" -> "It received 3 reactions."
std::string reaction_sentence(const std::string& v) {
  static const std::regex count_re(" x(\\d+)");
  std::size_t n = 0;
  for (auto it = std::sregex_iterator(v.begin(), v.end(), count_re); it != std::sregex_iterator(); ++it)
    n += std::stoul((*it)[1].str());
  if (n == 0) return {};
  return "It received " + std::to_string(n) + (n == 1 ? " reaction." : " reactions.");
}

struct Paragraph {
  std::string start;
  std::size_t limit = 0;
  std::vector<std::string> sentences;
};

std::string complete_stage(const std::string& prompt, std::size_t max_chars, std::mt19937_64& rng) {
  const auto lines = lines_of(prompt);
  static const std::regex start_re("must start with \"([^\"]*)\"");
  static const std::regex more_re("no more than (\\d+) characters");
  static const std::regex less_re("less than (\\d+) characters");

  std::vector<std::string> titles, abstracts;
  Paragraph first, second;
  first.limit = max_chars;
  bool has_second = false;
  bool may_answer_none = false;
  std::string congratulate;
  std::vector<std::string> directive_sentences;
  std::string reason;

  for (const auto& raw : lines) {
    const std::string line = text::trim(raw);
    const bool in_second = line.find("second paragraph") != std::string::npos;
    Paragraph& para = in_second ? second : first;
    if (in_second) has_second = true;
    std::smatch m;
    if (std::regex_search(line, m, start_re)) para.start = m[1].str();
    if (std::regex_search(line, m, more_re)) para.limit = std::min<std::size_t>(para.limit ? para.limit : max_chars, std::stoul(m[1].str()));
    if (std::regex_search(line, m, less_re) && std::stoul(m[1].str()) > 0)
      para.limit = std::min<std::size_t>(para.limit, std::stoul(m[1].str()) - 1);
    if (line.find("should answer \"NONE\"") != std::string::npos) may_answer_none = true;

    if (line.starts_with("Title: ")) titles.push_back(after(line, "Title: "));
    if (line.starts_with("Abstract: ")) abstracts.push_back(unbrace(after(line, "Abstract: ")));
    if (line.starts_with("* Abstract: ")) abstracts.push_back(unbrace(after(line, "* Abstract: ")));

    if (auto v = after(line, "Congratulate the following authors: "); !v.empty()) {
      congratulate = strip_final_period(v);
    } else if (auto v2 = after(line, "Mention the following authors: "); !v2.empty()) {
      directive_sentences.push_back(strip_final_period(v2) + " is among the authors.");
    } else if (auto v3 = after(line, "Mention the paper's conference or journal: "); !v3.empty()) {
      directive_sentences.push_back("It appears at " + strip_final_period(v3) + ".");
    } else if (line.starts_with("* Mention ")) {
      directive_sentences.push_back("The work comes from " + strip_final_period(after(line, "* Mention ")) + ".");
    }
    if (auto v = after(line, "the following shared authors of the two papers: "); !v.empty()) {
      reason = "they share authors " + strip_final_period(v) + ".";
    }
    if (line.find(" that cites ") != std::string::npos && line.find("The content from ") != std::string::npos) {
      const auto ctx_text = after(line, "that cites ");
      std::string quote;
      for (const auto& t : titles) {
        if (ctx_text.starts_with(t + ": ")) quote = strip_final_period(ctx_text.substr(t.size() + 2));
      }
      if (quote.empty()) {
        const auto colon = ctx_text.find(": ");
        if (colon != std::string::npos) quote = strip_final_period(ctx_text.substr(colon + 2));
      }
      const bool forward = !titles.empty() && line.find("The content from " + titles.front()) != std::string::npos;
      reason = forward ? "this paper cites it" : "it cites this paper";
      if (!quote.empty()) reason += ", noting \"" + text::truncate_words(quote, 80) + "\"";
      reason += ".";
    }
    if (in_second) {
      if (auto v = after(line, "must appreciate that "); !v.empty()) {
        const auto shared = v.find(" shared ");
        second.sentences.insert(second.sentences.begin(), "Thanks to " + v.substr(0, shared) + " for sharing it.");
      }
    }
    if (line.starts_with("People's comments about ")) {
      const auto v = after_title(line, "People's comments about ", titles);
      if (!v.empty() && v != "none") {
        auto said = comment_sentences(v);
        second.sentences.insert(second.sentences.end(), said.begin(), said.end());
      }
    }
    if (line.starts_with("People's reactions about ")) {
      const auto v = after_title(line, "People's reactions about ", titles);
      if (!v.empty() && v != "none") second.sentences.push_back(reaction_sentence(v));
    }
  }

  const std::string rec_abstract = abstracts.empty() ? "" : scrub(abstracts.front());
  const std::string other_abstract = abstracts.size() > 1 ? scrub(abstracts[1]) : "";
  const std::string rec_title = titles.empty() ? "" : titles.front();
  const std::string other_title = titles.size() > 1 ? titles[1] : "";
  auto abstract_sentences = text::split_sentences(rec_abstract);

  if (may_answer_none) {
    const auto overlap = shared_words(rec_title + " " + rec_abstract, other_title + " " + other_abstract);
    if (overlap.empty()) return "NONE";
  }

  const auto overlap = shared_words(rec_title + " " + rec_abstract, other_title + " " + other_abstract);
  auto topic = [&]() -> std::string {
    if (overlap.size() >= 2) return overlap[0] + " and " + overlap[1];
    if (overlap.size() == 1) return overlap[0];
    return "closely related problems";
  };

  std::string body;
  if (first.start.ends_with("because both")) {
    body = (rng() % 2 ? "address " : "focus on ") + topic() + ".";
    std::vector<std::string> rest;
    if (!abstract_sentences.empty()) rest.push_back("This paper differs in its focus: " + abstract_sentences.front());
    body = fit(body, rest, first.limit > first.start.size() + 1 ? first.limit - first.start.size() - 1 : 0);
  } else if (first.start.ends_with("because")) {
    if (reason.empty()) reason = "both " + std::string(rng() % 2 ? "address " : "deal with ") + topic() + ".";
    std::vector<std::string> rest(directive_sentences);
    if (!abstract_sentences.empty()) rest.push_back(abstract_sentences.front());
    body = fit(reason, rest, first.limit > first.start.size() + 1 ? first.limit - first.start.size() - 1 : 0);
  } else {
    std::string lead;
    if (!congratulate.empty()) lead = std::string(rng() % 2 ? "Congrats to " : "Congratulations to ") + congratulate + "!";
    std::vector<std::string> rest;
    std::size_t reserve = 0;
    for (const auto& d : directive_sentences) reserve += d.size() + 1;
    const std::size_t room = first.limit > lead.size() + reserve ? first.limit - lead.size() - reserve : 0;
    std::string summary = fit("", abstract_sentences, room);
    if (summary.empty() && !abstract_sentences.empty()) summary = text::truncate_words(abstract_sentences.front(), room);
    if (!summary.empty()) rest.push_back(summary);
    rest.insert(rest.end(), directive_sentences.begin(), directive_sentences.end());
    body = fit(lead, rest, first.limit);
  }

  std::string out = paragraph(first.start, body, first.limit);
  if (has_second && !second.start.empty()) {
    const std::size_t limit = second.limit ? second.limit : max_chars;
    std::string lead = second.start + ":";
    out += "\n" + paragraph("", fit(lead, second.sentences, limit), limit);
  }
  if (out.size() > max_chars) out = text::truncate_words(out, max_chars);
  return out;
}

struct Range {
  std::size_t begin, end;
};

bool overlaps(const std::vector<Range>& ranges, std::size_t b, std::size_t e) {
  return std::any_of(ranges.begin(), ranges.end(), [&](const Range& r) { return b < r.end && e > r.begin; });
}

// Picks up to n word runs (2-3 words) outside forbidden ranges and wraps them in '*'.
std::string add_bold(std::string s, std::size_t n, const std::vector<std::string>& forbidden, std::mt19937_64& rng) {
  if (n == 0) return s;
  std::vector<Range> blocked;
  for (const auto& f : forbidden) {
    if (f.empty()) continue;
    for (auto pos = s.find(f); pos != std::string::npos; pos = s.find(f, pos + 1)) blocked.push_back({pos, pos + f.size()});
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '@' || s[i] == '(' || s[i] == '"') {
      std::size_t e = i + 1;
      while (e < s.size() && s[e] != ' ') ++e;
      blocked.push_back({i, e});
    }
  }
  // Words made only of letters, digits and hyphens.
  std::vector<Range> words;
  for (std::size_t i = 0; i < s.size();) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t e = i;
    while (e < s.size() && s[e] != ' ' && s[e] != '\n') ++e;
    bool clean = e > i;
    for (std::size_t k = i; k < e; ++k) {
      if (!std::isalnum(static_cast<unsigned char>(s[k])) && s[k] != '-') clean = false;
    }
    if (clean) words.push_back({i, e});
    i = e + 1;
  }
  std::vector<Range> candidates;
  for (std::size_t w = 0; w + 1 < words.size(); ++w) {
    const std::size_t len = (rng() % 2) ? 3 : 2;
    if (w + len > words.size()) continue;
    bool contiguous = true;
    for (std::size_t k = w; k + 1 < w + len; ++k) {
      if (words[k + 1].begin != words[k].end + 1) contiguous = false;
    }
    if (!contiguous) continue;
    const Range r{words[w].begin, words[w + len - 1].end};
    if (!overlaps(blocked, r.begin, r.end)) candidates.push_back(r);
  }
  std::vector<Range> chosen;
  // Prefer the phrase right after "because", as the bolding rule asks.
  if (const auto pos = s.find("because "); pos != std::string::npos) {
    for (const auto& c : candidates) {
      if (c.begin >= pos + 8 && c.begin <= pos + 14) {
        chosen.push_back(c);
        break;
      }
    }
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  for (const auto& c : candidates) {
    if (chosen.size() >= n) break;
    if (!overlaps(chosen, c.begin > 0 ? c.begin - 1 : 0, c.end + 1)) chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end(), [](const Range& a, const Range& b) { return a.begin > b.begin; });
  for (const auto& c : chosen) {
    s.insert(c.end, "*");
    s.insert(c.begin, "*");
  }
  return s;
}

std::string complete_synthesis(const std::string& prompt, std::size_t max_chars, std::mt19937_64& rng) {
  const auto lines = lines_of(prompt);
  static const std::regex limit_re("shorten the above content with no more than (\\d+) characters");
  static const std::regex bold_re("bold at most (\\w+) key phrases");
  std::size_t limit = max_chars;
  std::size_t max_bold = 3;
  std::smatch m;
  if (std::regex_search(prompt, m, limit_re)) limit = std::min<std::size_t>(limit, std::stoul(m[1].str()));
  if (std::regex_search(prompt, m, bold_re)) max_bold = number_word(m[1].str());

  std::vector<std::string> content_lines, required, forbidden;
  bool in_content = true, in_forbidden = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.starts_with("First, you are required to shorten")) in_content = false;
    if (in_content) {
      content_lines.push_back(line);
      continue;
    }
    if (auto v = after(line, "- The shortened content must contain the following strings: "); !v.empty())
      required.push_back(v);
    if (line.starts_with("You should not bold the following text:")) {
      in_forbidden = true;
      continue;
    }
    if (in_forbidden && line.starts_with("- ")) forbidden.push_back(line.substr(2));
  }
  const std::string content = scrub(unbrace(text::join(content_lines, "\n")));

  const std::size_t n_bold = rng() % (max_bold + 1);
  const std::size_t budget = limit > 2 * n_bold ? limit - 2 * n_bold : 0;

  std::vector<std::string> protect = required;
  protect.insert(protect.end(), forbidden.begin(), forbidden.end());
  auto sentences = text::split_sentences(content, protect);

  std::vector<bool> keep(sentences.size(), false);
  std::vector<std::string> appended;
  for (const auto& r : required) {
    bool found = false;
    for (std::size_t i = 0; i < sentences.size() && !found; ++i) {
      if (sentences[i].find(r) != std::string::npos) keep[i] = found = true;
    }
    if (!found) appended.push_back(r.starts_with("@") ? "This might interest " + r + "." : "It relates to " + r + ".");
  }

  auto total = [&](const std::vector<bool>& k) {
    std::size_t n = 0, parts = 0;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (k[i]) n += sentences[i].size(), ++parts;
    }
    for (const auto& a : appended) n += a.size(), ++parts;
    return n + (parts ? parts - 1 : 0);
  };

  // Trim mandatory sentences to just past their last required string when over budget.
  if (total(keep) > budget) {
    for (std::size_t i = 0; i < sentences.size() && total(keep) > budget; ++i) {
      if (!keep[i]) continue;
      std::size_t last_end = 0;
      for (const auto& r : required) {
        if (auto p = sentences[i].rfind(r); p != std::string::npos) last_end = std::max(last_end, p + r.size());
      }
      if (last_end && last_end < sentences[i].size()) {
        sentences[i] = sentences[i].substr(0, last_end);
        if (sentences[i].back() != '.') sentences[i].push_back('.');
      }
    }
  }
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (keep[i]) continue;
    keep[i] = true;
    if (total(keep) > budget) keep[i] = false;
  }

  std::vector<std::string> chosen;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (keep[i]) chosen.push_back(sentences[i]);
  }
  chosen.insert(chosen.end(), appended.begin(), appended.end());
  std::string out = text::join(chosen, " ");
  if (out.empty() && !sentences.empty()) out = text::truncate_words(sentences.front(), budget);
  if (out.size() > budget) out = text::truncate_words(out, budget);
  out = add_bold(std::move(out), n_bold, forbidden, rng);
  if (out.size() > max_chars) out = text::truncate_words(out, max_chars);
  return out;
}

}  // namespace

std::string MockCompletionClient::complete(const CompletionRequest& request) {
  std::mt19937_64 rng(fnv1a(request.prompt) ^ request.seed);
  const std::size_t max_chars = request.max_output_chars ? request.max_output_chars : 4000;
  if (request.prompt.find("shorten the above content with no more than") != std::string::npos) {
    return complete_synthesis(request.prompt, max_chars, rng);
  }
  return complete_stage(request.prompt, max_chars, rng);
}

}  // namespace socialrag
