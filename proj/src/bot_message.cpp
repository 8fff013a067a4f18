#include "socialrag/bot_message.hpp"

#include <sstream>

#include "socialrag/errors.hpp"

namespace socialrag {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::c1_tldr:
      return "c1_tldr";
    case Condition::c2_template:
      return "c2_template";
    case Condition::c3_template_tldr:
      return "c3_template_tldr";
    case Condition::c4_llm_synthesis:
      return "c4_llm_synthesis";
  }
  return "?";
}

Condition condition_from_string(std::string_view s) {
  if (s == "c1_tldr" || s == "c1") return Condition::c1_tldr;
  if (s == "c2_template" || s == "c2") return Condition::c2_template;
  if (s == "c3_template_tldr" || s == "c3") return Condition::c3_template_tldr;
  if (s == "c4_llm_synthesis" || s == "c4") return Condition::c4_llm_synthesis;
  throw InvalidInput("unknown condition: " + std::string(s));
}

std::string BotMessage::rendered_text() const {
  std::ostringstream out;
  out << body << "\n\n";
  out << "*Title:* <" << metadata_block.url << "|" << metadata_block.title << ">\n";
  if (!metadata_block.authors.empty()) {
    out << "*Authors:* ";
    for (std::size_t i = 0; i < metadata_block.authors.size(); ++i) {
      if (i) out << ", ";
      out << metadata_block.authors[i];
    }
    out << "\n";
  }
  if (!metadata_block.venue.empty()) out << "*Venue:* " << metadata_block.venue << "\n";
  if (metadata_block.year) out << "*Year:* " << metadata_block.year << "\n";
  return out.str();
}

namespace {

// Skips over a <...> token starting at i; returns the index after '>' or npos.
std::size_t token_end(std::string_view body, std::size_t i) {
  const auto close = body.find('>', i);
  if (close == std::string_view::npos) return close;
  const auto nl = body.find('\n', i);
  if (nl != std::string_view::npos && nl < close) return std::string_view::npos;
  return close + 1;
}

}  // namespace

std::vector<BoldSpan> bold_spans(std::string_view body) {
  std::vector<BoldSpan> spans;
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '<') {
      const auto end = token_end(body, i);
      if (end != std::string_view::npos) {
        i = end;
        continue;
      }
    }
    if (body[i] != '*') {
      ++i;
      continue;
    }
    const auto close = body.find('*', i + 1);
    if (close == std::string_view::npos) break;
    const auto inner = body.substr(i + 1, close - i - 1);
    if (inner.empty() || inner.find('\n') != std::string_view::npos) {
      i = close;
      continue;
    }
    spans.push_back({i, close + 1, std::string(inner)});
    i = close + 1;
  }
  return spans;
}

std::vector<std::string> mention_tokens(std::string_view body) {
  std::vector<std::string> out;
  for (std::size_t i = body.find("<@"); i != std::string_view::npos; i = body.find("<@", i + 1)) {
    const auto end = token_end(body, i);
    if (end == std::string_view::npos) break;
    out.emplace_back(body.substr(i + 2, end - i - 3));
  }
  return out;
}

std::vector<LinkToken> link_tokens(std::string_view body) {
  std::vector<LinkToken> out;
  for (std::size_t i = body.find('<'); i != std::string_view::npos; i = body.find('<', i + 1)) {
    if (i + 1 < body.size() && body[i + 1] == '@') continue;
    const auto end = token_end(body, i);
    if (end == std::string_view::npos) continue;
    const auto inner = body.substr(i + 1, end - i - 2);
    const auto bar = inner.find('|');
    if (bar == std::string_view::npos || inner.find("://") == std::string_view::npos) continue;
    out.push_back({std::string(inner.substr(0, bar)), std::string(inner.substr(bar + 1))});
  }
  return out;
}

std::string display_text(std::string_view body) {
  std::string out;
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '<') {
      const auto end = token_end(body, i);
      if (end != std::string_view::npos) {
        const auto inner = body.substr(i + 1, end - i - 2);
        if (!inner.empty() && inner[0] == '@') {
          out.append(inner);
        } else if (const auto bar = inner.find('|'); bar != std::string_view::npos) {
          out.append(inner.substr(bar + 1));
        } else {
          out.append(inner);
        }
        i = end;
        continue;
      }
    }
    out.push_back(body[i]);
    ++i;
  }
  // Drop the markers of balanced bold spans only.
  std::string plain;
  const auto spans = bold_spans(out);
  std::size_t pos = 0;
  for (const auto& s : spans) {
    plain.append(out, pos, s.begin - pos);
    plain.append(s.text);
    pos = s.end;
  }
  plain.append(out, pos, std::string::npos);
  return plain;
}

ordered_json bot_message_to_json(const BotMessage& m) {
  ordered_json j;
  j["paper"] = m.paper.str();
  j["body"] = m.body;
  ordered_json meta;
  meta["title"] = m.metadata_block.title;
  meta["authors"] = m.metadata_block.authors;
  meta["venue"] = m.metadata_block.venue;
  meta["year"] = m.metadata_block.year;
  meta["url"] = m.metadata_block.url;
  j["metadata_block"] = meta;
  j["provenance"] = selected_to_json(m.provenance);
  j["condition"] = to_string(m.condition);
  return j;
}

BotMessage bot_message_from_json(const json& j) {
  BotMessage m;
  try {
    m.paper = PaperRef::parse(j.at("paper").get<std::string>());
    m.body = j.at("body").get<std::string>();
    const auto& meta = j.at("metadata_block");
    m.metadata_block.title = meta.value("title", std::string{});
    m.metadata_block.authors = meta.value("authors", std::vector<std::string>{});
    m.metadata_block.venue = meta.value("venue", std::string{});
    m.metadata_block.year = meta.value("year", 0);
    m.metadata_block.url = meta.value("url", std::string{});
    if (j.contains("provenance")) m.provenance = selected_from_json(j.at("provenance"));
    m.condition = condition_from_string(j.value("condition", std::string("c4_llm_synthesis")));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad bot message: ") + e.what());
  }
  return m;
}

}  // namespace socialrag
