#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "socialrag/bot_message.hpp"
#include "socialrag/errors.hpp"
#include "socialrag/event.hpp"
#include "socialrag/paper_ref.hpp"
#include "socialrag/sentiment.hpp"
#include "socialrag/simulator.hpp"

namespace py = pybind11;
using namespace socialrag;

namespace {

std::string log_text(const std::vector<SocialEvent>& events) {
  std::string out;
  for (const auto& e : events) out += to_log_line(e) + "\n";
  return out;
}

// Replay outcome as a JSON document: event log, bot posts and both report exports.
std::string replay_summary(const Transcript& t, std::uint64_t seed) {
  const auto r = replay(t, seed);
  nlohmann::ordered_json j;
  j["channel"] = r.kb.channel();
  j["log"] = log_text(r.kb.log());
  j["bot_posts"] = nlohmann::json::array();
  for (const auto& e : r.bot_posts) j["bot_posts"].push_back(event_to_json(e));
  j["report_csv"] = export_report(r.series, ReportFormat::csv);
  j["report_json_lines"] = export_report(r.series, ReportFormat::json_lines);
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the socialrag core library";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", error.ptr());
  py::register_exception<NotFound>(m, "NotFound", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<ConfigurationError>(m, "ConfigurationError", error.ptr());

  m.def("extract_item_refs", [](const std::string& text) {
    std::vector<std::string> out;
    for (const auto& r : extract_item_refs(text)) out.push_back(r.str());
    return out;
  }, py::arg("text"), "Canonical paper references found in a message, in order of first appearance.");

  m.def("classify_reaction", [](const std::string& emoji) { return std::string(to_string(classify_reaction(emoji))); },
        py::arg("emoji_name"));

  m.def("display_text", [](const std::string& body) { return display_text(body); }, py::arg("body"));
  m.def("bold_count", [](const std::string& body) { return bold_spans(body).size(); }, py::arg("body"));
  m.def("mentions", [](const std::string& body) { return mention_tokens(body); }, py::arg("body"));

  m.def("synthetic_transcript_json",
        [](std::size_t papers, std::size_t events, long days, const std::string& frequency, std::uint64_t seed) {
          SyntheticCorpusOptions co;
          co.papers = papers;
          auto corpus = std::make_shared<const CorpusFixture>(synthetic_corpus(co, seed));
          SyntheticTranscriptOptions to;
          to.events = events;
          to.days = days;
          to.frequency = frequency_from_string(frequency);
          return transcript_to_json(synthetic_transcript(corpus, to, seed)).dump();
        },
        py::arg("papers") = 80, py::arg("events") = 500, py::arg("days") = 30, py::arg("frequency") = "daily",
        py::arg("seed") = 1);

  m.def("replay_json", [](const std::string& transcript_json, std::uint64_t seed) {
    const auto t = transcript_from_json(nlohmann::json::parse(transcript_json), nullptr);
    py::gil_scoped_release release;
    return replay_summary(t, seed);
  }, py::arg("transcript_json"), py::arg("seed"));

  m.def("replay_file", [](const std::string& path, std::uint64_t seed) {
    const auto t = load_transcript(path);
    py::gil_scoped_release release;
    return replay_summary(t, seed);
  }, py::arg("path"), py::arg("seed"));

  m.def("report_from_log", [](const std::string& channel, const std::string& log, const std::string& format) {
    std::istringstream in(log);
    const auto kb = KnowledgeBase::rebuild(channel, read_event_log(in));
    return export_report(engagement_report(kb), report_format_from_string(format));
  }, py::arg("channel"), py::arg("log"), py::arg("format") = "csv");
}
