#include <algorithm>
#include <regex>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "socialrag/clients.hpp"
#include "socialrag/errors.hpp"

namespace socialrag {
namespace {

using nlohmann::json;

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing '/'
};

SplitUrl split_url(const std::string& base) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(base, m, re)) throw ConfigurationError("bad base url: " + base);
  std::string prefix = m[2].matched ? m[2].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {m[1].str(), prefix};
}

httplib::Client make_client(const HttpEndpoint& e) {
  httplib::Client cli(split_url(e.base_url).origin);
  cli.set_connection_timeout(e.timeout);
  cli.set_read_timeout(e.timeout);
  cli.set_write_timeout(e.timeout);
  return cli;
}

// Maps transport and status failures onto the error taxonomy.
const httplib::Response& checked(const httplib::Result& res, const std::string& what) {
  if (!res) throw RetryableError(what + ": " + httplib::to_string(res.error()));
  const int s = res->status;
  if (s == 404) throw NotFound(what + ": 404");
  if (s == 429 || s >= 500) throw RetryableError(what + ": HTTP " + std::to_string(s));
  if (s < 200 || s >= 300) throw Error(what + ": HTTP " + std::to_string(s) + " " + res->body);
  return *res;
}

json parse_body(const httplib::Response& r, const std::string& what) {
  try {
    return json::parse(r.body);
  } catch (const json::parse_error& e) {
    throw RetryableError(what + ": malformed JSON: " + e.what());
  }
}

std::string str_or(const json& j, const char* key, std::string fallback = {}) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  return j[key].get<std::string>();
}

// External ids object -> canonical ref; arXiv first, then DOI, then the hash id.
std::optional<PaperRef> ref_of(const json& paper) {
  if (paper.is_null()) return std::nullopt;
  try {
    if (paper.contains("externalIds") && paper["externalIds"].is_object()) {
      const auto& ids = paper["externalIds"];
      if (ids.contains("ArXiv") && ids["ArXiv"].is_string()) return PaperRef::parse("arxiv:" + ids["ArXiv"].get<std::string>());
      if (ids.contains("DOI") && ids["DOI"].is_string()) return PaperRef::parse("doi:" + ids["DOI"].get<std::string>());
    }
    const auto id = str_or(paper, "paperId");
    if (!id.empty()) return PaperRef::parse("s2:" + id);
  } catch (const InvalidInput&) {
  }
  return std::nullopt;
}

PaperRecord record_of(const json& p, std::optional<PaperRef> ref) {
  PaperRecord r;
  if (!ref) ref = ref_of(p);
  if (!ref) throw Error("paper without usable id");
  r.ref = *ref;
  r.title = str_or(p, "title");
  if (auto a = str_or(p, "abstract"); !a.empty()) r.abstract = a;
  if (auto v = str_or(p, "venue"); !v.empty()) r.venue = v;
  if (p.contains("year") && p["year"].is_number_integer()) r.year = p["year"].get<int>();
  if (p.contains("authors") && p["authors"].is_array()) {
    for (const auto& a : p["authors"]) {
      Author au;
      au.author_id = str_or(a, "authorId");
      au.name = str_or(a, "name");
      if (a.contains("affiliations") && a["affiliations"].is_array()) {
        for (const auto& aff : a["affiliations"]) {
          if (aff.is_string()) au.affiliations.push_back(aff.get<std::string>());
        }
      }
      r.authors.push_back(std::move(au));
    }
  }
  auto edges = [](const json& arr, const char* inner) {
    std::vector<PaperRef> out;
    if (!arr.is_array()) return out;
    for (const auto& e : arr) {
      const json& paper = e.contains(inner) ? e[inner] : e;
      if (auto ref = ref_of(paper)) out.push_back(*ref);
    }
    return out;
  };
  if (p.contains("references")) r.citations = edges(p["references"], "citedPaper");
  if (p.contains("citations")) r.cited_by = edges(p["citations"], "citingPaper");
  if (p.contains("embedding") && p["embedding"].is_object() && p["embedding"].contains("vector")) {
    r.embedding = unit_normalized(p["embedding"]["vector"].get<std::vector<double>>());
  }
  if (!r.abstract) {
    r.embedding.reset();
    r.degraded = true;
  }
  return r;
}

const char* kPaperFields =
    "title,abstract,venue,year,externalIds,authors.authorId,authors.name,authors.affiliations,"
    "references.externalIds,citations.externalIds,embedding.specter_v2";

}  // namespace

HttpPaperClient::HttpPaperClient(HttpEndpoint endpoint, RetryPolicy retry, double requests_per_second)
    : endpoint_(std::move(endpoint)), retry_(retry), limiter_(requests_per_second, 1.0) {
  split_url(endpoint_.base_url);
}

PaperRecord HttpPaperClient::fetch_paper_metadata(const PaperRef& ref) {
  const auto url = split_url(endpoint_.base_url);
  const std::string id = paper_api_id(ref);
  httplib::Headers headers;
  if (endpoint_.api_key) headers.emplace("x-api-key", *endpoint_.api_key);

  PaperRecord record = with_backoff(retry_, [&] {
    limiter_.acquire();
    auto cli = make_client(endpoint_);
    const std::string path = url.prefix + "/graph/v1/paper/" + httplib::detail::encode_url(id) + "?fields=" + kPaperFields;
    const auto body = parse_body(checked(cli.Get(path, headers), "paper " + id), "paper " + id);
    return record_of(body, ref);
  });

  // Citation contexts live on the references endpoint.
  try {
    const json refs = with_backoff(retry_, [&] {
      limiter_.acquire();
      auto cli = make_client(endpoint_);
      const std::string path = url.prefix + "/graph/v1/paper/" + httplib::detail::encode_url(id) +
                               "/references?fields=contexts,externalIds&limit=1000";
      return parse_body(checked(cli.Get(path, headers), "references " + id), "references " + id);
    });
    if (refs.contains("data") && refs["data"].is_array()) {
      for (const auto& e : refs["data"]) {
        if (!e.contains("citedPaper")) continue;
        const auto cited = ref_of(e["citedPaper"]);
        if (!cited || !e.contains("contexts") || !e["contexts"].is_array() || e["contexts"].empty()) continue;
        record.citation_contexts[*cited] = e["contexts"].get<std::vector<std::string>>();
      }
    }
  } catch (const NotFound&) {
  } catch (const RetryableError& e) {
    spdlog::warn("citation contexts for {} unavailable: {}", ref.str(), e.what());
  }
  return record;
}

std::vector<PaperRef> HttpPaperClient::fetch_author_papers(const std::string& author_id) {
  const auto url = split_url(endpoint_.base_url);
  httplib::Headers headers;
  if (endpoint_.api_key) headers.emplace("x-api-key", *endpoint_.api_key);
  return with_backoff(retry_, [&] {
    limiter_.acquire();
    auto cli = make_client(endpoint_);
    const std::string path =
        url.prefix + "/graph/v1/author/" + httplib::detail::encode_url(author_id) + "/papers?fields=externalIds&limit=1000";
    const auto body = parse_body(checked(cli.Get(path, headers), "author " + author_id), "author " + author_id);
    std::vector<PaperRef> out;
    if (body.contains("data") && body["data"].is_array()) {
      for (const auto& p : body["data"]) {
        if (auto ref = ref_of(p)) out.push_back(*ref);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  });
}

std::vector<PaperRecord> HttpPaperClient::fetch_recommendations(const std::vector<PaperRef>& positives, std::size_t k) {
  if (positives.empty()) throw InvalidInput("fetch_recommendations: positives must not be empty");
  const auto url = split_url(endpoint_.base_url);
  httplib::Headers headers;
  if (endpoint_.api_key) headers.emplace("x-api-key", *endpoint_.api_key);
  json req;
  req["positivePaperIds"] = json::array();
  for (const auto& p : positives) req["positivePaperIds"].push_back(paper_api_id(p));
  req["negativePaperIds"] = json::array();
  return with_backoff(retry_, [&] {
    limiter_.acquire();
    auto cli = make_client(endpoint_);
    const std::string path = url.prefix + "/recommendations/v1/papers?limit=" + std::to_string(k) +
                             "&fields=title,abstract,venue,year,externalIds,authors.authorId,authors.name";
    const auto body = parse_body(checked(cli.Post(path, headers, req.dump(), "application/json"), "recommendations"),
                                 "recommendations");
    std::vector<PaperRecord> out;
    if (body.contains("recommendedPapers") && body["recommendedPapers"].is_array()) {
      for (const auto& p : body["recommendedPapers"]) {
        auto ref = ref_of(p);
        if (!ref || std::find(positives.begin(), positives.end(), *ref) != positives.end()) continue;
        out.push_back(record_of(p, ref));
        if (out.size() >= k) break;
      }
    }
    return out;
  });
}

HttpCompletionClient::HttpCompletionClient(HttpEndpoint endpoint, std::string model, RetryPolicy retry)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), retry_(retry), limiter_(2.0, 2.0) {
  if (!endpoint_.api_key || endpoint_.api_key->empty()) throw ConfigurationError("completion endpoint has no api key");
  split_url(endpoint_.base_url);
}

std::string HttpCompletionClient::complete(const CompletionRequest& request) {
  const auto url = split_url(endpoint_.base_url);
  json body;
  body["model"] = model_;
  body["messages"] = json::array({json{{"role", "user"}, {"content", request.prompt}}});
  body["seed"] = request.seed;
  body["temperature"] = 0;
  if (request.max_output_chars) body["max_tokens"] = request.max_output_chars / 2 + 32;
  const httplib::Headers headers{{"Authorization", "Bearer " + *endpoint_.api_key}};
  return with_backoff(retry_, [&] {
    limiter_.acquire();
    auto cli = make_client(endpoint_);
    const auto result = cli.Post(url.prefix + "/v1/chat/completions", headers, body.dump(), "application/json");
    const auto j = parse_body(checked(result, "completion"), "completion");
    try {
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw RetryableError(std::string("completion: unexpected response shape: ") + e.what());
    }
  });
}

}  // namespace socialrag
