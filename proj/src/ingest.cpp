#include "harf/ingest.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "harf/errors.hpp"
#include "http_util.hpp"
#include "httplib.h"
#include "json.hpp"

namespace harf {

using nlohmann::json;

void Utterance::validate() const {
  if (id.empty()) throw InvariantViolation("utterance id must be non-empty");
  if (ref_words.empty())
    throw InvariantViolation("utterance '" + id + "' has no reference words");
  for (const auto& w : ref_words) {
    if (w.phonemes.empty())
      throw InvariantViolation("utterance '" + id + "': word '" + w.word +
                               "' has no reference phonemes");
  }
}

void PredictionBackend::validate() const {
  if (kind == Kind::kHttp) {
    if (http.endpoint.empty())
      throw InvariantViolation("http backend needs an endpoint");
    if (!(http.timeout_s > 0))
      throw InvariantViolation("http backend timeout must be positive");
    if (http.retry_budget < 0)
      throw InvariantViolation("http backend retry budget must be >= 0");
  }
}

namespace {

[[noreturn]] void schema_fail(std::size_t line, const std::string& what) {
  throw SchemaError("dataset line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> token_array(const json& j, const char* field,
                                     std::size_t line) {
  if (!j.is_array()) schema_fail(line, std::string(field) + " must be an array");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_string())
      schema_fail(line, std::string(field) + " must contain only strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Utterance parse_utterance(const json& doc, std::size_t line) {
  if (!doc.is_object()) schema_fail(line, "expected a JSON object");
  for (const char* field : {"id", "text", "ref_words"}) {
    if (!doc.contains(field))
      schema_fail(line, std::string("missing required field '") + field + "'");
  }
  Utterance u;
  if (!doc["id"].is_string()) schema_fail(line, "'id' must be a string");
  u.id = doc["id"].get<std::string>();
  if (u.id.empty()) schema_fail(line, "'id' must be non-empty");
  if (!doc["text"].is_string()) schema_fail(line, "'text' must be a string");
  u.text = doc["text"].get<std::string>();

  if (!doc["ref_words"].is_array() || doc["ref_words"].empty())
    schema_fail(line, "'ref_words' must be a non-empty array");
  for (const auto& w : doc["ref_words"]) {
    if (!w.is_object() || !w.contains("word") || !w.contains("phonemes"))
      schema_fail(line, "each ref_words entry needs 'word' and 'phonemes'");
    if (!w["word"].is_string())
      schema_fail(line, "ref_words 'word' must be a string");
    RefWord rw;
    rw.word = w["word"].get<std::string>();
    rw.phonemes = token_array(w["phonemes"], "ref_words 'phonemes'", line);
    if (rw.phonemes.empty())
      schema_fail(line, "word '" + rw.word + "' has an empty phoneme list");
    u.ref_words.push_back(std::move(rw));
  }

  if (doc.contains("pred_phonemes") && !doc["pred_phonemes"].is_null())
    u.pred_tokens = token_array(doc["pred_phonemes"], "pred_phonemes", line);
  if (doc.contains("audio_path") && !doc["audio_path"].is_null()) {
    if (!doc["audio_path"].is_string())
      schema_fail(line, "'audio_path' must be a string");
    u.audio_path = doc["audio_path"].get<std::string>();
  }
  for (const char* field : {"audio_duration_s", "inference_time_s"}) {
    if (doc.contains(field) && !doc[field].is_null()) {
      if (!doc[field].is_number())
        schema_fail(line, std::string("'") + field + "' must be a number");
      double v = doc[field].get<double>();
      if (v <= 0.0)
        schema_fail(line, std::string("'") + field + "' must be positive");
      if (std::string(field) == "audio_duration_s")
        u.audio_duration_s = v;
      else
        u.inference_time_s = v;
    }
  }
  return u;
}

}  // namespace

std::vector<Utterance> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset '" + path + "'");

  std::vector<Utterance> out;
  std::set<std::string> seen;
  std::string line_text;
  std::size_t line_no = 0;
  while (std::getline(in, line_text)) {
    ++line_no;
    if (line_text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc;
    try {
      doc = json::parse(line_text);
    } catch (const json::parse_error& e) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": " +
                           e.what(),
                       line_no);
    }
    Utterance u = parse_utterance(doc, line_no);
    if (!seen.insert(u.id).second)
      schema_fail(line_no, "duplicate utterance id '" + u.id + "'");
    out.push_back(std::move(u));
  }
  return out;
}

void save_dataset(const std::string& path,
                  const std::vector<Utterance>& utterances) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write dataset '" + path + "'");
  for (const auto& u : utterances) {
    json doc;
    doc["id"] = u.id;
    doc["text"] = u.text;
    doc["ref_words"] = json::array();
    for (const auto& w : u.ref_words)
      doc["ref_words"].push_back({{"word", w.word}, {"phonemes", w.phonemes}});
    if (u.pred_tokens) doc["pred_phonemes"] = *u.pred_tokens;
    if (u.audio_path) doc["audio_path"] = *u.audio_path;
    if (u.audio_duration_s) doc["audio_duration_s"] = *u.audio_duration_s;
    if (u.inference_time_s) doc["inference_time_s"] = *u.inference_time_s;
    out << doc.dump() << '\n';
  }
}

namespace {

// Fetches one utterance's prediction over HTTP. Throws TransportError on
// network/status failures (retried by the caller) and ValidationError on
// malformed payloads (not retried).
void fetch_one_http(const HttpBackendConfig& config,
                    const detail::ParsedUrl& url, const std::string& token,
                    Utterance& u) {
  if (!u.audio_path)
    throw ValidationError("utterance '" + u.id +
                          "' has no audio_path to send to the backend");

  json req = {{"audio_path", *u.audio_path}};
  const std::string body = req.dump();

  auto attempt = [&]() -> std::string {
    httplib::Client client(url.host, url.port);
    auto secs = static_cast<time_t>(config.timeout_s);
    auto usecs =
        static_cast<time_t>((config.timeout_s - double(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
    auto res = client.Post(url.path, headers, body, "application/json");
    if (!res)
      throw TransportError("prediction request for '" + u.id + "' failed: " +
                           httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
      throw TransportError("prediction backend answered HTTP " +
                           std::to_string(res->status) + " for '" + u.id +
                           "'");
    return res->body;
  };

  std::string response =
      detail::with_retries(1 + config.retry_budget, attempt);

  json doc;
  try {
    doc = json::parse(response);
  } catch (const json::parse_error& e) {
    throw ValidationError("prediction response for '" + u.id +
                          "' is not JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("phonemes") ||
      !doc["phonemes"].is_array())
    throw ValidationError("prediction response for '" + u.id +
                          "' must carry a 'phonemes' array");
  std::vector<std::string> tokens;
  for (const auto& v : doc["phonemes"]) {
    if (!v.is_string())
      throw ValidationError("prediction response for '" + u.id +
                            "' has non-string phonemes");
    tokens.push_back(v.get<std::string>());
  }
  u.pred_tokens = std::move(tokens);
  if (doc.contains("inference_time_s") && doc["inference_time_s"].is_number())
    u.inference_time_s = doc["inference_time_s"].get<double>();
}

}  // namespace

FetchOutcome fetch_predictions(const PredictionBackend& backend,
                               const std::vector<Utterance>& utterances,
                               std::size_t parallelism) {
  backend.validate();
  FetchOutcome outcome;

  if (backend.kind == PredictionBackend::Kind::kInline) {
    for (const auto& u : utterances) {
      if (u.pred_tokens)
        outcome.ready.push_back(u);
      else
        outcome.failed.push_back(
            {u.id, "no pred_phonemes in file (inline backend)"});
    }
    return outcome;
  }

  detail::ParsedUrl url = detail::parse_http_url(backend.http.endpoint);
  std::string token;
  if (!backend.http.auth_env.empty()) {
    if (const char* v = std::getenv(backend.http.auth_env.c_str())) token = v;
  }

  // Every worker owns a disjoint set of result slots, so the outcome is
  // independent of scheduling.
  struct Slot {
    Utterance utterance;
    std::string error;  // empty on success
  };
  std::vector<Slot> slots(utterances.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= utterances.size()) return;
      slots[i].utterance = utterances[i];
      try {
        fetch_one_http(backend.http, url, token, slots[i].utterance);
      } catch (const Error& e) {
        slots[i].error = e.what();
      }
    }
  };

  std::size_t n_threads =
      std::max<std::size_t>(1, std::min(parallelism, utterances.size()));
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].error.empty())
      outcome.ready.push_back(std::move(slots[i].utterance));
    else
      outcome.failed.push_back({utterances[i].id, slots[i].error});
  }
  return outcome;
}

}  // namespace harf
