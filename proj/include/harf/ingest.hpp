#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace harf {

// One word of the prompt with its raw (pre-normalization) reference
// phoneme tokens.
struct RefWord {
  std::string word;
  std::vector<std::string> phonemes;

  bool operator==(const RefWord&) const = default;
};

// A single elicited utterance as carried in the dataset JSONL. Predictions
// may arrive inline ("pred_phonemes" on the wire) or later from a backend.
struct Utterance {
  std::string id;
  std::string text;
  std::vector<RefWord> ref_words;
  std::optional<std::vector<std::string>> pred_tokens;
  std::optional<std::string> audio_path;
  std::optional<double> audio_duration_s;
  std::optional<double> inference_time_s;

  void validate() const;

  bool operator==(const Utterance&) const = default;
};

struct HttpBackendConfig {
  std::string endpoint;
  std::string auth_env = "HARF_BACKEND_TOKEN";  // Bearer token source
  double timeout_s = 30.0;
  int retry_budget = 1;
};

// Where predictions come from: already present in the file, or fetched from
// a speech-to-phoneme inference service.
struct PredictionBackend {
  enum class Kind { kInline, kHttp };

  Kind kind = Kind::kInline;
  HttpBackendConfig http;

  static PredictionBackend make_inline() { return {}; }
  static PredictionBackend make_http(HttpBackendConfig config) {
    PredictionBackend b;
    b.kind = Kind::kHttp;
    b.http = std::move(config);
    return b;
  }

  void validate() const;
};

struct FetchFailure {
  std::string id;
  std::string message;
};

// Utterances that now carry predictions, plus the ones that could not be
// completed. Both lists preserve input order.
struct FetchOutcome {
  std::vector<Utterance> ready;
  std::vector<FetchFailure> failed;
};

// Reads one JSON object per line. Parse errors carry the 1-based line
// number; schema violations and duplicate ids name the line in their
// message.
std::vector<Utterance> load_dataset(const std::string& path);

// Inverse of load_dataset; emits one canonical JSON object per line.
void save_dataset(const std::string& path,
                  const std::vector<Utterance>& utterances);

// Fills pred_tokens on every utterance via the chosen backend. Individual
// failures never abort the batch: the utterance moves to `failed` and the
// rest proceed. HTTP fetches run on up to `parallelism` threads; output
// order is the input order either way.
FetchOutcome fetch_predictions(const PredictionBackend& backend,
                               const std::vector<Utterance>& utterances,
                               std::size_t parallelism = 4);

}  // namespace harf
