#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "harf/agreement.hpp"
#include "harf/alignment.hpp"
#include "harf/alphabet.hpp"
#include "harf/ingest.hpp"
#include "harf/scoring.hpp"

namespace harf::cli {

// Raw command-line option values, one field per flag.
struct CommonOptions {
  std::string alphabet_path;        // empty: $HARF_ALPHABET, then built-in
  double w_lcs = 0.6;
  double w_acc = 0.60;
  std::string backend = "inline";   // inline | http
  std::string endpoint;
  std::string rounding = "integer"; // integer | none
  std::string out_dir = "harf-out";
  std::size_t jobs = 1;
  bool strict = false;
  double flag_threshold = 60.0;     // word harf score below this is flagged
};

// Resolved run configuration shared by the subcommands.
struct RunConfig {
  std::string alphabet_source;      // provenance string for report headers
  PhonemeAlphabet alphabet;
  ScoreWeights weights;
  PredictionBackend backend;
  Rounding rounding = Rounding::kHalfUpInteger;
  std::string out_dir;
  std::size_t jobs = 1;
  bool strict = false;
  double flag_threshold = 60.0;

  void validate() const;
};

// need_alphabet=false skips loading the alphabet for subcommands that never
// touch phonemes (agreement works on scores alone).
RunConfig make_run_config(const CommonOptions& options,
                          bool need_alphabet = true);

// The built-in Arabic alphabet profile (also shipped as data/harf_msa.json).
const char* default_alphabet_config();

// Scores one utterance end to end: normalize both sides, align, project the
// alignment onto words, apply the scoring formulas. Pure; throws on
// unmappable tokens and words that normalize to nothing.
struct UtteranceScore {
  ScoreReport report;
  Alignment alignment;
  std::vector<bool> flagged;  // parallel to report.per_word
};
UtteranceScore score_one(const Utterance& utterance,
                         const PhonemeAlphabet& alphabet,
                         const ScoreWeights& weights, double flag_threshold);

// Subcommand entry points. Each returns the process exit code: 0 for
// success, 1 when --strict saw per-utterance failures, 2 for configuration,
// schema, or data errors.
int cmd_score(const std::string& dataset_path, const CommonOptions& options);
int cmd_eval(const std::string& dataset_path, const CommonOptions& options);
int cmd_agree(const std::string& rater_csv_path,
              const std::vector<std::string>& system_specs,  // name=path
              const CommonOptions& options);
int cmd_normalize(const std::vector<std::string>& tokens, bool lenient,
                  const CommonOptions& options);
int cmd_align(const std::vector<std::string>& ref_tokens,
              const std::vector<std::string>& pred_tokens);

}  // namespace harf::cli
