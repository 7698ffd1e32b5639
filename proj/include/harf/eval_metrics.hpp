#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace harf {

// Per-utterance evaluation inputs. Timing fields are optional because many
// datasets ship without audio metadata.
struct EvalRecord {
  std::string utterance_id;
  std::size_t n_ref = 0;
  std::size_t s = 0;
  std::size_t d = 0;
  std::size_t i = 0;
  std::optional<double> audio_duration_s;
  std::optional<double> inference_time_s;

  void validate() const;  // durations, when present, must be positive
};

struct EvalSummary {
  double per = 0.0;                 // micro-averaged, in percent
  std::optional<double> per_macro;  // mean of per-utterance PERs
  std::optional<double> rtf;        // absent when any timing is missing
  std::size_t utterance_count = 0;
  std::size_t total_ref_phonemes = 0;
  double total_audio_s = 0.0;
  double total_inference_s = 0.0;
  std::vector<std::string> missing_timing_ids;
};

// Micro-averaged phoneme error rate: 100 × Σ(s+d+i) / Σ n_ref. Not capped
// at 100 — insertion-heavy hypotheses legitimately exceed it.
double per(const std::vector<EvalRecord>& records);

// Corpus real-time factor: Σ inference_time / Σ audio_duration. Every record
// must carry both timings.
double rtf(const std::vector<EvalRecord>& records);

double utterance_per(const EvalRecord& record);
double utterance_rtf(const EvalRecord& record);

// Lenient dataset rollup: always computes PER; computes RTF only when every
// record has timing, otherwise lists the offenders instead of throwing.
EvalSummary summarize(const std::vector<EvalRecord>& records);

}  // namespace harf
