#include "harf/eval_metrics.hpp"

#include "harf/errors.hpp"

namespace harf {

void EvalRecord::validate() const {
  if (audio_duration_s && *audio_duration_s <= 0.0)
    throw InvariantViolation("utterance '" + utterance_id +
                             "': audio duration must be positive");
  if (inference_time_s && *inference_time_s <= 0.0)
    throw InvariantViolation("utterance '" + utterance_id +
                             "': inference time must be positive");
}

double per(const std::vector<EvalRecord>& records) {
  std::size_t edits = 0, ref = 0;
  for (const auto& r : records) {
    edits += r.s + r.d + r.i;
    ref += r.n_ref;
  }
  if (ref == 0)
    throw DomainError("PER is undefined without reference phonemes");
  return 100.0 * static_cast<double>(edits) / static_cast<double>(ref);
}

double rtf(const std::vector<EvalRecord>& records) {
  std::vector<std::string> missing;
  double audio = 0.0, inference = 0.0;
  for (const auto& r : records) {
    if (!r.audio_duration_s || !r.inference_time_s) {
      missing.push_back(r.utterance_id);
      continue;
    }
    audio += *r.audio_duration_s;
    inference += *r.inference_time_s;
  }
  if (!missing.empty()) throw MissingTimingError(missing);
  if (records.empty() || audio <= 0.0)
    throw DomainError("RTF needs at least one timed utterance");
  return inference / audio;
}

double utterance_per(const EvalRecord& record) {
  if (record.n_ref == 0)
    throw DomainError("utterance '" + record.utterance_id +
                      "': PER is undefined without reference phonemes");
  return 100.0 * static_cast<double>(record.s + record.d + record.i) /
         static_cast<double>(record.n_ref);
}

double utterance_rtf(const EvalRecord& record) {
  if (!record.audio_duration_s || !record.inference_time_s)
    throw MissingTimingError({record.utterance_id});
  return *record.inference_time_s / *record.audio_duration_s;
}

EvalSummary summarize(const std::vector<EvalRecord>& records) {
  EvalSummary out;
  out.utterance_count = records.size();

  double macro_sum = 0.0;
  std::size_t macro_n = 0;
  for (const auto& r : records) {
    r.validate();
    out.total_ref_phonemes += r.n_ref;
    if (r.n_ref > 0) {
      macro_sum += utterance_per(r);
      ++macro_n;
    }
    if (r.audio_duration_s && r.inference_time_s) {
      out.total_audio_s += *r.audio_duration_s;
      out.total_inference_s += *r.inference_time_s;
    } else {
      out.missing_timing_ids.push_back(r.utterance_id);
    }
  }

  out.per = per(records);
  if (macro_n > 0) out.per_macro = macro_sum / static_cast<double>(macro_n);
  if (out.missing_timing_ids.empty() && !records.empty() &&
      out.total_audio_s > 0.0)
    out.rtf = out.total_inference_s / out.total_audio_s;
  return out;
}

}  // namespace harf
