#include "harf/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "harf/alignment.hpp"
#include "harf/errors.hpp"

namespace harf {

void ScoreWeights::validate() const {
  constexpr double kEps = 1e-9;
  auto in_unit = [](double w) { return w >= 0.0 && w <= 1.0; };
  if (!in_unit(w_lcs) || !in_unit(w_pron) || !in_unit(w_acc) ||
      !in_unit(w_comp))
    throw InvariantViolation("score weights must lie in [0,1]");
  if (std::abs(w_lcs + w_pron - 1.0) > kEps)
    throw InvariantViolation("w_lcs + w_pron must equal 1");
  if (std::abs(w_acc + w_comp - 1.0) > kEps)
    throw InvariantViolation("w_acc + w_comp must equal 1");
}

double lcs_ratio(const PhonemeSequence& reference,
                 const PhonemeSequence& predicted) {
  if (reference.empty())
    throw DegenerateInputError("lcs_ratio is undefined for an empty reference");
  return 100.0 * static_cast<double>(lcs_length(reference, predicted)) /
         static_cast<double>(reference.size());
}

double accuracy(std::size_t n, std::size_t s, std::size_t d, std::size_t i) {
  if (n == 0) throw DomainError("accuracy is undefined for n = 0");
  double raw = (static_cast<double>(n) - static_cast<double>(s) -
                static_cast<double>(d) - static_cast<double>(i)) /
               static_cast<double>(n);
  return std::max(0.0, raw) * 100.0;
}

double completeness(std::size_t n, std::size_t d) {
  if (n == 0) throw DomainError("completeness is undefined for n = 0");
  if (d > n)
    throw DomainError("completeness: deletions (" + std::to_string(d) +
                      ") exceed reference length (" + std::to_string(n) + ")");
  return (static_cast<double>(n) - static_cast<double>(d)) /
         static_cast<double>(n) * 100.0;
}

double pron_score(double accuracy, double completeness,
                  const ScoreWeights& weights) {
  return weights.w_acc * accuracy + weights.w_comp * completeness;
}

double harf_score(double lcs_ratio, double pron_score,
                  const ScoreWeights& weights) {
  return weights.w_lcs * lcs_ratio + weights.w_pron * pron_score;
}

double to_clinical(double harf) {
  // Weight pairs sum to 1 only within rounding, so a perfect blend can land
  // a few ulps past 100; tolerate that, reject anything genuinely outside.
  constexpr double kSlack = 1e-9;
  if (harf < -kSlack || harf > 100.0 + kSlack)
    throw DomainError("clinical mapping expects a score in [0,100], got " +
                      std::to_string(harf));
  return std::clamp(harf, 0.0, 100.0) / 20.0;
}

namespace {

WordScore score_group(const WordGroup& g, const ScoreWeights& weights) {
  if (g.ref_phonemes.empty())
    throw DegenerateInputError("word '" + g.word_text +
                               "' has no reference phonemes to score against");
  WordScore w;
  w.word_text = g.word_text;
  w.n_ref = g.ref_phonemes.size();
  w.s = g.s_count;
  w.d = g.d_count;
  w.i = g.i_count;
  w.lcs_ratio = lcs_ratio(g.ref_phonemes, g.pred_phonemes);
  w.accuracy = accuracy(w.n_ref, w.s, w.d, w.i);
  w.completeness = completeness(w.n_ref, w.d);
  w.pron_score = pron_score(w.accuracy, w.completeness, weights);
  w.harf_score = harf_score(w.lcs_ratio, w.pron_score, weights);
  w.clinical_score = to_clinical(w.harf_score);
  return w;
}

}  // namespace

ScoreReport score_utterance(const PhonemeSequence& reference,
                            const PhonemeSequence& predicted,
                            const std::vector<WordGroup>& word_groups,
                            const ScoreWeights& weights) {
  weights.validate();
  if (reference.empty())
    throw DegenerateInputError("cannot score an empty reference");

  // The groups must be this utterance's tiling.
  PhonemeSequence ref_cat, pred_cat;
  for (const auto& g : word_groups) {
    ref_cat.insert(ref_cat.end(), g.ref_phonemes.begin(),
                   g.ref_phonemes.end());
    pred_cat.insert(pred_cat.end(), g.pred_phonemes.begin(),
                    g.pred_phonemes.end());
  }
  if (ref_cat != reference)
    throw PartitionError(
        "word groups do not tile the reference phoneme sequence");
  if (pred_cat != predicted)
    throw PartitionError(
        "word groups do not tile the predicted phoneme sequence");

  ScoreReport report;
  report.n_ref = reference.size();
  report.per_word.reserve(word_groups.size());
  for (const auto& g : word_groups) {
    report.per_word.push_back(score_group(g, weights));
    report.s += g.s_count;
    report.d += g.d_count;
    report.i += g.i_count;
  }

  report.lcs_ratio = lcs_ratio(reference, predicted);
  report.accuracy = accuracy(report.n_ref, report.s, report.d, report.i);
  report.completeness = completeness(report.n_ref, report.d);
  report.pron_score = pron_score(report.accuracy, report.completeness, weights);
  report.harf_score = harf_score(report.lcs_ratio, report.pron_score, weights);
  report.clinical_score = to_clinical(report.harf_score);
  return report;
}

}  // namespace harf
