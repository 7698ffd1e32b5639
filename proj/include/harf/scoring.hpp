#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "harf/phoneme.hpp"
#include "harf/segmentation.hpp"

namespace harf {

// Blend weights for the composite score. Each pair must sum to one.
struct ScoreWeights {
  double w_lcs = 0.6;
  double w_pron = 0.4;
  double w_acc = 0.60;
  double w_comp = 0.40;

  void validate() const;
};

struct WordScore {
  std::string word_text;
  std::size_t n_ref = 0;
  std::size_t s = 0;
  std::size_t d = 0;
  std::size_t i = 0;
  double lcs_ratio = 0.0;
  double accuracy = 0.0;
  double completeness = 0.0;
  double pron_score = 0.0;
  double harf_score = 0.0;
  double clinical_score = 0.0;
};

struct ScoreReport {
  std::size_t n_ref = 0;
  std::size_t s = 0;
  std::size_t d = 0;
  std::size_t i = 0;
  double lcs_ratio = 0.0;
  double accuracy = 0.0;
  double completeness = 0.0;
  double pron_score = 0.0;
  double harf_score = 0.0;
  double clinical_score = 0.0;
  std::vector<WordScore> per_word;
};

// Longest-common-subsequence length over the reference length, scaled to
// [0,100]. Undefined for an empty reference.
double lcs_ratio(const PhonemeSequence& reference,
                 const PhonemeSequence& predicted);

// max(0, (n−s−d−i)/n) × 100
double accuracy(std::size_t n, std::size_t s, std::size_t d, std::size_t i);

// (n−d)/n × 100
double completeness(std::size_t n, std::size_t d);

// w_acc·accuracy + w_comp·completeness
double pron_score(double accuracy, double completeness,
                  const ScoreWeights& weights = {});

// w_lcs·lcs_ratio + w_pron·pron_score
double harf_score(double lcs_ratio, double pron_score,
                  const ScoreWeights& weights = {});

// Linear map from [0,100] onto the 0–5 clinical scale.
double to_clinical(double harf);

// Utterance-level and per-word scores. The word groups must tile both
// sequences; their op counts drive the per-word error terms and sum to the
// utterance's own counts.
ScoreReport score_utterance(const PhonemeSequence& reference,
                            const PhonemeSequence& predicted,
                            const std::vector<WordGroup>& word_groups,
                            const ScoreWeights& weights = {});

}  // namespace harf
