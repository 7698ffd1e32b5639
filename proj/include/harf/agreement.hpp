#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace harf {

// Complete n-subject × k-rater grid of clinical scores (0–5 scale).
struct RaterMatrix {
  std::vector<std::string> subject_ids;
  std::vector<std::string> rater_ids;
  std::vector<std::vector<double>> scores;  // scores[subject][rater]

  void validate() const;
  std::vector<double> column(std::size_t rater) const;
  // Per-subject arithmetic mean across raters, on the raw scores.
  std::vector<double> mean_rater() const;
};

// Sample Pearson product-moment correlation. Throws DegenerateInputError
// when either vector is constant.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// 1-based ranks with ties resolved as average (mid) ranks.
std::vector<double> average_ranks(const std::vector<double>& values);

// Spearman rank correlation: Pearson over the average-rank vectors.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Shrout–Fleiss ICC(2,1): two-way random effects, absolute agreement,
// single rater. Requires a complete matrix with n ≥ 2 subjects and
// k ≥ 2 raters.
double icc_2_1(const std::vector<std::vector<double>>& grid);
double icc_2_1(const RaterMatrix& matrix);

// Mean absolute error and root-mean-square error, in score units.
std::pair<double, double> mae_rmse(const std::vector<double>& x,
                                   const std::vector<double>& y);

enum class Rounding { kHalfUpInteger, kNone };

// Percentage of exact agreements and of agreements within one point. By
// default both sides are first rounded half-up to integers.
std::pair<double, double> exact_within1(const std::vector<double>& x,
                                        const std::vector<double>& y,
                                        Rounding rounding = Rounding::kHalfUpInteger);

// One row of the pairwise agreement table. Correlation cells are empty when
// the underlying statistic is undefined for that pair (constant input).
struct AgreementRow {
  std::string group;  // "inter-rater", "vs <rater>", or "vs mean-rater"
  std::string a;
  std::string b;
  std::optional<double> pcc;
  std::optional<double> scc;
  std::optional<double> icc;
  double mae = 0.0;
  double rmse = 0.0;
  double exact_pct = 0.0;
  double within1_pct = 0.0;
};

// The full pairwise battery: every rater-vs-rater pair, every system score
// vector against every rater, and each system against the per-subject mean
// of the raters. System vectors are positionally aligned with subject_ids.
std::vector<AgreementRow> pairwise_report(
    const RaterMatrix& matrix,
    const std::vector<std::pair<std::string, std::vector<double>>>& systems,
    Rounding rounding = Rounding::kHalfUpInteger);

}  // namespace harf
