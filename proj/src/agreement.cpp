#include "harf/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "harf/errors.hpp"

namespace harf {

void RaterMatrix::validate() const {
  if (scores.size() != subject_ids.size())
    throw InvariantViolation("rater matrix has " +
                             std::to_string(scores.size()) + " rows for " +
                             std::to_string(subject_ids.size()) + " subjects");
  for (std::size_t r = 0; r < scores.size(); ++r) {
    if (scores[r].size() != rater_ids.size())
      throw InvariantViolation("subject '" + subject_ids[r] + "' has " +
                               std::to_string(scores[r].size()) +
                               " scores for " +
                               std::to_string(rater_ids.size()) + " raters");
    for (double v : scores[r]) {
      if (!(v >= 0.0 && v <= 5.0))
        throw InvariantViolation("subject '" + subject_ids[r] +
                                 "': score " + std::to_string(v) +
                                 " outside the 0-5 clinical scale");
    }
  }
  std::set<std::string> subj(subject_ids.begin(), subject_ids.end());
  if (subj.size() != subject_ids.size())
    throw InvariantViolation("duplicate subject ids in rater matrix");
  std::set<std::string> raters(rater_ids.begin(), rater_ids.end());
  if (raters.size() != rater_ids.size())
    throw InvariantViolation("duplicate rater ids in rater matrix");
}

std::vector<double> RaterMatrix::column(std::size_t rater) const {
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& row : scores) out.push_back(row.at(rater));
  return out;
}

std::vector<double> RaterMatrix::mean_rater() const {
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& row : scores) {
    if (row.empty()) throw InvariantViolation("rater matrix has no raters");
    out.push_back(std::accumulate(row.begin(), row.end(), 0.0) /
                  static_cast<double>(row.size()));
  }
  return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw DomainError("correlation needs vectors of equal length");
  if (x.size() < 2)
    throw DomainError("correlation needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    double dx = x[k] - mx, dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DegenerateInputError(
        "correlation is undefined for a constant vector");
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(values.size(), 0.0);
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t run = k;
    while (run + 1 < order.size() &&
           values[order[run + 1]] == values[order[k]])
      ++run;
    // Positions k..run (0-based) share the average of ranks k+1..run+1.
    double shared = (static_cast<double>(k + 1) + static_cast<double>(run + 1)) / 2.0;
    for (std::size_t t = k; t <= run; ++t) ranks[order[t]] = shared;
    k = run + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw DomainError("correlation needs vectors of equal length");
  return pearson(average_ranks(x), average_ranks(y));
}

double icc_2_1(const std::vector<std::vector<double>>& grid) {
  const std::size_t n = grid.size();
  if (n < 2) throw DomainError("ICC(2,1) needs at least two subjects");
  const std::size_t k = grid[0].size();
  if (k < 2) throw DomainError("ICC(2,1) needs at least two raters");
  for (const auto& row : grid)
    if (row.size() != k)
      throw DomainError("ICC(2,1) needs a complete rectangular grid");

  const double dn = static_cast<double>(n), dk = static_cast<double>(k);
  std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
  double grand = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      row_mean[r] += grid[r][c];
      col_mean[c] += grid[r][c];
      grand += grid[r][c];
    }
  }
  for (auto& v : row_mean) v /= dk;
  for (auto& v : col_mean) v /= dn;
  grand /= dn * dk;

  double ssr = 0.0, ssc = 0.0, sse = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double dr = row_mean[r] - grand;
    ssr += dr * dr;
  }
  ssr *= dk;
  for (std::size_t c = 0; c < k; ++c) {
    double dc = col_mean[c] - grand;
    ssc += dc * dc;
  }
  ssc *= dn;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      double resid = grid[r][c] - row_mean[r] - col_mean[c] + grand;
      sse += resid * resid;
    }
  }

  const double msr = ssr / (dn - 1.0);
  const double msc = ssc / (dk - 1.0);
  const double mse = sse / ((dn - 1.0) * (dk - 1.0));

  const double denom = msr + (dk - 1.0) * mse + (dk / dn) * (msc - mse);
  if (denom == 0.0)
    throw DegenerateInputError(
        "ICC(2,1) is undefined: no variance to apportion");
  return (msr - mse) / denom;
}

double icc_2_1(const RaterMatrix& matrix) {
  matrix.validate();
  return icc_2_1(matrix.scores);
}

std::pair<double, double> mae_rmse(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  if (x.size() != y.size())
    throw DomainError("error metrics need vectors of equal length");
  if (x.empty()) throw DomainError("error metrics need at least one point");
  double abs_sum = 0.0, sq_sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    double d = x[k] - y[k];
    abs_sum += std::abs(d);
    sq_sum += d * d;
  }
  const double n = static_cast<double>(x.size());
  return {abs_sum / n, std::sqrt(sq_sum / n)};
}

namespace {

double round_half_up(double v) { return std::floor(v + 0.5); }

}  // namespace

std::pair<double, double> exact_within1(const std::vector<double>& x,
                                        const std::vector<double>& y,
                                        Rounding rounding) {
  if (x.size() != y.size())
    throw DomainError("agreement percentages need vectors of equal length");
  if (x.empty())
    throw DomainError("agreement percentages need at least one point");
  std::size_t exact = 0, within = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    double a = x[k], b = y[k];
    if (rounding == Rounding::kHalfUpInteger) {
      a = round_half_up(a);
      b = round_half_up(b);
    }
    if (a == b) ++exact;
    if (std::abs(a - b) <= 1.0) ++within;
  }
  const double n = static_cast<double>(x.size());
  return {100.0 * static_cast<double>(exact) / n,
          100.0 * static_cast<double>(within) / n};
}

namespace {

AgreementRow make_row(std::string group, std::string a, std::string b,
                      const std::vector<double>& va,
                      const std::vector<double>& vb, Rounding rounding) {
  AgreementRow row;
  row.group = std::move(group);
  row.a = std::move(a);
  row.b = std::move(b);
  try {
    row.pcc = pearson(va, vb);
  } catch (const DegenerateInputError&) {
  }
  try {
    row.scc = spearman(va, vb);
  } catch (const DegenerateInputError&) {
  }
  try {
    std::vector<std::vector<double>> grid(va.size());
    for (std::size_t s = 0; s < va.size(); ++s) grid[s] = {va[s], vb[s]};
    row.icc = icc_2_1(grid);
  } catch (const DegenerateInputError&) {
  }
  std::tie(row.mae, row.rmse) = mae_rmse(va, vb);
  std::tie(row.exact_pct, row.within1_pct) = exact_within1(va, vb, rounding);
  return row;
}

}  // namespace

std::vector<AgreementRow> pairwise_report(
    const RaterMatrix& matrix,
    const std::vector<std::pair<std::string, std::vector<double>>>& systems,
    Rounding rounding) {
  matrix.validate();
  const std::size_t n = matrix.subject_ids.size();
  for (const auto& [id, scores] : systems) {
    if (scores.size() != n)
      throw SubjectMismatchError(
          "system '" + id + "' carries " + std::to_string(scores.size()) +
              " scores for " + std::to_string(n) + " subjects",
          {id});
  }

  std::vector<AgreementRow> rows;

  // Every rater against every later rater, in matrix order.
  for (std::size_t a = 0; a < matrix.rater_ids.size(); ++a)
    for (std::size_t b = a + 1; b < matrix.rater_ids.size(); ++b)
      rows.push_back(make_row("inter-rater", matrix.rater_ids[a],
                              matrix.rater_ids[b], matrix.column(a),
                              matrix.column(b), rounding));

  // Systems against each individual rater, grouped by rater.
  for (std::size_t r = 0; r < matrix.rater_ids.size(); ++r) {
    auto rater_scores = matrix.column(r);
    for (const auto& [id, scores] : systems)
      rows.push_back(make_row("vs " + matrix.rater_ids[r], id,
                              matrix.rater_ids[r], scores, rater_scores,
                              rounding));
  }

  // Systems against the per-subject mean of the raters.
  auto mean = matrix.mean_rater();
  for (const auto& [id, scores] : systems)
    rows.push_back(
        make_row("vs mean-rater", id, "mean-rater", scores, mean, rounding));

  return rows;
}

}  // namespace harf
