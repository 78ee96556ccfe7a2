#include "skillforge/analytics/agreement.hpp"

#include <cmath>
#include <map>

namespace skillforge::analytics {

double fleiss_kappa(const Matrix<int>& ratings) {
  size_t subjects = ratings.size();
  if (subjects < 2)
    throw AgreementError("fleiss_kappa needs at least 2 subjects");
  size_t raters = ratings[0].size();
  if (raters < 2) throw AgreementError("fleiss_kappa needs at least 2 raters");
  for (const auto& row : ratings)
    if (row.size() != raters)
      throw AgreementError("fleiss_kappa needs a fixed rater count");

  // Per-subject category counts n_ij.
  std::map<int, double> totals;
  double p_bar = 0.0;
  double n = static_cast<double>(raters);
  for (const auto& row : ratings) {
    std::map<int, int> counts;
    for (int cell : row) ++counts[cell];
    double agree = 0.0;
    for (const auto& [category, count] : counts) {
      agree += static_cast<double>(count) * count;
      totals[category] += count;
    }
    p_bar += (agree - n) / (n * (n - 1.0));
  }
  p_bar /= static_cast<double>(subjects);

  double pe = 0.0;
  double total = static_cast<double>(subjects) * n;
  for (const auto& [category, count] : totals) {
    double p = count / total;
    pe += p * p;
  }
  if (pe >= 1.0)
    throw DegenerateAgreement("all ratings share one category; kappa undefined");
  return (p_bar - pe) / (1.0 - pe);
}

double icc_2_1(const Matrix<double>& ratings) {
  size_t n = ratings.size();  // subjects
  if (n < 2) throw AgreementError("icc_2_1 needs at least 2 subjects");
  size_t k = ratings[0].size();  // raters
  if (k < 2) throw AgreementError("icc_2_1 needs at least 2 raters");
  for (const auto& row : ratings)
    if (row.size() != k) throw AgreementError("icc_2_1 needs a full matrix");

  double grand = 0.0;
  for (const auto& row : ratings)
    for (double cell : row) grand += cell;
  grand /= static_cast<double>(n * k);

  std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < k; ++j) {
      row_mean[i] += ratings[i][j];
      col_mean[j] += ratings[i][j];
    }
    row_mean[i] /= static_cast<double>(k);
  }
  for (size_t j = 0; j < k; ++j) col_mean[j] /= static_cast<double>(n);

  // Two-way ANOVA decomposition.
  double ss_rows = 0.0, ss_cols = 0.0, ss_error = 0.0, ss_total = 0.0;
  for (size_t i = 0; i < n; ++i)
    ss_rows += (row_mean[i] - grand) * (row_mean[i] - grand);
  ss_rows *= static_cast<double>(k);
  for (size_t j = 0; j < k; ++j)
    ss_cols += (col_mean[j] - grand) * (col_mean[j] - grand);
  ss_cols *= static_cast<double>(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < k; ++j) {
      double dev = ratings[i][j] - grand;
      ss_total += dev * dev;
      double resid = ratings[i][j] - row_mean[i] - col_mean[j] + grand;
      ss_error += resid * resid;
    }

  if (ss_total == 0.0)
    throw DegenerateVariance("constant matrix; ICC undefined");

  double msr = ss_rows / static_cast<double>(n - 1);
  double msc = ss_cols / static_cast<double>(k - 1);
  double mse = ss_error / static_cast<double>((n - 1) * (k - 1));

  double denom = msr + (static_cast<double>(k) - 1.0) * mse +
                 static_cast<double>(k) * (msc - mse) / static_cast<double>(n);
  if (denom == 0.0)
    throw DegenerateVariance("zero denominator; ICC undefined");
  return (msr - mse) / denom;
}

}  // namespace skillforge::analytics
