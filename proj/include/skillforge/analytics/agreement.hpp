#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace skillforge::analytics {

struct AgreementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// All ratings fall in one category: chance agreement is 1 and kappa is
// undefined.
struct DegenerateAgreement : AgreementError {
  using AgreementError::AgreementError;
};
// Zero variance anywhere it matters: the ICC denominator vanishes.
struct DegenerateVariance : AgreementError {
  using AgreementError::AgreementError;
};

// Subjects x raters score table. Categorical cells feed kappa; numeric
// cells feed the ICC. No missing cells.
template <class T>
using Matrix = std::vector<std::vector<T>>;

// Fleiss' kappa over a subjects x raters categorical matrix with a fixed
// rater count per subject:
//   P_i   = (sum_j n_ij^2 - n) / (n (n-1))
//   Pbar_e = sum_j p_j^2
//   kappa = (Pbar - Pbar_e) / (1 - Pbar_e)
double fleiss_kappa(const Matrix<int>& ratings);

// ICC(2,1): two-way random-effects, absolute-agreement, single rater.
//   ICC = (MSR - MSE) / (MSR + (k-1) MSE + k (MSC - MSE) / n)
double icc_2_1(const Matrix<double>& ratings);

}  // namespace skillforge::analytics
