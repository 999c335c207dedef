#pragma once

#include <cstdint>

#include "srmr/types.hpp"

namespace srmr {

/// Result of a single-component regression fit.
struct RegressionFit {
  Vector beta;           ///< p+1 coefficients, intercept first.
  double sigma2 = 0;     ///< residual variance (MLE over the rows used).
  Vector residuals;      ///< y - X*beta for every input row.
  IndexSet inliers;      ///< rows kept by the fit, ascending.
  IndexSet outliers;     ///< complement of inliers, ascending.
  double objective = 0;  ///< sum of squared residuals over inliers.
};

/// Ordinary least squares of y on X (intercept column included in X),
/// minimum-norm when rank-deficient. sigma2 is RSS/n floored at
/// kSigma2Floor; every row is an inlier.
RegressionFit ols(const Vector& y, const Matrix& X);

/// Least trimmed squares keeping h = n - floor(alpha * n) rows: random
/// elemental starts of size p+2 refined by concentration steps (OLS on the
/// current h best-fitting rows) until the kept set repeats, best trimmed
/// objective over all starts. Exact objective ties prefer the
/// lexicographically smallest inlier set. outliers holds the n-h rows with
/// the largest absolute residuals under the winning beta; sigma2 is the
/// trimmed MLE scaled by the truncated-normal consistency factor.
/// Requires alpha in [0, 0.5) and h >= p+2.
RegressionFit lts(const Vector& y, const Matrix& X, double alpha,
                  std::uint64_t seed, int n_starts = 50);

/// Exhaustive LTS over all C(n, h) row subsets; testing oracle. Refuses
/// n > 20. Same tie-break and outputs as lts().
RegressionFit lts_exact(const Vector& y, const Matrix& X, Index h);

/// Finite-sample consistency factor c(keep) with keep = h/n: the trimmed
/// variance of a standard normal restricted to its central `keep` mass,
/// used to de-bias the LTS scale. c -> 1 as keep -> 1.
double lts_scale_consistency(double keep);

/// Inverse standard normal CDF (rational approximation refined by one
/// Halley step). Domain (0,1).
double inverse_normal_cdf(double prob);

}  // namespace srmr
