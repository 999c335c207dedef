#pragma once

#include <cstdint>

#include "srmr/types.hpp"

namespace srmr {

/// Outcome of the bootstrap significance test for one region.
struct SignificanceReport {
  double p_raw = 1.0;         ///< mean exceedance fraction over B rounds.
  double region_weight = 1.0; ///< geometric multiple-testing weight.
  double p_corrected = 1.0;   ///< min(1, region_weight * p_raw).
  int B = 0;                  ///< bootstrap rounds.
  double epsilon0 = 0.0;      ///< smallest absolute outlier residual.
  double sigma_hat = 1.0;     ///< residual scale used for the draws.
  bool vacuous = false;       ///< no outliers attributable: p_raw forced to 1.
};

/// Number of diameter-r disks covering an m x n rectangle: 0.28 * m * n / r^2.
/// Throws InvalidParameterError unless m, n, r > 0.
double region_weight(double m, double n, double r);

/// Bootstrap tail test: epsilon0 = min |residuals[i]| over outlier_idx; each
/// of B rounds draws residuals.size() values from N(0, sigma_hat^2) and
/// scores the fraction exceeding epsilon0 in absolute value; p_raw = mean
/// fraction (compensated sum, round-order independent; round r uses the RNG
/// stream derived from (seed, r)).
SignificanceReport bootstrap_test(const Vector& residuals,
                                  const IndexSet& outlier_idx,
                                  double sigma_hat, int B, std::uint64_t seed);

/// Per-region significance: residuals of component k's rows under beta_k,
/// sigma_hat = sqrt(sigma2_k), outliers = the fit's type-1 rows whose
/// nearest centroid is k. The weight uses the bounding-box side lengths of
/// all coordinates and r = 2 * RMS distance of the region's rows to its
/// centroid. No attributable outliers -> vacuous report with p_raw = 1.
SignificanceReport region_significance(const FitResult& fit,
                                       const SpatialDataset& ds, Index k,
                                       int B, std::uint64_t seed);

}  // namespace srmr
