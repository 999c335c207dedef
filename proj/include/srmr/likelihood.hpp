#pragma once

#include <cstdint>

#include "srmr/types.hpp"

namespace srmr {

/// Densities are clamped below at this floor so posteriors never hit 0/0.
inline constexpr double kDensityFloor = 1e-300;

/// Variance estimates are floored here to avoid degenerate spikes.
inline constexpr double kSigma2Floor = 1e-8;

/// Normal density of a zero-mean residual, clamped at kDensityFloor.
/// Throws InvalidParameterError for sigma2 <= 0 or non-finite r.
double gaussian_density(double r, double sigma2);

/// N x K row-stochastic matrix of regression memberships:
/// entry (i,k) proportional to pi_k * N(y_i - x_i' beta_k; 0, sigma2_k).
/// Rows where every component density underflows fall back to uniform 1/K;
/// underflow_rows (when given) receives the count of such rows.
Matrix regression_posterior(const SpatialDataset& ds, const MixtureModel& model,
                            Index* underflow_rows = nullptr);

/// N x K row-stochastic matrix of spatial memberships: softmax over
/// components of -|s_i - w_k|^2 / (2 tau2).
Matrix spatial_posterior(const SpatialDataset& ds, const MixtureModel& model);

/// (1 - lambda) * p_reg + lambda * p_spa, elementwise.
Matrix hybrid_posterior(const Matrix& p_reg, const Matrix& p_spa, double lambda);

/// Mixture log-likelihood summed over rows with labels[i] != 0.
/// Throws InvalidParameterError when every row is labeled outlier.
double trimmed_loglik(const SpatialDataset& ds, const MixtureModel& model,
                      const Assignment& assignment);

/// -2 * loglik + q * log(n_used) with q = K*(p+3) - 1. The parameter count
/// covers K*(p+1) coefficients, K variances and K-1 mixing weights; spatial
/// centroids are not likelihood parameters of y and are excluded.
double bic(double trimmed_loglik, Index k, Index p, Index n_used);

/// Default spatial bandwidth: squared median of pairwise coordinate
/// distances over a seeded subsample of min(N, 500) rows. Falls back to 1
/// when the subsample has no positive distance.
double default_tau2(const Matrix& coords, std::uint64_t seed);

}  // namespace srmr
