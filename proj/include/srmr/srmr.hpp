#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "srmr/types.hpp"

namespace srmr {

/// Tuning knobs for the robust spatial mixture fit.
struct SrmrOptions {
  Index k = 2;
  double alpha = 0.1;           ///< trimming fraction of the per-region LTS.
  double lambda = 0.5;
  std::optional<double> tau2;
  std::optional<Index> n0;      ///< init subsample size; default max(p+2, ceil(0.5*N/K)).
  int starts = 10;              ///< independent random starts pooled by consensus.
  int max_outer_iterations = 20;
  int max_em_iterations = 100;
  int lts_starts = 50;
  std::uint64_t seed = 0;
  int threads = 0;              ///< 0 = SRMR_THREADS env or hardware default.

  void validate(Index n, Index p) const;
};

/// Full robust fit. Each start initialises per-component LTS fits on random
/// subsamples, then alternates: assign rows by posterior, trim per-region
/// regression outliers, refit the mixture on the survivors, and collect the
/// spatial disagreements — until the combined outlier set stabilises. The
/// consensus start (outlier indicator closest to the across-start mean,
/// ties to the higher trimmed log-likelihood then the lower start index)
/// provides the answer; its components are refreshed by OLS on the final
/// per-region survivors. Labels use 1..K with 0 for outlier rows; type1
/// holds the regression-trimmed rows, type2 the posterior disagreements.
FitResult srmr_fit(const SpatialDataset& ds, const SrmrOptions& options);

/// Fits every K in [k_min, k_max] and keeps the lowest BIC (ties -> smaller
/// K). Per-K BIC values go to bic_by_k when given.
FitResult select_k(const SpatialDataset& ds, const SrmrOptions& options,
                   Index k_min, Index k_max,
                   std::map<Index, double>* bic_by_k = nullptr);

}  // namespace srmr
