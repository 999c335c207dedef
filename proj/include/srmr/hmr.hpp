#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "srmr/types.hpp"

namespace srmr {

/// Converged state of the hard-assignment EM pass.
struct HmrState {
  MixtureModel model;
  std::vector<IndexSet> partition;  ///< C_1..C_K, disjoint, covering all rows.
  IndexSet type2;                   ///< rows whose two posteriors disagree.
  Matrix hybrid_posterior;          ///< N x K, row-stochastic.
  int iterations = 0;
  bool converged = false;

  /// Labels 1..K recovered from the partition.
  LabelVector labels() const;
};

/// Tuning knobs for the EM pass.
struct HmrOptions {
  Index k = 2;
  double lambda = 0.5;         ///< weight of the spatial posterior in the mix.
  std::optional<double> tau2;  ///< spatial bandwidth; default from the data.
  int max_iterations = 100;
  std::uint64_t seed = 0;      ///< used only when no initial labels are given.

  void validate(Index n, Index p) const;
};

/// Rows whose regression argmax and spatial argmax disagree. Ties inside
/// either posterior resolve to the lowest component index.
IndexSet vote_type2(const Matrix& p_reg, const Matrix& p_spa);

/// Hard-assignment EM for the hybrid mixture: the E-step blends the
/// regression and spatial posteriors, a C-step assigns every row to its
/// argmax component and records the type-2 votes, and the M-step recomputes
/// weights, per-component OLS and coordinate centroids from the full
/// partition (voted rows included; they are only removed by the outer
/// robust loop). Stops when the partition repeats exactly or after
/// max_iterations.
///
/// Without init, components are seeded by farthest-point coordinates and
/// rows start at their nearest centroid. With init, labels 1..K form the
/// initial partition; label 0 leaves a row out of the first M-step only.
/// A cluster that falls under p+2 rows is re-seeded from the currently
/// worst-explained rows.
HmrState hmr_fit(const SpatialDataset& ds, const HmrOptions& options,
                 const std::optional<Assignment>& init = std::nullopt);

}  // namespace srmr
