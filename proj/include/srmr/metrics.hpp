#pragma once

#include <optional>

#include "srmr/types.hpp"

namespace srmr {

/// Fraction of unordered row pairs on which the two labelings agree
/// (together in both or separated in both). Requires length >= 2.
double rand_index(const LabelVector& a, const LabelVector& b);

/// Chance-corrected Rand index from the contingency table. A degenerate
/// denominator (identical all-singleton or all-one-cluster partitions)
/// returns 1.0 and sets *degenerate when given.
double adjusted_rand_index(const LabelVector& a, const LabelVector& b,
                           bool* degenerate = nullptr);

/// Detection accuracy over the union of the two outlier types, with
/// per-type breakdowns. A side with empty truth leaves that accuracy
/// undefined rather than 0/0.
struct OutlierAccuracy {
  double acc = 0;      ///< |predicted ∩ truth| / |truth|, types pooled.
  bool defined = false;
  double type1_acc = 0;
  bool type1_defined = false;
  double type2_acc = 0;
  bool type2_defined = false;
};

OutlierAccuracy outlier_acc(const IndexSet& predicted_type1,
                            const IndexSet& predicted_type2,
                            const IndexSet& true_type1,
                            const IndexSet& true_type2);

/// Sum over true coefficient rows of the squared Euclidean distance to the
/// nearest fitted row (rows may be matched repeatedly). one_to_one instead
/// scores the best bijective matching; diagnostics only.
double pce(const Matrix& true_betas, const Matrix& fitted_betas,
           bool one_to_one = false);

/// All four metrics for one fit against ground truth. pce absent when
/// true_betas is not supplied; acc flags carry the undefined cases.
struct EvalReport {
  double ri = 0;
  double ari = 0;
  bool ari_degenerate = false;
  OutlierAccuracy acc;
  std::optional<double> pce;
};

EvalReport evaluate(const LabelVector& true_labels, const IndexSet& true_type1,
                    const IndexSet& true_type2,
                    const std::optional<Matrix>& true_betas,
                    const LabelVector& fit_labels, const IndexSet& fit_type1,
                    const IndexSet& fit_type2, const Matrix& fit_betas);

}  // namespace srmr
