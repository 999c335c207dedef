#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace srmr {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using IndexSet = std::vector<Index>;  // always kept sorted ascending
using LabelVector = Eigen::VectorXi;  // 0 = outlier, k >= 1 = region k

/// Geocoded regression data: response y, design matrix X whose first column
/// is the intercept, and one 2-D coordinate per row.
struct SpatialDataset {
  Vector y;                      // N
  Matrix X;                      // N x (p+1), column 0 all ones
  Matrix S;                      // N x 2 coordinates
  std::vector<std::string> ids;  // optional row identifiers (empty or size N)

  Index n() const { return y.size(); }
  Index p() const { return X.cols() - 1; }

  /// Throws InvalidParameterError on inconsistent shapes, a non-unit
  /// intercept column, or non-finite values.
  void validate() const;

  /// Copy of the rows listed in `rows` (order preserved).
  SpatialDataset subset(const IndexSet& rows) const;
};

/// One mixture component: weight, regression coefficients, noise variance
/// and spatial centroid.
struct Component {
  double pi = 0.0;
  Vector beta;
  double sigma2 = 0.0;
  Eigen::Vector2d w = Eigen::Vector2d::Zero();
};

struct MixtureModel {
  std::vector<Component> components;
  double lambda = 0.5;  // hybrid weight in [0,1]
  double tau2 = 1.0;    // spatial bandwidth, squared coordinate units

  Index k() const { return static_cast<Index>(components.size()); }
  void validate() const;
};

/// Hard assignment of rows to regions plus the two typed outlier sets.
/// labels[i] == 0 exactly when i belongs to type1 or type2.
struct Assignment {
  LabelVector labels;
  IndexSet type1;
  IndexSet type2;

  void validate() const;
};

/// One outer-loop iteration of a fit, for convergence traces.
struct IterationRecord {
  std::size_t type1_count = 0;
  std::size_t type2_count = 0;
  double trimmed_loglik = 0.0;
};

struct FitResult {
  MixtureModel model;
  Assignment assignment;
  double trimmed_loglik = 0.0;
  double bic = 0.0;
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> trace;
};

/// True iff `v` contains `i`; `v` must be sorted ascending.
bool contains(const IndexSet& v, Index i);

/// Sorted union of two sorted index sets.
IndexSet set_union(const IndexSet& a, const IndexSet& b);

}  // namespace srmr
