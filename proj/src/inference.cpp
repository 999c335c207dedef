#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "srmr/errors.hpp"
#include "srmr/inference.hpp"
#include "srmr/rng.hpp"

namespace srmr {

double region_weight(double m, double n, double r) {
  if (!(m > 0.0) || !(n > 0.0) || !(r > 0.0)) {
    throw InvalidParameterError("region_weight needs positive m, n, r");
  }
  return 0.28 * m * n / (r * r);
}

SignificanceReport bootstrap_test(const Vector& residuals,
                                  const IndexSet& outlier_idx,
                                  double sigma_hat, int B, std::uint64_t seed) {
  if (outlier_idx.empty()) {
    throw InvalidParameterError("significance test needs at least one outlier");
  }
  if (B < 1) throw InvalidParameterError("bootstrap needs B >= 1");
  if (!(sigma_hat > 0.0)) throw InvalidParameterError("sigma_hat must be positive");
  const Index n = residuals.size();

  double epsilon0 = std::numeric_limits<double>::infinity();
  for (Index i : outlier_idx) {
    if (i < 0 || i >= n) throw InvalidParameterError("outlier index out of range");
    epsilon0 = std::min(epsilon0, std::abs(residuals(i)));
  }

  // Compensated mean over rounds, accumulated in round order so the result
  // is identical however the rounds were scheduled.
  double sum = 0.0;
  double carry = 0.0;
  for (int b = 0; b < B; ++b) {
    Rng rng(seed, static_cast<std::uint64_t>(b));
    Index exceed = 0;
    for (Index i = 0; i < n; ++i) {
      if (std::abs(rng.normal(0.0, sigma_hat)) > epsilon0) ++exceed;
    }
    const double frac = static_cast<double>(exceed) / static_cast<double>(n);
    const double t = frac - carry;
    const double next = sum + t;
    carry = (next - sum) - t;
    sum = next;
  }

  SignificanceReport report;
  report.p_raw = sum / static_cast<double>(B);
  report.epsilon0 = epsilon0;
  report.sigma_hat = sigma_hat;
  report.B = B;
  report.region_weight = 1.0;
  report.p_corrected = report.p_raw;
  return report;
}

SignificanceReport region_significance(const FitResult& fit,
                                       const SpatialDataset& ds, Index k,
                                       int B, std::uint64_t seed) {
  ds.validate();
  const Index n = ds.n();
  if (fit.assignment.labels.size() != n) {
    throw DataMismatchError("fit labels differ from dataset rows");
  }
  if (k < 1 || k > fit.model.k()) {
    throw InvalidParameterError("component index outside 1..K");
  }
  const Component& comp = fit.model.components[static_cast<std::size_t>(k - 1)];

  IndexSet rows_k;
  for (Index i = 0; i < n; ++i) {
    if (fit.assignment.labels(i) == static_cast<int>(k)) rows_k.push_back(i);
  }
  if (rows_k.empty()) {
    std::ostringstream msg;
    msg << "component " << k << " has no assigned rows";
    throw InvalidParameterError(msg.str());
  }

  // Each regression outlier belongs to the region whose centroid is nearest.
  IndexSet attributed;
  for (Index i : fit.assignment.type1) {
    Index nearest = 1;
    double best = std::numeric_limits<double>::infinity();
    for (Index c = 1; c <= fit.model.k(); ++c) {
      const double d =
          (ds.S.row(i).transpose() -
           fit.model.components[static_cast<std::size_t>(c - 1)].w)
              .squaredNorm();
      if (d < best) {
        best = d;
        nearest = c;
      }
    }
    if (nearest == k) attributed.push_back(i);
  }

  // Covering weight: bounding box of all coordinates, region radius twice
  // the RMS spread of the assigned rows around their centroid.
  const double box_w = ds.S.col(0).maxCoeff() - ds.S.col(0).minCoeff();
  const double box_h = ds.S.col(1).maxCoeff() - ds.S.col(1).minCoeff();
  double ms = 0.0;
  for (Index i : rows_k) {
    ms += (ds.S.row(i).transpose() - comp.w).squaredNorm();
  }
  ms /= static_cast<double>(rows_k.size());
  const double r = 2.0 * std::sqrt(ms);
  const double weight = region_weight(box_w, box_h, r);
  const double sigma_hat = std::sqrt(comp.sigma2);

  if (attributed.empty()) {
    SignificanceReport report;
    report.vacuous = true;
    report.p_raw = 1.0;
    report.epsilon0 = 0.0;
    report.sigma_hat = sigma_hat;
    report.B = B;
    report.region_weight = weight;
    report.p_corrected = std::min(1.0, weight);
    return report;
  }

  // Residual vector spans the region's rows plus its attributed outliers,
  // everything scored under this region's line.
  const IndexSet scored = set_union(rows_k, attributed);
  Vector residuals(static_cast<Index>(scored.size()));
  IndexSet outlier_pos;
  for (Index pos = 0; pos < static_cast<Index>(scored.size()); ++pos) {
    const Index i = scored[static_cast<std::size_t>(pos)];
    residuals(pos) = ds.y(i) - ds.X.row(i).dot(comp.beta);
    if (contains(attributed, i)) outlier_pos.push_back(pos);
  }

  SignificanceReport report =
      bootstrap_test(residuals, outlier_pos, sigma_hat, B, seed);
  report.region_weight = weight;
  report.p_corrected = std::min(1.0, weight * report.p_raw);
  return report;
}

}  // namespace srmr
