#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "srmr/errors.hpp"
#include "srmr/likelihood.hpp"
#include "srmr/rng.hpp"
#include "srmr/types.hpp"

namespace srmr {

namespace {

bool all_finite(const Matrix& m) { return m.array().isFinite().all(); }

}  // namespace

void SpatialDataset::validate() const {
  const Index rows = y.size();
  if (rows < 1) throw InvalidParameterError("dataset is empty");
  if (X.rows() != rows || S.rows() != rows) {
    std::ostringstream msg;
    msg << "row count mismatch: y has " << rows << ", X has " << X.rows()
        << ", S has " << S.rows();
    throw InvalidParameterError(msg.str());
  }
  if (X.cols() < 1) throw InvalidParameterError("X needs an intercept column");
  if (S.cols() != 2) throw InvalidParameterError("S must have two columns");
  if ((X.col(0).array() != 1.0).any()) {
    throw InvalidParameterError("first column of X must be all ones");
  }
  if (!y.array().isFinite().all() || !all_finite(X) || !all_finite(S)) {
    throw InvalidParameterError("non-finite value in dataset");
  }
  if (!ids.empty() && static_cast<Index>(ids.size()) != rows) {
    throw InvalidParameterError("ids length differs from row count");
  }
}

SpatialDataset SpatialDataset::subset(const IndexSet& rows) const {
  SpatialDataset out;
  const Index m = static_cast<Index>(rows.size());
  out.y.resize(m);
  out.X.resize(m, X.cols());
  out.S.resize(m, 2);
  if (!ids.empty()) out.ids.reserve(rows.size());
  for (Index i = 0; i < m; ++i) {
    const Index r = rows[static_cast<std::size_t>(i)];
    if (r < 0 || r >= n()) throw InvalidParameterError("subset row out of range");
    out.y(i) = y(r);
    out.X.row(i) = X.row(r);
    out.S.row(i) = S.row(r);
    if (!ids.empty()) out.ids.push_back(ids[static_cast<std::size_t>(r)]);
  }
  return out;
}

void MixtureModel::validate() const {
  if (components.empty()) throw InvalidParameterError("model has no components");
  if (lambda < 0.0 || lambda > 1.0) {
    throw InvalidParameterError("lambda must lie in [0,1]");
  }
  if (!(tau2 > 0.0)) throw InvalidParameterError("tau2 must be positive");
  double pi_sum = 0.0;
  for (const Component& c : components) {
    if (!(c.pi > 0.0) || c.pi > 1.0) {
      throw InvalidParameterError("component weight outside (0,1]");
    }
    if (!(c.sigma2 > 0.0)) {
      throw InvalidParameterError("component variance must be positive");
    }
    if (!c.beta.array().isFinite().all() || !c.w.array().isFinite().all()) {
      throw InvalidParameterError("non-finite component parameter");
    }
    pi_sum += c.pi;
  }
  if (std::abs(pi_sum - 1.0) > 1e-9) {
    throw InvalidParameterError("mixing weights must sum to 1");
  }
}

void Assignment::validate() const {
  const Index rows = labels.size();
  for (Index i = 0; i < rows; ++i) {
    if (labels(i) < 0) throw InvalidParameterError("negative label");
  }
  for (const IndexSet* s : {&type1, &type2}) {
    if (!std::is_sorted(s->begin(), s->end())) {
      throw InvalidParameterError("outlier sets must be sorted");
    }
    if (std::adjacent_find(s->begin(), s->end()) != s->end()) {
      throw InvalidParameterError("duplicate index in outlier set");
    }
    for (Index i : *s) {
      if (i < 0 || i >= rows) throw InvalidParameterError("outlier index out of range");
    }
  }
  IndexSet both;
  std::set_intersection(type1.begin(), type1.end(), type2.begin(), type2.end(),
                        std::back_inserter(both));
  if (!both.empty()) {
    throw InvalidParameterError("type1 and type2 sets must be disjoint");
  }
  for (Index i = 0; i < rows; ++i) {
    const bool flagged = contains(type1, i) || contains(type2, i);
    if (flagged != (labels(i) == 0)) {
      throw InvalidParameterError("labels and outlier sets disagree");
    }
  }
}

bool contains(const IndexSet& v, Index i) {
  return std::binary_search(v.begin(), v.end(), i);
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

double gaussian_density(double r, double sigma2) {
  if (!(sigma2 > 0.0)) throw InvalidParameterError("sigma2 must be positive");
  if (!std::isfinite(r)) throw InvalidParameterError("residual must be finite");
  const double d =
      std::exp(-r * r / (2.0 * sigma2)) / std::sqrt(2.0 * std::numbers::pi * sigma2);
  return std::max(d, kDensityFloor);
}

Matrix regression_posterior(const SpatialDataset& ds, const MixtureModel& model,
                            Index* underflow_rows) {
  const Index n = ds.n();
  const Index k = model.k();
  Matrix post(n, k);
  for (Index c = 0; c < k; ++c) {
    const Component& comp = model.components[static_cast<std::size_t>(c)];
    if (comp.beta.size() != ds.X.cols()) {
      throw InvalidParameterError("coefficient length differs from X columns");
    }
    const Vector resid = ds.y - ds.X * comp.beta;
    for (Index i = 0; i < n; ++i) {
      post(i, c) = comp.pi * gaussian_density(resid(i), comp.sigma2);
    }
  }
  Index fallbacks = 0;
  for (Index i = 0; i < n; ++i) {
    const double total = post.row(i).sum();
    // With densities floored at kDensityFloor a row can only be "all
    // underflowed", never exactly zero; treat that case as uninformative.
    if (post.row(i).maxCoeff() <= kDensityFloor * 1.0000001) {
      post.row(i).setConstant(1.0 / static_cast<double>(k));
      ++fallbacks;
    } else {
      post.row(i) /= total;
    }
  }
  if (underflow_rows != nullptr) *underflow_rows = fallbacks;
  return post;
}

Matrix spatial_posterior(const SpatialDataset& ds, const MixtureModel& model) {
  if (!(model.tau2 > 0.0)) throw InvalidParameterError("tau2 must be positive");
  const Index n = ds.n();
  const Index k = model.k();
  Matrix sq(n, k);
  for (Index c = 0; c < k; ++c) {
    const auto& w = model.components[static_cast<std::size_t>(c)].w;
    sq.col(c) = (ds.S.rowwise() - w.transpose()).rowwise().squaredNorm();
  }
  Matrix post(n, k);
  for (Index i = 0; i < n; ++i) {
    // Shift by the row minimum so the nearest centroid maps to exp(0).
    const double base = sq.row(i).minCoeff();
    post.row(i) = ((base - sq.row(i).array()) / (2.0 * model.tau2)).exp();
    post.row(i) /= post.row(i).sum();
  }
  return post;
}

Matrix hybrid_posterior(const Matrix& p_reg, const Matrix& p_spa, double lambda) {
  if (p_reg.rows() != p_spa.rows() || p_reg.cols() != p_spa.cols()) {
    throw InvalidParameterError("posterior shapes differ");
  }
  if (lambda < 0.0 || lambda > 1.0) {
    throw InvalidParameterError("lambda must lie in [0,1]");
  }
  return (1.0 - lambda) * p_reg + lambda * p_spa;
}

double trimmed_loglik(const SpatialDataset& ds, const MixtureModel& model,
                      const Assignment& assignment) {
  if (assignment.labels.size() != ds.n()) {
    throw InvalidParameterError("assignment length differs from dataset");
  }
  const Index n = ds.n();
  const Index k = model.k();
  Matrix dens(n, k);
  for (Index c = 0; c < k; ++c) {
    const Component& comp = model.components[static_cast<std::size_t>(c)];
    const Vector resid = ds.y - ds.X * comp.beta;
    for (Index i = 0; i < n; ++i) {
      dens(i, c) = comp.pi * gaussian_density(resid(i), comp.sigma2);
    }
  }
  double total = 0.0;
  Index used = 0;
  for (Index i = 0; i < n; ++i) {
    if (assignment.labels(i) == 0) continue;
    total += std::log(std::max(dens.row(i).sum(), kDensityFloor));
    ++used;
  }
  if (used == 0) {
    throw InvalidParameterError("every row is labeled outlier; likelihood empty");
  }
  return total;
}

double bic(double trimmed_loglik, Index k, Index p, Index n_used) {
  if (k < 1 || p < 0) throw InvalidParameterError("bic needs k >= 1, p >= 0");
  if (n_used < 1) throw InvalidParameterError("bic needs n_used >= 1");
  const double q = static_cast<double>(k * (p + 3) - 1);
  return -2.0 * trimmed_loglik + q * std::log(static_cast<double>(n_used));
}

double default_tau2(const Matrix& coords, std::uint64_t seed) {
  const Index n = coords.rows();
  if (n < 2) return 1.0;
  const Index cap = std::min<Index>(n, 500);
  IndexSet rows;
  if (cap == n) {
    rows.resize(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Index{0});
  } else {
    Rng rng(seed, /*stream=*/7);
    rows = rng.sample_without_replacement(n, cap);
    std::sort(rows.begin(), rows.end());
  }
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(cap * (cap - 1) / 2));
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      dist.push_back((coords.row(rows[a]) - coords.row(rows[b])).norm());
    }
  }
  if (dist.empty()) return 1.0;
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid),
                   dist.end());
  double median = dist[mid];
  if (dist.size() % 2 == 0) {
    const double lower =
        *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  const double tau2 = median * median;
  return tau2 > 0.0 ? tau2 : 1.0;
}

}  // namespace srmr
