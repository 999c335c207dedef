#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include "srmr/errors.hpp"
#include "srmr/hmr.hpp"
#include "srmr/likelihood.hpp"
#include "srmr/regression.hpp"

namespace srmr {

namespace {

Index argmax_row(const Matrix& m, Index row) {
  Index best = 0;
  for (Index c = 1; c < m.cols(); ++c) {
    if (m(row, c) > m(row, best)) best = c;
  }
  return best;
}

/// Farthest-point seeds on coordinates: start at the row nearest the overall
/// mean, then repeatedly add the row farthest from all chosen seeds. Ties
/// resolve to the lower row index.
std::vector<Index> farthest_point_seeds(const Matrix& S, Index k) {
  const Index n = S.rows();
  const Eigen::RowVector2d mean = S.colwise().mean();
  std::vector<Index> seeds;
  Index first = 0;
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    const double d = (S.row(i) - mean).squaredNorm();
    if (d < best) {
      best = d;
      first = i;
    }
  }
  seeds.push_back(first);
  Vector min_dist(n);
  for (Index i = 0; i < n; ++i) {
    min_dist(i) = (S.row(i) - S.row(first)).squaredNorm();
  }
  while (static_cast<Index>(seeds.size()) < k) {
    Index next = 0;
    double far = -1.0;
    for (Index i = 0; i < n; ++i) {
      if (min_dist(i) > far) {
        far = min_dist(i);
        next = i;
      }
    }
    seeds.push_back(next);
    for (Index i = 0; i < n; ++i) {
      min_dist(i) = std::min(min_dist(i), (S.row(i) - S.row(next)).squaredNorm());
    }
  }
  return seeds;
}

/// Moves badly-explained rows into any cluster that fell below p+2 members,
/// never draining a donor below p+2. quality(i): lower = worse explained.
void recover_undersized(std::vector<Index>& labels, Index k, Index min_size,
                        const Vector& quality) {
  const Index n = static_cast<Index>(labels.size());
  std::vector<Index> count(static_cast<std::size_t>(k + 1), 0);
  for (Index i = 0; i < n; ++i) ++count[static_cast<std::size_t>(labels[i])];

  IndexSet order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (quality(a) != quality(b)) return quality(a) < quality(b);
    return a < b;
  });

  for (Index c = 1; c <= k; ++c) {
    for (Index i : order) {
      if (count[static_cast<std::size_t>(c)] >= min_size) break;
      const Index from = labels[static_cast<std::size_t>(i)];
      if (from == c) continue;
      // Label 0 rows are free to take; labeled donors must stay viable.
      if (from != 0 && count[static_cast<std::size_t>(from)] <= min_size) continue;
      labels[static_cast<std::size_t>(i)] = c;
      --count[static_cast<std::size_t>(from)];
      ++count[static_cast<std::size_t>(c)];
    }
    if (count[static_cast<std::size_t>(c)] < min_size) {
      throw InfeasibleModelError("cannot keep every cluster at p+2 rows");
    }
  }
}

MixtureModel m_step(const SpatialDataset& ds, const std::vector<Index>& labels,
                    Index k, double lambda, double tau2) {
  MixtureModel model;
  model.lambda = lambda;
  model.tau2 = tau2;
  model.components.resize(static_cast<std::size_t>(k));
  Index total = 0;
  for (Index c = 1; c <= k; ++c) {
    IndexSet members;
    for (Index i = 0; i < ds.n(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == c) members.push_back(i);
    }
    total += static_cast<Index>(members.size());
    const SpatialDataset sub = ds.subset(members);
    const RegressionFit fit = ols(sub.y, sub.X);
    Component& comp = model.components[static_cast<std::size_t>(c - 1)];
    comp.beta = fit.beta;
    comp.sigma2 = fit.sigma2;
    comp.w = sub.S.colwise().mean().transpose();
    comp.pi = static_cast<double>(members.size());  // normalized below
  }
  for (Component& comp : model.components) comp.pi /= static_cast<double>(total);
  return model;
}

}  // namespace

void HmrOptions::validate(Index n, Index p) const {
  if (k < 1) throw InvalidParameterError("k must be at least 1");
  if (lambda < 0.0 || lambda > 1.0) {
    throw InvalidParameterError("lambda must lie in [0,1]");
  }
  if (max_iterations < 1) {
    throw InvalidParameterError("max_iterations must be positive");
  }
  if (tau2 && !(*tau2 > 0.0)) {
    throw InvalidParameterError("tau2 must be positive");
  }
  if (k * (p + 2) > n) {
    std::ostringstream msg;
    msg << "k = " << k << " needs at least " << k * (p + 2) << " rows, got " << n;
    throw InfeasibleModelError(msg.str());
  }
}

IndexSet vote_type2(const Matrix& p_reg, const Matrix& p_spa) {
  if (p_reg.rows() != p_spa.rows() || p_reg.cols() != p_spa.cols()) {
    throw InvalidParameterError("posterior shapes differ");
  }
  IndexSet votes;
  for (Index i = 0; i < p_reg.rows(); ++i) {
    if (argmax_row(p_reg, i) != argmax_row(p_spa, i)) votes.push_back(i);
  }
  return votes;
}

LabelVector HmrState::labels() const {
  Index n = 0;
  for (const IndexSet& c : partition) {
    for (Index i : c) n = std::max(n, i + 1);
  }
  LabelVector out = LabelVector::Zero(n);
  for (std::size_t c = 0; c < partition.size(); ++c) {
    for (Index i : partition[c]) out(i) = static_cast<int>(c + 1);
  }
  return out;
}

HmrState hmr_fit(const SpatialDataset& ds, const HmrOptions& options,
                 const std::optional<Assignment>& init) {
  ds.validate();
  const Index n = ds.n();
  const Index p = ds.p();
  const Index k = options.k;
  options.validate(n, p);
  const double tau2 =
      options.tau2 ? *options.tau2 : default_tau2(ds.S, options.seed);
  const Index min_size = p + 2;

  std::vector<Index> labels(static_cast<std::size_t>(n), 0);
  Vector quality(n);
  if (init) {
    if (init->labels.size() != n) {
      throw InvalidParameterError("initial labels differ from row count");
    }
    for (Index i = 0; i < n; ++i) {
      const int lab = init->labels(i);
      if (lab < 0 || lab > k) {
        throw InvalidParameterError("initial label outside 0..k");
      }
      labels[static_cast<std::size_t>(i)] = lab;
    }
    // Quality for recovery: unlabeled rows are the least explained, labeled
    // rows rank by distance to their current cluster's coordinate mean.
    std::vector<Eigen::Vector2d> centers(static_cast<std::size_t>(k),
                                         Eigen::Vector2d::Zero());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const Index lab = labels[static_cast<std::size_t>(i)];
      if (lab > 0) {
        centers[static_cast<std::size_t>(lab - 1)] += ds.S.row(i).transpose();
        ++counts[static_cast<std::size_t>(lab - 1)];
      }
    }
    for (Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers[static_cast<std::size_t>(c)] /=
            static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }
    for (Index i = 0; i < n; ++i) {
      const Index lab = labels[static_cast<std::size_t>(i)];
      quality(i) = lab == 0 ? -std::numeric_limits<double>::infinity()
                            : -(ds.S.row(i).transpose() -
                                centers[static_cast<std::size_t>(lab - 1)])
                                   .norm();
    }
  } else {
    const std::vector<Index> seeds = farthest_point_seeds(ds.S, k);
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double dist = std::numeric_limits<double>::infinity();
      for (Index c = 0; c < k; ++c) {
        const double d = (ds.S.row(i) - ds.S.row(seeds[static_cast<std::size_t>(c)]))
                             .squaredNorm();
        if (d < dist) {
          dist = d;
          best = c;
        }
      }
      labels[static_cast<std::size_t>(i)] = best + 1;
      quality(i) = -dist;
    }
  }

  recover_undersized(labels, k, min_size, quality);
  MixtureModel model = m_step(ds, labels, k, options.lambda, tau2);

  HmrState state;
  state.converged = false;
  Matrix hybrid;
  IndexSet type2;
  int iter = 0;
  while (iter < options.max_iterations) {
    ++iter;
    const Matrix p_reg = regression_posterior(ds, model);
    const Matrix p_spa = spatial_posterior(ds, model);
    hybrid = hybrid_posterior(p_reg, p_spa, options.lambda);
    type2 = vote_type2(p_reg, p_spa);

    std::vector<Index> next(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      next[static_cast<std::size_t>(i)] = argmax_row(hybrid, i) + 1;
      quality(i) = hybrid.row(i).maxCoeff();
    }
    recover_undersized(next, k, min_size, quality);
    const bool same = next == labels;
    labels = std::move(next);
    model = m_step(ds, labels, k, options.lambda, tau2);
    if (same) {
      state.converged = true;
      break;
    }
  }

  state.model = std::move(model);
  state.partition.assign(static_cast<std::size_t>(k), {});
  for (Index i = 0; i < n; ++i) {
    state.partition[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)] - 1)]
        .push_back(i);
  }
  state.type2 = std::move(type2);
  state.hybrid_posterior = std::move(hybrid);
  state.iterations = iter;
  return state;
}

}  // namespace srmr
