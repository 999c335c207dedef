#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "srmr/errors.hpp"
#include "srmr/hmr.hpp"
#include "srmr/likelihood.hpp"
#include "srmr/parallel.hpp"
#include "srmr/regression.hpp"
#include "srmr/rng.hpp"
#include "srmr/srmr.hpp"

namespace srmr {

namespace {

/// Residuals beyond this many corrected scales count as regression outliers.
constexpr double kOutlierScale = 2.5;

struct StartOutcome {
  bool ok = false;
  std::string error;
  MixtureModel model;
  LabelVector labels;
  IndexSet type1;
  IndexSet type2;
  double trimmed_loglik = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  Vector indicator;
  std::vector<IterationRecord> trace;
};

Index argmax_row(const Matrix& m, Index row) {
  Index best = 0;
  for (Index c = 1; c < m.cols(); ++c) {
    if (m(row, c) > m(row, best)) best = c;
  }
  return best;
}

/// Argmax with exact ties decided by a seeded coin. Ties only occur for
/// degenerate rows (the uniform fallback when every density underflows);
/// sending them all to the first component would concentrate the gross
/// outliers in one cluster and could push its contamination past the trim
/// level, so they are spread instead. Row order is fixed and the coin is
/// consumed only on ties, keeping starts deterministic.
Index pick_cluster(const Matrix& posterior, Index row, Rng& rng) {
  Index best = 0;
  Index tied = 1;
  for (Index c = 1; c < posterior.cols(); ++c) {
    if (posterior(row, c) > posterior(row, best)) {
      best = c;
      tied = 1;
    } else if (posterior(row, c) == posterior(row, best)) {
      ++tied;
    }
  }
  if (tied == 1) return best;
  Index pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(tied)));
  for (Index c = best; c < posterior.cols(); ++c) {
    if (posterior(row, c) == posterior(row, best) && pick-- == 0) return c;
  }
  return best;
}

IndexSet complement(Index n, const IndexSet& sorted_rows) {
  IndexSet out;
  out.reserve(static_cast<std::size_t>(n) - sorted_rows.size());
  std::size_t j = 0;
  for (Index i = 0; i < n; ++i) {
    if (j < sorted_rows.size() && sorted_rows[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

/// Initial per-row membership: row-normalized residual densities under the
/// per-component subsample fits (uniform where everything underflows).
Matrix init_posterior(const SpatialDataset& ds,
                      const std::vector<RegressionFit>& fits) {
  const Index n = ds.n();
  const Index k = static_cast<Index>(fits.size());
  Matrix post(n, k);
  for (Index c = 0; c < k; ++c) {
    const Vector resid = ds.y - ds.X * fits[static_cast<std::size_t>(c)].beta;
    for (Index i = 0; i < n; ++i) {
      post(i, c) =
          gaussian_density(resid(i), fits[static_cast<std::size_t>(c)].sigma2);
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (post.row(i).maxCoeff() <= kDensityFloor * 1.0000001) {
      post.row(i).setConstant(1.0 / static_cast<double>(k));
    } else {
      post.row(i) /= post.row(i).sum();
    }
  }
  return post;
}

/// Rows of cluster `members` whose absolute residual under a trimmed fit
/// exceeds kOutlierScale corrected scales. Undersized clusters trim nothing.
IndexSet trim_cluster(const SpatialDataset& ds, const IndexSet& members,
                      double alpha, int lts_starts, std::uint64_t seed) {
  const Index m = static_cast<Index>(members.size());
  const Index p = ds.p();
  if (m < p + 2) return {};
  const Index h = m - static_cast<Index>(std::floor(alpha * static_cast<double>(m)));
  if (h < p + 2) return {};
  const SpatialDataset sub = ds.subset(members);
  const RegressionFit fit = lts(sub.y, sub.X, alpha, seed, lts_starts);
  const double cutoff = kOutlierScale * std::sqrt(fit.sigma2);
  IndexSet flagged;
  for (Index i = 0; i < m; ++i) {
    if (std::abs(fit.residuals(i)) > cutoff) {
      flagged.push_back(members[static_cast<std::size_t>(i)]);
    }
  }
  return flagged;
}

StartOutcome run_start(const SpatialDataset& ds, const SrmrOptions& options,
                       double tau2, int j) {
  const Index n = ds.n();
  const Index p = ds.p();
  const Index k = options.k;
  const std::uint64_t start_seed =
      derive_seed(options.seed, static_cast<std::uint64_t>(j));
  const Index n0 = options.n0
                       ? *options.n0
                       : std::max<Index>(p + 2,
                                         static_cast<Index>(std::ceil(
                                             0.5 * static_cast<double>(n) /
                                             static_cast<double>(k))));

  StartOutcome out;
  try {
    // (a) independent robust fits on random subsamples seed the posteriors.
    std::vector<RegressionFit> seeds_fits;
    seeds_fits.reserve(static_cast<std::size_t>(k));
    for (Index c = 0; c < k; ++c) {
      Rng sampler(start_seed, 100 + static_cast<std::uint64_t>(c));
      IndexSet rows = sampler.sample_without_replacement(n, n0);
      std::sort(rows.begin(), rows.end());
      const SpatialDataset sub = ds.subset(rows);
      seeds_fits.push_back(
          lts(sub.y, sub.X, options.alpha,
              derive_seed(start_seed, 200 + static_cast<std::uint64_t>(c)),
              options.lts_starts));
    }
    Matrix posterior = init_posterior(ds, seeds_fits);

    // (b) trim / refit rounds until the outlier set stabilizes.
    IndexSet u_prev;
    IndexSet u_reg;
    IndexSet u_spa;
    HmrState hmr_state;
    IndexSet survivors;
    bool have_state = false;
    for (int iter = 1; iter <= options.max_outer_iterations; ++iter) {
      out.iterations = iter;
      Rng tie_rng(start_seed, 500 + static_cast<std::uint64_t>(iter));
      std::vector<IndexSet> clusters(static_cast<std::size_t>(k));
      for (Index i = 0; i < n; ++i) {
        clusters[static_cast<std::size_t>(pick_cluster(posterior, i, tie_rng))]
            .push_back(i);
      }
      u_reg.clear();
      for (Index c = 0; c < k; ++c) {
        IndexSet flagged = trim_cluster(
            ds, clusters[static_cast<std::size_t>(c)], options.alpha,
            options.lts_starts,
            derive_seed(start_seed, 1000 + static_cast<std::uint64_t>(iter) * 8 +
                                        static_cast<std::uint64_t>(c)));
        u_reg = set_union(u_reg, flagged);
      }
      survivors = complement(n, u_reg);
      if (static_cast<Index>(survivors.size()) < k * (p + 2)) {
        std::ostringstream msg;
        msg << "start " << j << ": trimming left " << survivors.size()
            << " rows, need " << k * (p + 2);
        throw InfeasibleModelError(msg.str());
      }

      const SpatialDataset sub = ds.subset(survivors);
      // Warm start from the current partition restricted to the survivors.
      Assignment warm;
      warm.labels = LabelVector::Zero(sub.n());
      for (Index si = 0; si < sub.n(); ++si) {
        warm.labels(si) = static_cast<int>(
            argmax_row(posterior, survivors[static_cast<std::size_t>(si)]) + 1);
      }
      HmrOptions hopts;
      hopts.k = k;
      hopts.lambda = options.lambda;
      hopts.tau2 = tau2;
      hopts.max_iterations = options.max_em_iterations;
      hopts.seed = derive_seed(start_seed, 300 + static_cast<std::uint64_t>(iter));
      hmr_state = hmr_fit(sub, hopts, warm);
      have_state = true;

      u_spa.clear();
      for (Index si : hmr_state.type2) {
        u_spa.push_back(survivors[static_cast<std::size_t>(si)]);
      }
      std::sort(u_spa.begin(), u_spa.end());

      const IndexSet u_cur = set_union(u_reg, u_spa);

      // Next-round assignments come from the refreshed model over all rows.
      const Matrix p_reg = regression_posterior(ds, hmr_state.model);
      const Matrix p_spa = spatial_posterior(ds, hmr_state.model);
      posterior = hybrid_posterior(p_reg, p_spa, options.lambda);

      Assignment snapshot;
      snapshot.labels = LabelVector::Zero(n);
      for (Index i = 0; i < n; ++i) {
        snapshot.labels(i) = contains(u_cur, i)
                                 ? 0
                                 : static_cast<int>(argmax_row(posterior, i) + 1);
      }
      IterationRecord rec;
      rec.type1_count = u_reg.size();
      rec.type2_count = u_spa.size();
      rec.trimmed_loglik = trimmed_loglik(ds, hmr_state.model, snapshot);
      out.trace.push_back(rec);

      if (u_cur == u_prev) {
        out.converged = true;
        break;
      }
      u_prev = u_cur;
    }
    if (!have_state) throw InfeasibleModelError("no refit round completed");

    // Final labels: the converged partition for survivors, 0 for outliers.
    out.labels = LabelVector::Zero(n);
    const LabelVector sub_labels = hmr_state.labels();
    for (Index si = 0; si < static_cast<Index>(survivors.size()); ++si) {
      out.labels(survivors[static_cast<std::size_t>(si)]) = sub_labels(si);
    }
    for (Index i : u_spa) out.labels(i) = 0;
    for (Index i : u_reg) out.labels(i) = 0;

    out.model = hmr_state.model;
    out.type1 = u_reg;
    out.type2 = u_spa;
    out.indicator = Vector::Zero(n);
    for (Index i : set_union(u_reg, u_spa)) out.indicator(i) = 1.0;

    Assignment final_assignment;
    final_assignment.labels = out.labels;
    final_assignment.type1 = out.type1;
    final_assignment.type2 = out.type2;
    out.trimmed_loglik = trimmed_loglik(ds, out.model, final_assignment);
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

/// Re-estimates each component by OLS over its final labeled rows, so the
/// reported coefficients are exactly what the surviving partition implies.
/// Clusters left with fewer than p+2 labeled rows keep their EM estimates.
void refresh_model(const SpatialDataset& ds, StartOutcome& win) {
  const Index k = win.model.k();
  const Index p = ds.p();
  Index total = 0;
  std::vector<IndexSet> members(static_cast<std::size_t>(k));
  for (Index i = 0; i < ds.n(); ++i) {
    if (win.labels(i) > 0) {
      members[static_cast<std::size_t>(win.labels(i) - 1)].push_back(i);
      ++total;
    }
  }
  for (Index c = 0; c < k; ++c) {
    const IndexSet& rows = members[static_cast<std::size_t>(c)];
    Component& comp = win.model.components[static_cast<std::size_t>(c)];
    if (static_cast<Index>(rows.size()) >= p + 2) {
      const SpatialDataset sub = ds.subset(rows);
      const RegressionFit fit = ols(sub.y, sub.X);
      comp.beta = fit.beta;
      comp.sigma2 = fit.sigma2;
      comp.w = sub.S.colwise().mean().transpose();
    }
    comp.pi = rows.empty() ? 1e-12
                           : static_cast<double>(rows.size()) /
                                 static_cast<double>(total);
  }
  // Guard the sum-to-one invariant against empty-cluster placeholders.
  double pi_sum = 0.0;
  for (const Component& comp : win.model.components) pi_sum += comp.pi;
  for (Component& comp : win.model.components) comp.pi /= pi_sum;
}

}  // namespace

void SrmrOptions::validate(Index n, Index p) const {
  if (k < 1) throw InvalidParameterError("k must be at least 1");
  if (alpha < 0.0 || alpha >= 0.5) {
    throw InvalidParameterError("trim fraction must lie in [0, 0.5)");
  }
  if (lambda < 0.0 || lambda > 1.0) {
    throw InvalidParameterError("lambda must lie in [0,1]");
  }
  if (starts < 1) throw InvalidParameterError("need at least one start");
  if (max_outer_iterations < 1 || max_em_iterations < 1 || lts_starts < 1) {
    throw InvalidParameterError("iteration budgets must be positive");
  }
  if (tau2 && !(*tau2 > 0.0)) throw InvalidParameterError("tau2 must be positive");
  if (n0) {
    if (*n0 < p + 2) throw InvalidParameterError("n0 must be at least p+2");
    if (*n0 > n) throw InvalidParameterError("n0 exceeds the row count");
  }
  if (k * (p + 2) > n) {
    std::ostringstream msg;
    msg << "k = " << k << " needs at least " << k * (p + 2) << " rows, got " << n;
    throw InfeasibleModelError(msg.str());
  }
}

FitResult srmr_fit(const SpatialDataset& ds, const SrmrOptions& options) {
  ds.validate();
  const Index n = ds.n();
  const Index p = ds.p();
  options.validate(n, p);
  const double tau2 =
      options.tau2 ? *options.tau2 : default_tau2(ds.S, options.seed);

  std::vector<StartOutcome> outcomes(static_cast<std::size_t>(options.starts));
  parallel_for(
      outcomes.size(),
      [&](std::size_t j) {
        outcomes[j] = run_start(ds, options, tau2, static_cast<int>(j));
      },
      options.threads);

  std::vector<std::size_t> ok_starts;
  for (std::size_t j = 0; j < outcomes.size(); ++j) {
    if (outcomes[j].ok) ok_starts.push_back(j);
  }
  if (ok_starts.empty()) {
    std::ostringstream diag;
    for (std::size_t j = 0; j < outcomes.size(); ++j) {
      diag << "start " << j << ": " << outcomes[j].error << "\n";
    }
    throw FitFailedError("every random start failed", diag.str());
  }

  // Consensus: the start whose outlier indicator sits closest to the mean
  // indicator; ties prefer the better likelihood, then the earlier start.
  Vector mean_indicator = Vector::Zero(n);
  for (std::size_t j : ok_starts) mean_indicator += outcomes[j].indicator;
  mean_indicator /= static_cast<double>(ok_starts.size());
  std::size_t winner = ok_starts.front();
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t j : ok_starts) {
    const double dist = (outcomes[j].indicator - mean_indicator).squaredNorm();
    const bool better =
        dist < best_dist ||
        (dist == best_dist &&
         (outcomes[j].trimmed_loglik > outcomes[winner].trimmed_loglik ||
          (outcomes[j].trimmed_loglik == outcomes[winner].trimmed_loglik &&
           j < winner)));
    if (better) {
      best_dist = dist;
      winner = j;
    }
  }

  StartOutcome win = outcomes[winner];
  refresh_model(ds, win);

  FitResult result;
  result.assignment.labels = win.labels;
  result.assignment.type1 = win.type1;
  result.assignment.type2 = win.type2;
  result.assignment.validate();
  result.model = std::move(win.model);
  result.trimmed_loglik = trimmed_loglik(ds, result.model, result.assignment);
  Index n_used = 0;
  for (Index i = 0; i < n; ++i) {
    if (result.assignment.labels(i) != 0) ++n_used;
  }
  result.bic = bic(result.trimmed_loglik, options.k, p, n_used);
  result.iterations = win.iterations;
  result.converged = win.converged;
  result.seed = options.seed;
  result.trace = std::move(win.trace);
  return result;
}

FitResult select_k(const SpatialDataset& ds, const SrmrOptions& options,
                   Index k_min, Index k_max,
                   std::map<Index, double>* bic_by_k) {
  if (k_min < 1 || k_min > k_max) {
    throw InvalidParameterError("k range must satisfy 1 <= k_min <= k_max");
  }
  std::optional<FitResult> best;
  std::ostringstream diag;
  for (Index k = k_min; k <= k_max; ++k) {
    SrmrOptions opts = options;
    opts.k = k;
    try {
      FitResult fit = srmr_fit(ds, opts);
      if (bic_by_k != nullptr) (*bic_by_k)[k] = fit.bic;
      if (!best || fit.bic < best->bic) best = std::move(fit);
    } catch (const std::exception& e) {
      diag << "k = " << k << ": " << e.what() << "\n";
    }
  }
  if (!best) throw FitFailedError("every candidate k failed", diag.str());
  return *std::move(best);
}

}  // namespace srmr
