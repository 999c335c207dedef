#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include "srmr/errors.hpp"
#include "srmr/likelihood.hpp"
#include "srmr/regression.hpp"
#include "srmr/rng.hpp"

namespace srmr {

namespace {

void check_shapes(const Vector& y, const Matrix& X) {
  if (y.size() < 1) throw InvalidParameterError("regression on empty data");
  if (X.rows() != y.size()) {
    throw InvalidParameterError("X rows differ from y length");
  }
  if (X.cols() < 1) throw InvalidParameterError("X has no columns");
}

Vector solve_ols(const Vector& y, const Matrix& X) {
  // Rank-revealing decomposition: minimum-norm solution when columns are
  // dependent, so degenerate subsets never abort a fit.
  return X.completeOrthogonalDecomposition().solve(y);
}

/// Indices of the h smallest squared residuals, ascending; ties at the
/// boundary resolve to the smaller row index so the kept set is unique.
IndexSet smallest_h(const Vector& residuals, Index h) {
  const Index n = residuals.size();
  IndexSet order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double ra = residuals(a) * residuals(a);
    const double rb = residuals(b) * residuals(b);
    if (ra != rb) return ra < rb;
    return a < b;
  });
  order.resize(static_cast<std::size_t>(h));
  std::sort(order.begin(), order.end());
  return order;
}

RegressionFit fit_on_subset(const Vector& y, const Matrix& X,
                            const IndexSet& keep) {
  const Index m = static_cast<Index>(keep.size());
  Vector ys(m);
  Matrix Xs(m, X.cols());
  for (Index i = 0; i < m; ++i) {
    ys(i) = y(keep[static_cast<std::size_t>(i)]);
    Xs.row(i) = X.row(keep[static_cast<std::size_t>(i)]);
  }
  RegressionFit fit;
  fit.beta = solve_ols(ys, Xs);
  fit.residuals = y - X * fit.beta;
  fit.inliers = keep;
  double rss = 0.0;
  for (Index i : keep) rss += fit.residuals(i) * fit.residuals(i);
  fit.objective = rss;
  return fit;
}

IndexSet complement(Index n, const IndexSet& keep) {
  IndexSet out;
  out.reserve(static_cast<std::size_t>(n) - keep.size());
  std::size_t j = 0;
  for (Index i = 0; i < n; ++i) {
    if (j < keep.size() && keep[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace

RegressionFit ols(const Vector& y, const Matrix& X) {
  check_shapes(y, X);
  const Index n = y.size();
  IndexSet all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  RegressionFit fit = fit_on_subset(y, X, all);
  fit.sigma2 = std::max(fit.objective / static_cast<double>(n), kSigma2Floor);
  return fit;
}

RegressionFit lts(const Vector& y, const Matrix& X, double alpha,
                  std::uint64_t seed, int n_starts) {
  check_shapes(y, X);
  if (alpha < 0.0 || alpha >= 0.5) {
    throw InvalidParameterError("trim fraction must lie in [0, 0.5)");
  }
  if (n_starts < 1) throw InvalidParameterError("lts needs at least one start");
  const Index n = y.size();
  const Index p = X.cols() - 1;
  const Index elemental = p + 2;
  if (n < elemental) {
    std::ostringstream msg;
    msg << "lts needs at least p+2 = " << elemental << " rows, got " << n;
    throw InvalidParameterError(msg.str());
  }
  const Index h = n - static_cast<Index>(std::floor(alpha * static_cast<double>(n)));
  if (h < elemental) {
    throw InvalidParameterError("trim fraction leaves fewer than p+2 rows");
  }

  RegressionFit best;
  bool have_best = false;
  if (h == n) {
    // No trimming: a single concentration pass from OLS is already optimal.
    best = ols(y, X);
    have_best = true;
  } else {
    constexpr int kMaxCSteps = 50;
    for (int s = 0; s < n_starts; ++s) {
      Rng rng(seed, static_cast<std::uint64_t>(s));
      IndexSet start = rng.sample_without_replacement(n, elemental);
      std::sort(start.begin(), start.end());
      RegressionFit cand = fit_on_subset(y, X, start);
      IndexSet keep = smallest_h(cand.residuals, h);
      for (int step = 0; step < kMaxCSteps; ++step) {
        cand = fit_on_subset(y, X, keep);
        IndexSet next = smallest_h(cand.residuals, h);
        if (next == keep) break;
        keep = std::move(next);
      }
      cand = fit_on_subset(y, X, keep);
      if (!have_best || cand.objective < best.objective ||
          (cand.objective == best.objective && cand.inliers < best.inliers)) {
        best = std::move(cand);
        have_best = true;
      }
    }
  }

  best.outliers = complement(n, best.inliers);
  const double keep_fraction = static_cast<double>(h) / static_cast<double>(n);
  const double c = lts_scale_consistency(keep_fraction);
  best.sigma2 =
      std::max(best.objective / static_cast<double>(h) / c, kSigma2Floor);
  return best;
}

RegressionFit lts_exact(const Vector& y, const Matrix& X, Index h) {
  check_shapes(y, X);
  const Index n = y.size();
  const Index p = X.cols() - 1;
  if (n > 20) throw InvalidParameterError("exhaustive search refuses n > 20");
  if (h < p + 2 || h > n) {
    throw InvalidParameterError("subset size must lie in [p+2, n]");
  }

  // Subsets in lexicographic order, so the first strict minimum seen is
  // already the tie-broken answer.
  IndexSet keep(static_cast<std::size_t>(h));
  std::iota(keep.begin(), keep.end(), Index{0});
  RegressionFit best;
  bool have_best = false;
  for (;;) {
    RegressionFit cand = fit_on_subset(y, X, keep);
    if (!have_best || cand.objective < best.objective) {
      best = std::move(cand);
      have_best = true;
    }
    // Advance to the next combination.
    Index i = h - 1;
    while (i >= 0 && keep[static_cast<std::size_t>(i)] == n - h + i) --i;
    if (i < 0) break;
    ++keep[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < h; ++j) {
      keep[static_cast<std::size_t>(j)] = keep[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  best.outliers = complement(n, best.inliers);
  const double keep_fraction = static_cast<double>(h) / static_cast<double>(n);
  const double c = lts_scale_consistency(keep_fraction);
  best.sigma2 =
      std::max(best.objective / static_cast<double>(h) / c, kSigma2Floor);
  return best;
}

double lts_scale_consistency(double keep) {
  if (!(keep > 0.0) || keep > 1.0) {
    throw InvalidParameterError("keep fraction must lie in (0, 1]");
  }
  if (keep >= 1.0 - 1e-12) return 1.0;
  // Variance of a standard normal truncated to its central `keep` mass:
  // keep - 2 q phi(q), normalized by the mass itself.
  const double q = inverse_normal_cdf(0.5 * (1.0 + keep));
  const double phi = std::exp(-0.5 * q * q) / std::sqrt(2.0 * std::numbers::pi);
  return 1.0 - 2.0 * q * phi / keep;
}

double inverse_normal_cdf(double prob) {
  if (!(prob > 0.0) || !(prob < 1.0)) {
    throw InvalidParameterError("probability must lie in (0,1)");
  }
  // Rational approximation in three regimes, then one Halley refinement.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (prob < p_low) {
    const double q = std::sqrt(-2.0 * std::log(prob));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (prob <= 1.0 - p_low) {
    const double q = prob - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - prob));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - prob;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace srmr
