// Acceptance harness: one line per criterion, nonzero exit when any fails.
// Scenario-level fits trim at the contamination share plus a 0.15 margin:
// the posterior argmax routes most gross outliers to whichever cluster fits
// loosest, so one cluster can carry nearly the whole outlier budget, and
// trimmed squares breaks down once that share reaches alpha.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "srmr/inference.hpp"
#include "srmr/likelihood.hpp"
#include "srmr/metrics.hpp"
#include "srmr/regression.hpp"
#include "srmr/rng.hpp"
#include "srmr/simgen.hpp"
#include "srmr/srmr.hpp"

using namespace srmr;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kBaseSeed = 4242;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double mean(const std::vector<double>& v) {
  double sum = 0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

EvalReport fit_and_score(const LabeledDataset& lds, double alpha,
                         std::uint64_t seed) {
  SrmrOptions options;
  options.k = lds.true_betas.rows();
  options.alpha = alpha;
  options.seed = seed;
  const FitResult fit = srmr_fit(lds.data, options);
  Matrix fit_betas(fit.model.k(), 2);
  for (Index c = 0; c < fit.model.k(); ++c) {
    fit_betas.row(c) = fit.model.components[static_cast<std::size_t>(c)].beta.transpose();
  }
  return evaluate(lds.true_labels, lds.true_type1, lds.true_type2,
                  lds.true_betas, fit.assignment.labels, fit.assignment.type1,
                  fit.assignment.type2, fit_betas);
}

// --- 1: accuracy on the default two-region scenario --------------------

Outcome default_scenario_accuracy() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> ri, ari, pce_values;
  for (int rep = 0; rep < 20; ++rep) {
    ScenarioConfig cfg = default_scenario();
    cfg.seed = derive_seed(kBaseSeed, static_cast<std::uint64_t>(rep));
    const LabeledDataset lds = realize(cfg);
    const EvalReport eval = fit_and_score(lds, 0.35, derive_seed(cfg.seed, 1));
    ri.push_back(eval.ri);
    ari.push_back(eval.ari);
    pce_values.push_back(*eval.pce);
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome out;
  out.pass = mean(ri) >= 0.90 && mean(ari) >= 0.80 && mean(pce_values) <= 0.10 &&
             elapsed <= 60.0;
  out.detail = "mean RI " + fmt(mean(ri)) + ", ARI " + fmt(mean(ari)) +
               ", PCE " + fmt(mean(pce_values)) + ", " + fmt(elapsed) + " s";
  return out;
}

// --- 2: detection under type-2 contamination ---------------------------

Outcome type2_robustness() {
  Outcome out{true, ""};
  for (double rate : {0.1, 0.2}) {
    std::vector<double> acc;
    for (int rep = 0; rep < 20; ++rep) {
      ScenarioConfig cfg = default_scenario();
      cfg.type2_rate = rate;
      cfg.seed = derive_seed(kBaseSeed + 1, static_cast<std::uint64_t>(rep) * 2 +
                                                (rate > 0.15 ? 1 : 0));
      const LabeledDataset lds = realize(cfg);
      const EvalReport eval = fit_and_score(lds, 0.35, derive_seed(cfg.seed, 1));
      acc.push_back(eval.acc.acc);
    }
    out.pass = out.pass && mean(acc) >= 0.90;
    if (!out.detail.empty()) out.detail += ", ";
    out.detail += "rate " + fmt(rate) + ": mean ACC " + fmt(mean(acc));
  }
  return out;
}

// --- 3: detection and coefficients under type-1 contamination ----------

Outcome type1_robustness() {
  Outcome out{true, ""};
  for (double share : {0.1, 0.2}) {
    std::vector<double> acc, pce_values;
    for (int rep = 0; rep < 20; ++rep) {
      ScenarioConfig cfg = default_scenario();
      const double inlier = (1.0 - share) / 2.0;
      cfg.mixing = {inlier, inlier, share};
      cfg.seed = derive_seed(kBaseSeed + 2, static_cast<std::uint64_t>(rep) * 2 +
                                                (share > 0.15 ? 1 : 0));
      const LabeledDataset lds = realize(cfg);
      const EvalReport eval =
          fit_and_score(lds, share + 0.15, derive_seed(cfg.seed, 1));
      acc.push_back(eval.acc.acc);
      pce_values.push_back(*eval.pce);
    }
    out.pass = out.pass && mean(acc) >= 0.90 && mean(pce_values) <= 0.15;
    if (!out.detail.empty()) out.detail += ", ";
    out.detail += "rate " + fmt(share) + ": ACC " + fmt(mean(acc)) + " PCE " +
                  fmt(mean(pce_values));
  }
  return out;
}

// --- 4: model-order selection over {1,2,3,4} ---------------------------

Outcome model_order_selection() {
  int hits2 = 0, hits1 = 0;
  for (int rep = 0; rep < 20; ++rep) {
    ScenarioConfig cfg = default_scenario();
    cfg.seed = derive_seed(kBaseSeed + 3, static_cast<std::uint64_t>(rep));
    SrmrOptions options;
    options.alpha = 0.35;
    options.seed = derive_seed(cfg.seed, 1);
    const FitResult fit = select_k(realize(cfg).data, options, 1, 4);
    if (fit.model.k() == 2) ++hits2;
  }
  for (int rep = 0; rep < 20; ++rep) {
    ScenarioConfig cfg = default_scenario();
    cfg.k = 1;
    cfg.betas = {Eigen::Vector2d(1.5, 1.0)};
    cfg.sigmas = {0.1};
    cfg.mixing = {0.8, 0.2};
    cfg.label = "single";
    cfg.seed = derive_seed(kBaseSeed + 4, static_cast<std::uint64_t>(rep));
    SrmrOptions options;
    options.alpha = 0.35;
    options.seed = derive_seed(cfg.seed, 1);
    const FitResult fit = select_k(realize(cfg).data, options, 1, 4);
    if (fit.model.k() == 1) ++hits1;
  }
  Outcome out;
  out.pass = hits2 >= 16 && hits1 >= 16;
  out.detail = "picked K=2 on " + std::to_string(hits2) +
               "/20, K=1 on " + std::to_string(hits1) + "/20";
  return out;
}

// --- 5: randomized LTS matches the exhaustive oracle --------------------

Outcome lts_oracle_equivalence() {
  Rng rng(kBaseSeed + 5);
  int agree = 0;
  for (int round = 0; round < 100; ++round) {
    const Index n = 8 + static_cast<Index>(rng.below(5));  // 8..12
    Vector y(n);
    Matrix X(n, 2);
    for (Index i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = rng.uniform(-3.0, 3.0);
      y(i) = rng.uniform(-1.0, 1.0) + rng.uniform(-2.0, 2.0) * X(i, 1) +
             rng.normal(0.0, 0.4);
    }
    y(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)))) += 25.0;
    const Index h = n - 2;
    const double alpha = 2.5 / static_cast<double>(n);  // floor(alpha n) = 2
    const RegressionFit fast =
        lts(y, X, alpha, derive_seed(kBaseSeed + 5, 100 + round), 50);
    const RegressionFit exact = lts_exact(y, X, h);
    if (std::abs(fast.objective - exact.objective) <= 1e-9) ++agree;
  }
  Outcome out;
  out.pass = agree >= 99;
  out.detail = std::to_string(agree) + "/100 objectives within 1e-9";
  return out;
}

// --- 6: metrics against brute-force re-implementations ------------------

double brute_ri(const LabelVector& a, const LabelVector& b) {
  const Index n = a.size();
  double agree = 0, total = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const bool ta = a(i) == a(j), tb = b(i) == b(j);
      if (ta == tb) agree += 1;
      total += 1;
    }
  }
  return agree / total;
}

double brute_ari(const LabelVector& a, const LabelVector& b) {
  const Index n = a.size();
  double both = 0, in_a = 0, in_b = 0, pairs = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const bool ta = a(i) == a(j), tb = b(i) == b(j);
      both += ta && tb;
      in_a += ta;
      in_b += tb;
      pairs += 1;
    }
  }
  const double expected = in_a * in_b / pairs;
  const double max_index = 0.5 * (in_a + in_b);
  if (max_index == expected) return 1.0;
  return (both - expected) / (max_index - expected);
}

double brute_pce(const Matrix& truth, const Matrix& fitted) {
  double total = 0;
  for (Index i = 0; i < truth.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < fitted.rows(); ++j) {
      best = std::min(best, (truth.row(i) - fitted.row(j)).squaredNorm());
    }
    total += best;
  }
  return total;
}

Outcome metric_oracles() {
  Rng rng(kBaseSeed + 6);
  int bad = 0;
  for (int round = 0; round < 200; ++round) {
    const Index n = 2 + static_cast<Index>(rng.below(29));  // 2..30
    LabelVector a(n), b(n);
    const int ka = 1 + static_cast<int>(rng.below(4));
    const int kb = 1 + static_cast<int>(rng.below(4));
    for (Index i = 0; i < n; ++i) {
      a(i) = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(ka)));
      b(i) = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(kb)));
    }
    const Index rows = 1 + static_cast<Index>(rng.below(4));
    const Index cols = 2 + static_cast<Index>(rng.below(3));
    Matrix tb(rows, cols), fb(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) {
        tb(i, j) = rng.uniform(-3, 3);
        fb(i, j) = rng.uniform(-3, 3);
      }
    }
    if (std::abs(rand_index(a, b) - brute_ri(a, b)) > 1e-12) ++bad;
    if (std::abs(adjusted_rand_index(a, b) - brute_ari(a, b)) > 1e-12) ++bad;
    if (std::abs(pce(tb, fb) - brute_pce(tb, fb)) > 1e-12) ++bad;
  }
  Outcome out;
  out.pass = bad == 0;
  out.detail = std::to_string(bad) + " disagreements over 200 instances";
  return out;
}

// --- 7: posterior row sums and lambda endpoints --------------------------

Outcome posterior_properties() {
  Rng rng(kBaseSeed + 7);
  int bad_sum = 0, bad_end = 0;
  for (int round = 0; round < 1000; ++round) {
    const Index n = 3 + static_cast<Index>(rng.below(38));
    const Index k = 1 + static_cast<Index>(rng.below(4));
    SpatialDataset ds;
    ds.y = Vector(n);
    ds.X = Matrix(n, 2);
    ds.S = Matrix(n, 2);
    for (Index i = 0; i < n; ++i) {
      ds.X(i, 0) = 1.0;
      ds.X(i, 1) = rng.uniform(-4, 4);
      ds.y(i) = rng.uniform(-6, 6);
      ds.S(i, 0) = rng.uniform(-3, 3);
      ds.S(i, 1) = rng.uniform(-3, 3);
    }
    MixtureModel model;
    model.tau2 = rng.uniform(0.05, 5.0);
    double total = 0;
    for (Index c = 0; c < k; ++c) {
      Component comp;
      comp.pi = rng.uniform(0.05, 1.0);
      total += comp.pi;
      comp.beta = Vector{{rng.uniform(-2, 2), rng.uniform(-2, 2)}};
      comp.sigma2 = rng.uniform(0.01, 4.0);
      comp.w = Eigen::Vector2d(rng.uniform(-2, 2), rng.uniform(-2, 2));
      model.components.push_back(comp);
    }
    for (Component& comp : model.components) comp.pi /= total;

    const Matrix p_reg = regression_posterior(ds, model);
    const Matrix p_spa = spatial_posterior(ds, model);
    const Matrix mix = hybrid_posterior(p_reg, p_spa, rng.uniform(0.0, 1.0));
    for (Index i = 0; i < n; ++i) {
      if (std::abs(mix.row(i).sum() - 1.0) > 1e-9) ++bad_sum;
    }
    const Matrix at0 = hybrid_posterior(p_reg, p_spa, 0.0);
    const Matrix at1 = hybrid_posterior(p_reg, p_spa, 1.0);
    if (((at0 - p_reg).array().abs() > 1e-12).any()) ++bad_end;
    if (((at1 - p_spa).array().abs() > 1e-12).any()) ++bad_end;
  }
  Outcome out;
  out.pass = bad_sum == 0 && bad_end == 0;
  out.detail = std::to_string(bad_sum) + " bad row sums, " +
               std::to_string(bad_end) + " bad endpoints over 1000 draws";
  return out;
}

// --- 8: bootstrap tail calibration ---------------------------------------

Outcome bootstrap_calibration() {
  Vector residuals(100);
  residuals.setConstant(0.01);
  residuals(0) = 1.959964;  // two-sided 5% point of the standard normal
  const SignificanceReport rep =
      bootstrap_test(residuals, {0}, 1.0, 2000, kBaseSeed + 8);
  Outcome out;
  out.pass = std::abs(rep.p_raw - 0.05) <= 0.01;
  out.detail = "p_raw " + fmt(rep.p_raw) + " (target 0.05 +/- 0.01)";
  return out;
}

// --- 9: thread-count determinism of the bench table ----------------------

Outcome bench_determinism() {
  const fs::path dir =
      fs::temp_directory_path() / ("srmr-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string a = (dir / "t1.csv").string();
  const std::string b = (dir / "t4.csv").string();
  auto bench = [&](int threads, const std::string& out_path) {
    std::ostringstream cmd;
    cmd << "SRMR_THREADS=" << threads << " " << SRMR_CLI_PATH
        << " bench --preset position --replicates 2 --seed 17 --out " << out_path
        << " >/dev/null 2>&1";
    return std::system(cmd.str().c_str());
  };
  Outcome out;
  if (bench(1, a) != 0 || bench(4, b) != 0) {
    out.detail = "bench invocation failed";
    fs::remove_all(dir);
    return out;
  }
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  out.pass = !sa.str().empty() && sa.str() == sb.str();
  out.detail = out.pass ? "tables byte-identical across SRMR_THREADS 1 and 4"
                        : "tables differ";
  fs::remove_all(dir);
  return out;
}

// --- 10: generator invariants --------------------------------------------

Outcome generator_invariants() {
  int bad_distance = 0, bad_involution = 0;
  for (int round = 0; round < 50; ++round) {
    ScenarioConfig cfg = default_scenario();
    cfg.type1_rate = 0.05;
    cfg.type2_rate = 0.1;
    cfg.seed = derive_seed(kBaseSeed + 10, static_cast<std::uint64_t>(round));
    const LabeledDataset lds = realize(cfg);

    for (Index row : lds.true_type1) {
      for (const auto& beta : cfg.betas) {
        const double dist =
            std::abs(lds.data.y(row) - beta(0) - beta(1) * lds.data.X(row, 1)) /
            std::hypot(1.0, beta(1));
        if (dist <= 2.0) ++bad_distance;
      }
    }

    // Involution: re-negating the flagged coordinates restores the dataset
    // exactly as it stood before the type-2 stage.
    ScenarioConfig no_type2 = cfg;
    no_type2.type2_rate = 0.0;
    const LabeledDataset pre = realize(no_type2);
    Matrix restored = lds.data.S;
    for (Index row : lds.true_type2) restored.row(row) = -restored.row(row);
    if (!restored.isApprox(pre.data.S, 0.0)) ++bad_involution;
    for (Index row : lds.true_type2) {
      if (lds.data.y(row) != pre.data.y(row)) ++bad_involution;
      if (lds.beta_component(row) != pre.beta_component(row)) ++bad_involution;
    }
  }
  Outcome out;
  out.pass = bad_distance == 0 && bad_involution == 0;
  out.detail = std::to_string(bad_distance) + " distance violations, " +
               std::to_string(bad_involution) + " involution violations over 50 datasets";
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"default-scenario-accuracy", default_scenario_accuracy},
      {"type2-robustness", type2_robustness},
      {"type1-robustness", type1_robustness},
      {"model-order-selection", model_order_selection},
      {"lts-oracle-equivalence", lts_oracle_equivalence},
      {"metric-oracles", metric_oracles},
      {"posterior-properties", posterior_properties},
      {"bootstrap-calibration", bootstrap_calibration},
      {"bench-determinism", bench_determinism},
      {"generator-invariants", generator_invariants},
  };

  int failures = 0;
  int index = 0;
  for (const Criterion& criterion : criteria) {
    ++index;
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    if (!outcome.pass) ++failures;
    std::printf("%s %2d. %-26s %s\n", outcome.pass ? "PASS" : "FAIL", index,
                criterion.name, outcome.detail.c_str());
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d of 10 criteria failed\n", failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
