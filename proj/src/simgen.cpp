#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "srmr/errors.hpp"
#include "srmr/rng.hpp"
#include "srmr/simgen.hpp"

namespace srmr {

namespace {

constexpr double kMinLineDistance = 2.0;
constexpr int kMaxProposals = 1000000;

double line_distance(double x, double y, const Eigen::Vector2d& beta) {
  return std::abs(y - beta(0) - beta(1) * x) / std::hypot(1.0, beta(1));
}

bool far_from_every_line(double x, double y, const Matrix& betas) {
  for (Index k = 0; k < betas.rows(); ++k) {
    if (line_distance(x, y, betas.row(k).transpose()) <= kMinLineDistance) {
      return false;
    }
  }
  return true;
}

/// Integer split of n by the given shares: floors first, the remainder goes
/// to the largest fractional parts (ties to the earlier bucket).
std::vector<Index> largest_remainder_split(Index n,
                                           const std::vector<double>& shares) {
  std::vector<Index> counts(shares.size());
  std::vector<double> fractions(shares.size());
  Index assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double exact = static_cast<double>(n) * shares[i];
    counts[i] = static_cast<Index>(std::floor(exact + 1e-12));
    fractions[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (fractions[a] != fractions[b]) return fractions[a] > fractions[b];
    return a < b;
  });
  for (Index r = 0; r < n - assigned; ++r) {
    ++counts[order[static_cast<std::size_t>(r) % order.size()]];
  }
  return counts;
}

struct Box {
  double x_lo, x_hi, y_lo, y_hi;
};

Box bounding_box(const Matrix& S) {
  return {S.col(0).minCoeff(), S.col(0).maxCoeff(), S.col(1).minCoeff(),
          S.col(1).maxCoeff()};
}

/// One accepted regression-outlier row: (x, y) proposals from the fixed
/// box until the point clears every line, coordinates uniform over `box`.
void draw_outlier_row(Rng& rng, const Matrix& betas, const Box& box, double& x,
                      double& y, double& sx, double& sy) {
  int proposals = 0;
  for (;;) {
    x = rng.uniform(-2.0, 2.0);
    y = rng.uniform(-8.0, 8.0);
    if (far_from_every_line(x, y, betas)) break;
    if (++proposals >= kMaxProposals) {
      throw GenerationStuckError(
          "rejection sampling found no point 2 units from every line");
    }
  }
  sx = rng.uniform(box.x_lo, box.x_hi);
  sy = rng.uniform(box.y_lo, box.y_hi);
}

}  // namespace

std::string layout_name(SpatialLayout layout) {
  switch (layout) {
    case SpatialLayout::kNormalDiagonal: return "normal-diagonal";
    case SpatialLayout::kNormalHorizontal: return "normal-horizontal";
    case SpatialLayout::kUniform: return "uniform";
  }
  throw InvalidParameterError("unknown layout");
}

SpatialLayout layout_from_name(const std::string& name) {
  if (name == "normal-diagonal") return SpatialLayout::kNormalDiagonal;
  if (name == "normal-horizontal") return SpatialLayout::kNormalHorizontal;
  if (name == "uniform") return SpatialLayout::kUniform;
  throw InvalidParameterError(
      "unknown layout '" + name +
      "'; expected normal-diagonal, normal-horizontal or uniform");
}

void ScenarioConfig::validate() const {
  if (k < 1) throw InvalidParameterError("config needs k >= 1");
  if (n < 1) throw InvalidParameterError("config needs n >= 1");
  if (static_cast<Index>(betas.size()) != k) {
    throw InvalidParameterError("betas must list one (intercept, slope) per component");
  }
  if (static_cast<Index>(sigmas.size()) != k) {
    throw InvalidParameterError("sigmas must list one entry per component");
  }
  for (double s : sigmas) {
    if (s < 0.0 || !std::isfinite(s)) {
      throw InvalidParameterError("sigmas must be non-negative");
    }
  }
  if (static_cast<Index>(mixing.size()) != k + 1) {
    throw InvalidParameterError(
        "mixing needs k+1 shares (components plus outliers)");
  }
  double total = 0.0;
  for (double m : mixing) {
    if (m < 0.0) throw InvalidParameterError("mixing shares must be non-negative");
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidParameterError("mixing shares must sum to 1");
  }
  if (!(spatial_cov(0) > 0.0) || !(spatial_cov(1) > 0.0)) {
    throw InvalidParameterError("spatial covariance diagonal must be positive");
  }
  if (type1_rate < 0.0 || type1_rate >= 0.5 || type2_rate < 0.0 ||
      type2_rate >= 0.5) {
    throw InvalidParameterError("outlier rates must lie in [0, 0.5)");
  }
  centers();  // throws when the layout cannot host k regions
}

std::vector<Eigen::Vector2d> ScenarioConfig::centers() const {
  static const std::vector<Eigen::Vector2d> diagonal = {
      {1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}, {-1.0, 1.0}};
  static const std::vector<Eigen::Vector2d> horizontal = {
      {0.5, 0.0}, {-0.5, 0.0}, {1.5, 0.0}, {-1.5, 0.0}};
  const auto& table =
      layout == SpatialLayout::kNormalHorizontal ? horizontal : diagonal;
  if (static_cast<std::size_t>(k) > table.size()) {
    throw InvalidParameterError("layouts define at most four region centers");
  }
  return {table.begin(), table.begin() + static_cast<std::ptrdiff_t>(k)};
}

Matrix ScenarioConfig::beta_matrix() const {
  Matrix out(k, 2);
  for (Index c = 0; c < k; ++c) {
    out.row(c) = betas[static_cast<std::size_t>(c)].transpose();
  }
  return out;
}

void LabeledDataset::validate() const {
  data.validate();
  const Index n = data.n();
  if (true_labels.size() != n || beta_component.size() != n) {
    throw InvalidParameterError("truth vectors differ from row count");
  }
  for (const IndexSet* s : {&true_type1, &true_type2}) {
    if (!std::is_sorted(s->begin(), s->end())) {
      throw InvalidParameterError("truth outlier sets must be sorted");
    }
    for (Index i : *s) {
      if (i < 0 || i >= n) throw InvalidParameterError("truth index out of range");
    }
  }
  IndexSet overlap;
  std::set_intersection(true_type1.begin(), true_type1.end(),
                        true_type2.begin(), true_type2.end(),
                        std::back_inserter(overlap));
  if (!overlap.empty()) {
    throw InvalidParameterError("a row cannot be both outlier types");
  }
  for (Index i = 0; i < n; ++i) {
    const bool flagged = contains(true_type1, i) || contains(true_type2, i);
    if (flagged != (true_labels(i) == 0)) {
      throw InvalidParameterError("true labels disagree with outlier sets");
    }
    if (contains(true_type1, i) && beta_component(i) != 0) {
      throw InvalidParameterError("regression outliers have no generating line");
    }
    if (contains(true_type2, i) && beta_component(i) == 0) {
      throw InvalidParameterError("reversed rows must keep their line identity");
    }
  }
  // Every regression outlier must clear every configured line by 2 units.
  for (Index i : true_type1) {
    for (Index c = 0; c < true_betas.rows(); ++c) {
      if (line_distance(data.X(i, 1), data.y(i),
                        true_betas.row(c).transpose()) <= kMinLineDistance) {
        throw InvalidParameterError(
            "regression outlier sits within 2 units of a line");
      }
    }
  }
}

LabeledDataset generate(const ScenarioConfig& cfg) {
  cfg.validate();
  const Index n = cfg.n;
  const Index k = cfg.k;
  const std::vector<Index> counts = largest_remainder_split(n, cfg.mixing);
  const Index outlier_count = counts[static_cast<std::size_t>(k)];
  const Index inlier_count = n - outlier_count;
  if (outlier_count > 0 && inlier_count == 0) {
    throw InvalidParameterError("outlier shares need at least one inlier row");
  }
  const std::vector<Eigen::Vector2d> centers = cfg.centers();
  const Matrix betas = cfg.beta_matrix();

  LabeledDataset lds;
  lds.data.y.resize(n);
  lds.data.X = Matrix::Ones(n, 2);
  lds.data.S.resize(n, 2);
  lds.true_labels = LabelVector::Zero(n);
  lds.beta_component = LabelVector::Zero(n);
  lds.true_betas = betas;

  Rng rng(cfg.seed);
  Index row = 0;
  for (Index c = 0; c < k; ++c) {
    const Eigen::Vector2d& mu = centers[static_cast<std::size_t>(c)];
    const double sigma = cfg.sigmas[static_cast<std::size_t>(c)];
    const double half_w = std::sqrt(3.0 * cfg.spatial_cov(0));
    const double half_h = std::sqrt(3.0 * cfg.spatial_cov(1));
    for (Index r = 0; r < counts[static_cast<std::size_t>(c)]; ++r, ++row) {
      const double x = rng.uniform(-2.0, 2.0);
      lds.data.X(row, 1) = x;
      lds.data.y(row) =
          betas(c, 0) + betas(c, 1) * x + (sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0);
      if (cfg.layout == SpatialLayout::kUniform) {
        lds.data.S(row, 0) = mu(0) + rng.uniform(-half_w, half_w);
        lds.data.S(row, 1) = mu(1) + rng.uniform(-half_h, half_h);
      } else {
        lds.data.S(row, 0) = rng.normal(mu(0), std::sqrt(cfg.spatial_cov(0)));
        lds.data.S(row, 1) = rng.normal(mu(1), std::sqrt(cfg.spatial_cov(1)));
      }
      lds.true_labels(row) = static_cast<int>(c + 1);
      lds.beta_component(row) = static_cast<int>(c + 1);
    }
  }

  if (outlier_count > 0) {
    const Box box = bounding_box(lds.data.S.topRows(inlier_count));
    for (Index r = 0; r < outlier_count; ++r, ++row) {
      double x, y, sx, sy;
      draw_outlier_row(rng, betas, box, x, y, sx, sy);
      lds.data.X(row, 1) = x;
      lds.data.y(row) = y;
      lds.data.S(row, 0) = sx;
      lds.data.S(row, 1) = sy;
      lds.true_type1.push_back(row);
    }
  }

  lds.validate();
  return lds;
}

LabeledDataset inject_type1(const LabeledDataset& lds, double rate,
                            std::uint64_t seed) {
  if (rate < 0.0 || rate >= 0.5) {
    throw InvalidParameterError("outlier rates must lie in [0, 0.5)");
  }
  const Index n = lds.data.n();
  const Index extra = static_cast<Index>(std::llround(rate * static_cast<double>(n)));
  if (extra == 0) return lds;

  LabeledDataset out = lds;
  out.data.y.conservativeResize(n + extra);
  out.data.X.conservativeResize(n + extra, Eigen::NoChange);
  out.data.S.conservativeResize(n + extra, Eigen::NoChange);
  out.true_labels.conservativeResize(n + extra);
  out.beta_component.conservativeResize(n + extra);
  if (!out.data.ids.empty()) {
    for (Index r = 0; r < extra; ++r) {
      out.data.ids.push_back("injected-" + std::to_string(n + r));
    }
  }

  const Box box = bounding_box(lds.data.S);
  Rng rng(seed);
  for (Index r = 0; r < extra; ++r) {
    const Index row = n + r;
    double x, y, sx, sy;
    draw_outlier_row(rng, lds.true_betas, box, x, y, sx, sy);
    out.data.X(row, 0) = 1.0;
    out.data.X(row, 1) = x;
    out.data.y(row) = y;
    out.data.S(row, 0) = sx;
    out.data.S(row, 1) = sy;
    out.true_labels(row) = 0;
    out.beta_component(row) = 0;
    out.true_type1.push_back(row);
  }
  out.validate();
  return out;
}

LabeledDataset inject_type2(const LabeledDataset& lds, double rate,
                            std::uint64_t seed) {
  if (rate < 0.0 || rate >= 0.5) {
    throw InvalidParameterError("outlier rates must lie in [0, 0.5)");
  }
  const Index n = lds.data.n();
  const Index count = static_cast<Index>(std::llround(rate * static_cast<double>(n)));
  if (count == 0) return lds;

  IndexSet pool;
  for (Index i = 0; i < n; ++i) {
    if (lds.true_labels(i) > 0) pool.push_back(i);
  }
  if (count > static_cast<Index>(pool.size())) {
    throw InvalidParameterError("not enough inlier rows to reverse");
  }

  Rng rng(seed);
  IndexSet picks =
      rng.sample_without_replacement(static_cast<Index>(pool.size()), count);
  IndexSet chosen;
  chosen.reserve(picks.size());
  for (Index p : picks) chosen.push_back(pool[static_cast<std::size_t>(p)]);
  std::sort(chosen.begin(), chosen.end());

  LabeledDataset out = lds;
  for (Index i : chosen) {
    out.data.S.row(i) = -out.data.S.row(i);
    out.true_labels(i) = 0;
  }
  out.true_type2 = set_union(out.true_type2, chosen);
  out.validate();
  return out;
}

LabeledDataset realize(const ScenarioConfig& cfg) {
  LabeledDataset lds = generate(cfg);
  lds = inject_type1(lds, cfg.type1_rate, derive_seed(cfg.seed, 101));
  lds = inject_type2(lds, cfg.type2_rate, derive_seed(cfg.seed, 102));
  return lds;
}

ScenarioConfig default_scenario(BetaReading reading) {
  ScenarioConfig cfg;
  cfg.label = "default";
  cfg.k = 2;
  cfg.n = 200;
  if (reading == BetaReading::kInterceptSlope) {
    cfg.betas = {{1.5, 1.0}, {1.5, -1.2}};
  } else {
    cfg.betas = {{0.0, 1.5}, {0.0, 1.0}};
  }
  cfg.sigmas = {0.1, 0.1};
  cfg.mixing = {0.4, 0.4, 0.2};
  cfg.layout = SpatialLayout::kNormalDiagonal;
  cfg.spatial_cov = {0.1, 0.1};
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"components", "sample-size", "noise",      "mixing", "coefficients",
          "type1-rate", "type2-rate",  "shape",      "position", "density"};
}

std::vector<ScenarioConfig> preset(const std::string& name) {
  // Extra regions beyond the default two reuse the default intercept with
  // their own slopes; shares split evenly among components.
  static const std::vector<Eigen::Vector2d> extra_betas = {{1.5, -0.8},
                                                           {1.5, 0.5}};
  std::vector<ScenarioConfig> grid;
  auto base = [] { return default_scenario(); };

  if (name == "components") {
    for (Index k : {2, 3, 4}) {
      ScenarioConfig cfg = base();
      cfg.k = k;
      for (Index c = 2; c < k; ++c) {
        cfg.betas.push_back(extra_betas[static_cast<std::size_t>(c - 2)]);
        cfg.sigmas.push_back(0.1);
      }
      cfg.mixing.assign(static_cast<std::size_t>(k),
                        0.8 / static_cast<double>(k));
      cfg.mixing.push_back(0.2);
      cfg.label = "components/k=" + std::to_string(k);
      grid.push_back(cfg);
    }
  } else if (name == "sample-size") {
    for (Index n : {100, 200, 400}) {
      ScenarioConfig cfg = base();
      cfg.n = n;
      cfg.label = "sample-size/n=" + std::to_string(n);
      grid.push_back(cfg);
    }
  } else if (name == "noise") {
    for (double sigma : {0.1, 0.2, 0.5}) {
      ScenarioConfig cfg = base();
      cfg.sigmas = {sigma, sigma};
      std::ostringstream label;
      label << "noise/sigma=" << sigma;
      cfg.label = label.str();
      grid.push_back(cfg);
    }
  } else if (name == "mixing") {
    for (const auto& shares : {std::vector<double>{0.4, 0.4, 0.2},
                               std::vector<double>{0.5, 0.3, 0.2},
                               std::vector<double>{0.6, 0.2, 0.2}}) {
      ScenarioConfig cfg = base();
      cfg.mixing = shares;
      std::ostringstream label;
      label << "mixing/shares=" << shares[0] << "-" << shares[1] << "-"
            << shares[2];
      cfg.label = label.str();
      grid.push_back(cfg);
    }
  } else if (name == "coefficients") {
    for (const auto& first : {Eigen::Vector2d{1.5, 1.0}, Eigen::Vector2d{1.5, 0.1},
                              Eigen::Vector2d{1.5, -1.2}}) {
      ScenarioConfig cfg = base();
      cfg.betas[0] = first;
      std::ostringstream label;
      label << "coefficients/beta1=" << first(0) << "_" << first(1);
      cfg.label = label.str();
      grid.push_back(cfg);
    }
  } else if (name == "type1-rate") {
    for (double rate : {0.1, 0.2}) {
      ScenarioConfig cfg = base();
      const double inlier = (1.0 - rate) / 2.0;
      cfg.mixing = {inlier, inlier, rate};
      std::ostringstream label;
      label << "type1-rate/rate=" << rate;
      cfg.label = label.str();
      grid.push_back(cfg);
    }
  } else if (name == "type2-rate") {
    for (double rate : {0.1, 0.2}) {
      ScenarioConfig cfg = base();
      cfg.type2_rate = rate;
      std::ostringstream label;
      label << "type2-rate/rate=" << rate;
      cfg.label = label.str();
      grid.push_back(cfg);
    }
  } else if (name == "shape") {
    for (SpatialLayout layout :
         {SpatialLayout::kNormalDiagonal, SpatialLayout::kUniform}) {
      ScenarioConfig cfg = base();
      cfg.layout = layout;
      cfg.label = "shape/layout=" + layout_name(layout);
      grid.push_back(cfg);
    }
  } else if (name == "position") {
    for (SpatialLayout layout :
         {SpatialLayout::kNormalDiagonal, SpatialLayout::kNormalHorizontal}) {
      ScenarioConfig cfg = base();
      cfg.layout = layout;
      cfg.label = "position/layout=" + layout_name(layout);
      grid.push_back(cfg);
    }
  } else if (name == "density") {
    for (const auto& cov :
         {Eigen::Vector2d{0.1, 0.1}, Eigen::Vector2d{0.5, 0.1}}) {
      ScenarioConfig cfg = base();
      cfg.spatial_cov = cov;
      std::ostringstream label;
      label << "density/cov=" << cov(0) << "-" << cov(1);
      cfg.label = label.str();
      grid.push_back(cfg);
    }
  } else {
    std::ostringstream msg;
    msg << "unknown preset '" << name << "'; valid names:";
    for (const std::string& p : preset_names()) msg << " " << p;
    throw InvalidParameterError(msg.str());
  }
  return grid;
}

}  // namespace srmr
