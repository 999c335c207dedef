#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "srmr/errors.hpp"
#include "srmr/simgen.hpp"

using namespace srmr;

namespace {

double line_distance(double x, double y, const Eigen::Vector2d& beta) {
  return std::abs(y - beta(0) - beta(1) * x) / std::hypot(1.0, beta(1));
}

}  // namespace

TEST_CASE("default scenario matches the documented setting") {
  const ScenarioConfig cfg = default_scenario();
  CHECK(cfg.k == 2);
  CHECK(cfg.n == 200);
  REQUIRE(cfg.betas.size() == 2);
  CHECK(cfg.betas[0] == Eigen::Vector2d(1.5, 1.0));
  CHECK(cfg.betas[1] == Eigen::Vector2d(1.5, -1.2));
  CHECK(cfg.sigmas == std::vector<double>{0.1, 0.1});
  CHECK(cfg.mixing == std::vector<double>{0.4, 0.4, 0.2});
  CHECK(cfg.layout == SpatialLayout::kNormalDiagonal);
  const auto centers = cfg.centers();
  CHECK(centers[0] == Eigen::Vector2d(1.0, 1.0));
  CHECK(centers[1] == Eigen::Vector2d(-1.0, -1.0));

  const ScenarioConfig slopes = default_scenario(BetaReading::kSlopes);
  CHECK(slopes.betas[0] == Eigen::Vector2d(0.0, 1.5));
  CHECK(slopes.betas[1] == Eigen::Vector2d(0.0, 1.0));
}

TEST_CASE("generate splits counts by largest remainder") {
  ScenarioConfig cfg = default_scenario();
  cfg.n = 10;  // 0.4/0.4/0.2 -> 4/4/2 exactly
  cfg.seed = 5;
  const LabeledDataset lds = generate(cfg);
  CHECK(lds.data.n() == 10);
  Index ones = 0, twos = 0, outs = 0;
  for (Index i = 0; i < 10; ++i) {
    if (lds.true_labels(i) == 1) ++ones;
    if (lds.true_labels(i) == 2) ++twos;
    if (lds.true_labels(i) == 0) ++outs;
  }
  CHECK(ones == 4);
  CHECK(twos == 4);
  CHECK(outs == 2);
  CHECK(lds.true_type1.size() == 2);
  CHECK(lds.true_type2.empty());
}

TEST_CASE("generated inliers follow their lines within noise") {
  ScenarioConfig cfg = default_scenario();
  cfg.seed = 6;
  const LabeledDataset lds = generate(cfg);
  for (Index i = 0; i < lds.data.n(); ++i) {
    const int comp = lds.beta_component(i);
    if (comp == 0) continue;
    const Eigen::Vector2d& beta = cfg.betas[static_cast<std::size_t>(comp - 1)];
    const double r = lds.data.y(i) - beta(0) - beta(1) * lds.data.X(i, 1);
    CHECK(std::abs(r) < 0.1 * 6.0);  // six sigma
    CHECK(lds.data.X(i, 1) >= -2.0);
    CHECK(lds.data.X(i, 1) < 2.0);
  }
}

TEST_CASE("built-in outliers clear every line by 2") {
  ScenarioConfig cfg = default_scenario();
  cfg.seed = 7;
  const LabeledDataset lds = generate(cfg);
  REQUIRE(!lds.true_type1.empty());
  for (Index row : lds.true_type1) {
    CHECK(lds.true_labels(row) == 0);
    CHECK(lds.beta_component(row) == 0);
    for (const auto& beta : cfg.betas) {
      CHECK(line_distance(lds.data.X(row, 1), lds.data.y(row), beta) > 2.0);
    }
  }
}

TEST_CASE("inject_type1 appends clearing rows") {
  ScenarioConfig cfg = default_scenario();
  cfg.mixing = {0.5, 0.5, 0.0};
  cfg.n = 100;
  cfg.seed = 8;
  const LabeledDataset base = generate(cfg);
  const LabeledDataset more = inject_type1(base, 0.1, 99);
  CHECK(more.data.n() == 110);
  CHECK(more.true_type1.size() == 10);
  for (Index row : more.true_type1) {
    CHECK(row >= 100);  // appended at the end
    for (const auto& beta : cfg.betas) {
      CHECK(line_distance(more.data.X(row, 1), more.data.y(row), beta) > 2.0);
    }
    // Coordinates stay inside the original bounding box.
    CHECK(more.data.S(row, 0) >= base.data.S.col(0).minCoeff());
    CHECK(more.data.S(row, 0) <= base.data.S.col(0).maxCoeff());
    CHECK(more.data.S(row, 1) >= base.data.S.col(1).minCoeff());
    CHECK(more.data.S(row, 1) <= base.data.S.col(1).maxCoeff());
  }
  // Original rows untouched.
  CHECK(more.data.y.head(100).isApprox(base.data.y, 0.0));
  CHECK(more.data.S.topRows(100).isApprox(base.data.S, 0.0));

  // Rate 0 is the identity.
  const LabeledDataset same = inject_type1(base, 0.0, 99);
  CHECK(same.data.n() == 100);
}

TEST_CASE("inject_type2 negates coordinates and keeps the component") {
  ScenarioConfig cfg = default_scenario();
  cfg.mixing = {0.5, 0.5, 0.0};
  cfg.seed = 9;
  const LabeledDataset base = generate(cfg);
  const LabeledDataset flipped = inject_type2(base, 0.1, 31);
  CHECK(flipped.data.n() == base.data.n());
  CHECK(flipped.true_type2.size() == 20);
  for (Index row : flipped.true_type2) {
    CHECK(flipped.data.S(row, 0) == -base.data.S(row, 0));
    CHECK(flipped.data.S(row, 1) == -base.data.S(row, 1));
    CHECK(flipped.data.y(row) == base.data.y(row));
    CHECK(flipped.true_labels(row) == 0);
    // The generating line is remembered.
    CHECK(flipped.beta_component(row) == base.beta_component(row));
    CHECK(flipped.beta_component(row) > 0);
  }
  // Negating again restores the original coordinates.
  Matrix twice = flipped.data.S;
  for (Index row : flipped.true_type2) twice.row(row) = -twice.row(row);
  CHECK(twice.isApprox(base.data.S, 0.0));
}

TEST_CASE("realize applies both injections") {
  ScenarioConfig cfg = default_scenario();
  cfg.type1_rate = 0.05;
  cfg.type2_rate = 0.05;
  cfg.seed = 10;
  const LabeledDataset lds = realize(cfg);
  CHECK(lds.data.n() == 210);  // 200 + round(0.05 * 200)
  // Built-in 40 + injected 10; type-2 count rounds from the grown size.
  CHECK(lds.true_type1.size() == 50);
  CHECK(lds.true_type2.size() == 11);  // llround(0.05 * 210)
  lds.validate();
}

TEST_CASE("layouts place the documented centers") {
  ScenarioConfig cfg = default_scenario();
  cfg.layout = SpatialLayout::kNormalHorizontal;
  auto centers = cfg.centers();
  CHECK(centers[0] == Eigen::Vector2d(0.5, 0.0));
  CHECK(centers[1] == Eigen::Vector2d(-0.5, 0.0));

  cfg.k = 4;
  cfg.layout = SpatialLayout::kNormalDiagonal;
  cfg.betas = {Eigen::Vector2d(1, 1), Eigen::Vector2d(1, -1),
               Eigen::Vector2d(2, 1), Eigen::Vector2d(2, -1)};
  cfg.sigmas = {0.1, 0.1, 0.1, 0.1};
  cfg.mixing = {0.25, 0.25, 0.25, 0.25, 0.0};
  centers = cfg.centers();
  CHECK(centers[2] == Eigen::Vector2d(1.0, -1.0));
  CHECK(centers[3] == Eigen::Vector2d(-1.0, 1.0));

  cfg.k = 5;
  CHECK_THROWS_AS(cfg.centers(), InvalidParameterError);
}

TEST_CASE("uniform layout spreads variance-matched boxes") {
  ScenarioConfig cfg = default_scenario();
  cfg.layout = SpatialLayout::kUniform;
  cfg.n = 2000;
  cfg.mixing = {1.0, 0.0, 0.0};
  cfg.sigmas = {0.1, 0.1};
  cfg.seed = 11;
  const LabeledDataset lds = generate(cfg);
  // Component 1 box: center (1,1), half-width sqrt(3 * 0.1) ~ 0.5477.
  const double hw = std::sqrt(3.0 * 0.1);
  for (Index i = 0; i < lds.data.n(); ++i) {
    if (lds.true_labels(i) != 1) continue;
    CHECK(lds.data.S(i, 0) >= 1.0 - hw);
    CHECK(lds.data.S(i, 0) <= 1.0 + hw);
    CHECK(lds.data.S(i, 1) >= 1.0 - hw);
    CHECK(lds.data.S(i, 1) <= 1.0 + hw);
  }
  // Sample variance close to the configured 0.1.
  const double var =
      (lds.data.S.col(0).array() - lds.data.S.col(0).mean()).square().mean();
  CHECK(var == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("generation is a pure function of the config") {
  ScenarioConfig cfg = default_scenario();
  cfg.seed = 123;
  const LabeledDataset a = realize(cfg);
  const LabeledDataset b = realize(cfg);
  CHECK(a.data.y.isApprox(b.data.y, 0.0));
  CHECK(a.data.X.isApprox(b.data.X, 0.0));
  CHECK(a.data.S.isApprox(b.data.S, 0.0));
  CHECK((a.true_labels.array() == b.true_labels.array()).all());
  cfg.seed = 124;
  const LabeledDataset c = realize(cfg);
  CHECK_FALSE(a.data.y.isApprox(c.data.y, 0.0));
}

TEST_CASE("presets cover the ten documented settings") {
  const std::vector<std::string> names = preset_names();
  REQUIRE(names.size() == 10);
  std::set<std::string> labels;
  for (const std::string& name : names) {
    const auto grid = preset(name);
    CHECK(!grid.empty());
    for (const ScenarioConfig& cfg : grid) {
      cfg.validate();
      CHECK(labels.insert(cfg.label).second);  // labels unique across grids
    }
  }
  CHECK_THROWS_AS(preset("no-such-grid"), InvalidParameterError);
}

TEST_CASE("config validation rejects inconsistent settings") {
  ScenarioConfig cfg = default_scenario();
  cfg.mixing = {0.5, 0.5};  // must be k+1 entries
  CHECK_THROWS_AS(cfg.validate(), InvalidParameterError);
  cfg = default_scenario();
  cfg.mixing = {0.5, 0.6, 0.2};  // sums past 1
  CHECK_THROWS_AS(cfg.validate(), InvalidParameterError);
  cfg = default_scenario();
  cfg.sigmas = {0.1};
  CHECK_THROWS_AS(cfg.validate(), InvalidParameterError);
  cfg = default_scenario();
  cfg.type1_rate = 0.6;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameterError);
  cfg = default_scenario();
  cfg.spatial_cov = Eigen::Vector2d(0.0, 0.1);
  CHECK_THROWS_AS(cfg.validate(), InvalidParameterError);
}
