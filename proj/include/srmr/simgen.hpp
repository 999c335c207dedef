#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srmr/types.hpp"

namespace srmr {

/// Placement of the spatial regions.
enum class SpatialLayout {
  kNormalDiagonal,    ///< Gaussian blobs at (1,1), (-1,-1), (1,-1), (-1,1).
  kNormalHorizontal,  ///< Gaussian blobs at (0.5,0), (-0.5,0), (1.5,0), (-1.5,0).
  kUniform,           ///< variance-matched uniform boxes at the diagonal centers.
};

std::string layout_name(SpatialLayout layout);
SpatialLayout layout_from_name(const std::string& name);

/// How a two-number coefficient pair populates the component lines.
enum class BetaReading {
  kInterceptSlope,  ///< pair j = (intercept, slope) of component j.
  kSlopes,          ///< pair = the two components' slopes, zero intercepts.
};

/// Full description of one synthetic setting.
struct ScenarioConfig {
  std::string label;  ///< row name in benchmark tables.
  Index k = 2;
  Index n = 200;
  std::vector<Eigen::Vector2d> betas;   ///< per component: (intercept, slope).
  std::vector<double> sigmas;           ///< per-component noise stddev.
  std::vector<double> mixing;           ///< k+1 shares, last = built-in outlier share.
  SpatialLayout layout = SpatialLayout::kNormalDiagonal;
  Eigen::Vector2d spatial_cov{0.1, 0.1};  ///< diagonal of the coordinate covariance.
  double type1_rate = 0;  ///< extra appended regression outliers, fraction of n.
  double type2_rate = 0;  ///< coordinate-reversed rows, fraction of n.
  std::uint64_t seed = 0;

  void validate() const;
  /// Region centers implied by layout and k.
  std::vector<Eigen::Vector2d> centers() const;
  /// True coefficient matrix, k x 2, row = (intercept, slope).
  Matrix beta_matrix() const;
};

/// A dataset plus the ground truth that produced it.
struct LabeledDataset {
  SpatialDataset data;
  LabelVector true_labels;     ///< 0 = outlier of either type.
  IndexSet true_type1;
  IndexSet true_type2;
  Matrix true_betas;           ///< k x 2 as configured.
  LabelVector beta_component;  ///< generating line per row, 0 for type-1 rows.

  void validate() const;
};

/// Draws the configured dataset: per component, x ~ U(-2,2), y = intercept
/// + slope*x + N(0, sigma^2), coordinates from the layout's blob or box;
/// component counts split n by largest-remainder rounding of mixing. The
/// final mixing share becomes built-in regression outliers: (x,y) proposals
/// from (U(-2,2), U(-8,8)) accepted when farther than 2 from every line,
/// coordinates uniform over the inlier bounding box. Pure in cfg (seed
/// included). type1_rate/type2_rate are NOT applied here; see realize().
LabeledDataset generate(const ScenarioConfig& cfg);

/// Appends round(rate * n) rejection-sampled regression outliers (distance
/// > 2 from every true line, coordinates uniform over the existing
/// bounding box). Gives up after 1e6 rejected proposals.
LabeledDataset inject_type1(const LabeledDataset& lds, double rate,
                            std::uint64_t seed);

/// Negates both coordinates of round(rate * n) randomly chosen inlier rows;
/// (x, y) untouched, the generating component is kept in beta_component.
LabeledDataset inject_type2(const LabeledDataset& lds, double rate,
                            std::uint64_t seed);

/// generate() followed by both injections at the configured rates, with
/// per-stage RNG streams derived from cfg.seed.
LabeledDataset realize(const ScenarioConfig& cfg);

/// The default two-region setting; reading controls how the coefficient
/// pairs map onto component lines.
ScenarioConfig default_scenario(BetaReading reading = BetaReading::kInterceptSlope);

/// One of the ten named perturbation grids, unperturbed factors at their
/// defaults. Throws InvalidParameterError listing valid names on a miss.
std::vector<ScenarioConfig> preset(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace srmr
