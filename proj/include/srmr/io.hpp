#pragma once

#include <map>
#include <optional>
#include <string>

#include "srmr/metrics.hpp"
#include "srmr/simgen.hpp"
#include "srmr/types.hpp"

namespace srmr {

/// 17-significant-digit %g rendering, enough to round-trip any double
/// bit-exactly. Used by every writer.
std::string format_double(double value);

/// Dataset CSV: header `y,x1,...,xp,sx,sy`, '.' decimal, no quoting. The
/// intercept column is implicit and added on load.
void write_dataset_csv(const std::string& path, const SpatialDataset& ds);
SpatialDataset read_dataset_csv(const std::string& path);

/// Ground-truth sidecar rows parallel to the dataset.
struct TruthFile {
  LabelVector labels;          ///< 0 = outlier.
  IndexSet type1;
  IndexSet type2;
  LabelVector beta_component;  ///< generating line, 0 = none.
};

/// Sidecar CSV: header `row,label,outlier_type,beta_component` with
/// outlier_type in {none,type1,type2} and 0-based row indices.
void write_truth_csv(const std::string& path, const LabeledDataset& lds);
TruthFile read_truth_csv(const std::string& path);

/// Scenario config: one `key = value` per line, '#' comments. Writing then
/// reading reproduces the config exactly.
void write_scenario_config(const std::string& path, const ScenarioConfig& cfg);
ScenarioConfig read_scenario_config(const std::string& path);
/// Parses config text that may also be just a preset name reference.
ScenarioConfig parse_scenario_config(const std::string& text,
                                     const std::string& origin);

/// A fit plus the context a report file carries.
struct FitReport {
  FitResult result;
  Index selected_k = 0;               ///< winning K (equals model size).
  std::map<Index, double> bic_by_k;   ///< populated by k-range fits.
};

/// Versioned JSON document (schema srmr-report/1); numbers are written via
/// format_double so read_fit_report restores them bit-exactly.
std::string fit_report_json(const FitReport& report);
void write_fit_report(const std::string& path, const FitReport& report);
FitReport read_fit_report(const std::string& path);

std::string eval_report_json(const EvalReport& report);

}  // namespace srmr
