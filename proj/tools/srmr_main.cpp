#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srmr/errors.hpp"
#include "srmr/inference.hpp"
#include "srmr/io.hpp"
#include "srmr/metrics.hpp"
#include "srmr/parallel.hpp"
#include "srmr/rng.hpp"
#include "srmr/simgen.hpp"
#include "srmr/srmr.hpp"
#include "srmr/version.hpp"

namespace fs = std::filesystem;
using namespace srmr;

namespace {

std::string sanitize(const std::string& label) {
  std::string out;
  for (char ch : label) {
    const bool keep = std::isalnum(static_cast<unsigned char>(ch)) ||
                      ch == '.' || ch == '-' || ch == '_' || ch == '=';
    out.push_back(keep ? ch : '_');
  }
  return out;
}

std::uint64_t replicate_seed(std::uint64_t base, std::size_t setting,
                             std::size_t rep) {
  return derive_seed(base, (static_cast<std::uint64_t>(setting) << 20) +
                               static_cast<std::uint64_t>(rep));
}

/// Trim level used when the contamination of a scenario is known: the
/// built-in outlier share plus appended regression outliers plus a margin.
/// The margin covers uneven splits of the outliers across clusters — the
/// posterior argmax tends to route most gross outliers to whichever cluster
/// fits loosest, so one cluster can carry nearly the whole outlier budget,
/// and the trimmed fit breaks down once that share reaches the trim level.
double auto_alpha(const ScenarioConfig& cfg) {
  const double contamination = cfg.mixing.back() + cfg.type1_rate;
  return std::clamp(contamination + 0.15, 0.1, 0.45);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameterError("cannot write " + path);
  out << content;
}

void deliver(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    write_text(out_path, content);
  }
}

std::vector<ScenarioConfig> load_grid(const std::string& preset_name,
                                      const std::string& config_path) {
  if (!preset_name.empty() && !config_path.empty()) {
    throw InvalidParameterError("pass either --preset or --config, not both");
  }
  if (!preset_name.empty()) {
    if (preset_name == "all") {
      std::vector<ScenarioConfig> grid;
      for (const std::string& name : preset_names()) {
        for (ScenarioConfig& cfg : preset(name)) grid.push_back(std::move(cfg));
      }
      return grid;
    }
    return preset(preset_name);
  }
  if (!config_path.empty()) {
    return {read_scenario_config(config_path)};
  }
  throw InvalidParameterError("one of --preset or --config is required");
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string preset_name;
  std::string config_path;
  int replicates = 0;  // 0 = preset default (100) or 1 for --config
  std::uint64_t seed = 0;
  std::string out_dir;
};

void cmd_simulate(const SimulateArgs& args) {
  const std::vector<ScenarioConfig> grid =
      load_grid(args.preset_name, args.config_path);
  const int replicates =
      args.replicates > 0 ? args.replicates : (args.preset_name.empty() ? 1 : 100);
  fs::create_directories(args.out_dir);

  for (std::size_t s = 0; s < grid.size(); ++s) {
    for (int r = 0; r < replicates; ++r) {
      ScenarioConfig cfg = grid[s];
      if (!args.config_path.empty() && args.seed == 0) {
        // Replaying a config must reproduce its dataset byte for byte, so the
        // first replicate keeps the stored seed; extras derive from it.
        if (r > 0) cfg.seed = replicate_seed(cfg.seed, s, static_cast<std::size_t>(r));
      } else {
        cfg.seed = replicate_seed(args.seed, s, static_cast<std::size_t>(r));
      }
      const LabeledDataset lds = realize(cfg);
      std::ostringstream stem;
      stem << sanitize(cfg.label.empty() ? "scenario" : cfg.label) << "-rep"
           << std::setfill('0') << std::setw(3) << r;
      const fs::path base = fs::path(args.out_dir) / stem.str();
      write_dataset_csv(base.string() + "-data.csv", lds.data);
      write_truth_csv(base.string() + "-truth.csv", lds);
      write_scenario_config(base.string() + ".cfg", cfg);
    }
  }
  std::cout << "wrote " << grid.size() * static_cast<std::size_t>(replicates)
            << " replicates across " << grid.size() << " settings to "
            << args.out_dir << "\n";
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string data_path;
  Index k = 2;
  std::string k_range;
  double alpha = 0.1;
  double lambda = 0.5;
  double tau2 = 0;  // 0 = data-driven default
  Index n0 = 0;     // 0 = default
  int starts = 10;
  int outer_iterations = 20;
  int em_iterations = 100;
  int lts_starts = 50;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_path;
};

std::pair<Index, Index> parse_k_range(const std::string& text) {
  const std::size_t dots = text.find("..");
  if (dots == std::string::npos) {
    throw InvalidParameterError("--k-range expects the form a..b");
  }
  try {
    const Index lo = std::stoll(text.substr(0, dots));
    const Index hi = std::stoll(text.substr(dots + 2));
    return {lo, hi};
  } catch (const std::exception&) {
    throw InvalidParameterError("--k-range expects the form a..b");
  }
}

SrmrOptions make_options(const FitArgs& args) {
  SrmrOptions options;
  options.k = args.k;
  options.alpha = args.alpha;
  options.lambda = args.lambda;
  if (args.tau2 > 0) options.tau2 = args.tau2;
  if (args.n0 > 0) options.n0 = args.n0;
  options.starts = args.starts;
  options.max_outer_iterations = args.outer_iterations;
  options.max_em_iterations = args.em_iterations;
  options.lts_starts = args.lts_starts;
  options.seed = args.seed;
  options.threads = args.threads;
  return options;
}

void cmd_fit(const FitArgs& args) {
  const SpatialDataset ds = read_dataset_csv(args.data_path);
  SrmrOptions options = make_options(args);

  FitReport report;
  if (!args.k_range.empty()) {
    const auto [lo, hi] = parse_k_range(args.k_range);
    report.result = select_k(ds, options, lo, hi, &report.bic_by_k);
    report.selected_k = report.result.model.k();
  } else {
    report.result = srmr_fit(ds, options);
    report.selected_k = options.k;
  }

  deliver(args.out_path, fit_report_json(report));
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string report_path;
  std::string truth_path;
  std::string config_path;
  std::string out_path;
};

void cmd_eval(const EvalArgs& args) {
  const FitReport report = read_fit_report(args.report_path);
  const TruthFile truth = read_truth_csv(args.truth_path);
  if (truth.labels.size() != report.result.assignment.labels.size()) {
    std::ostringstream msg;
    msg << "truth covers " << truth.labels.size() << " rows, fit covers "
        << report.result.assignment.labels.size();
    throw DataMismatchError(msg.str());
  }
  std::optional<Matrix> true_betas;
  if (!args.config_path.empty()) {
    true_betas = read_scenario_config(args.config_path).beta_matrix();
  }
  Matrix fit_betas(report.result.model.k(), report.result.model.components[0].beta.size());
  for (Index c = 0; c < report.result.model.k(); ++c) {
    fit_betas.row(c) =
        report.result.model.components[static_cast<std::size_t>(c)].beta.transpose();
  }
  const EvalReport eval =
      evaluate(truth.labels, truth.type1, truth.type2, true_betas,
               report.result.assignment.labels, report.result.assignment.type1,
               report.result.assignment.type2, fit_betas);
  deliver(args.out_path, eval_report_json(eval));
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::vector<std::string> presets;
  int replicates = 100;
  std::uint64_t seed = 0;
  double alpha = 0;  // 0 = contamination-matched default
  double lambda = 0.5;
  int starts = 10;
  std::string out_path;
};

struct BenchCell {
  bool ok = false;
  std::string error;
  EvalReport eval;
};

std::string mean_cell(const std::vector<double>& values) {
  if (values.empty()) return "NA";
  double sum = 0.0;
  for (double v : values) sum += v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", sum / static_cast<double>(values.size()));
  return buf;
}

void cmd_bench(const BenchArgs& args) {
  std::vector<ScenarioConfig> grid;
  for (const std::string& name : args.presets) {
    for (ScenarioConfig& cfg : load_grid(name, "")) grid.push_back(std::move(cfg));
  }
  if (grid.empty()) throw InvalidParameterError("no presets given");
  if (args.replicates < 1) {
    throw InvalidParameterError("--replicates must be positive");
  }

  const std::size_t reps = static_cast<std::size_t>(args.replicates);
  std::vector<BenchCell> cells(grid.size() * reps);
  // One replicate per work item; fits run single-threaded so the budget is
  // spent at this level and results land in per-index slots.
  parallel_for(cells.size(), [&](std::size_t idx) {
    const std::size_t s = idx / reps;
    const std::size_t r = idx % reps;
    BenchCell& cell = cells[idx];
    try {
      ScenarioConfig cfg = grid[s];
      cfg.seed = replicate_seed(args.seed, s, r);
      const LabeledDataset lds = realize(cfg);

      SrmrOptions options;
      options.k = cfg.k;
      options.alpha = args.alpha > 0 ? args.alpha : auto_alpha(cfg);
      options.lambda = args.lambda;
      options.starts = args.starts;
      options.seed = derive_seed(cfg.seed, 1);
      options.threads = 1;
      const FitResult fit = srmr_fit(lds.data, options);

      Matrix fit_betas(fit.model.k(), fit.model.components[0].beta.size());
      for (Index c = 0; c < fit.model.k(); ++c) {
        fit_betas.row(c) =
            fit.model.components[static_cast<std::size_t>(c)].beta.transpose();
      }
      cell.eval = evaluate(lds.true_labels, lds.true_type1, lds.true_type2,
                           lds.true_betas, fit.assignment.labels,
                           fit.assignment.type1, fit.assignment.type2, fit_betas);
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  });

  std::ostringstream table;
  table << "setting,replicates,failures,ri,ari,acc,acc_type1,acc_type2,pce\n";
  for (std::size_t s = 0; s < grid.size(); ++s) {
    std::vector<double> ri, ari, acc, acc1, acc2, pce_values;
    int failures = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const BenchCell& cell = cells[s * reps + r];
      if (!cell.ok) {
        ++failures;
        continue;
      }
      ri.push_back(cell.eval.ri);
      ari.push_back(cell.eval.ari);
      if (cell.eval.acc.defined) acc.push_back(cell.eval.acc.acc);
      if (cell.eval.acc.type1_defined) acc1.push_back(cell.eval.acc.type1_acc);
      if (cell.eval.acc.type2_defined) acc2.push_back(cell.eval.acc.type2_acc);
      if (cell.eval.pce) pce_values.push_back(*cell.eval.pce);
    }
    table << grid[s].label << "," << reps << "," << failures << ","
          << mean_cell(ri) << "," << mean_cell(ari) << "," << mean_cell(acc)
          << "," << mean_cell(acc1) << "," << mean_cell(acc2) << ","
          << mean_cell(pce_values) << "\n";
  }
  deliver(args.out_path, table.str());
}

// ---------------------------------------------------------------------------
// test-significance

struct SignificanceArgs {
  std::string data_path;
  std::string report_path;
  int B = 200;
  std::uint64_t seed = 0;
  std::string out_path;
};

void cmd_test_significance(const SignificanceArgs& args) {
  const SpatialDataset ds = read_dataset_csv(args.data_path);
  const FitReport report = read_fit_report(args.report_path);
  if (report.result.assignment.labels.size() != ds.n()) {
    std::ostringstream msg;
    msg << "fit covers " << report.result.assignment.labels.size()
        << " rows, data has " << ds.n();
    throw DataMismatchError(msg.str());
  }

  std::ostringstream out;
  out << "{\n  \"schema\": \"srmr-significance/1\",\n  \"B\": " << args.B
      << ",\n  \"regions\": [\n";
  for (Index k = 1; k <= report.result.model.k(); ++k) {
    const SignificanceReport sig = region_significance(
        report.result, ds, k, args.B, derive_seed(args.seed, static_cast<std::uint64_t>(k)));
    out << "    {\"k\": " << k << ", \"p_raw\": " << format_double(sig.p_raw)
        << ", \"region_weight\": " << format_double(sig.region_weight)
        << ", \"p_corrected\": " << format_double(sig.p_corrected)
        << ", \"epsilon0\": " << format_double(sig.epsilon0)
        << ", \"sigma_hat\": " << format_double(sig.sigma_hat)
        << ", \"vacuous\": " << (sig.vacuous ? "true" : "false") << "}";
    out << (k < report.result.model.k() ? ",\n" : "\n");
  }
  out << "  ]\n}\n";
  deliver(args.out_path, out.str());
}

// ---------------------------------------------------------------------------
// plotdata

struct PlotArgs {
  std::string data_path;
  std::string report_path;
  std::string out_dir;
  bool svg = false;
};

const char* kPalette[] = {"#888888", "#d62728", "#1f77b4", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string color_for(int label) {
  return kPalette[static_cast<std::size_t>(label) % (sizeof kPalette / sizeof *kPalette)];
}

void write_svg(const std::string& path, const SpatialDataset& ds,
               const FitReport& report) {
  // Two panels: response vs first predictor with the fitted lines, and the
  // coordinate plane. Everything is scaled into fixed 360x360 viewports.
  const double x_lo = ds.X.col(1).minCoeff(), x_hi = ds.X.col(1).maxCoeff();
  const double y_lo = ds.y.minCoeff(), y_hi = ds.y.maxCoeff();
  const double sx_lo = ds.S.col(0).minCoeff(), sx_hi = ds.S.col(0).maxCoeff();
  const double sy_lo = ds.S.col(1).minCoeff(), sy_hi = ds.S.col(1).maxCoeff();
  auto scale = [](double v, double lo, double hi, double out_lo, double out_hi) {
    const double span = hi - lo;
    const double t = span > 0 ? (v - lo) / span : 0.5;
    return out_lo + t * (out_hi - out_lo);
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"420\" "
         "viewBox=\"0 0 800 420\">\n"
      << "  <rect width=\"800\" height=\"420\" fill=\"white\"/>\n";
  // Regression panel.
  svg << "  <g>\n    <rect x=\"20\" y=\"30\" width=\"360\" height=\"360\" "
         "fill=\"none\" stroke=\"#333\"/>\n"
      << "    <text x=\"200\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">response</text>\n";
  for (Index i = 0; i < ds.n(); ++i) {
    svg << "    <circle cx=\"" << scale(ds.X(i, 1), x_lo, x_hi, 25, 375)
        << "\" cy=\"" << scale(ds.y(i), y_lo, y_hi, 385, 35) << "\" r=\"3\" fill=\""
        << color_for(report.result.assignment.labels(i)) << "\"/>\n";
  }
  for (Index c = 0; c < report.result.model.k(); ++c) {
    const Vector& beta = report.result.model.components[static_cast<std::size_t>(c)].beta;
    const double yl = beta(0) + beta(1) * x_lo;
    const double yr = beta(0) + beta(1) * x_hi;
    svg << "    <line x1=\"25\" y1=\"" << scale(yl, y_lo, y_hi, 385, 35)
        << "\" x2=\"375\" y2=\"" << scale(yr, y_lo, y_hi, 385, 35)
        << "\" stroke=\"" << color_for(static_cast<int>(c) + 1)
        << "\" stroke-width=\"2\"/>\n";
  }
  svg << "  </g>\n";
  // Coordinate panel.
  svg << "  <g>\n    <rect x=\"420\" y=\"30\" width=\"360\" height=\"360\" "
         "fill=\"none\" stroke=\"#333\"/>\n"
      << "    <text x=\"600\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">coordinates</text>\n";
  for (Index i = 0; i < ds.n(); ++i) {
    svg << "    <circle cx=\"" << scale(ds.S(i, 0), sx_lo, sx_hi, 425, 775)
        << "\" cy=\"" << scale(ds.S(i, 1), sy_lo, sy_hi, 385, 35) << "\" r=\"3\" fill=\""
        << color_for(report.result.assignment.labels(i)) << "\"/>\n";
  }
  svg << "  </g>\n</svg>\n";
  write_text(path, svg.str());
}

void cmd_plotdata(const PlotArgs& args) {
  const SpatialDataset ds = read_dataset_csv(args.data_path);
  const FitReport report = read_fit_report(args.report_path);
  if (report.result.assignment.labels.size() != ds.n()) {
    throw DataMismatchError("fit report and data cover different row counts");
  }
  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);

  std::ostringstream reg;
  reg << "x,y,label\n";
  for (Index i = 0; i < ds.n(); ++i) {
    reg << format_double(ds.X(i, 1)) << "," << format_double(ds.y(i)) << ","
        << report.result.assignment.labels(i) << "\n";
  }
  write_text((dir / "regression.csv").string(), reg.str());

  std::ostringstream coords;
  coords << "sx,sy,label\n";
  for (Index i = 0; i < ds.n(); ++i) {
    coords << format_double(ds.S(i, 0)) << "," << format_double(ds.S(i, 1))
           << "," << report.result.assignment.labels(i) << "\n";
  }
  write_text((dir / "coordinates.csv").string(), coords.str());

  // Line samples: 11 points per component across the observed x range.
  std::ostringstream lines;
  lines << "component,x,y\n";
  const double x_lo = ds.X.col(1).minCoeff();
  const double x_hi = ds.X.col(1).maxCoeff();
  for (Index c = 0; c < report.result.model.k(); ++c) {
    const Vector& beta = report.result.model.components[static_cast<std::size_t>(c)].beta;
    for (int t = 0; t <= 10; ++t) {
      const double x = x_lo + (x_hi - x_lo) * static_cast<double>(t) / 10.0;
      lines << (c + 1) << "," << format_double(x) << ","
            << format_double(beta(0) + beta(1) * x) << "\n";
    }
  }
  write_text((dir / "lines.csv").string(), lines.str());

  if (args.svg) write_svg((dir / "plot.svg").string(), ds, report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatially constrained robust mixture regression toolkit"};
  app.set_version_flag("--version", std::string("srmr ") + kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "generate labeled synthetic datasets");
  simulate->add_option("--preset", sim.preset_name, "named scenario grid, or 'all'");
  simulate->add_option("--config", sim.config_path, "scenario config file");
  simulate->add_option("--replicates", sim.replicates, "datasets per setting (preset default 100)");
  simulate->add_option("--seed", sim.seed, "base seed");
  simulate->add_option("--out", sim.out_dir, "output directory")->required();

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit the robust spatial mixture");
  fit_cmd->add_option("--data", fit.data_path, "dataset CSV")->required();
  fit_cmd->add_option("--k", fit.k, "number of regions");
  fit_cmd->add_option("--k-range", fit.k_range, "candidate range a..b chosen by BIC");
  fit_cmd->add_option("--alpha", fit.alpha, "per-region trim fraction");
  fit_cmd->add_option("--lambda", fit.lambda, "spatial posterior weight");
  fit_cmd->add_option("--tau2", fit.tau2, "spatial bandwidth (default: data-driven)");
  fit_cmd->add_option("--n0", fit.n0, "initialization subsample size");
  fit_cmd->add_option("--starts", fit.starts, "random starts pooled by consensus");
  fit_cmd->add_option("--outer-iterations", fit.outer_iterations, "trim/refit round cap");
  fit_cmd->add_option("--em-iterations", fit.em_iterations, "EM iteration cap");
  fit_cmd->add_option("--lts-starts", fit.lts_starts, "elemental starts per trimmed fit");
  fit_cmd->add_option("--seed", fit.seed, "seed");
  fit_cmd->add_option("--threads", fit.threads, "worker cap (0 = SRMR_THREADS/cores)");
  fit_cmd->add_option("--out", fit.out_path, "report path (default: stdout)");

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "score a fit against ground truth");
  eval_cmd->add_option("--report", eval.report_path, "fit report JSON")->required();
  eval_cmd->add_option("--truth", eval.truth_path, "truth sidecar CSV")->required();
  eval_cmd->add_option("--config", eval.config_path, "scenario config for true coefficients");
  eval_cmd->add_option("--out", eval.out_path, "output path (default: stdout)");

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "generate-fit-eval sweep with mean metrics");
  bench_cmd->add_option("--preset", bench.presets, "preset name(s), or 'all'")->required();
  bench_cmd->add_option("--replicates", bench.replicates, "replicates per setting");
  bench_cmd->add_option("--seed", bench.seed, "base seed");
  bench_cmd->add_option("--alpha", bench.alpha, "trim fraction (default: contamination-matched)");
  bench_cmd->add_option("--lambda", bench.lambda, "spatial posterior weight");
  bench_cmd->add_option("--starts", bench.starts, "random starts per fit");
  bench_cmd->add_option("--out", bench.out_path, "table path (default: stdout)");

  SignificanceArgs sig;
  CLI::App* sig_cmd = app.add_subcommand("test-significance", "bootstrap region significance");
  sig_cmd->add_option("--data", sig.data_path, "dataset CSV")->required();
  sig_cmd->add_option("--report", sig.report_path, "fit report JSON")->required();
  sig_cmd->add_option("--B", sig.B, "bootstrap rounds");
  sig_cmd->add_option("--seed", sig.seed, "seed");
  sig_cmd->add_option("--out", sig.out_path, "output path (default: stdout)");

  PlotArgs plot;
  CLI::App* plot_cmd = app.add_subcommand("plotdata", "emit plot-ready scatter and line files");
  plot_cmd->add_option("--data", plot.data_path, "dataset CSV")->required();
  plot_cmd->add_option("--report", plot.report_path, "fit report JSON")->required();
  plot_cmd->add_option("--out", plot.out_dir, "output directory")->required();
  plot_cmd->add_flag("--svg", plot.svg, "also write a self-contained SVG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (simulate->parsed()) cmd_simulate(sim);
    if (fit_cmd->parsed()) cmd_fit(fit);
    if (eval_cmd->parsed()) cmd_eval(eval);
    if (bench_cmd->parsed()) cmd_bench(bench);
    if (sig_cmd->parsed()) cmd_test_significance(sig);
    if (plot_cmd->parsed()) cmd_plotdata(plot);
  } catch (const InfeasibleModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DataMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const FitFailedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (!e.diagnostics.empty()) std::cerr << e.diagnostics;
    return 5;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
