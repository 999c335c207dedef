#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "srmr/errors.hpp"
#include "srmr/io.hpp"
#include "srmr/version.hpp"

namespace srmr {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameterError("cannot write " + path);
  out << content;
  if (!out) throw InvalidParameterError("write failed for " + path);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (char ch : text) {
    if (ch == '\n') {
      if (!current.empty() && current.back() == '\r') current.pop_back();
      lines.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) {
    if (current.back() == '\r') current.pop_back();
    lines.push_back(current);
  }
  return lines;
}

std::vector<std::string> split_on(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  for (char ch : line) {
    if (ch == sep) {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  fields.push_back(field);
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail_at(const std::string& origin, std::size_t line,
                          const std::string& what) {
  std::ostringstream msg;
  msg << origin << ":" << line << ": " << what;
  throw ParseError(msg.str());
}

double parse_number(const std::string& token, const std::string& origin,
                    std::size_t line) {
  const std::string t = trim(token);
  if (t.empty()) fail_at(origin, line, "empty numeric field");
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) {
    fail_at(origin, line, "malformed number '" + t + "'");
  }
  return value;
}

long long parse_integer(const std::string& token, const std::string& origin,
                        std::size_t line) {
  const std::string t = trim(token);
  if (t.empty()) fail_at(origin, line, "empty integer field");
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(t, &used);
  } catch (const std::exception&) {
    fail_at(origin, line, "malformed integer '" + t + "'");
  }
  if (used != t.size()) fail_at(origin, line, "malformed integer '" + t + "'");
  return value;
}

// Seeds use the full unsigned 64-bit range, which overflows parse_integer.
std::uint64_t parse_seed(const std::string& token, const std::string& origin,
                         std::size_t line) {
  const std::string t = trim(token);
  if (t.empty() || t[0] == '-') fail_at(origin, line, "malformed seed '" + t + "'");
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(t, &used);
  } catch (const std::exception&) {
    fail_at(origin, line, "malformed seed '" + t + "'");
  }
  if (used != t.size()) fail_at(origin, line, "malformed seed '" + t + "'");
  return value;
}

std::vector<double> parse_number_list(const std::string& value,
                                      const std::string& origin,
                                      std::size_t line) {
  std::vector<double> out;
  for (const std::string& tok : split_on(value, ',')) {
    out.push_back(parse_number(tok, origin, line));
  }
  return out;
}

json index_array(const IndexSet& s) {
  json arr = json::array();
  for (Index i : s) arr.push_back(i);
  return arr;
}

/// Serializes a json tree with every floating-point scalar rendered through
/// format_double, preserving key order as inserted (ordered_json).
void emit(const nlohmann::ordered_json& node, std::ostream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (node.type()) {
    case nlohmann::ordered_json::value_t::object: {
      if (node.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = node.begin(); it != node.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad_in << nlohmann::ordered_json(it.key()).dump() << ": ";
        emit(it.value(), out, indent + 1);
      }
      out << "\n" << pad << "}";
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      if (node.empty()) {
        out << "[]";
        return;
      }
      out << "[";
      bool first = true;
      for (const auto& item : node) {
        if (!first) out << ", ";
        first = false;
        emit(item, out, indent + 1);
      }
      out << "]";
      return;
    }
    case nlohmann::ordered_json::value_t::number_float:
      out << format_double(node.get<double>());
      return;
    default:
      out << node.dump();
      return;
  }
}

std::string emit_document(const nlohmann::ordered_json& doc) {
  std::ostringstream out;
  emit(doc, out, 0);
  out << "\n";
  return out.str();
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_dataset_csv(const std::string& path, const SpatialDataset& ds) {
  ds.validate();
  const Index p = ds.p();
  std::ostringstream out;
  out << "y";
  for (Index j = 1; j <= p; ++j) out << ",x" << j;
  out << ",sx,sy\n";
  for (Index i = 0; i < ds.n(); ++i) {
    out << format_double(ds.y(i));
    for (Index j = 1; j <= p; ++j) out << "," << format_double(ds.X(i, j));
    out << "," << format_double(ds.S(i, 0)) << "," << format_double(ds.S(i, 1))
        << "\n";
  }
  write_file(path, out.str());
}

SpatialDataset read_dataset_csv(const std::string& path) {
  const std::vector<std::string> lines = split_lines(read_file(path));
  if (lines.empty()) fail_at(path, 1, "missing header row");
  const std::vector<std::string> header = split_on(lines[0], ',');
  if (header.size() < 4) {
    fail_at(path, 1, "header must be y,x1,...,xp,sx,sy");
  }
  const Index p = static_cast<Index>(header.size()) - 3;
  if (header[0] != "y") fail_at(path, 1, "first column must be y");
  for (Index j = 1; j <= p; ++j) {
    const std::string expect = "x" + std::to_string(j);
    if (header[static_cast<std::size_t>(j)] != expect) {
      fail_at(path, 1, "predictor column " + std::to_string(j) + " must be " + expect);
    }
  }
  if (header[header.size() - 2] != "sx" || header.back() != "sy") {
    fail_at(path, 1, "last columns must be sx,sy");
  }

  std::vector<std::vector<double>> rows;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const std::vector<std::string> fields = split_on(lines[ln], ',');
    if (fields.size() != header.size()) {
      fail_at(path, ln + 1,
              "expected " + std::to_string(header.size()) + " fields, got " +
                  std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) {
      row.push_back(parse_number(f, path, ln + 1));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail_at(path, 2, "no data rows");

  SpatialDataset ds;
  const Index n = static_cast<Index>(rows.size());
  ds.y.resize(n);
  ds.X = Matrix::Ones(n, p + 1);
  ds.S.resize(n, 2);
  for (Index i = 0; i < n; ++i) {
    const std::vector<double>& row = rows[static_cast<std::size_t>(i)];
    ds.y(i) = row[0];
    for (Index j = 1; j <= p; ++j) ds.X(i, j) = row[static_cast<std::size_t>(j)];
    ds.S(i, 0) = row[row.size() - 2];
    ds.S(i, 1) = row[row.size() - 1];
  }
  ds.validate();
  return ds;
}

void write_truth_csv(const std::string& path, const LabeledDataset& lds) {
  lds.validate();
  std::ostringstream out;
  out << "row,label,outlier_type,beta_component\n";
  for (Index i = 0; i < lds.data.n(); ++i) {
    const char* type = contains(lds.true_type1, i)   ? "type1"
                       : contains(lds.true_type2, i) ? "type2"
                                                     : "none";
    out << i << "," << lds.true_labels(i) << "," << type << ","
        << lds.beta_component(i) << "\n";
  }
  write_file(path, out.str());
}

TruthFile read_truth_csv(const std::string& path) {
  const std::vector<std::string> lines = split_lines(read_file(path));
  if (lines.empty() || lines[0] != "row,label,outlier_type,beta_component") {
    fail_at(path, 1, "header must be row,label,outlier_type,beta_component");
  }
  std::vector<int> labels;
  std::vector<int> beta_component;
  TruthFile truth;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const std::vector<std::string> fields = split_on(lines[ln], ',');
    if (fields.size() != 4) fail_at(path, ln + 1, "expected 4 fields");
    const long long row = parse_integer(fields[0], path, ln + 1);
    if (row != static_cast<long long>(labels.size())) {
      fail_at(path, ln + 1, "row indices must count up from 0");
    }
    const long long label = parse_integer(fields[1], path, ln + 1);
    const std::string type = trim(fields[2]);
    const long long component = parse_integer(fields[3], path, ln + 1);
    const Index i = static_cast<Index>(labels.size());
    if (type == "type1") {
      truth.type1.push_back(i);
    } else if (type == "type2") {
      truth.type2.push_back(i);
    } else if (type != "none") {
      fail_at(path, ln + 1, "outlier_type must be none, type1 or type2");
    }
    if ((type == "none") != (label != 0)) {
      fail_at(path, ln + 1, "label 0 must pair with an outlier type");
    }
    labels.push_back(static_cast<int>(label));
    beta_component.push_back(static_cast<int>(component));
  }
  if (labels.empty()) fail_at(path, 2, "no data rows");
  truth.labels = Eigen::Map<LabelVector>(labels.data(),
                                         static_cast<Index>(labels.size()));
  truth.beta_component = Eigen::Map<LabelVector>(
      beta_component.data(), static_cast<Index>(beta_component.size()));
  return truth;
}

void write_scenario_config(const std::string& path, const ScenarioConfig& cfg) {
  cfg.validate();
  std::ostringstream out;
  out << "# synthetic scenario\n";
  out << "label = " << cfg.label << "\n";
  out << "k = " << cfg.k << "\n";
  out << "n = " << cfg.n << "\n";
  out << "betas = ";
  for (std::size_t c = 0; c < cfg.betas.size(); ++c) {
    if (c > 0) out << "; ";
    out << format_double(cfg.betas[c](0)) << "," << format_double(cfg.betas[c](1));
  }
  out << "\n";
  out << "sigmas = ";
  for (std::size_t c = 0; c < cfg.sigmas.size(); ++c) {
    if (c > 0) out << ", ";
    out << format_double(cfg.sigmas[c]);
  }
  out << "\n";
  out << "mixing = ";
  for (std::size_t c = 0; c < cfg.mixing.size(); ++c) {
    if (c > 0) out << ", ";
    out << format_double(cfg.mixing[c]);
  }
  out << "\n";
  out << "layout = " << layout_name(cfg.layout) << "\n";
  out << "spatial_cov = " << format_double(cfg.spatial_cov(0)) << ", "
      << format_double(cfg.spatial_cov(1)) << "\n";
  out << "type1_rate = " << format_double(cfg.type1_rate) << "\n";
  out << "type2_rate = " << format_double(cfg.type2_rate) << "\n";
  out << "seed = " << cfg.seed << "\n";
  write_file(path, out.str());
}

ScenarioConfig parse_scenario_config(const std::string& text,
                                     const std::string& origin) {
  ScenarioConfig cfg = default_scenario();
  bool slopes_reading = false;
  std::vector<Eigen::Vector2d> betas_raw;
  bool betas_seen = false;

  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string line = lines[ln];
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail_at(origin, ln + 1, "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "label") {
      cfg.label = value;
    } else if (key == "k") {
      cfg.k = static_cast<Index>(parse_integer(value, origin, ln + 1));
    } else if (key == "n") {
      cfg.n = static_cast<Index>(parse_integer(value, origin, ln + 1));
    } else if (key == "betas") {
      betas_seen = true;
      betas_raw.clear();
      for (const std::string& pair : split_on(value, ';')) {
        const std::vector<double> nums = parse_number_list(pair, origin, ln + 1);
        if (nums.size() != 2) {
          fail_at(origin, ln + 1, "each betas entry needs two numbers");
        }
        betas_raw.push_back({nums[0], nums[1]});
      }
    } else if (key == "sigmas") {
      cfg.sigmas = parse_number_list(value, origin, ln + 1);
    } else if (key == "mixing") {
      cfg.mixing = parse_number_list(value, origin, ln + 1);
    } else if (key == "layout") {
      try {
        cfg.layout = layout_from_name(value);
      } catch (const InvalidParameterError& e) {
        fail_at(origin, ln + 1, e.what());
      }
    } else if (key == "spatial_cov") {
      const std::vector<double> nums = parse_number_list(value, origin, ln + 1);
      if (nums.size() != 2) fail_at(origin, ln + 1, "spatial_cov needs two numbers");
      cfg.spatial_cov = {nums[0], nums[1]};
    } else if (key == "type1_rate") {
      cfg.type1_rate = parse_number(value, origin, ln + 1);
    } else if (key == "type2_rate") {
      cfg.type2_rate = parse_number(value, origin, ln + 1);
    } else if (key == "seed") {
      cfg.seed = parse_seed(value, origin, ln + 1);
    } else if (key == "beta_reading") {
      if (value == "slopes") {
        slopes_reading = true;
      } else if (value == "intercept-slope") {
        slopes_reading = false;
      } else {
        fail_at(origin, ln + 1, "beta_reading must be intercept-slope or slopes");
      }
    } else {
      fail_at(origin, ln + 1, "unknown key '" + key + "'");
    }
  }

  if (betas_seen) {
    if (slopes_reading) {
      // One pair lists the two slopes; intercepts are zero.
      if (betas_raw.size() != 1 || cfg.k != 2) {
        throw InvalidParameterError(
            origin + ": the slopes reading needs k = 2 and a single pair");
      }
      cfg.betas = {{0.0, betas_raw[0](0)}, {0.0, betas_raw[0](1)}};
    } else {
      cfg.betas = betas_raw;
    }
  } else if (slopes_reading) {
    cfg.betas = default_scenario(BetaReading::kSlopes).betas;
  }
  // A changed k with default coefficient lists: resize against the default
  // grid so `k = 1` configs stay terse.
  if (!betas_seen && cfg.k == 1) {
    cfg.betas = {cfg.betas[0]};
    if (cfg.sigmas.size() == 2) cfg.sigmas = {cfg.sigmas[0]};
    if (cfg.mixing.size() == 3) {
      cfg.mixing = {cfg.mixing[0] + cfg.mixing[1], cfg.mixing[2]};
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig read_scenario_config(const std::string& path) {
  return parse_scenario_config(read_file(path), path);
}

std::string fit_report_json(const FitReport& report) {
  nlohmann::ordered_json doc;
  doc["schema"] = kReportSchema;
  doc["version"] = kVersion;
  doc["seed"] = report.result.seed;
  doc["selected_k"] =
      report.selected_k > 0 ? report.selected_k : report.result.model.k();
  doc["lambda"] = report.result.model.lambda;
  doc["tau2"] = report.result.model.tau2;
  doc["trimmed_loglik"] = report.result.trimmed_loglik;
  doc["bic"] = report.result.bic;
  doc["iterations"] = report.result.iterations;
  doc["converged"] = report.result.converged;

  nlohmann::ordered_json comps = nlohmann::ordered_json::array();
  for (const Component& c : report.result.model.components) {
    nlohmann::ordered_json comp;
    comp["pi"] = c.pi;
    nlohmann::ordered_json beta = nlohmann::ordered_json::array();
    for (Index j = 0; j < c.beta.size(); ++j) beta.push_back(c.beta(j));
    comp["beta"] = beta;
    comp["sigma2"] = c.sigma2;
    comp["centroid"] = nlohmann::ordered_json::array({c.w(0), c.w(1)});
    comps.push_back(comp);
  }
  doc["components"] = comps;

  nlohmann::ordered_json labels = nlohmann::ordered_json::array();
  for (Index i = 0; i < report.result.assignment.labels.size(); ++i) {
    labels.push_back(report.result.assignment.labels(i));
  }
  doc["labels"] = labels;
  doc["type1"] = index_array(report.result.assignment.type1);
  doc["type2"] = index_array(report.result.assignment.type2);

  if (!report.bic_by_k.empty()) {
    nlohmann::ordered_json by_k;
    for (const auto& [k, value] : report.bic_by_k) {
      by_k[std::to_string(k)] = value;
    }
    doc["bic_by_k"] = by_k;
  }

  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (const IterationRecord& rec : report.result.trace) {
    nlohmann::ordered_json entry;
    entry["type1_count"] = rec.type1_count;
    entry["type2_count"] = rec.type2_count;
    entry["trimmed_loglik"] = rec.trimmed_loglik;
    trace.push_back(entry);
  }
  doc["trace"] = trace;

  return emit_document(doc);
}

void write_fit_report(const std::string& path, const FitReport& report) {
  write_file(path, fit_report_json(report));
}

FitReport read_fit_report(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    if (doc.at("schema").get<std::string>() != kReportSchema) {
      throw ParseError(path + ": unsupported schema '" +
                       doc.at("schema").get<std::string>() + "'");
    }
    FitReport report;
    FitResult& fit = report.result;
    fit.seed = doc.at("seed").get<std::uint64_t>();
    report.selected_k = doc.at("selected_k").get<Index>();
    fit.model.lambda = doc.at("lambda").get<double>();
    fit.model.tau2 = doc.at("tau2").get<double>();
    fit.trimmed_loglik = doc.at("trimmed_loglik").get<double>();
    fit.bic = doc.at("bic").get<double>();
    fit.iterations = doc.at("iterations").get<int>();
    fit.converged = doc.at("converged").get<bool>();
    for (const json& comp : doc.at("components")) {
      Component c;
      c.pi = comp.at("pi").get<double>();
      const json& beta = comp.at("beta");
      c.beta.resize(static_cast<Index>(beta.size()));
      for (std::size_t j = 0; j < beta.size(); ++j) {
        c.beta(static_cast<Index>(j)) = beta[j].get<double>();
      }
      c.sigma2 = comp.at("sigma2").get<double>();
      c.w = {comp.at("centroid")[0].get<double>(),
             comp.at("centroid")[1].get<double>()};
      fit.model.components.push_back(std::move(c));
    }
    const json& labels = doc.at("labels");
    fit.assignment.labels.resize(static_cast<Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
      fit.assignment.labels(static_cast<Index>(i)) = labels[i].get<int>();
    }
    for (const json& i : doc.at("type1")) {
      fit.assignment.type1.push_back(i.get<Index>());
    }
    for (const json& i : doc.at("type2")) {
      fit.assignment.type2.push_back(i.get<Index>());
    }
    if (doc.contains("bic_by_k")) {
      for (const auto& [key, value] : doc.at("bic_by_k").items()) {
        report.bic_by_k[static_cast<Index>(std::stoll(key))] =
            value.get<double>();
      }
    }
    if (doc.contains("trace")) {
      for (const json& entry : doc.at("trace")) {
        IterationRecord rec;
        rec.type1_count = entry.at("type1_count").get<std::size_t>();
        rec.type2_count = entry.at("type2_count").get<std::size_t>();
        rec.trimmed_loglik = entry.at("trimmed_loglik").get<double>();
        fit.trace.push_back(rec);
      }
    }
    fit.assignment.validate();
    return report;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string eval_report_json(const EvalReport& report) {
  nlohmann::ordered_json doc;
  doc["ri"] = report.ri;
  doc["ari"] = report.ari;
  doc["ari_degenerate"] = report.ari_degenerate;
  if (report.acc.defined) {
    doc["acc"] = report.acc.acc;
  } else {
    doc["acc"] = nullptr;
  }
  if (report.acc.type1_defined) {
    doc["acc_type1"] = report.acc.type1_acc;
  } else {
    doc["acc_type1"] = nullptr;
  }
  if (report.acc.type2_defined) {
    doc["acc_type2"] = report.acc.type2_acc;
  } else {
    doc["acc_type2"] = nullptr;
  }
  if (report.pce) {
    doc["pce"] = *report.pce;
  } else {
    doc["pce"] = nullptr;
  }
  return emit_document(doc);
}

}  // namespace srmr
