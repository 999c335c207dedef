#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "srmr/errors.hpp"
#include "srmr/metrics.hpp"

namespace srmr {

namespace {

double choose2(double m) { return 0.5 * m * (m - 1.0); }

struct PairCounts {
  double together_both = 0;  // pairs co-clustered in a and in b
  double together_a = 0;     // pairs co-clustered in a
  double together_b = 0;
  double total = 0;
};

PairCounts pair_counts(const LabelVector& a, const LabelVector& b) {
  if (a.size() != b.size()) {
    throw DataMismatchError("labelings have different lengths");
  }
  if (a.size() < 2) {
    throw UndefinedMetricError("pair metrics need at least two rows");
  }
  std::map<int, Index> ca, cb;
  std::map<std::pair<int, int>, Index> cab;
  for (Index i = 0; i < a.size(); ++i) {
    ++ca[a(i)];
    ++cb[b(i)];
    ++cab[{a(i), b(i)}];
  }
  PairCounts pc;
  for (const auto& [label, count] : ca) {
    pc.together_a += choose2(static_cast<double>(count));
  }
  for (const auto& [label, count] : cb) {
    pc.together_b += choose2(static_cast<double>(count));
  }
  for (const auto& [cell, count] : cab) {
    pc.together_both += choose2(static_cast<double>(count));
  }
  pc.total = choose2(static_cast<double>(a.size()));
  return pc;
}

}  // namespace

double rand_index(const LabelVector& a, const LabelVector& b) {
  const PairCounts pc = pair_counts(a, b);
  const double separated_both =
      pc.total - pc.together_a - pc.together_b + pc.together_both;
  return (pc.together_both + separated_both) / pc.total;
}

double adjusted_rand_index(const LabelVector& a, const LabelVector& b,
                           bool* degenerate) {
  const PairCounts pc = pair_counts(a, b);
  if (degenerate != nullptr) *degenerate = false;
  const double expected = pc.together_a * pc.together_b / pc.total;
  const double max_index = 0.5 * (pc.together_a + pc.together_b);
  if (max_index == expected) {
    // Both partitions all-singleton or all-one-cluster: identical by
    // construction, scored 1 by convention.
    if (degenerate != nullptr) *degenerate = true;
    return 1.0;
  }
  return (pc.together_both - expected) / (max_index - expected);
}

OutlierAccuracy outlier_acc(const IndexSet& predicted_type1,
                            const IndexSet& predicted_type2,
                            const IndexSet& true_type1,
                            const IndexSet& true_type2) {
  const IndexSet predicted = set_union(predicted_type1, predicted_type2);
  const IndexSet truth = set_union(true_type1, true_type2);
  auto hit_count = [](const IndexSet& pred, const IndexSet& tru) {
    IndexSet hits;
    std::set_intersection(pred.begin(), pred.end(), tru.begin(), tru.end(),
                          std::back_inserter(hits));
    return static_cast<double>(hits.size());
  };
  OutlierAccuracy out;
  if (!truth.empty()) {
    out.defined = true;
    out.acc = hit_count(predicted, truth) / static_cast<double>(truth.size());
  }
  if (!true_type1.empty()) {
    out.type1_defined = true;
    out.type1_acc =
        hit_count(predicted, true_type1) / static_cast<double>(true_type1.size());
  }
  if (!true_type2.empty()) {
    out.type2_defined = true;
    out.type2_acc =
        hit_count(predicted, true_type2) / static_cast<double>(true_type2.size());
  }
  return out;
}

double pce(const Matrix& true_betas, const Matrix& fitted_betas,
           bool one_to_one) {
  if (true_betas.rows() < 1 || fitted_betas.rows() < 1) {
    throw InvalidParameterError("pce needs non-empty coefficient sets");
  }
  if (true_betas.cols() != fitted_betas.cols()) {
    throw DataMismatchError("coefficient dimensions differ");
  }
  if (!one_to_one) {
    double total = 0.0;
    for (Index k = 0; k < true_betas.rows(); ++k) {
      double best = (true_betas.row(k) - fitted_betas.row(0)).squaredNorm();
      for (Index j = 1; j < fitted_betas.rows(); ++j) {
        best = std::min(best,
                        (true_betas.row(k) - fitted_betas.row(j)).squaredNorm());
      }
      total += best;
    }
    return total;
  }
  if (true_betas.rows() != fitted_betas.rows()) {
    throw DataMismatchError("bijective matching needs equal counts");
  }
  if (true_betas.rows() > 8) {
    throw InvalidParameterError("bijective matching limited to 8 components");
  }
  std::vector<Index> perm(static_cast<std::size_t>(fitted_betas.rows()));
  std::iota(perm.begin(), perm.end(), Index{0});
  double best_total = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Index k = 0; k < true_betas.rows(); ++k) {
      total += (true_betas.row(k) -
                fitted_betas.row(perm[static_cast<std::size_t>(k)]))
                   .squaredNorm();
    }
    best_total = std::min(best_total, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best_total;
}

EvalReport evaluate(const LabelVector& true_labels, const IndexSet& true_type1,
                    const IndexSet& true_type2,
                    const std::optional<Matrix>& true_betas,
                    const LabelVector& fit_labels, const IndexSet& fit_type1,
                    const IndexSet& fit_type2, const Matrix& fit_betas) {
  if (true_labels.size() != fit_labels.size()) {
    throw DataMismatchError("truth and fit cover different row counts");
  }
  EvalReport report;
  report.ri = rand_index(true_labels, fit_labels);
  report.ari = adjusted_rand_index(true_labels, fit_labels, &report.ari_degenerate);
  report.acc = outlier_acc(fit_type1, fit_type2, true_type1, true_type2);
  if (true_betas) report.pce = pce(*true_betas, fit_betas);
  return report;
}

}  // namespace srmr
