#include <doctest.h>

#include <cmath>

#include "srmr/errors.hpp"
#include "srmr/metrics.hpp"

using namespace srmr;

TEST_CASE("rand index on hand-worked examples") {
  const LabelVector a{{1, 1, 2, 2}};
  const LabelVector b{{1, 2, 1, 2}};
  CHECK(rand_index(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(rand_index(a, a) == 1.0);
  const LabelVector c{{2, 2, 1, 1}};  // same partition, renamed
  CHECK(rand_index(a, c) == 1.0);
}

TEST_CASE("adjusted rand index on hand-worked examples") {
  const LabelVector a{{1, 1, 2, 2}};
  const LabelVector b{{1, 2, 1, 2}};
  CHECK(adjusted_rand_index(a, b) == doctest::Approx(-0.5).epsilon(1e-15));
  bool degenerate = false;
  CHECK(adjusted_rand_index(a, a, &degenerate) == 1.0);
  CHECK_FALSE(degenerate);

  // Both all-singletons: degenerate denominator reports perfect agreement.
  const LabelVector s{{1, 2, 3, 4}};
  CHECK(adjusted_rand_index(s, s, &degenerate) == 1.0);
  CHECK(degenerate);

  // A worked three-cluster case, checked against the contingency formula.
  const LabelVector u{{1, 1, 1, 2, 2, 3}};
  const LabelVector v{{1, 1, 2, 2, 3, 3}};
  // n=6: sum_ij C(nij,2) = C(2,2)=1 (cell 1,1) + 1 (cell 2,2... ) = computed
  // below from scratch: cells {11:2, 12:1, 22:1, 23:1, 33:1} -> 1.
  // rows: C(3,2)+C(2,2)+C(1,2) = 3+1+0 = 4; cols: C(2,2)+C(2,2)+C(2,2) = 3.
  // expected = 4*3/C(6,2) = 12/15 = 0.8; max = (4+3)/2 = 3.5.
  const double expected_ari = (1.0 - 0.8) / (3.5 - 0.8);
  CHECK(adjusted_rand_index(u, v) == doctest::Approx(expected_ari).epsilon(1e-15));
}

TEST_CASE("metric inputs must align and carry two rows") {
  const LabelVector a{{1, 1, 2}};
  const LabelVector b{{1, 2}};
  CHECK_THROWS_AS(rand_index(a, b), DataMismatchError);
  CHECK_THROWS_AS(adjusted_rand_index(a, b), DataMismatchError);
  const LabelVector single{{1}};
  CHECK_THROWS_AS(rand_index(single, single), UndefinedMetricError);
}

TEST_CASE("outlier accuracy pools the type union") {
  // Truth: type1 {0,1,2}, type2 {5}; predicted catches 2 of 3 and the one.
  const OutlierAccuracy acc = outlier_acc({0, 1, 7}, {5}, {0, 1, 2}, {5});
  CHECK(acc.defined);
  CHECK(acc.acc == doctest::Approx(3.0 / 4.0).epsilon(1e-15));
  CHECK(acc.type1_defined);
  CHECK(acc.type1_acc == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(acc.type2_defined);
  CHECK(acc.type2_acc == 1.0);
}

TEST_CASE("outlier accuracy with empty truth is undefined") {
  const OutlierAccuracy acc = outlier_acc({1, 2}, {}, {}, {});
  CHECK_FALSE(acc.defined);
  CHECK_FALSE(acc.type1_defined);
  CHECK_FALSE(acc.type2_defined);

  const OutlierAccuracy half = outlier_acc({1}, {}, {1, 2}, {});
  CHECK(half.defined);
  CHECK(half.type1_defined);
  CHECK_FALSE(half.type2_defined);
  CHECK(half.acc == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("pce takes the nearest fitted row per true row") {
  Matrix truth(2, 2), fitted(2, 2);
  truth << 1, 1, 2, 2;
  fitted << 1, 1.1, 2, 2;
  CHECK(pce(truth, fitted) == doctest::Approx(0.01).epsilon(1e-12));

  // Repeated matching is allowed: both true rows map to the single close fit.
  Matrix collapsed(2, 2);
  collapsed << 1, 1, 1, 1;
  // Row (1,1): 0; row (2,2): (1)^2 + (1)^2 = 2.
  CHECK(pce(truth, collapsed) == doctest::Approx(2.0).epsilon(1e-12));

  // One-to-one forces distinct columns: best bijection for the swapped case.
  Matrix swapped(2, 2);
  swapped << 2, 2, 1, 1;
  CHECK(pce(truth, swapped, true) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(pce(truth, swapped) == doctest::Approx(0.0).epsilon(1e-15));

  Matrix wrong_cols(2, 3);
  wrong_cols.setZero();
  CHECK_THROWS_AS(pce(truth, wrong_cols), DataMismatchError);
}

TEST_CASE("evaluate assembles the full report") {
  const LabelVector truth{{1, 1, 2, 2, 0}};
  const LabelVector fitted{{1, 1, 2, 2, 0}};
  Matrix tb(2, 2), fb(2, 2);
  tb << 1.5, 1.0, 1.5, -1.2;
  fb << 1.5, 1.0, 1.5, -1.2;
  const EvalReport rep = evaluate(truth, {4}, {}, tb, fitted, {4}, {}, fb);
  CHECK(rep.ri == 1.0);
  CHECK(rep.ari == 1.0);
  CHECK(rep.acc.defined);
  CHECK(rep.acc.acc == 1.0);
  REQUIRE(rep.pce.has_value());
  CHECK(*rep.pce == 0.0);

  const EvalReport no_beta = evaluate(truth, {4}, {}, std::nullopt, fitted, {4}, {}, fb);
  CHECK_FALSE(no_beta.pce.has_value());

  const LabelVector short_fit{{1, 1, 2}};
  CHECK_THROWS_AS(evaluate(truth, {}, {}, std::nullopt, short_fit, {}, {}, fb),
                  DataMismatchError);
}
