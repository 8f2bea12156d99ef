#include <doctest.h>

#include <cmath>
#include <random>

#include "fairaudit/errors.hpp"
#include "fairaudit/metrics.hpp"
#include "test_support.hpp"

using namespace fairaudit;
using namespace testsupport;

namespace {

// Reference counts for the COMPAS audit panels (TP, FP, FN, TN).
const ConfusionMatrix kBlack{1369, 805, 532, 990};
const ConfusionMatrix kWhite{505, 349, 461, 1139};
const ConfusionMatrix kAll{2035, 1282, 1216, 2681};

constexpr double kTol = 5e-4;

}  // namespace

TEST_CASE("confusion_matrix: counts by truth and prediction") {
  auto table = OutcomeTable::from_records({
      {true, true, "g", 1.0},
      {true, false, "g", 1.0},
      {false, true, "g", 1.0},
      {false, false, "g", 2.0},
  });
  ConfusionMatrix cm = confusion_matrix(table);
  CHECK(cm.tp == 1);
  CHECK(cm.fn == 1);
  CHECK(cm.fp == 1);
  CHECK(cm.tn == 2);
  CHECK(cm.total() == 5);
}

TEST_CASE("confusion_matrix: single positive record") {
  auto table = OutcomeTable::from_records({{true, true, "g", 1.0}});
  ConfusionMatrix cm = confusion_matrix(table);
  CHECK(cm.tp == 1);
  CHECK(cm.fp == 0);
  CHECK(cm.fn == 0);
  CHECK(cm.tn == 0);
}

TEST_CASE("confusion_matrix: empty table is an error") {
  CHECK_THROWS_AS(confusion_matrix(OutcomeTable{}), DataError);
}

TEST_CASE("accuracy_metrics: reference panel values") {
  AccuracyMetrics black = accuracy_metrics(kBlack);
  CHECK(near(*black.sensitivity, 0.7201, kTol));
  CHECK(near(*black.specificity, 0.5515, kTol));
  CHECK(near(*black.precision, 0.6297, kTol));
  CHECK(near(*black.npv, 0.6505, kTol));
  CHECK(near(*black.predictive_accuracy, 0.6383, kTol));
  CHECK(near(*black.balanced_accuracy, 0.6358, kTol));
  CHECK(near(*black.fp_rate, 0.4485, kTol));
  CHECK(near(*black.fn_rate, 0.2799, kTol));

  AccuracyMetrics white = accuracy_metrics(kWhite);
  CHECK(near(*white.sensitivity, 0.5228, kTol));
  CHECK(near(*white.specificity, 0.7655, kTol));
  CHECK(near(*white.precision, 0.5913, kTol));
  CHECK(near(*white.npv, 0.7119, kTol));
  CHECK(near(*white.predictive_accuracy, 0.6699, kTol));

  AccuracyMetrics all = accuracy_metrics(kAll);
  CHECK(near(*all.predictive_accuracy, 0.6537, kTol));
  CHECK(near(*all.balanced_accuracy, 0.6512, kTol));
}

TEST_CASE("accuracy_metrics: zero denominators yield the undefined marker") {
  ConfusionMatrix no_positives{0, 0, 0, 7};
  AccuracyMetrics m = accuracy_metrics(no_positives);
  CHECK_FALSE(m.sensitivity.has_value());
  CHECK_FALSE(m.fn_rate.has_value());
  CHECK_FALSE(m.precision.has_value());
  CHECK_FALSE(m.balanced_accuracy.has_value());
  REQUIRE(m.specificity.has_value());
  CHECK(*m.specificity == 1.0);
  CHECK(*m.predictive_accuracy == 1.0);

  CHECK_THROWS_AS(accuracy_metrics(ConfusionMatrix{}), DataError);
}

TEST_CASE("accuracy_metrics: all-positive matrices have all eight metrics in (0,1)") {
  std::mt19937_64 gen(101);
  for (int trial = 0; trial < 1000; ++trial) {
    ConfusionMatrix cm = random_cm(gen);
    AccuracyMetrics m = accuracy_metrics(cm);
    for (auto member : {&AccuracyMetrics::predictive_accuracy, &AccuracyMetrics::balanced_accuracy,
                        &AccuracyMetrics::sensitivity, &AccuracyMetrics::specificity,
                        &AccuracyMetrics::precision, &AccuracyMetrics::npv,
                        &AccuracyMetrics::fp_rate, &AccuracyMetrics::fn_rate}) {
      REQUIRE((m.*member).has_value());
      CHECK(*(m.*member) > 0.0);
      CHECK(*(m.*member) < 1.0);
    }
  }
}

TEST_CASE("accuracy_metrics: scale invariance") {
  std::mt19937_64 gen(102);
  std::uniform_real_distribution<double> alpha_dist(1e-3, 1e3);
  for (int trial = 0; trial < 1000; ++trial) {
    ConfusionMatrix cm = random_cm(gen);
    double alpha = alpha_dist(gen);
    ConfusionMatrix scaled{cm.tp * alpha, cm.fp * alpha, cm.fn * alpha, cm.tn * alpha};
    AccuracyMetrics a = accuracy_metrics(cm);
    AccuracyMetrics b = accuracy_metrics(scaled);
    CHECK(std::abs(*a.sensitivity - *b.sensitivity) <= 1e-12);
    CHECK(std::abs(*a.specificity - *b.specificity) <= 1e-12);
    CHECK(std::abs(*a.precision - *b.precision) <= 1e-12);
    CHECK(std::abs(*a.npv - *b.npv) <= 1e-12);
    CHECK(std::abs(*a.predictive_accuracy - *b.predictive_accuracy) <= 1e-12);
    CHECK(std::abs(*a.balanced_accuracy - *b.balanced_accuracy) <= 1e-12);
  }
}

TEST_CASE("accuracy_metrics: complement identities hold exactly") {
  std::mt19937_64 gen(103);
  for (int trial = 0; trial < 1000; ++trial) {
    AccuracyMetrics m = accuracy_metrics(random_cm(gen));
    CHECK(*m.fp_rate + *m.specificity == 1.0);
    CHECK(*m.fn_rate + *m.sensitivity == 1.0);
    CHECK(*m.balanced_accuracy == (*m.sensitivity + *m.specificity) / 2.0);
  }
}

TEST_CASE("balanced accuracy floor: constant predictors score exactly 0.5") {
  std::mt19937_64 gen(104);
  std::uniform_real_distribution<double> dist(0.5, 400.0);
  for (int trial = 0; trial < 200; ++trial) {
    double positives = dist(gen), negatives = dist(gen);
    // Always-positive predictor over both classes.
    ConfusionMatrix always_pos{positives, negatives, 0, 0};
    CHECK(*accuracy_metrics(always_pos).balanced_accuracy == 0.5);
    // Always-negative predictor.
    ConfusionMatrix always_neg{0, 0, positives, negatives};
    CHECK(*accuracy_metrics(always_neg).balanced_accuracy == 0.5);
  }
}

TEST_CASE("oracle equivalence: metrics match a brute-force recount on small tables") {
  std::mt19937_64 gen(105);
  for (int trial = 0; trial < 150; ++trial) {
    auto records = random_records(gen, 20);
    auto table = OutcomeTable::from_records(records);
    ConfusionMatrix cm = confusion_matrix(table);
    OracleMetrics oracle = recount(records);
    CHECK(cm.tp == oracle.tp);
    CHECK(cm.fp == oracle.fp);
    CHECK(cm.fn == oracle.fn);
    CHECK(cm.tn == oracle.tn);

    AccuracyMetrics m = accuracy_metrics(cm);
    if (oracle.has(oracle.tp + oracle.fn)) {
      CHECK(*m.sensitivity == doctest::Approx(oracle.tp / (oracle.tp + oracle.fn)).epsilon(1e-12));
    } else {
      CHECK_FALSE(m.sensitivity.has_value());
    }
    if (oracle.has(oracle.tn + oracle.fp)) {
      CHECK(*m.specificity == doctest::Approx(oracle.tn / (oracle.tn + oracle.fp)).epsilon(1e-12));
    } else {
      CHECK_FALSE(m.specificity.has_value());
    }
    if (oracle.has(oracle.tp + oracle.fp)) {
      CHECK(*m.precision == doctest::Approx(oracle.tp / (oracle.tp + oracle.fp)).epsilon(1e-12));
    }
    if (oracle.has(oracle.tn + oracle.fn)) {
      CHECK(*m.npv == doctest::Approx(oracle.tn / (oracle.tn + oracle.fn)).epsilon(1e-12));
    }
    double total = oracle.tp + oracle.fp + oracle.fn + oracle.tn;
    CHECK(*m.predictive_accuracy == doctest::Approx((oracle.tp + oracle.tn) / total).epsilon(1e-12));
  }
}

TEST_CASE("accuracy_metrics: JSON uses the table row labels in snake_case") {
  auto j = accuracy_metrics(kBlack).to_json();
  CHECK(j.contains("predictive_accuracy"));
  CHECK(j.contains("balanced_accuracy"));
  CHECK(j.contains("npv"));
  CHECK(j.contains("fp_rate"));
  AccuracyMetrics undef = accuracy_metrics(ConfusionMatrix{0, 0, 0, 3});
  CHECK(undef.to_json()["sensitivity"].is_null());
}

TEST_CASE("round4 matches table presentation") {
  CHECK(round4(0.72014729) == 0.7201);
  CHECK(round4(0.65053) == 0.6505);
}
