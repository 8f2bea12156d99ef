#pragma once

#include <optional>

#include <json.hpp>

#include "fairaudit/dataset.hpp"

namespace fairaudit {

// Weighted confusion counts for one group; the atom of every metric.
struct ConfusionMatrix {
  double tp = 0;
  double fp = 0;
  double fn = 0;
  double tn = 0;

  double total() const { return tp + fp + fn + tn; }
  double truth_positives() const { return tp + fn; }
  double truth_negatives() const { return fp + tn; }
  double predicted_positives() const { return tp + fp; }
  double predicted_negatives() const { return fn + tn; }

  // P(prediction = positive); the selection rate behind independence and
  // the four-fifths test. Undefined on an empty matrix.
  std::optional<double> selection_rate() const;
};

// Each metric is a real in [0,1] or absent when its denominator is zero.
// Undefined is a first-class value, never a crash or a fabricated 0.
struct AccuracyMetrics {
  std::optional<double> predictive_accuracy;
  std::optional<double> balanced_accuracy;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> precision;
  std::optional<double> npv;
  std::optional<double> fp_rate;  // 1 - specificity, exactly
  std::optional<double> fn_rate;  // 1 - sensitivity, exactly

  nlohmann::json to_json() const;  // snake_case keys; undefined -> null
};

ConfusionMatrix confusion_matrix(const OutcomeTable& table);
AccuracyMetrics accuracy_metrics(const ConfusionMatrix& cm);

// Presentation rounding for the text tables; tests compare unrounded values.
double round4(double value);

}  // namespace fairaudit
