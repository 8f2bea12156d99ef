#include "fairaudit/metrics.hpp"

#include <cmath>

#include "fairaudit/errors.hpp"

namespace fairaudit {

namespace {

std::optional<double> ratio(double numerator, double denominator) {
  if (denominator <= 0) return std::nullopt;
  return numerator / denominator;
}

nlohmann::json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

std::optional<double> ConfusionMatrix::selection_rate() const {
  return ratio(predicted_positives(), total());
}

ConfusionMatrix confusion_matrix(const OutcomeTable& table) {
  if (table.empty()) throw DataError("empty dataset: confusion matrix needs at least one record");
  ConfusionMatrix cm;
  for (const auto& r : table.records()) {
    if (r.truth && r.prediction) cm.tp += r.weight;
    else if (r.truth && !r.prediction) cm.fn += r.weight;
    else if (!r.truth && r.prediction) cm.fp += r.weight;
    else cm.tn += r.weight;
  }
  return cm;
}

AccuracyMetrics accuracy_metrics(const ConfusionMatrix& cm) {
  if (!(cm.total() > 0)) throw DataError("empty dataset: confusion matrix total is zero");
  AccuracyMetrics m;
  m.sensitivity = ratio(cm.tp, cm.truth_positives());
  m.specificity = ratio(cm.tn, cm.truth_negatives());
  m.precision = ratio(cm.tp, cm.predicted_positives());
  m.npv = ratio(cm.tn, cm.predicted_negatives());
  m.predictive_accuracy = ratio(cm.tp + cm.tn, cm.total());
  // Complements are computed from their counterparts so the identities
  // fp_rate + specificity = 1 and fn_rate + sensitivity = 1 hold exactly.
  if (m.specificity) m.fp_rate = 1.0 - *m.specificity;
  if (m.sensitivity) m.fn_rate = 1.0 - *m.sensitivity;
  if (m.sensitivity && m.specificity) {
    m.balanced_accuracy = (*m.sensitivity + *m.specificity) / 2.0;
  }
  return m;
}

nlohmann::json AccuracyMetrics::to_json() const {
  nlohmann::json j;
  j["predictive_accuracy"] = opt_json(predictive_accuracy);
  j["balanced_accuracy"] = opt_json(balanced_accuracy);
  j["sensitivity"] = opt_json(sensitivity);
  j["specificity"] = opt_json(specificity);
  j["precision"] = opt_json(precision);
  j["npv"] = opt_json(npv);
  j["fp_rate"] = opt_json(fp_rate);
  j["fn_rate"] = opt_json(fn_rate);
  return j;
}

double round4(double value) { return std::round(value * 10000.0) / 10000.0; }

}  // namespace fairaudit
