#include "fairaudit/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "fairaudit/errors.hpp"

namespace fairaudit {

namespace {

nlohmann::json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

std::string fmt4(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << *v;
  return out.str();
}

}  // namespace

void FairnessConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ConfigError("epsilon must lie in [0,1], got " + std::to_string(epsilon));
  }
  if (!(four_fifths_threshold > 0.0 && four_fifths_threshold <= 1.0)) {
    throw ConfigError("four_fifths_threshold must lie in (0,1], got " +
                      std::to_string(four_fifths_threshold));
  }
}

nlohmann::json FairnessConfig::to_json() const {
  return {{"epsilon", epsilon},
          {"four_fifths_threshold", four_fifths_threshold},
          {"comparison_mode", to_string(mode)}};
}

std::optional<double> GapComponent::gap() const {
  if (!evaluable()) return std::nullopt;
  return *rate_a - *rate_b;
}

std::optional<double> GapComponent::abs_gap() const {
  auto g = gap();
  if (!g) return std::nullopt;
  return std::abs(*g);
}

nlohmann::json GapComponent::to_json() const {
  return {{"name", name},
          {"rate_a", opt_json(rate_a)},
          {"rate_b", opt_json(rate_b)},
          {"gap", opt_json(gap())},
          {"abs_gap", opt_json(abs_gap())}};
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::violated: return "violated";
    case Verdict::not_evaluable: return "not-evaluable";
  }
  return "?";
}

std::string to_string(FourFifthsFinding f) {
  switch (f) {
    case FourFifthsFinding::adverse_impact_evidence: return "adverse-impact-evidence";
    case FourFifthsFinding::no_evidence: return "no-evidence";
    case FourFifthsFinding::not_evaluable: return "not-evaluable";
  }
  return "?";
}

std::string to_string(ComparisonMode m) {
  return m == ComparisonMode::absolute_difference ? "absolute-difference" : "ratio";
}

GapComponent independence_component(const ConfusionMatrix& cm_a, const ConfusionMatrix& cm_b) {
  return {"selection_rate", cm_a.selection_rate(), cm_b.selection_rate()};
}

namespace {

// Zero-total matrices make every component not evaluable, not an exception.
AccuracyMetrics metrics_or_empty(const ConfusionMatrix& cm) {
  if (cm.total() > 0) return accuracy_metrics(cm);
  return {};
}

}  // namespace

std::array<GapComponent, 2> separation_components(const ConfusionMatrix& cm_a,
                                                  const ConfusionMatrix& cm_b) {
  AccuracyMetrics a = metrics_or_empty(cm_a);
  AccuracyMetrics b = metrics_or_empty(cm_b);
  return {GapComponent{"sensitivity", a.sensitivity, b.sensitivity},
          GapComponent{"fp_rate", a.fp_rate, b.fp_rate}};
}

std::array<GapComponent, 2> sufficiency_components(const ConfusionMatrix& cm_a,
                                                   const ConfusionMatrix& cm_b) {
  AccuracyMetrics a = metrics_or_empty(cm_a);
  AccuracyMetrics b = metrics_or_empty(cm_b);
  auto complement = [](const std::optional<double>& v) -> std::optional<double> {
    if (!v) return std::nullopt;
    return 1.0 - *v;
  };
  return {GapComponent{"precision", a.precision, b.precision},
          GapComponent{"one_minus_npv", complement(a.npv), complement(b.npv)}};
}

std::optional<double> independence_gap(const ConfusionMatrix& cm_a, const ConfusionMatrix& cm_b) {
  return independence_component(cm_a, cm_b).gap();
}

std::pair<std::optional<double>, std::optional<double>> separation_gaps(
    const ConfusionMatrix& cm_a, const ConfusionMatrix& cm_b) {
  auto c = separation_components(cm_a, cm_b);
  return {c[0].gap(), c[1].gap()};
}

std::pair<std::optional<double>, std::optional<double>> sufficiency_gaps(
    const ConfusionMatrix& cm_a, const ConfusionMatrix& cm_b) {
  auto c = sufficiency_components(cm_a, cm_b);
  return {c[0].gap(), c[1].gap()};
}

Verdict evaluate_criterion(std::span<const GapComponent> components,
                           const FairnessConfig& config) {
  config.validate();
  bool any_not_evaluable = false;
  bool any_violated = false;
  for (const auto& c : components) {
    if (!c.evaluable()) {
      any_not_evaluable = true;
      continue;
    }
    if (config.mode == ComparisonMode::absolute_difference) {
      if (*c.abs_gap() > config.epsilon) any_violated = true;
    } else {
      double lo = std::min(*c.rate_a, *c.rate_b);
      double hi = std::max(*c.rate_a, *c.rate_b);
      if (hi > 0 && lo < config.four_fifths_threshold * hi) any_violated = true;
    }
  }
  if (any_violated) return Verdict::violated;
  if (any_not_evaluable) return Verdict::not_evaluable;
  return Verdict::satisfied;
}

FourFifthsFinding four_fifths_test(const std::map<std::string, std::optional<double>>& rates,
                                   double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ConfigError("four-fifths threshold must lie in (0,1]");
  }
  std::vector<double> values;
  for (const auto& [group, rate] : rates) {
    if (!rate) continue;
    if (*rate < 0.0 || *rate > 1.0) {
      throw DataError("selection rate for group '" + group + "' outside [0,1]");
    }
    values.push_back(*rate);
  }
  if (values.size() < 2) return FourFifthsFinding::not_evaluable;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo < threshold * *hi) return FourFifthsFinding::adverse_impact_evidence;
  return FourFifthsFinding::no_evidence;
}

nlohmann::json Advisory::to_json() const {
  return {{"proposition", proposition},
          {"criteria", criteria},
          {"precondition", precondition},
          {"precondition_holds", precondition_holds},
          {"implication", implication}};
}

std::vector<Advisory> AdvisoryScan::active() const {
  std::vector<Advisory> out;
  for (const auto& a : evaluations) {
    if (a.precondition_holds) out.push_back(a);
  }
  return out;
}

nlohmann::json AdvisoryScan::to_json() const {
  nlohmann::json evals = nlohmann::json::array();
  for (const auto& a : evaluations) evals.push_back(a.to_json());
  return {{"suppressed", suppressed.empty() ? nlohmann::json(nullptr) : nlohmann::json(suppressed)},
          {"evaluations", evals}};
}

AdvisoryScan incompatibility_advisories(const OutcomeTable& table, double tolerance) {
  AdvisoryScan scan;
  if (table.empty()) {
    scan.suppressed = "empty table";
    return scan;
  }
  if (table.group_domain().size() < 2) {
    scan.suppressed = "single group: independence comparisons need at least two groups";
    return scan;
  }
  bool truth_pos = false, truth_neg = false;
  for (const auto& r : table.records()) (r.truth ? truth_pos : truth_neg) = true;
  if (!truth_pos || !truth_neg) {
    scan.suppressed = "single truth class: conditional criteria are vacuous";
    return scan;
  }

  // Empirical joint frequencies over (group, truth, prediction).
  std::map<std::string, std::array<double, 4>> cells;  // [truth][pred] flattened
  double total = 0;
  double truth_positive_mass = 0, pred_positive_mass = 0;
  for (const auto& r : table.records()) {
    cells[r.group][(r.truth ? 2 : 0) + (r.prediction ? 1 : 0)] += r.weight;
    total += r.weight;
    if (r.truth) truth_positive_mass += r.weight;
    if (r.prediction) pred_positive_mass += r.weight;
  }

  bool a_indep_truth = true;
  bool a_indep_pred = true;
  bool positivity = true;
  for (const auto& [group, quad] : cells) {
    double group_mass = quad[0] + quad[1] + quad[2] + quad[3];
    double group_truth_pos = quad[2] + quad[3];
    double group_pred_pos = quad[1] + quad[3];
    // P(A=a, Y=+) vs P(A=a) P(Y=+), on frequencies.
    if (std::abs(group_truth_pos / total -
                 (group_mass / total) * (truth_positive_mass / total)) > tolerance) {
      a_indep_truth = false;
    }
    if (std::abs(group_pred_pos / total -
                 (group_mass / total) * (pred_positive_mass / total)) > tolerance) {
      a_indep_pred = false;
    }
    for (double c : quad) {
      if (!(c > 0)) positivity = false;
    }
  }

  Advisory i;
  i.proposition = "i";
  i.criteria = "independence and sufficiency";
  i.precondition = "the protected attribute is not statistically independent of the true label";
  i.precondition_holds = !a_indep_truth;
  if (i.precondition_holds) {
    i.implication = "independence and sufficiency cannot both hold exactly on this data";
  }

  Advisory ii;
  ii.proposition = "ii";
  ii.criteria = "independence and separation";
  ii.precondition =
      "the protected attribute is not statistically independent of the true label nor of the "
      "prediction, and the true label is binary";
  ii.precondition_holds = !a_indep_truth && !a_indep_pred;
  if (ii.precondition_holds) {
    ii.implication = "independence and separation cannot both hold exactly on this data";
  }

  Advisory iii;
  iii.proposition = "iii";
  iii.criteria = "separation and sufficiency";
  iii.precondition =
      "the protected attribute is not statistically independent of the true label, and every "
      "(group, truth, prediction) cell has positive mass";
  iii.precondition_holds = !a_indep_truth && positivity;
  if (iii.precondition_holds) {
    iii.implication = "separation and sufficiency cannot both hold exactly on this data";
  }

  scan.evaluations = {std::move(i), std::move(ii), std::move(iii)};
  return scan;
}

nlohmann::json FairnessReport::to_json() const {
  nlohmann::json rates;
  for (const auto& [group, rate] : selection_rates) rates[group] = opt_json(rate);
  nlohmann::json j;
  j["group_pair"] = {group_pair.first, group_pair.second};
  j["config"] = config.to_json();
  j["dataset_fingerprint"] = dataset_fingerprint;
  j["independence"] = {{"components", nlohmann::json::array({independence.to_json()})},
                       {"verdict", to_string(independence_verdict)}};
  j["separation"] = {
      {"components", nlohmann::json::array({separation[0].to_json(), separation[1].to_json()})},
      {"verdict", to_string(separation_verdict)}};
  j["sufficiency"] = {
      {"components", nlohmann::json::array({sufficiency[0].to_json(), sufficiency[1].to_json()})},
      {"verdict", to_string(sufficiency_verdict)}};
  j["four_fifths"] = {{"finding", to_string(four_fifths)},
                      {"threshold", config.four_fifths_threshold},
                      {"selection_rates", rates}};
  j["advisories"] = advisories.to_json();
  return j;
}

FairnessReport audit_pair(const OutcomeTable& table, const std::string& group_a,
                          const std::string& group_b, const FairnessConfig& config) {
  config.validate();
  if (table.empty()) throw DataError("empty dataset: nothing to audit");
  auto partitions = partition_by_group(table);
  for (const auto* g : {&group_a, &group_b}) {
    if (!partitions.count(*g)) {
      std::string available;
      for (const auto& [name, part] : partitions) {
        if (!available.empty()) available += ", ";
        available += name;
      }
      throw DataError("group '" + *g + "' not present in dataset (available: " + available + ")");
    }
  }
  ConfusionMatrix cm_a = confusion_matrix(partitions.at(group_a));
  ConfusionMatrix cm_b = confusion_matrix(partitions.at(group_b));

  FairnessReport report;
  report.group_pair = {group_a, group_b};
  report.config = config;
  report.dataset_fingerprint = table.fingerprint();
  report.independence = independence_component(cm_a, cm_b);
  report.separation = separation_components(cm_a, cm_b);
  report.sufficiency = sufficiency_components(cm_a, cm_b);
  report.independence_verdict =
      evaluate_criterion(std::span<const GapComponent>(&report.independence, 1), config);
  report.separation_verdict = evaluate_criterion(report.separation, config);
  report.sufficiency_verdict = evaluate_criterion(report.sufficiency, config);
  report.selection_rates = {{group_a, cm_a.selection_rate()}, {group_b, cm_b.selection_rate()}};
  report.four_fifths = four_fifths_test(report.selection_rates, config.four_fifths_threshold);
  report.advisories = incompatibility_advisories(table);
  return report;
}

std::vector<FairnessReport> audit_all_pairs(const OutcomeTable& table,
                                            const FairnessConfig& config) {
  const auto& groups = table.group_domain();
  std::vector<FairnessReport> reports;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      reports.push_back(audit_pair(table, groups[i], groups[j], config));
    }
  }
  return reports;
}

std::string render_audit_text(const OutcomeTable& table, const FairnessReport& report,
                              const PanelLabels& labels) {
  const auto& [ga, gb] = report.group_pair;
  auto partitions = partition_by_group(table);

  struct Panel {
    std::string name;
    ConfusionMatrix cm;
    AccuracyMetrics metrics;
  };
  std::vector<Panel> panels;
  panels.push_back({"all", confusion_matrix(table), {}});
  panels.push_back({ga, confusion_matrix(partitions.at(ga)), {}});
  panels.push_back({gb, confusion_matrix(partitions.at(gb)), {}});
  for (auto& p : panels) p.metrics = accuracy_metrics(p.cm);

  std::ostringstream out;
  auto col = [&](const std::string& text, int width) {
    out << std::left << std::setw(width) << text;
  };
  auto count = [](double v) {
    std::ostringstream s;
    if (v == std::floor(v)) s << static_cast<long long>(v);
    else s << std::fixed << std::setprecision(2) << v;
    return s.str();
  };

  out << "Group sizes:";
  for (const auto& [group, part] : partitions) {
    out << ' ' << group << '=' << part.size();
  }
  out << " (total " << table.size() << ")\n\n";

  out << "Confusion matrices:\n\n";
  col("", 16);
  for (const auto& p : panels) col(p.name, 22);
  out << '\n';
  col("", 16);
  for (std::size_t i = 0; i < panels.size(); ++i) {
    col(labels.pred_positive, 11);
    col(labels.pred_negative, 11);
  }
  out << '\n';
  col(labels.truth_positive, 16);
  for (const auto& p : panels) {
    col(count(p.cm.tp), 11);
    col(count(p.cm.fn), 11);
  }
  out << '\n';
  col(labels.truth_negative, 16);
  for (const auto& p : panels) {
    col(count(p.cm.fp), 11);
    col(count(p.cm.tn), 11);
  }
  out << "\n\nAccuracy metrics:\n\n";
  col("", 24);
  for (const auto& p : panels) col(p.name, 12);
  out << '\n';
  const std::vector<std::pair<std::string, std::optional<double> AccuracyMetrics::*>> rows = {
      {"predictive_accuracy", &AccuracyMetrics::predictive_accuracy},
      {"balanced_accuracy", &AccuracyMetrics::balanced_accuracy},
      {"sensitivity", &AccuracyMetrics::sensitivity},
      {"specificity", &AccuracyMetrics::specificity},
      {"precision", &AccuracyMetrics::precision},
      {"npv", &AccuracyMetrics::npv},
      {"fp_rate", &AccuracyMetrics::fp_rate},
      {"fn_rate", &AccuracyMetrics::fn_rate},
  };
  for (const auto& [name, member] : rows) {
    col(name, 24);
    for (const auto& p : panels) col(fmt4(p.metrics.*member), 12);
    out << '\n';
  }

  out << "\nFairness determinations (" << ga << " vs " << gb
      << ", epsilon = " << report.config.epsilon << "):\n\n";
  auto criterion_line = [&](const std::string& name, std::span<const GapComponent> comps,
                            Verdict verdict) {
    std::ostringstream detail;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (i) detail << "; ";
      detail << comps[i].name << " gap = " << fmt4(comps[i].gap()) << " (" << fmt4(comps[i].rate_a)
             << " - " << fmt4(comps[i].rate_b) << ")";
    }
    col("(" + name + ")", 16);
    col(to_string(verdict), 15);
    out << detail.str() << '\n';
  };
  criterion_line("independence", std::span<const GapComponent>(&report.independence, 1),
                 report.independence_verdict);
  criterion_line("separation", report.separation, report.separation_verdict);
  criterion_line("sufficiency", report.sufficiency, report.sufficiency_verdict);

  out << "\nFour-fifths rule: " << to_string(report.four_fifths) << " (threshold "
      << report.config.four_fifths_threshold << "; rates:";
  for (const auto& [group, rate] : report.selection_rates) {
    out << ' ' << group << "=" << fmt4(rate);
  }
  out << ")\n";

  if (!report.advisories.suppressed.empty()) {
    out << "\nAdvisories suppressed: " << report.advisories.suppressed << '\n';
  } else {
    auto active = report.advisories.active();
    if (!active.empty()) {
      out << "\nAdvisories:\n";
      for (const auto& a : active) {
        out << "  (" << a.proposition << ") " << a.implication << " [precondition: "
            << a.precondition << "]\n";
      }
    }
  }
  return out.str();
}

}  // namespace fairaudit
