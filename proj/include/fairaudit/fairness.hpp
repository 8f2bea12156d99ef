#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fairaudit/metrics.hpp"

namespace fairaudit {

enum class ComparisonMode { absolute_difference, ratio };

struct FairnessConfig {
  double epsilon = 0.1;                // slack on absolute probability gaps
  double four_fifths_threshold = 0.8;  // selection-rate ratio floor
  ComparisonMode mode = ComparisonMode::absolute_difference;

  void validate() const;  // ConfigError on out-of-range values
  nlohmann::json to_json() const;
};

// One component of a criterion: the rate for each group and their signed
// difference. A missing rate (zero denominator) makes the component
// not evaluable rather than an exception.
struct GapComponent {
  std::string name;  // e.g. "sensitivity"
  std::optional<double> rate_a;
  std::optional<double> rate_b;

  bool evaluable() const { return rate_a.has_value() && rate_b.has_value(); }
  std::optional<double> gap() const;
  std::optional<double> abs_gap() const;
  nlohmann::json to_json() const;
};

enum class Verdict { satisfied, violated, not_evaluable };
enum class FourFifthsFinding { adverse_impact_evidence, no_evidence, not_evaluable };

std::string to_string(Verdict v);
std::string to_string(FourFifthsFinding f);
std::string to_string(ComparisonMode m);

// P(pred=+|A=a) - P(pred=+|A=b): equal selection rates across groups.
GapComponent independence_component(const ConfusionMatrix& cm_a, const ConfusionMatrix& cm_b);
// (sensitivity gap, fp-rate gap): equal error rates given the true label.
std::array<GapComponent, 2> separation_components(const ConfusionMatrix& cm_a,
                                                  const ConfusionMatrix& cm_b);
// (precision gap, (1-npv) gap): equal outcome rates given the prediction.
std::array<GapComponent, 2> sufficiency_components(const ConfusionMatrix& cm_a,
                                                   const ConfusionMatrix& cm_b);

// Signed-gap views of the same operations.
std::optional<double> independence_gap(const ConfusionMatrix& cm_a, const ConfusionMatrix& cm_b);
std::pair<std::optional<double>, std::optional<double>> separation_gaps(
    const ConfusionMatrix& cm_a, const ConfusionMatrix& cm_b);
std::pair<std::optional<double>, std::optional<double>> sufficiency_gaps(
    const ConfusionMatrix& cm_a, const ConfusionMatrix& cm_b);

// Absolute mode: violated iff any evaluable |gap| > epsilon; |gap| = epsilon
// counts as satisfied (documented boundary tie rule). Ratio mode compares
// min(rate)/max(rate) against four_fifths_threshold per component.
Verdict evaluate_criterion(std::span<const GapComponent> components, const FairnessConfig& config);

// Adverse-impact evidence iff the lowest selection rate falls below
// threshold x the highest. Needs at least two evaluable groups.
FourFifthsFinding four_fifths_test(const std::map<std::string, std::optional<double>>& rates,
                                   double threshold = 0.8);

// One incompatibility proposition evaluated against the table's empirical
// joint distribution. Informational, never a verdict.
struct Advisory {
  std::string proposition;  // "i", "ii", "iii"
  std::string criteria;     // the pair that cannot both hold exactly
  std::string precondition;
  bool precondition_holds = false;
  std::string implication;  // set when the precondition holds
  nlohmann::json to_json() const;
};

struct AdvisoryScan {
  std::vector<Advisory> evaluations;  // all three propositions
  std::string suppressed;             // non-empty when a degenerate table suppressed the scan

  std::vector<Advisory> active() const;  // evaluations whose precondition holds
  nlohmann::json to_json() const;
};

AdvisoryScan incompatibility_advisories(const OutcomeTable& table, double tolerance = 1e-9);

struct FairnessReport {
  std::pair<std::string, std::string> group_pair;
  GapComponent independence;
  std::array<GapComponent, 2> separation;
  std::array<GapComponent, 2> sufficiency;
  Verdict independence_verdict = Verdict::not_evaluable;
  Verdict separation_verdict = Verdict::not_evaluable;
  Verdict sufficiency_verdict = Verdict::not_evaluable;
  FourFifthsFinding four_fifths = FourFifthsFinding::not_evaluable;
  std::map<std::string, std::optional<double>> selection_rates;
  AdvisoryScan advisories;
  FairnessConfig config;
  std::string dataset_fingerprint;

  nlohmann::json to_json() const;
};

// Audit one named group pair; advisories are scanned over the whole table.
FairnessReport audit_pair(const OutcomeTable& table, const std::string& group_a,
                          const std::string& group_b, const FairnessConfig& config);

// All unordered pairs of the table's group domain.
std::vector<FairnessReport> audit_all_pairs(const OutcomeTable& table,
                                            const FairnessConfig& config);

// Outcome labels for the text renderer.
struct PanelLabels {
  std::string truth_positive = "positive";
  std::string truth_negative = "negative";
  std::string pred_positive = "predicted+";
  std::string pred_negative = "predicted-";
};

// Three-panel text table: confusion matrices, accuracy metrics, fairness
// determinations for the report's pair, plus the unpartitioned table.
std::string render_audit_text(const OutcomeTable& table, const FairnessReport& report,
                              const PanelLabels& labels = {});

}  // namespace fairaudit
