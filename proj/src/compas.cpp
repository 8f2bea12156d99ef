#include "fairaudit/compas.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "fairaudit/errors.hpp"
#include "fairaudit/hash.hpp"

namespace fairaudit {

namespace {

// Published reference values the replication must reproduce within 5e-4.
struct ReferenceRow {
  const char* metric;
  std::optional<double> AccuracyMetrics::*member;
  double all;
  double black;
  double white;
};

constexpr double kEpsilon = 0.1;

const ReferenceRow kReferenceAccuracy[] = {
    {"predictive_accuracy", &AccuracyMetrics::predictive_accuracy, 0.6537, 0.6383, 0.6699},
    {"balanced_accuracy", &AccuracyMetrics::balanced_accuracy, 0.6512, 0.6358, 0.6441},
    {"sensitivity", &AccuracyMetrics::sensitivity, 0.6260, 0.7201, 0.5228},
    {"specificity", &AccuracyMetrics::specificity, 0.6765, 0.5515, 0.7655},
    {"precision", &AccuracyMetrics::precision, 0.6135, 0.6297, 0.5913},
    {"npv", &AccuracyMetrics::npv, 0.6880, 0.6505, 0.7119},
    {"fp_rate", &AccuracyMetrics::fp_rate, 0.3235, 0.4485, 0.2345},
    {"fn_rate", &AccuracyMetrics::fn_rate, 0.3740, 0.2799, 0.4772},
};

struct ReferenceGap {
  const char* criterion;
  const char* component;
  double value;
};

const ReferenceGap kReferenceGaps[] = {
    {"independence", "selection_rate", 0.2402},
    {"separation", "sensitivity", 0.1974},
    {"separation", "fp_rate", 0.2139},
    {"sufficiency", "precision", 0.0384},
    {"sufficiency", "one_minus_npv", 0.0614},
};

const std::pair<const char*, Verdict> kReferenceVerdicts[] = {
    {"independence", Verdict::violated},
    {"separation", Verdict::violated},
    {"sufficiency", Verdict::satisfied},
};

std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

const ConfusionMatrix* CountFixture::find(const std::string& group) const {
  for (const auto& [name, cm] : panels) {
    if (name == group) return &cm;
  }
  return nullptr;
}

CountFixture CountFixture::load(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  CountFixture fixture;
  std::string line;
  std::string payload;
  std::string declared_checksum;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = strip(line);
    if (text.empty()) continue;
    if (text[0] == '#') {
      const std::string tag = "# checksum:";
      if (text.rfind(tag, 0) == 0) declared_checksum = strip(text.substr(tag.size()));
      continue;
    }
    if (!payload.empty()) payload += '\n';
    payload += text;
    std::istringstream fields(text);
    std::string group;
    double tp, fn, fp, tn;
    if (!(fields >> group >> tp >> fn >> fp >> tn)) {
      throw IntegrityError(path.string() + ":" + std::to_string(line_no) +
                           ": expected 'group TP FN FP TN', got '" + text + "'");
    }
    std::string extra;
    if (fields >> extra) {
      throw IntegrityError(path.string() + ":" + std::to_string(line_no) +
                           ": trailing content '" + extra + "'");
    }
    fixture.panels.emplace_back(group, ConfusionMatrix{tp, fp, fn, tn});
  }
  if (fixture.panels.empty()) throw IntegrityError("fixture has no count rows: " + path.string());
  if (declared_checksum.empty()) {
    throw IntegrityError("fixture is missing its checksum line: " + path.string());
  }
  fixture.checksum = fingerprint(payload);
  if (fixture.checksum != declared_checksum) {
    throw IntegrityError("fixture checksum mismatch for " + path.string() + ": declared " +
                         declared_checksum + ", computed " + fixture.checksum);
  }
  return fixture;
}

OutcomeTable table_from_fixture(const CountFixture& fixture) {
  const ConfusionMatrix* all = fixture.find("all");
  ConfusionMatrix residual = all ? *all : ConfusionMatrix{};
  std::vector<OutcomeRecord> records;
  auto add_cell = [&](const std::string& group, bool truth, bool pred, double weight) {
    if (weight <= 0) return;
    records.push_back({truth, pred, group, weight});
  };
  for (const auto& [group, cm] : fixture.panels) {
    if (group == "all") continue;
    add_cell(group, true, true, cm.tp);
    add_cell(group, true, false, cm.fn);
    add_cell(group, false, true, cm.fp);
    add_cell(group, false, false, cm.tn);
    residual.tp -= cm.tp;
    residual.fn -= cm.fn;
    residual.fp -= cm.fp;
    residual.tn -= cm.tn;
  }
  if (all) {
    for (double v : {residual.tp, residual.fn, residual.fp, residual.tn}) {
      if (v < 0) {
        throw IntegrityError("fixture 'all' panel is smaller than the sum of its group panels");
      }
    }
    add_cell("other", true, true, residual.tp);
    add_cell("other", true, false, residual.fn);
    add_cell("other", false, true, residual.fp);
    add_cell("other", false, false, residual.tn);
  }
  return OutcomeTable::from_records(std::move(records));
}

int ReplicationResult::accuracy_matched() const {
  int n = 0;
  for (const auto& c : accuracy_cells) n += c.pass;
  return n;
}

int ReplicationResult::gaps_matched() const {
  int n = 0;
  for (const auto& c : gap_cells) n += c.pass;
  return n;
}

int ReplicationResult::verdicts_matched() const {
  int n = 0;
  for (const auto& c : verdict_checks) n += c.pass;
  return n;
}

bool ReplicationResult::all_pass() const {
  return accuracy_matched() == static_cast<int>(accuracy_cells.size()) &&
         gaps_matched() == static_cast<int>(gap_cells.size()) &&
         verdicts_matched() == static_cast<int>(verdict_checks.size());
}

ReplicationResult run_replication(const CountFixture& fixture, double tolerance) {
  for (const char* group : {"all", "black", "white"}) {
    if (!fixture.find(group)) {
      throw IntegrityError(std::string("fixture is missing the '") + group + "' panel");
    }
  }
  ReplicationResult result;
  result.fixture = fixture;

  OutcomeTable table = table_from_fixture(fixture);
  FairnessConfig config;
  config.epsilon = kEpsilon;
  result.report = audit_pair(table, "black", "white", config);

  const AccuracyMetrics all = accuracy_metrics(*fixture.find("all"));
  const AccuracyMetrics black = accuracy_metrics(*fixture.find("black"));
  const AccuracyMetrics white = accuracy_metrics(*fixture.find("white"));
  for (const auto& row : kReferenceAccuracy) {
    const std::pair<const char*, const AccuracyMetrics*> panels[] = {
        {"all", &all}, {"black", &black}, {"white", &white}};
    for (const auto& [panel, metrics] : panels) {
      double expected = panel == std::string("all")   ? row.all
                        : panel == std::string("black") ? row.black
                                                        : row.white;
      std::optional<double> actual = metrics->*row.member;
      CellCheck check{panel, row.metric, expected, actual.value_or(std::nan("")), false};
      check.pass = actual.has_value() && std::abs(*actual - expected) < tolerance;
      result.accuracy_cells.push_back(check);
    }
  }

  auto gap_of = [&](const std::string& criterion, const std::string& component)
      -> std::optional<double> {
    const GapComponent* comp = nullptr;
    if (criterion == "independence") comp = &result.report.independence;
    else if (criterion == "separation") {
      comp = component == result.report.separation[0].name ? &result.report.separation[0]
                                                           : &result.report.separation[1];
    } else {
      comp = component == result.report.sufficiency[0].name ? &result.report.sufficiency[0]
                                                            : &result.report.sufficiency[1];
    }
    return comp->gap();
  };
  for (const auto& ref : kReferenceGaps) {
    auto actual = gap_of(ref.criterion, ref.component);
    CellCheck check{ref.criterion, ref.component, ref.value, actual.value_or(std::nan("")), false};
    check.pass = actual.has_value() && std::abs(*actual - ref.value) < tolerance;
    result.gap_cells.push_back(check);
  }

  const std::pair<const char*, Verdict> actual_verdicts[] = {
      {"independence", result.report.independence_verdict},
      {"separation", result.report.separation_verdict},
      {"sufficiency", result.report.sufficiency_verdict},
  };
  for (std::size_t i = 0; i < 3; ++i) {
    VerdictCheck check;
    check.criterion = kReferenceVerdicts[i].first;
    check.expected = to_string(kReferenceVerdicts[i].second);
    check.actual = to_string(actual_verdicts[i].second);
    check.pass = check.expected == check.actual;
    result.verdict_checks.push_back(check);
  }
  return result;
}

nlohmann::json ReplicationResult::to_json() const {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : accuracy_cells) {
    cells.push_back({{"panel", c.panel},
                     {"metric", c.metric},
                     {"expected", c.expected},
                     {"actual", c.actual},
                     {"pass", c.pass}});
  }
  nlohmann::json gaps = nlohmann::json::array();
  for (const auto& c : gap_cells) {
    gaps.push_back({{"criterion", c.panel},
                    {"component", c.metric},
                    {"expected", c.expected},
                    {"actual", c.actual},
                    {"pass", c.pass}});
  }
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : verdict_checks) {
    verdicts.push_back({{"criterion", v.criterion},
                        {"expected", v.expected},
                        {"actual", v.actual},
                        {"pass", v.pass}});
  }
  return {{"fixture_checksum", fixture.checksum},
          {"accuracy_cells", cells},
          {"gap_cells", gaps},
          {"verdicts", verdicts},
          {"accuracy_matched", accuracy_matched()},
          {"gaps_matched", gaps_matched()},
          {"verdicts_matched", verdicts_matched()},
          {"all_pass", all_pass()},
          {"report", report.to_json()}};
}

std::string ReplicationResult::render_text() const {
  OutcomeTable table = table_from_fixture(fixture);
  PanelLabels labels{"recidivated", "survived", "high", "low"};
  std::ostringstream out;
  out << render_audit_text(table, report, labels);
  out << "\nReplication checks (tolerance 5e-4):\n";
  out << "  accuracy metrics: " << accuracy_matched() << '/' << accuracy_cells.size()
      << " metrics matched\n";
  out << "  criterion gaps:   " << gaps_matched() << '/' << gap_cells.size() << " matched\n";
  out << "  verdicts:         " << verdicts_matched() << '/' << verdict_checks.size()
      << " matched\n";
  for (const auto& c : accuracy_cells) {
    if (!c.pass) {
      out << "  MISMATCH " << c.panel << ' ' << c.metric << ": expected " << c.expected
          << ", got " << c.actual << '\n';
    }
  }
  for (const auto& c : gap_cells) {
    if (!c.pass) {
      out << "  MISMATCH " << c.panel << ' ' << c.metric << " gap: expected " << c.expected
          << ", got " << c.actual << '\n';
    }
  }
  for (const auto& v : verdict_checks) {
    if (!v.pass) {
      out << "  MISMATCH " << v.criterion << " verdict: expected " << v.expected << ", got "
          << v.actual << '\n';
    }
  }
  out << (all_pass() ? "REPLICATION OK" : "REPLICATION FAILED") << '\n';
  return out.str();
}

std::vector<CountDiff> diff_counts(const CountFixture& fixture, const OutcomeTable& table) {
  auto partitions = partition_by_group(table);
  std::vector<CountDiff> diffs;
  for (const auto& [group, expected] : fixture.panels) {
    ConfusionMatrix actual;
    if (group == "all") {
      actual = confusion_matrix(table);
    } else if (auto it = partitions.find(group); it != partitions.end()) {
      actual = confusion_matrix(it->second);
    }
    const std::pair<const char*, std::pair<double, double>> cells[] = {
        {"tp", {expected.tp, actual.tp}},
        {"fn", {expected.fn, actual.fn}},
        {"fp", {expected.fp, actual.fp}},
        {"tn", {expected.tn, actual.tn}},
    };
    for (const auto& [cell, values] : cells) {
      if (values.first != values.second) {
        diffs.push_back({group, cell, values.first, values.second});
      }
    }
  }
  return diffs;
}

}  // namespace fairaudit
