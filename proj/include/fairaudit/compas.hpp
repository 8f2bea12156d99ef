#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fairaudit/dataset.hpp"
#include "fairaudit/fairness.hpp"
#include "fairaudit/metrics.hpp"

namespace fairaudit {

// Reference confusion counts for the COMPAS two-year recidivism audit,
// read from the bundled checksummed fixture.
struct CountFixture {
  std::vector<std::pair<std::string, ConfusionMatrix>> panels;  // file order
  std::string checksum;

  const ConfusionMatrix* find(const std::string& group) const;
  static CountFixture load(const std::filesystem::path& path);  // IntegrityError on bad checksum
};

// Weighted outcome table whose per-group confusion counts equal the fixture.
// Panels other than "all" become groups; the remainder of "all" is assigned
// to a synthetic "other" group so the unpartitioned counts match too.
OutcomeTable table_from_fixture(const CountFixture& fixture);

struct CellCheck {
  std::string panel;
  std::string metric;
  double expected = 0;
  double actual = 0;
  bool pass = false;
};

struct VerdictCheck {
  std::string criterion;
  std::string expected;
  std::string actual;
  bool pass = false;
};

// Recomputes the full audit from the fixture counts and compares every
// derived figure against the published reference values.
struct ReplicationResult {
  CountFixture fixture;
  FairnessReport report;                // black vs white at epsilon 0.1
  std::vector<CellCheck> accuracy_cells;  // 8 metrics x 3 panels
  std::vector<CellCheck> gap_cells;       // 5 criterion gaps
  std::vector<VerdictCheck> verdict_checks;

  int accuracy_matched() const;
  int gaps_matched() const;
  int verdicts_matched() const;
  bool all_pass() const;

  nlohmann::json to_json() const;
  std::string render_text() const;  // three-panel layout plus the check summary
};

ReplicationResult run_replication(const CountFixture& fixture, double tolerance = 5e-4);

// Exact per-cell comparison of a pipeline-produced table against the fixture.
struct CountDiff {
  std::string group;
  std::string cell;  // tp/fn/fp/tn
  double expected = 0;
  double actual = 0;
};

std::vector<CountDiff> diff_counts(const CountFixture& fixture, const OutcomeTable& table);

}  // namespace fairaudit
