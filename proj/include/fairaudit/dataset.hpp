#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace fairaudit {

// One audited outcome: ground truth, binary prediction, protected-group value.
struct OutcomeRecord {
  bool truth = false;       // true = positive class (e.g. recidivated)
  bool prediction = false;  // true = positive prediction (e.g. high risk)
  std::string group;
  double weight = 1.0;
};

// Immutable after construction; safe to share read-only across threads.
class OutcomeTable {
 public:
  OutcomeTable() = default;
  static OutcomeTable from_records(std::vector<OutcomeRecord> records);

  const std::vector<OutcomeRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  // Sorted unique group values present in the table.
  const std::vector<std::string>& group_domain() const { return groups_; }

  // One record per line, fixed field order; the determinism contract for
  // ingestion (same file + same recipe => byte-identical serialization).
  std::string canonical_serialization() const;
  std::string fingerprint() const;

 private:
  std::vector<OutcomeRecord> records_;
  std::vector<std::string> groups_;
};

// Column mapping used at ingestion. Either prediction_column or score_column
// must be set; with score_column, cells are integers binarized at score_cutoff.
struct ColumnSchema {
  char delimiter = ',';
  std::string truth_column;
  std::string truth_positive = "1";
  std::string prediction_column;
  std::string prediction_positive = "1";
  std::string score_column;
  int score_cutoff = 5;
  std::string group_column;
  std::string weight_column;  // optional
};

// prediction = positive iff raw >= cutoff; raw must lie in 1..10.
bool binarize_score(int raw, int cutoff);

OutcomeTable load_outcomes(const std::filesystem::path& path, const ColumnSchema& schema);

// Partitions are disjoint and their union is the input (conservation).
std::map<std::string, OutcomeTable> partition_by_group(const OutcomeTable& table);

// Preparation pipeline for the ProPublica two-year COMPAS export.
// Serialized alongside any report it produced.
struct CompasRecipe {
  int score_cutoff = 5;  // high iff decile score >= 5
  int screening_window_lo = -30;
  int screening_window_hi = 30;
  std::set<std::string> excluded_score_texts = {"N/A"};
  std::string recidivism_column = "two_year_recid";  // fixed two-year outcome
  std::string score_column = "decile_score";
  std::string score_text_column = "score_text";
  std::string screening_column = "days_b_screening_arrest";
  std::string group_column = "race";
  // Raw race values mapped to audit panel labels; unmapped values keep the
  // raw string and count only toward the unpartitioned "all" panel.
  std::map<std::string, std::string> group_labels = {
      {"African-American", "black"},
      {"Caucasian", "white"},
  };

  nlohmann::json to_json() const;
};

struct CompasLoadStats {
  std::size_t rows_total = 0;
  std::size_t rows_window_rejected = 0;
  std::size_t rows_score_text_rejected = 0;
};

OutcomeTable load_compas(const std::filesystem::path& path, const CompasRecipe& recipe,
                         CompasLoadStats* stats = nullptr);

}  // namespace fairaudit
