#include "fairaudit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "fairaudit/csv.hpp"
#include "fairaudit/errors.hpp"
#include "fairaudit/hash.hpp"

namespace fairaudit {

namespace {

int parse_int(const std::string& cell, std::size_t line, const std::string& column) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw DataError("line " + std::to_string(line) + ": cannot parse '" + cell +
                    "' in column '" + column + "' as an integer");
  }
  return value;
}

double parse_double(const std::string& cell, std::size_t line, const std::string& column) {
  try {
    std::size_t pos = 0;
    double value = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return value;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line) + ": cannot parse '" + cell +
                    "' in column '" + column + "' as a number");
  }
}

int require_column(const CsvTable& csv, const std::string& name) {
  int idx = csv.column(name);
  if (idx < 0) throw SchemaError("missing column '" + name + "'");
  return idx;
}

}  // namespace

OutcomeTable OutcomeTable::from_records(std::vector<OutcomeRecord> records) {
  OutcomeTable table;
  for (const auto& r : records) {
    if (!(r.weight > 0)) {
      throw DataError("record weight must be positive, got " + std::to_string(r.weight) +
                      " for group '" + r.group + "'");
    }
  }
  table.records_ = std::move(records);
  std::set<std::string> groups;
  for (const auto& r : table.records_) groups.insert(r.group);
  table.groups_.assign(groups.begin(), groups.end());
  return table;
}

std::string OutcomeTable::canonical_serialization() const {
  std::ostringstream out;
  out.precision(17);
  for (const auto& r : records_) {
    out << (r.truth ? '+' : '-') << ',' << (r.prediction ? '+' : '-') << ',' << r.group << ','
        << r.weight << '\n';
  }
  return out.str();
}

std::string OutcomeTable::fingerprint() const {
  return fairaudit::fingerprint(canonical_serialization());
}

bool binarize_score(int raw, int cutoff) {
  if (raw < 1 || raw > 10) {
    throw DataError("raw score " + std::to_string(raw) + " outside 1..10");
  }
  return raw >= cutoff;
}

OutcomeTable load_outcomes(const std::filesystem::path& path, const ColumnSchema& schema) {
  if (schema.truth_column.empty() || schema.group_column.empty()) {
    throw SchemaError("schema must name truth and group columns");
  }
  if (schema.prediction_column.empty() == schema.score_column.empty()) {
    throw SchemaError("schema must name exactly one of prediction or score column");
  }
  CsvTable csv = read_csv(path, schema.delimiter);
  int truth_idx = require_column(csv, schema.truth_column);
  int group_idx = require_column(csv, schema.group_column);
  int pred_idx = -1, score_idx = -1, weight_idx = -1;
  if (!schema.prediction_column.empty()) pred_idx = require_column(csv, schema.prediction_column);
  if (!schema.score_column.empty()) score_idx = require_column(csv, schema.score_column);
  if (!schema.weight_column.empty()) weight_idx = require_column(csv, schema.weight_column);

  std::vector<OutcomeRecord> records;
  records.reserve(csv.rows.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    std::size_t line = csv.row_lines[i];
    if (row.size() != csv.header.size()) {
      throw DataError("line " + std::to_string(line) + ": expected " +
                      std::to_string(csv.header.size()) + " fields, got " +
                      std::to_string(row.size()));
    }
    OutcomeRecord rec;
    rec.truth = row[truth_idx] == schema.truth_positive;
    if (pred_idx >= 0) {
      rec.prediction = row[pred_idx] == schema.prediction_positive;
    } else {
      int raw = parse_int(row[score_idx], line, schema.score_column);
      if (raw < 1 || raw > 10) {
        throw DataError("line " + std::to_string(line) + ": raw score " + std::to_string(raw) +
                        " outside 1..10");
      }
      rec.prediction = binarize_score(raw, schema.score_cutoff);
    }
    rec.group = row[group_idx];
    if (weight_idx >= 0) {
      rec.weight = parse_double(row[weight_idx], line, schema.weight_column);
      if (!(rec.weight > 0) || !std::isfinite(rec.weight)) {
        throw DataError("line " + std::to_string(line) + ": weight must be a positive number");
      }
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) {
    throw DataError("empty dataset: " + path.string() + " has no data rows");
  }
  return OutcomeTable::from_records(std::move(records));
}

std::map<std::string, OutcomeTable> partition_by_group(const OutcomeTable& table) {
  std::map<std::string, std::vector<OutcomeRecord>> buckets;
  for (const auto& r : table.records()) buckets[r.group].push_back(r);
  std::map<std::string, OutcomeTable> out;
  for (auto& [group, records] : buckets) {
    out.emplace(group, OutcomeTable::from_records(std::move(records)));
  }
  return out;
}

nlohmann::json CompasRecipe::to_json() const {
  nlohmann::json j;
  j["score_cutoff"] = score_cutoff;
  j["screening_window_days"] = {screening_window_lo, screening_window_hi};
  j["excluded_score_texts"] = excluded_score_texts;
  j["recidivism_column"] = recidivism_column;
  j["score_column"] = score_column;
  j["score_text_column"] = score_text_column;
  j["screening_column"] = screening_column;
  j["group_column"] = group_column;
  j["group_labels"] = group_labels;
  return j;
}

OutcomeTable load_compas(const std::filesystem::path& path, const CompasRecipe& recipe,
                         CompasLoadStats* stats) {
  CsvTable csv = read_csv(path, ',');
  int truth_idx = require_column(csv, recipe.recidivism_column);
  int score_idx = require_column(csv, recipe.score_column);
  int text_idx = require_column(csv, recipe.score_text_column);
  int window_idx = require_column(csv, recipe.screening_column);
  int group_idx = require_column(csv, recipe.group_column);

  CompasLoadStats local;
  std::vector<OutcomeRecord> records;
  records.reserve(csv.rows.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    std::size_t line = csv.row_lines[i];
    if (row.size() != csv.header.size()) {
      throw DataError("line " + std::to_string(line) + ": expected " +
                      std::to_string(csv.header.size()) + " fields, got " +
                      std::to_string(row.size()));
    }
    ++local.rows_total;
    if (recipe.excluded_score_texts.count(row[text_idx])) {
      ++local.rows_score_text_rejected;
      continue;
    }
    // Empty screening gap means no arrest date to compare; treated as outside
    // the admissible window, like ProPublica's own filter.
    bool in_window = false;
    if (!row[window_idx].empty()) {
      int days = parse_int(row[window_idx], line, recipe.screening_column);
      in_window = days >= recipe.screening_window_lo && days <= recipe.screening_window_hi;
    }
    if (!in_window) {
      ++local.rows_window_rejected;
      continue;
    }
    OutcomeRecord rec;
    rec.truth = row[truth_idx] == "1";
    int raw = parse_int(row[score_idx], line, recipe.score_column);
    if (raw < 1 || raw > 10) {
      throw DataError("line " + std::to_string(line) + ": " + recipe.score_column + " " +
                      std::to_string(raw) + " outside 1..10");
    }
    rec.prediction = binarize_score(raw, recipe.score_cutoff);
    auto label = recipe.group_labels.find(row[group_idx]);
    rec.group = label != recipe.group_labels.end() ? label->second : row[group_idx];
    records.push_back(std::move(rec));
  }
  if (stats) *stats = local;
  if (records.empty()) {
    throw DataError("empty dataset: no rows of " + path.string() + " survive the recipe");
  }
  return OutcomeTable::from_records(std::move(records));
}

}  // namespace fairaudit
