#include "fairaudit/stereotype.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "fairaudit/errors.hpp"
#include "fairaudit/hash.hpp"

namespace fairaudit {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string token;
  while (in >> token) out.push_back(std::move(token));
  return out;
}

bool parse_positive_int(const std::string& s, std::size_t& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  try {
    out = std::stoull(s);
  } catch (const std::exception&) {
    return false;
  }
  return out > 0;
}

double parse_component(const std::string& s, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) + ": cannot parse vector component '" + s +
                    "'");
  }
}

}  // namespace

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file: " + path.string());

  std::vector<std::pair<std::string, std::vector<double>>> entries;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dimension = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (first_content_line && tokens.size() == 2) {
      // word2vec-style "count dimension" header
      std::size_t count = 0, dim = 0;
      if (parse_positive_int(tokens[0], count) && parse_positive_int(tokens[1], dim)) {
        first_content_line = false;
        continue;
      }
    }
    first_content_line = false;
    if (tokens.size() < 2) {
      throw DataError("line " + std::to_string(line_no) + ": expected a word and at least one " +
                      "component, got '" + line + "'");
    }
    std::vector<double> vec;
    vec.reserve(tokens.size() - 1);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      vec.push_back(parse_component(tokens[i], line_no));
    }
    if (dimension == 0) {
      dimension = vec.size();
    } else if (vec.size() != dimension) {
      throw DataError("line " + std::to_string(line_no) + ": vector of dimension " +
                      std::to_string(vec.size()) + " in a table of dimension " +
                      std::to_string(dimension));
    }
    entries.emplace_back(std::move(tokens[0]), std::move(vec));
  }
  if (entries.empty()) throw DataError("empty embedding file: " + path.string());
  return from_entries(dimension, std::move(entries));
}

EmbeddingTable EmbeddingTable::from_entries(
    std::size_t dimension, std::vector<std::pair<std::string, std::vector<double>>> entries) {
  EmbeddingTable table;
  table.dimension_ = dimension;
  for (auto& [word, vec] : entries) {
    if (vec.size() != dimension) {
      throw DataError("vector for '" + word + "' has dimension " + std::to_string(vec.size()) +
                      ", table declares " + std::to_string(dimension));
    }
    auto [it, inserted] = table.vectors_.insert_or_assign(word, std::move(vec));
    if (inserted) {
      table.words_.push_back(word);
    } else {
      ++table.duplicates_;  // last occurrence wins
    }
  }
  return table;
}

const std::vector<double>* EmbeddingTable::find(const std::string& word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? nullptr : &it->second;
}

const std::vector<double>& EmbeddingTable::at(const std::string& word) const {
  const auto* vec = find(word);
  if (!vec) throw DataError("word '" + word + "' not present in embedding table");
  return *vec;
}

std::string EmbeddingTable::fingerprint() const {
  // vectors_ is ordered by word, so permuted source files hash identically
  std::string bytes;
  bytes.reserve(vectors_.size() * (8 + dimension_ * sizeof(double)));
  for (const auto& [word, vec] : vectors_) {
    bytes += word;
    bytes += '\0';
    for (double v : vec) {
      char raw[sizeof(double)];
      std::memcpy(raw, &v, sizeof(double));
      bytes.append(raw, sizeof(double));
    }
  }
  return fairaudit::fingerprint(bytes);
}

std::string EmbeddingTable::to_text() const {
  std::ostringstream out;
  out.precision(17);
  for (const auto& word : words_) {
    out << word;
    for (double v : vectors_.at(word)) out << ' ' << v;
    out << '\n';
  }
  return out.str();
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw DataError("cosine of vectors with different dimensions (" + std::to_string(u.size()) +
                    " vs " + std::to_string(v.size()) + ")");
  }
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0 || nv == 0) throw DataError("cosine undefined for a zero vector");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double bias_score(const std::string& word, const AttributePair& pair,
                  const EmbeddingTable& table) {
  const auto& w = table.at(word);
  const auto& left = table.at(pair.left);
  const auto& right = table.at(pair.right);
  return cosine(w, left) - cosine(w, right);
}

BiasReport bias_report(std::span<const std::string> wordlist, const AttributePair& pair,
                       const EmbeddingTable& table) {
  if (wordlist.empty()) throw DataError("empty wordlist");
  table.at(pair.left);  // attribute words must be present
  table.at(pair.right);

  BiasReport report;
  report.pair = pair;
  report.table_fingerprint = table.fingerprint();
  double sum = 0;
  for (const auto& word : wordlist) {
    if (!table.find(word)) {
      report.missing.push_back(word);
      continue;
    }
    double score = bias_score(word, pair, table);
    report.scores.emplace_back(word, score);
    sum += score;
    if (report.scores.size() == 1 || std::abs(score) > std::abs(report.max_abs_score)) {
      report.max_abs_word = word;
      report.max_abs_score = score;
    }
  }
  if (report.scores.empty()) {
    throw DataError("no wordlist word present in the embedding table; empty report");
  }
  report.mean = sum / static_cast<double>(report.scores.size());
  return report;
}

std::string BiasReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "word,score\n";
  for (const auto& [word, score] : scores) out << word << ',' << score << '\n';
  return out.str();
}

nlohmann::json BiasReport::to_json() const {
  nlohmann::json j;
  j["pair"] = {{"left", pair.left}, {"right", pair.right}};
  j["table_fingerprint"] = table_fingerprint;
  j["words_scored"] = scores.size();
  j["missing"] = missing;
  j["mean_score"] = mean;
  j["max_abs"] = {{"word", max_abs_word}, {"score", max_abs_score}};
  return j;
}

std::vector<double> gender_direction(std::span<const AttributePair> pairs,
                                     const EmbeddingTable& table) {
  if (pairs.empty()) throw DataError("gender direction needs at least one attribute pair");
  std::vector<double> mean(table.dimension(), 0.0);
  for (const auto& pair : pairs) {
    const auto& left = table.at(pair.left);
    const auto& right = table.at(pair.right);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += left[i] - right[i];
  }
  double norm_sq = 0;
  for (double& v : mean) {
    v /= static_cast<double>(pairs.size());
    norm_sq += v * v;
  }
  if (norm_sq == 0) {
    throw DataError("degenerate direction: attribute pairs average to the zero vector");
  }
  double norm = std::sqrt(norm_sq);
  for (double& v : mean) v /= norm;
  return mean;
}

EmbeddingTable debias_project(const EmbeddingTable& table, std::span<const double> direction,
                              const std::set<std::string>& exclude) {
  if (direction.size() != table.dimension()) {
    throw DataError("direction dimension " + std::to_string(direction.size()) +
                    " does not match table dimension " + std::to_string(table.dimension()));
  }
  std::vector<std::pair<std::string, std::vector<double>>> entries;
  entries.reserve(table.size());
  for (const auto& word : table.words()) {
    std::vector<double> vec = table.at(word);
    if (!exclude.count(word)) {
      double dot = 0;
      for (std::size_t i = 0; i < vec.size(); ++i) dot += vec[i] * direction[i];
      for (std::size_t i = 0; i < vec.size(); ++i) vec[i] -= dot * direction[i];
    }
    entries.emplace_back(word, std::move(vec));
  }
  return EmbeddingTable::from_entries(table.dimension(), std::move(entries));
}

TokenDistribution::TokenDistribution(std::vector<std::pair<std::string, double>> weighted) {
  if (weighted.empty()) throw DataError("token distribution needs at least one token");
  double sum = 0;
  for (const auto& [token, p] : weighted) {
    if (p < 0 || !std::isfinite(p)) {
      throw DataError("token '" + token + "' has an invalid probability");
    }
    sum += p;
  }
  if (!(sum > 0)) throw DataError("token distribution has zero total mass");
  for (auto& [token, p] : weighted) p /= sum;
  entries_ = std::move(weighted);
}

std::map<std::string, long long> sample_tokens(const TokenDistribution& dist, DecodeMode mode,
                                               long long n, std::uint64_t seed) {
  if (n < 1) throw DataError("sample count must be at least 1");
  const auto& entries = dist.entries();
  std::map<std::string, long long> freq;

  if (mode == DecodeMode::argmax) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < entries.size(); ++i) {
      if (entries[i].second > entries[best].second) best = i;  // ties: first in token order
    }
    freq[entries[best].first] = n;
    return freq;
  }

  // Inverse-CDF over raw mt19937_64 output: deterministic across platforms.
  std::mt19937_64 gen(seed);
  std::vector<double> cdf(entries.size());
  double acc = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    acc += entries[i].second;
    cdf[i] = acc;
  }
  cdf.back() = 1.0;
  for (long long k = 0; k < n; ++k) {
    double u = (gen() >> 11) * 0x1.0p-53;  // [0, 1)
    std::size_t idx = std::lower_bound(cdf.begin(), cdf.end(), u,
                                       [](double c, double x) { return c <= x; }) -
                      cdf.begin();
    ++freq[entries[idx].first];
  }
  return freq;
}

std::vector<std::string> load_wordlist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open wordlist: " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto tokens = split_ws(line);
    for (auto& t : tokens) words.push_back(std::move(t));
  }
  return words;
}

}  // namespace fairaudit
