#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace fairaudit {

// word -> vector map read from a text vector file (token then floats per
// line; an optional "count dim" header line is auto-detected). Word matching
// is exact and case-sensitive.
class EmbeddingTable {
 public:
  static EmbeddingTable load(const std::filesystem::path& path);
  static EmbeddingTable from_entries(
      std::size_t dimension, std::vector<std::pair<std::string, std::vector<double>>> entries);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  const std::vector<double>* find(const std::string& word) const;
  const std::vector<double>& at(const std::string& word) const;  // DataError naming the word

  // Duplicate words in the source file: last occurrence won.
  std::size_t duplicates_overwritten() const { return duplicates_; }

  // Order-independent: row-permuted files fingerprint identically.
  std::string fingerprint() const;

  std::string to_text() const;  // the same word-per-line vector format

 private:
  std::size_t dimension_ = 0;
  std::vector<std::string> words_;  // insertion order
  std::map<std::string, std::vector<double>> vectors_;
  std::size_t duplicates_ = 0;
};

struct AttributePair {
  std::string left;   // e.g. "he"
  std::string right;  // e.g. "she"
};

double cosine(std::span<const double> u, std::span<const double> v);

// cosine(word, left) - cosine(word, right); in [-2, 2].
double bias_score(const std::string& word, const AttributePair& pair,
                  const EmbeddingTable& table);

struct BiasReport {
  AttributePair pair;
  std::vector<std::pair<std::string, double>> scores;  // found words, wordlist order
  std::vector<std::string> missing;
  double mean = 0;  // over found words
  std::string max_abs_word;
  double max_abs_score = 0;
  std::string table_fingerprint;

  std::string to_csv() const;  // word,score
  nlohmann::json to_json() const;
};

// Missing words are listed, not fatal; zero found words is an error.
BiasReport bias_report(std::span<const std::string> wordlist, const AttributePair& pair,
                       const EmbeddingTable& table);

// Unit-normalized mean of (left - right) difference vectors.
std::vector<double> gender_direction(std::span<const AttributePair> pairs,
                                     const EmbeddingTable& table);

// Projects every non-excluded word onto the nullspace of `direction`
// (w -> w - (w.d)d). The attribute words themselves go in `exclude`.
EmbeddingTable debias_project(const EmbeddingTable& table, std::span<const double> direction,
                              const std::set<std::string>& exclude);

// Probabilities normalized at construction; negatives and zero mass rejected.
class TokenDistribution {
 public:
  explicit TokenDistribution(std::vector<std::pair<std::string, double>> weighted);
  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

enum class DecodeMode { argmax, proportional };

// argmax: the single most probable token n times (ties: first in token
// order). proportional: seeded multinomial draws.
std::map<std::string, long long> sample_tokens(const TokenDistribution& dist, DecodeMode mode,
                                               long long n, std::uint64_t seed);

// One word per line; '#' starts a comment.
std::vector<std::string> load_wordlist(const std::filesystem::path& path);

}  // namespace fairaudit
