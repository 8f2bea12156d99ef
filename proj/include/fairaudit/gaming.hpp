#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace fairaudit {

// One applicant. Gaming moves x_mutable only; true_class and x_immutable are
// conserved across all rounds.
struct Agent {
  double x_immutable = 0;
  double x_mutable = 0;
  bool true_class = false;
  bool gamed = false;
};

// Decision rule: positive iff w.x + b >= 0 (a score of exactly zero
// classifies positive; crossing the cutoff succeeds).
struct LinearClassifier {
  double w_immutable = 0;
  double w_mutable = 0;
  double bias = 0;

  double score(const Agent& a) const {
    return w_immutable * a.x_immutable + w_mutable * a.x_mutable + bias;
  }
  bool predict(const Agent& a) const { return score(a) >= 0.0; }
};

// Two mirrored Gaussian blobs: class mean +/-(mu_immutable, mu_mutable) with
// per-axis noise. mu values are the class-feature correlation knobs.
struct DataRule {
  double mu_immutable = 1.0;
  double mu_mutable = 1.0;
  double sigma_immutable = 0.5;
  double sigma_mutable = 0.5;
};

// Full-batch logistic-loss gradient descent from zero init; deterministic.
struct TrainSettings {
  double step = 0.1;
  int iterations = 2000;
  double l2 = 0.0;
};

inline constexpr double kUnboundedBudget = std::numeric_limits<double>::infinity();

struct GamingConfig {
  int n_agents = 1000;
  std::uint64_t seed = 0;
  DataRule data_rule;
  double budget = kUnboundedBudget;  // per-round cap on |mutable displacement|
  double margin = 1e-6;              // overshoot past the disclosed boundary
  int max_rounds = 100;
  double weight_tolerance = 1e-4;    // L-inf change between retrains
  double dominance_threshold = 0.95;
  TrainSettings train;

  void validate() const;
  // key=value lines, '#' comments; keys_seen (when given) records which keys
  // the file actually set, so callers can tell a defaulted seed from a real one.
  static GamingConfig from_file(const std::filesystem::path& path,
                                std::set<std::string>* keys_seen = nullptr);
  nlohmann::json to_json() const;
};

struct RoundStats {
  int round = 0;
  LinearClassifier classifier;  // trained at the end of this round
  double acceptance_rate = 0;   // post-game rate under the disclosed classifier
  double accuracy = 0;          // of `classifier` against true labels
  std::optional<double> dominance;
  int gamed_count = 0;   // agents that moved this round
  int capped_count = 0;  // moved agents whose prediction still did not flip
};

enum class Termination { weight_converged, dominance_reached, max_rounds };
std::string to_string(Termination t);

struct GamingTrace {
  std::vector<RoundStats> rounds;
  Termination termination = Termination::max_rounds;
  GamingConfig config;

  std::string to_csv() const;  // one row per round; byte-identical given config
};

// Deterministic given config.seed; both classes always present.
std::vector<Agent> generate_population(const GamingConfig& config);

LinearClassifier train_classifier(std::span<const Agent> population,
                                  const TrainSettings& settings = {});

struct MoveResult {
  double new_x_mutable = 0;
  bool moved = false;    // features changed
  bool flipped = false;  // prediction positive after the move
  bool capped = false;   // budget bound before the boundary, or mutable axis powerless
};

// Minimal mutable-feature change (plus margin) that flips a negative
// prediction, capped at the budget. x_immutable is never touched.
MoveResult counterfactual_move(const Agent& agent, const LinearClassifier& classifier,
                               const GamingConfig& config);

// |w_immutable| / (|w_immutable| + |w_mutable|); absent when both are zero.
std::optional<double> immutable_dominance(const LinearClassifier& classifier);

// Round loop: train, disclose, negative-predicted agents game, record,
// retrain. Terminates on weight convergence, dominance, or max_rounds.
GamingTrace run_gaming_rounds(const GamingConfig& config);

// Observer variant for plotting: called with the round-0 population and
// classifier, then after each round's moves with the disclosed classifier.
using RoundObserver =
    std::function<void(int round, std::span<const Agent>, const LinearClassifier&)>;
GamingTrace run_gaming_rounds(const GamingConfig& config, const RoundObserver& observer);

// Scatter + decision boundary for one round, as a standalone SVG document.
std::string render_round_svg(std::span<const Agent> population,
                             const LinearClassifier& classifier, int round);

}  // namespace fairaudit
