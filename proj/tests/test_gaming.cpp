#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "fairaudit/errors.hpp"
#include "fairaudit/gaming.hpp"
#include "test_support.hpp"

using namespace fairaudit;
using namespace testsupport;

namespace {

GamingConfig default_config(std::uint64_t seed = 42) {
  GamingConfig config;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("generate_population: deterministic given the seed") {
  auto config = default_config();
  auto a = generate_population(config);
  auto b = generate_population(config);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x_immutable == b[i].x_immutable);
    CHECK(a[i].x_mutable == b[i].x_mutable);
    CHECK(a[i].true_class == b[i].true_class);
  }
}

TEST_CASE("generate_population: both classes present; tiny populations work") {
  // Minimal two-agent population with one agent per class exists for some seed.
  GamingConfig config = default_config();
  config.n_agents = 2;
  bool found_mixed = false, found_degenerate = false;
  for (std::uint64_t seed = 0; seed < 64 && !(found_mixed && found_degenerate); ++seed) {
    config.seed = seed;
    try {
      auto pop = generate_population(config);
      REQUIRE(pop.size() == 2);
      CHECK(pop[0].true_class != pop[1].true_class);
      found_mixed = true;
    } catch (const DataError&) {
      found_degenerate = true;  // both draws landed in one class
    }
  }
  CHECK(found_mixed);
  CHECK(found_degenerate);
}

TEST_CASE("generate_population: mutable-only data rule trains a mutable-dominated classifier") {
  GamingConfig config = default_config(7);
  config.data_rule.mu_immutable = 0.0;  // class carried by x_mutable alone
  config.data_rule.mu_mutable = 1.0;
  auto population = generate_population(config);
  LinearClassifier clf = train_classifier(population, config.train);
  CHECK(std::abs(clf.w_mutable) > 10.0 * std::abs(clf.w_immutable));
}

TEST_CASE("train_classifier: separable blobs reach high training accuracy") {
  auto population = generate_population(default_config());
  LinearClassifier clf = train_classifier(population);
  std::size_t correct = 0;
  for (const auto& a : population) {
    if (clf.predict(a) == a.true_class) ++correct;
  }
  CHECK(static_cast<double>(correct) / population.size() >= 0.99);
}

TEST_CASE("train_classifier: flipping labels negates the classifier") {
  auto population = generate_population(default_config(3));
  LinearClassifier clf = train_classifier(population);
  auto flipped = population;
  for (auto& a : flipped) a.true_class = !a.true_class;
  LinearClassifier neg = train_classifier(flipped);
  CHECK(neg.w_immutable == doctest::Approx(-clf.w_immutable).epsilon(1e-9));
  CHECK(neg.w_mutable == doctest::Approx(-clf.w_mutable).epsilon(1e-9));
  CHECK(neg.bias == doctest::Approx(-clf.bias).epsilon(1e-9));
}

TEST_CASE("train_classifier: mirror-symmetric data pins bias and immutable weight near zero") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> imm(-2.0, 2.0);
  std::uniform_real_distribution<double> mut(0.2, 2.0);
  std::vector<Agent> population;
  for (int i = 0; i < 400; ++i) {
    double a = imm(gen), m = mut(gen);
    population.push_back({a, m, true, false});
    population.push_back({a, -m, false, false});
  }
  LinearClassifier clf = train_classifier(population);
  CHECK(std::abs(clf.bias) <= 0.05);
  CHECK(std::abs(clf.w_immutable) / std::abs(clf.w_mutable) <= 0.05);
}

TEST_CASE("train_classifier: single-class input is an error") {
  std::vector<Agent> one_class = {{0.1, 0.2, true, false}, {0.3, 0.4, true, false}};
  CHECK_THROWS_AS(train_classifier(one_class), DataError);
}

TEST_CASE("counterfactual_move: one-dimensional analytic case") {
  GamingConfig config = default_config();
  config.margin = 0.0;
  LinearClassifier clf{0.0, 1.0, 0.0};
  Agent agent{0.0, -2.0, false, false};

  MoveResult move = counterfactual_move(agent, clf, config);
  CHECK(move.moved);
  CHECK(move.new_x_mutable == 0.0);  // lands exactly on the boundary
  CHECK(move.flipped);               // score 0 classifies positive
  CHECK_FALSE(move.capped);

  config.budget = 1.0;  // binding cap: moves to -1, still rejected
  MoveResult capped = counterfactual_move(agent, clf, config);
  CHECK(capped.moved);
  CHECK(capped.new_x_mutable == -1.0);
  CHECK_FALSE(capped.flipped);
  CHECK(capped.capped);
}

TEST_CASE("counterfactual_move: powerless mutable axis flags and leaves the agent alone") {
  GamingConfig config = default_config();
  LinearClassifier clf{1.0, 0.0, 0.0};
  Agent agent{-1.0, 5.0, false, false};
  MoveResult move = counterfactual_move(agent, clf, config);
  CHECK_FALSE(move.moved);
  CHECK(move.capped);
  CHECK_FALSE(move.flipped);
  CHECK(move.new_x_mutable == agent.x_mutable);
}

TEST_CASE("counterfactual_move: immutable feature never changes") {
  GamingConfig config = default_config();
  LinearClassifier clf{0.5, -1.5, 0.2};
  Agent agent{0.7, 2.0, false, false};
  REQUIRE_FALSE(clf.predict(agent));
  MoveResult move = counterfactual_move(agent, clf, config);
  CHECK(move.flipped);
  // Only x_mutable is reported back; there is no immutable output to change.
  Agent after = agent;
  after.x_mutable = move.new_x_mutable;
  CHECK(after.x_immutable == agent.x_immutable);
  CHECK(clf.predict(after));
}

TEST_CASE("counterfactual_move: displacement matches the analytic flip distance "
          "and the line-search oracle finds nothing smaller") {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> weight(-3.0, 3.0);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::uniform_real_distribution<double> margin_dist(0.0, 0.05);
  GamingConfig config = default_config();

  int tested = 0;
  while (tested < 300) {
    LinearClassifier clf{weight(gen), weight(gen), weight(gen)};
    if (std::abs(clf.w_mutable) < 0.1) continue;
    Agent agent{coord(gen), coord(gen), false, false};
    double s = clf.score(agent);
    if (s >= -1e-6) continue;  // need a clearly rejected agent
    config.margin = margin_dist(gen);

    MoveResult move = counterfactual_move(agent, clf, config);
    REQUIRE(move.moved);
    REQUIRE(move.flipped);

    double displacement = std::abs(move.new_x_mutable - agent.x_mutable);
    double analytic_flip = std::abs(s) / std::abs(clf.w_mutable);
    double margin_equivalent = config.margin / std::abs(clf.w_mutable);
    CHECK(std::abs((displacement - margin_equivalent) - analytic_flip) <= 1e-9);

    double direction = (move.new_x_mutable > agent.x_mutable) ? 1.0 : -1.0;
    CHECK_FALSE(line_search_flips_below(clf, agent, direction, analytic_flip));
    ++tested;
  }
}

TEST_CASE("immutable_dominance: direct arithmetic") {
  CHECK(*immutable_dominance({1.0, 0.0, 0.0}) == 1.0);
  CHECK(*immutable_dominance({0.0, 1.0, 0.0}) == 0.0);
  CHECK(*immutable_dominance({3.0, 1.0, 0.0}) == 0.75);
  CHECK(*immutable_dominance({-3.0, 1.0, 0.0}) == 0.75);
  CHECK_FALSE(immutable_dominance({0.0, 0.0, 1.0}).has_value());
}

TEST_CASE("run_gaming_rounds: one unbounded game makes the classifier fully accepting") {
  GamingConfig config = default_config();
  config.max_rounds = 1;
  GamingTrace trace = run_gaming_rounds(config);
  REQUIRE(trace.rounds.size() == 2);  // round 0 plus one game round
  CHECK(trace.rounds[0].acceptance_rate < 0.6);
  CHECK(trace.rounds[1].acceptance_rate == 1.0);
}

TEST_CASE("run_gaming_rounds: zero budget freezes the dynamics") {
  GamingConfig config = default_config();
  config.budget = 0.0;
  config.max_rounds = 5;
  GamingTrace trace = run_gaming_rounds(config);
  CHECK(trace.termination == Termination::weight_converged);
  REQUIRE(trace.rounds.size() >= 2);
  const auto& first = trace.rounds.front();
  for (const auto& r : trace.rounds) {
    CHECK(r.classifier.w_immutable == first.classifier.w_immutable);
    CHECK(r.classifier.w_mutable == first.classifier.w_mutable);
    CHECK(r.classifier.bias == first.classifier.bias);
    CHECK(r.gamed_count == 0);
  }
}

TEST_CASE("run_gaming_rounds: default scenario converges to immutable dominance") {
  GamingConfig config = default_config();
  config.max_rounds = 50;
  GamingTrace trace = run_gaming_rounds(config);
  CHECK(trace.termination == Termination::dominance_reached);
  const auto& last = trace.rounds.back();
  REQUIRE(last.dominance.has_value());
  CHECK(*last.dominance >= 0.95);
  CHECK(*last.dominance >= *trace.rounds.front().dominance);
}

TEST_CASE("run_gaming_rounds: trace is byte-identical across runs") {
  GamingConfig config = default_config();
  config.max_rounds = 10;
  CHECK(run_gaming_rounds(config).to_csv() == run_gaming_rounds(config).to_csv());
}

TEST_CASE("run_gaming_rounds: labels and immutable features are conserved; "
          "unbounded gaming accepts everyone every round") {
  GamingConfig config = default_config(9);
  config.max_rounds = 8;
  std::map<int, std::vector<Agent>> snapshots;
  GamingTrace trace = run_gaming_rounds(
      config, [&](int round, std::span<const Agent> population, const LinearClassifier&) {
        snapshots[round] = std::vector<Agent>(population.begin(), population.end());
      });

  REQUIRE(snapshots.count(0));
  const auto& initial = snapshots.at(0);
  for (const auto& [round, population] : snapshots) {
    REQUIRE(population.size() == initial.size());
    std::size_t positives = 0, initial_positives = 0;
    for (std::size_t i = 0; i < population.size(); ++i) {
      CHECK(population[i].x_immutable == initial[i].x_immutable);
      CHECK(population[i].true_class == initial[i].true_class);
      positives += population[i].true_class;
      initial_positives += initial[i].true_class;
    }
    CHECK(positives == initial_positives);
  }
  for (std::size_t i = 1; i < trace.rounds.size(); ++i) {
    CHECK(trace.rounds[i].acceptance_rate == 1.0);  // dysfunction after every game
  }
}

TEST_CASE("gaming config: file parsing, unknown keys, seed tracking") {
  TempDir dir;
  write_file(dir.file("ok.cfg"),
             "# comment\n"
             "n_agents = 50\n"
             "seed = 9\n"
             "budget = unbounded\n"
             "margin = 0.01\n");
  std::set<std::string> keys;
  GamingConfig config = GamingConfig::from_file(dir.file("ok.cfg"), &keys);
  CHECK(config.n_agents == 50);
  CHECK(config.seed == 9);
  CHECK(std::isinf(config.budget));
  CHECK(config.margin == 0.01);
  CHECK(keys.count("seed") == 1);
  CHECK(keys.count("margin") == 1);

  write_file(dir.file("bad.cfg"), "bogus_knob = 3\n");
  CHECK_THROWS_WITH_AS(GamingConfig::from_file(dir.file("bad.cfg")),
                       doctest::Contains("bogus_knob"), ConfigError);

  write_file(dir.file("badval.cfg"), "margin = soft\n");
  CHECK_THROWS_AS(GamingConfig::from_file(dir.file("badval.cfg")), ConfigError);
}

TEST_CASE("gaming config validation") {
  GamingConfig config = default_config();
  config.n_agents = 1;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = default_config();
  config.margin = -1;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = default_config();
  config.dominance_threshold = 1.5;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("trace csv: layout and termination footer") {
  GamingConfig config = default_config();
  config.max_rounds = 1;
  std::string csv = run_gaming_rounds(config).to_csv();
  CHECK(csv.rfind("round,w_immutable,w_mutable,bias,acceptance_rate,accuracy,dominance,"
                  "gamed_count,capped_count\n", 0) == 0);
  CHECK(csv.find("# termination: max_rounds") != std::string::npos);
}

TEST_CASE("render_round_svg produces a well-formed document") {
  auto population = generate_population(default_config());
  LinearClassifier clf = train_classifier(population);
  std::string svg = render_round_svg(population, clf, 0);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<line") != std::string::npos);
}
