#include "fairaudit/gaming.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "fairaudit/errors.hpp"

namespace fairaudit {

namespace {

// mt19937_64 raw outputs mapped by hand; std::normal_distribution and friends
// are implementation-defined, which would break byte-identical traces across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() { return ((gen_() >> 11) + 1) * 0x1.0p-53; }  // (0, 1]

  std::pair<double, double> normal_pair() {
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
  }

 private:
  std::mt19937_64 gen_;
};

double sigmoid(double s) { return 1.0 / (1.0 + std::exp(-s)); }

double accuracy_of(const LinearClassifier& clf, std::span<const Agent> population) {
  std::size_t correct = 0;
  for (const auto& a : population) {
    if (clf.predict(a) == a.true_class) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(population.size());
}

double acceptance_of(const LinearClassifier& clf, std::span<const Agent> population) {
  std::size_t accepted = 0;
  for (const auto& a : population) {
    if (clf.predict(a)) ++accepted;
  }
  return static_cast<double>(accepted) / static_cast<double>(population.size());
}

std::string fmt17(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

void GamingConfig::validate() const {
  if (n_agents < 2) throw ConfigError("n_agents must be at least 2");
  if (!(margin >= 0) || !std::isfinite(margin)) throw ConfigError("margin must be finite and >= 0");
  if (std::isnan(budget) || budget < 0) throw ConfigError("budget must be >= 0 or unbounded");
  if (max_rounds < 1) throw ConfigError("max_rounds must be at least 1");
  if (!(weight_tolerance > 0)) throw ConfigError("weight_tolerance must be positive");
  if (!(dominance_threshold > 0 && dominance_threshold <= 1)) {
    throw ConfigError("dominance_threshold must lie in (0,1]");
  }
  if (!(train.step > 0)) throw ConfigError("step must be positive");
  if (train.iterations < 1) throw ConfigError("iterations must be at least 1");
  if (train.l2 < 0) throw ConfigError("l2 must be >= 0");
  for (double v : {data_rule.mu_immutable, data_rule.mu_mutable, data_rule.sigma_immutable,
                   data_rule.sigma_mutable}) {
    if (!std::isfinite(v)) throw ConfigError("data rule parameters must be finite");
  }
  if (data_rule.sigma_immutable < 0 || data_rule.sigma_mutable < 0) {
    throw ConfigError("sigma must be >= 0");
  }
}

GamingConfig GamingConfig::from_file(const std::filesystem::path& path,
                                     std::set<std::string>* keys_seen) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  GamingConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected key=value, got '" + line + "'");
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto as_double = [&] {
      try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": key '" + key +
                          "' needs a numeric value, got '" + value + "'");
      }
    };
    auto as_int = [&] { return static_cast<int>(as_double()); };

    auto as_seed = [&] {
      try {
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                          ": seed needs an unsigned integer, got '" + value + "'");
      }
    };

    if (key == "n_agents") config.n_agents = as_int();
    else if (key == "seed") config.seed = as_seed();
    else if (key == "mu_immutable") config.data_rule.mu_immutable = as_double();
    else if (key == "mu_mutable") config.data_rule.mu_mutable = as_double();
    else if (key == "sigma_immutable") config.data_rule.sigma_immutable = as_double();
    else if (key == "sigma_mutable") config.data_rule.sigma_mutable = as_double();
    else if (key == "budget") config.budget = value == "unbounded" ? kUnboundedBudget : as_double();
    else if (key == "margin") config.margin = as_double();
    else if (key == "max_rounds") config.max_rounds = as_int();
    else if (key == "weight_tolerance") config.weight_tolerance = as_double();
    else if (key == "dominance_threshold") config.dominance_threshold = as_double();
    else if (key == "step") config.train.step = as_double();
    else if (key == "iterations") config.train.iterations = as_int();
    else if (key == "l2") config.train.l2 = as_double();
    else {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": unknown key '" + key +
                        "'");
    }
    if (keys_seen) keys_seen->insert(key);
  }
  return config;
}

nlohmann::json GamingConfig::to_json() const {
  nlohmann::json j;
  j["n_agents"] = n_agents;
  j["seed"] = seed;
  j["data_rule"] = {{"mu_immutable", data_rule.mu_immutable},
                    {"mu_mutable", data_rule.mu_mutable},
                    {"sigma_immutable", data_rule.sigma_immutable},
                    {"sigma_mutable", data_rule.sigma_mutable}};
  j["budget"] = std::isinf(budget) ? nlohmann::json("unbounded") : nlohmann::json(budget);
  j["margin"] = margin;
  j["max_rounds"] = max_rounds;
  j["weight_tolerance"] = weight_tolerance;
  j["dominance_threshold"] = dominance_threshold;
  j["train"] = {{"step", train.step}, {"iterations", train.iterations}, {"l2", train.l2}};
  return j;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::weight_converged: return "weight_converged";
    case Termination::dominance_reached: return "dominance_reached";
    case Termination::max_rounds: return "max_rounds";
  }
  return "?";
}

std::vector<Agent> generate_population(const GamingConfig& config) {
  config.validate();
  Rng rng(config.seed);
  std::vector<Agent> population;
  population.reserve(config.n_agents);
  bool saw_positive = false, saw_negative = false;
  for (int i = 0; i < config.n_agents; ++i) {
    Agent a;
    a.true_class = rng.uniform01() <= 0.5;
    auto [z0, z1] = rng.normal_pair();
    double sign = a.true_class ? 1.0 : -1.0;
    a.x_immutable = sign * config.data_rule.mu_immutable + config.data_rule.sigma_immutable * z0;
    a.x_mutable = sign * config.data_rule.mu_mutable + config.data_rule.sigma_mutable * z1;
    (a.true_class ? saw_positive : saw_negative) = true;
    population.push_back(a);
  }
  if (!saw_positive || !saw_negative) {
    throw DataError("population generation produced a single class; change seed or data rule");
  }
  return population;
}

LinearClassifier train_classifier(std::span<const Agent> population,
                                  const TrainSettings& settings) {
  bool saw_positive = false, saw_negative = false;
  for (const auto& a : population) (a.true_class ? saw_positive : saw_negative) = true;
  if (!saw_positive || !saw_negative) {
    throw DataError("training needs both classes present");
  }
  const double n = static_cast<double>(population.size());
  double wi = 0, wm = 0, b = 0;
  for (int iter = 0; iter < settings.iterations; ++iter) {
    double gi = 0, gm = 0, gb = 0;
    for (const auto& a : population) {
      double s = wi * a.x_immutable + wm * a.x_mutable + b;
      double err = sigmoid(s) - (a.true_class ? 1.0 : 0.0);
      gi += err * a.x_immutable;
      gm += err * a.x_mutable;
      gb += err;
    }
    wi -= settings.step * (gi / n + settings.l2 * wi);
    wm -= settings.step * (gm / n + settings.l2 * wm);
    b -= settings.step * (gb / n);
  }
  if (wi == 0.0 && wm == 0.0) {
    throw DataError("training produced a null classifier");
  }
  return {wi, wm, b};
}

MoveResult counterfactual_move(const Agent& agent, const LinearClassifier& classifier,
                               const GamingConfig& config) {
  MoveResult result;
  result.new_x_mutable = agent.x_mutable;
  double s = classifier.score(agent);
  if (s >= 0) {
    result.flipped = true;  // already positive; nothing to do
    return result;
  }
  if (classifier.w_mutable == 0.0) {
    result.capped = true;  // mutable axis powerless
    return result;
  }
  // Smallest mutable change reaching score = margin; margin >= 0 flips the
  // prediction under the score >= 0 rule.
  double delta = (config.margin - s) / classifier.w_mutable;
  if (std::abs(delta) > config.budget) {
    delta = std::copysign(config.budget, delta);
    result.capped = true;
  }
  result.new_x_mutable = agent.x_mutable + delta;
  result.moved = delta != 0.0;
  Agent moved_agent = agent;
  moved_agent.x_mutable = result.new_x_mutable;
  result.flipped = classifier.predict(moved_agent);
  return result;
}

std::optional<double> immutable_dominance(const LinearClassifier& classifier) {
  double total = std::abs(classifier.w_immutable) + std::abs(classifier.w_mutable);
  if (total == 0.0) return std::nullopt;
  return std::abs(classifier.w_immutable) / total;
}

GamingTrace run_gaming_rounds(const GamingConfig& config) {
  return run_gaming_rounds(config, RoundObserver{});
}

GamingTrace run_gaming_rounds(const GamingConfig& config, const RoundObserver& observer) {
  config.validate();
  std::vector<Agent> population = generate_population(config);

  GamingTrace trace;
  trace.config = config;
  trace.termination = Termination::max_rounds;

  LinearClassifier clf = train_classifier(population, config.train);
  trace.rounds.push_back({0, clf, acceptance_of(clf, population), accuracy_of(clf, population),
                          immutable_dominance(clf), 0, 0});
  if (observer) observer(0, population, clf);

  for (int round = 1; round <= config.max_rounds; ++round) {
    // Disclosed classifier: every currently rejected agent games against it.
    int gamed = 0, capped = 0;
    for (auto& agent : population) {
      if (clf.predict(agent)) continue;
      MoveResult move = counterfactual_move(agent, clf, config);
      if (move.moved) {
        agent.x_mutable = move.new_x_mutable;
        agent.gamed = true;
        ++gamed;
      }
      if (move.capped) ++capped;
    }
    double post_acceptance = acceptance_of(clf, population);
    if (observer) observer(round, population, clf);

    LinearClassifier retrained = train_classifier(population, config.train);
    trace.rounds.push_back({round, retrained, post_acceptance,
                            accuracy_of(retrained, population), immutable_dominance(retrained),
                            gamed, capped});

    auto dominance = immutable_dominance(retrained);
    double weight_change = std::max({std::abs(retrained.w_immutable - clf.w_immutable),
                                     std::abs(retrained.w_mutable - clf.w_mutable),
                                     std::abs(retrained.bias - clf.bias)});
    clf = retrained;
    if (dominance && *dominance >= config.dominance_threshold) {
      trace.termination = Termination::dominance_reached;
      break;
    }
    if (weight_change < config.weight_tolerance) {
      trace.termination = Termination::weight_converged;
      break;
    }
  }
  return trace;
}

std::string GamingTrace::to_csv() const {
  std::ostringstream out;
  out << "round,w_immutable,w_mutable,bias,acceptance_rate,accuracy,dominance,gamed_count,"
         "capped_count\n";
  for (const auto& r : rounds) {
    out << r.round << ',' << fmt17(r.classifier.w_immutable) << ','
        << fmt17(r.classifier.w_mutable) << ',' << fmt17(r.classifier.bias) << ','
        << fmt17(r.acceptance_rate) << ',' << fmt17(r.accuracy) << ','
        << (r.dominance ? fmt17(*r.dominance) : std::string()) << ',' << r.gamed_count << ','
        << r.capped_count << '\n';
  }
  out << "# termination: " << to_string(termination) << '\n';
  return out.str();
}

std::string render_round_svg(std::span<const Agent> population, const LinearClassifier& classifier,
                             int round) {
  double lo_x = -3, hi_x = 3, lo_y = -3, hi_y = 3;
  for (const auto& a : population) {
    lo_x = std::min(lo_x, a.x_immutable);
    hi_x = std::max(hi_x, a.x_immutable);
    lo_y = std::min(lo_y, a.x_mutable);
    hi_y = std::max(hi_y, a.x_mutable);
  }
  const double w = 480, h = 480, pad = 30;
  auto sx = [&](double x) { return pad + (x - lo_x) / (hi_x - lo_x) * (w - 2 * pad); };
  auto sy = [&](double y) { return h - pad - (y - lo_y) / (hi_y - lo_y) * (h - 2 * pad); };
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << pad << "\" y=\"20\" font-size=\"14\">round " << round
      << " (x: immutable, y: mutable)</text>\n";
  for (const auto& a : population) {
    out << "<circle cx=\"" << sx(a.x_immutable) << "\" cy=\"" << sy(a.x_mutable)
        << "\" r=\"2\" fill=\"" << (a.true_class ? "#1f77b4" : "#d62728") << "\" fill-opacity=\""
        << (a.gamed ? "0.9" : "0.5") << "\"/>\n";
  }
  // Decision boundary w_i*x + w_m*y + b = 0 clipped to the data box.
  if (classifier.w_mutable != 0.0) {
    double y1 = -(classifier.w_immutable * lo_x + classifier.bias) / classifier.w_mutable;
    double y2 = -(classifier.w_immutable * hi_x + classifier.bias) / classifier.w_mutable;
    out << "<line x1=\"" << sx(lo_x) << "\" y1=\"" << sy(y1) << "\" x2=\"" << sx(hi_x)
        << "\" y2=\"" << sy(y2) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  } else if (classifier.w_immutable != 0.0) {
    double x = -classifier.bias / classifier.w_immutable;
    out << "<line x1=\"" << sx(x) << "\" y1=\"" << sy(lo_y) << "\" x2=\"" << sx(x) << "\" y2=\""
        << sy(hi_y) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace fairaudit
