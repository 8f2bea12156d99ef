#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairaudit/compas.hpp"
#include "fairaudit/dataset.hpp"
#include "fairaudit/errors.hpp"
#include "fairaudit/fairness.hpp"
#include "fairaudit/gaming.hpp"
#include "fairaudit/hash.hpp"
#include "fairaudit/metrics.hpp"
#include "fairaudit/report.hpp"
#include "fairaudit/stereotype.hpp"

namespace fs = std::filesystem;
using namespace fairaudit;

namespace {

std::string quote_arg(const std::string& arg) {
  if (arg.find_first_of(" \t\"") == std::string::npos) return arg;
  std::string quoted = "\"";
  for (char c : arg) {
    if (c == '"') quoted += '\\';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string join_command(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += quote_arg(p);
  }
  return out;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// audit

struct AuditOptions {
  std::string input;
  std::string truth_col, truth_positive = "1";
  std::string pred_col, pred_positive = "1";
  std::string score_col;
  int cutoff = 5;
  std::string group_col;
  std::string weight_col;
  std::string delimiter = ",";
  std::string group_a, group_b;
  bool all_pairs = false;
  double epsilon = 0.1;
  double four_fifths = 0.8;
  std::string mode = "absolute-difference";
  std::string out_dir = ".";
};

int run_audit(const AuditOptions& opt) {
  if (opt.delimiter.size() != 1) throw ConfigError("--delimiter must be a single character");
  if (!opt.all_pairs && (opt.group_a.empty() || opt.group_b.empty())) {
    throw ConfigError("name a group pair with --group-a/--group-b or pass --all-pairs");
  }

  ColumnSchema schema;
  schema.delimiter = opt.delimiter[0];
  schema.truth_column = opt.truth_col;
  schema.truth_positive = opt.truth_positive;
  schema.prediction_column = opt.pred_col;
  schema.prediction_positive = opt.pred_positive;
  schema.score_column = opt.score_col;
  schema.score_cutoff = opt.cutoff;
  schema.group_column = opt.group_col;
  schema.weight_column = opt.weight_col;

  FairnessConfig config;
  config.epsilon = opt.epsilon;
  config.four_fifths_threshold = opt.four_fifths;
  if (opt.mode == "absolute-difference") config.mode = ComparisonMode::absolute_difference;
  else if (opt.mode == "ratio") config.mode = ComparisonMode::ratio;
  else throw ConfigError("--mode must be absolute-difference or ratio");
  config.validate();

  OutcomeTable table = load_outcomes(opt.input, schema);

  std::vector<FairnessReport> reports;
  if (opt.all_pairs) {
    reports = audit_all_pairs(table, config);
  } else {
    reports.push_back(audit_pair(table, opt.group_a, opt.group_b, config));
  }

  AuditRun run;
  std::vector<std::string> cmd = {kToolName, "audit", "--input", opt.input,
                                  "--truth-col", opt.truth_col,
                                  "--truth-positive", opt.truth_positive};
  if (!opt.pred_col.empty()) {
    cmd.insert(cmd.end(), {"--pred-col", opt.pred_col, "--pred-positive", opt.pred_positive});
  } else {
    cmd.insert(cmd.end(), {"--score-col", opt.score_col, "--cutoff", std::to_string(opt.cutoff)});
  }
  if (!opt.weight_col.empty()) cmd.insert(cmd.end(), {"--weight-col", opt.weight_col});
  cmd.insert(cmd.end(), {"--group-col", opt.group_col, "--delimiter", opt.delimiter});
  if (opt.all_pairs) cmd.push_back("--all-pairs");
  else cmd.insert(cmd.end(), {"--group-a", opt.group_a, "--group-b", opt.group_b});
  cmd.insert(cmd.end(), {"--epsilon", num(opt.epsilon), "--four-fifths", num(opt.four_fifths),
                         "--mode", opt.mode, "--out-dir", opt.out_dir});
  run.command = join_command(cmd);
  run.config = config.to_json();
  run.input_fingerprints[opt.input] = fingerprint_file(opt.input);
  run.outputs = {"audit_report.json", "audit_report.txt"};

  nlohmann::json out_json;
  out_json["audit_run"] = run.to_json();
  nlohmann::json report_array = nlohmann::json::array();
  std::string text;
  for (const auto& report : reports) {
    report_array.push_back(report.to_json());
    text += render_audit_text(table, report);
    text += '\n';
  }
  out_json["reports"] = report_array;

  fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  write_file_atomic(dir / "audit_report.json", out_json.dump(2) + "\n");
  write_file_atomic(dir / "audit_report.txt", text);
  std::cout << text;
  std::cout << "wrote " << (dir / "audit_report.json").string() << " and "
            << (dir / "audit_report.txt").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// compas-repro

struct CompasOptions {
  std::string fixture = "data/compas_reference_counts.txt";
  std::string csv;  // optional pipeline-fidelity check
  bool json = false;
  std::string out_dir;
};

int run_compas(const CompasOptions& opt) {
  CountFixture fixture = CountFixture::load(opt.fixture);
  ReplicationResult result = run_replication(fixture);

  nlohmann::json out_json = result.to_json();
  std::string text = result.render_text();
  bool csv_ok = true;

  if (!opt.csv.empty()) {
    CompasRecipe recipe;
    CompasLoadStats stats;
    OutcomeTable table = load_compas(opt.csv, recipe, &stats);
    std::vector<CountDiff> diffs = diff_counts(fixture, table);
    csv_ok = diffs.empty();

    std::ostringstream csv_text;
    csv_text << "\nCSV pipeline check (" << opt.csv << "):\n";
    csv_text << "  rows read: " << stats.rows_total
             << ", rejected by screening window: " << stats.rows_window_rejected
             << ", rejected by score text: " << stats.rows_score_text_rejected
             << ", audited: " << table.size() << '\n';
    nlohmann::json diff_json = nlohmann::json::array();
    for (const auto& d : diffs) {
      csv_text << "  DIFF " << d.group << ' ' << d.cell << ": fixture " << d.expected
               << ", pipeline " << d.actual << '\n';
      diff_json.push_back({{"group", d.group},
                           {"cell", d.cell},
                           {"fixture", d.expected},
                           {"pipeline", d.actual}});
    }
    csv_text << (csv_ok ? "  counts reproduce the fixture exactly\n"
                        : "  PIPELINE MISMATCH\n");
    text += csv_text.str();
    out_json["csv_check"] = {{"path", opt.csv},
                             {"recipe", recipe.to_json()},
                             {"rows_read", stats.rows_total},
                             {"rows_window_rejected", stats.rows_window_rejected},
                             {"rows_score_text_rejected", stats.rows_score_text_rejected},
                             {"rows_audited", table.size()},
                             {"diffs", diff_json},
                             {"pass", csv_ok}};
  }

  AuditRun run;
  std::vector<std::string> cmd = {kToolName, "compas-repro", "--fixture", opt.fixture};
  if (!opt.csv.empty()) cmd.insert(cmd.end(), {"--csv", opt.csv});
  if (opt.json) cmd.push_back("--json");
  if (!opt.out_dir.empty()) cmd.insert(cmd.end(), {"--out-dir", opt.out_dir});
  run.command = join_command(cmd);
  run.config = {{"tolerance", 5e-4}, {"epsilon", 0.1}};
  run.input_fingerprints[opt.fixture] = fingerprint_file(opt.fixture);
  if (!opt.csv.empty()) run.input_fingerprints[opt.csv] = fingerprint_file(opt.csv);
  if (!opt.out_dir.empty()) {
    run.outputs = {"compas_replication.json", "compas_replication.txt"};
  }
  out_json["audit_run"] = run.to_json();

  if (!opt.out_dir.empty()) {
    fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    write_file_atomic(dir / "compas_replication.json", out_json.dump(2) + "\n");
    write_file_atomic(dir / "compas_replication.txt", text);
  }
  if (opt.json) {
    std::cout << out_json.dump(2) << '\n';
  } else {
    std::cout << text;
  }
  return (result.all_pass() && csv_ok) ? 0 : static_cast<int>(ExitCode::replication);
}

// ---------------------------------------------------------------------------
// gaming

struct GamingOptions {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> agents;
  std::optional<int> rounds;
  std::string budget;  // number or "unbounded"
  std::optional<double> margin;
  std::string out = "gaming_trace.csv";
  std::string plot_dir;
};

int run_gaming(const GamingOptions& opt) {
  GamingConfig config;
  std::set<std::string> keys;
  if (!opt.config_file.empty()) config = GamingConfig::from_file(opt.config_file, &keys);
  if (opt.seed) {
    config.seed = *opt.seed;
    keys.insert("seed");
  }
  if (opt.agents) config.n_agents = *opt.agents;
  if (opt.rounds) config.max_rounds = *opt.rounds;
  if (!opt.budget.empty()) {
    if (opt.budget == "unbounded") {
      config.budget = kUnboundedBudget;
    } else {
      try {
        config.budget = std::stod(opt.budget);
      } catch (const std::exception&) {
        throw ConfigError("--budget must be a number or 'unbounded'");
      }
    }
  }
  if (opt.margin) config.margin = *opt.margin;
  if (!keys.count("seed")) {
    throw ConfigError("a seed is required: pass --seed or set seed= in the config file");
  }
  config.validate();

  GamingTrace trace;
  if (!opt.plot_dir.empty()) {
    fs::path plots(opt.plot_dir);
    fs::create_directories(plots);
    trace = run_gaming_rounds(config, [&](int round, std::span<const Agent> population,
                                          const LinearClassifier& clf) {
      std::ostringstream name;
      name << "round_" << std::setfill('0') << std::setw(3) << round << ".svg";
      write_file_atomic(plots / name.str(), render_round_svg(population, clf, round));
    });
  } else {
    trace = run_gaming_rounds(config);
  }

  write_file_atomic(opt.out, trace.to_csv());

  const RoundStats& first = trace.rounds.front();
  const RoundStats& last = trace.rounds.back();
  AuditRun run;
  std::vector<std::string> cmd = {kToolName, "gaming"};
  if (!opt.config_file.empty()) cmd.insert(cmd.end(), {"--config", opt.config_file});
  cmd.insert(cmd.end(), {"--seed", std::to_string(config.seed), "--agents",
                         std::to_string(config.n_agents), "--rounds",
                         std::to_string(config.max_rounds), "--out", opt.out});
  if (!opt.plot_dir.empty()) cmd.insert(cmd.end(), {"--plot-dir", opt.plot_dir});
  run.command = join_command(cmd);
  run.config = config.to_json();
  if (!opt.config_file.empty()) {
    run.input_fingerprints[opt.config_file] = fingerprint_file(opt.config_file);
  }
  run.outputs = {opt.out, opt.out + ".json"};

  nlohmann::json summary;
  summary["audit_run"] = run.to_json();
  summary["rounds"] = trace.rounds.size() - 1;
  summary["termination"] = to_string(trace.termination);
  summary["round0"] = {{"accuracy", first.accuracy},
                       {"acceptance_rate", first.acceptance_rate},
                       {"dominance", first.dominance ? nlohmann::json(*first.dominance)
                                                     : nlohmann::json(nullptr)}};
  summary["final"] = {{"accuracy", last.accuracy},
                      {"acceptance_rate", last.acceptance_rate},
                      {"dominance", last.dominance ? nlohmann::json(*last.dominance)
                                                   : nlohmann::json(nullptr)},
                      {"w_immutable", last.classifier.w_immutable},
                      {"w_mutable", last.classifier.w_mutable},
                      {"bias", last.classifier.bias}};
  write_file_atomic(opt.out + ".json", summary.dump(2) + "\n");

  std::cout << "rounds: " << trace.rounds.size() - 1
            << ", termination: " << to_string(trace.termination)
            << ", final acceptance: " << last.acceptance_rate
            << ", final dominance: " << (last.dominance ? num(*last.dominance) : "n/a") << '\n'
            << "wrote " << opt.out << " and " << opt.out << ".json\n";
  return 0;
}

// ---------------------------------------------------------------------------
// stereotype

struct StereotypeOptions {
  std::string embeddings;
  std::string wordlist;
  std::string pair;  // "left,right"
  bool debias = false;
  std::vector<std::string> exclude;
  std::string write_debiased;
  std::string out_dir = ".";
};

int run_stereotype(const StereotypeOptions& opt) {
  auto comma = opt.pair.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 == opt.pair.size()) {
    throw ConfigError("--pair must be 'left,right', e.g. he,she");
  }
  AttributePair pair{opt.pair.substr(0, comma), opt.pair.substr(comma + 1)};

  EmbeddingTable table = EmbeddingTable::load(opt.embeddings);
  std::vector<std::string> words = load_wordlist(opt.wordlist);
  if (words.empty()) throw DataError("empty wordlist: " + opt.wordlist);

  BiasReport before = bias_report(words, pair, table);

  AuditRun run;
  std::vector<std::string> cmd = {kToolName, "stereotype", "--embeddings", opt.embeddings,
                                  "--wordlist", opt.wordlist, "--pair", opt.pair};
  if (opt.debias) cmd.push_back("--debias");
  for (const auto& w : opt.exclude) cmd.insert(cmd.end(), {"--exclude", w});
  if (!opt.write_debiased.empty()) cmd.insert(cmd.end(), {"--write-debiased", opt.write_debiased});
  cmd.insert(cmd.end(), {"--out-dir", opt.out_dir});
  run.command = join_command(cmd);
  run.input_fingerprints[opt.embeddings] = fingerprint_file(opt.embeddings);
  run.input_fingerprints[opt.wordlist] = fingerprint_file(opt.wordlist);
  run.outputs = {"bias_report.csv", "bias_report.json"};

  nlohmann::json out_json;
  out_json["report"] = before.to_json();

  fs::path dir(opt.out_dir);
  fs::create_directories(dir);

  std::cout << "scored " << before.scores.size() << " words against (" << pair.left << ", "
            << pair.right << "); mean bias " << before.mean << ", strongest |bias| "
            << before.max_abs_score << " (" << before.max_abs_word << ")\n";
  if (!before.missing.empty()) {
    std::cout << "missing from table: ";
    for (std::size_t i = 0; i < before.missing.size(); ++i) {
      if (i) std::cout << ", ";
      std::cout << before.missing[i];
    }
    std::cout << '\n';
  }

  if (opt.debias) {
    std::vector<AttributePair> pairs = {pair};
    std::vector<double> direction = gender_direction(pairs, table);
    std::set<std::string> exclude(opt.exclude.begin(), opt.exclude.end());
    exclude.insert(pair.left);
    exclude.insert(pair.right);
    EmbeddingTable debiased = debias_project(table, direction, exclude);
    BiasReport after = bias_report(words, pair, debiased);
    out_json["debiased_report"] = after.to_json();
    run.outputs.push_back("bias_report_debiased.csv");
    run.outputs.push_back("bias_report_debiased.json");
    write_file_atomic(dir / "bias_report_debiased.csv", after.to_csv());
    nlohmann::json after_json;
    after_json["audit_run"] = run.to_json();
    after_json["report"] = after.to_json();
    write_file_atomic(dir / "bias_report_debiased.json", after_json.dump(2) + "\n");
    if (!opt.write_debiased.empty()) {
      write_file_atomic(opt.write_debiased, debiased.to_text());
      run.outputs.push_back(opt.write_debiased);
    }
    std::cout << "after debias: mean bias " << after.mean << ", strongest |bias| "
              << after.max_abs_score << '\n';
  }

  out_json["audit_run"] = run.to_json();
  write_file_atomic(dir / "bias_report.csv", before.to_csv());
  write_file_atomic(dir / "bias_report.json", out_json.dump(2) + "\n");
  std::cout << "wrote reports into " << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-fairness auditing toolkit: criterion gaps, COMPAS audit replication, "
               "disclosure-gaming simulation, embedding stereotype scores"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  AuditOptions audit_opt;
  auto* audit = app.add_subcommand("audit", "fairness-criterion audit of a tabular outcome file");
  audit->add_option("--input", audit_opt.input, "delimiter-separated file with header row")
      ->required();
  audit->add_option("--truth-col", audit_opt.truth_col, "ground-truth column")->required();
  audit->add_option("--truth-positive", audit_opt.truth_positive,
                    "cell value meaning a positive ground truth");
  audit->add_option("--pred-col", audit_opt.pred_col, "binary prediction column");
  audit->add_option("--pred-positive", audit_opt.pred_positive,
                    "cell value meaning a positive prediction");
  audit->add_option("--score-col", audit_opt.score_col, "1..10 score column (binarized)");
  audit->add_option("--cutoff", audit_opt.cutoff, "score cutoff: positive iff score >= cutoff");
  audit->add_option("--group-col", audit_opt.group_col, "protected-group column")->required();
  audit->add_option("--weight-col", audit_opt.weight_col, "optional row-weight column");
  audit->add_option("--delimiter", audit_opt.delimiter, "field delimiter (default ,)");
  audit->add_option("--group-a", audit_opt.group_a, "first group of the audited pair");
  audit->add_option("--group-b", audit_opt.group_b, "second group of the audited pair");
  audit->add_flag("--all-pairs", audit_opt.all_pairs, "audit every unordered group pair");
  audit->add_option("--epsilon", audit_opt.epsilon, "slack on absolute gaps (default 0.1)");
  audit->add_option("--four-fifths", audit_opt.four_fifths,
                    "selection-rate ratio threshold (default 0.8)");
  audit->add_option("--mode", audit_opt.mode, "absolute-difference or ratio");
  audit->add_option("--out-dir", audit_opt.out_dir, "directory for report files");

  CompasOptions compas_opt;
  auto* compas = app.add_subcommand(
      "compas-repro", "replay the bundled COMPAS audit and verify every derived figure");
  compas->add_option("--fixture", compas_opt.fixture, "checksummed confusion-count fixture");
  compas->add_option("--csv", compas_opt.csv,
                     "also run the CSV recipe pipeline and diff its counts against the fixture");
  compas->add_flag("--json", compas_opt.json, "print machine-readable pass/fail per cell");
  compas->add_option("--out-dir", compas_opt.out_dir, "also write the bundle into this directory");

  GamingOptions gaming_opt;
  auto* gaming = app.add_subcommand(
      "gaming", "simulate applicants gaming a disclosed linear classifier across retraining rounds");
  gaming->add_option("--config", gaming_opt.config_file, "key=value config file");
  gaming->add_option("--seed", gaming_opt.seed, "population seed (required here or in config)");
  gaming->add_option("--agents", gaming_opt.agents, "population size");
  gaming->add_option("--rounds", gaming_opt.rounds, "maximum rounds");
  gaming->add_option("--budget", gaming_opt.budget,
                     "per-round mutable-feature budget (number or 'unbounded')");
  gaming->add_option("--margin", gaming_opt.margin, "overshoot past the disclosed boundary");
  gaming->add_option("--out", gaming_opt.out, "trace CSV path (default gaming_trace.csv)");
  gaming->add_option("--plot-dir", gaming_opt.plot_dir, "write an SVG scatter per round");

  StereotypeOptions stereo_opt;
  auto* stereo = app.add_subcommand(
      "stereotype", "cosine-similarity bias of words toward an attribute pair");
  stereo->add_option("--embeddings", stereo_opt.embeddings, "text vector file")->required();
  stereo->add_option("--wordlist", stereo_opt.wordlist, "one word per line, '#' comments")
      ->required();
  stereo->add_option("--pair", stereo_opt.pair, "attribute pair, e.g. he,she")->required();
  stereo->add_flag("--debias", stereo_opt.debias,
                   "project the pair direction out and report before/after");
  stereo->add_option("--exclude", stereo_opt.exclude,
                     "words to leave untouched by --debias (attribute words always are)");
  stereo->add_option("--write-debiased", stereo_opt.write_debiased,
                     "write the debiased table to this path");
  stereo->add_option("--out-dir", stereo_opt.out_dir, "directory for report files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return static_cast<int>(ExitCode::config);
  }

  try {
    if (app.got_subcommand(audit)) return run_audit(audit_opt);
    if (app.got_subcommand(compas)) return run_compas(compas_opt);
    if (app.got_subcommand(gaming)) return run_gaming(gaming_opt);
    if (app.got_subcommand(stereo)) return run_stereotype(stereo_opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::failure);
  }
  return 0;
}
