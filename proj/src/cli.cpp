#include "srk/cli.hpp"

#include <CLI11.hpp>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "srk/errors.hpp"
#include "srk/format.hpp"
#include "srk/harness.hpp"
#include "srk/problems.hpp"

namespace srk::cli {

namespace {

/// Flag rejected after parsing; the message names the flag.
struct FlagError {
  std::string message;
};

struct ProblemFlags {
  std::string preset;
  std::size_t m = 0, n = 0, k = 0, k_hat = 0, signals = 0;
  std::string ensemble;
  std::size_t count_min = 0, count_max = 0;
  double mean = 0.0, stddev = 0.0;
  std::string layout;
  std::uint64_t seed = 1;

  CLI::Option* m_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* k_hat_opt = nullptr;
  CLI::Option* j_opt = nullptr;
  CLI::Option* ensemble_opt = nullptr;
  CLI::Option* count_min_opt = nullptr;
  CLI::Option* count_max_opt = nullptr;
  CLI::Option* mean_opt = nullptr;
  CLI::Option* std_opt = nullptr;
  CLI::Option* layout_opt = nullptr;

  void add_to(CLI::App& app, bool with_k_hat) {
    app.add_option("--preset", preset, "Start from a named preset (see list-presets)");
    m_opt = app.add_option("--m", m, "Measurement rows");
    n_opt = app.add_option("--n", n, "Signal length");
    k_opt = app.add_option("--k", k, "Joint support size");
    if (with_k_hat) k_hat_opt = app.add_option("--k-hat", k_hat, "Estimated support size used by the solvers");
    j_opt = app.add_option("--j", signals, "Number of signals");
    ensemble_opt = app.add_option("--ensemble", ensemble, "gaussian | uniform01");
    count_min_opt = app.add_option("--corrupt-count-min", count_min, "Fewest corruptions per signal");
    count_max_opt = app.add_option("--corrupt-count-max", count_max, "Most corruptions per signal");
    mean_opt = app.add_option("--corrupt-mean", mean, "Mean of corruption values");
    std_opt = app.add_option("--corrupt-std", stddev, "Standard deviation of corruption values");
    layout_opt = app.add_option("--layout", layout, "Joint support placement: random | contiguous");
    app.add_option("--seed", seed, "Base seed; trial t uses seed + t");
  }

  std::vector<CLI::Option*> required_without_preset() const {
    std::vector<CLI::Option*> needed{m_opt, n_opt, k_opt};
    if (k_hat_opt != nullptr) needed.push_back(k_hat_opt);
    for (auto* opt : {j_opt, ensemble_opt, count_min_opt, count_max_opt, mean_opt, std_opt}) needed.push_back(opt);
    return needed;
  }

  /// Preset (if any) overridden by explicitly given flags.
  ExperimentConfig resolve() const {
    ExperimentConfig config;
    if (!preset.empty()) {
      try {
        config = srk::preset(preset);
      } catch (const ParameterError&) {
        throw FlagError{"--preset: unknown preset '" + preset + "'"};
      }
    } else {
      for (const auto* opt : required_without_preset()) {
        if (opt->count() == 0) throw FlagError{opt->get_name() + " is required when --preset is not given"};
      }
    }
    if (m_opt->count()) config.m = m;
    if (n_opt->count()) config.n = n;
    if (k_opt->count()) config.k = k;
    if (k_hat_opt != nullptr && k_hat_opt->count()) config.k_hat = k_hat;
    if (k_hat_opt == nullptr && config.k_hat == 0) config.k_hat = config.k;
    if (j_opt->count()) config.signals = signals;
    if (ensemble_opt->count()) {
      try {
        config.ensemble = parse_ensemble(ensemble);
      } catch (const ParameterError& e) {
        throw FlagError{std::string("--ensemble: ") + e.what()};
      }
    }
    if (count_min_opt->count()) config.corruption.count_min = count_min;
    if (count_max_opt->count()) config.corruption.count_max = count_max;
    if (mean_opt->count()) config.corruption.mean = mean;
    if (std_opt->count()) config.corruption.stddev = stddev;
    if (layout_opt->count()) {
      if (layout == "random") {
        config.layout = SupportLayout::uniform_random;
      } else if (layout == "contiguous") {
        config.layout = SupportLayout::contiguous_block;
      } else {
        throw FlagError{"--layout: expected random or contiguous, got '" + layout + "'"};
      }
    }
    config.seed = seed;

    if (config.m < 1) throw FlagError{"--m must be >= 1"};
    if (config.n < 1) throw FlagError{"--n must be >= 1"};
    if (config.k < 1 || config.k > config.n) throw FlagError{"--k must lie in [1, n]"};
    if (config.k_hat < 1 || config.k_hat > config.n) throw FlagError{"--k-hat must lie in [1, n]"};
    if (config.signals < 1) throw FlagError{"--j must be >= 1"};
    if (config.corruption.count_min > config.corruption.count_max) {
      throw FlagError{"--corrupt-count-min must not exceed --corrupt-count-max"};
    }
    if (config.corruption.count_max > config.n - config.k) {
      throw FlagError{"--corrupt-count-max must not exceed n - k"};
    }
    if (!(config.corruption.stddev >= 0.0)) throw FlagError{"--corrupt-std must be >= 0"};
    return config;
  }
};

OnlineBudget parse_online(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, ',')) parts.push_back(part);
  if (parts.size() != 5) throw FlagError{"--online expects p,lo1,hi1,lo2,hi2"};
  OnlineBudget online;
  try {
    online.p_stall = parse_double(parts[0]);
    auto as_count = [](const std::string& s) {
      const double v = parse_double(s);
      if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) throw ParameterError(s);
      return static_cast<std::size_t>(v);
    };
    online.short_range = {as_count(parts[1]), as_count(parts[2])};
    online.long_range = {as_count(parts[3]), as_count(parts[4])};
  } catch (const ParameterError&) {
    throw FlagError{"--online: '" + text + "' is not p,lo1,hi1,lo2,hi2 with positive integer bounds"};
  }
  if (!(online.p_stall >= 0.0 && online.p_stall <= 1.0)) throw FlagError{"--online: p must lie in [0, 1]"};
  if (online.short_range.first > online.short_range.second || online.long_range.first > online.long_range.second) {
    throw FlagError{"--online: each range needs lo <= hi"};
  }
  return online;
}

struct RunFlags {
  ProblemFlags problem;
  std::size_t budget = 0;
  std::string online;
  std::string algorithm;
  std::size_t trials = 40;
  std::string out_path;
  std::string sampling = "norm";
  std::size_t threads = 0;
  bool no_carry = false;
  bool verbose = false;

  CLI::Option* budget_opt = nullptr;
  CLI::Option* online_opt = nullptr;
  CLI::Option* algorithm_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
};

int cmd_run(const RunFlags& flags, std::ostream& out, std::ostream& err) {
  ExperimentConfig config = flags.problem.resolve();
  if (flags.budget_opt->count()) {
    if (flags.budget < 1) throw FlagError{"--budget must be >= 1"};
    config.budget = FixedBudget{flags.budget};
  } else if (flags.online_opt->count()) {
    config.budget = parse_online(flags.online);
  } else if (flags.problem.preset.empty()) {
    throw FlagError{"--budget or --online is required when --preset is not given"};
  }
  if (flags.algorithm_opt->count()) {
    if (flags.algorithm == "mmv") {
      config.algorithm = Algorithm::mmv;
    } else if (flags.algorithm == "cmmv") {
      config.algorithm = Algorithm::cmmv;
    } else if (flags.algorithm == "both") {
      config.algorithm = Algorithm::both;
    } else {
      throw FlagError{"--algorithm: expected mmv, cmmv or both"};
    }
  }
  if (std::holds_alternative<OnlineBudget>(config.budget) && config.algorithm != Algorithm::cmmv) {
    if (flags.algorithm_opt->count()) throw FlagError{"--algorithm: mmv cannot run with --online budgets"};
    config.algorithm = Algorithm::cmmv;
  }
  if (flags.trials_opt->count()) {
    if (flags.trials < 1) throw FlagError{"--trials must be >= 1"};
    config.trials = flags.trials;
  }
  if (flags.sampling == "norm") {
    config.sampling = RowSampling::norm_proportional;
  } else if (flags.sampling == "uniform") {
    config.sampling = RowSampling::uniform;
  } else {
    throw FlagError{"--sampling: expected norm or uniform"};
  }
  config.carry_joint_estimate = !flags.no_carry;
  try {
    config.validate();
  } catch (const ParameterError& e) {
    throw FlagError{e.what()};
  }

  RunOptions options;
  options.threads = flags.threads;
  std::size_t finished = 0;
  options.on_trial = [&](std::size_t trial, const TrialResult&) {
    err << "trial " << trial << " done (" << ++finished << "/" << config.trials << ")\n";
  };
  const ExperimentResult result = run_experiment(config, options);
  write_csv(result.curves, flags.out_path);

  for (const auto& curve : result.curves) {
    const auto& last = curve.points.back();
    out << curve.label << ": final recovery " << std::fixed << std::setprecision(4) << last.mean << " +- "
        << last.stddev << " at " << last.projection << " projections over " << curve.trials << " trials";
    if (flags.verbose) {
      // Every estimate has exactly k_hat entries, so precision is a rescaling.
      const double precision = last.mean * static_cast<double>(config.k) / static_cast<double>(config.k_hat);
      out << ", precision " << precision;
    }
    out << '\n';
    out.unsetf(std::ios::floatfield);
  }
  if (flags.verbose) out << "skipped projections: " << result.skipped_projections << '\n';
  return 0;
}

int cmd_list_presets(std::ostream& out) {
  for (const auto& name : preset_names()) out << preset(name).describe() << '\n';
  return 0;
}

int cmd_gen_instance(const ProblemFlags& flags, const std::string& out_dir, std::ostream& out) {
  ExperimentConfig config = flags.resolve();
  try {
    config.instance_spec().validate();
  } catch (const ParameterError& e) {
    throw FlagError{e.what()};
  }
  // Same generator stream as trial 0 of `run`.
  Rng rng = Rng(config.seed).fork(0);
  const ProblemInstance instance = make_instance(config.instance_spec(), rng);
  write_instance(out_dir, instance);
  out << "wrote instance (m=" << config.m << ", n=" << config.n << ", J=" << config.signals << ") to " << out_dir
      << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse randomized Kaczmarz support recovery for corrupted multiple measurement vectors", "srk"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run a Monte-Carlo experiment and write recovery curves as CSV");
  run_flags.problem.add_to(*run, true);
  run_flags.budget_opt = run->add_option("--budget", run_flags.budget, "Fixed projections per signal");
  run_flags.online_opt = run->add_option("--online", run_flags.online, "Online schedule p,lo1,hi1,lo2,hi2");
  run_flags.budget_opt->excludes(run_flags.online_opt);
  run_flags.algorithm_opt = run->add_option("--algorithm", run_flags.algorithm, "mmv | cmmv | both");
  run_flags.trials_opt = run->add_option("--trials", run_flags.trials, "Number of trials (default 40)");
  run->add_option("--out", run_flags.out_path, "CSV output path")->required();
  run->add_option("--sampling", run_flags.sampling, "Row sampling: norm | uniform (default norm)");
  run->add_option("--threads", run_flags.threads, "Worker threads (default: hardware concurrency)");
  run->add_flag("--no-carry", run_flags.no_carry, "Do not seed each signal with the current joint estimate");
  run->add_flag("--verbose", run_flags.verbose, "Also report precision and skipped projections");

  auto* list = app.add_subcommand("list-presets", "Print the built-in experiment presets");

  ProblemFlags gen_flags;
  std::string out_dir;
  auto* gen = app.add_subcommand("gen-instance", "Write one problem instance as plain-text files");
  gen_flags.add_to(*gen, false);
  gen->add_option("--out-dir", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags, out, err);
    if (list->parsed()) return cmd_list_presets(out);
    if (gen->parsed()) return cmd_gen_instance(gen_flags, out_dir, out);
  } catch (const FlagError& e) {
    err << "error: " << e.message << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace srk::cli
