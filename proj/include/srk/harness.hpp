#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "srk/core.hpp"
#include "srk/problems.hpp"

namespace srk {

enum class Algorithm { mmv, cmmv, both };

/// Same projection budget for every signal (also the MMV outer iteration count).
struct FixedBudget {
  std::size_t per_signal = 1;
};

/// Randomised per-signal budgets modelling acquisition stalls.
struct OnlineBudget {
  double p_stall = 0.1;
  std::pair<std::size_t, std::size_t> short_range{5, 15};
  std::pair<std::size_t, std::size_t> long_range{95, 100};
};

using Budget = std::variant<FixedBudget, OnlineBudget>;

struct ExperimentConfig {
  std::string name = "custom";
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t k_hat = 0;
  std::size_t signals = 0;
  Ensemble ensemble = Ensemble::gaussian;
  CorruptionSpec corruption;
  SupportLayout layout = SupportLayout::uniform_random;
  Algorithm algorithm = Algorithm::both;
  Budget budget = FixedBudget{};
  std::size_t trials = 40;
  std::uint64_t seed = 1;
  RowSampling sampling = RowSampling::norm_proportional;
  bool carry_joint_estimate = true;

  /// Throws ParameterError on any inconsistent field.
  void validate() const;
  InstanceSpec instance_spec() const;
  /// One-line `key=value` summary.
  std::string describe() const;
};

struct CurvePoint {
  std::size_t projection = 0;
  double mean = 0.0;
  double stddev = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct RecoveryCurve {
  std::string label;
  std::vector<CurvePoint> points;
  std::size_t trials = 1;

  friend bool operator==(const RecoveryCurve&, const RecoveryCurve&) = default;
};

/// |estimate ∩ truth| / |truth|.
double support_recovery_fraction(const SupportSet& estimate, const SupportSet& truth);

/// |estimate ∩ truth| / |estimate|; 0 for an empty estimate.
double support_precision(const SupportSet& estimate, const SupportSet& truth);

struct TrialResult {
  /// "mmv" and/or "cmmv", in that order.
  std::vector<RecoveryCurve> curves;
  std::size_t skipped_projections = 0;
};

/// One seeded trial: instance from seed + trial_index, then the configured
/// solvers. The instance does not depend on which solvers run.
TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index);

struct RunOptions {
  /// 0 means std::thread::hardware_concurrency().
  std::size_t threads = 0;
  /// Called after each finished trial (from worker threads, serialised).
  std::function<void(std::size_t trial_index, const TrialResult&)> on_trial;
};

struct ExperimentResult {
  std::vector<RecoveryCurve> curves;
  std::size_t skipped_projections = 0;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Pointwise mean and population standard deviation of single-trial curves
/// sharing one label. The grid is the union of recorded projections between
/// the latest first sample and the earliest last sample; each trial is
/// step-interpolated (last value carried forward).
RecoveryCurve aggregate_curves(const std::vector<RecoveryCurve>& trials);

/// Step-interpolated mean at `projection`; nullopt before the first point.
std::optional<double> value_at(const RecoveryCurve& curve, std::size_t projection);

/// First projection at which the mean reaches `threshold`.
std::optional<std::size_t> first_reaching(const RecoveryCurve& curve, double threshold);

const std::vector<std::string>& preset_names();
ExperimentConfig preset(const std::string& name);

std::string to_csv(const std::vector<RecoveryCurve>& curves);
std::vector<RecoveryCurve> parse_csv(const std::string& text);
void write_csv(const std::vector<RecoveryCurve>& curves, const std::filesystem::path& path);
std::vector<RecoveryCurve> read_csv(const std::filesystem::path& path);

std::string to_string(Algorithm algorithm);

}  // namespace srk
