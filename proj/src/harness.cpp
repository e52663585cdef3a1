#include "srk/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "srk/errors.hpp"
#include "srk/format.hpp"
#include "srk/solvers.hpp"

namespace srk {

namespace {

// Stream ids for the per-trial generators.
constexpr std::uint64_t kInstanceStream = 0;
constexpr std::uint64_t kScheduleStream = 1;
constexpr std::uint64_t kMmvStream = 2;
constexpr std::uint64_t kCmmvStream = 3;

bool runs_mmv(Algorithm a) { return a == Algorithm::mmv || a == Algorithm::both; }
bool runs_cmmv(Algorithm a) { return a == Algorithm::cmmv || a == Algorithm::both; }

RecoveryCurve curve_from_trace(std::string label, const SolveTrace& trace, const SupportSet& truth) {
  RecoveryCurve curve{std::move(label), {}, 1};
  curve.points.reserve(trace.samples.size());
  for (const auto& sample : trace.samples) {
    curve.points.push_back({sample.projection, support_recovery_fraction(sample.support, truth), 0.0});
  }
  return curve;
}

std::string range_text(std::pair<std::size_t, std::size_t> range) {
  return "[" + std::to_string(range.first) + "," + std::to_string(range.second) + "]";
}

ExperimentConfig base_preset(std::string name) {
  ExperimentConfig config;
  config.name = std::move(name);
  config.m = 1000;
  config.n = 100;
  config.k = 10;
  config.k_hat = 15;
  config.corruption = {1, 1, 7.0, 1.0};
  return config;
}

std::vector<std::string> split(const std::string& line, char separator) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, separator)) fields.push_back(field);
  if (!line.empty() && line.back() == separator) fields.emplace_back();
  return fields;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (m < 1 || n < 1 || k < 1 || signals < 1) {
    throw ParameterError("ExperimentConfig: m, n, k and J must all be >= 1");
  }
  if (k > n) throw ParameterError("ExperimentConfig: k must not exceed n");
  if (k_hat < 1 || k_hat > n) throw ParameterError("ExperimentConfig: k_hat must lie in [1, n]");
  if (trials < 1) throw ParameterError("ExperimentConfig: trials must be >= 1");
  corruption.validate(n, k);
  if (const auto* fixed = std::get_if<FixedBudget>(&budget)) {
    if (fixed->per_signal < 1) throw ParameterError("ExperimentConfig: budget must be >= 1");
  } else {
    const auto& online = std::get<OnlineBudget>(budget);
    if (!(online.p_stall >= 0.0 && online.p_stall <= 1.0)) {
      throw ParameterError("ExperimentConfig: online stall probability outside [0, 1]");
    }
    for (const auto& [lo, hi] : {online.short_range, online.long_range}) {
      if (lo < 1 || lo > hi) throw ParameterError("ExperimentConfig: online budget ranges need 1 <= lo <= hi");
    }
    if (runs_mmv(algorithm)) {
      throw ParameterError("ExperimentConfig: the batch MMV solver needs a fixed budget, not an online schedule");
    }
  }
}

InstanceSpec ExperimentConfig::instance_spec() const { return {m, n, k, signals, ensemble, corruption, layout}; }

std::string ExperimentConfig::describe() const {
  std::ostringstream out;
  out << name << " m=" << m << " n=" << n << " k=" << k << " k_hat=" << k_hat << " J=" << signals
      << " ensemble=" << to_string(ensemble) << " corruptions=" << corruption.count_min << ".."
      << corruption.count_max << " corruption_dist=N(" << format_double(corruption.mean) << ","
      << format_double(corruption.stddev * corruption.stddev) << ")";
  if (const auto* fixed = std::get_if<FixedBudget>(&budget)) {
    out << " budget=" << fixed->per_signal;
  } else {
    const auto& online = std::get<OnlineBudget>(budget);
    out << " budget=online(p=" << format_double(online.p_stall) << "," << range_text(online.short_range) << ","
        << range_text(online.long_range) << ")";
  }
  out << " support=" << (layout == SupportLayout::contiguous_block ? "contiguous" : "random")
      << " algorithm=" << to_string(algorithm);
  return out.str();
}

double support_recovery_fraction(const SupportSet& estimate, const SupportSet& truth) {
  if (truth.empty()) throw ParameterError("support_recovery_fraction: empty truth set");
  if (estimate.ambient() != truth.ambient()) throw DimensionError("support_recovery_fraction: ambient mismatch");
  return static_cast<double>(estimate.intersection_size(truth)) / static_cast<double>(truth.size());
}

double support_precision(const SupportSet& estimate, const SupportSet& truth) {
  if (estimate.ambient() != truth.ambient()) throw DimensionError("support_precision: ambient mismatch");
  if (estimate.empty()) return 0.0;
  return static_cast<double>(estimate.intersection_size(truth)) / static_cast<double>(estimate.size());
}

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index) {
  config.validate();
  const Rng base(config.seed + trial_index);
  Rng instance_rng = base.fork(kInstanceStream);
  const ProblemInstance instance = make_instance(config.instance_spec(), instance_rng);

  TrialResult result;
  if (runs_mmv(config.algorithm)) {
    Rng rng = base.fork(kMmvStream);
    const SrkParams params{config.k_hat, std::get<FixedBudget>(config.budget).per_signal, config.sampling};
    const MmvResult mmv = mmv_srk(instance.matrix, instance.Y, params, rng);
    result.curves.push_back(curve_from_trace("mmv", mmv.trace, instance.joint_support));
    result.skipped_projections += mmv.trace.skipped_projections;
  }
  if (runs_cmmv(config.algorithm)) {
    OnlineSchedule schedule = [&] {
      if (const auto* fixed = std::get_if<FixedBudget>(&config.budget)) {
        return OnlineSchedule::fixed(config.signals, fixed->per_signal);
      }
      const auto& online = std::get<OnlineBudget>(config.budget);
      Rng schedule_rng = base.fork(kScheduleStream);
      return gen_online_schedule(config.signals, online.p_stall, online.short_range, online.long_range,
                                 schedule_rng);
    }();
    Rng rng = base.fork(kCmmvStream);
    const CmmvResult cmmv = cmmv_srk(instance.matrix, instance.Y, config.k_hat, schedule, rng,
                                     {config.carry_joint_estimate, config.sampling});
    result.curves.push_back(curve_from_trace("cmmv", cmmv.trace, instance.joint_support));
    result.skipped_projections += cmmv.trace.skipped_projections;
  }
  return result;
}

RecoveryCurve aggregate_curves(const std::vector<RecoveryCurve>& trials) {
  if (trials.empty()) throw ParameterError("aggregate_curves: no curves");
  std::size_t start = 0;
  std::size_t stop = SIZE_MAX;
  for (const auto& curve : trials) {
    if (curve.points.empty()) throw ParameterError("aggregate_curves: empty curve '" + curve.label + "'");
    if (curve.label != trials.front().label) throw ParameterError("aggregate_curves: mixed labels");
    start = std::max(start, curve.points.front().projection);
    stop = std::min(stop, curve.points.back().projection);
  }

  std::set<std::size_t> grid;
  for (const auto& curve : trials) {
    for (const auto& point : curve.points) {
      if (point.projection >= start && point.projection <= stop) grid.insert(point.projection);
    }
  }

  RecoveryCurve out{trials.front().label, {}, trials.size()};
  out.points.reserve(grid.size());
  std::vector<std::size_t> cursor(trials.size(), 0);
  std::vector<double> values(trials.size());
  for (std::size_t g : grid) {
    for (std::size_t r = 0; r < trials.size(); ++r) {
      const auto& points = trials[r].points;
      while (cursor[r] + 1 < points.size() && points[cursor[r] + 1].projection <= g) ++cursor[r];
      values[r] = points[cursor[r]].mean;
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    out.points.push_back({g, std::clamp(mean, 0.0, 1.0), std::sqrt(var)});
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  std::size_t threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = std::min(threads, config.trials);

  std::vector<TrialResult> results(config.trials);
  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t t = next++; t < config.trials; t = next++) {
      try {
        results[t] = run_trial(config, t);
        if (options.on_trial) {
          std::lock_guard lock(report_mutex);
          options.on_trial(t, results[t]);
        }
      } catch (...) {
        std::lock_guard lock(report_mutex);
        if (!failure) failure = std::current_exception();
        next = config.trials;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult out;
  for (const auto& r : results) out.skipped_projections += r.skipped_projections;
  const std::size_t curve_count = results.front().curves.size();
  for (std::size_t c = 0; c < curve_count; ++c) {
    std::vector<RecoveryCurve> singles;
    singles.reserve(results.size());
    for (const auto& r : results) singles.push_back(r.curves[c]);
    out.curves.push_back(aggregate_curves(singles));
  }
  return out;
}

std::optional<double> value_at(const RecoveryCurve& curve, std::size_t projection) {
  auto it = std::upper_bound(curve.points.begin(), curve.points.end(), projection,
                             [](std::size_t p, const CurvePoint& point) { return p < point.projection; });
  if (it == curve.points.begin()) return std::nullopt;
  return std::prev(it)->mean;
}

std::optional<std::size_t> first_reaching(const RecoveryCurve& curve, double threshold) {
  for (const auto& point : curve.points) {
    if (point.mean >= threshold) return point.projection;
  }
  return std::nullopt;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig1a", "fig1b", "fig2a", "fig2b", "fig3", "fig4", "fig5", "fig7"};
  return names;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig config = base_preset(name);
  if (name == "fig1a" || name == "fig2a") {
    config.budget = FixedBudget{40};
    config.signals = 300;
  } else if (name == "fig1b" || name == "fig2b") {
    config.ensemble = Ensemble::uniform01;
    config.budget = FixedBudget{80};
    config.signals = 600;
  } else if (name == "fig3") {
    config.corruption.count_max = 3;
    config.budget = FixedBudget{50};
    config.signals = 300;
  } else if (name == "fig4") {
    config.corruption.count_max = 3;
    config.budget = OnlineBudget{};
    config.signals = 800;
    config.algorithm = Algorithm::cmmv;
  } else if (name == "fig5") {
    config.m = 100;
    config.n = 500;
    config.corruption.count_max = 3;
    config.budget = OnlineBudget{};
    config.signals = 1500;
    config.algorithm = Algorithm::cmmv;
  } else if (name == "fig7") {
    config.m = 248;
    config.n = 541;
    config.corruption.count_max = 3;
    // 200 x 75 = 15000 projections, the same total as fig3 and fig4.
    config.budget = FixedBudget{75};
    config.signals = 200;
    config.layout = SupportLayout::contiguous_block;
    config.algorithm = Algorithm::cmmv;
  } else {
    throw ParameterError("unknown preset '" + name + "'");
  }
  if (name == "fig2a" || name == "fig2b") config.corruption = {1, 1, 0.0, 1.0};
  return config;
}

std::string to_csv(const std::vector<RecoveryCurve>& curves) {
  if (curves.empty()) throw ParameterError("to_csv: no curves");
  std::ostringstream out;
  out << "label,projection,mean,std\n";
  for (const auto& curve : curves) {
    if (curve.label.find_first_of(",\n\r") != std::string::npos) {
      throw ParameterError("to_csv: label '" + curve.label + "' contains a separator");
    }
    for (const auto& point : curve.points) {
      out << curve.label << ',' << point.projection << ',' << format_double(point.mean) << ','
          << format_double(point.stddev) << '\n';
    }
  }
  return out.str();
}

std::vector<RecoveryCurve> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "label,projection,mean,std") {
    throw ParameterError("parse_csv: missing header");
  }
  std::vector<RecoveryCurve> curves;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 4) throw ParameterError("parse_csv: line " + std::to_string(line_number) + " malformed");
    if (curves.empty() || curves.back().label != fields[0]) curves.push_back({fields[0], {}, 1});
    std::size_t projection = 0;
    const auto& p = fields[1];
    const auto [end, ec] = std::from_chars(p.data(), p.data() + p.size(), projection);
    if (ec != std::errc{} || end != p.data() + p.size()) {
      throw ParameterError("parse_csv: bad projection on line " + std::to_string(line_number));
    }
    curves.back().points.push_back({projection, parse_double(fields[2]), parse_double(fields[3])});
  }
  return curves;
}

void write_csv(const std::vector<RecoveryCurve>& curves, const std::filesystem::path& path) {
  const std::string body = to_csv(curves);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << body;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<RecoveryCurve> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::mmv:
      return "mmv";
    case Algorithm::cmmv:
      return "cmmv";
    case Algorithm::both:
      return "both";
  }
  return "both";
}

}  // namespace srk
