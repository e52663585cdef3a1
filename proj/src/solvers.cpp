#include "srk/solvers.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "srk/errors.hpp"

namespace srk {

namespace {

using ConstColumn = Eigen::Ref<const Vector>;

/// Runs `budget` SRK iterations on x in place and returns the support estimate
/// that drove the last iteration. `after_projection(t)` fires after each one.
template <typename AfterProjection>
SupportSet run_srk_iterations(const RowMatrix& matrix, const ConstColumn& y, std::size_t k_hat,
                              std::size_t budget, RowSampling sampling, Rng& rng, Vector& x,
                              const SupportSet* first_estimate, std::size_t& skipped,
                              AfterProjection&& after_projection) {
  const std::size_t n = matrix.cols();
  SupportSet estimate;
  for (std::size_t t = 1; t <= budget; ++t) {
    const std::size_t i = sample_row_index(matrix, sampling, rng);
    estimate = (t == 1 && first_estimate != nullptr) ? *first_estimate : hard_threshold_support(x, k_hat);
    const WeightVector w = row_weights(estimate, t, n);
    const Vector a = weighted_row(matrix.row(i).transpose(), w);
    if (!kaczmarz_project_inplace(x, a, y[static_cast<Eigen::Index>(i)])) ++skipped;
    after_projection(t);
  }
  return estimate;
}

void check_rows(const RowMatrix& matrix, Eigen::Index rows, const char* who) {
  if (static_cast<std::size_t>(rows) != matrix.rows()) {
    throw DimensionError(std::string(who) + ": measurement length " + std::to_string(rows) +
                         " != matrix rows " + std::to_string(matrix.rows()));
  }
}

}  // namespace

void SrkParams::validate(std::size_t n) const {
  if (k_hat < 1 || k_hat > n) {
    throw ParameterError("SrkParams: k_hat = " + std::to_string(k_hat) + " outside [1, " + std::to_string(n) + "]");
  }
  if (tau < 1) throw ParameterError("SrkParams: tau must be >= 1");
}

OnlineSchedule::OnlineSchedule(std::vector<std::size_t> budgets, std::size_t tau_max)
    : budgets_(std::move(budgets)) {
  if (budgets_.empty()) throw ParameterError("OnlineSchedule: empty schedule");
  if (std::find(budgets_.begin(), budgets_.end(), std::size_t{0}) != budgets_.end()) {
    throw ParameterError("OnlineSchedule: every budget must be >= 1");
  }
  const std::size_t largest = *std::max_element(budgets_.begin(), budgets_.end());
  if (tau_max == 0) tau_max = largest;
  if (tau_max < largest) {
    throw ParameterError("OnlineSchedule: tau_max " + std::to_string(tau_max) + " below largest budget " +
                         std::to_string(largest));
  }
  tau_max_ = tau_max;
}

OnlineSchedule OnlineSchedule::fixed(std::size_t signals, std::size_t budget) {
  return OnlineSchedule(std::vector<std::size_t>(signals, budget));
}

std::size_t OnlineSchedule::total_projections() const {
  return std::accumulate(budgets_.begin(), budgets_.end(), std::size_t{0});
}

SrkResult srk(const RowMatrix& matrix, const Vector& y, const SrkParams& params, Rng& rng) {
  check_rows(matrix, y.size(), "srk");
  params.validate(matrix.cols());

  SrkResult result{Vector::Zero(static_cast<Eigen::Index>(matrix.cols())), {}};
  auto& trace = result.trace;
  trace.samples.reserve(params.tau);
  run_srk_iterations(matrix, y, params.k_hat, params.tau, params.sampling, rng, result.x, nullptr,
                     trace.skipped_projections, [&](std::size_t t) {
                       trace.samples.push_back({t, hard_threshold_support(result.x, params.k_hat)});
                     });
  trace.final_estimate = result.x;
  return result;
}

SupportSet row_norm_support(const SignalMatrix& X, std::size_t k_hat) {
  // Squared norms rank identically to norms.
  return hard_threshold_support(X.rowwise().squaredNorm(), k_hat);
}

MmvResult mmv_srk(const RowMatrix& matrix, const MeasurementMatrix& Y, const SrkParams& params, Rng& rng,
                  const MmvObserver& observer) {
  check_rows(matrix, Y.rows(), "mmv_srk");
  if (Y.cols() < 1) throw DimensionError("mmv_srk: Y has no columns");
  const std::size_t n = matrix.cols();
  const auto J = static_cast<std::size_t>(Y.cols());
  params.validate(n);

  MmvResult result{SignalMatrix::Zero(static_cast<Eigen::Index>(n), Y.cols()), {}};
  auto& X = result.X;
  auto& trace = result.trace;
  trace.samples.reserve(params.tau);
  for (std::size_t t = 1; t <= params.tau; ++t) {
    const std::size_t i = sample_row_index(matrix, params.sampling, rng);
    const SupportSet estimate = row_norm_support(X, params.k_hat);
    const WeightVector w = row_weights(estimate, t, n);
    const Vector a = weighted_row(matrix.row(i).transpose(), w);
    const double norm_sq = a.squaredNorm();
    if (norm_sq == 0.0) {
      trace.skipped_projections += J;
    } else {
      for (std::size_t j = 0; j < J; ++j) {
        if (observer) observer(t, j, i, a);
        auto column = X.col(static_cast<Eigen::Index>(j));
        const double step = (Y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - a.dot(column)) / norm_sq;
        column += step * a;
      }
    }
    trace.samples.push_back({t * J, row_norm_support(X, params.k_hat)});
  }
  trace.final_estimate = X;
  return result;
}

TallyVector tally_update(TallyVector b, const SupportSet& estimate, std::size_t tau_j, std::size_t tau_max) {
  if (tau_max == 0 || tau_j > tau_max) {
    throw ParameterError("tally_update: need 0 < tau_j <= tau_max (got " + std::to_string(tau_j) + ", " +
                         std::to_string(tau_max) + ")");
  }
  if (estimate.ambient() != static_cast<std::size_t>(b.values.size())) {
    throw DimensionError("tally_update: estimate ambient dimension != tally length");
  }
  const double vote = static_cast<double>(tau_j) / static_cast<double>(tau_max);
  for (std::size_t q : estimate) b.values[static_cast<Eigen::Index>(q)] += vote;
  ++b.signals_seen;
  return b;
}

CmmvResult cmmv_srk(const RowMatrix& matrix, const MeasurementMatrix& Y, std::size_t k_hat,
                    const OnlineSchedule& schedule, Rng& rng, const CmmvOptions& options) {
  check_rows(matrix, Y.rows(), "cmmv_srk");
  const std::size_t n = matrix.cols();
  if (schedule.size() != static_cast<std::size_t>(Y.cols())) {
    throw DimensionError("cmmv_srk: schedule length " + std::to_string(schedule.size()) + " != signal count " +
                         std::to_string(Y.cols()));
  }
  if (k_hat < 1 || k_hat > n) {
    throw ParameterError("cmmv_srk: k_hat = " + std::to_string(k_hat) + " outside [1, " + std::to_string(n) + "]");
  }

  CmmvResult result;
  result.tallies = TallyVector::zeros(n);
  auto& trace = result.trace;
  trace.final_estimate = SignalMatrix::Zero(static_cast<Eigen::Index>(n), Y.cols());
  trace.samples.reserve(schedule.size());
  result.signal_estimates.reserve(schedule.size());

  // Thresholding the all-zero tally gives the same {0..k_hat-1} a zero iterate would.
  SupportSet joint = hard_threshold_support(result.tallies.values, k_hat);
  std::size_t projections = 0;
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    const std::size_t budget = schedule.budgets()[j];
    Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
    const SupportSet* seed_estimate = options.carry_joint_estimate ? &joint : nullptr;
    const SupportSet last_estimate =
        run_srk_iterations(matrix, Y.col(static_cast<Eigen::Index>(j)), k_hat, budget, options.sampling, rng, x,
                           seed_estimate, trace.skipped_projections, [](std::size_t) {});
    projections += budget;
    result.tallies = tally_update(std::move(result.tallies), last_estimate, budget, schedule.tau_max());
    joint = hard_threshold_support(result.tallies.values, k_hat);
    trace.final_estimate.col(static_cast<Eigen::Index>(j)) = x;
    trace.samples.push_back({projections, joint});
    result.signal_estimates.push_back(last_estimate);
  }
  result.joint_support = joint;
  return result;
}

}  // namespace srk
