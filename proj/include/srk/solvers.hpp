#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "srk/core.hpp"

namespace srk {

struct SrkParams {
  std::size_t k_hat = 1;
  /// Projection budget (outer iterations for the MMV solver).
  std::size_t tau = 1;
  RowSampling sampling = RowSampling::norm_proportional;

  /// Throws ParameterError unless 1 <= k_hat <= n and tau >= 1.
  void validate(std::size_t n) const;
};

/// Per-signal projection budgets for the streaming solver.
class OnlineSchedule {
 public:
  /// tau_max defaults to the largest budget; a larger manual cap is allowed.
  explicit OnlineSchedule(std::vector<std::size_t> budgets, std::size_t tau_max = 0);

  static OnlineSchedule fixed(std::size_t signals, std::size_t budget);

  const std::vector<std::size_t>& budgets() const { return budgets_; }
  std::size_t size() const { return budgets_.size(); }
  std::size_t tau_max() const { return tau_max_; }
  std::size_t total_projections() const;

 private:
  std::vector<std::size_t> budgets_;
  std::size_t tau_max_ = 0;
};

/// Weighted support votes accumulated over completed signals.
struct TallyVector {
  Vector values;
  std::size_t signals_seen = 0;

  static TallyVector zeros(std::size_t n) { return {Vector::Zero(static_cast<Eigen::Index>(n)), 0}; }
};

struct TraceSample {
  /// Cumulative number of projections performed when the sample was taken.
  std::size_t projection = 0;
  SupportSet support;
};

struct SolveTrace {
  std::vector<TraceSample> samples;
  /// Final iterate(s): n x 1 for the single-vector solver, n x J otherwise.
  SignalMatrix final_estimate;
  /// Projections skipped because the weighted row was zero.
  std::size_t skipped_projections = 0;
};

struct SrkResult {
  Vector x;
  SolveTrace trace;
};

struct MmvResult {
  SignalMatrix X;
  SolveTrace trace;
};

struct CmmvResult {
  SupportSet joint_support;
  TallyVector tallies;
  SolveTrace trace;
  /// The per-signal estimate that voted into the tallies, one per signal.
  std::vector<SupportSet> signal_estimates;
};

/// Callback invoked for every column update of mmv_srk: (outer iteration t,
/// column j, sampled row index, weighted row).
using MmvObserver = std::function<void(std::size_t, std::size_t, std::size_t, const Vector&)>;

struct CmmvOptions {
  /// Use the tally estimate from the previous signal as the t = 1 support
  /// estimate of the next signal instead of thresholding its zero iterate.
  bool carry_joint_estimate = true;
  RowSampling sampling = RowSampling::norm_proportional;
};

/// Sparse randomized Kaczmarz for one measurement vector. The trace holds the
/// k_hat-term support of the iterate after every projection.
SrkResult srk(const RowMatrix& matrix, const Vector& y, const SrkParams& params, Rng& rng);

/// Indices of the k_hat rows of X with the largest l2 norm (ties to the
/// smaller index).
SupportSet row_norm_support(const SignalMatrix& X, std::size_t k_hat);

/// Batch MMV variant: every outer iteration samples one row and updates all J
/// columns with the same weighted row. params.tau counts outer iterations; the
/// trace is sampled once per outer iteration at projection t * J.
MmvResult mmv_srk(const RowMatrix& matrix, const MeasurementMatrix& Y, const SrkParams& params, Rng& rng,
                  const MmvObserver& observer = {});

/// Streaming corrupted-MMV variant. Signals are processed in column order,
/// each with its own budget and its own 1/sqrt(t) clock; the final per-signal
/// support estimate votes tau_j / tau_max into the tally vector.
CmmvResult cmmv_srk(const RowMatrix& matrix, const MeasurementMatrix& Y, std::size_t k_hat,
                    const OnlineSchedule& schedule, Rng& rng, const CmmvOptions& options = {});

/// Adds tau_j / tau_max to every entry of b indexed by estimate.
TallyVector tally_update(TallyVector b, const SupportSet& estimate, std::size_t tau_j, std::size_t tau_max);

}  // namespace srk
