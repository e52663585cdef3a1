#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "srk/core.hpp"
#include "srk/solvers.hpp"

namespace srk {

enum class Ensemble { gaussian, uniform01 };

/// Number and magnitude distribution of per-signal corruptions.
struct CorruptionSpec {
  std::size_t count_min = 0;
  std::size_t count_max = 0;
  double mean = 7.0;
  double stddev = 1.0;

  /// Throws ParameterError unless count_min <= count_max <= n - k, stddev >= 0,
  /// and the value distribution is not the point mass at zero.
  void validate(std::size_t n, std::size_t k) const;
};

/// How the joint support is placed among the n indices.
enum class SupportLayout { uniform_random, contiguous_block };

struct InstanceSpec {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t signals = 0;
  Ensemble ensemble = Ensemble::gaussian;
  CorruptionSpec corruption;
  SupportLayout layout = SupportLayout::uniform_random;

  void validate() const;
};

struct ProblemInstance {
  RowMatrix matrix;
  SignalMatrix X_true;
  MeasurementMatrix Y;
  SupportSet joint_support;
  std::vector<SupportSet> corruption_sets;
};

SupportSet gen_joint_support(std::size_t n, std::size_t k, Rng& rng);

/// Random block [start, start + k) with start uniform in [0, n - k].
SupportSet gen_contiguous_support(std::size_t n, std::size_t k, Rng& rng);

/// Support rows i.i.d. N(0,1) (exact zeros redrawn), all other rows zero.
SignalMatrix gen_signals(std::size_t n, std::size_t signals, const SupportSet& support, Rng& rng);

/// Adds c_j ~ U{count_min..count_max} corruptions to column j, at indices drawn
/// uniformly from outside `support`, with values N(mean, stddev^2).
std::pair<SignalMatrix, std::vector<SupportSet>> add_corruptions(SignalMatrix X, const SupportSet& support,
                                                                 const CorruptionSpec& spec, Rng& rng);

RowMatrix gen_matrix(std::size_t m, std::size_t n, Ensemble ensemble, Rng& rng);

/// Each signal picks long_range with probability p_stall, else short_range,
/// then a uniform integer budget inside the chosen closed range.
OnlineSchedule gen_online_schedule(std::size_t signals, double p_stall, std::pair<std::size_t, std::size_t> short_range,
                                   std::pair<std::size_t, std::size_t> long_range, Rng& rng);

MeasurementMatrix synthesize(const RowMatrix& matrix, const SignalMatrix& X);

ProblemInstance make_instance(const InstanceSpec& spec, Rng& rng);

/// Human-readable descriptions of every violated ProblemInstance invariant;
/// empty when the instance is well formed.
std::vector<std::string> check_instance(const ProblemInstance& instance);

// Plain-text dumps: a `rows cols` header line, then one line per row with
// space-separated values. Support files use the header `n size` followed by a
// single line of indices; corruption files use `n J` followed by one index
// line per signal.
void write_matrix_text(const std::filesystem::path& path, const Eigen::MatrixXd& matrix);
Eigen::MatrixXd read_matrix_text(const std::filesystem::path& path);
void write_support_text(const std::filesystem::path& path, const SupportSet& support);
void write_support_list_text(const std::filesystem::path& path, const std::vector<SupportSet>& supports,
                             std::size_t n);

/// Writes matrix.txt, X.txt, Y.txt, support.txt and corruptions.txt.
void write_instance(const std::filesystem::path& dir, const ProblemInstance& instance);

std::string to_string(Ensemble ensemble);
Ensemble parse_ensemble(const std::string& name);

}  // namespace srk
