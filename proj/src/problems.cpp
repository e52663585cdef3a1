#include "srk/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "srk/errors.hpp"
#include "srk/format.hpp"

namespace srk {

namespace {

double nonzero_normal(Rng& rng, double mean, double stddev) {
  double value = 0.0;
  do {
    value = rng.normal(mean, stddev);
  } while (value == 0.0);
  return value;
}

/// Partial Fisher-Yates: moves a uniform size-`count` subset to the front.
void partial_shuffle(std::vector<std::size_t>& pool, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    const auto pick = i + static_cast<std::size_t>(rng.uniform_index(pool.size() - i));
    std::swap(pool[i], pool[pick]);
  }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_index_line(std::ostream& out, const SupportSet& support) {
  bool first = true;
  for (std::size_t q : support) {
    if (!first) out << ' ';
    out << q;
    first = false;
  }
  out << '\n';
}

}  // namespace

void CorruptionSpec::validate(std::size_t n, std::size_t k) const {
  if (count_min > count_max) throw ParameterError("CorruptionSpec: count_min > count_max");
  if (k > n || count_max > n - k) {
    throw ParameterError("CorruptionSpec: count_max " + std::to_string(count_max) + " exceeds n - k = " +
                         std::to_string(n >= k ? n - k : 0));
  }
  if (!std::isfinite(mean) || !std::isfinite(stddev) || stddev < 0.0) {
    throw ParameterError("CorruptionSpec: need finite mean and stddev >= 0");
  }
  if (count_max > 0 && mean == 0.0 && stddev == 0.0) {
    throw ParameterError("CorruptionSpec: N(0, 0) cannot produce nonzero corruptions");
  }
}

void InstanceSpec::validate() const {
  if (m < 1 || n < 1) throw ParameterError("InstanceSpec: m and n must be >= 1");
  if (k < 1 || k > n) throw ParameterError("InstanceSpec: k must lie in [1, n]");
  if (signals < 1) throw ParameterError("InstanceSpec: need at least one signal");
  corruption.validate(n, k);
}

SupportSet gen_joint_support(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw ParameterError("gen_joint_support: k > n");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  partial_shuffle(pool, k, rng);
  pool.resize(k);
  return SupportSet(std::move(pool), n);
}

SupportSet gen_contiguous_support(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw ParameterError("gen_contiguous_support: k > n");
  const auto start = static_cast<std::size_t>(rng.uniform_index(n - k + 1));
  std::vector<std::size_t> block(k);
  std::iota(block.begin(), block.end(), start);
  return SupportSet(std::move(block), n);
}

SignalMatrix gen_signals(std::size_t n, std::size_t signals, const SupportSet& support, Rng& rng) {
  if (support.ambient() != n) throw DimensionError("gen_signals: support ambient dimension != n");
  SignalMatrix X = SignalMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(signals));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (std::size_t q : support) X(static_cast<Eigen::Index>(q), j) = nonzero_normal(rng, 0.0, 1.0);
  }
  return X;
}

std::pair<SignalMatrix, std::vector<SupportSet>> add_corruptions(SignalMatrix X, const SupportSet& support,
                                                                 const CorruptionSpec& spec, Rng& rng) {
  const auto n = static_cast<std::size_t>(X.rows());
  if (support.ambient() != n) throw DimensionError("add_corruptions: support ambient dimension != n");
  spec.validate(n, support.size());

  std::vector<std::size_t> complement;
  complement.reserve(n - support.size());
  for (std::size_t q = 0; q < n; ++q) {
    if (!support.contains(q)) complement.push_back(q);
  }

  std::vector<SupportSet> corruption_sets;
  corruption_sets.reserve(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const auto count = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(spec.count_min), static_cast<std::int64_t>(spec.count_max)));
    partial_shuffle(complement, count, rng);
    std::vector<std::size_t> chosen(complement.begin(), complement.begin() + static_cast<std::ptrdiff_t>(count));
    for (std::size_t q : chosen) X(static_cast<Eigen::Index>(q), j) = nonzero_normal(rng, spec.mean, spec.stddev);
    corruption_sets.emplace_back(std::move(chosen), n);
  }
  return {std::move(X), std::move(corruption_sets)};
}

RowMatrix gen_matrix(std::size_t m, std::size_t n, Ensemble ensemble, Rng& rng) {
  if (m < 1 || n < 1) throw ParameterError("gen_matrix: m and n must be >= 1");
  DenseRowMajor entries(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < entries.rows(); ++i) {
    for (Eigen::Index l = 0; l < entries.cols(); ++l) {
      entries(i, l) = ensemble == Ensemble::gaussian ? rng.normal() : rng.uniform01();
    }
  }
  return RowMatrix(std::move(entries));
}

OnlineSchedule gen_online_schedule(std::size_t signals, double p_stall, std::pair<std::size_t, std::size_t> short_range,
                                   std::pair<std::size_t, std::size_t> long_range, Rng& rng) {
  if (!(p_stall >= 0.0 && p_stall <= 1.0)) throw ParameterError("gen_online_schedule: p_stall outside [0, 1]");
  for (const auto& [lo, hi] : {short_range, long_range}) {
    if (lo < 1 || lo > hi) throw ParameterError("gen_online_schedule: budget ranges must satisfy 1 <= lo <= hi");
  }
  std::vector<std::size_t> budgets(signals);
  for (auto& budget : budgets) {
    const auto& [lo, hi] = rng.bernoulli(p_stall) ? long_range : short_range;
    budget = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
  }
  return OnlineSchedule(std::move(budgets));
}

MeasurementMatrix synthesize(const RowMatrix& matrix, const SignalMatrix& X) {
  if (matrix.cols() != static_cast<std::size_t>(X.rows())) {
    throw DimensionError("synthesize: matrix has " + std::to_string(matrix.cols()) + " columns but X has " +
                         std::to_string(X.rows()) + " rows");
  }
  return matrix.entries() * X;
}

ProblemInstance make_instance(const InstanceSpec& spec, Rng& rng) {
  spec.validate();
  RowMatrix matrix = gen_matrix(spec.m, spec.n, spec.ensemble, rng);
  SupportSet support = spec.layout == SupportLayout::contiguous_block ? gen_contiguous_support(spec.n, spec.k, rng)
                                                                      : gen_joint_support(spec.n, spec.k, rng);
  SignalMatrix clean = gen_signals(spec.n, spec.signals, support, rng);
  auto [X, corruption_sets] = add_corruptions(std::move(clean), support, spec.corruption, rng);
  MeasurementMatrix Y = synthesize(matrix, X);
  return {std::move(matrix), std::move(X), std::move(Y), std::move(support), std::move(corruption_sets)};
}

std::vector<std::string> check_instance(const ProblemInstance& instance) {
  std::vector<std::string> problems;
  const auto n = static_cast<std::size_t>(instance.X_true.rows());
  if (instance.matrix.cols() != n) problems.emplace_back("matrix columns != X rows");
  if (instance.joint_support.ambient() != n) problems.emplace_back("joint support ambient dimension != n");
  if (instance.corruption_sets.size() != static_cast<std::size_t>(instance.X_true.cols())) {
    problems.emplace_back("corruption set count != signal count");
  }
  if (!problems.empty()) return problems;

  const MeasurementMatrix recomputed = instance.matrix.entries() * instance.X_true;
  const double scale = std::max(1.0, recomputed.norm());
  if (instance.Y.rows() != recomputed.rows() || instance.Y.cols() != recomputed.cols() ||
      (instance.Y - recomputed).norm() > 1e-10 * scale) {
    problems.emplace_back("Y != matrix * X_true");
  }

  for (std::size_t j = 0; j < instance.corruption_sets.size(); ++j) {
    const SupportSet& corrupt = instance.corruption_sets[j];
    if (corrupt.intersection_size(instance.joint_support) != 0) {
      problems.push_back("signal " + std::to_string(j) + ": corruption overlaps joint support");
    }
    for (std::size_t q = 0; q < n; ++q) {
      const bool expected = instance.joint_support.contains(q) || corrupt.contains(q);
      const bool nonzero = instance.X_true(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(j)) != 0.0;
      if (expected != nonzero) {
        problems.push_back("signal " + std::to_string(j) + ": support mismatch at index " + std::to_string(q));
        break;
      }
    }
  }
  return problems;
}

void write_matrix_text(const std::filesystem::path& path, const Eigen::MatrixXd& matrix) {
  auto out = open_for_write(path);
  out << matrix.rows() << ' ' << matrix.cols() << '\n';
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index l = 0; l < matrix.cols(); ++l) {
      if (l > 0) out << ' ';
      out << format_double(matrix(i, l));
    }
    out << '\n';
  }
  finish(out, path);
}

Eigen::MatrixXd read_matrix_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) throw std::runtime_error("bad header in " + path.string());
  Eigen::MatrixXd matrix(rows, cols);
  std::string token;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index l = 0; l < cols; ++l) {
      if (!(in >> token)) throw std::runtime_error("truncated matrix in " + path.string());
      matrix(i, l) = parse_double(token);
    }
  }
  return matrix;
}

void write_support_text(const std::filesystem::path& path, const SupportSet& support) {
  auto out = open_for_write(path);
  out << support.ambient() << ' ' << support.size() << '\n';
  write_index_line(out, support);
  finish(out, path);
}

void write_support_list_text(const std::filesystem::path& path, const std::vector<SupportSet>& supports,
                             std::size_t n) {
  auto out = open_for_write(path);
  out << n << ' ' << supports.size() << '\n';
  for (const auto& support : supports) write_index_line(out, support);
  finish(out, path);
}

void write_instance(const std::filesystem::path& dir, const ProblemInstance& instance) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  write_matrix_text(dir / "matrix.txt", instance.matrix.entries());
  write_matrix_text(dir / "X.txt", instance.X_true);
  write_matrix_text(dir / "Y.txt", instance.Y);
  write_support_text(dir / "support.txt", instance.joint_support);
  write_support_list_text(dir / "corruptions.txt", instance.corruption_sets,
                          static_cast<std::size_t>(instance.X_true.rows()));
}

std::string to_string(Ensemble ensemble) { return ensemble == Ensemble::gaussian ? "gaussian" : "uniform01"; }

Ensemble parse_ensemble(const std::string& name) {
  if (name == "gaussian") return Ensemble::gaussian;
  if (name == "uniform01" || name == "uniform") return Ensemble::uniform01;
  throw ParameterError("unknown ensemble '" + name + "' (expected gaussian or uniform01)");
}

}  // namespace srk
