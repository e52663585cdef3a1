#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "srk/rng.hpp"

namespace srk {

using Vector = Eigen::VectorXd;
/// n x J signals, one signal per column.
using SignalMatrix = Eigen::MatrixXd;
/// m x J measurements, one measurement vector per column.
using MeasurementMatrix = Eigen::MatrixXd;

using DenseRowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense measurement matrix accessed one row at a time.
///
/// Row squared norms, their prefix sums and the squared Frobenius norm are
/// computed once at construction; the matrix is immutable afterwards.
class RowMatrix {
 public:
  explicit RowMatrix(DenseRowMajor entries);

  std::size_t rows() const { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(entries_.cols()); }

  auto row(std::size_t i) const { return entries_.row(static_cast<Eigen::Index>(i)); }
  double row_sq_norm(std::size_t i) const { return row_sq_norms_[i]; }
  const std::vector<double>& row_sq_norms() const { return row_sq_norms_; }
  /// cumulative_sq_norms()[i] = sum of row_sq_norms[0..i].
  const std::vector<double>& cumulative_sq_norms() const { return cumulative_; }
  double frob_sq() const { return frob_sq_; }

  const DenseRowMajor& entries() const { return entries_; }

 private:
  DenseRowMajor entries_;
  std::vector<double> row_sq_norms_;
  std::vector<double> cumulative_;
  double frob_sq_ = 0.0;
};

/// Strictly increasing set of indices in [0, n).
class SupportSet {
 public:
  SupportSet() = default;
  /// Sorts the indices; throws ParameterError on duplicates or index >= n.
  SupportSet(std::vector<std::size_t> indices, std::size_t n);
  SupportSet(std::initializer_list<std::size_t> indices, std::size_t n)
      : SupportSet(std::vector<std::size_t>(indices), n) {}

  /// {0, 1, ..., n-1}.
  static SupportSet full(std::size_t n);

  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  std::size_t ambient() const { return n_; }
  bool contains(std::size_t index) const;

  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  std::size_t intersection_size(const SupportSet& other) const;

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<std::size_t> indices_;
  std::size_t n_ = 0;
};

/// Per-column Kaczmarz weights: 1 on the generating support, 1/sqrt(t) elsewhere.
struct WeightVector {
  Vector weights;
  std::size_t t = 0;
};

enum class RowSampling { norm_proportional, uniform };

/// Indices of the k_hat largest-magnitude entries; equal magnitudes are
/// resolved in favour of the smaller index.
SupportSet hard_threshold_support(const Vector& x, std::size_t k_hat);

WeightVector row_weights(const SupportSet& support, std::size_t t, std::size_t n);

Vector weighted_row(const Vector& row, const WeightVector& w);

/// Orthogonal projection of x onto {z : <a, z> = y_i}. A zero row carries no
/// information and leaves x unchanged.
Vector kaczmarz_project(const Vector& x, const Vector& a, double y_i);

/// In-place form of kaczmarz_project. Returns false when the update was
/// skipped because ||a||^2 == 0.
bool kaczmarz_project_inplace(Vector& x, const Vector& a, double y_i);

/// Draws a row index with probability ||row_i||^2 / ||matrix||_F^2, or 1/m.
std::size_t sample_row_index(const RowMatrix& matrix, RowSampling scheme, Rng& rng);

}  // namespace srk
