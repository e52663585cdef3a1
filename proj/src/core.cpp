#include "srk/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "srk/errors.hpp"

namespace srk {

RowMatrix::RowMatrix(DenseRowMajor entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.cols() < 1) {
    throw ParameterError("RowMatrix: need at least one row and one column");
  }
  if (!entries_.allFinite()) throw ParameterError("RowMatrix: entries must be finite");
  row_sq_norms_.resize(rows());
  cumulative_.resize(rows());
  double running = 0.0;
  for (std::size_t i = 0; i < rows(); ++i) {
    row_sq_norms_[i] = row(i).squaredNorm();
    running += row_sq_norms_[i];
    cumulative_[i] = running;
  }
  frob_sq_ = running;
}

SupportSet::SupportSet(std::vector<std::size_t> indices, std::size_t n)
    : indices_(std::move(indices)), n_(n) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw ParameterError("SupportSet: duplicate index");
  }
  if (!indices_.empty() && indices_.back() >= n_) {
    throw ParameterError("SupportSet: index " + std::to_string(indices_.back()) +
                         " out of range for n = " + std::to_string(n_));
  }
}

SupportSet SupportSet::full(std::size_t n) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return SupportSet(std::move(all), n);
}

bool SupportSet::contains(std::size_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

std::size_t SupportSet::intersection_size(const SupportSet& other) const {
  std::size_t count = 0;
  auto a = indices_.begin();
  auto b = other.indices_.begin();
  while (a != indices_.end() && b != other.indices_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++count;
      ++a;
      ++b;
    }
  }
  return count;
}

SupportSet hard_threshold_support(const Vector& x, std::size_t k_hat) {
  const auto n = static_cast<std::size_t>(x.size());
  if (k_hat < 1 || k_hat > n) {
    throw ParameterError("hard_threshold_support: k_hat = " + std::to_string(k_hat) +
                         " outside [1, " + std::to_string(n) + "]");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_hat), order.end(),
                    [&x](std::size_t a, std::size_t b) {
                      const double ma = std::abs(x[static_cast<Eigen::Index>(a)]);
                      const double mb = std::abs(x[static_cast<Eigen::Index>(b)]);
                      return ma > mb || (ma == mb && a < b);
                    });
  order.resize(k_hat);
  return SupportSet(std::move(order), n);
}

WeightVector row_weights(const SupportSet& support, std::size_t t, std::size_t n) {
  if (t == 0) throw ParameterError("row_weights: iteration index t must be >= 1");
  if (support.ambient() != n) throw DimensionError("row_weights: support ambient dimension != n");
  WeightVector w{Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / std::sqrt(static_cast<double>(t))), t};
  for (std::size_t l : support) w.weights[static_cast<Eigen::Index>(l)] = 1.0;
  return w;
}

Vector weighted_row(const Vector& row, const WeightVector& w) {
  if (row.size() != w.weights.size()) throw ParameterError("weighted_row: length mismatch");
  return row.cwiseProduct(w.weights);
}

bool kaczmarz_project_inplace(Vector& x, const Vector& a, double y_i) {
  if (x.size() != a.size()) throw DimensionError("kaczmarz_project: length mismatch");
  const double norm_sq = a.squaredNorm();
  if (norm_sq == 0.0) return false;
  x += ((y_i - a.dot(x)) / norm_sq) * a;
  return true;
}

Vector kaczmarz_project(const Vector& x, const Vector& a, double y_i) {
  Vector result = x;
  kaczmarz_project_inplace(result, a, y_i);
  return result;
}

std::size_t sample_row_index(const RowMatrix& matrix, RowSampling scheme, Rng& rng) {
  const std::size_t m = matrix.rows();
  if (scheme == RowSampling::uniform) return static_cast<std::size_t>(rng.uniform_index(m));

  const double total = matrix.frob_sq();
  if (!(total > 0.0)) throw DegenerateError("sample_row_index: all-zero matrix has no row mass");
  const auto& cumulative = matrix.cumulative_sq_norms();
  const double target = rng.uniform01() * total;
  // First row whose cumulative mass exceeds the target; zero rows never qualify.
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) {
    // target rounded up to total: fall back to the last row with positive mass.
    std::size_t i = m - 1;
    while (matrix.row_sq_norm(i) == 0.0) --i;
    return i;
  }
  return static_cast<std::size_t>(it - cumulative.begin());
}

}  // namespace srk
