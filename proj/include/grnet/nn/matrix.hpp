#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "grnet/error.hpp"

namespace grnet::nn {

template <typename T>
using Vector = std::vector<T>;

// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{0})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  T* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
  const T* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }
  std::span<T> row(std::size_t r) { return {row_ptr(r), cols_}; }
  std::span<const T> row(std::size_t r) const { return {row_ptr(r), cols_}; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  void resize(std::size_t rows, std::size_t cols) {
    rows_ = rows;
    cols_ = cols;
    data_.assign(rows * cols, T{0});
  }

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <typename T>
Matrix<T> transpose(const Matrix<T>& m) {
  Matrix<T> out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
  return out;
}

// Kernels below are written in axpy form (contiguous inner loop over output
// columns) so the compiler vectorizes them without reassociating sums. Every
// output element accumulates its terms in the same order regardless of how
// many rows are processed, so a batch of one reproduces a batched row exactly.

// out[r, :] += sum_k a[r, a_off + k] * w[w_row0 + k, :]  for k in [0, depth)
template <typename T>
void gemm_acc(const Matrix<T>& a, std::size_t a_off, const Matrix<T>& w, std::size_t w_row0,
              std::size_t depth, Matrix<T>& out) {
  const std::size_t n = out.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const T* ar = a.row_ptr(r) + a_off;
    T* o = out.row_ptr(r);
    for (std::size_t k = 0; k < depth; ++k) {
      const T av = ar[k];
      if (av == T{0}) continue;
      const T* wr = w.row_ptr(w_row0 + k);
      for (std::size_t j = 0; j < n; ++j) o[j] += av * wr[j];
    }
  }
}

// grad[g_row0 + k, :] += sum_r a[r, a_off + k] * dz[r, :]  for k in [0, depth)
template <typename T>
void gemm_at_acc(const Matrix<T>& a, std::size_t a_off, std::size_t depth, const Matrix<T>& dz,
                 Matrix<T>& grad, std::size_t g_row0) {
  const std::size_t n = dz.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const T* ar = a.row_ptr(r) + a_off;
    const T* d = dz.row_ptr(r);
    for (std::size_t k = 0; k < depth; ++k) {
      const T av = ar[k];
      if (av == T{0}) continue;
      T* g = grad.row_ptr(g_row0 + k);
      for (std::size_t j = 0; j < n; ++j) g[j] += av * d[j];
    }
  }
}

// out[r, o_off + k] += sum_j dz[r, j] * wt[j, wt_col0 + k]  for k in [0, width)
// where wt is the transpose of the forward weight matrix.
template <typename T>
void gemm_bt_acc(const Matrix<T>& dz, const Matrix<T>& wt, std::size_t wt_col0, std::size_t width,
                 Matrix<T>& out, std::size_t o_off) {
  for (std::size_t r = 0; r < dz.rows(); ++r) {
    const T* d = dz.row_ptr(r);
    T* o = out.row_ptr(r) + o_off;
    for (std::size_t j = 0; j < dz.cols(); ++j) {
      const T dv = d[j];
      if (dv == T{0}) continue;
      const T* wr = wt.row_ptr(j) + wt_col0;
      for (std::size_t k = 0; k < width; ++k) o[k] += dv * wr[k];
    }
  }
}

template <typename T>
void add_row_broadcast(Matrix<T>& out, std::span<const T> bias) {
  for (std::size_t r = 0; r < out.rows(); ++r) {
    T* o = out.row_ptr(r);
    for (std::size_t j = 0; j < out.cols(); ++j) o[j] += bias[j];
  }
}

template <typename T>
void column_sum_acc(const Matrix<T>& dz, std::span<T> out) {
  for (std::size_t r = 0; r < dz.rows(); ++r) {
    const T* d = dz.row_ptr(r);
    for (std::size_t j = 0; j < dz.cols(); ++j) out[j] += d[j];
  }
}

}  // namespace grnet::nn
