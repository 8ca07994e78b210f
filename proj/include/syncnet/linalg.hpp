#pragma once

// Dense real matrix kernels for small (N up to a few hundred) problems.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace syncnet {

using Vector = std::vector<double>;

/// Row-major dense matrix of finite doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  /// Zero-filled rows x cols matrix.
  DenseMatrix(std::size_t rows, std::size_t cols);
  /// Takes ownership of row-major entries; throws if sizes disagree or an entry is not finite.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> d);
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  [[nodiscard]] std::span<double> row(std::size_t i) noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

  [[nodiscard]] DenseMatrix transpose() const;
  [[nodiscard]] Vector multiply(std::span<const double> x) const;
  [[nodiscard]] std::vector<std::vector<double>> to_rows() const;

  /// Largest absolute entry.
  [[nodiscard]] double max_abs() const noexcept;
  [[nodiscard]] double frobenius() const noexcept;

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
  friend DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
  friend DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
  friend DenseMatrix operator*(double s, const DenseMatrix& a);
  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Eigen-decomposition of a symmetric matrix.
struct SymmetricSpectrum {
  /// Sorted descending.
  Vector eigenvalues;
  /// Column k is the unit eigenvector for eigenvalues[k].
  DenseMatrix eigenvectors;
};

/// Solves a x = b by Gaussian elimination with partial pivoting.
/// Throws SingularMatrix when a pivot falls below 1e-13 * ||a||_1.
[[nodiscard]] Vector lu_solve(const DenseMatrix& a, std::span<const double> b);

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is below
/// 1e-12 * ||s||_F. Throws NotSymmetric or NoConvergence (after 100 sweeps).
[[nodiscard]] SymmetricSpectrum jacobi_eigen(const DenseMatrix& s);

/// Induced 1-norm: maximum absolute column sum.
[[nodiscard]] double matrix_one_norm(const DenseMatrix& a) noexcept;

/// max |eigenvalue| of a symmetric matrix.
[[nodiscard]] double spectral_norm_symmetric(const DenseMatrix& s);

/// (n-1) x n matrix whose rows are an orthonormal basis of {x : sum(x) = 0}.
/// Built from the Householder reflection taking 1/sqrt(n) * ones to e1.
[[nodiscard]] DenseMatrix transverse_basis(std::size_t n);

[[nodiscard]] double max_abs(std::span<const double> v) noexcept;

}  // namespace syncnet
