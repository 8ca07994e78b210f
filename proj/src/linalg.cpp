#include "syncnet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "syncnet/error.hpp"
#include "syncnet/kernels.hpp"

namespace syncnet {

namespace {

constexpr double kPivotTolerance = 1e-13;
constexpr double kSymmetryTolerance = 1e-12;
constexpr double kJacobiTolerance = 1e-12;
constexpr int kJacobiMaxSweeps = 100;

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::InvalidArgument, std::string("shape mismatch in ") + op);
  }
}

double off_diagonal_frobenius(const DenseMatrix& a) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) acc += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(acc);
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorKind::InvalidArgument, "entry count " + std::to_string(data_.size()) +
                                                " does not match " + std::to_string(rows_) + "x" +
                                                std::to_string(cols_));
  }
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!std::isfinite(data_[k])) {
      throw Error(ErrorKind::InvalidArgument, "non-finite entry at (" +
                                                  std::to_string(k / cols_) + ", " +
                                                  std::to_string(k % cols_) + ")");
    }
  }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<std::vector<double>> tmp;
  tmp.reserve(rows.size());
  for (const auto& r : rows) tmp.emplace_back(r);
  *this = from_rows(tmp);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return DenseMatrix{};
  const std::size_t cols = rows.front().size();
  std::vector<double> entries;
  entries.reserve(rows.size() * cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw Error(ErrorKind::InvalidArgument, "row " + std::to_string(i) + " has " +
                                                  std::to_string(rows[i].size()) +
                                                  " entries, expected " + std::to_string(cols));
    }
    entries.insert(entries.end(), rows[i].begin(), rows[i].end());
  }
  return DenseMatrix(rows.size(), cols, std::move(entries));
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

Vector DenseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw Error(ErrorKind::InvalidArgument, "matrix-vector size mismatch");
  Vector y(rows_);
  for (std::size_t i = 0; i < rows_; ++i) y[i] = kernels::dot(row(i), x);
  return y;
}

std::vector<std::vector<double>> DenseMatrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
  return out;
}

double DenseMatrix::max_abs() const noexcept { return syncnet::max_abs(data_); }

double DenseMatrix::frobenius() const noexcept {
  double acc = 0.0;
  for (double v : data_) acc += v * v;
  return std::sqrt(acc);
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols_ != b.rows_) throw Error(ErrorKind::InvalidArgument, "shape mismatch in product");
  DenseMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double aik = a(i, k);
      if (aik != 0.0) kernels::axpy(aik, b.row(k), c.row(i));
    }
  }
  return c;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "sum");
  DenseMatrix c = a;
  for (std::size_t k = 0; k < c.data_.size(); ++k) c.data_[k] += b.data_[k];
  return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "difference");
  DenseMatrix c = a;
  for (std::size_t k = 0; k < c.data_.size(); ++k) c.data_[k] -= b.data_[k];
  return c;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
  DenseMatrix c = a;
  for (double& v : c.data_) v *= s;
  return c;
}

double max_abs(std::span<const double> v) noexcept {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double matrix_one_norm(const DenseMatrix& a) noexcept {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) col += std::abs(a(i, j));
    best = std::max(best, col);
  }
  return best;
}

Vector lu_solve(const DenseMatrix& a, std::span<const double> b) {
  if (!a.is_square()) throw Error(ErrorKind::InvalidArgument, "lu_solve needs a square matrix");
  const std::size_t n = a.rows();
  if (b.size() != n) throw Error(ErrorKind::InvalidArgument, "lu_solve right-hand side size");

  const double tol = kPivotTolerance * matrix_one_norm(a);
  DenseMatrix lu = a;
  Vector x(b.begin(), b.end());

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu(i, k)) > std::abs(lu(pivot, k))) pivot = i;
    }
    const double pmag = std::abs(lu(pivot, k));
    if (pmag == 0.0 || pmag < tol) {
      throw Error(ErrorKind::SingularMatrix,
                  "pivot " + std::to_string(pmag) + " in column " + std::to_string(k));
    }
    if (pivot != k) {
      std::swap_ranges(lu.row(k).begin(), lu.row(k).end(), lu.row(pivot).begin());
      std::swap(x[k], x[pivot]);
    }
    const auto pivot_tail = lu.row(k).subspan(k + 1);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = lu(i, k) / lu(k, k);
      if (factor == 0.0) continue;
      lu(i, k) = 0.0;
      kernels::axpy(-factor, pivot_tail, lu.row(i).subspan(k + 1));
      x[i] -= factor * x[k];
    }
  }

  for (std::size_t k = n; k-- > 0;) {
    double acc = x[k];
    for (std::size_t j = k + 1; j < n; ++j) acc -= lu(k, j) * x[j];
    x[k] = acc / lu(k, k);
  }
  return x;
}

SymmetricSpectrum jacobi_eigen(const DenseMatrix& s) {
  if (!s.is_square()) throw Error(ErrorKind::NotSymmetric, "matrix is not square");
  const std::size_t n = s.rows();

  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) asym = std::max(asym, std::abs(s(i, j) - s(j, i)));
  }
  if (asym > kSymmetryTolerance * s.max_abs()) {
    throw Error(ErrorKind::NotSymmetric, "max |s - s^T| = " + std::to_string(asym));
  }

  DenseMatrix a = s;
  // Rows of vt are the eigenvectors; rotations then act on contiguous rows.
  DenseMatrix vt = DenseMatrix::identity(n);
  const double target = kJacobiTolerance * s.frobenius();

  bool converged = false;
  for (int sweep = 0; sweep <= kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_frobenius(a) <= target) {
      converged = true;
      break;
    }
    if (sweep == kJacobiMaxSweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        kernels::rotate(a.row(p), a.row(q), c, sn);
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        kernels::rotate(vt.row(p), vt.row(q), c, sn);
      }
    }
  }
  if (!converged) {
    throw Error(ErrorKind::NoConvergence,
                "Jacobi did not converge in " + std::to_string(kJacobiMaxSweeps) + " sweeps");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return a(l, l) > a(r, r); });

  SymmetricSpectrum out{Vector(n), DenseMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = vt(order[k], i);
  }
  return out;
}

double spectral_norm_symmetric(const DenseMatrix& s) {
  const auto spectrum = jacobi_eigen(s);
  return max_abs(spectrum.eigenvalues);
}

DenseMatrix transverse_basis(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "transverse basis needs n >= 2");
  const double u = 1.0 / std::sqrt(static_cast<double>(n));
  // H = I - 2 v v^T / (v^T v), v = u*ones - e1, maps u*ones onto e1.
  Vector v(n, u);
  v[0] -= 1.0;
  const double vv = kernels::dot(v, v);
  const double scale = 2.0 / vv;

  DenseMatrix q(n - 1, n);
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      q(r - 1, j) = (r == j ? 1.0 : 0.0) - scale * v[r] * v[j];
    }
  }
  return q;
}

}  // namespace syncnet
