#pragma once

// Structural checks on coupling matrices and construction of pinned variants.

#include <cstddef>
#include <span>
#include <vector>

#include "syncnet/linalg.hpp"

namespace syncnet {

/// Metzler matrix with zero row sums. Only constructible via validate_coupling.
class CouplingMatrix {
 public:
  [[nodiscard]] std::size_t n() const noexcept { return m_.rows(); }
  [[nodiscard]] const DenseMatrix& matrix() const noexcept { return m_; }

  friend CouplingMatrix validate_coupling(const DenseMatrix& m);

 private:
  explicit CouplingMatrix(DenseMatrix m) : m_(std::move(m)) {}
  DenseMatrix m_;
};

/// A coupling matrix with per-node pinning gains subtracted from the diagonal.
class PinnedMatrix {
 public:
  [[nodiscard]] std::size_t n() const noexcept { return m_.rows(); }
  [[nodiscard]] const CouplingMatrix& base() const noexcept { return base_; }
  [[nodiscard]] const Vector& gains() const noexcept { return gains_; }
  /// base - diag(gains)
  [[nodiscard]] const DenseMatrix& matrix() const noexcept { return m_; }

  friend PinnedMatrix build_pinned(const CouplingMatrix& g, std::span<const double> gains);

 private:
  PinnedMatrix(CouplingMatrix base, Vector gains, DenseMatrix m)
      : base_(std::move(base)), gains_(std::move(gains)), m_(std::move(m)) {}
  CouplingMatrix base_;
  Vector gains_;
  DenseMatrix m_;
};

/// Throws NotMetzler (negative off-diagonal) or RowSumNonZero
/// (|row sum| > 1e-12 * ||m||_1).
[[nodiscard]] CouplingMatrix validate_coupling(const DenseMatrix& m);

/// Edge i -> j whenever m(i, j) > 0, i != j. Tarjan's algorithm.
[[nodiscard]] bool is_strongly_connected(const CouplingMatrix& g);

/// Strongly connected components of the positive-off-diagonal digraph, in
/// Tarjan's completion order.
[[nodiscard]] std::vector<std::vector<std::size_t>> strongly_connected_components(
    const DenseMatrix& m);

/// Throws AllGainsZero when no gain is positive, InvalidArgument on negative
/// or wrongly sized gains.
[[nodiscard]] PinnedMatrix build_pinned(const CouplingMatrix& g, std::span<const double> gains);

}  // namespace syncnet
