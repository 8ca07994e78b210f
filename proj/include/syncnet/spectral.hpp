#pragma once

// Normalized left eigenvectors, transverse-space eigenvalues, allowable
// deviation bounds and critical coupling strengths for multi-layer networks.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "syncnet/graph.hpp"
#include "syncnet/linalg.hpp"

namespace syncnet {

enum class Provenance { nlevec, combined, user };

[[nodiscard]] std::string_view to_string(Provenance p) noexcept;

/// Strictly positive vector summing to one (within 1e-12).
class WeightVector {
 public:
  /// Throws NotPositive / InvalidArgument when the invariants fail.
  WeightVector(Vector v, Provenance provenance);

  /// Rescales a strictly positive vector by its sum before validation.
  [[nodiscard]] static WeightVector normalized(Vector v, Provenance provenance);

  [[nodiscard]] const Vector& values() const noexcept { return v_; }
  [[nodiscard]] std::size_t size() const noexcept { return v_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return v_[i]; }
  [[nodiscard]] Provenance provenance() const noexcept { return provenance_; }

 private:
  Vector v_;
  Provenance provenance_;
};

/// Closed interval [lower, upper] of admissible combination weights.
struct WeightInterval {
  double lower = 0.0;
  double upper = 1.0;

  [[nodiscard]] double midpoint() const noexcept { return 0.5 * (lower + upper); }
  [[nodiscard]] bool contains(double x) const noexcept { return lower <= x && x <= upper; }
  friend bool operator==(const WeightInterval&, const WeightInterval&) = default;
};

/// One coupling layer with the diagonal of its inner matrix.
struct Layer {
  CouplingMatrix coupling;
  Vector gamma;
};

struct PinnedLayer {
  PinnedMatrix coupling;
  Vector gamma;
};

struct SyncAnalysis {
  /// lambda_2 of G^m_theta on the transverse space, per layer.
  Vector lambda2_per_layer;
  Vector adsb_per_layer;
  std::vector<WeightVector> nlevec_per_layer;
  WeightVector theta;
  /// max_i |xi^1_i - xi^2_i|; two-layer networks only.
  std::optional<double> chebyshev_gap;
  /// Feasible mu^1; meaningful only when chebyshev_gap is set (nullopt = Empty).
  std::optional<WeightInterval> mu_interval;
  /// ||Theta - theta theta^T||_2
  double spectral_norm = 0.0;
  /// sum_m lambda_2(G^m_theta) * min_k gamma^m_k
  double weighted_lambda_sum = 0.0;
  /// nullopt when infeasible.
  std::optional<double> critical_c;
};

struct ControlAnalysis {
  /// lambda_max of (Theta G~ + G~^T Theta)/2, per layer.
  Vector lambda_max_per_layer;
  /// nullopt when the NLEVec-weighted pinned matrix is not negative definite.
  std::vector<std::optional<double>> adcb_per_layer;
  std::vector<WeightVector> nlevec_per_layer;
  WeightVector theta;
  std::optional<double> chebyshev_gap;
  /// Feasible nu^1 from the pinned bounds; nullopt = Empty or a bound is missing.
  std::optional<WeightInterval> nu_interval;
  double max_theta = 0.0;
  double weighted_lambda_sum = 0.0;
  std::optional<double> critical_c;
};

/// xi with xi^T G = 0, sum(xi) = 1, xi > 0. Throws NotStronglyConnected.
[[nodiscard]] WeightVector nlevec(const CouplingMatrix& g);

/// [(Theta - theta theta^T) G + G^T (Theta - theta theta^T)] / 2, exactly symmetric.
[[nodiscard]] DenseMatrix build_g_theta(const CouplingMatrix& g, const WeightVector& theta);

/// Largest eigenvalue of s restricted to the complement of the all-ones vector.
/// Throws NotInKernel unless ||s 1||_inf <= 1e-9 ||s||_1.
[[nodiscard]] double lambda2_transverse(const DenseMatrix& s);

/// |lambda_2(G_xi)| / (2 sqrt(N) ||G||_1)
[[nodiscard]] double adsb(const CouplingMatrix& g);

/// (Theta G~ + G~^T Theta) / 2
[[nodiscard]] DenseMatrix build_control_g_theta(const PinnedMatrix& gt, const WeightVector& theta);

/// |lambda_max(xi G~)| / (sqrt(N) ||G~||_1); xi is the NLEVec of the unpinned base.
/// Throws NotNegativeDefinite when lambda_max >= 0.
[[nodiscard]] double adcb(const PinnedMatrix& gt, const WeightVector& xi);

[[nodiscard]] double chebyshev_gap(const WeightVector& a, const WeightVector& b);

/// Feasible mu^1 range for bounds (adsb1, adsb2) and NLEVec gap; nullopt when
/// empty. Nonempty exactly when gap <= adsb1 + adsb2.
[[nodiscard]] std::optional<WeightInterval> feasible_mu_interval(double adsb1, double adsb2,
                                                                 double gap);

/// mu1 * xi1 + (1 - mu1) * xi2
[[nodiscard]] WeightVector combine_theta(double mu1, const WeightVector& xi1,
                                         const WeightVector& xi2);

/// Per layer: chebyshev_gap(theta, nlevec(G^m)) <= adsb(G^m).
[[nodiscard]] std::vector<bool> check_theta_admissible(std::span<const CouplingMatrix> layers,
                                                       const WeightVector& theta);

/// Convex combination of per-layer vectors; weights must be >= 0 summing to 1.
[[nodiscard]] WeightVector combine_many(std::span<const double> weights,
                                        std::span<const WeightVector> vectors);

struct SimplexSearchResult {
  /// Combination weights of the best admissible grid point, if any.
  std::optional<Vector> weights;
  std::optional<WeightVector> theta;
  /// min over layers of (adsb - gap) at the best point.
  double margin = 0.0;
  std::size_t points_tested = 0;
  std::size_t points_admissible = 0;
};

/// Enumerates the simplex grid {w : w_m = k_m / resolution, sum = 1} over the
/// layers' NLEVecs and keeps the admissible point with the largest margin.
[[nodiscard]] SimplexSearchResult search_combination_simplex(std::span<const CouplingMatrix> layers,
                                                             std::size_t resolution);

[[nodiscard]] SyncAnalysis sync_critical_c(double lipschitz, std::span<const Layer> layers,
                                           const WeightVector& theta);

[[nodiscard]] ControlAnalysis control_critical_c(double lipschitz,
                                                 std::span<const PinnedLayer> layers,
                                                 const WeightVector& theta);

}  // namespace syncnet
