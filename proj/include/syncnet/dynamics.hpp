#pragma once

// Coupled-oscillator network simulation: plain multi-layer coupling, pinning
// toward a co-integrated reference trajectory, and adaptive coupling strength.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "syncnet/linalg.hpp"
#include "syncnet/spectral.hpp"

namespace syncnet {

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
};

/// x' = A x
struct LinearTestParams {
  DenseMatrix a;
};

class NodeModel {
 public:
  static NodeModel lorenz(LorenzParams params = {});
  /// Throws InvalidArgument unless A is square.
  static NodeModel linear_test(DenseMatrix a);

  [[nodiscard]] std::size_t dim() const noexcept;
  [[nodiscard]] std::string_view kind() const noexcept;
  [[nodiscard]] const std::variant<LorenzParams, LinearTestParams>& params() const noexcept {
    return params_;
  }
  /// lambda_max((A + A^T)/2) for linear models; nullopt for Lorenz.
  [[nodiscard]] std::optional<double> exact_lipschitz() const;

  /// Unchecked evaluation into out; x and out have dim() entries.
  void evaluate(std::span<const double> x, std::span<double> out) const noexcept;

 private:
  explicit NodeModel(std::variant<LorenzParams, LinearTestParams> p) : params_(std::move(p)) {}
  std::variant<LorenzParams, LinearTestParams> params_;
};

/// Throws NonFiniteState when x has a non-finite entry or wrong size.
[[nodiscard]] Vector model_rhs(const NodeModel& model, std::span<const double> x);

struct FixedCoupling {
  double c = 1.0;
};

/// c' = beta * V (or beta * W when pinned), c(0) = c0.
struct AdaptiveCoupling {
  double beta = 1.0;
  double c0 = 0.0;
};

using CouplingRule = std::variant<FixedCoupling, AdaptiveCoupling>;

struct Pinning {
  /// Per layer, N nonnegative gains (the classic setup pins node 1 only).
  std::vector<Vector> gains;
  Vector target_init;
};

struct NetworkSpec {
  std::vector<Layer> layers;
  CouplingRule coupling = FixedCoupling{};
  NodeModel model = NodeModel::lorenz();
  std::optional<Pinning> pinning;

  [[nodiscard]] std::size_t n_nodes() const noexcept {
    return layers.empty() ? 0 : layers.front().coupling.n();
  }
  [[nodiscard]] std::size_t dim() const noexcept { return model.dim(); }
};

/// Throws InvalidArgument / NotStronglyConnected / AllGainsZero on a bad spec.
void validate_network(const NetworkSpec& spec);

/// Row-major N x dim node states.
struct StateView {
  std::span<const double> data;
  std::size_t nodes = 0;
  std::size_t dim = 0;

  StateView(std::span<const double> d, std::size_t n, std::size_t k) : data(d), nodes(n), dim(k) {}
  StateView(const DenseMatrix& m) : data(m.data()), nodes(m.rows()), dim(m.cols()) {}  // NOLINT

  [[nodiscard]] std::span<const double> node(std::size_t i) const noexcept {
    return data.subspan(i * dim, dim);
  }
};

/// sum_i theta_i z_i
[[nodiscard]] Vector dummy_target(const WeightVector& theta, StateView states);

/// 1/2 sum_i theta_i |z_i - zbar|^2
[[nodiscard]] double lyapunov_V(const WeightVector& theta, StateView states);

/// 1/2 sum_i theta_i |z_i - target|^2
[[nodiscard]] double lyapunov_W(const WeightVector& theta, StateView states,
                                std::span<const double> target);

/// beta * V, or beta * W when a target is given.
[[nodiscard]] double adaptive_gain_rhs(double beta, const WeightVector& theta, StateView states,
                                       std::optional<std::span<const double>> target = {});

/// Node derivatives z_i' = h(z_i) + c sum_m sum_j G^m_ij Gamma^m z_j, minus
/// c sum_m d^m_i Gamma^m (z_i - target) when pinning is configured (target
/// must then be provided). Throws NonFiniteState on non-finite input or any
/// component beyond 1e9 in magnitude.
void network_rhs(const NetworkSpec& spec, double t, StateView states, double c,
                 std::optional<std::span<const double>> target, std::span<double> out);

[[nodiscard]] Vector network_rhs(const NetworkSpec& spec, double t, StateView states, double c,
                                 std::optional<std::span<const double>> target = {});

using RhsFunction = std::function<void(double, std::span<const double>, std::span<double>)>;

/// Reusable stage storage for rk4_step.
class Rk4Workspace {
 public:
  explicit Rk4Workspace(std::size_t n) : k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

  /// One classical RK4 step from (t, y) into out. Throws InvalidArgument for
  /// dt <= 0 and NonFiniteState when the result is not finite.
  void step(const RhsFunction& f, double t, std::span<const double> y, double dt,
            std::span<double> out);

 private:
  Vector k1_, k2_, k3_, k4_, tmp_;
};

[[nodiscard]] Vector rk4_step(const RhsFunction& f, double t, std::span<const double> y, double dt);

struct IntegratorOptions {
  double dt = 1e-3;
  double t_end = 10.0;
  std::size_t record_every = 10;
};

/// Number of integration steps: floor(t_end / dt), tolerant to rounding.
[[nodiscard]] std::size_t step_count(const IntegratorOptions& opts) noexcept;

struct Trajectory {
  std::size_t nodes = 0;
  std::size_t dim = 0;
  bool pinned = false;
  Vector times;
  /// Flattened N x dim block per recorded time.
  std::vector<Vector> states;
  /// V(t) for plain coupling, W(t) when pinned.
  Vector lyapunov;
  Vector coupling;
  /// Reference state per recorded time; empty unless pinned.
  std::vector<Vector> target;

  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
};

/// Integrates the augmented system [node states | target | c] with RK4.
/// theta is used only for the recorded Lyapunov error and the adaptive rule.
/// Throws DivergedError when the divergence guard trips.
[[nodiscard]] Trajectory simulate(const NetworkSpec& spec, const WeightVector& theta,
                                  const DenseMatrix& init, const IntegratorOptions& opts);

/// First recorded time with lyapunov <= threshold.
[[nodiscard]] std::optional<double> time_to_threshold(const Trajectory& traj, double threshold);

/// States drawn uniformly from [lo, hi): std::mt19937_64 seeded with `seed`,
/// each draw u = (x >> 11) * 2^-53, value = lo + (hi - lo) * u, node-major.
[[nodiscard]] DenseMatrix random_initial_states(std::uint64_t seed, std::size_t nodes,
                                                std::size_t dim, double lo = -5.0,
                                                double hi = 5.0);

}  // namespace syncnet
