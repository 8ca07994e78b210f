#pragma once

// JSON run configuration for `syncnet simulate` and `syncnet conjecture`.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "syncnet/dynamics.hpp"
#include "syncnet/linalg.hpp"
#include "syncnet/spectral.hpp"

namespace syncnet {

struct LayerConfig {
  DenseMatrix matrix;
  /// Empty means all ones of the model dimension.
  Vector gamma;
};

struct PinningConfig {
  /// Per layer, one gain per node.
  std::vector<Vector> gains;
  std::optional<Vector> target_init;
};

struct RunConfig {
  int schema_version = 1;
  std::vector<LayerConfig> layers;
  CouplingRule coupling = FixedCoupling{};
  NodeModel model = NodeModel::lorenz();
  std::optional<PinningConfig> pinning;
  /// nullopt means "auto".
  std::optional<Vector> theta;
  IntegratorOptions integrator;
  std::uint64_t seed = 1;
  /// nullopt means "random".
  std::optional<DenseMatrix> init;
  std::optional<double> lipschitz;
  double threshold = 1e-6;
  std::optional<std::string> out;
};

/// Matrix paths are resolved relative to base_dir. Throws Parse / InvalidArgument.
[[nodiscard]] RunConfig parse_run_config(const std::string& json_text,
                                         const std::filesystem::path& base_dir);
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);

/// Validates the selected layers (all when empty) into a NetworkSpec. The
/// pinning target defaults to the draw following the node states in the
/// seeded stream.
[[nodiscard]] NetworkSpec build_network(const RunConfig& cfg,
                                        const std::vector<std::size_t>& layer_subset = {});

/// Node initial states: explicit block or seeded draw on [-5, 5).
[[nodiscard]] DenseMatrix initial_states(const RunConfig& cfg, std::uint64_t seed);

struct ResolvedTheta {
  WeightVector theta;
  std::string source;
  std::vector<std::string> notes;
};

/// Explicit theta (normalized) or the automatic policy: single layer uses its
/// NLEVec; two layers use the midpoint of the feasible mu (nu when pinned)
/// interval; more layers use the best point of a simplex grid search.
/// Throws InvalidArgument when auto has no admissible choice.
[[nodiscard]] ResolvedTheta resolve_theta(const RunConfig& cfg, const NetworkSpec& spec);

}  // namespace syncnet
