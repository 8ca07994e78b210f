#pragma once

// Command implementations behind the `syncnet` executable. Each command
// returns data; `run` owns argument parsing, file output and exit codes.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "syncnet/config.hpp"
#include "syncnet/dynamics.hpp"
#include "syncnet/error.hpp"
#include "syncnet/linalg.hpp"
#include "syncnet/report.hpp"

namespace syncnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitConnectivity = 3;
inline constexpr int kExitDiverged = 4;

[[nodiscard]] int exit_code_for(ErrorKind kind) noexcept;

struct AnalysisOptions {
  std::optional<Vector> theta;
  std::optional<double> lipschitz;
  std::optional<double> coupling_strength;
  /// Inner-matrix diagonals, one per layer; a single entry applies to all.
  std::vector<Vector> gammas;
};

[[nodiscard]] AnalysisReport cmd_analyze(const DenseMatrix& g, const AnalysisOptions& opts);
[[nodiscard]] AnalysisReport cmd_combine(const DenseMatrix& g1, const DenseMatrix& g2,
                                         const AnalysisOptions& opts);
/// gains: one vector per layer, or a single vector applied to every layer.
[[nodiscard]] AnalysisReport cmd_control(const std::vector<DenseMatrix>& layers,
                                         const std::vector<Vector>& gains,
                                         const AnalysisOptions& opts);
/// Per-layer admissibility of --theta, or a simplex grid search over the
/// layers' NLEVec combinations when no theta is given.
[[nodiscard]] AnalysisReport cmd_check(const std::vector<DenseMatrix>& layers,
                                       const AnalysisOptions& opts, std::size_t grid);

struct SimulationRun {
  AnalysisReport report;
  std::optional<Trajectory> trajectory;
  int exit_code = kExitOk;
};

[[nodiscard]] SimulationRun cmd_simulate(const RunConfig& cfg);

struct ConjectureRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string scenario;
  /// "ok", "diverged" or "error".
  std::string status;
  std::optional<double> final_lyapunov;
  std::optional<double> time_to_threshold;
  std::string theta_source;
  std::string detail;
};

/// For each of `trials` seeds (cfg.seed, cfg.seed + 1, ...) runs layer 1
/// alone, layer 2 alone and both layers. Rows are ordered by (trial,
/// scenario) whatever the worker count.
[[nodiscard]] std::vector<ConjectureRow> cmd_conjecture(const RunConfig& cfg, std::size_t trials,
                                                        std::size_t workers);
[[nodiscard]] std::string conjecture_csv(const std::vector<ConjectureRow>& rows);

/// SYNCNET_WORKERS when set to a positive integer, else hardware concurrency.
[[nodiscard]] std::size_t default_workers();

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace syncnet::cli
