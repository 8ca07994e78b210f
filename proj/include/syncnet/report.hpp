#pragma once

// Serialized analysis report shared by every CLI command.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace syncnet {

struct IntervalReport {
  /// "mu" for synchronization, "nu" for pinning control.
  std::string kind;
  bool empty = true;
  std::optional<double> lower;
  std::optional<double> upper;
  friend bool operator==(const IntervalReport&, const IntervalReport&) = default;
};

/// `holds` is always `lhs relation rhs` for relation "<" or "<=".
struct HypothesisReport {
  std::string name;
  double lhs = 0.0;
  std::string relation;
  double rhs = 0.0;
  bool holds = false;

  [[nodiscard]] bool recompute() const noexcept {
    return relation == "<" ? lhs < rhs : lhs <= rhs;
  }
  friend bool operator==(const HypothesisReport&, const HypothesisReport&) = default;
};

[[nodiscard]] HypothesisReport make_hypothesis(std::string name, double lhs, std::string relation,
                                               double rhs);

struct LayerReport {
  std::vector<double> nlevec;
  /// Full descending spectrum of G_xi.
  std::vector<double> spectrum_xi;
  double lambda2_xi = 0.0;
  double adsb = 0.0;
  double one_norm = 0.0;
  std::optional<double> gamma_min;
  std::optional<std::vector<double>> spectrum_theta;
  std::optional<double> lambda2_theta;
  std::optional<double> theta_gap;
  std::optional<bool> admissible;
  // Pinned layers only.
  std::optional<std::vector<double>> gains;
  std::optional<double> lambda_max_control_xi;
  std::optional<double> lambda_max_control_theta;
  std::optional<double> adcb;
  friend bool operator==(const LayerReport&, const LayerReport&) = default;
};

struct SimulationSummary {
  /// "V" (dummy-target error) or "W" (target error).
  std::string lyapunov_kind;
  std::string coupling_mode;
  std::uint64_t seed = 0;
  double dt = 0.0;
  double t_end = 0.0;
  std::uint64_t record_every = 1;
  std::uint64_t rows = 0;
  std::optional<double> final_lyapunov;
  std::optional<double> final_c;
  double threshold = 0.0;
  std::optional<double> time_to_threshold;
  std::optional<double> diverged_at;
  std::string kernel_isa;
  friend bool operator==(const SimulationSummary&, const SimulationSummary&) = default;
};

struct AnalysisReport {
  int schema_version = 1;
  std::string command;
  std::vector<LayerReport> layers;
  std::optional<double> chebyshev_gap;
  std::optional<IntervalReport> interval;
  std::optional<std::vector<double>> theta;
  std::optional<std::string> theta_source;
  std::optional<double> lipschitz;
  std::optional<double> coupling_strength;
  std::optional<double> spectral_norm;
  std::optional<double> max_theta;
  std::optional<double> weighted_lambda_sum;
  std::optional<double> critical_c;
  bool critical_c_infeasible = false;
  std::vector<HypothesisReport> hypotheses;
  std::vector<std::string> notes;
  std::optional<SimulationSummary> simulation;
  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

void to_json(nlohmann::json& j, const AnalysisReport& r);
void from_json(const nlohmann::json& j, AnalysisReport& r);

[[nodiscard]] std::string dump_report(const AnalysisReport& r);
[[nodiscard]] AnalysisReport parse_report(const std::string& text);

/// Throws InvalidArgument if any reported float is non-finite or a
/// hypothesis flag disagrees with its recorded inequality.
void check_report_consistency(const AnalysisReport& r);

}  // namespace syncnet
