#pragma once

// Flat-file formats: matrix text, trajectory CSV, shortest round-trip numbers.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "syncnet/dynamics.hpp"
#include "syncnet/linalg.hpp"

namespace syncnet::io {

/// One matrix row per line; entries separated by whitespace and/or commas;
/// '#' starts a comment; blank lines are skipped. Throws Parse.
[[nodiscard]] DenseMatrix parse_matrix_text(std::string_view text);
[[nodiscard]] DenseMatrix read_matrix_file(const std::filesystem::path& path);

/// Comma/whitespace separated list of decimals, e.g. "0.25,0.25,0.5".
[[nodiscard]] Vector parse_number_list(std::string_view text);

/// Shortest decimal that parses back to the same double.
[[nodiscard]] std::string format_double(double v);

/// Columns t, z{i}_{k} (1-based), V, c, then target_{k} when pinned.
[[nodiscard]] std::string trajectory_csv_header(const Trajectory& traj);
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace syncnet::io
