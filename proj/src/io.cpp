#include "syncnet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "syncnet/error.hpp"

namespace syncnet::io {

namespace {

bool is_separator(char ch) noexcept {
  return ch == ',' || ch == ' ' || ch == '\t' || ch == '\r' || ch == ';';
}

double parse_token(std::string_view token, std::size_t line) {
  double value = 0.0;
  std::string_view body = token;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc{} || ptr != body.data() + body.size() || !std::isfinite(value)) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": '" + std::string(token) +
                                      "' is not a finite decimal number");
  }
  return value;
}

std::vector<double> parse_line(std::string_view line, std::size_t line_no) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && is_separator(line[pos])) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !is_separator(line[end])) ++end;
    values.push_back(parse_token(line.substr(pos, end - pos), line_no));
    pos = end;
  }
  return values;
}

}  // namespace

DenseMatrix parse_matrix_text(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto values = parse_line(line, line_no);
    if (!values.empty()) {
      if (!rows.empty() && values.size() != rows.front().size()) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + " has " +
                                          std::to_string(values.size()) + " entries, expected " +
                                          std::to_string(rows.front().size()));
      }
      rows.push_back(std::move(values));
    }
    start = end + 1;
  }
  if (rows.empty()) throw Error(ErrorKind::Parse, "matrix text contains no rows");
  return DenseMatrix::from_rows(rows);
}

DenseMatrix read_matrix_file(const std::filesystem::path& path) {
  try {
    return parse_matrix_text(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

Vector parse_number_list(std::string_view text) {
  auto values = parse_line(text, 1);
  if (values.empty()) throw Error(ErrorKind::Parse, "empty number list");
  return values;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string trajectory_csv_header(const Trajectory& traj) {
  std::string h = "t";
  for (std::size_t i = 0; i < traj.nodes; ++i) {
    for (std::size_t k = 0; k < traj.dim; ++k) {
      h += ",z" + std::to_string(i + 1) + "_" + std::to_string(k + 1);
    }
  }
  h += ",V,c";
  if (traj.pinned) {
    for (std::size_t k = 0; k < traj.dim; ++k) h += ",target_" + std::to_string(k + 1);
  }
  return h;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << trajectory_csv_header(traj) << '\n';
  std::string line;
  for (std::size_t r = 0; r < traj.size(); ++r) {
    line = format_double(traj.times[r]);
    for (double v : traj.states[r]) {
      line += ',';
      line += format_double(v);
    }
    line += ',';
    line += format_double(traj.lyapunov[r]);
    line += ',';
    line += format_double(traj.coupling[r]);
    if (traj.pinned) {
      for (double v : traj.target[r]) {
        line += ',';
        line += format_double(v);
      }
    }
    os << line << '\n';
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::InvalidArgument, "write failed for " + path.string());
}

}  // namespace syncnet::io
