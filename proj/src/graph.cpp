#include "syncnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "syncnet/error.hpp"

namespace syncnet {

CouplingMatrix validate_coupling(const DenseMatrix& m) {
  if (!m.is_square() || m.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument, "coupling matrix must be square and non-empty, got " +
                                                std::to_string(m.rows()) + "x" +
                                                std::to_string(m.cols()));
  }
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && m(i, j) < 0.0) {
        throw Error(ErrorKind::NotMetzler, "negative off-diagonal entry " +
                                               std::to_string(m(i, j)) + " at (" +
                                               std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
  const double tol = 1e-12 * matrix_one_norm(m);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (double v : m.row(i)) sum += v;
    if (std::abs(sum) > tol) {
      throw Error(ErrorKind::RowSumNonZero,
                  "row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
  }
  return CouplingMatrix(m);
}

std::vector<std::vector<std::size_t>> strongly_connected_components(const DenseMatrix& m) {
  const std::size_t n = m.rows();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;

  // Iterative Tarjan: each frame is (node, next neighbour to inspect).
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      bool descended = false;
      while (next < n) {
        const std::size_t w = next++;
        if (w == v || !(m(v, w) > 0.0)) continue;
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;

      const std::size_t done = v;
      if (low[done] == index[done]) {
        std::vector<std::size_t> comp;
        std::size_t w = 0;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != done);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
      frames.pop_back();
      if (!frames.empty()) {
        const std::size_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  return components;
}

bool is_strongly_connected(const CouplingMatrix& g) {
  return strongly_connected_components(g.matrix()).size() == 1;
}

PinnedMatrix build_pinned(const CouplingMatrix& g, std::span<const double> gains) {
  if (gains.size() != g.n()) {
    throw Error(ErrorKind::InvalidArgument, "expected " + std::to_string(g.n()) +
                                                " pinning gains, got " +
                                                std::to_string(gains.size()));
  }
  bool any_positive = false;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (!std::isfinite(gains[i]) || gains[i] < 0.0) {
      throw Error(ErrorKind::InvalidArgument,
                  "pinning gain " + std::to_string(i) + " must be finite and >= 0");
    }
    any_positive = any_positive || gains[i] > 0.0;
  }
  if (!any_positive) throw Error(ErrorKind::AllGainsZero, "at least one pinning gain must be > 0");

  DenseMatrix m = g.matrix();
  for (std::size_t i = 0; i < gains.size(); ++i) m(i, i) -= gains[i];
  return PinnedMatrix(g, Vector(gains.begin(), gains.end()), std::move(m));
}

}  // namespace syncnet
