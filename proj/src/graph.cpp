#include "dooc/graph.hpp"

#include <cmath>
#include <string>

namespace dooc {

Digraph::Digraph(int n) {
  if (n < 1) throw Error("Digraph: node count must be >= 1");
  adj_ = MatrixXd::Zero(n, n);
}

Digraph::Digraph(int n, const std::vector<Edge>& edges) : Digraph(n) {
  for (const auto& e : edges) add_edge(e.from, e.to, e.weight);
}

Digraph Digraph::from_adjacency(const MatrixXd& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw Error("Digraph: adjacency matrix must be square");
  }
  Digraph g(static_cast<int>(adjacency.rows()));
  for (int i = 0; i < g.size(); ++i) {
    for (int j = 0; j < g.size(); ++j) {
      if (adjacency(i, j) != 0.0) g.add_edge(j, i, adjacency(i, j));
    }
  }
  return g;
}

void Digraph::add_edge(int from, int to, double weight) {
  const int n = size();
  if (from < 0 || from >= n || to < 0 || to >= n) {
    throw Error("Digraph: edge " + std::to_string(from + 1) + "->" +
                std::to_string(to + 1) + " out of range");
  }
  if (from == to) throw Error("Digraph: self-loops are not allowed");
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw Error("Digraph: edge weights must be finite and nonnegative");
  }
  adj_(to, from) = weight;
}

std::vector<Digraph::Edge> Digraph::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j < size(); ++j) {
      if (adj_(i, j) > 0.0) out.push_back({j, i, adj_(i, j)});
    }
  }
  return out;
}

MatrixXd laplacian_matrix(const Digraph& g) {
  const MatrixXd& a = g.adjacency();
  MatrixXd l = -a;
  for (int i = 0; i < g.size(); ++i) {
    double in_degree = 0.0;
    for (int j = 0; j < g.size(); ++j) in_degree += a(i, j);
    l(i, i) = in_degree;
  }
  return l;
}

LaplacianSpectrum laplacian(const Digraph& g) {
  LaplacianSpectrum out;
  out.laplacian = laplacian_matrix(g);
  out.sym = 0.5 * (out.laplacian + out.laplacian.transpose());
  out.eigenvalues = jacobi_eigen(out.sym, 1e-12).values;
  return out;
}

namespace {

// Nodes reachable from `start`. `forward` follows information flow
// (sender -> receiver); otherwise edges are traversed backwards.
std::vector<bool> reach(const Digraph& g, int start, bool forward) {
  const int n = g.size();
  std::vector<bool> seen(static_cast<size_t>(n), false);
  std::vector<int> stack{start};
  seen[static_cast<size_t>(start)] = true;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      const double w = forward ? g.weight(v, u) : g.weight(u, v);
      if (w > 0.0 && !seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace

bool is_strongly_connected(const Digraph& g) {
  for (bool b : reach(g, 0, true)) {
    if (!b) return false;
  }
  for (bool b : reach(g, 0, false)) {
    if (!b) return false;
  }
  return true;
}

bool is_weight_balanced(const Digraph& g, double tol) {
  if (!(tol > 0.0)) throw Error("is_weight_balanced: tol must be positive");
  const MatrixXd& a = g.adjacency();
  for (int i = 0; i < g.size(); ++i) {
    const double in = a.row(i).sum();
    const double out = a.col(i).sum();
    if (std::abs(in - out) > tol) return false;
  }
  return true;
}

namespace graphs {

Digraph directed_cycle(int n) {
  Digraph g(n);
  if (n == 1) return g;
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n, 1.0);
  return g;
}

Digraph complete(int n) {
  Digraph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) g.add_edge(j, i, 1.0);
    }
  }
  return g;
}

}  // namespace graphs

}  // namespace dooc
