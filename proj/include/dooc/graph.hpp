#pragma once

#include <vector>

#include "dooc/linalg.hpp"

namespace dooc {

/// Weighted digraph. weight(i, j) > 0 means agent i receives information
/// from agent j, i.e. the edge j -> i. Self-loops are rejected.
class Digraph {
 public:
  struct Edge {
    int from;  // 0-based
    int to;
    double weight;
  };

  explicit Digraph(int n);
  Digraph(int n, const std::vector<Edge>& edges);
  static Digraph from_adjacency(const MatrixXd& adjacency);

  int size() const { return static_cast<int>(adj_.rows()); }
  double weight(int receiver, int sender) const { return adj_(receiver, sender); }
  const MatrixXd& adjacency() const { return adj_; }

  /// Edges in ascending (to, from) order.
  std::vector<Edge> edges() const;

  void add_edge(int from, int to, double weight);

 private:
  MatrixXd adj_;
};

struct LaplacianSpectrum {
  MatrixXd laplacian;    // D_in - A
  MatrixXd sym;          // (L + L^T) / 2
  VectorXd eigenvalues;  // of sym, ascending

  double lambda2() const { return eigenvalues.size() > 1 ? eigenvalues(1) : 0.0; }
  double lambda_max() const { return eigenvalues(eigenvalues.size() - 1); }
};

MatrixXd laplacian_matrix(const Digraph& g);

LaplacianSpectrum laplacian(const Digraph& g);

bool is_strongly_connected(const Digraph& g);

inline constexpr double kBalanceTolerance = 1e-9;

bool is_weight_balanced(const Digraph& g, double tol = kBalanceTolerance);

/// Preset topologies used by the built-in scenarios and tests.
namespace graphs {
/// 1 -> 2 -> ... -> n -> 1 with unit weights.
Digraph directed_cycle(int n);
Digraph complete(int n);
}  // namespace graphs

}  // namespace dooc
