#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dooc {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

/// Raised for contract violations and numerical failures. Verdicts (a graph
/// that is not balanced, a plant that is not minimum phase) are returned as
/// values instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SymmetricEigen {
  VectorXd values;   // ascending
  MatrixXd vectors;  // column k pairs with values(k)
  int sweeps = 0;
};

/// Cyclic Jacobi rotations for a symmetric matrix. Iterates until the
/// Frobenius norm of the off-diagonal part drops below `tol`.
SymmetricEigen jacobi_eigen(const MatrixXd& sym, double tol = 1e-12,
                            int max_sweeps = 100);

/// Coefficients of a real polynomial, lowest degree first.
using Poly = std::vector<double>;

struct CharPoly {
  Poly coeffs;                  // det(sI - A), ascending, leading 1
  std::vector<MatrixXd> adj;    // adj(sI - A) = sum_k adj[k] s^(n-1-k)
};

/// Faddeev-LeVerrier recursion: characteristic polynomial and the matrix
/// coefficients of the adjugate of (sI - A).
CharPoly faddeev_leverrier(const MatrixXd& a);

struct RootResult {
  std::vector<std::complex<double>> roots;
  double residual = 0.0;  // max |p(root)| / scale
  int iterations = 0;
};

/// Durand-Kerner (Weierstrass) simultaneous iteration. The polynomial is
/// made monic internally; throws Error if it fails to converge.
RootResult durand_kerner(const Poly& ascending, double tol = 1e-10,
                         int max_iter = 500);

/// Strip leading (highest-degree) coefficients with |c| <= tol.
Poly trim_leading(Poly p, double tol);

std::complex<double> poly_eval(const Poly& ascending, std::complex<double> s);

/// Largest absolute entry.
double max_abs(const MatrixXd& m);

}  // namespace dooc
