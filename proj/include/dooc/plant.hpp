#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "dooc/linalg.hpp"

namespace dooc {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// System matrices at one parameter point. `disturbance` is a constant term
/// added to the state derivative (zero when the plant has none).
struct PlantMatrices {
  MatrixXd A;
  VectorXd B;
  RowVectorXd C;
  VectorXd disturbance;
  bool within_box = true;

  int n() const { return static_cast<int>(A.rows()); }
};

/// SISO plant affine in the uncertain parameter w over a box W:
///   A(w) = A0 + sum_k w_k A_k, and likewise for B and C.
struct AffinePlant {
  MatrixXd A0;
  VectorXd B0;
  RowVectorXd C0;
  std::vector<MatrixXd> dA;
  std::vector<VectorXd> dB;
  std::vector<RowVectorXd> dC;
  std::vector<Interval> box;
  VectorXd disturbance;  // empty means none

  int n() const { return static_cast<int>(A0.rows()); }
  int n_w() const { return static_cast<int>(box.size()); }

  /// Throws Error on inconsistent dimensions or a box that excludes 0.
  void validate() const;
  bool in_box(const VectorXd& w) const;
  /// Parameter-free plant with a one-dimensional trivial box.
  static AffinePlant fixed(MatrixXd a, VectorXd b, RowVectorXd c);
};

PlantMatrices materialize(const AffinePlant& p, const VectorXd& w);

inline constexpr double kRelativeDegreeTolerance = 1e-8;

struct RelativeDegree {
  int m = 0;
  double b1 = 0.0;  // C A^(m-1) B
};

/// Smallest r with |C A^(r-1) B| > tol. Throws if none up to n.
RelativeDegree relative_degree(const MatrixXd& A, const VectorXd& B,
                               const RowVectorXd& C,
                               double tol = kRelativeDegreeTolerance);

/// Numerator of C (sI - A)^-1 B, ascending, truncated to degree n - m.
Poly transfer_numerator(const MatrixXd& A, const VectorXd& B,
                        const RowVectorXd& C,
                        double tol = kRelativeDegreeTolerance);

std::vector<std::complex<double>> transmission_zeros(
    const MatrixXd& A, const VectorXd& B, const RowVectorXd& C,
    double tol = kRelativeDegreeTolerance);

struct PlantAnalysis {
  int m = 0;
  double b1 = 0.0;
  std::vector<std::complex<double>> zeros;
  bool minimum_phase = false;
};

PlantAnalysis analyze_plant(const PlantMatrices& pm,
                            double tol = kRelativeDegreeTolerance);

/// Parameter samples over the box.
namespace grid {
std::vector<VectorXd> corners(const std::vector<Interval>& box);
std::vector<VectorXd> corners_and_center(const std::vector<Interval>& box);
/// Uniform tensor grid with `per_axis` points per axis (>= 2, includes the
/// corners).
std::vector<VectorXd> uniform(const std::vector<Interval>& box, int per_axis);
}  // namespace grid

struct Assumption3Sample {
  VectorXd w;
  int m = 0;
  double b1 = 0.0;
  double max_zero_real = 0.0;  // -inf when there are no zeros
  bool ok = false;
  std::string reason;
};

struct Assumption3Report {
  int nominal_m = 0;
  std::vector<Assumption3Sample> samples;
  bool passed() const;
  std::vector<Assumption3Sample> violators() const;
};

/// At every sample: relative degree equals the nominal one, b1 > 0 and the
/// zeros lie in the open left half plane.
Assumption3Report check_assumption3(const AffinePlant& p,
                                    const std::vector<VectorXd>& samples,
                                    double tol = kRelativeDegreeTolerance);

/// Coordinates zeta = T x = (x0, xi_1..xi_m) with xi_r = y^(r-1) in which
///   x0'   = A0z x0 + b0z y
///   xi_r' = xi_{r+1}                       (r < m)
///   xi_m' = A1z x0 + A2z xi + b1 u
struct NormalForm {
  int m = 0;
  MatrixXd T;
  MatrixXd A0z;     // (n-m) x (n-m)
  VectorXd b0z;     // n-m
  RowVectorXd A1z;  // 1 x (n-m)
  RowVectorXd A2z;  // 1 x m
  double b1 = 0.0;
  double condition = 0.0;  // 2-norm condition number of T

  /// Rebuild (A, B, C) from the blocks and T.
  PlantMatrices reconstruct() const;
};

NormalForm normal_form(const MatrixXd& A, const VectorXd& B,
                       const RowVectorXd& C,
                       double tol = kRelativeDegreeTolerance);

}  // namespace dooc
