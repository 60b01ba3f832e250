#include "dooc/plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dooc {

void AffinePlant::validate() const {
  const Eigen::Index n = A0.rows();
  if (n < 1 || A0.cols() != n) throw Error("plant: A0 must be square and nonempty");
  if (B0.size() != n) throw Error("plant: B0 has wrong length");
  if (C0.size() != n) throw Error("plant: C0 has wrong length");
  const size_t nw = box.size();
  if (dA.size() != nw || dB.size() != nw || dC.size() != nw) {
    throw Error("plant: need one deviation triple per box interval");
  }
  for (size_t k = 0; k < nw; ++k) {
    if (dA[k].rows() != n || dA[k].cols() != n || dB[k].size() != n ||
        dC[k].size() != n) {
      throw Error("plant: deviation " + std::to_string(k + 1) +
                  " has wrong dimensions");
    }
    if (!(box[k].lo <= 0.0 && 0.0 <= box[k].hi)) {
      throw Error("plant: box must contain the origin (parameter " +
                  std::to_string(k + 1) + ")");
    }
  }
  if (disturbance.size() != 0 && disturbance.size() != n) {
    throw Error("plant: disturbance has wrong length");
  }
}

bool AffinePlant::in_box(const VectorXd& w) const {
  if (w.size() != n_w()) return false;
  for (int k = 0; k < n_w(); ++k) {
    if (w(k) < box[k].lo || w(k) > box[k].hi) return false;
  }
  return true;
}

AffinePlant AffinePlant::fixed(MatrixXd a, VectorXd b, RowVectorXd c) {
  const Eigen::Index n = a.rows();
  AffinePlant p;
  p.A0 = std::move(a);
  p.B0 = std::move(b);
  p.C0 = std::move(c);
  p.dA = {MatrixXd::Zero(n, n)};
  p.dB = {VectorXd::Zero(n)};
  p.dC = {RowVectorXd::Zero(n)};
  p.box = {{0.0, 0.0}};
  return p;
}

PlantMatrices materialize(const AffinePlant& p, const VectorXd& w) {
  if (w.size() != p.n_w()) {
    throw Error("materialize: parameter vector has length " +
                std::to_string(w.size()) + ", plant expects " +
                std::to_string(p.n_w()));
  }
  PlantMatrices out;
  out.A = p.A0;
  out.B = p.B0;
  out.C = p.C0;
  for (int k = 0; k < p.n_w(); ++k) {
    out.A += w(k) * p.dA[k];
    out.B += w(k) * p.dB[k];
    out.C += w(k) * p.dC[k];
  }
  out.disturbance =
      p.disturbance.size() ? p.disturbance : VectorXd::Zero(p.n());
  out.within_box = p.in_box(w);
  return out;
}

RelativeDegree relative_degree(const MatrixXd& A, const VectorXd& B,
                               const RowVectorXd& C, double tol) {
  if (!(tol > 0.0)) throw Error("relative_degree: tol must be positive");
  RowVectorXd row = C;  // C A^(r-1)
  for (int r = 1; r <= A.rows(); ++r) {
    const double markov = row.dot(B);
    if (std::abs(markov) > tol) return {r, markov};
    row = row * A;
  }
  throw Error("relative_degree: no relative degree <= n (all Markov "
              "parameters below tolerance)");
}

Poly transfer_numerator(const MatrixXd& A, const VectorXd& B,
                        const RowVectorXd& C, double tol) {
  const int n = static_cast<int>(A.rows());
  const int m = relative_degree(A, B, C, tol).m;
  const CharPoly cp = faddeev_leverrier(A);
  // C adj(sI - A) B = sum_k (C adj[k] B) s^(n-1-k)
  Poly num(static_cast<size_t>(n - m) + 1, 0.0);
  for (int k = 0; k < n; ++k) {
    const int power = n - 1 - k;
    if (power <= n - m) num[static_cast<size_t>(power)] = C * cp.adj[k] * B;
  }
  return num;
}

std::vector<std::complex<double>> transmission_zeros(const MatrixXd& A,
                                                     const VectorXd& B,
                                                     const RowVectorXd& C,
                                                     double tol) {
  const Poly num = transfer_numerator(A, B, C, tol);
  if (num.size() <= 1) return {};
  return durand_kerner(num, 1e-10, 500).roots;
}

PlantAnalysis analyze_plant(const PlantMatrices& pm, double tol) {
  PlantAnalysis out;
  const auto rd = relative_degree(pm.A, pm.B, pm.C, tol);
  out.m = rd.m;
  out.b1 = rd.b1;
  out.zeros = transmission_zeros(pm.A, pm.B, pm.C, tol);
  out.minimum_phase = std::all_of(out.zeros.begin(), out.zeros.end(),
                                  [](const auto& z) { return z.real() < 0.0; });
  return out;
}

namespace grid {

std::vector<VectorXd> uniform(const std::vector<Interval>& box, int per_axis) {
  if (per_axis < 2) throw Error("grid: need at least 2 points per axis");
  const int nw = static_cast<int>(box.size());
  std::vector<VectorXd> out;
  std::vector<int> idx(static_cast<size_t>(nw), 0);
  while (true) {
    VectorXd w(nw);
    for (int k = 0; k < nw; ++k) {
      w(k) = box[k].lo + (box[k].hi - box[k].lo) * idx[k] / (per_axis - 1);
    }
    out.push_back(w);
    int k = 0;
    while (k < nw && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == nw) break;
  }
  // Degenerate axes produce duplicates.
  std::vector<VectorXd> unique;
  for (const auto& w : out) {
    if (std::none_of(unique.begin(), unique.end(),
                     [&](const VectorXd& u) { return u == w; })) {
      unique.push_back(w);
    }
  }
  return unique;
}

std::vector<VectorXd> corners(const std::vector<Interval>& box) {
  return uniform(box, 2);
}

std::vector<VectorXd> corners_and_center(const std::vector<Interval>& box) {
  auto out = corners(box);
  VectorXd center(static_cast<Eigen::Index>(box.size()));
  for (size_t k = 0; k < box.size(); ++k) {
    center(static_cast<Eigen::Index>(k)) = 0.5 * (box[k].lo + box[k].hi);
  }
  if (std::none_of(out.begin(), out.end(),
                   [&](const VectorXd& u) { return u == center; })) {
    out.push_back(center);
  }
  return out;
}

}  // namespace grid

bool Assumption3Report::passed() const {
  return nominal_m > 0 &&
         std::all_of(samples.begin(), samples.end(),
                     [](const auto& s) { return s.ok; });
}

std::vector<Assumption3Sample> Assumption3Report::violators() const {
  std::vector<Assumption3Sample> out;
  for (const auto& s : samples) {
    if (!s.ok) out.push_back(s);
  }
  return out;
}

Assumption3Report check_assumption3(const AffinePlant& p,
                                    const std::vector<VectorXd>& samples,
                                    double tol) {
  p.validate();
  Assumption3Report report;
  const auto nominal = materialize(p, VectorXd::Zero(p.n_w()));
  report.nominal_m = relative_degree(nominal.A, nominal.B, nominal.C, tol).m;
  for (const auto& w : samples) {
    Assumption3Sample s;
    s.w = w;
    s.max_zero_real = -std::numeric_limits<double>::infinity();
    try {
      const auto a = analyze_plant(materialize(p, w), tol);
      s.m = a.m;
      s.b1 = a.b1;
      for (const auto& z : a.zeros) s.max_zero_real = std::max(s.max_zero_real, z.real());
      if (a.m != report.nominal_m) {
        s.reason = "relative degree " + std::to_string(a.m) + " != nominal " +
                   std::to_string(report.nominal_m);
      } else if (!(a.b1 > 0.0)) {
        s.reason = "high-frequency gain b1 = " + std::to_string(a.b1) + " <= 0";
      } else if (!a.minimum_phase) {
        s.reason = "zero with real part " + std::to_string(s.max_zero_real) +
                   " >= 0";
      } else {
        s.ok = true;
      }
    } catch (const Error& e) {
      s.reason = e.what();
    }
    report.samples.push_back(std::move(s));
  }
  return report;
}

NormalForm normal_form(const MatrixXd& A, const VectorXd& B,
                       const RowVectorXd& C, double tol) {
  const int n = static_cast<int>(A.rows());
  const auto rd = relative_degree(A, B, C, tol);
  const int m = rd.m;
  const int nz = n - m;

  // Output-derivative rows C A^(r-1), r = 1..m.
  MatrixXd out_rows(m, n);
  RowVectorXd row = C;
  for (int r = 0; r < m; ++r) {
    out_rows.row(r) = row;
    row = row * A;
  }

  NormalForm nf;
  nf.m = m;
  nf.b1 = rd.b1;
  MatrixXd zero_rows(nz, n);
  if (nz > 0) {
    // Orthonormal basis of the complement of span{B, C^T, ..., (C A^(m-2))^T}.
    // Those rows annihilate B, so the input enters only through xi_m.
    MatrixXd span(n, m);
    span.col(0) = B;
    for (int r = 0; r + 1 < m; ++r) span.col(r + 1) = out_rows.row(r).transpose();
    Eigen::HouseholderQR<MatrixXd> qr(span);
    const MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, n);
    zero_rows = q.rightCols(nz).transpose();

    // The orthonormal choice generally lets every xi_r drive x0. Shear
    // x0 <- x0 - sum_{j<m} M_j xi_j so only xi_1 = y remains.
    MatrixXd t(n, n);
    t << zero_rows, out_rows;
    const MatrixXd abar = t * A * t.inverse();
    const MatrixXd f = abar.topLeftCorner(nz, nz);
    const MatrixXd g = abar.topRightCorner(nz, m);
    std::vector<VectorXd> shear(static_cast<size_t>(m), VectorXd::Zero(nz));
    // M_{j-1} = F M_j + G_j, M_m = 0, for j = m..2 (1-based).
    for (int j = m; j >= 2; --j) {
      const VectorXd next = (j == m) ? VectorXd::Zero(nz) : shear[j - 1];
      shear[j - 2] = f * next + g.col(j - 1);
    }
    for (int j = 1; j < m; ++j) {
      zero_rows -= shear[j - 1] * out_rows.row(j - 1);
    }
  }

  nf.T.resize(n, n);
  if (nz > 0) nf.T << zero_rows, out_rows;
  else nf.T = out_rows;
  Eigen::JacobiSVD<MatrixXd> svd(nf.T);
  const auto& sv = svd.singularValues();
  nf.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                         : std::numeric_limits<double>::infinity();
  if (!std::isfinite(nf.condition) || nf.condition > 1e12) {
    throw Error("normal_form: transformation is singular (relative-degree "
                "tolerance too loose?)");
  }
  const MatrixXd abar = nf.T * A * nf.T.inverse();
  nf.A0z = abar.topLeftCorner(nz, nz);
  nf.b0z = nz > 0 ? VectorXd(abar.block(0, nz, nz, 1)) : VectorXd();
  nf.A1z = abar.block(n - 1, 0, 1, nz);
  nf.A2z = abar.block(n - 1, nz, 1, m);
  return nf;
}

PlantMatrices NormalForm::reconstruct() const {
  const int n = static_cast<int>(T.rows());
  const int nz = n - m;
  MatrixXd abar = MatrixXd::Zero(n, n);
  if (nz > 0) {
    abar.topLeftCorner(nz, nz) = A0z;
    abar.block(0, nz, nz, 1) = b0z;
  }
  for (int r = 0; r + 1 < m; ++r) abar(nz + r, nz + r + 1) = 1.0;
  abar.block(n - 1, 0, 1, nz) = A1z;
  abar.block(n - 1, nz, 1, m) = A2z;
  VectorXd bbar = VectorXd::Zero(n);
  bbar(n - 1) = b1;
  RowVectorXd cbar = RowVectorXd::Zero(n);
  cbar(nz) = 1.0;

  const MatrixXd tinv = T.inverse();
  PlantMatrices out;
  out.A = tinv * abar * T;
  out.B = tinv * bbar;
  out.C = cbar * T;
  out.disturbance = VectorXd::Zero(n);
  return out;
}

}  // namespace dooc
