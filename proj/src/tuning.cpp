#include "dooc/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace dooc {

namespace {

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

bool is_hurwitz_matrix(const MatrixXd& a) {
  Eigen::EigenSolver<MatrixXd> es(a, false);
  if (es.info() != Eigen::Success) return false;
  return (es.eigenvalues().real().array() < 0.0).all();
}

}  // namespace

VectorXd stabilizer_gains(int m, double lambda0) {
  if (m < 1) throw Error("stabilizer_gains: m must be >= 1");
  if (!(lambda0 > 0.0)) throw Error("stabilizer_gains: lambda0 must be > 0");
  VectorXd k(m);
  for (int j = 1; j <= m; ++j) {
    k(j - 1) = binomial(m, j - 1) * std::pow(lambda0, m - j + 1);
  }
  return k;
}

bool hurwitz_check(const Poly& ascending) {
  const Poly p = trim_leading(ascending, 0.0);
  if (p.size() < 2) return false;
  if (!(p.back() > 0.0)) return false;
  const int degree = static_cast<int>(p.size()) - 1;
  const int width = degree / 2 + 1;
  // Routh array rows, descending powers.
  std::vector<double> top(static_cast<size_t>(width), 0.0);
  std::vector<double> bottom(static_cast<size_t>(width), 0.0);
  for (int i = 0; i <= degree; ++i) {
    const double c = p[static_cast<size_t>(degree - i)];
    (i % 2 == 0 ? top : bottom)[static_cast<size_t>(i / 2)] = c;
  }
  for (int row = 1; row <= degree; ++row) {
    const double pivot = bottom[0];
    if (!(pivot > 0.0)) return false;
    std::vector<double> next(static_cast<size_t>(width), 0.0);
    for (int j = 0; j + 1 < width; ++j) {
      next[j] = (pivot * top[j + 1] - top[0] * bottom[j + 1]) / pivot;
    }
    top = std::move(bottom);
    bottom = std::move(next);
  }
  return true;
}

MatrixXd solve_lyapunov(const MatrixXd& A) {
  if (A.rows() != A.cols()) throw Error("solve_lyapunov: A must be square");
  if (!is_hurwitz_matrix(A)) throw Error("solve_lyapunov: A is not Hurwitz");
  const Eigen::Index n = A.rows();
  const MatrixXd eye = MatrixXd::Identity(n, n);
  // vec(A^T P + P A) = (I (x) A^T + A^T (x) I) vec(P), column-major.
  MatrixXd kron(n * n, n * n);
  const MatrixXd at = A.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      kron.block(i * n, j * n, n, n) = eye(i, j) * at + at(i, j) * eye;
    }
  }
  const VectorXd rhs = (-2.0 * eye).reshaped();
  Eigen::PartialPivLU<MatrixXd> lu(kron);
  if (std::abs(lu.determinant()) < std::numeric_limits<double>::min()) {
    throw Error("solve_lyapunov: singular Kronecker system");
  }
  const VectorXd sol = lu.solve(rhs);
  MatrixXd p = sol.reshaped(n, n);
  return 0.5 * (p + p.transpose());
}

MatrixXd companion_from_k(const VectorXd& k) {
  const Eigen::Index m = k.size();
  MatrixXd a = MatrixXd::Zero(m, m);
  for (Eigen::Index r = 0; r + 1 < m; ++r) a(r, r + 1) = 1.0;
  a.row(m - 1) = -k.transpose();
  return a;
}

EpsilonBound epsilon_bound(const AffinePlant& plant, const VectorXd& k,
                           const std::vector<VectorXd>& samples,
                           std::optional<double> eps_hat) {
  if (samples.empty()) throw Error("epsilon_bound: empty parameter grid");
  const auto report = check_assumption3(plant, samples);
  if (!report.passed()) {
    const auto bad = report.violators().front();
    throw Error("epsilon_bound: plant assumptions violated at a grid sample (" +
                bad.reason + ")");
  }
  const int m = report.nominal_m;
  if (k.size() != m) throw Error("epsilon_bound: k length differs from m");
  const double km = k(m - 1);

  const MatrixXd abar0 = companion_from_k(k);
  VectorXd bbar0 = VectorXd::Zero(m);
  bbar0(m - 1) = 1.0;
  // -k_m [k_1, k_2 - k_1/k_m, ..., k_m - k_(m-1)/k_m]
  RowVectorXd shift(m);
  shift(0) = -km * k(0);
  for (int j = 1; j < m; ++j) shift(j) = -km * (k(j) - k(j - 1) / km);

  EpsilonBound out;
  out.P1 = solve_lyapunov(abar0);
  out.p1b0_sq = (out.P1 * bbar0).squaredNorm();
  out.min_b1 = std::numeric_limits<double>::infinity();

  struct PerSample {
    double a1_sq, abar2_sq, abar3;
  };
  std::vector<PerSample> per;
  for (const auto& w : samples) {
    const auto pm = materialize(plant, w);
    const auto nf = normal_form(pm.A, pm.B, pm.C);
    out.min_b1 = std::min(out.min_b1, nf.b1);
    if (nf.A0z.size() > 0) {
      const MatrixXd p0 = solve_lyapunov(nf.A0z);
      const double v = (p0 * nf.b0z).squaredNorm();
      if (out.P0.size() == 0 || v > out.max_p0b0_sq) {
        out.max_p0b0_sq = v;
        out.P0 = p0;
      }
    }
    const RowVectorXd abar2 = nf.A2z * abar0 + shift;
    per.push_back({nf.A1z.squaredNorm(), abar2.squaredNorm(),
                   nf.A2z.dot(bbar0) + km});
  }
  if (!(out.min_b1 > 0.0)) throw Error("epsilon_bound: min b1 is not positive");

  const double minimal = 4.0 * out.max_p0b0_sq + 1.0;
  if (eps_hat && *eps_hat < minimal) {
    throw Error("epsilon_bound: eps_hat below 4 max|P0 b0|^2 + 1 = " +
                std::to_string(minimal));
  }
  out.eps_hat = eps_hat.value_or(minimal);

  out.max_xi_sigma = -std::numeric_limits<double>::infinity();
  for (const auto& s : per) {
    out.max_xi_sigma = std::max(
        out.max_xi_sigma, s.abar3 + s.a1_sq + s.abar2_sq / out.eps_hat);
  }
  const double numerator =
      std::max(0.0, out.max_xi_sigma + out.eps_hat * out.p1b0_sq) + 2.0;
  out.eps_bound = numerator / out.min_b1;
  return out;
}

MatrixXd closed_loop_matrix(const PlantMatrices& pm, const VectorXd& curvatures,
                            const Digraph& g, const Gains& gains,
                            const GeneratorGains& gen, ControlMode mode) {
  const int n = pm.n();
  const int agents = g.size();
  const int m = gains.m;
  if (curvatures.size() != agents) {
    throw Error("closed_loop_matrix: need one curvature per agent");
  }
  if (gains.k.size() != m) throw Error("closed_loop_matrix: k length != m");
  const bool observer = mode == ControlMode::OutputFeedback && m >= 2;
  const int chi_dim = observer ? m : 0;
  const int block = n + 1 + chi_dim;
  const int z0 = agents * block;
  const int v0 = z0 + agents;
  const int dim = v0 + agents;
  MatrixXd a = MatrixXd::Zero(dim, dim);
  const MatrixXd lap = laplacian_matrix(g);
  const VectorXd l = gains.observer_l();
  const double eps = gains.epsilon;

  // Output derivative rows C A^r for the partial-state law.
  std::vector<RowVectorXd> deriv_rows;
  RowVectorXd row = pm.C;
  for (int r = 0; r < m; ++r) {
    deriv_rows.push_back(row);
    row = row * pm.A;
  }

  for (int i = 0; i < agents; ++i) {
    const int xi = i * block;
    const int ii = xi + n;  // integral state
    const int ci = ii + 1;  // observer
    const int zi = z0 + i;

    // u = K_x x + K_xi xi0 + K_chi chi + K_z z_i
    RowVectorXd kx = RowVectorXd::Zero(n);
    RowVectorXd kchi = RowVectorXd::Zero(chi_dim);
    const double kxi = -eps * gains.k(0);
    double kz = 0.0;
    if (m == 1) {
      kx = -eps * pm.C;
      kz = eps;
    } else {
      kx = -eps * gains.k(1) * pm.C;
      kz = eps * gains.k(1);
      if (observer) {
        for (int r = 2; r <= m - 1; ++r) kchi(r - 1) = -eps * gains.k(r);
        kchi(m - 1) = -eps;
      } else {
        for (int r = 1; r <= m - 2; ++r) kx -= eps * gains.k(r + 1) * deriv_rows[r];
        kx -= eps * deriv_rows[m - 1];
      }
    }

    a.block(xi, xi, n, n) = pm.A + pm.B * kx;
    a.block(xi, ii, n, 1) = pm.B * kxi;
    if (chi_dim) a.block(xi, ci, n, chi_dim) = pm.B * kchi;
    a.block(xi, zi, n, 1) = pm.B * kz;

    a.block(ii, xi, 1, n) = pm.C;
    a(ii, zi) = -1.0;

    if (observer) {
      for (int r = 0; r < m; ++r) {
        if (r + 1 < m) a(ci + r, ci + r + 1) = 1.0;
        a(ci + r, ci) -= l(r);
        a.block(ci + r, xi, 1, n) += l(r) * pm.C;
      }
    }

    a(zi, zi) -= gen.alpha * curvatures(i);
    for (int j = 0; j < agents; ++j) {
      a(zi, z0 + j) -= gen.beta * lap(i, j);
      a(zi, v0 + j) -= lap(i, j);
      a(v0 + i, z0 + j) += gen.alpha * gen.beta * lap(i, j);
    }
  }
  return a;
}

bool TuningCertificate::passed() const {
  return !margins.empty() && worst_margin < -kMarginTolerance;
}

namespace {

// Max real part over eigenvalues, skipping one near-zero eigenvalue whose
// eigenvector lies in the v-translation direction (v = c 1, all else 0).
SampleMargin spectral_margin(const MatrixXd& a, int v_offset, int agents) {
  Eigen::EigenSolver<MatrixXd> es(a, true);
  if (es.info() != Eigen::Success) {
    throw Error("certify_closed_loop: eigenvalue computation failed");
  }
  const auto& vals = es.eigenvalues();
  const auto vecs = es.eigenvectors();
  SampleMargin out;
  out.margin = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    if (!out.structural_zero && std::abs(vals(k)) <= 1e-8) {
      Eigen::VectorXcd e = vecs.col(k);
      // Rotate so the v-block mean is real and positive, then normalize.
      const std::complex<double> mean = e.segment(v_offset, agents).mean();
      if (std::abs(mean) > 0.0) {
        e /= mean;
        e /= e.norm();
        Eigen::VectorXcd target = Eigen::VectorXcd::Zero(e.size());
        target.segment(v_offset, agents).setConstant(1.0 / std::sqrt(agents));
        if ((e - target).cwiseAbs().maxCoeff() <= 1e-6) {
          out.structural_zero = true;
          continue;
        }
      }
    }
    out.margin = std::max(out.margin, vals(k).real());
  }
  return out;
}

}  // namespace

TuningCertificate certify_closed_loop(const AffinePlant& plant,
                                      const CostEnsemble& costs,
                                      const Digraph& g, const Gains& gains,
                                      const GeneratorGains& gen,
                                      const std::vector<VectorXd>& samples,
                                      ControlMode mode) {
  if (static_cast<int>(costs.size()) != g.size()) {
    throw Error("certify_closed_loop: one cost per agent required");
  }
  if (samples.empty()) throw Error("certify_closed_loop: empty parameter grid");
  const double y_star = global_minimizer(costs);
  VectorXd curv(g.size());
  for (int i = 0; i < g.size(); ++i) curv(i) = curvature(costs[i], y_star);

  TuningCertificate cert;
  cert.gamma_used = gains.gamma;
  cert.sampled_w = samples;
  cert.worst_margin = -std::numeric_limits<double>::infinity();
  for (const auto& w : samples) {
    const auto pm = materialize(plant, w);
    const MatrixXd a = closed_loop_matrix(pm, curv, g, gains, gen, mode);
    const int v_offset = static_cast<int>(a.rows()) - g.size();
    auto sm = spectral_margin(a, v_offset, g.size());
    sm.w = w;
    cert.worst_margin = std::max(cert.worst_margin, sm.margin);
    cert.margins.push_back(std::move(sm));
  }

  if (gains.m >= 1 && gains.k.size() == gains.m) {
    try {
      const auto eb = epsilon_bound(plant, gains.k, samples);
      cert.P0 = eb.P0;
      cert.P1 = eb.P1;
      cert.eps_hat = eb.eps_hat;
      cert.eps_bound = eb.eps_bound;
    } catch (const Error& e) {
      cert.note = e.what();
    }
    // Scaled observer error dynamics share p(s): A_chi = companion with -k
    // reversed in the first column.
    MatrixXd achi = MatrixXd::Zero(gains.m, gains.m);
    for (int r = 0; r < gains.m; ++r) {
      achi(r, 0) = -gains.k(gains.m - 1 - r);
      if (r + 1 < gains.m) achi(r, r + 1) = 1.0;
    }
    try {
      cert.Pchi = solve_lyapunov(achi);
    } catch (const Error& e) {
      cert.note += std::string(cert.note.empty() ? "" : "; ") + e.what();
    }
  }
  return cert;
}

double gamma_search(const AffinePlant& plant, const CostEnsemble& costs,
                    const Digraph& g, const Gains& partial_gains,
                    const GeneratorGains& gen,
                    const std::vector<VectorXd>& samples, double gamma_max) {
  if (partial_gains.m == 1) return 1.0;
  Gains trial = partial_gains;
  for (double gamma = 1.0; gamma <= gamma_max; gamma *= 2.0) {
    trial.gamma = gamma;
    if (certify_closed_loop(plant, costs, g, trial, gen, samples).passed()) {
      return gamma;
    }
  }
  throw TuningError("gamma_search: no gamma <= " + std::to_string(gamma_max) +
              " certifies the closed loop");
}

}  // namespace dooc
