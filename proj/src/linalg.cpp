#include "dooc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dooc {

namespace {

double off_diagonal_norm(const MatrixXd& m) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j) sum += m(i, j) * m(i, j);
    }
  }
  return std::sqrt(sum);
}

}  // namespace

SymmetricEigen jacobi_eigen(const MatrixXd& sym, double tol, int max_sweeps) {
  if (sym.rows() != sym.cols()) {
    throw Error("jacobi_eigen: matrix is not square");
  }
  const Eigen::Index n = sym.rows();
  MatrixXd a = sym;
  MatrixXd v = MatrixXd::Identity(n, n);
  int sweep = 0;
  while (off_diagonal_norm(a) > tol) {
    if (sweep++ >= max_sweeps) {
      throw Error("jacobi_eigen: no convergence after " +
                  std::to_string(max_sweeps) + " sweeps");
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that annihilates a(p, q) (Golub & Van Loan 8.4).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) {
    return a(i, i) < a(j, j);
  });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  out.sweeps = sweep;
  return out;
}

CharPoly faddeev_leverrier(const MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw Error("faddeev_leverrier: matrix is not square");
  }
  const Eigen::Index n = a.rows();
  // det(sI - A) = s^n + c[n-1] s^(n-1) + ... + c[0]
  // M_1 = I, c_{n-1} = -tr(A)
  // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k
  CharPoly out;
  out.coeffs.assign(static_cast<size_t>(n) + 1, 0.0);
  out.coeffs[static_cast<size_t>(n)] = 1.0;
  MatrixXd m = MatrixXd::Zero(n, n);
  const MatrixXd eye = MatrixXd::Identity(n, n);
  double c_prev = 1.0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c_prev * eye;
    out.adj.push_back(m);
    const double c = -(a * m).trace() / static_cast<double>(k);
    out.coeffs[static_cast<size_t>(n - k)] = c;
    c_prev = c;
  }
  return out;
}

Poly trim_leading(Poly p, double tol) {
  while (!p.empty() && std::abs(p.back()) <= tol) p.pop_back();
  return p;
}

std::complex<double> poly_eval(const Poly& ascending,
                               std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (auto it = ascending.rbegin(); it != ascending.rend(); ++it) {
    acc = acc * s + *it;
  }
  return acc;
}

RootResult durand_kerner(const Poly& ascending, double tol, int max_iter) {
  if (ascending.empty() || ascending.back() == 0.0) {
    throw Error("durand_kerner: leading coefficient is zero");
  }
  const size_t degree = ascending.size() - 1;
  RootResult out;
  if (degree == 0) return out;

  Poly monic = ascending;
  const double lead = monic.back();
  for (auto& c : monic) c /= lead;

  // Cauchy bound keeps the initial circle around every root.
  double bound = 0.0;
  for (size_t i = 0; i < degree; ++i) bound = std::max(bound, std::abs(monic[i]));
  const double radius = 1.0 + bound;
  const std::complex<double> seed(0.4, 0.9);
  std::vector<std::complex<double>> z(degree);
  for (size_t i = 0; i < degree; ++i) {
    z[i] = radius * std::pow(seed, static_cast<double>(i)) /
           std::abs(std::pow(seed, static_cast<double>(i)));
  }

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    double step = 0.0;
    for (size_t i = 0; i < degree; ++i) {
      std::complex<double> denom = 1.0;
      for (size_t j = 0; j < degree; ++j) {
        if (j != i) denom *= (z[i] - z[j]);
      }
      const auto delta = poly_eval(monic, z[i]) / denom;
      z[i] -= delta;
      step = std::max(step, std::abs(delta) / std::max(1.0, std::abs(z[i])));
    }
    if (step <= tol) {
      ++iter;
      break;
    }
  }

  double residual = 0.0;
  for (const auto& r : z) {
    double scale = 0.0;
    double power = 1.0;
    for (size_t k = 0; k <= degree; ++k) {
      scale += std::abs(monic[k]) * power;
      power *= std::abs(r);
    }
    residual = std::max(residual, std::abs(poly_eval(monic, r)) / scale);
  }
  out.roots = std::move(z);
  out.residual = residual;
  out.iterations = iter;
  if (iter >= max_iter && residual > std::sqrt(tol)) {
    throw Error("durand_kerner: no convergence, residual " +
                std::to_string(residual));
  }
  // Snap conjugate-pair noise on real roots.
  for (auto& r : out.roots) {
    if (std::abs(r.imag()) <= 1e-12 * std::max(1.0, std::abs(r.real()))) {
      r = {r.real(), 0.0};
    }
  }
  return out;
}

double max_abs(const MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace dooc
