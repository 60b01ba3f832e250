#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dooc/controller.hpp"
#include "dooc/costs.hpp"
#include "dooc/generator.hpp"
#include "dooc/graph.hpp"
#include "dooc/linalg.hpp"
#include "dooc/plant.hpp"

namespace dooc {

/// A well-formed request for which no certified gain exists.
class TuningError : public Error {
 public:
  using Error::Error;
};

/// Coefficients k_1..k_m of (s + lambda0)^m below the leading s^m term:
/// k_j = binom(m, j-1) lambda0^(m-j+1).
VectorXd stabilizer_gains(int m, double lambda0);

/// Routh-Hurwitz test on an ascending coefficient list with leading 1. A zero
/// pivot counts as not Hurwitz.
bool hurwitz_check(const Poly& ascending);

/// Unique symmetric P with A^T P + P A = -2 I, via the Kronecker-sum linear
/// system. Throws Error if A is not Hurwitz.
MatrixXd solve_lyapunov(const MatrixXd& A);

/// Companion matrix of p(s): shift on the first m-1 rows, -k on the last.
MatrixXd companion_from_k(const VectorXd& k);

/// Gain floor for the partial-state design derived from quadratic Lyapunov
/// functions on the zero dynamics (P0) and the integrator chain (P1).
struct EpsilonBound {
  double eps_hat = 0.0;
  double eps_bound = 0.0;
  double max_p0b0_sq = 0.0;   // max_w |P0(w) b0(w)|^2
  double max_xi_sigma = 0.0;  // max_w of the sigma-channel coupling term
  double p1b0_sq = 0.0;       // |P1 e_m|^2
  double min_b1 = 0.0;
  MatrixXd P0;  // at the sample attaining max_p0b0_sq (empty if n == m)
  MatrixXd P1;
};

/// `eps_hat` overrides the minimal choice 4 max|P0 b0|^2 + 1; it must not be
/// smaller. Throws Error if any sample violates the plant assumptions.
EpsilonBound epsilon_bound(const AffinePlant& plant, const VectorXd& k,
                           const std::vector<VectorXd>& samples,
                           std::optional<double> eps_hat = std::nullopt);

/// Linear closed loop (plants, integrators, observers, generator) with each
/// cost replaced by its quadratic model of curvature `curvatures(i)`.
/// State ordering per agent i: x_i (n), xi0_i, chi_i (m, output feedback
/// with m >= 2 only); then z (N) and v (N). Matches the simulator layout.
MatrixXd closed_loop_matrix(const PlantMatrices& pm,
                            const VectorXd& curvatures, const Digraph& g,
                            const Gains& gains, const GeneratorGains& gen,
                            ControlMode mode = ControlMode::OutputFeedback);

struct SampleMargin {
  VectorXd w;
  double margin = 0.0;  // max real part over non-structural eigenvalues
  bool structural_zero = false;
};

struct TuningCertificate {
  MatrixXd P0;
  MatrixXd P1;
  MatrixXd Pchi;
  double eps_hat = 0.0;
  double eps_bound = 0.0;
  double gamma_used = 0.0;
  std::vector<VectorXd> sampled_w;
  std::vector<SampleMargin> margins;
  double worst_margin = 0.0;
  std::string note;  // set when the epsilon floor could not be evaluated

  bool passed() const;
};

/// Strictness applied to the worst margin.
inline constexpr double kMarginTolerance = 1e-9;

/// Eigenvalue certificate of local exponential stability at the consensus
/// equilibrium over the parameter samples. Costs are linearized at y*.
TuningCertificate certify_closed_loop(
    const AffinePlant& plant, const CostEnsemble& costs, const Digraph& g,
    const Gains& gains, const GeneratorGains& gen,
    const std::vector<VectorXd>& samples,
    ControlMode mode = ControlMode::OutputFeedback);

/// Smallest gamma in {1, 2, 4, ...} up to gamma_max for which
/// certify_closed_loop passes. Returns 1 when m == 1. Throws TuningError if
/// none.
double gamma_search(const AffinePlant& plant, const CostEnsemble& costs,
                    const Digraph& g, const Gains& partial_gains,
                    const GeneratorGains& gen,
                    const std::vector<VectorXd>& samples, double gamma_max);

}  // namespace dooc
