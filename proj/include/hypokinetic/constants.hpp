#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hypo {

/// Inputs of the coefficient construction: the generator parameters, the
/// base dimension, the curvature bound, and (for rate reports) the
/// Poincare constant of the unit tangent bundle.
struct ProblemParams {
  double sigma = 1.0;
  double kappa = 1.0;
  int n = 2;
  double M = 0.0;
  std::optional<double> lambda;  // Poincare constant, needed only for rates
};

/// Every constant of the coefficient construction for fixed
/// (sigma, kappa, n, M, eps, eps_prime).  The auxiliary eps_k are the
/// Young-inequality splittings; Cv/Ch/Cxi are the gradient-term
/// coefficients and A, B, C, D the Hessian-block coefficients of the
/// combined quadratic form.  Ch and Cxi equal one by normalization and
/// D vanishes by construction.
struct CoefficientSet {
  // inputs
  double sigma, kappa, M;
  int n;
  double eps, eps_prime;
  // tensor coefficients
  double a, b, c, d;
  // Young parameters (eps5 exists only when M > 0)
  double eps1, eps2, eps3, eps4, eps6, eps_dprime;
  std::optional<double> eps5;
  // gradient- and Hessian-block coefficients
  double Cv, Ch, Cxi;
  double A, B, C, D;
  // the generalized Bakry-Emery constants of the estimate T2 >= rho T - K Gamma
  double rho, K;
};

/// Executes the proof's choice chain in order and evaluates the derived
/// coefficients.  Throws std::invalid_argument outside eps in (0,1),
/// eps_prime > 0 or invalid params.
CoefficientSet build_coefficients(const ProblemParams& params, double eps, double eps_prime);

struct ConstraintCheck {
  std::string name;
  double margin;  // >= 0 means satisfied (equality checks use tolerance-normalized margin)
  bool pass;
};

struct ConstraintReport {
  std::vector<ConstraintCheck> checks;
  bool pass;
  const ConstraintCheck* find(const std::string& name) const;
};

/// Checks every constraint of the construction: strict inequalities at
/// machine strictness, equalities-by-construction at 1e-12 relative.
ConstraintReport validate_coefficients(const CoefficientSet& cs);

/// Comparison of the chain values against the printed closed-form
/// summary for (a, c, d); the summary's c and d differ from the chain by
/// a factor eps^2, which this report flags.
struct SummaryComparison {
  double a_ratio, c_ratio, d_ratio;  // chain / printed summary
  bool mismatch_flagged;
};
SummaryComparison compare_printed_summary(const CoefficientSet& cs);

struct RateReport {
  double lambda_hat;
  double eta;
  double lambda_tilde;
  double h1_constant;  // min(a(1-sqrt(eps)), c(1-sqrt(eps)), d)
};

/// Decay-rate constants of the H^1 convergence estimate for Poincare
/// constant lambda.  Throws std::domain_error when K + lambda_hat <= 0.
RateReport rate_report(const CoefficientSet& cs, double lambda);

struct OptimizeConfig {
  int grid = 32;           // log-spaced grid per axis
  int refine_iters = 200;  // Nelder-Mead iterations
  double eps_lo = 1e-3, eps_hi = 1.0 - 1e-3;
  double eps_prime_lo = 1e-3, eps_prime_hi = 1e2;
};

struct OptimizeResult {
  double eps, eps_prime;
  RateReport rate;
  CoefficientSet coefficients;
  int evaluations;
};

/// Maximizes lambda_tilde over (eps, eps_prime): coarse log grid, then
/// derivative-free simplex refinement; infeasible points score -inf.
/// Deterministic for a fixed config.  Throws std::runtime_error if no
/// feasible point exists on the grid.
OptimizeResult optimize_rate(const ProblemParams& params, const OptimizeConfig& cfg = {});

/// The large-(sigma = kappa) limit constant K_{eps, eps'}; the K of the
/// coefficient set converges to -K_{eps,eps'} in that regime.
double asymptotic_K(int n, double eps, double eps_prime);

/// One epsilon of the regularization scheme as a monomial in s.
struct SPower {
  double coef;
  int power;  // eps(s) = coef * s^power
  double operator()(double s) const;
};

/// Output of the time-dependent coefficient scheme behind the
/// regularization estimate: hatted tensor constants, all epsilon
/// schedules, the verified step horizon s_max and the gradient-bound
/// constants (a_tilde / t^2 for the vertical gradient, c_tilde / t^8 for
/// the horizontal one).
struct RegularizationSet {
  double a, b, c;          // possibly rescaled inputs
  double rescale_factor;   // 1 when the inputs already satisfied 2 a^2 kappa / b = sigma^2/3
  double a_hat, b_hat, c_hat;
  SPower eps1, eps3, eps4, eps7, eps8, eps9, eps10, eps12, eps13;
  double eps2, eps5, eps6, eps11;
  double s_max;
  double t0;  // min(1, s_max)
  double a_tilde, c_tilde;

  double sigma, kappa;
  int n;

  // s-dependent coefficient functions bounding dF_s/ds
  double A(double s) const;
  double B(double s) const;
  double C(double s) const;
  double A_hat(double s) const;
  double B_hat(double s) const;
  double C_hat(double s) const;
  double Cv(double s) const;
  double Ch(double s) const;
  double Cxi(double s) const;

  /// All sign conditions and both discriminant conditions at s.
  bool conditions_hold(double s) const;
};

/// Executes the regularization choice chain for inputs with 4b^2 < ac.
/// Inputs incompatible with 2 a^2 kappa / b = sigma^2 / 3 are jointly
/// rescaled (reported in rescale_factor).  Throws std::invalid_argument
/// on 4b^2 >= ac and std::runtime_error when no s > 0 verifies.
RegularizationSet regularization_scheme(const ProblemParams& params, double a, double b, double c);

/// Poincare constant of the unit tangent bundle with the product Sasaki
/// metric, where available: min((2 pi / L)^2, n - 1) for the flat torus;
/// absent for Euclidean space (infinite volume) and for the sphere base
/// (user supplied).
class ModelManifold;
std::optional<double> spectral_gap(const ModelManifold& m);

}  // namespace hypo
