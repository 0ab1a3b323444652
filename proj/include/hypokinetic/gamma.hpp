#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypokinetic/constants.hpp"
#include "hypokinetic/fields.hpp"
#include "hypokinetic/test_function.hpp"

namespace hypo {

/// The quadratic forms of the Gamma-calculus: vertical, mixed
/// vertical/horizontal, horizontal (orthogonal to the geodesic field),
/// geodesic, and the two Sigma forms built from the vertical Laplacian.
enum class GammaKind { Vv, Vh, Hh, Xi, SigmaV, SigmaVXi };

/// How an iterated form is evaluated: through the generator and jets, or
/// from its closed-form expression in Hessian/gradient blocks.
enum class EvalMethod { Definitional, Closed };

const char* to_string(GammaKind k);

/// (L f)(p) with L = (sigma^2/2) sum_i V_i^2 + kappa H_0, acting through
/// the bundle projection.
double generator_apply(const ModelManifold& m, double sigma, double kappa, const TestFunction& f,
                       const FramePoint& p);

/// First-order bilinear form of the given kind at p.  The mixed form is
/// the symmetrized (1/2)(H_i f V_i g + H_i g V_i f); SigmaV is
/// (Delta^v f)(Delta^v g) and SigmaVXi its mixed analogue with the
/// geodesic derivative.
double gamma(GammaKind kind, const ModelManifold& m, const TestFunction& f, const TestFunction& g,
             const FramePoint& p);

/// Iterated form Gamma_2(f) = (1/2)(L Gamma(f) - 2 Gamma(f, Lf)),
/// evaluated definitionally (nested jets) or by its closed form.
/// Supported kinds: Vv, Vh, Hh, Xi.
double gamma2(GammaKind kind, EvalMethod method, const ModelManifold& m, double sigma,
              double kappa, const TestFunction& f, const FramePoint& p);

/// Bilinear definitional Gamma_2(f, g); used by symmetry and bilinearity
/// checks.
double gamma2_bilinear(GammaKind kind, const ModelManifold& m, double sigma, double kappa,
                       const TestFunction& f, const TestFunction& g, const FramePoint& p);

/// Iterated Sigma forms (kinds SigmaV and SigmaVXi); the definitional
/// route reaches fourth derivatives of f by nesting order-2 jets.
double sigma2(GammaKind kind, EvalMethod method, const ModelManifold& m, double sigma,
              double kappa, const TestFunction& f, const FramePoint& p);

/// Scale used to normalize identity residuals: 1 + the largest absolute
/// value among the closed form's summands (the forms cancel heavily).
double gamma2_scale(GammaKind kind, const ModelManifold& m, double sigma, double kappa,
                    const TestFunction& f, const FramePoint& p);

struct TensorCoefficients {
  double a, b, c, d;
  bool positive_definite() const { return b * b < a * c; }
};

/// T(f) = a |grad_v f|^2 - 2b <grad_v f, grad_h~ f> + c |grad_h~ f|^2
///        + d |grad_xi f|^2.
double tensor_T(const TensorCoefficients& tc, const ModelManifold& m, const TestFunction& f,
                const FramePoint& p);

/// T_2(f) as the same linear combination of the closed-form Gamma_2's.
double tensor_T2(const TensorCoefficients& tc, const ModelManifold& m, double sigma, double kappa,
                 const TestFunction& f, const FramePoint& p);

struct BakryEmerySlack {
  double s1;      // slack of the gradient inequality (combination + K|grad_v|^2 - |grad_h~|^2)
  double s2;      // slack of T2 >= rho T - K Gamma with Gamma = (sigma^2/2) Gamma^v
  double scale1;  // residual normalizations (1 + max |summand|)
  double scale2;
};

/// Both slacks of the generalized Bakry-Emery estimate at (f, p) for a
/// coefficient set built with matching (sigma, kappa, n, M).  Throws
/// std::invalid_argument when the manifold's curvature bound exceeds the
/// M baked into cs.
BakryEmerySlack check_bakry_emery(const CoefficientSet& cs, const ModelManifold& m,
                                  const TestFunction& f, const FramePoint& p);

struct IdentityCertification {
  GammaKind kind;
  std::string manifold;
  int samples;
  double tol;
  double max_residual;  // relative to the per-sample scale
  std::vector<std::uint64_t> failing_seeds;
  bool pass;
};

/// Definitional-vs-closed certification of one iterated form over
/// `samples` seeded (function, point) pairs.
IdentityCertification certify_identity(GammaKind kind, const ModelManifold& m, double sigma,
                                       double kappa, int samples, std::uint64_t seed, double tol);

struct SlackCertification {
  std::string manifold;
  int samples;
  double min_slack1_rel;  // min s1 / scale1 over the battery
  double min_slack2_rel;
  bool pass;
};

/// Pointwise certification of the main inequality over seeded samples;
/// passes when both slacks stay above -tol * scale.
SlackCertification certify_bakry_emery(const CoefficientSet& cs, const ModelManifold& m,
                                       int samples, std::uint64_t seed, double tol);

}  // namespace hypo
