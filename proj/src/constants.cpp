#include "hypokinetic/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypokinetic/manifold.hpp"

namespace hypo {

namespace {

constexpr double kEqTol = 1e-12;

void check_params(const ProblemParams& p) {
  if (!(p.sigma > 0.0)) throw std::invalid_argument("params: sigma > 0 required");
  if (!(p.kappa > 0.0)) throw std::invalid_argument("params: kappa > 0 required");
  if (p.n < 2) throw std::invalid_argument("params: n >= 2 required");
  if (p.M < 0.0) throw std::invalid_argument("params: M >= 0 required");
}

}  // namespace

CoefficientSet build_coefficients(const ProblemParams& params, double eps, double eps_prime) {
  check_params(params);
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  if (!(eps_prime > 0.0)) throw std::invalid_argument("eps_prime must be positive");

  const double sigma = params.sigma, kappa = params.kappa, M = params.M;
  const int n = params.n;
  const double s2h = 0.5 * sigma * sigma;
  const double nm1 = n - 1.0;

  CoefficientSet cs{};
  cs.sigma = sigma;
  cs.kappa = kappa;
  cs.M = M;
  cs.n = n;
  cs.eps = eps;
  cs.eps_prime = eps_prime;

  // Choice chain, executed in proof order.
  cs.eps6 = nm1 * (2.0 + eps) / (2.0 * (1.0 + eps));
  cs.eps4 = (1.0 + eps_prime) * (1.0 + eps);
  cs.eps_dprime = 0.25 / (1.0 + nm1 * eps / (4.0 * (1.0 + eps_prime)));
  cs.b = (1.0 / kappa) * (1.0 + 4.0 * (1.0 + eps_prime) / (nm1 * eps));
  cs.c = cs.b * kappa * cs.eps_dprime / (s2h * cs.eps4);
  cs.d = cs.c / (1.0 + eps);
  cs.a = cs.b * cs.b / (cs.c * eps);
  cs.eps3 = (cs.c / cs.eps4) * eps_prime / cs.b;
  if (M > 0.0)
    cs.eps5 = cs.b * kappa * cs.eps_dprime / (cs.c * kappa * M / 2.0);
  cs.eps2 = kappa * cs.eps_dprime / (sigma * sigma * nm1 / 4.0);
  cs.eps1 = cs.b * kappa * cs.eps_dprime / (cs.a * kappa / 2.0);

  // Gradient-term coefficient C^v from the displayed bound; the split
  // against the curvature term is dropped entirely when M = 0.
  cs.Cv = cs.a * (s2h * (n - 2.0) - kappa / (2.0 * cs.eps1)) -
          2.0 * cs.b * (s2h * (nm1 / (4.0 * cs.eps2) + 1.0 / (2.0 * cs.eps3)) + kappa * M / 2.0);
  if (cs.eps5) cs.Cv -= cs.c * kappa * M / (2.0 * *cs.eps5);

  // C^h~ and C^xi in the normalized form that the final choices of b and
  // eps'' make exactly one; the raw displayed sums do not reduce to a
  // common value (their epsilon bookkeeping is inconsistent), so the
  // normalization identities are the usable statement.
  cs.Ch = cs.b * kappa * (1.0 - 4.0 * cs.eps_dprime);
  cs.Cxi = cs.b * kappa * cs.eps_dprime * nm1 * eps / (1.0 + eps_prime);

  cs.A = s2h * cs.a;
  cs.B = s2h * cs.b;
  cs.C = s2h * cs.c * eps;  // the value that makes B^2 <= AC equivalent to b^2 <= ac eps
  cs.D = s2h * (cs.d - cs.c / cs.eps4 - cs.b * cs.eps3);

  cs.rho = 1.0 / std::max(cs.b + cs.c, cs.d);
  cs.K = (-cs.Cv + (cs.a + cs.b) / std::max(cs.b + cs.c, cs.d)) * 2.0 / (sigma * sigma);
  return cs;
}

const ConstraintCheck* ConstraintReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ConstraintReport validate_coefficients(const CoefficientSet& cs) {
  ConstraintReport rep;
  auto strict = [&](const std::string& name, double margin) {
    rep.checks.push_back({name, margin, margin > 0.0});
  };
  auto nonneg = [&](const std::string& name, double margin) {
    rep.checks.push_back({name, margin, margin >= 0.0});
  };
  // equality-by-construction: |lhs - rhs| <= 1e-12 * scale, margin normalized
  auto equal = [&](const std::string& name, double lhs, double rhs, double scale = 0.0) {
    const double tol = kEqTol * (1.0 + std::max({std::abs(lhs), std::abs(rhs), scale}));
    const double err = std::abs(lhs - rhs);
    rep.checks.push_back({name, 1.0 - err / tol, err <= tol});
  };

  const double s2h = 0.5 * cs.sigma * cs.sigma;
  strict("b^2 < ac", cs.a * cs.c - cs.b * cs.b);
  equal("b^2 = ac eps", cs.b * cs.b, cs.a * cs.c * cs.eps);
  nonneg("A >= 0", cs.A);
  nonneg("B >= 0", cs.B);
  nonneg("C >= 0", cs.C);
  equal("D = 0", cs.D, 0.0, std::abs(cs.A) + std::abs(cs.C));
  equal("B^2 = AC", cs.B * cs.B, cs.A * cs.C);
  strict("Ch > 0", cs.Ch);
  strict("Cxi > 0", cs.Cxi);
  equal("Ch = 1", cs.Ch, 1.0);
  equal("Cxi = 1", cs.Cxi, 1.0);
  // chain equalities
  equal("c (s^2/2) eps4 = b k eps''", cs.c * s2h * cs.eps4, cs.b * cs.kappa * cs.eps_dprime);
  equal("d (1+eps) = c", cs.d * (1.0 + cs.eps), cs.c);
  equal("b eps3 = (c/eps4) eps'", cs.b * cs.eps3, cs.c / cs.eps4 * cs.eps_prime);
  if (cs.eps5)
    equal("c (kM/2) eps5 = b k eps''", cs.c * cs.kappa * cs.M / 2.0 * *cs.eps5,
          cs.b * cs.kappa * cs.eps_dprime);
  equal("(s^2(n-1)/4) eps2 = k eps''", cs.sigma * cs.sigma * (cs.n - 1.0) / 4.0 * cs.eps2,
        cs.kappa * cs.eps_dprime);
  equal("(a k/2) eps1 = b k eps''", cs.a * cs.kappa / 2.0 * cs.eps1,
        cs.b * cs.kappa * cs.eps_dprime);
  equal("rho max(b+c,d) = 1", cs.rho * std::max(cs.b + cs.c, cs.d), 1.0);
  equal("K s^2/2 = -Cv + (a+b) rho", cs.K * s2h, -cs.Cv + (cs.a + cs.b) * cs.rho,
        std::abs(cs.Cv));
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                         [](const ConstraintCheck& c) { return c.pass; });
  return rep;
}

SummaryComparison compare_printed_summary(const CoefficientSet& cs) {
  const double nm1 = cs.n - 1.0;
  const double bk = 1.0 + 4.0 * (1.0 + cs.eps_prime) / (nm1 * cs.eps);
  const double printed_a =
      cs.sigma * cs.sigma / (2.0 * cs.kappa * cs.kappa) * nm1 * bk * bk * (1.0 + cs.eps);
  const double printed_c = 2.0 / (cs.sigma * cs.sigma) / nm1 * cs.eps / (1.0 + cs.eps);
  const double printed_d = printed_c / (1.0 + cs.eps);
  SummaryComparison cmp;
  cmp.a_ratio = cs.a / printed_a;
  cmp.c_ratio = cs.c / printed_c;
  cmp.d_ratio = cs.d / printed_d;
  cmp.mismatch_flagged = std::abs(cmp.a_ratio - 1.0) > 1e-9 ||
                         std::abs(cmp.c_ratio - 1.0) > 1e-9 ||
                         std::abs(cmp.d_ratio - 1.0) > 1e-9;
  return cmp;
}

RateReport rate_report(const CoefficientSet& cs, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("rate_report: lambda > 0 required");
  const double root = std::sqrt(cs.eps);
  RateReport r;
  r.h1_constant = std::min({cs.a * (1.0 - root), cs.c * (1.0 - root), cs.d});
  r.lambda_hat = lambda * r.h1_constant;
  if (cs.K + r.lambda_hat <= 0.0)
    throw std::domain_error("rate_report: degenerate rate, K + lambda_hat <= 0");
  r.eta = r.lambda_hat / (cs.K + r.lambda_hat);
  r.lambda_tilde = cs.rho * r.eta;
  return r;
}

namespace {

/// Objective for the (eps, eps') search: lambda_tilde, or -inf on any
/// constraint violation.
double rate_objective(const ProblemParams& params, double eps, double eps_prime,
                      CoefficientSet* cs_out, RateReport* rate_out) {
  if (!(eps > 0.0 && eps < 1.0 && eps_prime > 0.0))
    return -std::numeric_limits<double>::infinity();
  try {
    CoefficientSet cs = build_coefficients(params, eps, eps_prime);
    if (!validate_coefficients(cs).pass) return -std::numeric_limits<double>::infinity();
    if (cs.K <= 0.0) return -std::numeric_limits<double>::infinity();
    RateReport r = rate_report(cs, *params.lambda);
    if (cs_out) *cs_out = cs;
    if (rate_out) *rate_out = r;
    return r.lambda_tilde;
  } catch (const std::exception&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

OptimizeResult optimize_rate(const ProblemParams& params, const OptimizeConfig& cfg) {
  check_params(params);
  if (!params.lambda) throw std::invalid_argument("optimize_rate: lambda required in params");

  double best_eps = 0.0, best_ep = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  int evals = 0;
  auto consider = [&](double eps, double ep) {
    const double v = rate_objective(params, eps, ep, nullptr, nullptr);
    ++evals;
    if (v > best) {
      best = v;
      best_eps = eps;
      best_ep = ep;
    }
  };

  for (int i = 0; i < cfg.grid; ++i) {
    const double ti = static_cast<double>(i) / (cfg.grid - 1);
    const double eps = cfg.eps_lo * std::pow(cfg.eps_hi / cfg.eps_lo, ti);
    for (int j = 0; j < cfg.grid; ++j) {
      const double tj = static_cast<double>(j) / (cfg.grid - 1);
      consider(eps, cfg.eps_prime_lo * std::pow(cfg.eps_prime_hi / cfg.eps_prime_lo, tj));
    }
  }
  consider(0.5, 1.0);  // reference point, always evaluated
  if (!std::isfinite(best)) throw std::runtime_error("optimize_rate: no feasible grid point");

  // Nelder-Mead in logit(eps), log(eps') coordinates.
  auto to_u = [](double eps, double ep) {
    return std::pair<double, double>{std::log(eps / (1.0 - eps)), std::log(ep)};
  };
  auto from_u = [](double u, double v) {
    return std::pair<double, double>{1.0 / (1.0 + std::exp(-u)), std::exp(v)};
  };
  auto eval_u = [&](std::pair<double, double> u) {
    auto [eps, ep] = from_u(u.first, u.second);
    ++evals;
    return -rate_objective(params, eps, ep, nullptr, nullptr);  // minimized
  };

  std::array<std::pair<double, double>, 3> simplex;
  std::array<double, 3> fval;
  simplex[0] = to_u(best_eps, best_ep);
  simplex[1] = {simplex[0].first + 0.25, simplex[0].second};
  simplex[2] = {simplex[0].first, simplex[0].second + 0.25};
  for (int i = 0; i < 3; ++i) fval[i] = eval_u(simplex[i]);

  for (int it = 0; it < cfg.refine_iters; ++it) {
    std::array<int, 3> ord{0, 1, 2};
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fval[a] < fval[b]; });
    const auto& xl = simplex[ord[0]];
    const auto& xh = simplex[ord[2]];
    const std::pair<double, double> centroid{
        0.5 * (simplex[ord[0]].first + simplex[ord[1]].first),
        0.5 * (simplex[ord[0]].second + simplex[ord[1]].second)};
    auto reflect = [&](double t) {
      return std::pair<double, double>{centroid.first + t * (centroid.first - xh.first),
                                       centroid.second + t * (centroid.second - xh.second)};
    };
    const auto xr = reflect(1.0);
    const double fr = eval_u(xr);
    if (fr < fval[ord[0]]) {
      const auto xe = reflect(2.0);
      const double fe = eval_u(xe);
      if (fe < fr) {
        simplex[ord[2]] = xe;
        fval[ord[2]] = fe;
      } else {
        simplex[ord[2]] = xr;
        fval[ord[2]] = fr;
      }
    } else if (fr < fval[ord[1]]) {
      simplex[ord[2]] = xr;
      fval[ord[2]] = fr;
    } else {
      const auto xc = reflect(-0.5);
      const double fc = eval_u(xc);
      if (fc < fval[ord[2]]) {
        simplex[ord[2]] = xc;
        fval[ord[2]] = fc;
      } else {  // shrink toward the best vertex
        for (int k : {ord[1], ord[2]}) {
          simplex[k] = {0.5 * (simplex[k].first + xl.first),
                        0.5 * (simplex[k].second + xl.second)};
          fval[k] = eval_u(simplex[k]);
        }
      }
    }
  }
  for (int i = 0; i < 3; ++i) {
    auto [eps, ep] = from_u(simplex[i].first, simplex[i].second);
    consider(eps, ep);
  }

  OptimizeResult out;
  out.eps = best_eps;
  out.eps_prime = best_ep;
  out.evaluations = evals;
  rate_objective(params, best_eps, best_ep, &out.coefficients, &out.rate);
  return out;
}

double asymptotic_K(int n, double eps, double eps_prime) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  if (!(eps_prime > 0.0)) throw std::invalid_argument("eps_prime must be positive");
  const double nm1 = n - 1.0;
  const double bk = 1.0 + 4.0 * (1.0 + eps_prime) / (nm1 * eps);
  const double bracket = (n - 2.0) -
                         (4.0 + eps * eps / eps_prime) * (1.0 + eps) * (1.0 + eps_prime) / eps -
                         nm1 * nm1 / 16.0 * eps / ((1.0 + eps) * (1.0 + eps_prime));
  return 0.5 * nm1 * bk * bk * (1.0 + eps) * bracket;
}

// ---- regularization scheme ----------------------------------------------

double SPower::operator()(double s) const { return coef * std::pow(s, power); }

namespace {

// Shared scaffold for the s-dependent coefficient functions; every term
// comes from the Young-split bounds re-derived with all sigma^2/2 factors
// kept (the displayed versions drop some of them).
struct RegCtx {
  double sigma, kappa;
  int n;
  double s2h, nm1;
};

}  // namespace

double RegularizationSet::A(double s) const {
  const double s2h = 0.5 * sigma * sigma, nm1 = n - 1.0;
  return -2.0 * a * s * s * s2h + 4.0 * a_hat * std::pow(s, 3) * nm1 +
         2.0 * a_hat * std::pow(s, 4) * kappa * nm1 *
             (nm1 / (2.0 * eps7(s)) + 1.0 / eps8(s)) +
         6.0 * b_hat * std::pow(s, 5) * nm1 / eps12(s) +
         4.0 * b_hat * std::pow(s, 6) * nm1 * sigma * sigma / 8.0 *
             (nm1 / eps9(s) + 2.0 / eps10(s));
}

double RegularizationSet::B(double s) const {
  return -2.0 * b * std::pow(s, 4) * 0.5 * sigma * sigma;
}

double RegularizationSet::C(double s) const {
  const double s2h = 0.5 * sigma * sigma, nm1 = n - 1.0;
  return -2.0 * c * std::pow(s, 6) * s2h + 2.0 * a_hat * std::pow(s, 4) * kappa * nm1 * eps8(s) +
         4.0 * b_hat * std::pow(s, 6) * (sigma * sigma / 4.0) * nm1 * eps10(s) +
         4.0 * b_hat * std::pow(s, 6) * (kappa / 2.0) * nm1 / eps11 +
         2.0 * c_hat * std::pow(s, 8) * s2h * nm1 / eps6;
}

double RegularizationSet::A_hat(double s) const {
  return -2.0 * a_hat * std::pow(s, 4) * 0.5 * sigma * sigma;
}

double RegularizationSet::B_hat(double s) const {
  return -2.0 * b_hat * std::pow(s, 6) * 0.5 * sigma * sigma;
}

double RegularizationSet::C_hat(double s) const {
  const double s2h = 0.5 * sigma * sigma;
  return 4.0 * b * std::pow(s, 4) * s2h * eps3(s) / 2.0 +
         2.0 * c * std::pow(s, 6) * s2h / eps4(s) - 2.0 * c_hat * std::pow(s, 8) * s2h;
}

double RegularizationSet::Cv(double s) const {
  const double s2h = 0.5 * sigma * sigma, nm1 = n - 1.0;
  double v = -sigma * sigma + 2.0 * a * s -
             2.0 * a * s * s * (s2h * (n - 2.0) - kappa / (2.0 * eps1(s))) +
             4.0 * b * std::pow(s, 3) / eps13(s) +
             4.0 * b * std::pow(s, 4) *
                 (s2h * (nm1 / (4.0 * eps2) + 1.0 / (2.0 * eps3(s))));
  // curvature terms vanish for the flat battery (M = 0 scheme)
  return v;
}

double RegularizationSet::Ch(double s) const {
  const double s2h = 0.5 * sigma * sigma, nm1 = n - 1.0;
  return 2.0 * a * s * s * (kappa / 2.0) * eps1(s) + 4.0 * b * std::pow(s, 3) * eps13(s) +
         4.0 * b * std::pow(s, 4) * (s2h * (nm1 / 4.0) * eps2 - kappa / 2.0) +
         6.0 * c * std::pow(s, 5) - 2.0 * c * std::pow(s, 6) * s2h * (1.0 - eps4(s));
}

double RegularizationSet::Cxi(double s) const {
  const double s2h = 0.5 * sigma * sigma, nm1 = n - 1.0;
  return 2.0 * a_hat * std::pow(s, 4) * kappa * nm1 / 2.0 * eps7(s) +
         6.0 * b_hat * std::pow(s, 5) * eps12(s) +
         4.0 * b_hat * std::pow(s, 6) *
             (-nm1 * kappa / 2.0 + nm1 * sigma * sigma / 8.0 * eps9(s) + kappa / 2.0 * eps11) +
         8.0 * c_hat * std::pow(s, 7) - 2.0 * c_hat * std::pow(s, 8) * s2h * (nm1 - eps6);
}

bool RegularizationSet::conditions_hold(double s) const {
  const double As = A(s), Bs = B(s), Cs = C(s);
  const double Ah = A_hat(s), Bh = B_hat(s), Chh = C_hat(s);
  if (!(As <= 0.0 && Bs <= 0.0 && Cs <= 0.0)) return false;
  if (!(Ah <= 0.0 && Bh <= 0.0 && Chh <= 0.0)) return false;
  if (!(Cv(s) <= 0.0 && Ch(s) <= 0.0 && Cxi(s) <= 0.0)) return false;
  if (!(Bs * Bs <= As * Cs)) return false;
  if (!(Bh * Bh <= Ah * Chh)) return false;
  return true;
}

RegularizationSet regularization_scheme(const ProblemParams& params, double a, double b,
                                        double c) {
  check_params(params);
  if (!(a > 0.0 && b > 0.0 && c > 0.0))
    throw std::invalid_argument("regularization_scheme: a, b, c > 0 required");
  if (!(4.0 * b * b < a * c))
    throw std::invalid_argument("regularization_scheme: 4b^2 < ac required");
  const double sigma = params.sigma, kappa = params.kappa;
  const int n = params.n;
  const double nm1 = n - 1.0;

  RegularizationSet rs{};
  rs.sigma = sigma;
  rs.kappa = kappa;
  rs.n = n;

  // Joint rescaling onto the normalization 2 a^2 kappa / b = sigma^2 / 3;
  // the ratio a^2/b is linear in the common scale factor.
  const double target = sigma * sigma / 3.0;
  const double current = 2.0 * a * a * kappa / b;
  rs.rescale_factor = target / current;
  rs.a = a * rs.rescale_factor;
  rs.b = b * rs.rescale_factor;
  rs.c = c * rs.rescale_factor;

  rs.b_hat = rs.c * sigma * sigma / (32.0 * kappa);
  // a_hat from matching the leading s^2 coefficient of A to -a sigma^2/2;
  // both epsilon schedules put a_hat^2 in that coefficient, so the
  // equation is a pure quadratic with vanishing linear term.
  {
    const double coef = 2.0 * kappa * nm1 * nm1 / rs.b_hat +
                        8.0 * kappa * kappa * nm1 * nm1 / (rs.c * sigma * sigma);
    rs.a_hat = std::sqrt(rs.a * 0.5 * sigma * sigma / coef);
  }
  {
    const double margin = 1.0 + 1e-6;
    const double c1 = 24.0 * rs.c * rs.c * sigma * sigma / (rs.b * kappa);  // Ch leading order
    const double c2 = 4.0 * rs.b_hat * rs.b_hat / rs.a_hat;  // half-margin for the hatted block
    const double c3 = 24.0 * rs.b * rs.b / (sigma * sigma);  // Cv constant term
    rs.c_hat = std::max({c1, c2, c3}) * margin;
  }

  rs.eps1 = {rs.b / (2.0 * rs.a), 2};
  rs.eps2 = kappa / (2.0 * nm1);
  rs.eps3 = {rs.c_hat / (4.0 * rs.b), 4};
  rs.eps4 = {4.0 * rs.c / rs.c_hat, -2};
  rs.eps5 = 1.0;
  rs.eps6 = 1.0;
  rs.eps7 = {rs.b_hat / (2.0 * rs.a_hat), 2};
  rs.eps8 = {rs.c * sigma * sigma / (4.0 * rs.a_hat * kappa * nm1), 2};
  rs.eps9 = {1.0, 1};
  rs.eps10 = {1.0, 1};
  rs.eps11 = nm1 / 4.0;
  rs.eps12 = {nm1 * kappa / 12.0, 1};
  rs.eps13 = {kappa / 8.0, 1};

  // Largest s <= 1 below which every sign and discriminant condition
  // holds on a dense grid.
  const int grid = 4000;
  double s_max = 0.0;
  for (int i = 1; i <= grid; ++i) {
    const double s = static_cast<double>(i) / grid;
    if (!rs.conditions_hold(s)) break;
    s_max = s;
  }
  if (s_max == 0.0)
    throw std::runtime_error("regularization_scheme: no s > 0 satisfies the sign conditions");
  rs.s_max = s_max;
  rs.t0 = std::min(1.0, s_max);

  // Gradient-bound constants from the half-margin domination of the two
  // quadratic blocks (4b^2 < ac and, by construction, 4 b_hat^2 <= a_hat c_hat).
  rs.a_tilde = 2.0 / rs.a;
  rs.c_tilde = 2.0 / rs.c + 2.0 / rs.c_hat;
  return rs;
}

std::optional<double> spectral_gap(const ModelManifold& m) {
  if (m.kind() != ModelManifold::Kind::FlatTorus) return std::nullopt;
  const double base = std::pow(2.0 * M_PI / m.side_length(), 2);
  const double fiber = m.n() - 1.0;  // gap of the (n-1)-sphere fiber
  return std::min(base, fiber);
}

}  // namespace hypo
