#include "hypokinetic/gamma.hpp"

#include <algorithm>
#include <cmath>

namespace hypo {

namespace {

using detail::field_deriv;
using detail::field_deriv2;
using detail::generator_deriv;

template <class S, class Fn>
S vert_laplacian(const ModelManifold& m, Fn&& g, const FramePointT<S>& p) {
  S acc = S(0.0);
  for (int i = 1; i <= m.n() - 1; ++i) acc += field_deriv2(m, FieldId::V(i), g, p);
  return acc;
}

/// First-order bilinear form of `kind` for two generic bundle functions.
template <class S, class Ff, class Fg>
S gamma_at(GammaKind kind, const ModelManifold& m, Ff&& f, Fg&& g, const FramePointT<S>& p) {
  const int n = m.n();
  S acc = S(0.0);
  switch (kind) {
    case GammaKind::Vv:
      for (int i = 1; i <= n - 1; ++i)
        acc += field_deriv(m, FieldId::V(i), f, p) * field_deriv(m, FieldId::V(i), g, p);
      return acc;
    case GammaKind::Vh:
      for (int i = 1; i <= n - 1; ++i)
        acc += field_deriv(m, FieldId::H(i), f, p) * field_deriv(m, FieldId::V(i), g, p) +
               field_deriv(m, FieldId::H(i), g, p) * field_deriv(m, FieldId::V(i), f, p);
      return acc * 0.5;
    case GammaKind::Hh:
      for (int i = 1; i <= n - 1; ++i)
        acc += field_deriv(m, FieldId::H(i), f, p) * field_deriv(m, FieldId::H(i), g, p);
      return acc;
    case GammaKind::Xi:
      return field_deriv(m, FieldId::H(0), f, p) * field_deriv(m, FieldId::H(0), g, p);
    case GammaKind::SigmaV:
      return vert_laplacian(m, f, p) * vert_laplacian(m, g, p);
    case GammaKind::SigmaVXi:
      acc = vert_laplacian(m, f, p) * field_deriv(m, FieldId::H(0), g, p) +
            vert_laplacian(m, g, p) * field_deriv(m, FieldId::H(0), f, p);
      return acc * 0.5;
  }
  throw std::logic_error("gamma_at: bad kind");
}

/// Derivative words of f at p that the closed forms consume.
struct Blocks {
  int n;
  Eigen::VectorXd vf, hf;        // V_i f, H_i f (1-based stored at i-1)
  double xif;                    // H_0 f
  Eigen::MatrixXd hess_vv;       // V_i V_j f
  Eigen::MatrixXd hess_vh;       // V_i H_j f
  Eigen::VectorXd hess_vxi;      // V_i H_0 f
  Eigen::VectorXd grad_v_lap;    // V_i Delta^v f
  double lap;                    // Delta^v f
  double lap_vh;                 // sum_i V_i H_i f
};

double word1(const ModelManifold& m, FieldId a, const TestFunction& f, const FramePoint& p) {
  const FieldId w[] = {a};
  return apply_word(m, w, f, p);
}
double word2(const ModelManifold& m, FieldId a, FieldId b, const TestFunction& f,
             const FramePoint& p) {
  const FieldId w[] = {a, b};
  return apply_word(m, w, f, p);
}
double word3(const ModelManifold& m, FieldId a, FieldId b, FieldId c, const TestFunction& f,
             const FramePoint& p) {
  const FieldId w[] = {a, b, c};
  return apply_word(m, w, f, p);
}

Blocks compute_blocks(const ModelManifold& m, const TestFunction& f, const FramePoint& p,
                      bool third_order) {
  const int n = m.n();
  const int nv = n - 1;
  Blocks b;
  b.n = n;
  b.vf.resize(nv);
  b.hf.resize(nv);
  b.hess_vv.resize(nv, nv);
  b.hess_vh.resize(nv, nv);
  b.hess_vxi.resize(nv);
  b.grad_v_lap = Eigen::VectorXd::Zero(nv);
  for (int i = 1; i <= nv; ++i) {
    b.vf[i - 1] = word1(m, FieldId::V(i), f, p);
    b.hf[i - 1] = word1(m, FieldId::H(i), f, p);
    b.hess_vxi[i - 1] = word2(m, FieldId::V(i), FieldId::H(0), f, p);
    for (int j = 1; j <= nv; ++j) {
      b.hess_vv(i - 1, j - 1) = word2(m, FieldId::V(i), FieldId::V(j), f, p);
      b.hess_vh(i - 1, j - 1) = word2(m, FieldId::V(i), FieldId::H(j), f, p);
    }
  }
  b.xif = word1(m, FieldId::H(0), f, p);
  b.lap = b.hess_vv.trace();
  b.lap_vh = b.hess_vh.trace();
  if (third_order) {
    for (int i = 1; i <= nv; ++i)
      for (int j = 1; j <= nv; ++j)
        b.grad_v_lap[i - 1] += word3(m, FieldId::V(i), FieldId::V(j), FieldId::V(j), f, p);
  }
  return b;
}

double curvature_form(const ModelManifold& m, const FramePoint& p, const Eigen::VectorXd& v,
                      const Eigen::VectorXd& w) {
  // <R(grad, e^0) e^0, grad'> in frame components
  double acc = 0.0;
  for (int i = 1; i < m.n(); ++i)
    for (int j = 1; j < m.n(); ++j)
      acc += v[i - 1] * w[j - 1] * riemann_component(m, p, i, 0, 0, j);
  return acc;
}

/// Closed-form value plus the largest |summand| for residual scaling.
struct ValueScale {
  double value;
  double scale;
};

ValueScale closed_form(GammaKind kind, const ModelManifold& m, double sigma, double kappa,
                       const TestFunction& f, const FramePoint& p) {
  const double s2h = 0.5 * sigma * sigma;
  const int n = m.n();
  const bool third = kind == GammaKind::SigmaV || kind == GammaKind::SigmaVXi;
  const Blocks b = compute_blocks(m, f, p, third);
  auto fin = [](std::initializer_list<double> parts) {
    double v = 0.0, s = 0.0;
    for (double x : parts) {
      v += x;
      s = std::max(s, std::abs(x));
    }
    return ValueScale{v, 1.0 + s};
  };
  switch (kind) {
    case GammaKind::Vv:
      // (sigma^2/2)(|Hess^v|^2 + (n-2)|grad_v|^2) - kappa <grad_v, grad_h~>.
      // The kappa term carries the sign forced by [H_0, V_i] = -H_i.
      return fin({s2h * b.hess_vv.squaredNorm(), s2h * (n - 2) * b.vf.squaredNorm(),
                  -kappa * b.vf.dot(b.hf)});
    case GammaKind::Vh:
      return fin({s2h * (b.hess_vv.cwiseProduct(b.hess_vh)).sum(),
                  s2h * 0.5 * (n - 1) * b.vf.dot(b.hf), -s2h * b.hess_vxi.dot(b.vf),
                  0.5 * kappa * curvature_form(m, p, b.vf, b.vf),
                  -0.5 * kappa * b.hf.squaredNorm()});
    case GammaKind::Hh:
      return fin({s2h * b.hess_vh.squaredNorm(), s2h * b.hf.squaredNorm(),
                  -2.0 * s2h * b.hess_vxi.dot(b.hf),
                  kappa * curvature_form(m, p, b.vf, b.hf)});
    case GammaKind::Xi:
      return fin({s2h * b.hess_vxi.squaredNorm(), s2h * (n - 1) * b.xif * b.xif,
                  2.0 * s2h * b.lap_vh * b.xif});
    case GammaKind::SigmaV:
      return fin({s2h * b.grad_v_lap.squaredNorm(), -(n - 1) * kappa * b.lap * b.xif,
                  -2.0 * kappa * b.lap * b.lap_vh});
    case GammaKind::SigmaVXi:
      return fin({0.25 * (n - 1) * sigma * sigma * b.lap * b.xif, s2h * b.lap * b.lap_vh,
                  s2h * b.grad_v_lap.dot(b.hess_vxi), -0.5 * (n - 1) * kappa * b.xif * b.xif,
                  -kappa * b.lap_vh * b.xif});
  }
  throw std::logic_error("closed_form: bad kind");
}

}  // namespace

const char* to_string(GammaKind k) {
  switch (k) {
    case GammaKind::Vv: return "Vv";
    case GammaKind::Vh: return "Vh";
    case GammaKind::Hh: return "Hh";
    case GammaKind::Xi: return "Xi";
    case GammaKind::SigmaV: return "SigmaV";
    case GammaKind::SigmaVXi: return "SigmaVXi";
  }
  return "?";
}

double generator_apply(const ModelManifold& m, double sigma, double kappa, const TestFunction& f,
                       const FramePoint& p) {
  if (sigma < 0) throw std::invalid_argument("generator_apply: sigma >= 0 required");
  auto fe = [&f](const auto& q) { return f.eval(q); };
  return generator_deriv(m, sigma, kappa, fe, lift<double>(p));
}

double gamma(GammaKind kind, const ModelManifold& m, const TestFunction& f, const TestFunction& g,
             const FramePoint& p) {
  auto fe = [&f](const auto& q) { return f.eval(q); };
  auto ge = [&g](const auto& q) { return g.eval(q); };
  return gamma_at(kind, m, fe, ge, lift<double>(p));
}

double gamma2_bilinear(GammaKind kind, const ModelManifold& m, double sigma, double kappa,
                       const TestFunction& f, const TestFunction& g, const FramePoint& p) {
  auto fe = [&f](const auto& q) { return f.eval(q); };
  auto ge = [&g](const auto& q) { return g.eval(q); };
  auto Lf = [&](const auto& q) { return generator_deriv(m, sigma, kappa, fe, q); };
  auto Lg = [&](const auto& q) { return generator_deriv(m, sigma, kappa, ge, q); };
  auto form = [&](const auto& q) { return gamma_at(kind, m, fe, ge, q); };
  const auto p0 = lift<double>(p);
  const double Lform = generator_deriv(m, sigma, kappa, form, p0);
  const double cross1 = gamma_at(kind, m, Lf, ge, p0);
  const double cross2 = gamma_at(kind, m, fe, Lg, p0);
  return 0.5 * (Lform - cross1 - cross2);
}

double gamma2(GammaKind kind, EvalMethod method, const ModelManifold& m, double sigma,
              double kappa, const TestFunction& f, const FramePoint& p) {
  if (kind == GammaKind::SigmaV || kind == GammaKind::SigmaVXi)
    throw std::invalid_argument("gamma2: use sigma2 for the Sigma kinds");
  if (method == EvalMethod::Closed) return closed_form(kind, m, sigma, kappa, f, p).value;
  return gamma2_bilinear(kind, m, sigma, kappa, f, f, p);
}

double sigma2(GammaKind kind, EvalMethod method, const ModelManifold& m, double sigma,
              double kappa, const TestFunction& f, const FramePoint& p) {
  if (kind != GammaKind::SigmaV && kind != GammaKind::SigmaVXi)
    throw std::invalid_argument("sigma2: kind must be SigmaV or SigmaVXi");
  if (method == EvalMethod::Closed) return closed_form(kind, m, sigma, kappa, f, p).value;

  auto fe = [&f](const auto& q) { return f.eval(q); };
  auto Lf = [&](const auto& q) { return generator_deriv(m, sigma, kappa, fe, q); };
  const auto p0 = lift<double>(p);
  if (kind == GammaKind::SigmaV) {
    auto form = [&](const auto& q) {
      auto d = vert_laplacian(m, fe, q);
      return d * d;
    };
    const double Lform = generator_deriv(m, sigma, kappa, form, p0);
    const double cross = vert_laplacian(m, Lf, p0) * vert_laplacian(m, fe, p0);
    return 0.5 * (Lform - 2.0 * cross);
  }
  auto form = [&](const auto& q) {
    return vert_laplacian(m, fe, q) * field_deriv(m, FieldId::H(0), fe, q);
  };
  const double Lform = generator_deriv(m, sigma, kappa, form, p0);
  const double cross1 = vert_laplacian(m, Lf, p0) * field_deriv(m, FieldId::H(0), fe, p0);
  const double cross2 = vert_laplacian(m, fe, p0) * field_deriv(m, FieldId::H(0), Lf, p0);
  return 0.5 * (Lform - cross1 - cross2);
}

double gamma2_scale(GammaKind kind, const ModelManifold& m, double sigma, double kappa,
                    const TestFunction& f, const FramePoint& p) {
  return closed_form(kind, m, sigma, kappa, f, p).scale;
}

double tensor_T(const TensorCoefficients& tc, const ModelManifold& m, const TestFunction& f,
                const FramePoint& p) {
  const double gv = gamma(GammaKind::Vv, m, f, f, p);
  const double gvh = gamma(GammaKind::Vh, m, f, f, p);
  const double gh = gamma(GammaKind::Hh, m, f, f, p);
  const double gxi = gamma(GammaKind::Xi, m, f, f, p);
  return tc.a * gv - 2.0 * tc.b * gvh + tc.c * gh + tc.d * gxi;
}

double tensor_T2(const TensorCoefficients& tc, const ModelManifold& m, double sigma, double kappa,
                 const TestFunction& f, const FramePoint& p) {
  const double g2v = gamma2(GammaKind::Vv, EvalMethod::Closed, m, sigma, kappa, f, p);
  const double g2vh = gamma2(GammaKind::Vh, EvalMethod::Closed, m, sigma, kappa, f, p);
  const double g2h = gamma2(GammaKind::Hh, EvalMethod::Closed, m, sigma, kappa, f, p);
  const double g2xi = gamma2(GammaKind::Xi, EvalMethod::Closed, m, sigma, kappa, f, p);
  return tc.a * g2v - 2.0 * tc.b * g2vh + tc.c * g2h + tc.d * g2xi;
}

BakryEmerySlack check_bakry_emery(const CoefficientSet& cs, const ModelManifold& m,
                                  const TestFunction& f, const FramePoint& p) {
  if (m.curvature_bound() > cs.M + 1e-12)
    throw std::invalid_argument("check_bakry_emery: manifold curvature exceeds the M in cs");
  if (m.n() != cs.n)
    throw std::invalid_argument("check_bakry_emery: dimension mismatch with cs");
  const double g2v = gamma2(GammaKind::Vv, EvalMethod::Closed, m, cs.sigma, cs.kappa, f, p);
  const double g2vh = gamma2(GammaKind::Vh, EvalMethod::Closed, m, cs.sigma, cs.kappa, f, p);
  const double g2h = gamma2(GammaKind::Hh, EvalMethod::Closed, m, cs.sigma, cs.kappa, f, p);
  const double g2xi = gamma2(GammaKind::Xi, EvalMethod::Closed, m, cs.sigma, cs.kappa, f, p);
  const double grad_v2 = gamma(GammaKind::Vv, m, f, f, p);
  const double grad_h2 = gamma(GammaKind::Hh, m, f, f, p);

  BakryEmerySlack out;
  {
    const double parts[] = {cs.a * g2v, -2.0 * cs.b * g2vh, cs.c * g2h, cs.d * g2xi,
                            cs.K * grad_v2, -grad_h2};
    out.s1 = 0.0;
    out.scale1 = 1.0;
    for (double x : parts) {
      out.s1 += x;
      out.scale1 = std::max(out.scale1, 1.0 + std::abs(x));
    }
  }
  {
    TensorCoefficients tc{cs.a, cs.b, cs.c, cs.d};
    const double T2 = cs.a * g2v - 2.0 * cs.b * g2vh + cs.c * g2h + cs.d * g2xi;
    const double T = tensor_T(tc, m, f, p);
    const double G = 0.5 * cs.sigma * cs.sigma * grad_v2;  // Gamma = (sigma^2/2) Gamma^v
    out.s2 = T2 - cs.rho * T + cs.K * G;
    out.scale2 = 1.0 + std::max({std::abs(T2), std::abs(cs.rho * T), std::abs(cs.K * G)});
  }
  return out;
}

IdentityCertification certify_identity(GammaKind kind, const ModelManifold& m, double sigma,
                                       double kappa, int samples, std::uint64_t seed, double tol) {
  IdentityCertification cert;
  cert.kind = kind;
  cert.manifold = m.describe();
  cert.samples = samples;
  cert.tol = tol;
  cert.max_residual = 0.0;
  const bool is_sigma = kind == GammaKind::SigmaV || kind == GammaKind::SigmaVXi;
  for (int i = 0; i < samples; ++i) {
    const std::uint64_t si = seed + 1000003ULL * i;
    const TestFunction f = TestFunction::random(m, si, 4 + (i % 4));
    const FramePoint p = random_frame_point(m, si ^ 0xabcdef12345ULL);
    const double def = is_sigma ? sigma2(kind, EvalMethod::Definitional, m, sigma, kappa, f, p)
                                : gamma2(kind, EvalMethod::Definitional, m, sigma, kappa, f, p);
    const double clo = is_sigma ? sigma2(kind, EvalMethod::Closed, m, sigma, kappa, f, p)
                                : gamma2(kind, EvalMethod::Closed, m, sigma, kappa, f, p);
    const double scale = std::max(gamma2_scale(kind, m, sigma, kappa, f, p),
                                  1.0 + std::max(std::abs(def), std::abs(clo)));
    const double rel = std::abs(def - clo) / scale;
    cert.max_residual = std::max(cert.max_residual, rel);
    if (rel > tol) cert.failing_seeds.push_back(si);
  }
  cert.pass = cert.failing_seeds.empty();
  return cert;
}

SlackCertification certify_bakry_emery(const CoefficientSet& cs, const ModelManifold& m,
                                       int samples, std::uint64_t seed, double tol) {
  SlackCertification cert;
  cert.manifold = m.describe();
  cert.samples = samples;
  cert.min_slack1_rel = std::numeric_limits<double>::infinity();
  cert.min_slack2_rel = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const std::uint64_t si = seed + 7000003ULL * i;
    const TestFunction f = TestFunction::random(m, si, 4 + (i % 4));
    const FramePoint p = random_frame_point(m, si ^ 0x5ad5ad5adULL);
    const BakryEmerySlack s = check_bakry_emery(cs, m, f, p);
    cert.min_slack1_rel = std::min(cert.min_slack1_rel, s.s1 / s.scale1);
    cert.min_slack2_rel = std::min(cert.min_slack2_rel, s.s2 / s.scale2);
  }
  cert.pass = cert.min_slack1_rel >= -tol && cert.min_slack2_rel >= -tol;
  return cert;
}

}  // namespace hypo
