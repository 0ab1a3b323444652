#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "hypokinetic/frame_point.hpp"

namespace hypo {

/// Identifies one of the frame-bundle fields: the vertical rotations
/// V(i) for 1 <= i <= n-1 or the horizontal lifts H(i0) for
/// 0 <= i0 <= n-1 (H(0) generates the geodesic flow).
struct FieldId {
  enum class Type { V, H };
  Type type;
  int index;

  static FieldId V(int i) { return {Type::V, i}; }
  static FieldId H(int i0) { return {Type::H, i0}; }
};

inline void check_field(const ModelManifold& m, FieldId f) {
  if (f.type == FieldId::Type::V) {
    if (f.index < 1 || f.index > m.n() - 1) throw std::invalid_argument("V index out of range");
  } else {
    if (f.index < 0 || f.index > m.n() - 1) throw std::invalid_argument("H index out of range");
  }
}

/// Time-t flow of a field through a (possibly jet-valued) frame point.
/// Flat models: V(i) rotates the rows (e^0, e^i); H(i0) translates x by
/// t e^{i0}.  Sphere2: right multiplication of the rotation matrix
/// (x/r | e^0 | e^1) by the exact one-parameter subgroup; the geodesic
/// angle for flow time t is t/r.
template <class S>
FramePointT<S> flow(const ModelManifold& m, FieldId f, const S& t, const FramePointT<S>& p) {
  using std::cos;
  using std::sin;
  FramePointT<S> q = p;
  if (m.flat()) {
    if (f.type == FieldId::Type::V) {
      const int i = f.index;
      auto r0 = p.e.row(0), ri = p.e.row(i);
      const S c = cos(t), s = sin(t);
      q.e.row(0) = c * r0 + s * ri;
      q.e.row(i) = c * ri - s * r0;
    } else {
      q.x += (t * p.e.row(f.index)).transpose();
    }
    return q;
  }
  // Sphere2: columns u = x/r, a = e^0, b = e^1 of the group element.
  const double r = m.radius();
  Eigen::Matrix<S, Eigen::Dynamic, 1> u = q.x * (1.0 / r);
  auto a = q.e.row(0).transpose().eval();
  auto b = q.e.row(1).transpose().eval();
  if (f.type == FieldId::Type::V) {
    const S c = cos(t), s = sin(t);
    auto na = (c * a + s * b).eval();
    auto nb = (c * b - s * a).eval();
    q.e.row(0) = na.transpose();
    q.e.row(1) = nb.transpose();
    return q;
  }
  const S ang = t * (1.0 / r);
  const S c = cos(ang), s = sin(ang);
  if (f.index == 0) {
    auto nu = (c * u + s * a).eval();
    auto na = (c * a - s * u).eval();
    q.x = r * nu;
    q.e.row(0) = na.transpose();
  } else {
    auto nu = (c * u + s * b).eval();
    auto nb = (c * b - s * u).eval();
    q.x = r * nu;
    q.e.row(1) = nb.transpose();
  }
  return q;
}

namespace detail {

/// (X g)(p) for a generic bundle function g, via an order-1 jet in the
/// flow parameter.  Each call adds one level of jet nesting to the
/// scalars g sees.
template <class S, class Fn>
S field_deriv(const ModelManifold& m, FieldId f, Fn&& g, const FramePointT<S>& p) {
  using J = Jet<S>;
  const J t = J::variable(S(0.0), 0, 1, 1);
  return g(flow(m, f, t, lift<J>(p))).coeff({1});
}

/// (X^2 g)(p) via an order-2 jet in a single flow parameter.
template <class S, class Fn>
S field_deriv2(const ModelManifold& m, FieldId f, Fn&& g, const FramePointT<S>& p) {
  using J = Jet<S>;
  const J t = J::variable(S(0.0), 0, 1, 2);
  return g(flow(m, f, t, lift<J>(p))).coeff({2}) * 2.0;
}

/// (L g)(p) with L = (sigma^2/2) sum_i V_i^2 + kappa H_0.
template <class S, class Fn>
S generator_deriv(const ModelManifold& m, double sigma, double kappa, Fn&& g,
                  const FramePointT<S>& p) {
  S acc = S(0.0);
  for (int i = 1; i <= m.n() - 1; ++i) acc += field_deriv2(m, FieldId::V(i), g, p);
  acc = acc * (0.5 * sigma * sigma);
  acc += kappa * field_deriv(m, FieldId::H(0), g, p);
  return acc;
}

}  // namespace detail

/// <R(e^i, e^j) e^k, e^l> at p: zero on the flat models and the
/// constant-curvature tensor (1/r^2)(d_jk d_il - d_ik d_jl) on Sphere2.
double riemann_component(const ModelManifold& m, const FramePoint& p, int i, int j, int k, int l);

class TestFunction;  // gamma-module type; words act on raw test functions

/// Composed directional derivative (X_1 X_2 ... X_m (f o pi))(p); the
/// first element of `word` is the outermost operator.  Words of length
/// <= 3 use one multivariate flow jet; length 4 nests an order-2 jet
/// inside an order-2 jet.
double apply_word(const ModelManifold& m, std::span<const FieldId> word, const TestFunction& f,
                  const FramePoint& p);

struct BracketReport {
  double commutator_vh;      // max residual of [V_i,H_0]f = H_i f
  double double_bracket;     // max residual of [V_j,[V_i,H_0]]f = -d_ij H_0 f
  double curvature_bracket;  // max residual of [H_0,H_i]f = sum_j R^i_j V_j f
  double max_residual;
  bool pass;
};

/// Evaluates the three bracket relations on a seeded battery of test
/// functions at p and reports the worst residual against `tol`.
BracketReport verify_brackets(const ModelManifold& m, const FramePoint& p, double tol,
                              int n_functions = 20, std::uint64_t battery_seed = 2024);

}  // namespace hypo
