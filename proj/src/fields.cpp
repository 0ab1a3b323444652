#include "hypokinetic/fields.hpp"

#include <algorithm>
#include <cmath>

#include "hypokinetic/test_function.hpp"

namespace hypo {

double riemann_component(const ModelManifold& m, const FramePoint& p, int i, int j, int k, int l) {
  (void)p;  // constant-curvature models: no point dependence in the frame components
  const int n = m.n();
  auto in_range = [n](int a) { return a >= 0 && a < n; };
  if (!in_range(i) || !in_range(j) || !in_range(k) || !in_range(l))
    throw std::invalid_argument("riemann_component: index out of range");
  if (m.flat()) return 0.0;
  const double kap = m.curvature_bound();  // 1/r^2
  auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  // R(u,v)w = kap(<v,w>u - <u,w>v) in any orthonormal frame
  return kap * (d(j, k) * d(i, l) - d(i, k) * d(j, l));
}

double apply_word(const ModelManifold& m, std::span<const FieldId> word, const TestFunction& f,
                  const FramePoint& p) {
  const int len = static_cast<int>(word.size());
  if (len > 4) throw std::invalid_argument("apply_word: word length above 4 unsupported");
  for (const FieldId& w : word) check_field(m, w);
  if (len == 0) return f.eval(lift<double>(p));
  if (len <= 3) {
    // f(flow_{w_{m-1}}^{t_{m-1}}(... flow_{w_0}^{t_0}(p))), mixed partial in all t_k.
    using J = Jet<double>;
    FramePointT<J> q = lift<J>(p);
    for (int k = 0; k < len; ++k)
      q = flow(m, word[k], J::variable(0.0, k, len, len), q);
    return f.eval(q).mixed_all_ones();
  }
  // Length 4: an order-2 jet in the two outer flow parameters whose
  // coefficients are order-2 jets in the two inner ones.
  using J1 = Jet<double>;
  using J2 = Jet<J1>;
  FramePointT<J2> q = lift<J2>(p);
  q = flow(m, word[0], J2::variable(J1(0.0), 0, 2, 2), q);
  q = flow(m, word[1], J2::variable(J1(0.0), 1, 2, 2), q);
  q = flow(m, word[2], J2(J1::variable(0.0, 0, 2, 2)), q);
  q = flow(m, word[3], J2(J1::variable(0.0, 1, 2, 2)), q);
  return f.eval(q).mixed_all_ones().mixed_all_ones();
}

namespace {

double word(const ModelManifold& m, std::initializer_list<FieldId> w, const TestFunction& f,
            const FramePoint& p) {
  return apply_word(m, std::span<const FieldId>(w.begin(), w.size()), f, p);
}

}  // namespace

BracketReport verify_brackets(const ModelManifold& m, const FramePoint& p, double tol,
                              int n_functions, std::uint64_t battery_seed) {
  if (tol <= 0) throw std::invalid_argument("verify_brackets: tol > 0 required");
  const int n = m.n();
  BracketReport rep{0.0, 0.0, 0.0, 0.0, false};
  const auto fns = TestFunction::battery(m, n_functions, battery_seed);
  const auto H0 = FieldId::H(0);
  for (const TestFunction& f : fns) {
    for (int i = 1; i <= n - 1; ++i) {
      const auto Vi = FieldId::V(i);
      const auto Hi = FieldId::H(i);
      // [V_i, H_0] f = H_i f
      double res = word(m, {Vi, H0}, f, p) - word(m, {H0, Vi}, f, p) - word(m, {Hi}, f, p);
      rep.commutator_vh = std::max(rep.commutator_vh, std::abs(res));
      // [H_0, H_i] f = sum_j R^i_j V_j f
      double lhs = word(m, {H0, Hi}, f, p) - word(m, {Hi, H0}, f, p);
      for (int j = 1; j <= n - 1; ++j)
        lhs -= riemann_component(m, p, i, 0, 0, j) * word(m, {FieldId::V(j)}, f, p);
      rep.curvature_bracket = std::max(rep.curvature_bracket, std::abs(lhs));
      // [V_j, [V_i, H_0]] f = -delta_ij H_0 f
      for (int j = 1; j <= n - 1; ++j) {
        const auto Vj = FieldId::V(j);
        double dbl = word(m, {Vj, Vi, H0}, f, p) - word(m, {Vj, H0, Vi}, f, p) -
                     word(m, {Vi, H0, Vj}, f, p) + word(m, {H0, Vi, Vj}, f, p);
        if (i == j) dbl += word(m, {H0}, f, p);
        rep.double_bracket = std::max(rep.double_bracket, std::abs(dbl));
      }
    }
  }
  rep.max_residual = std::max({rep.commutator_vh, rep.double_bracket, rep.curvature_bracket});
  rep.pass = rep.max_residual <= tol;
  return rep;
}

}  // namespace hypo
