#include <doctest.h>

#include <cmath>
#include <random>

#include "hypokinetic/fields.hpp"
#include "hypokinetic/test_function.hpp"
#include "support/fd_oracle.hpp"

using namespace hypo;

namespace {

FramePoint angle_point(double x0, double x1, double theta) {
  FramePoint p;
  p.x.resize(2);
  p.x << x0, x1;
  p.e.resize(2, 2);
  p.e << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return p;
}

const std::vector<ModelManifold> kBattery = {
    ModelManifold::euclidean(2),      ModelManifold::euclidean(3),
    ModelManifold::euclidean(4),      ModelManifold::flat_torus(2, 1.0),
    ModelManifold::flat_torus(3, 1.0), ModelManifold::sphere2(1.0),
    ModelManifold::sphere2(2.0)};

}  // namespace

TEST_CASE("christoffel symbols vanish on the flat models") {
  for (auto m : {ModelManifold::euclidean(2), ModelManifold::flat_torus(2, 1.0)}) {
    Eigen::VectorXd x(2);
    x << 0.3, 0.8;
    for (const auto& G : christoffel(m, x)) CHECK(G.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("sphere christoffel symbols match finite differences of the metric") {
  const auto m = ModelManifold::sphere2(1.3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.4, 2.6);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd x(2);
    x << u(rng), u(rng);
    const auto G = christoffel(m, x);
    // Gamma^l_ij = 1/2 g^lk (d_i g_jk + d_j g_ik - d_k g_ij)
    const Eigen::MatrixXd ginv = chart_metric(m, x).inverse();
    Eigen::MatrixXd dg[2];
    for (int d = 0; d < 2; ++d) {
      dg[d] = Eigen::MatrixXd::Zero(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          dg[d](i, j) = testing::richardson1(
              [&](double h) {
                Eigen::VectorXd xs = x;
                xs[d] += h;
                return chart_metric(m, xs)(i, j);
              },
              1e-3);
    }
    for (int l = 0; l < 2; ++l)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double expect = 0.0;
          for (int k = 0; k < 2; ++k)
            expect += 0.5 * ginv(l, k) * (dg[i](j, k) + dg[j](i, k) - dg[k](i, j));
          CHECK(G[l](i, j) == doctest::Approx(expect).epsilon(1e-7));
          CHECK(G[l](i, j) == doctest::Approx(G[l](j, i)).epsilon(1e-12));
        }
  }
  Eigen::VectorXd pole(2);
  pole << 0.0, 1.0;
  CHECK_THROWS_AS(christoffel(m, pole), std::domain_error);
}

TEST_CASE("riemann components: flat zero, sphere constant curvature, antisymmetry") {
  std::mt19937_64 rng(11);
  const auto e2 = ModelManifold::euclidean(3);
  const auto p_flat = random_frame_point(e2, rng);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(riemann_component(e2, p_flat, i, j, j, i) == 0.0);

  for (double r : {1.0, 2.0}) {
    const auto s = ModelManifold::sphere2(r);
    const auto p = random_frame_point(s, rng);
    CHECK(riemann_component(s, p, 1, 0, 0, 1) == doctest::Approx(1.0 / (r * r)));
    // antisymmetry in both pairs
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) {
            const double v = riemann_component(s, p, i, j, k, l);
            CHECK(riemann_component(s, p, j, i, k, l) == doctest::Approx(-v));
            CHECK(riemann_component(s, p, i, j, l, k) == doctest::Approx(-v));
          }
    CHECK(riemann_component(s, p, 1, 1, 0, 1) == 0.0);
  }
  CHECK_THROWS_AS(riemann_component(e2, p_flat, 0, 0, 0, 3), std::invalid_argument);
}

TEST_CASE("apply_word: empty word, flat hand values, length cap") {
  const auto m = ModelManifold::euclidean(2);
  const auto p = angle_point(0.2, -0.4, 0.9);
  const auto f = TestFunction::coordinate(0, 2);  // first chart coordinate

  CHECK(apply_word(m, {}, f, p) == doctest::Approx(0.2));

  const FieldId h0[] = {FieldId::H(0)};
  CHECK(apply_word(m, h0, f, p) == doctest::Approx(std::cos(0.9)).epsilon(1e-13));

  // V_1 H_0 x_1 = first component of e^1
  const FieldId vh[] = {FieldId::V(1), FieldId::H(0)};
  CHECK(apply_word(m, vh, f, p) == doctest::Approx(-std::sin(0.9)).epsilon(1e-13));

  // oracle: central differences along the V_1 flow of H_0 f
  const double fd = testing::richardson1(
      [&](double t) {
        const auto q = flow(m, FieldId::V(1), t, lift<double>(p));
        FramePoint qq{q.x, q.e};
        return apply_word(m, h0, f, qq);
      },
      1e-3);
  CHECK(apply_word(m, vh, f, p) == doctest::Approx(fd).epsilon(1e-8));

  const FieldId five[] = {FieldId::V(1), FieldId::V(1), FieldId::V(1), FieldId::V(1),
                          FieldId::V(1)};
  CHECK_THROWS_AS(apply_word(m, five, f, p), std::invalid_argument);
}

TEST_CASE("length-4 words agree with nested first derivatives") {
  for (const auto& m : {ModelManifold::flat_torus(2, 1.0), ModelManifold::sphere2(1.0)}) {
    const auto p = random_frame_point(m, 31u);
    const auto f = TestFunction::random(m, 77, 5);
    const FieldId w4[] = {FieldId::V(1), FieldId::H(0), FieldId::V(1), FieldId::H(1)};
    const double direct = apply_word(m, w4, f, p);
    // FD in the outermost flow parameter of the remaining length-3 word
    const FieldId w3[] = {FieldId::H(0), FieldId::V(1), FieldId::H(1)};
    const double fd = testing::richardson1(
        [&](double t) {
          const auto q = flow(m, FieldId::V(1), t, lift<double>(p));
          FramePoint qq{q.x, q.e};
          return apply_word(m, w3, f, qq);
        },
        1e-3);
    CHECK(direct == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("bracket relations hold on the full battery") {
  for (const auto& m : kBattery) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto p = random_frame_point(m, 1000 + rep);
      const auto rep_out = verify_brackets(m, p, 1e-8, 6, 99);
      CHECK(rep_out.pass);
      CHECK(rep_out.max_residual <= 1e-8);
    }
  }
}

TEST_CASE("bracket residuals vanish exactly for constant functions") {
  const auto m = ModelManifold::flat_torus(2, 1.0);
  const auto p = random_frame_point(m, 3u);
  const auto f = TestFunction::constant(4.2, 2);
  const FieldId w[] = {FieldId::V(1), FieldId::H(0)};
  CHECK(apply_word(m, w, f, p) == 0.0);
  const FieldId w2[] = {FieldId::H(0), FieldId::V(1)};
  CHECK(apply_word(m, w2, f, p) == 0.0);
}

TEST_CASE("sphere bracket residuals are invariant under left translation") {
  const auto m = ModelManifold::sphere2(1.0);
  std::mt19937_64 rng(17);
  const auto p = random_frame_point(m, rng);
  // left-translate the group element by a fixed rotation Q
  const auto q_rot = random_frame_point(m, 777u);
  Eigen::Matrix3d Q, R;
  Q.row(0) = q_rot.x.transpose() / m.radius();
  Q.row(1) = q_rot.e.row(0);
  Q.row(2) = q_rot.e.row(1);
  R.row(0) = p.x.transpose() / m.radius();
  R.row(1) = p.e.row(0);
  R.row(2) = p.e.row(1);
  const Eigen::Matrix3d QR = (R * Q.transpose()).eval();  // rows act as columns^T
  FramePoint p2;
  p2.x = m.radius() * QR.row(0).transpose();
  p2.e.resize(2, 3);
  p2.e.row(0) = QR.row(1);
  p2.e.row(1) = QR.row(2);

  const auto r1 = verify_brackets(m, p, 1e-8, 8, 5);
  const auto r2 = verify_brackets(m, p2, 1e-8, 8, 5);
  CHECK(std::abs(r1.max_residual - r2.max_residual) <= 1e-8);
  CHECK(r1.pass);
  CHECK(r2.pass);
}

TEST_CASE("flat consistency: flow evaluation equals the christoffel-free operator route") {
  // On flat manifolds H_i = sum_k e^i_k d/dx_k with no christoffel part;
  // apply the word through ambient directional derivatives instead of flows.
  const auto m = ModelManifold::euclidean(2);
  const auto p = random_frame_point(m, 21u);
  const auto f = TestFunction::random(m, 22, 5);

  // X g = sum_k coeff_k dg/dz_k with linear coefficient functions
  struct Ambient {
    const ModelManifold& m;
    double deriv(const TestFunction& fn, const FramePoint& at, std::span<const FieldId> word) {
      if (word.empty()) return fn(at);
      const FieldId X = word[0];
      const auto rest = word.subspan(1);
      double acc = 0.0;
      const int n = m.n();
      // numerator g evaluated with one ambient coordinate seeded
      auto partial = [&](CoordDir dir) {
        const double h = 1e-4;
        auto shifted = [&](double t) {
          FramePoint q = at;
          if (dir.frame)
            q.e(dir.row, dir.col) += t;
          else
            q.x[dir.col] += t;
          return deriv(fn, q, rest);
        };
        return testing::richardson1(shifted, h);
      };
      if (X.type == FieldId::Type::V) {
        for (int k = 0; k < n; ++k) {
          acc += at.e(X.index, k) * partial(CoordDir::E(0, k));
          acc -= at.e(0, k) * partial(CoordDir::E(X.index, k));
        }
      } else {
        for (int k = 0; k < n; ++k) acc += at.e(X.index, k) * partial(CoordDir::X(k));
      }
      return acc;
    }
  } ambient{m};

  std::vector<std::vector<FieldId>> words = {
      {FieldId::H(0)},
      {FieldId::H(1), FieldId::H(0)},
      {FieldId::V(1), FieldId::H(0)},
  };
  for (const auto& w : words) {
    const double via_flows = apply_word(m, w, f, p);
    const double via_ambient = ambient.deriv(f, p, w);
    CHECK(via_flows == doctest::Approx(via_ambient).epsilon(1e-5));
  }
}

TEST_CASE("random frame points: determinism, orthonormality, uniformity") {
  const auto torus = ModelManifold::flat_torus(2, 1.0);
  const auto a = random_frame_point(torus, 42u);
  const auto b = random_frame_point(torus, 42u);
  CHECK(a.x == b.x);
  CHECK(a.e == b.e);

  for (const auto& m : kBattery) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto p = random_frame_point(m, 100 + rep);
      CHECK(orthonormality_defect(m, p) <= 1e-12);
    }
  }

  std::mt19937_64 rng(4242);
  const int N = 10000;
  double sum = 0.0;
  for (int i = 0; i < N; ++i) sum += random_frame_point(torus, rng).x[0];
  const double mean = sum / N;
  const double se = 1.0 / std::sqrt(12.0 * N);  // std of U(0,1) over sqrt(N)
  CHECK(std::abs(mean - 0.5) <= 4.0 * se);
}

TEST_CASE("jet_eval: constants, polynomials, and the finite-difference oracle") {
  const auto m = ModelManifold::flat_torus(2, 1.0);
  const auto p = random_frame_point(m, 9u);

  const auto c = TestFunction::constant(2.5, 2);
  const CoordDir dx[] = {CoordDir::X(0)};
  auto jc = jet_eval(c, p, dx, 2);
  CHECK(jc.value() == 2.5);
  CHECK(jc.is_constant());

  CHECK_THROWS_AS(jet_eval(c, p, dx, hypo::kMaxJetOrder + 1), std::invalid_argument);

  // every derivative of random functions up to order 3 vs Richardson FD
  std::mt19937_64 rng(55);
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto f = TestFunction::random(m, 500 + rep, 4);
    const auto q = random_frame_point(m, rng);
    for (CoordDir dir : {CoordDir::X(0), CoordDir::X(1), CoordDir::E(0, 0), CoordDir::E(0, 1)}) {
      const CoordDir dirs[] = {dir};
      const auto jet = jet_eval(f, q, dirs, 3);
      auto shifted = [&](double t) {
        FramePoint s = q;
        if (dir.frame)
          s.e(dir.row, dir.col) += t;
        else
          s.x[dir.col] += t;
        return f(s);
      };
      const double d1 = testing::richardson1(shifted);
      const double d2 = testing::richardson2(shifted);
      const double d3 = testing::richardson3(shifted);
      CHECK(std::abs(jet.derivative({1}) - d1) <= 1e-6 * (1.0 + std::abs(d1)));
      CHECK(std::abs(jet.derivative({2}) - d2) <= 1e-5 * (1.0 + std::abs(d2)));
      CHECK(std::abs(jet.derivative({3}) - d3) <= 1e-3 * (1.0 + std::abs(d3)));
      ++checked;
    }
  }
  CHECK(checked == 400);
}

TEST_CASE("manifold parsing and invariants") {
  CHECK(ModelManifold::parse("euclidean:3").n() == 3);
  CHECK(ModelManifold::parse("flat-torus:2:1").side_length() == 1.0);
  CHECK(ModelManifold::parse("sphere2:2").curvature_bound() == doctest::Approx(0.25));
  CHECK_THROWS_AS(ModelManifold::parse("flat-torus:1:1"), std::invalid_argument);
  CHECK_THROWS_AS(ModelManifold::parse("sphere2:-1"), std::invalid_argument);
  CHECK_THROWS_AS(ModelManifold::parse("mobius:2"), std::invalid_argument);
}
