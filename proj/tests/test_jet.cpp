#include <doctest.h>

#include <random>

#include "hypokinetic/jet.hpp"

using hypo::Jet;
using J = Jet<double>;

namespace {

double coeff_at(const J& x, const hypo::detail::MultiIndex& al) {
  return x.coeff({al[0], al[1], al[2], al[3], al[4], al[5]});
}

J random_jet(std::mt19937_64& rng, int dims, int order) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto& tab = hypo::detail::monomial_table(dims, order);
  J r(u(rng));
  for (std::size_t i = 1; i < tab.alpha.size(); ++i) {
    J mono(u(rng));
    for (int k = 0; k < dims; ++k)
      for (int rep = 0; rep < tab.alpha[i][k]; ++rep)
        mono = mono * J::variable(0.0, k, dims, order);
    r += mono;
  }
  return r;
}

}  // namespace

TEST_CASE("constant jets broadcast against shaped jets") {
  J c(3.5);
  CHECK(c.is_constant());
  CHECK(c.value() == 3.5);
  J v = J::variable(0.25, 0, 2, 2);
  J s = c + v;
  CHECK(s.value() == doctest::Approx(3.75));
  CHECK(s.coeff({1, 0}) == 1.0);
  J p = c * v;
  CHECK(p.coeff({1, 0}) == doctest::Approx(3.5));
}

TEST_CASE("polynomial taylor coefficients match the stated convention") {
  // f = x^2 at x = 0.3, order 2: coefficients (0.09, 0.6, 1.0) for the
  // degree-(0,1,2) slots under the d^k f / k! convention
  J x = J::variable(0.3, 0, 1, 2);
  J f = x * x;
  CHECK(f.value() == doctest::Approx(0.09));
  CHECK(f.coeff({1}) == doctest::Approx(0.6));
  CHECK(f.coeff({2}) == doctest::Approx(1.0));
}

TEST_CASE("add of f and -f is the zero jet") {
  std::mt19937_64 rng(7);
  J a = random_jet(rng, 3, 3);
  J z = hypo::jet_binary(hypo::JetBinaryOp::Add, a, -a);
  const auto& tab = hypo::detail::monomial_table(3, 3);
  for (const auto& al : tab.alpha) CHECK(coeff_at(z, al) == 0.0);
}

TEST_CASE("mul by the constant one is the identity") {
  std::mt19937_64 rng(8);
  J a = random_jet(rng, 2, 3);
  J b = hypo::jet_binary(hypo::JetBinaryOp::Mul, a, J(1.0));
  CHECK(b == a);
}

TEST_CASE("sin jet matches its taylor series") {
  // sin(x) at x = 0.2, order 3: (sin .2, cos .2, -sin .2/2, -cos .2/6)
  J x = J::variable(0.2, 0, 1, 3);
  J s = hypo::jet_unary(hypo::JetUnaryOp::Sin, x);
  CHECK(s.value() == doctest::Approx(std::sin(0.2)).epsilon(1e-14));
  CHECK(s.coeff({1}) == doctest::Approx(std::cos(0.2)).epsilon(1e-14));
  CHECK(s.coeff({2}) == doctest::Approx(-std::sin(0.2) / 2).epsilon(1e-14));
  CHECK(s.coeff({3}) == doctest::Approx(-std::cos(0.2) / 6).epsilon(1e-14));
}

TEST_CASE("leibniz exactness: engine product equals the convolution formula") {
  std::mt19937_64 rng(99);
  const int dims = 3, order = 3;
  const auto& tab = hypo::detail::monomial_table(dims, order);
  for (int rep = 0; rep < 20; ++rep) {
    J a = random_jet(rng, dims, order);
    J b = random_jet(rng, dims, order);
    J ab = a * b;
    for (std::size_t k = 0; k < tab.alpha.size(); ++k) {
      // expected coefficient: sum over all exponent splits i + j = k
      double expect = 0.0;
      for (std::size_t i = 0; i < tab.alpha.size(); ++i) {
        hypo::detail::MultiIndex rem{};
        bool ok = true;
        for (int d = 0; d < dims; ++d) {
          if (tab.alpha[i][d] > tab.alpha[k][d]) {
            ok = false;
            break;
          }
          rem[d] = static_cast<std::uint8_t>(tab.alpha[k][d] - tab.alpha[i][d]);
        }
        if (ok) expect += coeff_at(a, tab.alpha[i]) * coeff_at(b, rem);
      }
      const double got = coeff_at(ab, tab.alpha[k]);
      CHECK(std::abs(got - expect) <= 1e-14 * (1.0 + std::abs(expect)));
    }
  }
}

TEST_CASE("chain rule: jet of f(phi(t)) equals the analytic composition") {
  const double t0 = 0.4;
  J t = J::variable(t0, 0, 1, 3);
  J composed = exp(sin(t));
  const double s = std::sin(t0), c = std::cos(t0), e = std::exp(s);
  CHECK(composed.value() == doctest::Approx(e).epsilon(1e-14));
  CHECK(composed.derivative({1}) == doctest::Approx(e * c).epsilon(1e-13));
  CHECK(composed.derivative({2}) == doctest::Approx(e * (c * c - s)).epsilon(1e-13));
  CHECK(composed.derivative({3}) ==
        doctest::Approx(e * (c * c * c - 3 * s * c - c)).epsilon(1e-12));
}

TEST_CASE("shape mismatch and unsupported shapes are rejected") {
  J a = J::variable(0.0, 0, 2, 2);
  J b = J::variable(0.0, 0, 3, 2);
  CHECK_THROWS_AS(a * b, std::invalid_argument);
  CHECK_THROWS_AS(J::variable(0.0, 0, 1, hypo::kMaxJetOrder + 1), std::invalid_argument);
  CHECK_THROWS_AS(J::variable(0.0, 0, hypo::kMaxJetDims + 1, 2), std::invalid_argument);
}

TEST_CASE("nested jets carry mixed higher-order information") {
  using J2 = Jet<J>;
  // g(u, v) = sin(u) * v^2 with u as the outer variable, v inner
  J v = J::variable(0.7, 0, 1, 2);
  J2 u = J2::variable(J(0.3), 0, 1, 2);
  J2 g = sin(u) * J2(v * v);
  // d^2 g / du dv = cos(u) * 2v
  const double expect = std::cos(0.3) * 2.0 * 0.7;
  CHECK(g.coeff({1}).coeff({1}) == doctest::Approx(expect).epsilon(1e-13));
}
