#include "hypokinetic/test_function.hpp"

#include <cmath>
#include <random>

namespace hypo {

TestFunction TestFunction::constant(double c, int xdim) {
  Term t;
  t.coef = c;
  t.x_pows = Eigen::VectorXi::Zero(xdim);
  t.v_pows = Eigen::VectorXi::Zero(xdim);
  return TestFunction({t});
}

TestFunction TestFunction::wave(double coef, Trig kind, const Eigen::VectorXd& w, double phase) {
  Term t;
  t.coef = coef;
  t.trigs.push_back({w, phase, kind});
  t.x_pows = Eigen::VectorXi::Zero(w.size());
  t.v_pows = Eigen::VectorXi::Zero(w.size());
  return TestFunction({t});
}

TestFunction TestFunction::coordinate(int d, int xdim) {
  Term t;
  t.coef = 1.0;
  t.x_pows = Eigen::VectorXi::Zero(xdim);
  t.x_pows[d] = 1;
  t.v_pows = Eigen::VectorXi::Zero(xdim);
  return TestFunction({t});
}

TestFunction TestFunction::velocity_component(int d, int xdim) {
  Term t;
  t.coef = 1.0;
  t.x_pows = Eigen::VectorXi::Zero(xdim);
  t.v_pows = Eigen::VectorXi::Zero(xdim);
  t.v_pows[d] = 1;
  return TestFunction({t});
}

TestFunction TestFunction::random(const ModelManifold& m, std::uint64_t seed, int n_terms) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::uniform_int_distribution<int> wave_int(-2, 2);
  std::uniform_real_distribution<double> wave_real(-2.0, 2.0);
  std::uniform_int_distribution<int> small(0, 2);
  std::uniform_int_distribution<int> coin(0, 1);
  const int xdim = m.xdim();
  const bool torus = m.kind() == ModelManifold::Kind::FlatTorus;

  std::vector<Term> terms;
  terms.reserve(n_terms);
  for (int t = 0; t < n_terms; ++t) {
    Term term;
    term.coef = coef(rng);
    term.x_pows = Eigen::VectorXi::Zero(xdim);
    term.v_pows = Eigen::VectorXi::Zero(xdim);

    const int n_trig = torus ? 1 + coin(rng) : coin(rng);
    for (int j = 0; j < n_trig; ++j) {
      TrigFactor tf;
      tf.wave.resize(xdim);
      for (int k = 0; k < xdim; ++k)
        tf.wave[k] = torus ? (2.0 * M_PI / m.side_length()) * wave_int(rng) : wave_real(rng);
      tf.phase = torus ? (coin(rng) ? 0.0 : M_PI / 2.0) : phase(rng);  // keep torus terms periodic
      tf.kind = coin(rng) ? Trig::Cos : Trig::Sin;
      term.trigs.push_back(tf);
    }
    if (!torus && coin(rng)) {  // low-degree coordinate polynomial factor
      term.x_pows[small(rng) % xdim] = 1 + coin(rng);
    }
    // direction dependence through a monomial in e^0, total degree <= 3
    int budget = small(rng) + 1;
    while (budget > 0) {
      term.v_pows[std::uniform_int_distribution<int>(0, xdim - 1)(rng)] += 1;
      budget -= 1 + coin(rng);
    }
    terms.push_back(term);
  }
  return TestFunction(std::move(terms));
}

std::vector<TestFunction> TestFunction::battery(const ModelManifold& m, int count,
                                                std::uint64_t seed) {
  std::vector<TestFunction> fns;
  fns.reserve(count);
  for (int i = 0; i < count; ++i)
    fns.push_back(random(m, seed * 0x9e3779b97f4a7c15ULL + 0x1234 + i, 4 + (i % 5)));
  return fns;
}

TestFunction TestFunction::operator+(const TestFunction& o) const {
  std::vector<Term> terms = terms_;
  terms.insert(terms.end(), o.terms_.begin(), o.terms_.end());
  return TestFunction(std::move(terms));
}

TestFunction TestFunction::operator*(const TestFunction& o) const {
  std::vector<Term> terms;
  terms.reserve(terms_.size() * o.terms_.size());
  for (const Term& a : terms_) {
    for (const Term& b : o.terms_) {
      Term t;
      t.coef = a.coef * b.coef;
      t.trigs = a.trigs;
      t.trigs.insert(t.trigs.end(), b.trigs.begin(), b.trigs.end());
      t.x_pows = a.x_pows + b.x_pows;
      t.v_pows = a.v_pows + b.v_pows;
      terms.push_back(std::move(t));
    }
  }
  return TestFunction(std::move(terms));
}

TestFunction TestFunction::scaled(double s) const {
  std::vector<Term> terms = terms_;
  for (Term& t : terms) t.coef *= s;
  return TestFunction(std::move(terms));
}

Jet<double> jet_eval(const TestFunction& f, const FramePoint& p, std::span<const CoordDir> dirs,
                     int order) {
  if (order < 1 || order > kMaxJetOrder) throw std::invalid_argument("jet_eval: unsupported order");
  const int d = static_cast<int>(dirs.size());
  if (d < 1 || d > kMaxJetDims) throw std::invalid_argument("jet_eval: bad direction count");
  using J = Jet<double>;
  FramePointT<J> q = lift<J>(p);
  for (int k = 0; k < d; ++k) {
    const CoordDir& dir = dirs[k];
    if (dir.frame)
      q.e(dir.row, dir.col) = J::variable(p.e(dir.row, dir.col), k, d, order);
    else
      q.x[dir.col] = J::variable(p.x[dir.col], k, d, order);
  }
  return f.eval(q);
}

}  // namespace hypo
