#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

namespace hypo {

/// Maximum number of simultaneous differentiation directions and the
/// highest truncation order supported by the jet engine.  Third
/// derivatives are the deepest ones any closed form needs; longer
/// derivative words are evaluated by nesting jets instead of raising
/// the cap.
inline constexpr int kMaxJetDims = 6;
inline constexpr int kMaxJetOrder = 3;

namespace detail {

using MultiIndex = std::array<std::uint8_t, kMaxJetDims>;

/// Dense monomial bookkeeping for truncated polynomials in `dims`
/// variables of total degree <= `order`.  Monomials are ordered by
/// (degree, lexicographic), the constant monomial first.
struct MonomialTable {
  int dims = 0;
  int order = 0;
  std::vector<MultiIndex> alpha;   // multi-index per linear position
  std::vector<int> degree;
  struct ProductEntry {
    std::int32_t lhs, rhs, out;
  };
  std::vector<ProductEntry> product;  // all pairs with degree sum <= order

  int find(const MultiIndex& a) const {
    for (std::size_t k = 0; k < alpha.size(); ++k)
      if (alpha[k] == a) return static_cast<int>(k);
    return -1;
  }
};

const MonomialTable& monomial_table(int dims, int order);

}  // namespace detail

/// Truncated multivariate Taylor expansion ("jet") used as a drop-in
/// scalar type.  Coefficients store the Taylor convention d^a f / a!.
/// The scalar parameter S may itself be a Jet, which is how fourth-order
/// information is reached without raising the order cap: an order-2 jet
/// whose coefficients are order-2 jets.
///
/// A default-constructed or double-constructed jet is a *constant*: it
/// carries no direction information and combines with jets of any shape.
template <class S>
class Jet {
 public:
  using Scalar = S;

  Jet() : val_(0.0) {}
  Jet(double v) : val_(v) {}  // NOLINT: implicit by design
  template <class T = S, class = std::enable_if_t<!std::is_same_v<T, double>>>
  Jet(const S& v) : val_(v) {}  // NOLINT

  /// Seeds coordinate variable `var` of a fresh (dims, order) jet.
  static Jet variable(const S& v, int var, int dims, int order) {
    if (dims < 1 || dims > kMaxJetDims) throw std::invalid_argument("jet: dims out of range");
    if (order < 1 || order > kMaxJetOrder) throw std::invalid_argument("jet: unsupported order");
    if (var < 0 || var >= dims) throw std::invalid_argument("jet: variable index out of range");
    const auto& tab = detail::monomial_table(dims, order);
    Jet j;
    j.dims_ = dims;
    j.order_ = order;
    j.val_ = v;
    j.coeffs_.assign(tab.alpha.size() - 1, S(0.0));
    j.coeffs_[var] = S(1.0);  // degree-1 monomials come right after the constant
    return j;
  }

  static Jet constant(const S& v) { return Jet(v); }

  bool is_constant() const { return coeffs_.empty(); }
  int dims() const { return dims_; }
  int order() const { return order_; }
  const S& value() const { return val_; }
  S& value() { return val_; }

  /// Taylor coefficient (d^a f / a!) for the given exponents; the list
  /// is padded with zeros up to dims.
  S coeff(std::initializer_list<int> exponents) const {
    detail::MultiIndex a{};
    int i = 0, deg = 0;
    for (int e : exponents) {
      if (i >= kMaxJetDims) throw std::invalid_argument("jet: too many exponents");
      a[i++] = static_cast<std::uint8_t>(e);
      deg += e;
    }
    if (deg == 0) return val_;
    if (is_constant()) return S(0.0);
    const auto& tab = detail::monomial_table(dims_, order_);
    int k = tab.find(a);
    if (k < 0) throw std::invalid_argument("jet: exponent outside truncation");
    return coeffs_[k - 1];
  }

  /// Mixed first partial in every variable: the coefficient of
  /// t_1 t_2 ... t_d, which equals the raw derivative (a! = 1).
  S mixed_all_ones() const {
    if (is_constant()) return S(0.0);
    if (order_ < dims_) throw std::logic_error("jet: mixed partial above truncation");
    detail::MultiIndex a{};
    for (int i = 0; i < dims_; ++i) a[i] = 1;
    const auto& tab = detail::monomial_table(dims_, order_);
    return coeffs_[tab.find(a) - 1];
  }

  /// Raw derivative d^a f (Taylor coefficient times a!).
  S derivative(std::initializer_list<int> exponents) const {
    double fact = 1.0;
    for (int e : exponents)
      for (int k = 2; k <= e; ++k) fact *= k;
    return coeff(exponents) * fact;
  }

  int n_coeffs() const { return is_constant() ? 1 : static_cast<int>(coeffs_.size()) + 1; }

  Jet operator-() const {
    Jet r(*this);
    r.val_ = -r.val_;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  Jet& operator+=(const Jet& o) {
    if (o.is_constant()) {
      val_ += o.val_;
      return *this;
    }
    if (is_constant()) {
      S v = val_;
      *this = o;
      val_ += v;
      return *this;
    }
    check_shape(o);
    val_ += o.val_;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    return *this;
  }

  Jet& operator-=(const Jet& o) {
    *this += -o;
    return *this;
  }

  Jet& operator*=(const Jet& o) {
    *this = mul(*this, o);
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
  friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
  friend Jet operator*(const Jet& a, const Jet& b) { return mul(a, b); }

  friend Jet operator+(Jet a, double s) { a.val_ += S(s); return a; }
  friend Jet operator+(double s, Jet a) { a.val_ += S(s); return a; }
  friend Jet operator-(Jet a, double s) { a.val_ -= S(s); return a; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, double s) {
    a.val_ = a.val_ * S(s);
    for (auto& c : a.coeffs_) c = c * S(s);
    return a;
  }
  friend Jet operator*(double s, Jet a) { return a * s; }
  friend Jet operator/(Jet a, double s) { return a * (1.0 / s); }

  friend bool operator==(const Jet& a, const Jet& b) {
    return a.dims_ == b.dims_ && a.order_ == b.order_ && a.val_ == b.val_ && a.coeffs_ == b.coeffs_;
  }

  static Jet mul(const Jet& a, const Jet& b) {
    if (a.is_constant()) {
      Jet r(b);
      r.val_ = a.val_ * b.val_;
      for (auto& c : r.coeffs_) c = a.val_ * c;
      return r;
    }
    if (b.is_constant()) return mul(b, a);
    a.check_shape(b);
    const auto& tab = detail::monomial_table(a.dims_, a.order_);
    Jet r;
    r.dims_ = a.dims_;
    r.order_ = a.order_;
    r.val_ = S(0.0);
    r.coeffs_.assign(a.coeffs_.size(), S(0.0));
    for (const auto& pe : tab.product) {
      const S& x = pe.lhs == 0 ? a.val_ : a.coeffs_[pe.lhs - 1];
      const S& y = pe.rhs == 0 ? b.val_ : b.coeffs_[pe.rhs - 1];
      if (pe.out == 0)
        r.val_ += x * y;
      else
        r.coeffs_[pe.out - 1] += x * y;
    }
    return r;
  }

  /// Composes a univariate analytic function with this jet given the
  /// scaled derivatives u_k = u^(k)(value)/k!, k = 0..order.
  Jet compose(const std::array<S, kMaxJetOrder + 1>& u) const {
    if (is_constant()) return Jet(u[0]);
    Jet nil(*this);
    nil.val_ = S(0.0);  // nilpotent part
    Jet r(u[0]);
    Jet p = nil;
    for (int k = 1; k <= order_; ++k) {
      Jet term = p;
      term.val_ = term.val_ * u[k];
      for (auto& c : term.coeffs_) c = c * u[k];
      r += term;
      if (k < order_) p = mul(p, nil);
    }
    return r;
  }

 private:
  void check_shape(const Jet& o) const {
    if (dims_ != o.dims_ || order_ != o.order_)
      throw std::invalid_argument("jet: dims/order mismatch");
  }

  S val_;
  std::vector<S> coeffs_;  // degree >= 1 coefficients; empty == constant
  int dims_ = 0;
  int order_ = 0;
};

using Jet1 = Jet<double>;        // one nesting level
using Jet2 = Jet<Jet<double>>;   // order-2 jets of order-2 jets

inline double scalar_value(double x) { return x; }
template <class S>
double scalar_value(const Jet<S>& x) { return scalar_value(x.value()); }

// ---- analytic functions, recursive through nesting ----------------------

using std::cos;
using std::exp;
using std::sin;

template <class S>
Jet<S> sin(const Jet<S>& a) {
  using hypo::cos;  // recurse
  using hypo::sin;
  std::array<S, kMaxJetOrder + 1> u{};
  const S s = sin(a.value()), c = cos(a.value());
  u[0] = s;
  u[1] = c;
  u[2] = S(-0.5) * s;
  u[3] = S(-1.0 / 6.0) * c;
  return a.compose(u);
}

template <class S>
Jet<S> cos(const Jet<S>& a) {
  using hypo::cos;
  using hypo::sin;
  std::array<S, kMaxJetOrder + 1> u{};
  const S s = sin(a.value()), c = cos(a.value());
  u[0] = c;
  u[1] = -s;
  u[2] = S(-0.5) * c;
  u[3] = S(1.0 / 6.0) * s;
  return a.compose(u);
}

template <class S>
Jet<S> exp(const Jet<S>& a) {
  using hypo::exp;
  std::array<S, kMaxJetOrder + 1> u{};
  const S e = exp(a.value());
  u[0] = e;
  u[1] = e;
  u[2] = S(0.5) * e;
  u[3] = S(1.0 / 6.0) * e;
  return a.compose(u);
}

inline double pow_int(double a, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= a;
  return r;
}

template <class S>
Jet<S> pow_int(const Jet<S>& a, int k) {
  if (k < 0) throw std::invalid_argument("jet: negative integer power");
  Jet<S> r(1.0);
  for (int i = 0; i < k; ++i) r = Jet<S>::mul(r, a);
  return r;
}

// ---- thin wrappers mirroring the operation-level interface ---------------

enum class JetBinaryOp { Add, Mul };
enum class JetUnaryOp { Sin, Cos, Exp, Pow };

template <class S>
Jet<S> jet_binary(JetBinaryOp op, const Jet<S>& a, const Jet<S>& b) {
  switch (op) {
    case JetBinaryOp::Add: return a + b;
    case JetBinaryOp::Mul: return a * b;
  }
  throw std::logic_error("jet_binary: bad op");
}

template <class S>
Jet<S> jet_unary(JetUnaryOp op, const Jet<S>& a, int pow_exponent = 2) {
  switch (op) {
    case JetUnaryOp::Sin: return sin(a);
    case JetUnaryOp::Cos: return cos(a);
    case JetUnaryOp::Exp: return exp(a);
    case JetUnaryOp::Pow: return pow_int(a, pow_exponent);
  }
  throw std::logic_error("jet_unary: bad op");
}

}  // namespace hypo

namespace Eigen {

// scalar * matrix expressions mixing Jet with plain doubles
template <class S, typename BinaryOp>
struct ScalarBinaryOpTraits<hypo::Jet<S>, double, BinaryOp> {
  typedef hypo::Jet<S> ReturnType;
};
template <class S, typename BinaryOp>
struct ScalarBinaryOpTraits<double, hypo::Jet<S>, BinaryOp> {
  typedef hypo::Jet<S> ReturnType;
};

template <class S>
struct NumTraits<hypo::Jet<S>> {
  using Self = hypo::Jet<S>;
  using Real = Self;
  using NonInteger = Self;
  using Nested = Self;
  using Literal = Self;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 16,
    MulCost = 64,
  };
  static Self epsilon() { return Self(NumTraits<double>::epsilon()); }
  static Self dummy_precision() { return Self(NumTraits<double>::dummy_precision()); }
  static Self highest() { return Self(NumTraits<double>::highest()); }
  static Self lowest() { return Self(NumTraits<double>::lowest()); }
  static int digits10() { return NumTraits<double>::digits10(); }
};

}  // namespace Eigen
