#pragma once

// Binary cubic forms f(x,y) = a x^3 + b x^2 y + c x y^2 + d y^3, the GL2 action
// (g.f)(x,y) = f((x,y) g) / |det g|, the discriminant and the alternating pairing.

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace shintani {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Thrown by the 64-bit fast path when a result does not fit; callers retry
/// with BigInt coefficients.
struct overflow_promotion : std::overflow_error {
  overflow_promotion() : std::overflow_error("int64 overflow, promote to BigInt") {}
};

/// int64 with overflow-trapping arithmetic.
class CheckedInt {
 public:
  constexpr CheckedInt() = default;
  constexpr CheckedInt(std::int64_t v) : v_(v) {}  // NOLINT: implicit by design of the template code
  constexpr std::int64_t value() const { return v_; }

  friend CheckedInt operator+(CheckedInt x, CheckedInt y) {
    std::int64_t r;
    if (__builtin_add_overflow(x.v_, y.v_, &r)) throw overflow_promotion();
    return r;
  }
  friend CheckedInt operator-(CheckedInt x, CheckedInt y) {
    std::int64_t r;
    if (__builtin_sub_overflow(x.v_, y.v_, &r)) throw overflow_promotion();
    return r;
  }
  friend CheckedInt operator*(CheckedInt x, CheckedInt y) {
    std::int64_t r;
    if (__builtin_mul_overflow(x.v_, y.v_, &r)) throw overflow_promotion();
    return r;
  }
  CheckedInt operator-() const { return CheckedInt(0) - *this; }
  CheckedInt& operator+=(CheckedInt y) { return *this = *this + y; }
  CheckedInt& operator-=(CheckedInt y) { return *this = *this - y; }
  CheckedInt& operator*=(CheckedInt y) { return *this = *this * y; }
  friend constexpr auto operator<=>(CheckedInt, CheckedInt) = default;

 private:
  std::int64_t v_ = 0;
};

template <class Int>
struct BasicCubicForm {
  Int a{}, b{}, c{}, d{};

  friend bool operator==(const BasicCubicForm&, const BasicCubicForm&) = default;
  friend std::weak_ordering operator<=>(const BasicCubicForm& x, const BasicCubicForm& y) {
    auto cmp = [](const Int& u, const Int& v) {
      return u < v ? std::weak_ordering::less : (v < u ? std::weak_ordering::greater : std::weak_ordering::equivalent);
    };
    if (auto o = cmp(x.a, y.a); o != 0) return o;
    if (auto o = cmp(x.b, y.b); o != 0) return o;
    if (auto o = cmp(x.c, y.c); o != 0) return o;
    return cmp(x.d, y.d);
  }
  BasicCubicForm operator-() const { return {-a, -b, -c, -d}; }

  /// a > 0, or a = 0 and b > 0. Every nonsingular SL2(Z)-class meets this half
  /// because -I acts as f -> -f.
  bool positive_leading() const { return a > Int(0) || (a == Int(0) && b > Int(0)); }
};

using IntegerCubicForm = BasicCubicForm<std::int64_t>;
using BigCubicForm = BasicCubicForm<BigInt>;

inline BigCubicForm to_big(const IntegerCubicForm& f) { return {f.a, f.b, f.c, f.d}; }

inline IntegerCubicForm to_int64(const BigCubicForm& f) {
  auto narrow = [](const BigInt& v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
      throw std::overflow_error("coefficient does not fit in int64");
    return static_cast<std::int64_t>(v);
  };
  return {narrow(f.a), narrow(f.b), narrow(f.c), narrow(f.d)};
}

template <class Int>
std::ostream& operator<<(std::ostream& os, const BasicCubicForm<Int>& f) {
  return os << '(' << f.a << ',' << f.b << ',' << f.c << ',' << f.d << ')';
}

struct RealCubicForm {
  double a = 0, b = 0, c = 0, d = 0;

  RealCubicForm() = default;
  RealCubicForm(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}
  explicit RealCubicForm(const IntegerCubicForm& f)
      : a(double(f.a)), b(double(f.b)), c(double(f.c)), d(double(f.d)) {}

  std::array<double, 4> coeffs() const { return {a, b, c, d}; }
  double operator[](int i) const { return coeffs()[i]; }
  double sup_norm() const {
    return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
  }
  bool finite() const {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
  }
  friend RealCubicForm operator+(const RealCubicForm& x, const RealCubicForm& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend RealCubicForm operator-(const RealCubicForm& x, const RealCubicForm& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend RealCubicForm operator*(double s, const RealCubicForm& x) {
    return {s * x.a, s * x.b, s * x.c, s * x.d};
  }
};

inline std::ostream& operator<<(std::ostream& os, const RealCubicForm& f) {
  return os << '(' << f.a << ',' << f.b << ',' << f.c << ',' << f.d << ')';
}

// ---------------------------------------------------------------------------
// Discriminant

template <class T>
T discriminant_poly(const T& a, const T& b, const T& c, const T& d) {
  return b * b * c * c - T(4) * a * c * c * c - T(4) * b * b * b * d - T(27) * a * a * d * d +
         T(18) * a * b * c * d;
}

namespace detail {
inline constexpr std::int64_t kInt128Safe = std::int64_t(1) << 29;

inline bool fits_int128_disc(const IntegerCubicForm& f) {
  auto ok = [](std::int64_t v) { return v > -kInt128Safe && v < kInt128Safe; };
  return ok(f.a) && ok(f.b) && ok(f.c) && ok(f.d);
}

inline BigInt from_int128(__int128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  BigInt r = static_cast<std::uint64_t>(u >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(u);
  return neg ? BigInt(-r) : r;
}
}  // namespace detail

/// Exact discriminant in __int128; valid when every |coefficient| < 2^29.
inline __int128 discriminant_i128(const IntegerCubicForm& f) {
  return discriminant_poly<__int128>(f.a, f.b, f.c, f.d);
}

inline BigInt discriminant(const BigCubicForm& f) { return discriminant_poly<BigInt>(f.a, f.b, f.c, f.d); }

inline BigInt discriminant(const IntegerCubicForm& f) {
  if (detail::fits_int128_disc(f)) return detail::from_int128(discriminant_i128(f));
  return discriminant(to_big(f));
}

/// Evaluated in long double: the terms cancel heavily for forms far up the cusp.
inline double discriminant(const RealCubicForm& f) {
  return static_cast<double>(discriminant_poly<long double>(f.a, f.b, f.c, f.d));
}

// ---------------------------------------------------------------------------
// Matrices and the group action

/// Integer 2x2 matrix [[p, q], [r, s]] acting on row vectors, (x, y) -> (px + ry, qx + sy).
struct UnimodularMatrix {
  std::int64_t p = 1, q = 0, r = 0, s = 1;

  std::int64_t det() const { return p * s - q * r; }
  static UnimodularMatrix identity() { return {1, 0, 0, 1}; }
  /// n_u for integral u: (x, y) -> (x + u y, y).
  static UnimodularMatrix unipotent(std::int64_t u) { return {1, 0, u, 1}; }
  /// (x, y) -> (-y, x); acts on the Hessian point by z -> -1/z.
  static UnimodularMatrix inversion() { return {0, 1, -1, 0}; }

  friend UnimodularMatrix operator*(const UnimodularMatrix& x, const UnimodularMatrix& y) {
    CheckedInt p = CheckedInt(x.p) * y.p + CheckedInt(x.q) * y.r;
    CheckedInt q = CheckedInt(x.p) * y.q + CheckedInt(x.q) * y.s;
    CheckedInt r = CheckedInt(x.r) * y.p + CheckedInt(x.s) * y.r;
    CheckedInt s = CheckedInt(x.r) * y.q + CheckedInt(x.s) * y.s;
    return {p.value(), q.value(), r.value(), s.value()};
  }
  /// Inverse of a determinant-one matrix.
  UnimodularMatrix inverse() const {
    if (det() != 1) throw std::invalid_argument("inverse: determinant must be 1");
    return {s, -q, -r, p};
  }
  friend bool operator==(const UnimodularMatrix&, const UnimodularMatrix&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const UnimodularMatrix& m) {
  return os << "[[" << m.p << ',' << m.q << "],[" << m.r << ',' << m.s << "]]";
}

/// f((x,y) g) without the 1/|det g| normalisation.
template <class T, class M>
BasicCubicForm<T> substitute(const M& g, const T& a, const T& b, const T& c, const T& d) {
  const T p(g.p), q(g.q), r(g.r), s(g.s);
  BasicCubicForm<T> out;
  out.a = a * p * p * p + b * p * p * q + c * p * q * q + d * q * q * q;
  out.b = T(3) * a * p * p * r + b * (p * p * s + T(2) * p * q * r) + c * (T(2) * p * q * s + q * q * r) +
          T(3) * d * q * q * s;
  out.c = T(3) * a * p * r * r + b * (T(2) * p * r * s + q * r * r) + c * (p * s * s + T(2) * q * r * s) +
          T(3) * d * q * s * s;
  out.d = a * r * r * r + b * r * r * s + c * r * s * s + d * s * s * s;
  return out;
}

template <class Int>
BasicCubicForm<Int> act_unimodular(const UnimodularMatrix& g, const BasicCubicForm<Int>& f) {
  const auto det = g.det();
  if (det != 1 && det != -1) throw std::invalid_argument("act_unimodular: |det| must be 1");
  return substitute<Int>(g, f.a, f.b, f.c, f.d);
}

/// Exact action for |det g| = 1. The int64 path traps overflow and promotes
/// internally; the result must fit in int64 or std::overflow_error is thrown.
inline IntegerCubicForm group_action(const UnimodularMatrix& g, const IntegerCubicForm& f) {
  const auto det = g.det();
  if (det == 0) throw std::invalid_argument("group_action: singular matrix");
  if (det != 1 && det != -1)
    throw std::invalid_argument("group_action: integral output needs |det| = 1, use group_action_rational");
  try {
    auto r = substitute<CheckedInt>(g, f.a, f.b, f.c, f.d);
    return {r.a.value(), r.b.value(), r.c.value(), r.d.value()};
  } catch (const overflow_promotion&) {
    return to_int64(substitute<BigInt>(g, BigInt(f.a), BigInt(f.b), BigInt(f.c), BigInt(f.d)));
  }
}

inline BigCubicForm group_action(const UnimodularMatrix& g, const BigCubicForm& f) {
  if (g.det() == 0) throw std::invalid_argument("group_action: singular matrix");
  if (g.det() != 1 && g.det() != -1)
    throw std::invalid_argument("group_action: integral output needs |det| = 1, use group_action_rational");
  return substitute<BigInt>(g, f.a, f.b, f.c, f.d);
}

/// Action of any nonsingular integer matrix; coefficients are rational in general.
inline std::array<BigRational, 4> group_action_rational(const UnimodularMatrix& g, const IntegerCubicForm& f) {
  if (g.det() == 0) throw std::invalid_argument("group_action: singular matrix");
  auto r = substitute<BigInt>(g, BigInt(f.a), BigInt(f.b), BigInt(f.c), BigInt(f.d));
  BigInt den = g.det() < 0 ? BigInt(-g.det()) : BigInt(g.det());
  return {BigRational(r.a, den), BigRational(r.b, den), BigRational(r.c, den), BigRational(r.d, den)};
}

inline BigRational discriminant(const std::array<BigRational, 4>& f) {
  return discriminant_poly<BigRational>(f[0], f[1], f[2], f[3]);
}

/// Real 2x2 matrix, same row-vector convention as UnimodularMatrix.
struct RealMatrix {
  double p = 1, q = 0, r = 0, s = 1;
  double det() const { return p * s - q * r; }
  friend RealMatrix operator*(const RealMatrix& x, const RealMatrix& y) {
    return {x.p * y.p + x.q * y.r, x.p * y.q + x.q * y.s, x.r * y.p + x.s * y.r, x.r * y.q + x.s * y.s};
  }
  RealMatrix inverse() const {
    const double dt = det();
    return {s / dt, -q / dt, -r / dt, p / dt};
  }
  RealMatrix transpose() const { return {p, r, q, s}; }
};

inline RealCubicForm group_action(const RealMatrix& g, const RealCubicForm& f) {
  const double det = g.det();
  if (det == 0.0) throw std::invalid_argument("group_action: singular matrix");
  auto r = substitute<double>(g, f.a, f.b, f.c, f.d);
  const double n = std::abs(det);
  return {r.a / n, r.b / n, r.c / n, r.d / n};
}

// ---------------------------------------------------------------------------
// Pairing

inline double pairing(const RealCubicForm& f, const RealCubicForm& g) {
  return f.a * g.d - f.b * g.c / 3.0 + f.c * g.b / 3.0 - f.d * g.a;
}

inline BigRational pairing(const IntegerCubicForm& f, const IntegerCubicForm& g) {
  BigRational third(1, 3);
  return BigRational(BigInt(f.a) * g.d) - third * BigInt(f.b) * g.c + third * BigInt(f.c) * g.b -
         BigRational(BigInt(f.d) * g.a);
}

// ---------------------------------------------------------------------------
// G+ in Iwasawa coordinates g = n_u a_t k_theta d_lambda

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct IwasawaElement {
  double u = 0, t = 1, theta = 0, lambda = 1;

  RealMatrix matrix() const {
    const double cs = std::cos(kTwoPi * theta), sn = std::sin(kTwoPi * theta);
    RealMatrix n{1, 0, u, 1}, a{1 / t, 0, 0, t}, k{cs, sn, -sn, cs}, dl{lambda, 0, 0, lambda};
    return n * a * k * dl;
  }
};

/// g -> g^iota; in coordinates only lambda is inverted.
inline IwasawaElement iota_involution(const IwasawaElement& g) {
  if (!(g.t > 0) || !(g.lambda > 0)) throw std::invalid_argument("iota_involution: t and lambda must be positive");
  return {g.u, g.t, g.theta, 1.0 / g.lambda};
}

/// Matrix form J (g^{-1})^T J^{-1}, J = [[0,1],[-1,0]].
inline RealMatrix iota_involution(const RealMatrix& g) {
  const RealMatrix j{0, 1, -1, 0}, jinv{0, -1, 1, 0};
  return j * g.inverse().transpose() * jinv;
}

}  // namespace shintani
