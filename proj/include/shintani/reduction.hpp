#pragma once

// SL2(Z) reduction of nonsingular integral binary cubic forms.
//
// Every nonsingular form has a covariant positive definite quadratic form
// proportional to |x + z y|^2 with z in the upper half plane:
//   Disc > 0: the Hessian (b^2 - 3ac) x^2 + (bc - 9ad) xy + (c^2 - 3bd) y^2,
//   Disc < 0: the definite quadratic factor of f over R.
// The action f -> g.f moves z by a Moebius map, and f is reduced when z lies
// in the closed standard fundamental domain F. The reduced forms of one orbit
// form a finite set C(f) closed under f -> -f; the canonical representative
// is its lexicographically least element with positive leading coefficient.
//
// For Disc > 0 membership in F is decided exactly on the integral Hessian.
// For Disc < 0 it is decided on a floating point z with a tolerance
// kBoundaryTol; since the test is a deterministic function of the integer
// coefficients, C(f) is still an orbit invariant.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "shintani/forms.hpp"

namespace shintani {

/// Slack for F-membership of floating point cusp points (Disc < 0).
inline constexpr double kBoundaryTol = 1e-10;
/// Points farther than this inside F have C(f) = {f, -f}.
inline constexpr double kInteriorMargin = 1e-7;

struct QuadraticForm {
  __int128 P = 0, Q = 0, R = 0;
};

/// Hessian covariant (up to the constant -1/36); exact for |coefficients| < 2^40.
inline QuadraticForm hessian(const IntegerCubicForm& f) {
  const __int128 a = f.a, b = f.b, c = f.c, d = f.d;
  return {b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d};
}

namespace detail {

template <class Int>
long double to_ld(const Int& v) {
  if constexpr (std::is_same_v<Int, BigInt>)
    return v.template convert_to<long double>();
  else if constexpr (std::is_same_v<Int, CheckedInt>)
    return static_cast<long double>(v.value());
  else
    return static_cast<long double>(v);
}

/// Real root of a x^3 + b x^2 + c x + d (a != 0) for a cubic with exactly one real root.
inline long double single_real_root(long double a, long double b, long double c, long double d) {
  const long double B = b / a, C = c / a, D = d / a;
  // depressed: x = y - B/3, y^3 + p y + q = 0
  const long double p = C - B * B / 3;
  const long double q = 2 * B * B * B / 27 - B * C / 3 + D;
  const long double disc = q * q / 4 + p * p * p / 27;
  long double y;
  if (disc >= 0) {
    const long double sq = std::sqrt(disc);
    y = std::cbrt(-q / 2 + sq) + std::cbrt(-q / 2 - sq);
  } else {
    // three real roots numerically; pick one, Newton will settle it
    const long double r = std::sqrt(-p / 3);
    const long double phi = std::acos(std::clamp(-q / (2 * r * r * r), -1.0L, 1.0L));
    y = 2 * r * std::cos(phi / 3);
  }
  long double x = y - B / 3;
  for (int it = 0; it < 6; ++it) {
    const long double fx = ((x + B) * x + C) * x + D;
    const long double dfx = (3 * x + 2 * B) * x + C;
    if (dfx == 0) break;
    const long double step = fx / dfx;
    x -= step;
    if (std::abs(step) <= 1e-19L * (1 + std::abs(x))) break;
  }
  return x;
}

inline std::complex<double> point_from_quadratic(long double alpha, long double beta, long double gamma) {
  // alpha x^2 + beta x y + gamma y^2 proportional to |x + z y|^2
  const long double disc = 4 * alpha * gamma - beta * beta;
  if (!(disc > 0)) throw std::domain_error("cusp point: quadratic covariant is not definite");
  return {static_cast<double>(beta / (2 * alpha)), static_cast<double>(std::sqrt(disc) / (2 * std::abs(alpha)))};
}

}  // namespace detail

/// Point z = u + i t^2 of the upper half plane attached to a nonsingular form.
template <class Int>
std::complex<double> cusp_point(const BasicCubicForm<Int>& f, int disc_sign) {
  using detail::to_ld;
  const long double a = to_ld(f.a), b = to_ld(f.b), c = to_ld(f.c), d = to_ld(f.d);
  if (disc_sign > 0) {
    const long double P = b * b - 3 * a * c, Q = b * c - 9 * a * d, R = c * c - 3 * b * d;
    return detail::point_from_quadratic(P, Q, R);
  }
  if (a == 0) return detail::point_from_quadratic(b, c, d);
  const long double x = detail::single_real_root(a, b, c, d);
  return detail::point_from_quadratic(a, b + a * x, c + b * x + a * x * x);
}

inline std::complex<double> cusp_point(const RealCubicForm& f) {
  const double D = discriminant(f);
  if (D == 0) throw std::domain_error("cusp point of a singular form");
  BasicCubicForm<long double> g{f.a, f.b, f.c, f.d};
  return cusp_point(g, D > 0 ? 1 : -1);
}

enum class Membership { outside, boundary, interior };

inline Membership classify_point(std::complex<double> z) {
  const double u = z.real(), n2 = std::norm(z);
  if (std::abs(u) > 0.5 + kBoundaryTol || n2 < 1 - kBoundaryTol) return Membership::outside;
  if (std::abs(u) < 0.5 - kInteriorMargin && n2 > 1 + kInteriorMargin) return Membership::interior;
  return Membership::boundary;
}

/// Exact test on the Hessian for positive discriminant.
inline Membership classify_hessian(const QuadraticForm& h) {
  const __int128 aq = h.Q < 0 ? -h.Q : h.Q;
  if (aq > h.P || h.P > h.R) return Membership::outside;
  if (aq < h.P && h.P < h.R) return Membership::interior;
  return Membership::boundary;
}

template <class Int>
int sign_of(const Int& v) {
  return v > Int(0) ? 1 : (v < Int(0) ? -1 : 0);
}

/// Membership of a form with known discriminant sign.
template <class Int>
Membership classify_form(const BasicCubicForm<Int>& f, int disc_sign) {
  if constexpr (std::is_same_v<Int, std::int64_t>) {
    if (disc_sign > 0) return classify_hessian(hessian(f));
  } else {
    if (disc_sign > 0) {
      const BigInt a(f.a), b(f.b), c(f.c), d(f.d);
      const BigInt P = b * b - 3 * a * c, Q = b * c - 9 * a * d, R = c * c - 3 * b * d;
      const BigInt aq = abs(Q);
      if (aq > P || P > R) return Membership::outside;
      if (aq < P && P < R) return Membership::interior;
      return Membership::boundary;
    }
  }
  return classify_point(cusp_point(f, disc_sign));
}

/// Matrices of SL2(Z) with entries in [-2, 2]; contains every element mapping
/// a point near the closure of F to a point near the closure of F.
inline const std::vector<UnimodularMatrix>& neighbour_matrices() {
  static const std::vector<UnimodularMatrix> list = [] {
    std::vector<UnimodularMatrix> out;
    for (int p = -2; p <= 2; ++p)
      for (int q = -2; q <= 2; ++q)
        for (int r = -2; r <= 2; ++r)
          for (int s = -2; s <= 2; ++s)
            if (p * s - q * r == 1) out.push_back({p, q, r, s});
    return out;
  }();
  return list;
}

template <class Int>
struct BasicReduction {
  BasicCubicForm<Int> representative;
  UnimodularMatrix witness;  // witness . f == representative
  int stabilizer_order = 1;
};

using Reduction = BasicReduction<std::int64_t>;

namespace detail {

template <class Int>
BasicCubicForm<Int> act(const UnimodularMatrix& g, const BasicCubicForm<Int>& f) {
  if constexpr (std::is_same_v<Int, std::int64_t>) {
    auto r = substitute<CheckedInt>(g, f.a, f.b, f.c, f.d);
    return {r.a.value(), r.b.value(), r.c.value(), r.d.value()};
  } else {
    return substitute<Int>(g, f.a, f.b, f.c, f.d);
  }
}

/// Canonical element of C(f) for f already in F, with the matrix reaching it
/// and the stabilizer order.
template <class Int>
BasicReduction<Int> canonical_near(const BasicCubicForm<Int>& f, int disc_sign) {
  BasicReduction<Int> best;
  bool have = false;
  int stab = 0;
  for (const auto& g : neighbour_matrices()) {
    const auto h = act(g, f);
    if (h == f) ++stab;
    if (!h.positive_leading()) continue;
    if (classify_form(h, disc_sign) == Membership::outside) continue;
    if (!have || h < best.representative) {
      best.representative = h;
      best.witness = g;
      have = true;
    }
  }
  if (!have) throw std::logic_error("canonical_near: no reduced neighbour");
  best.stabilizer_order = stab;
  return best;
}

template <class Int>
BasicReduction<Int> reduce_impl(const BasicCubicForm<Int>& f0, int disc_sign) {
  BasicCubicForm<Int> f = f0;
  UnimodularMatrix w = UnimodularMatrix::identity();
  for (int iter = 0; iter < 4096; ++iter) {
    if (classify_form(f, disc_sign) != Membership::outside) {
      auto r = canonical_near(f, disc_sign);
      r.witness = r.witness * w;
      if (r.stabilizer_order != 1 && r.stabilizer_order != 3)
        throw std::logic_error("stabilizer order outside {1,3}");
      return r;
    }
    const auto z = cusp_point(f, disc_sign);
    UnimodularMatrix step;
    // points within rounding of |u| = 1/2 and inside the unit circle need the inversion
    if (std::abs(z.real()) > 0.5 + kBoundaryTol) {
      const double shift = std::nearbyint(z.real());
      if (std::abs(shift) > 9e18) throw overflow_promotion();
      step = UnimodularMatrix::unipotent(-static_cast<std::int64_t>(shift));
    } else {
      step = UnimodularMatrix::inversion();
    }
    f = act(step, f);
    w = step * w;
  }
  throw std::runtime_error("reduce_form: no convergence");
}

}  // namespace detail

/// Canonical SL2(Z)-orbit representative with witness matrix and stabilizer order.
inline BasicReduction<BigInt> reduce_form(const BigCubicForm& f) {
  const BigInt D = discriminant(f);
  if (D == 0) throw std::invalid_argument("reduce_form: zero discriminant");
  return detail::reduce_impl(f, D > 0 ? 1 : -1);
}

inline Reduction reduce_form(const IntegerCubicForm& f) {
  const BigInt D = discriminant(f);
  if (D == 0) throw std::invalid_argument("reduce_form: zero discriminant");
  const int sign = D > 0 ? 1 : -1;
  try {
    return detail::reduce_impl(f, sign);
  } catch (const overflow_promotion&) {
    auto big = detail::reduce_impl(to_big(f), sign);
    return {to_int64(big.representative), big.witness, big.stabilizer_order};
  }
}

/// Order of {g in SL2(Z) : g.f = f}; 1 or 3 for nonsingular forms.
inline int stabilizer_order(const IntegerCubicForm& f) {
  if (discriminant(f) == 0) throw std::invalid_argument("stabilizer_order: zero discriminant");
  return reduce_form(f).stabilizer_order;
}

}  // namespace shintani
