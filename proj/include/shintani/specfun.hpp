#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace shintani {

using Complex = std::complex<double>;

struct QuadratureConfig {
  double rel_tol = 1e-13;
  std::size_t max_levels = 12;   // refinements for DE rules, bisection depth for Gauss-Kronrod
  double tail_log = -700;        // integrand with log-magnitude below this is dropped

  void validate() const {
    if (!(rel_tol > 1e-14 && rel_tol < 1e-2)) throw std::invalid_argument("QuadratureConfig: rel_tol out of range");
    if (max_levels == 0 || max_levels > 30) throw std::invalid_argument("QuadratureConfig: max_levels out of range");
  }
};

template <class T>
struct QuadratureResult {
  T value{};
  double error = 0;
  double l1 = 0;
};

template <class F>
auto integrate_finite(F f, double a, double b, const QuadratureConfig& cfg = {}) {
  cfg.validate();
  using T = decltype(f(a));
  boost::math::quadrature::tanh_sinh<double> rule(cfg.max_levels);
  QuadratureResult<T> r;
  r.value = rule.integrate(f, a, b, cfg.rel_tol, &r.error, &r.l1);
  return r;
}

/// [a, inf)
template <class F>
auto integrate_half_line(F f, double a, const QuadratureConfig& cfg = {}) {
  cfg.validate();
  using T = decltype(f(a));
  boost::math::quadrature::exp_sinh<double> rule(cfg.max_levels);
  QuadratureResult<T> r;
  r.value = rule.integrate(f, a, std::numeric_limits<double>::infinity(), cfg.rel_tol, &r.error, &r.l1);
  return r;
}

template <class F>
auto integrate_real_line(F f, const QuadratureConfig& cfg = {}) {
  cfg.validate();
  using T = decltype(f(0.0));
  boost::math::quadrature::sinh_sinh<double> rule(cfg.max_levels);
  QuadratureResult<T> r;
  r.value = rule.integrate(f, cfg.rel_tol, &r.error, &r.l1);
  return r;
}

/// int_0^1 t^{p-1} (1-t)^{q-1} h(t) dt for smooth h and Re p, Re q > 0. The value of h
/// at each endpoint is integrated in closed form, so the quadrature only sees t^{p} (1-t)^{q}
/// type behaviour even when Im p or Im q makes the weight oscillate in log t.
template <class H>
Complex beta_weighted_integral(Complex p, Complex q, H h, const QuadratureConfig& cfg = {}) {
  const Complex h0 = h(0.0), h1 = h(1.0);
  auto left = [&](double t) -> Complex {
    if (t == 0) return 0.0;
    return std::exp((p - 1.0) * std::log(t)) * (std::exp((q - 1.0) * std::log1p(-t)) * h(t) - h0);
  };
  auto right = [&](double u) -> Complex {
    if (u == 0) return 0.0;
    return std::exp((q - 1.0) * std::log(u)) * (std::exp((p - 1.0) * std::log1p(-u)) * h(1 - u) - h1);
  };
  const double half = std::log(0.5);
  return integrate_finite(left, 0.0, 0.5, cfg).value + h0 * std::exp(p * half) / p +
         integrate_finite(right, 0.0, 0.5, cfg).value + h1 * std::exp(q * half) / q;
}

/// Adaptive Gauss-Kronrod (30/61) for smooth oscillatory pieces.
template <class F>
auto integrate_oscillatory(F f, double a, double b, const QuadratureConfig& cfg = {}) {
  cfg.validate();
  using T = decltype(f(a));
  QuadratureResult<T> r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, static_cast<unsigned>(cfg.max_levels),
                                                                         cfg.rel_tol, &r.error, &r.l1);
  return r;
}

// ---------------------------------------------------------------------------
// log Gamma

namespace detail {
// Lanczos g = 7, n = 9 (Godfrey).
inline constexpr double kLanczosG = 7;
inline constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

inline Complex log_gamma_right(Complex z) {
  z -= 1.0;
  Complex x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + double(i));
  const Complex t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

inline bool is_nonpositive_integer(Complex z) {
  return z.imag() == 0 && z.real() <= 0 && z.real() == std::floor(z.real());
}
}  // namespace detail

/// Analytic continuation of log Gamma from the positive axis, cut along (-inf, 0].
inline Complex log_gamma(Complex z) {
  if (detail::is_nonpositive_integer(z)) throw std::domain_error("log_gamma: pole");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw std::domain_error("log_gamma: non-finite argument");
  if (z.real() >= 0.5) return detail::log_gamma_right(z);
  if (z.imag() < 0) return std::conj(log_gamma(std::conj(z)));
  // log Gamma(z) + log Gamma(1-z) = log 2pi + i pi (z - 1/2) - log(1 - e^{2 pi i z}),  Im z >= 0
  const Complex i(0, 1);
  const double pi = std::numbers::pi;
  const Complex e = std::exp(2 * pi * i * z);
  return std::log(2 * pi) + i * pi * (z - 0.5) - std::log(1.0 - e) - detail::log_gamma_right(1.0 - z);
}

inline Complex gamma(Complex z) { return std::exp(log_gamma(z)); }

// ---------------------------------------------------------------------------
// K-Bessel

namespace detail {
/// s with sinh(s)/s = r, r > 1.
inline double sinhc_inverse(double r) {
  double s = std::asinh(r) + std::log(std::asinh(r) + 1);
  for (int it = 0; it < 100; ++it) {
    const double step = (std::sinh(s) - r * s) / (std::cosh(s) - r);
    s -= step;
    if (std::abs(step) < 1e-15 * s) break;
  }
  return s;
}

// sinh s - s and sinh s - s cosh s without cancellation at small s
inline double sinh_minus_x(double s) {
  if (s > 0.5) return std::sinh(s) - s;
  double term = s, sum = 0;
  for (int k = 1; k < 14; ++k) {
    term *= s * s / ((2 * k) * (2 * k + 1));
    sum += term;
  }
  return sum;
}

inline double sinh_minus_x_cosh(double s) {
  if (s > 0.5) return std::sinh(s) - s * std::cosh(s);
  double term = s, sum = 0;
  for (int k = 1; k < 14; ++k) {
    term *= s * s / ((2 * k) * (2 * k + 1));
    sum -= 2 * k * term;
  }
  return sum;
}

/// K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t) dt, integrated along t = s + i eta(s) where
/// sin eta = (Im nu) s / (x sinh s) clipped at pi/2, so the phase of e^{-x cosh t + nu t} is
/// flat away from the middle segment and no e^{pi |Im nu| / 2} cancellation occurs.
inline Complex bessel_k_integral(Complex nu, double x, const QuadratureConfig& cfg) {
  if (nu.imag() < 0) return std::conj(bessel_k_integral(std::conj(nu), x, cfg));
  const double sigma = nu.real(), R = nu.imag();
  const double pi = std::numbers::pi;
  const double r = R / x;
  const double s1 = r > 1 ? detail::sinhc_inverse(r) : 0.0;

  // s = s1 + delta
  auto tail = [&](double delta) -> Complex {
    const double s = s1 + delta;
    double omg;  // 1 - sin eta
    if (s == 0) {
      omg = 1 - r;
    } else {
      const double num = s1 > 0 ? 2 * std::cosh(s1 + delta / 2) * std::sinh(delta / 2) - r * delta
                                : detail::sinh_minus_x(s) + (1 - r) * s;
      omg = std::isinf(std::sinh(s)) ? 1.0 : std::clamp(num / std::sinh(s), 0.0, 1.0);
    }
    const double g = 1 - omg;
    const double c = std::sqrt(omg * (2 - omg));
    const double eta = std::atan2(g, c);
    const double expo = -x * std::cosh(s) * c - R * eta;
    if (!(expo + std::abs(sigma) * s > cfg.tail_log)) return 0.0;
    const double mag = std::exp(expo);
    if (sigma == 0) return mag;
    double deta = 0;
    if (R != 0 && s > 0 && c > 0) {
      const double sh = std::sinh(s);
      deta = (s < 1e-4 ? -r * s / 3 : (r / sh) * (detail::sinh_minus_x_cosh(s) / sh)) / c;
    }
    return std::polar(mag, sigma * eta) * Complex(std::cosh(sigma * s), deta * std::sinh(sigma * s));
  };
  Complex total;
  if (s1 > 0) {
    // delta = v^2 absorbs the square-root singularity of eta' at s1
    auto tail_v = [&](double v) -> Complex { return v == 0 ? Complex(0) : 2 * v * tail(v * v); };
    total = integrate_half_line(tail_v, 0.0, cfg).value;
    auto mid = [&](double s) -> Complex { return std::cosh(Complex(sigma * s, R * s - x * std::sinh(s))); };
    total += std::exp(Complex(-R * pi / 2, sigma * pi / 2)) * integrate_oscillatory(mid, 0.0, s1, cfg).value;
  } else {
    // for small x the integrand is flat out to x cosh s ~ 1
    const double L = x < 0.5 ? std::acosh(1 / x) : 0.0;
    if (L > 0) total = integrate_oscillatory(tail, 0.0, L, cfg).value;
    total += integrate_half_line([&](double d) { return tail(L + d); }, 0.0, cfg).value;
  }
  return total;
}
}  // namespace detail

/// Real orders above 2 come from the integral at the fractional part and the upward
/// recurrence K_{mu+1} = K_{mu-1} + (2 mu / x) K_mu, which is stable for K.
inline Complex bessel_k(Complex nu, double x, const QuadratureConfig& cfg = {}) {
  if (!(x > 0) || !std::isfinite(x)) throw std::domain_error("bessel_k: x must be positive");
  if (!(std::abs(nu.real()) < 10) || !(std::abs(nu.imag()) <= 50)) throw std::domain_error("bessel_k: order out of range");
  cfg.validate();
  if (nu.real() < 0) nu = -nu;
  if (nu.real() == 0 || nu.imag() == 0) {
    // real by symmetry of the integrand; drop rounding residue
    if (nu.real() < 2) return detail::bessel_k_integral(nu, x, cfg).real();
  } else if (nu.real() < 2) {
    return detail::bessel_k_integral(nu, x, cfg);
  }
  const int n = static_cast<int>(std::floor(nu.real()));
  Complex mu(nu.real() - n, nu.imag());
  Complex k0 = detail::bessel_k_integral(mu, x, cfg), k1 = detail::bessel_k_integral(mu + 1.0, x, cfg);
  for (int j = 1; j < n; ++j) {
    mu += 1.0;
    const Complex k2 = k0 + (2.0 * mu / x) * k1;
    k0 = k1;
    k1 = k2;
  }
  return nu.imag() == 0 ? Complex(k1.real()) : k1;
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric function, Euler integral region

/// 2F1(a,b;c;z) = Gamma(c)/(Gamma(b)Gamma(c-b)) int_0^1 t^{b-1}(1-t)^{c-b-1}(1-tz)^{-a} dt.
inline Complex hyp2f1(Complex a, Complex b, Complex c, double z, const QuadratureConfig& cfg = {}) {
  if (!(z > -1 && z < 1)) throw std::domain_error("hyp2f1: z must lie in (-1, 1)");
  if (!(c.real() > b.real() && b.real() > 0)) throw std::domain_error("hyp2f1: need Re c > Re b > 0");
  if (z == 0) return 1.0;
  const Complex cb = c - b;
  auto h = [&](double t) { return std::exp(-a * std::log1p(-t * z)); };
  const Complex integral = beta_weighted_integral(b, cb, h, cfg);
  return std::exp(log_gamma(c) - log_gamma(b) - log_gamma(cb)) * integral;
}

// ---------------------------------------------------------------------------
// Mellin transform of a K-Bessel pair

struct MellinBesselPair {
  Complex closed_form;
  Complex quadrature;
  double discrepancy = 0;      // |closed - quadrature| / |closed|
  bool bound_applicable = false;
  double bound = 0;            // 2^{Re s-3} alpha^{Re mu} beta^{-Re(s+mu)} |Gamma((s+mu+nu)/2) Gamma((s-mu-nu)/2)|
  double bound_ratio = 0;      // |closed| / bound
  double beta_constant = 0;    // B(Re b, Re(c-b)), the constant the bound carries
  bool bound_holds = false;    // |closed| <= beta_constant * bound
};

/// int_0^inf K_mu(alpha x) K_nu(beta x) x^{s-1} dx by the t-integral closed form.
inline Complex mellin_bessel_closed(Complex mu, Complex nu, double alpha, double beta, Complex s,
                                    const QuadratureConfig& cfg = {}) {
  if (!(alpha > 0 && beta > 0)) throw std::domain_error("mellin_bessel_pair: alpha, beta must be positive");
  if (!(s.real() > std::abs(mu.real()) + std::abs(nu.real()) + 0.05))
    throw std::domain_error("mellin_bessel_pair: Re s too small");
  const Complex p = 0.5 * (s - mu + nu), q = 0.5 * (s + mu - nu), e = 0.5 * (s + mu + nu);
  const double w = 1 - (beta * beta) / (alpha * alpha);
  auto h = [&](double t) { return std::exp(-e * std::log1p(-w * t)); };
  const Complex integral = beta_weighted_integral(p, q, h, cfg);
  const Complex logpre = (s - 3.0) * std::log(2.0) - (s + nu) * std::log(alpha) + nu * std::log(beta) + log_gamma(e) +
                         log_gamma(0.5 * (s - mu - nu));
  return std::exp(logpre) * integral;
}

inline Complex mellin_bessel_quadrature(Complex mu, Complex nu, double alpha, double beta, Complex s,
                                        const QuadratureConfig& cfg = {}) {
  QuadratureConfig inner = cfg;
  inner.rel_tol = std::max(cfg.rel_tol, 1e-12);
  QuadratureConfig outer = cfg;
  outer.rel_tol = std::max(cfg.rel_tol, 1e-10);
  // below x ~ 1e-150 the integrand is O(x^{margin - 1}) and its contribution is dropped
  auto f = [&](double x) -> Complex {
    const double ax = alpha * x, bx = beta * x;
    if (std::min(ax, bx) < 1e-150) return 0.0;
    if (ax + bx > 700) return 0.0;
    return bessel_k(mu, ax, inner) * bessel_k(nu, bx, inner) * std::exp((s - 1.0) * std::log(x));
  };
  return integrate_half_line(f, 0.0, outer).value;
}

inline MellinBesselPair mellin_bessel_pair(Complex mu, Complex nu, double alpha, double beta, Complex s,
                                           const QuadratureConfig& cfg = {}) {
  MellinBesselPair out;
  out.closed_form = mellin_bessel_closed(mu, nu, alpha, beta, s, cfg);
  out.quadrature = mellin_bessel_quadrature(mu, nu, alpha, beta, s, cfg);
  out.discrepancy = std::abs(out.closed_form - out.quadrature) / std::abs(out.closed_form);
  if (alpha > beta) {
    out.bound_applicable = true;
    const double sr = s.real(), mr = mu.real();
    out.bound = std::pow(2.0, sr - 3) * std::pow(alpha, mr) * std::pow(beta, -(sr + mr)) *
                std::exp((log_gamma(0.5 * (s + mu + nu)) + log_gamma(0.5 * (s - mu - nu))).real());
    out.bound_ratio = std::abs(out.closed_form) / out.bound;
    const double pb = 0.5 * (s - mu + nu).real(), qb = 0.5 * (s + mu - nu).real();
    out.beta_constant = std::exp(std::lgamma(pb) + std::lgamma(qb) - std::lgamma(pb + qb));
    out.bound_holds = out.bound_ratio <= out.beta_constant * (1 + 1e-12);
  }
  return out;
}

}  // namespace shintani
