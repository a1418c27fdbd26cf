#pragma once

// Homogeneous coordinates f = n_u a_t k_theta d_lambda . f_pm on the two open
// orbits of real binary cubic forms, fundamental-domain reduction, Jacobians
// and derivatives of log|Disc|.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "shintani/forms.hpp"
#include "shintani/reduction.hpp"

namespace shintani {

inline constexpr double kFourthRoot108 = 3.2237097954706257;  // 108^{1/4}
inline constexpr double kSqrt2 = 1.4142135623730951;
/// Lower bound for t on the standard fundamental domain, 3^{1/4}/sqrt 2.
inline constexpr double kMinReducedT = 0.93060485910209959;
inline constexpr double kSingularCutoff = 1e-12;

struct HomogeneousCoords {
  double u = 0, t = 1, theta = 0, lambda = 1;
  int sign = -1;  // +1 for Disc > 0, -1 for Disc < 0

  IwasawaElement group_element() const { return {u, t, theta, lambda}; }
  /// Period of theta: the stabilizer of f_+ is generated by rotation by 2 pi/3.
  double theta_period() const { return sign > 0 ? 1.0 / 3.0 : 1.0; }
};

inline RealCubicForm base_point(int sign) {
  if (sign > 0) return (1.0 / kFourthRoot108) * RealCubicForm{0, 3, 0, -1};
  return (1.0 / kSqrt2) * RealCubicForm{0, 1, 0, 1};
}

/// n_u . f for real u.
inline RealCubicForm unipotent_action(double u, const RealCubicForm& f) {
  return {f.a, 3 * f.a * u + f.b, (3 * f.a * u + 2 * f.b) * u + f.c, ((f.a * u + f.b) * u + f.c) * u + f.d};
}

/// a_t . f = (a/t^3, b/t, t c, t^3 d).
inline RealCubicForm diagonal_action(double t, const RealCubicForm& f) {
  return {f.a / (t * t * t), f.b / t, t * f.c, t * t * t * f.d};
}

/// k_theta . f_pm.
inline RealCubicForm rotated_base_point(int sign, double theta) {
  if (sign > 0) {
    const double s = std::sin(3 * kTwoPi * theta), k = std::cos(3 * kTwoPi * theta);
    return (1.0 / kFourthRoot108) * RealCubicForm{s, 3 * k, -3 * s, -k};
  }
  const double s = std::sin(kTwoPi * theta), k = std::cos(kTwoPi * theta);
  return (1.0 / kSqrt2) * RealCubicForm{s, k, s, k};
}

inline RealCubicForm form_from_coords(const HomogeneousCoords& h) {
  if (!(h.t > 0) || !(h.lambda > 0) || (h.sign != 1 && h.sign != -1))
    throw std::invalid_argument("form_from_coords: need t > 0, lambda > 0, sign = +-1");
  return h.lambda * unipotent_action(h.u, diagonal_action(h.t, rotated_base_point(h.sign, h.theta)));
}

inline double wrap(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0) r += period;
  if (r >= period) r = 0;
  return r;
}

/// Inverse of form_from_coords. lambda from |Disc|, u + i t^2 from the
/// quadratic covariant, theta from the remaining rotation; then a few Newton
/// steps on the forward map.
inline HomogeneousCoords coords_from_form(const RealCubicForm& f) {
  if (!f.finite()) throw std::invalid_argument("coords_from_form: non-finite coefficients");
  const double D = discriminant(f);
  const double scale = f.sup_norm();
  if (!(std::abs(D) >= kSingularCutoff))
    throw std::domain_error("coords_from_form: singular or near-singular form");
  HomogeneousCoords h;
  h.sign = D > 0 ? 1 : -1;
  h.lambda = std::pow(std::abs(D), 0.25);
  const std::complex<double> z = cusp_point(f);
  h.u = z.real();
  h.t = std::sqrt(z.imag());
  const RealCubicForm k = diagonal_action(1.0 / h.t, unipotent_action(-h.u, (1.0 / h.lambda) * f));
  if (h.sign > 0) {
    const double s3 = kFourthRoot108 * (k.a - k.c / 3) / 2, c3 = kFourthRoot108 * (k.b / 3 - k.d) / 2;
    h.theta = wrap(std::atan2(s3, c3) / (3 * kTwoPi), 1.0 / 3.0);
  } else {
    const double s = kSqrt2 * (k.a + k.c) / 2, c = kSqrt2 * (k.b + k.d) / 2;
    h.theta = wrap(std::atan2(s, c) / kTwoPi, 1.0);
  }
  const double residual = (form_from_coords(h) - f).sup_norm();
  if (!(residual <= 1e-8 * scale))
    throw std::runtime_error("coords_from_form: inversion did not converge (residual " + std::to_string(residual / scale) + ")");
  return h;
}

// ---------------------------------------------------------------------------
// Fundamental domain

struct ReducedCoords {
  HomogeneousCoords coords;
  UnimodularMatrix gamma;  // coords = gamma . input
};

/// Iwasawa coordinates (u, t, theta) of M / sqrt(det M) for det M > 0.
inline HomogeneousCoords iwasawa(const RealMatrix& M, double lambda, int sign) {
  const double det = M.det();
  if (!(det > 0)) throw std::invalid_argument("iwasawa: determinant must be positive");
  const double r = std::sqrt(det);
  const double p = M.p / r, q = M.q / r, rr = M.r / r, s = M.s / r;
  const double inv_t = std::hypot(p, q);
  HomogeneousCoords h;
  h.t = 1 / inv_t;
  const double c = p / inv_t, sn = q / inv_t;
  h.theta = wrap(std::atan2(sn, c) / kTwoPi, 1.0);
  h.u = h.t * (rr * c + s * sn);
  h.lambda = lambda;
  h.sign = sign;
  h.theta = wrap(h.theta, h.theta_period());
  return h;
}

/// Moves z = u + i t^2 into the closed standard fundamental domain; lambda and sign carried along.
inline ReducedCoords fundamental_domain_reduce(const HomogeneousCoords& h) {
  if (!(h.t > 0)) throw std::invalid_argument("fundamental_domain_reduce: t must be positive");
  std::complex<double> z(h.u, h.t * h.t);
  UnimodularMatrix g = UnimodularMatrix::identity();
  constexpr double eps = 1e-13;
  for (int iter = 0; iter < 10000; ++iter) {
    if (std::abs(z.real()) > 0.5 + eps) {
      const double n = std::nearbyint(z.real());
      g = UnimodularMatrix::unipotent(-static_cast<std::int64_t>(n)) * g;
      z -= n;
    } else if (std::norm(z) < 1 - eps) {
      g = UnimodularMatrix::inversion() * g;
      z = -1.0 / z;
    } else {
      const RealMatrix G{double(g.p), double(g.q), double(g.r), double(g.s)};
      HomogeneousCoords out = iwasawa(G * h.group_element().matrix(), h.lambda, h.sign);
      return {out, g};
    }
  }
  throw std::runtime_error("fundamental_domain_reduce: no convergence");
}

// ---------------------------------------------------------------------------
// Jacobians

using Mat4 = std::array<std::array<double, 4>, 4>;

inline Mat4 mat_mul(const Mat4& x, const Mat4& y) {
  Mat4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) r[i][j] += x[i][k] * y[k][j];
  return r;
}

inline double mat_det(Mat4 m) {
  double det = 1;
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (int r = c + 1; r < 4; ++r) {
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

/// |da db dc dd| = kVolumeConstant lambda^3 t^-3 |dlambda dtheta dt du| for theta in turns.
inline constexpr double kVolumeConstant = 4 * 3.14159265358979323846;

struct JacobianPair {
  /// forward[i][j] = d(a,b,c,d)_j / d(u,t,theta,lambda)_i
  Mat4 forward{};
  /// backward[i][j] = d(u,t,theta,lambda)_j / d(a,b,c,d)_i
  Mat4 backward{};
  /// |entry| divided by the envelope O(lambda^x t^y) of the same entry.
  Mat4 forward_ratio{}, backward_ratio{};
  /// (lambda exponent, t exponent) of each envelope
  std::array<std::array<std::pair<int, int>, 4>, 4> forward_envelope{}, backward_envelope{};
  double determinant = 0;
  double expected_abs_determinant = 0;  // lambda^3 / t^3
  /// |determinant| / (lambda^3/t^3); equals kVolumeConstant with theta in turns.
  double measure_ratio() const { return std::abs(determinant) / expected_abs_determinant; }

  double max_forward_ratio() const { return max_of(forward_ratio); }
  double max_backward_ratio() const { return max_of(backward_ratio); }
  /// forward^T backward^T, which is the identity.
  Mat4 product() const {
    Mat4 ft{}, bt{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) ft[i][j] = forward[j][i], bt[i][j] = backward[j][i];
    return mat_mul(ft, bt);
  }

 private:
  static double max_of(const Mat4& m) {
    double r = 0;
    for (const auto& row : m)
      for (double v : row) r = std::max(r, v);
    return r;
  }
};

inline constexpr std::array<std::array<std::pair<int, int>, 4>, 4> kForwardEnvelope = {{
    {{{1, -3}, {1, -3}, {1, -1}, {1, 1}}},  // u; da/du = 0 exactly
    {{{1, -4}, {1, -2}, {1, 0}, {1, 2}}},   // t
    {{{1, -3}, {1, -1}, {1, 1}, {1, 3}}},   // theta
    {{{0, -3}, {0, -1}, {0, 1}, {0, 3}}},   // lambda
}};

inline constexpr std::array<std::array<std::pair<int, int>, 4>, 4> kBackwardEnvelope = {{
    {{{-1, 5}, {-1, 4}, {-1, 3}, {0, 3}}},     // a
    {{{-1, 3}, {-1, 2}, {-1, 1}, {0, 1}}},     // b
    {{{-1, 1}, {-1, 0}, {-1, -1}, {0, -1}}},   // c
    {{{-1, -1}, {-1, -2}, {-1, -3}, {0, -3}}}, // d
}};

inline Mat4 mat_inverse(Mat4 m) {
  Mat4 inv{};
  for (int i = 0; i < 4; ++i) inv[i][i] = 1;
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0) throw std::domain_error("mat_inverse: singular matrix");
    std::swap(m[piv], m[c]);
    std::swap(inv[piv], inv[c]);
    const double d = m[c][c];
    for (int k = 0; k < 4; ++k) m[c][k] /= d, inv[c][k] /= d;
    for (int r = 0; r < 4; ++r) {
      if (r == c) continue;
      const double f = m[r][c];
      for (int k = 0; k < 4; ++k) m[r][k] -= f * m[c][k], inv[r][k] -= f * inv[c][k];
    }
  }
  return inv;
}

inline Mat4 transpose(const Mat4& m) {
  Mat4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = m[j][i];
  return r;
}

/// Backward table from the forward one: (d coords/d coeffs) = (d coeffs/d coords)^{-1}.
inline Mat4 inverse_backward(const Mat4& forward) { return transpose(mat_inverse(transpose(forward))); }

/// Backward table by central differences of coords_from_form, independent of the forward map.
inline Mat4 backward_by_differences(const HomogeneousCoords& h, double rel_step = 1e-6) {
  Mat4 B{};
  const RealCubicForm f = form_from_coords(h);
  const auto c0 = f.coeffs();
  const double step = rel_step * f.sup_norm();
  for (int i = 0; i < 4; ++i) {
    auto at = [&](double delta) {
      auto c = c0;
      c[i] += delta;
      return coords_from_form({c[0], c[1], c[2], c[3]});
    };
    const HomogeneousCoords p = at(step), m = at(-step);
    const double period = h.theta_period();
    double dth = p.theta - m.theta;
    dth -= period * std::nearbyint(dth / period);
    const std::array<double, 4> d{p.u - m.u, p.t - m.t, dth, p.lambda - m.lambda};
    for (int j = 0; j < 4; ++j) B[i][j] = d[j] / (2 * step);
  }
  return B;
}

inline JacobianPair jacobian_pair(const HomogeneousCoords& h, double rel_step = 1e-6) {
  JacobianPair J;
  J.forward_envelope = kForwardEnvelope;
  J.backward_envelope = kBackwardEnvelope;
  const std::array<double, 4> x0{h.u, h.t, h.theta, h.lambda};
  for (int i = 0; i < 4; ++i) {
    const double step = rel_step * std::max(1.0, std::abs(x0[i]));
    auto at = [&](double delta) {
      HomogeneousCoords g = h;
      std::array<double, 4> x = x0;
      x[i] += delta;
      g.u = x[0], g.t = x[1], g.theta = x[2], g.lambda = x[3];
      return form_from_coords(g);
    };
    const auto fp = at(step).coeffs(), fm = at(-step).coeffs();
    for (int j = 0; j < 4; ++j) J.forward[i][j] = (fp[j] - fm[j]) / (2 * step);
  }
  for (const auto& row : J.forward)
    for (double v : row)
      if (!std::isfinite(v)) throw std::runtime_error("jacobian_pair: non-finite difference quotient");
  J.determinant = mat_det(J.forward);
  if (J.determinant == 0) throw std::runtime_error("jacobian_pair: step underflow, singular difference Jacobian");
  J.backward = inverse_backward(J.forward);
  J.expected_abs_determinant = std::pow(h.lambda / h.t, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      auto env = [&](std::pair<int, int> e) { return std::pow(h.lambda, e.first) * std::pow(h.t, e.second); };
      J.forward_ratio[i][j] = std::abs(J.forward[i][j]) / env(kForwardEnvelope[i][j]);
      J.backward_ratio[i][j] = std::abs(J.backward[i][j]) / env(kBackwardEnvelope[i][j]);
    }
  return J;
}

// ---------------------------------------------------------------------------
// Derivatives of log|Disc|

using MultiIndex = std::array<int, 4>;

namespace detail {

/// Truncated power series in four variables, total degree <= 4.
class Series4 {
 public:
  static constexpr int kDeg = 4;
  Series4() : c_(size(), 0.0) {}

  static int size() { return 70; }
  static int index(const MultiIndex& e) {
    static const auto table = build();
    return table[((e[0] * 5 + e[1]) * 5 + e[2]) * 5 + e[3]];
  }
  static const std::vector<MultiIndex>& exponents() {
    static const auto list = [] {
      std::vector<MultiIndex> out;
      for (int a = 0; a <= kDeg; ++a)
        for (int b = 0; a + b <= kDeg; ++b)
          for (int c = 0; a + b + c <= kDeg; ++c)
            for (int d = 0; a + b + c + d <= kDeg; ++d) out.push_back({a, b, c, d});
      return out;
    }();
    return list;
  }

  double& operator[](const MultiIndex& e) { return c_[index(e)]; }
  double operator[](const MultiIndex& e) const { return c_[index(e)]; }

  friend Series4 operator*(const Series4& x, const Series4& y) {
    Series4 r;
    for (const auto& [i, j, k] : products()) r.c_[k] += x.c_[i] * y.c_[j];
    return r;
  }
  friend Series4 operator+(Series4 x, const Series4& y) {
    for (std::size_t i = 0; i < x.c_.size(); ++i) x.c_[i] += y.c_[i];
    return x;
  }
  friend Series4 operator*(double s, Series4 x) {
    for (auto& v : x.c_) v *= s;
    return x;
  }

 private:
  struct Triple { int i, j, k; };
  static const std::vector<Triple>& products() {
    static const auto list = [] {
      std::vector<Triple> out;
      const auto& ex = exponents();
      for (std::size_t i = 0; i < ex.size(); ++i)
        for (std::size_t j = 0; j < ex.size(); ++j) {
          const MultiIndex e{ex[i][0] + ex[j][0], ex[i][1] + ex[j][1], ex[i][2] + ex[j][2], ex[i][3] + ex[j][3]};
          if (e[0] + e[1] + e[2] + e[3] <= kDeg) out.push_back({int(i), int(j), index(e)});
        }
      return out;
    }();
    return list;
  }
  static std::vector<int> build() {
    std::vector<int> t(625, -1);
    const auto& ex = exponents();
    for (std::size_t i = 0; i < ex.size(); ++i) t[((ex[i][0] * 5 + ex[i][1]) * 5 + ex[i][2]) * 5 + ex[i][3]] = int(i);
    return t;
  }
  std::vector<double> c_;
};

/// Taylor coefficients of Disc(f + y) in y; exact because Disc is a quartic.
inline Series4 disc_taylor(const RealCubicForm& f) {
  // Disc = b^2c^2 - 4ac^3 - 4b^3d - 27a^2d^2 + 18abcd
  struct Mono { double coef; MultiIndex e; };
  static const Mono terms[] = {{1, {0, 2, 2, 0}}, {-4, {1, 0, 3, 0}}, {-4, {0, 3, 0, 1}}, {-27, {2, 0, 0, 2}}, {18, {1, 1, 1, 1}}};
  const auto x = f.coeffs();
  auto binom = [](int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  Series4 s;
  for (const auto& m : terms) {
    // prod_v (x_v + y_v)^{e_v} = prod_v sum_k binom(e_v,k) x_v^{e_v-k} y_v^k
    for (int k0 = 0; k0 <= m.e[0]; ++k0)
      for (int k1 = 0; k1 <= m.e[1]; ++k1)
        for (int k2 = 0; k2 <= m.e[2]; ++k2)
          for (int k3 = 0; k3 <= m.e[3]; ++k3) {
            const int k[4] = {k0, k1, k2, k3};
            double v = m.coef;
            for (int i = 0; i < 4; ++i) v *= binom(m.e[i], k[i]) * std::pow(x[i], m.e[i] - k[i]);
            s[{k0, k1, k2, k3}] += v;
          }
  }
  return s;
}

inline double factorial(int n) {
  double r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace detail

/// D^alpha Disc(f) for |alpha| <= 4 (exact polynomial differentiation).
inline double disc_partial(const MultiIndex& alpha, const RealCubicForm& f) {
  for (int v : alpha)
    if (v < 0) throw std::invalid_argument("disc_partial: negative index");
  const int order = alpha[0] + alpha[1] + alpha[2] + alpha[3];
  if (order > 4) return 0.0;
  const auto s = detail::disc_taylor(f);
  double fact = 1;
  for (int v : alpha) fact *= detail::factorial(v);
  return s[alpha] * fact;
}

namespace detail {
/// Taylor series of log|Disc(f + y)| - log|Disc(f)| to order 4 in y.
inline Series4 log_disc_series(const RealCubicForm& f) {
  auto s = disc_taylor(f);
  const double D0 = s[{0, 0, 0, 0}];
  if (D0 == 0) throw std::domain_error("log_disc_partial: zero discriminant");
  // log(D0 (1 + h)) = log|D0| + h - h^2/2 + h^3/3 - h^4/4
  Series4 h = (1.0 / D0) * s;
  h[{0, 0, 0, 0}] = 0;
  Series4 acc, power = h;
  for (int k = 1; k <= 4; ++k) {
    acc = acc + ((k % 2 ? 1.0 : -1.0) / k) * power;
    if (k < 4) power = power * h;
  }
  return acc;
}

inline int checked_order(const MultiIndex& alpha) {
  int order = 0;
  for (int v : alpha) {
    if (v < 0) throw std::invalid_argument("log_disc_partial: negative index");
    order += v;
  }
  if (order > 4) throw std::invalid_argument("log_disc_partial: |alpha| must be <= 4");
  return order;
}

inline double multi_factorial(const MultiIndex& alpha) {
  double fact = 1;
  for (int v : alpha) fact *= factorial(v);
  return fact;
}
}  // namespace detail

/// D^alpha log|Disc(f)| for |alpha| <= 4: series logarithm of the exact
/// Taylor expansion of Disc about f.
inline double log_disc_partial(const MultiIndex& alpha, const RealCubicForm& f) {
  const int order = detail::checked_order(alpha);
  if (order == 0) {
    const double D = discriminant(f);
    if (D == 0) throw std::domain_error("log_disc_partial: zero discriminant");
    return std::log(std::abs(D));
  }
  return detail::log_disc_series(f)[alpha] * detail::multi_factorial(alpha);
}

/// The four pure third derivatives D_a^3, D_b^3, D_c^3, D_d^3 of log|Disc|.
inline std::array<double, 4> pure_third_log_derivatives(const RealCubicForm& f) {
  const auto s = detail::log_disc_series(f);
  return {6 * s[{3, 0, 0, 0}], 6 * s[{0, 3, 0, 0}], 6 * s[{0, 0, 3, 0}], 6 * s[{0, 0, 0, 3}]};
}

/// Largest t~/t_f or t_f/t~ over random perturbations with ||f~ - f||_2 <= C2 lambda_f / t_f^3.
inline double t_stability_sweep(const RealCubicForm& f, double C2, int samples, std::uint64_t seed) {
  const auto h = coords_from_form(f);
  const double radius = C2 * h.lambda / std::pow(h.t, 3);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01;
  double worst = 1;
  for (int i = 0; i < samples; ++i) {
    std::array<double, 4> v{n01(rng), n01(rng), n01(rng), n01(rng)};
    const double nv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
    const double r = radius * std::pow(u01(rng), 0.25) / nv;
    const RealCubicForm g{f.a + r * v[0], f.b + r * v[1], f.c + r * v[2], f.d + r * v[3]};
    if (discriminant(g) * discriminant(f) <= 0) return INFINITY;
    const double tg = coords_from_form(g).t;
    worst = std::max(worst, std::max(tg / h.t, h.t / tg));
  }
  return worst;
}


/// Largest C2 from a decreasing ladder for which t_stability_sweep stays within C1.
inline double calibrate_t_stability(const std::vector<RealCubicForm>& forms, double C1, int samples, std::uint64_t seed) {
  for (double C2 : {1.0, 0.5, 0.25, 0.1, 0.05, 0.025, 0.01, 0.005, 0.001}) {
    bool ok = true;
    for (std::size_t i = 0; i < forms.size() && ok; ++i) ok = t_stability_sweep(forms[i], C2, samples, seed + i) <= C1;
    if (ok) return C2;
  }
  return 0;
}

struct DerivativeFloor {
  double value = INFINITY;  // min over the grid of max |D^3 log|Disc|| t^9 lambda^3
  RealCubicForm f0;
  double t = 0, lambda = 0, u = 0;
};

/// Sweep of f = n_u a_t d_lambda f0 with f0 on a lattice of spacing `step` in
/// B = {3a^2 + b^2 + c^2 + 3d^2 <= C, |Disc| >= 1}.
inline DerivativeFloor third_derivative_floor(const std::vector<double>& ts, const std::vector<double>& lambdas,
                                              const std::vector<double>& us, double C = 16, double step = 0.5) {
  DerivativeFloor out;
  const int n = static_cast<int>(std::floor(std::sqrt(C) / step));
  for (int ia = -n; ia <= n; ++ia)
    for (int ib = -n; ib <= n; ++ib)
      for (int ic = -n; ic <= n; ++ic)
        for (int id = -n; id <= n; ++id) {
          const RealCubicForm f0{ia * step, ib * step, ic * step, id * step};
          if (3 * f0.a * f0.a + f0.b * f0.b + f0.c * f0.c + 3 * f0.d * f0.d > C) continue;
          if (std::abs(discriminant(f0)) < 1) continue;
          for (double t : ts)
            for (double lam : lambdas)
              for (double u : us) {
                const RealCubicForm f = lam * unipotent_action(u, diagonal_action(t, f0));
                double m = 0;
                for (double v : pure_third_log_derivatives(f)) m = std::max(m, std::abs(v));
                const double r = m * std::pow(t, 9) * std::pow(lam, 3);
                if (r < out.value) out = {r, f0, t, lam, u};
              }
        }
  return out;
}

}  // namespace shintani
