#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shintani/enumerate.hpp"
#include "shintani/specfun.hpp"

namespace shintani {

struct GammaFactorVariant {
  Variant tag = Variant::add;
  std::array<double, 4> kappa{};
  static constexpr double q = 432;
  static constexpr int d = 4;

  static GammaFactorVariant of(Variant v) {
    switch (v) {
      case Variant::add: return {v, {0, 1, 1.0 / 6, -1.0 / 6}};
      case Variant::sub: return {v, {0, 1, 5.0 / 6, 7.0 / 6}};
      default: throw std::invalid_argument("gamma factor: variant must be add or sub");
    }
  }
};

inline Complex log_gamma_factor(Complex s, Variant v) {
  const auto g = GammaFactorVariant::of(v);
  Complex out = -2.0 * s * std::log(std::numbers::pi);
  for (double k : g.kappa) out += log_gamma(0.5 * (s + k));
  return out;
}

/// pi^{-2s} prod_j Gamma((s + kappa_j)/2)
inline Complex gamma_factor(Complex s, Variant v) { return std::exp(log_gamma_factor(s, v)); }

/// 432^{1/2-s} gamma(1-s) / gamma(s)
inline Complex epsilon_factor(Complex s, Variant v) {
  return std::exp((0.5 - s) * std::log(GammaFactorVariant::q) + log_gamma_factor(1.0 - s, v) - log_gamma_factor(s, v));
}

/// 432^{s/2} gamma(s) xi
inline Complex completed_lambda(Complex s, Variant v, Complex xi) {
  return std::exp(0.5 * s * std::log(GammaFactorVariant::q) + log_gamma_factor(s, v)) * xi;
}

/// (432/pi^4)^{s/2} times the four Gamma values written out
inline Complex completed_lambda_displayed(Complex s, Variant v, Complex xi) {
  const auto g = GammaFactorVariant::of(v);
  Complex l = 0.5 * s * std::log(GammaFactorVariant::q / std::pow(std::numbers::pi, 4));
  for (double k : g.kappa) l += log_gamma(0.5 * (s + k));
  return std::exp(l) * xi;
}

struct DiagonalPair {
  Complex plus, minus;
};

/// Inverse of xi_add = sqrt3 xi_+ + xi_-, xi_sub = sqrt3 xi_+ - xi_-.
inline DiagonalPair diagonal_transform(Complex xi_add, Complex xi_sub) {
  return {(xi_add + xi_sub) / (2 * std::sqrt(3.0)), (xi_add - xi_sub) / 2.0};
}

// ---------------------------------------------------------------------------
// Test functions G

struct WeightChoice {
  enum class Kind { cospower, gaussian };
  Kind kind = Kind::cospower;
  double A = 2;

  static WeightChoice cospower(double A) {
    if (!(A >= 2)) throw std::invalid_argument("cospower weight needs A >= 2");
    return {Kind::cospower, A};
  }
  static WeightChoice gaussian() { return {Kind::gaussian, 0}; }

  /// G(u) = cos(pi u / 4A)^{-4dA} with d = 4, or e^{u^2}
  Complex log_G(Complex u) const {
    if (kind == Kind::gaussian) return u * u;
    if (std::abs(u.real()) >= 2 * A) throw std::domain_error("cospower weight: pole strip");
    return -16 * A * std::log(std::cos(std::numbers::pi * u / (4 * A)));
  }
  Complex G(Complex u) const { return std::exp(log_G(u)); }
  /// supremum of admissible contour abscissae
  double max_abscissa() const { return kind == Kind::gaussian ? 12.0 : 2 * A - 0.05; }
  std::string tag() const {
    if (kind == Kind::gaussian) return "gaussian";
    char buf[48];
    std::snprintf(buf, sizeof buf, "cospower(%g)", A);
    return buf;
  }
};

// ---------------------------------------------------------------------------
// Smoothing weight V_s(y)

namespace detail {
/// log of y^{-u} G(u) 432^{u/2} gamma(s+u)/gamma(s) / u
inline Complex v_log_integrand(Complex s, Complex u, double logy, Variant v, const WeightChoice& w, Complex lg_s) {
  return -u * logy + w.log_G(u) + 0.5 * u * std::log(GammaFactorVariant::q) + log_gamma_factor(s + u, v) - lg_s -
         std::log(u);
}
}  // namespace detail

struct WeightValue {
  Complex value;
  double abscissa = 3;  // Re u of the contour used
  double error = 0;     // quadrature error estimate
  double peak = 0;      // largest integrand modulus on the contour
};

/// V_s(y) = (1/2 pi i) int_{Re u = sigma} y^{-u} G(u) 432^{u/2} gamma(s+u)/gamma(s) du/u for sigma > 0.
inline WeightValue weight_V_on(Complex s, double y, Variant v, const WeightChoice& w, double sigma,
                               const QuadratureConfig& cfg = {}) {
  if (!(y > 0)) throw std::domain_error("weight_V: y must be positive");
  if (!(sigma > 0) || sigma > w.max_abscissa()) throw std::domain_error("weight_V: contour abscissa not admissible");
  const double logy = std::log(y);
  const Complex lg_s = log_gamma_factor(s, v);
  WeightValue out;
  out.abscissa = sigma;
  auto f = [&](double t) -> Complex {
    const Complex l = detail::v_log_integrand(s, Complex(sigma, t), logy, v, w, lg_s);
    if (l.real() < cfg.tail_log) return 0.0;
    const Complex val = std::exp(l);
    out.peak = std::max(out.peak, std::abs(val));
    return val;
  };
  // |G| decays at least like e^{-3 pi |t|} net of the gamma ratio once |t| exceeds a few units;
  // the window is widened until the end values are negligible.
  double L = 8;
  for (; L < 200; L *= 1.5) {
    const double edge = std::max(std::abs(f(L)), std::abs(f(-L)));
    if (edge < 1e-18 * std::max(out.peak, 1e-300)) break;
  }
  const auto r = integrate_oscillatory(f, -L, L, cfg);
  if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()))
    throw std::runtime_error("weight_V: quadrature did not converge (non-finite value)");
  out.value = r.value / (2 * std::numbers::pi);
  out.error = r.error / (2 * std::numbers::pi);
  if (out.error > 1e-6 * std::max(std::abs(out.value), 1e-16 * out.peak))
    throw std::runtime_error("weight_V: quadrature did not converge (error " + std::to_string(out.error) + ")");
  return out;
}

/// Contour abscissa in (0, max] minimizing the integrand modulus at Im u = 0, which keeps the
/// quadrature free of cancellation for every y.
inline double best_abscissa(Complex s, double y, Variant v, const WeightChoice& w) {
  const double logy = std::log(y);
  const Complex lg_s = log_gamma_factor(s, v);
  double best = 3, best_val = INFINITY;
  const double hi = w.max_abscissa();
  for (double sg = 0.02; sg <= hi; sg += 0.02) {
    const double m = detail::v_log_integrand(s, sg, logy, v, w, lg_s).real();
    if (m < best_val) best_val = m, best = sg;
  }
  return best;
}

inline WeightValue weight_V_auto(Complex s, double y, Variant v, const WeightChoice& w,
                                 const QuadratureConfig& cfg = {}) {
  return weight_V_on(s, y, v, w, best_abscissa(s, y, v, w), cfg);
}

/// The fixed contour Re u = 3.
inline Complex weight_V(Complex s, double y, Variant v, const WeightChoice& w, const QuadratureConfig& cfg = {}) {
  return weight_V_on(s, y, v, w, 3, cfg).value;
}

/// Piecewise Chebyshev interpolant of V_s(y) in x = log y on [log y_min, log y_max].
class WeightTable {
 public:
  static constexpr int kDegree = 24;
  static constexpr double kSegment = 0.25;

  WeightTable(Complex s, double y_max, Variant v, const WeightChoice& w, const QuadratureConfig& cfg = {})
      : WeightTable(s, 1.0, y_max, v, w, cfg) {}

  WeightTable(Complex s, double y_min, double y_max, Variant v, const WeightChoice& w, const QuadratureConfig& cfg = {})
      : s_(s), variant_(v), weight_(w) {
    if (!(y_min > 0) || !(y_max >= y_min)) throw std::invalid_argument("WeightTable: need 0 < y_min <= y_max");
    x_min_ = std::log(y_min);
    const int segs = std::max(1, static_cast<int>(std::ceil((std::log(y_max) - x_min_) / kSegment)));
    x_max_ = x_min_ + segs * kSegment;
    for (int j = 0; j <= kDegree; ++j) {
      nodes_[j] = std::cos(std::numbers::pi * (j + 0.5) / (kDegree + 1));
      bary_[j] = ((j % 2) ? -1.0 : 1.0) * std::sin(std::numbers::pi * (j + 0.5) / (kDegree + 1));
    }
    values_.resize(static_cast<std::size_t>(segs) * (kDegree + 1));
    for (int k = 0; k < segs; ++k)
      for (int j = 0; j <= kDegree; ++j) {
        const double x = x_min_ + (k + 0.5 * (nodes_[j] + 1)) * kSegment;
        const auto r = weight_V_auto(s, std::exp(x), v, w, cfg);
        values_[k * (kDegree + 1) + j] = r.value;
        max_error_ = std::max(max_error_, r.error);
        ++evaluations_;
      }
  }

  Complex operator()(double y) const {
    const double x = std::log(y) - x_min_;
    if (x < -1e-12 || x > x_max_ - x_min_ + 1e-12) throw std::domain_error("WeightTable: y outside tabulated range");
    int k = std::clamp(static_cast<int>(x / kSegment), 0, static_cast<int>(values_.size() / (kDegree + 1)) - 1);
    const double t = 2 * (x / kSegment - k) - 1;
    Complex num = 0;
    double den = 0;
    for (int j = 0; j <= kDegree; ++j) {
      const double diff = t - nodes_[j];
      if (diff == 0) return values_[k * (kDegree + 1) + j];
      const double c = bary_[j] / diff;
      num += c * values_[k * (kDegree + 1) + j];
      den += c;
    }
    return num / den;
  }

  double y_max() const { return std::exp(x_max_); }
  double max_quadrature_error() const { return max_error_; }
  int evaluations() const { return evaluations_; }
  Complex s() const { return s_; }

 private:
  Complex s_;
  Variant variant_;
  WeightChoice weight_;
  double x_min_ = 0, x_max_ = 0;
  std::array<double, kDegree + 1> nodes_{}, bary_{};
  std::vector<Complex> values_;
  double max_error_ = 0;
  int evaluations_ = 0;
};

/// Kahan-compensated complex accumulator; fixed order keeps results reproducible.
struct CompensatedSum {
  Complex sum = 0, comp = 0;
  void add(Complex x) {
    const Complex yv = x - comp;
    const Complex t = sum + yv;
    comp = (t - sum) - yv;
    sum = t;
  }
};

// ---------------------------------------------------------------------------
// Truncation and tail bounds

/// B(sigma) = (1/2 pi) int |G(u) 432^{u/2} gamma(s+u)/gamma(s)/u| over Re u = sigma, so that
/// |V_s(y)| <= B(sigma) y^{-sigma}.
inline double weight_decay_constant(Complex s, Variant v, const WeightChoice& w, double sigma,
                                    const QuadratureConfig& cfg = {}) {
  if (!(sigma > 0) || sigma > w.max_abscissa()) throw std::domain_error("decay constant: abscissa not admissible");
  const Complex lg_s = log_gamma_factor(s, v);
  double peak = 0;
  auto f = [&](double t) -> Complex {
    const double l = detail::v_log_integrand(s, Complex(sigma, t), 0.0, v, w, lg_s).real();
    if (l < cfg.tail_log) return 0.0;
    const double val = std::exp(l);
    peak = std::max(peak, val);
    return val;
  };
  double L = 8;
  for (; L < 200; L *= 1.5)
    if (std::max(std::abs(f(L)), std::abs(f(-L))) < 1e-18 * std::max(peak, 1e-300)) break;
  return integrate_oscillatory(f, -L, L, cfg).value.real() / (2 * std::numbers::pi);
}

/// max over 1 <= x <= X of (1/x) sum_{n <= x} |a(n)|
inline double coefficient_density(const std::vector<double>& a) {
  double acc = 0, best = 0;
  for (std::size_t n = 1; n < a.size(); ++n) {
    acc += std::abs(a[n]);
    best = std::max(best, acc / static_cast<double>(n));
  }
  return best;
}

/// Bound on the two discarded tails sum_{n > N}, from |V| <= B(sigma) y^{-sigma} and
/// sum_{n <= x} |a(n)| <= C x by partial summation, minimized over a grid of sigma.
class TailBound {
 public:
  TailBound(Complex s, Variant v, const WeightChoice& w, double density, const QuadratureConfig& cfg = {})
      : density_(density) {
    const double hi = w.max_abscissa();
    for (double sg = 0.75; sg <= hi + 1e-12; sg += 0.25) grid_.push_back({sg, weight_decay_constant(s, v, w, sg, cfg)});
    if (hi - grid_.back().sigma > 1e-9) grid_.push_back({hi, weight_decay_constant(s, v, w, hi, cfg)});
  }

  /// balance b places the sums at n/b and n b
  double operator()(double N, double balance = 1) const {
    double best = INFINITY;
    for (const auto& g : grid_) {
      const double spread = std::pow(balance, g.sigma) + std::pow(balance, -g.sigma);
      best = std::min(best, spread * density_ * g.B * (g.sigma + 0.5) / (g.sigma - 0.5) * std::pow(N, 0.5 - g.sigma));
    }
    return best;
  }

  /// smallest N with bound(N) <= tol, capped at 1e18
  double length_for(double tol) const {
    if ((*this)(1) <= tol) return 1;
    double hi = 2;
    while ((*this)(hi) > tol) {
      if (hi > 1e18) return INFINITY;
      hi *= 2;
    }
    double lo = hi / 2;
    while (hi - lo > 1) {
      const double mid = std::floor(0.5 * (lo + hi));
      ((*this)(mid) > tol ? lo : hi) = mid;
    }
    return hi;
  }

  double density() const { return density_; }

 private:
  struct Point {
    double sigma, B;
  };
  double density_;
  std::vector<Point> grid_;
};

/// Bound on the residue contributions, |Res_{u = rho - s} Lambda(s+u) G(u)/u| / |432^{s/2} gamma(s)| summed
/// over rho in {1, 5/6, 1/6, 0} and both sums, with |Res Lambda| <= residue_scale assumed.
inline double residue_bound(Complex s, Variant v, const WeightChoice& w, double residue_scale = 1e3) {
  const double lq = 0.5 * std::log(GammaFactorVariant::q);
  const double l_lambda = (s * lq + log_gamma_factor(s, v)).real();
  double total = 0;
  for (double rho : {1.0, 5.0 / 6, 1.0 / 6, 0.0}) {
    const Complex u = rho - s;
    const double l = w.log_G(u).real() - std::log(std::abs(u)) - l_lambda;
    total += 2 * residue_scale * std::exp(l);
  }
  return total;
}

struct CriticalEvaluation {
  Complex s;
  Variant variant = Variant::add;
  WeightChoice weight;
  std::int64_t N = 0;
  Complex value;
  double tail_bound = 0;
  double residue_bound = 0;
  bool residue_caveat = false;  // residue term dropped without a bound below tolerance
  double density = 0;
  double weight_quadrature_error = 0;
  double interpolation_error = 0;
  int weight_evaluations = 0;
};

class TableTooSmall : public std::invalid_argument {
 public:
  TableTooSmall(double required, std::int64_t have)
      : std::invalid_argument("xi_critical: table bound " + std::to_string(have) + " below required truncation " +
                              std::to_string(required)),
        required_X(required) {}
  double required_X;
};

namespace detail {
inline double table_interpolation_error(const WeightTable& V, Complex s, double y_min, double y_max, Variant v,
                                        const WeightChoice& w, const QuadratureConfig& cfg) {
  double worst = 0;
  const double xm = std::log(y_max);
  for (double x = std::log(y_min) + 0.37 * WeightTable::kSegment; x < xm; x += 2.1 * WeightTable::kSegment) {
    const double y = std::exp(x);
    worst = std::max(worst, std::abs(V(y) - weight_V_auto(s, y, v, w, cfg).value));
  }
  return worst;
}
}  // namespace detail

/// Both sums of the approximate functional equation at s = 1/2 + i tau truncated at n <= N, with V evaluated
/// at y = n / balance in the first sum and y = n balance in the second; coefficients a[0..] as returned by
/// dirichlet_coefficients. The exact value does not depend on balance.
inline CriticalEvaluation xi_truncated(double tau, Variant v, const std::vector<double>& a, const WeightChoice& w,
                                       std::int64_t N, const QuadratureConfig& cfg = {}, double balance = 1) {
  if (!(balance > 0)) throw std::invalid_argument("xi: balance must be positive");
  if (w.kind != WeightChoice::Kind::cospower) throw std::invalid_argument("xi: untwisted evaluation needs cospower G");
  if (N < 1 || static_cast<std::size_t>(N) >= a.size()) throw std::invalid_argument("xi: N outside coefficient range");
  cfg.validate();
  const Complex s(0.5, tau), sd(0.5, -tau);
  CriticalEvaluation out;
  out.s = s;
  out.variant = v;
  out.weight = w;
  out.N = N;
  const double Nd = static_cast<double>(N);
  const WeightTable V1(s, 1 / balance, Nd / balance, v, w, cfg), V2(sd, balance, Nd * balance, v, w, cfg);
  out.weight_quadrature_error = std::max(V1.max_quadrature_error(), V2.max_quadrature_error());
  out.weight_evaluations = V1.evaluations() + V2.evaluations();
  out.interpolation_error = std::max(detail::table_interpolation_error(V1, s, 1 / balance, Nd / balance, v, w, cfg),
                                     detail::table_interpolation_error(V2, sd, balance, Nd * balance, v, w, cfg));
  const Complex eps = epsilon_factor(s, v);
  CompensatedSum S1, S2;
  for (std::int64_t n = 1; n <= N; ++n) {
    if (a[n] == 0) continue;
    const double y = static_cast<double>(n);
    const Complex ph = std::polar(a[n] / std::sqrt(y), -tau * std::log(y));
    S1.add(ph * V1(y / balance));
    S2.add(std::conj(ph) * V2(y * balance));
  }
  out.value = S1.sum + eps * S2.sum;
  out.density = coefficient_density(std::vector<double>(a.begin(), a.begin() + N + 1));
  out.tail_bound = TailBound(s, v, w, out.density, cfg)(Nd, balance);
  out.residue_bound = residue_bound(s, v, w);
  return out;
}

/// xi^*(1/2 + i tau) truncated at the shortest certified length for tolerance tol.
inline CriticalEvaluation xi_critical(double tau, Variant v, const ClassTable& table, const WeightChoice& w,
                                      const QuadratureConfig& cfg = {}, double tol = 1e-6) {
  if (!(tau >= 1)) throw std::invalid_argument("xi_critical: tau must be >= 1");
  const auto a = dirichlet_coefficients(table, v);
  const Complex s(0.5, tau);
  const double C = coefficient_density(a);
  const double N = TailBound(s, v, w, C, cfg).length_for(tol);
  if (!(N <= static_cast<double>(table.bound()))) throw TableTooSmall(N, table.bound());
  auto out = xi_truncated(tau, v, a, w, static_cast<std::int64_t>(N), cfg);
  out.residue_caveat = tau < 40 || out.residue_bound > tol;
  return out;
}

// ---------------------------------------------------------------------------
// Scan output

struct ScanRow {
  double tau;
  CriticalEvaluation eval;
};

inline void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
  os << "tau,variant,re_xi,im_xi,abs_xi,N,tail_bound,G_tag\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%.17g,%lld,%.17g,%s\n", r.tau, to_string(r.eval.variant),
                  r.eval.value.real(), r.eval.value.imag(), std::abs(r.eval.value), static_cast<long long>(r.eval.N),
                  r.eval.tail_bound, r.eval.weight.tag().c_str());
    os << buf;
  }
}

}  // namespace shintani
