#pragma once

// van der Corput toolkit: the inequality, linear phase sums, the cubic Taylor
// model of tau log|Disc| and the two averaging experiments over continuous
// neighbourhoods of a form.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "shintani/coords.hpp"
#include "shintani/specfun.hpp"

namespace shintani {

// ---------------------------------------------------------------------------
// van der Corput inequality

struct VdcResult {
  double lhs = 0, rhs = 0;
  bool holds = true;
};

/// |sum c_n|^2 and the right side (N+H)/(H+1) sum|c_n|^2 + 2(N+H)/(H+1) sum_h (1 - h/(H+1)) |sum c_{n+h} conj c_n|.
inline VdcResult vdc_inequality(const std::vector<Complex>& c, int H) {
  const int N = static_cast<int>(c.size());
  if (H < 1 || H >= N) throw std::invalid_argument("vdc_inequality: need 1 <= H < N");
  std::complex<long double> total = 0;
  long double energy = 0;
  for (const auto& x : c) {
    total += std::complex<long double>(x);
    energy += std::norm(std::complex<long double>(x));
  }
  long double corr = 0;
  for (int h = 1; h <= H; ++h) {
    std::complex<long double> s = 0;
    for (int n = 0; n + h < N; ++n) s += std::complex<long double>(c[n + h]) * std::conj(std::complex<long double>(c[n]));
    corr += (1.0L - static_cast<long double>(h) / (H + 1)) * std::abs(s);
  }
  const long double k = static_cast<long double>(N + H) / (H + 1);
  VdcResult r;
  r.lhs = static_cast<double>(std::norm(total));
  r.rhs = static_cast<double>(k * energy + 2 * k * corr);
  // long double accumulation; the slack covers rounding only
  r.holds = r.lhs <= r.rhs * (1 + 1e-12);
  return r;
}

// ---------------------------------------------------------------------------
// Linear phase

/// distance to the nearest integer
inline double circle_norm(double x) { return std::abs(x - std::nearbyint(x)); }

struct LinearPhaseSum {
  Complex value;
  double bound = 0;
};

/// sum_{j=1}^N e(alpha j) in closed form, with min(N, 1/||alpha||).
inline LinearPhaseSum linear_phase_sum(double alpha, std::int64_t N) {
  if (N < 1) throw std::invalid_argument("linear_phase_sum: N must be >= 1");
  const double r = alpha - std::nearbyint(alpha);
  const double n = static_cast<double>(N);
  LinearPhaseSum out;
  out.bound = r == 0 ? n : std::min(n, 1 / std::abs(r));
  if (r == 0) {
    out.value = n;
    return out;
  }
  // e(r (N+1)/2) sin(pi N r) / sin(pi r), with N r reduced mod 2 for accuracy
  const double nr = std::fmod(n * r, 2.0);
  const double ratio = std::sin(std::numbers::pi * nr) / std::sin(std::numbers::pi * r);
  out.value = std::polar(ratio, std::numbers::pi * std::fmod(r * (n + 1), 2.0));
  return out;
}

// ---------------------------------------------------------------------------
// Taylor model of the phase

/// Calibrated constant K in |remainder(y)| <= K delta ||y||_inf^4 (largest measured ratio 4.4e3).
inline constexpr double kTaylorRemainderConstant = 1e4;

struct PhaseModel {
  RealCubicForm f;
  double tau = 0;
  double log_disc = 0;
  double T1 = 0;     // cusp height t_f
  double Y = 0;      // |Disc f|
  double delta = 0;  // tau T1^12 / Y
  std::vector<std::pair<MultiIndex, double>> terms;  // D^alpha log|Disc| / alpha!, 1 <= |alpha| <= 3

  /// -tau (log|Disc f| + sum terms y^alpha)
  double operator()(const std::array<double, 4>& y) const {
    double acc = log_disc;
    for (const auto& [e, c] : terms) {
      double m = c;
      for (int i = 0; i < 4; ++i)
        for (int k = 0; k < e[i]; ++k) m *= y[i];
      acc += m;
    }
    return -tau * acc;
  }

  /// |-tau log|Disc(f + y)| - model(y)|, the phase remainder, in long double
  double remainder(const std::array<double, 4>& y) const {
    const long double a = (long double)f.a + y[0], b = (long double)f.b + y[1], c = (long double)f.c + y[2],
                      d = (long double)f.d + y[3];
    const long double D = b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d;
    return static_cast<double>(std::abs(-(long double)tau * std::log(std::abs(D)) - (long double)(*this)(y)));
  }

  double first_order(int i) const {
    MultiIndex e{0, 0, 0, 0};
    e[i] = 1;
    for (const auto& [ex, c] : terms)
      if (ex == e) return c;
    return 0;
  }
};

inline PhaseModel phase_taylor_model(const RealCubicForm& f, double tau) {
  const double D = discriminant(f);
  if (!(std::abs(D) > 0)) throw std::domain_error("phase_taylor_model: singular form");
  PhaseModel m;
  m.f = f;
  m.tau = tau;
  m.log_disc = std::log(std::abs(D));
  m.Y = std::abs(D);
  m.T1 = coords_from_form(f).t;
  m.delta = tau * std::pow(m.T1, 12) / m.Y;
  const auto s = detail::log_disc_series(f);
  for (const auto& e : detail::Series4::exponents()) {
    const int order = e[0] + e[1] + e[2] + e[3];
    if (order >= 1 && order <= 3) m.terms.push_back({e, s[e]});
  }
  return m;
}

/// |Disc(f + y)|^{-i tau}, with the discriminant accumulated in long double
inline Complex disc_phase(const RealCubicForm& f, const std::array<double, 4>& y, double tau) {
  const long double a = (long double)f.a + y[0], b = (long double)f.b + y[1], c = (long double)f.c + y[2],
                    d = (long double)f.d + y[3];
  const long double D = b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d;
  if (D == 0) throw std::domain_error("disc_phase: zero discriminant in the sample");
  const long double ph = -(long double)tau * std::log(std::abs(D));
  return std::polar(1.0, static_cast<double>(std::fmod(ph, 2 * std::numbers::pi_v<long double>)));
}

// ---------------------------------------------------------------------------
// Parameters

enum class ExperimentMode { generic, reducible };

inline const char* to_string(ExperimentMode m) { return m == ExperimentMode::generic ? "generic" : "reducible"; }

inline ExperimentMode parse_mode(const std::string& s) {
  if (s == "generic") return ExperimentMode::generic;
  if (s == "reducible") return ExperimentMode::reducible;
  throw std::invalid_argument("unknown mode: " + s);
}

struct ExperimentParams {
  ExperimentMode mode = ExperimentMode::generic;
  double Y = 0, tau = 0, T = 0;
  double R = 0, R1 = 0, N = 0, H1 = 0, H2 = 0;
  double alpha = 0;  // third-derivative scale (generic) or first-derivative scale (reducible)
  double delta = 0;
  std::uint64_t seed = 1;
  std::int64_t samples = 40000;
  double target_stderr = 1e-2;
  std::vector<std::string> violations;  // hypotheses of the cancellation bound that fail for these inputs

  bool hypotheses_hold() const { return violations.empty(); }
  /// the cancellation bound without its implied constant
  double predicted_scale() const {
    if (mode == ExperimentMode::generic) return std::pow(T, 8.0 / 3) * std::pow(tau, -1.0 / 27) * std::pow(std::log(tau), 4.0 / 9);
    return std::sqrt(Y) / (std::cbrt(tau) * T * T);
  }
};

/// R from the standard parameter recipe; alpha is taken at the lower end of its range unless given.
inline ExperimentParams recipe_parameters(double Y, double tau, double T, ExperimentMode mode, double alpha = 0) {
  if (!(Y > 0) || !(tau > 0) || !(T > 0)) throw std::invalid_argument("recipe_parameters: inputs must be positive");
  ExperimentParams p;
  p.mode = mode;
  p.Y = Y;
  p.tau = tau;
  p.T = T;
  if (mode == ExperimentMode::generic) {
    p.R = std::pow(Y, 0.25) / (std::pow(tau, 7.0 / 27) * std::pow(T, 7.0 / 3));
    p.alpha = alpha > 0 ? alpha : tau / (std::pow(T, 9) * std::pow(Y, 0.75));
    p.delta = tau * std::pow(T, 12) / Y;
    p.R1 = 1 / (p.R * std::pow(p.alpha, 2.0 / 3));
    p.N = 2 * p.R / p.R1;
    p.H1 = std::cbrt(1 / (p.alpha * std::pow(p.R1, 3)));
    p.H2 = p.H1 * p.H1;
    if (Y < std::pow(tau, 4.0 / 3) * std::pow(T, 12)) p.violations.push_back("Y >> tau^{4/3} T^12");
    if (T > std::pow(Y, 1.0 / 84)) p.violations.push_back("T = o(Y^{1/84})");
    if (p.delta * std::pow(p.R, 4) >= 1) p.violations.push_back("delta R^4 = o(1)");
    if (p.alpha * std::pow(p.R, 3) < 1) p.violations.push_back("alpha R^3 >> 1");
  } else {
    p.R = T * T * std::sqrt(Y) / std::pow(tau, 2.0 / 3);
    p.alpha = alpha > 0 ? alpha : 1 / Y;
    p.delta = 1 / (std::pow(T, 6) * std::sqrt(Y));
    if (tau * p.R * p.R * p.delta >= 1) p.violations.push_back("R^2 = o(T^6 Y^{1/2} / tau)");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Averages

struct PhaseAverage {
  Complex value;
  double std_error = 0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  double modulus() const { return std::abs(value); }
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
inline constexpr std::int64_t kShard = 4096;
}  // namespace detail

/// Monte Carlo mean of |Disc(f + y)|^{-i tau} over y uniform in the sup-norm ball of radius R.
inline PhaseAverage disc_phase_average(const RealCubicForm& f, double R, double tau, const ExperimentParams& params,
                                       unsigned threads = 1) {
  if (!(std::abs(discriminant(f)) >= 1)) throw std::invalid_argument("disc_phase_average: need |Disc f| >= 1");
  if (!(R > 0)) throw std::invalid_argument("disc_phase_average: R must be positive");
  if (params.samples < 2) throw std::invalid_argument("disc_phase_average: need at least two samples");
  const std::int64_t n = params.samples;
  const std::int64_t shards = (n + detail::kShard - 1) / detail::kShard;
  std::vector<Complex> sums(shards);
  auto run = [&](std::int64_t k) {
    std::mt19937_64 rng(detail::splitmix64(params.seed ^ detail::splitmix64(static_cast<std::uint64_t>(k))));
    std::uniform_real_distribution<double> u(-R, R);
    const std::int64_t m = std::min(detail::kShard, n - k * detail::kShard);
    Complex s = 0;
    for (std::int64_t i = 0; i < m; ++i) {
      const std::array<double, 4> y{u(rng), u(rng), u(rng), u(rng)};
      s += disc_phase(f, y, tau);
    }
    sums[k] = s;
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(shards)));
  if (threads == 1) {
    for (std::int64_t k = 0; k < shards; ++k) run(k);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::int64_t k = w; k < shards; k += threads) run(k);
      });
    for (auto& t : pool) t.join();
  }
  Complex total = 0;
  for (const auto& s : sums) total += s;
  PhaseAverage out;
  out.samples = n;
  out.seed = params.seed;
  out.value = total / static_cast<double>(n);
  // each sample has modulus one, so the variance is 1 - |mean|^2
  out.std_error = std::sqrt(std::max(0.0, 1 - std::norm(out.value)) / static_cast<double>(n - 1));
  if (out.std_error > params.target_stderr) {
    const double need = (1 - std::norm(out.value)) / (params.target_stderr * params.target_stderr) + 1;
    throw std::runtime_error("disc_phase_average: standard error " + std::to_string(out.std_error) + " exceeds target; need about " +
                             std::to_string(static_cast<long long>(std::ceil(need))) + " samples");
  }
  return out;
}

struct LineAverage {
  Complex value;
  double alpha = 0;        // d/dd log|Disc(f_d)| at d = 0
  double excluded = 0;     // bound on the contribution of the excised neighbourhood of a zero
  int panels = 0;
};

/// (1/2R) int_{-R}^{R} |Disc(f_d)|^{-i tau} dd with f_d = f + (0,0,0,d), by Gauss-Legendre panels
/// each carrying at most one radian of phase.
inline LineAverage reducible_line_average(const RealCubicForm& f, double R, double tau) {
  if (f.a != 0) throw std::invalid_argument("reducible_line_average: leading coefficient must be 0");
  if (f.b == 0) throw std::invalid_argument("reducible_line_average: need b != 0");
  if (!(std::abs(discriminant(f)) >= 1)) throw std::invalid_argument("reducible_line_average: need |Disc f| >= 1");
  if (!(R > 0)) throw std::invalid_argument("reducible_line_average: R must be positive");
  // with a = 0 the discriminant is b^2 c^2 - 4 b^3 d
  const double A = f.b * f.b * f.c * f.c - 4 * f.b * f.b * f.b * f.d, B = 4 * f.b * f.b * f.b;
  LineAverage out;
  out.alpha = -B / A;
  const double d0 = A / B;
  const double eta = 1e-15 * 2 * R * std::abs(B);  // excising |Disc| < eta costs at most 2e-15
  auto D = [&](double d) { return A - B * d; };
  auto phase = [&](double d) { return -tau * std::log(std::abs(D(d))); };
  Complex total = 0;
  auto piece = [&](double lo, double hi) {
    if (!(hi > lo)) return;
    // phase is monotone on a side of the zero, so panel ends are found from log|D|
    const double p0 = phase(lo), p1 = phase(hi);
    const int panels = static_cast<int>(std::min(2e7, std::ceil(std::abs(p1 - p0)))) + 1;
    const double L0 = std::log(std::abs(D(lo))), L1 = std::log(std::abs(D(hi)));
    const double sgn = D(0.5 * (lo + hi)) > 0 ? 1 : -1;
    auto d_at = [&](double L) { return (A - sgn * std::exp(L)) / B; };
    for (int k = 0; k < panels; ++k) {
      double a = d_at(L0 + (L1 - L0) * k / panels), b = d_at(L0 + (L1 - L0) * (k + 1) / panels);
      if (k == 0) a = lo;
      if (k == panels - 1) b = hi;
      total += boost::math::quadrature::gauss<double, 20>::integrate(
          [&](double d) { return std::polar(1.0, std::fmod(phase(d), 2 * std::numbers::pi)); }, a, b);
    }
    out.panels += panels;
  };
  if (d0 > -R && d0 < R) {
    const double w = eta / std::abs(B);
    piece(-R, d0 - w);
    piece(d0 + w, R);
    out.excluded = 2 * w / (2 * R);
  } else {
    piece(-R, R);
  }
  out.value = total / (2 * R);
  return out;
}

// ---------------------------------------------------------------------------
// Output

inline void write_experiment_csv_header(std::ostream& os) {
  os << "mode,Y,tau,T,R,samples,seed,re_avg,im_avg,abs_avg,stderr\n";
}

inline void write_experiment_csv_row(std::ostream& os, const ExperimentParams& p, const PhaseAverage& a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%lld,%llu,%.17g,%.17g,%.17g,%.17g\n", to_string(p.mode), p.Y,
                p.tau, p.T, p.R, static_cast<long long>(a.samples), static_cast<unsigned long long>(a.seed), a.value.real(),
                a.value.imag(), a.modulus(), a.std_error);
  os << buf;
}

}  // namespace shintani
