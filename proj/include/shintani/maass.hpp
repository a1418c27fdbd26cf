#pragma once

// Even Hecke-Maass cusp forms for SL2(Z): coefficient files, evaluation of
//   phi(n_u a_t) = 2t sum_n rho(n) K_{iR}(2 pi n t^2) cos(2 pi n u),
// Hecke relations, the convolution identity against exp(-tr g^t g), and
// twisted partial sums over classes of binary cubic forms.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shintani/coords.hpp"
#include "shintani/enumerate.hpp"
#include "shintani/specfun.hpp"

namespace shintani {

namespace detail {

/// e^x K_{iR}(x) as piecewise Chebyshev interpolants in log x.
class BesselTable {
 public:
  static constexpr int kDegree = 24;
  static constexpr double kSegment = 0.25;
  static constexpr double kLogMin = -4.0, kLogMax = 4.875;  // x in [0.018, 131]

  explicit BesselTable(double R) : R_(R) {
    const int segs = static_cast<int>(std::lround((kLogMax - kLogMin) / kSegment));
    nodes_.resize(kDegree + 1);
    for (int j = 0; j <= kDegree; ++j) nodes_[j] = std::cos(std::numbers::pi * j / kDegree);
    values_.resize(std::size_t(segs) * (kDegree + 1));
    for (int s = 0; s < segs; ++s)
      for (int j = 0; j <= kDegree; ++j) {
        const double x = std::exp(kLogMin + kSegment * (s + 0.5 * (nodes_[j] + 1)));
        values_[std::size_t(s) * (kDegree + 1) + j] = std::exp(x) * direct(x);
      }
    segments_ = segs;
  }

  double direct(double x) const { return bessel_k(Complex(0, R_), x).real(); }

  /// K_{iR}(x).
  double operator()(double x) const {
    const double l = std::log(x);
    if (!(l >= kLogMin && l < kLogMax)) return direct(x);
    const int s = std::min(segments_ - 1, static_cast<int>((l - kLogMin) / kSegment));
    const double z = 2 * (l - kLogMin - kSegment * s) / kSegment - 1;
    const double* f = &values_[std::size_t(s) * (kDegree + 1)];
    double num = 0, den = 0;
    for (int j = 0; j <= kDegree; ++j) {
      const double d = z - nodes_[j];
      if (d == 0) return f[j] * std::exp(-x);
      const double w = (j == 0 || j == kDegree ? 0.5 : 1.0) * (j % 2 ? -1.0 : 1.0) / d;
      num += w * f[j];
      den += w;
    }
    return num / den * std::exp(-x);
  }

 private:
  double R_;
  int segments_ = 0;
  std::vector<double> nodes_, values_;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

}  // namespace detail

struct MaassFormData {
  double R = 0;
  std::string parity = "even";
  std::vector<double> rho;  // rho[n - 1]
  std::string source;
  double hecke_tol = 1e-3;
  /// phi is amplitude times the normalized form; 1 for ingested data.
  double amplitude = 1;
  std::shared_ptr<const detail::BesselTable> kernel;

  Complex nu() const { return {0, R}; }
  std::size_t n_max() const { return rho.size(); }
  double coefficient(std::size_t n) const {
    if (n < 1 || n > rho.size()) throw std::out_of_range("maass: coefficient index " + std::to_string(n) + " outside 1.." + std::to_string(rho.size()));
    return rho[n - 1];
  }
  double bessel(double x) const { return kernel ? (*kernel)(x) : bessel_k(nu(), x).real(); }

  MaassFormData scaled(double c) const {
    MaassFormData out = *this;
    out.amplitude *= c;
    return out;
  }

  /// max |rho(n)|/sqrt n, used to bound coefficients beyond the truncation.
  double coefficient_envelope() const {
    double b = 0;
    for (std::size_t n = 1; n <= rho.size(); ++n) b = std::max(b, std::abs(rho[n - 1]) / std::sqrt(double(n)));
    return b;
  }
};

struct InsufficientCoefficients : std::runtime_error {
  std::size_t required_n;
  InsufficientCoefficients(std::size_t need, std::size_t have, const std::string& where)
      : std::runtime_error(where + ": needs " + std::to_string(need) + " coefficients, data has " + std::to_string(have)),
        required_n(need) {}
};

inline double hecke_residual(const MaassFormData& phi, std::int64_t m, std::int64_t n) {
  if (m < 1 || n < 1) throw std::out_of_range("hecke_residual: indices must be positive");
  if (m > std::int64_t(phi.n_max()) || n > std::int64_t(phi.n_max()) || m * n > std::int64_t(phi.n_max()))
    throw std::out_of_range("hecke_residual: m n = " + std::to_string(m * n) + " exceeds N_max = " + std::to_string(phi.n_max()));
  const std::int64_t g = std::gcd(m, n);
  double rhs = 0;
  for (std::int64_t d = 1; d <= g; ++d)
    if (g % d == 0) rhs += phi.coefficient(std::size_t(m * n / (d * d)));
  return std::abs(phi.coefficient(std::size_t(m)) * phi.coefficient(std::size_t(n)) - rhs);
}

inline MaassFormData make_maass_form(double R, std::vector<double> rho, std::string source) {
  MaassFormData phi;
  phi.R = R;
  phi.rho = std::move(rho);
  phi.source = std::move(source);
  phi.kernel = std::make_shared<const detail::BesselTable>(R);
  return phi;
}

/// Reads `# key=value` headers (R, parity, source, optional hecke_tol) and `n,rho` rows.
inline MaassFormData load_maass_form(std::istream& is, const std::string& name = "<stream>") {
  auto fail = [&](std::size_t line, const std::string& msg) -> std::runtime_error {
    return std::runtime_error(name + ":" + std::to_string(line) + ": " + msg);
  };
  double R = 0, tol = 1e-3;
  bool haveR = false, haveParity = false;
  std::string source;
  std::vector<double> rho;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string s = detail::trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      const std::string body = detail::trim(s.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = detail::trim(body.substr(0, eq)), value = detail::trim(body.substr(eq + 1));
      try {
        if (key == "R") {
          std::size_t pos;
          R = std::stod(value, &pos);
          if (pos != value.size() || !(R > 0)) throw std::invalid_argument("");
          haveR = true;
        } else if (key == "parity") {
          if (value != "even") throw fail(lineno, "only parity=even is supported, got '" + value + "'");
          haveParity = true;
        } else if (key == "source") {
          source = value;
        } else if (key == "hecke_tol") {
          tol = std::stod(value);
          if (!(tol > 0)) throw std::invalid_argument("");
        }
      } catch (const std::runtime_error&) {
        throw;
      } catch (const std::exception&) {
        throw fail(lineno, "bad value for " + key + ": '" + value + "'");
      }
      continue;
    }
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw fail(lineno, "expected 'n,rho'");
    std::int64_t n;
    double v;
    try {
      std::size_t p1, p2;
      const std::string a = detail::trim(s.substr(0, comma)), b = detail::trim(s.substr(comma + 1));
      n = std::stoll(a, &p1);
      v = std::stod(b, &p2);
      if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw fail(lineno, "cannot parse '" + s + "'");
    }
    if (n != std::int64_t(rho.size()) + 1) throw fail(lineno, "expected n = " + std::to_string(rho.size() + 1) + ", got " + std::to_string(n));
    if (!std::isfinite(v)) throw fail(lineno, "non-finite coefficient");
    rho.push_back(v);
    lines.push_back(lineno);
  }
  if (!haveR) throw fail(lineno, "missing '# R=' header");
  if (!haveParity) throw fail(lineno, "missing '# parity=' header");
  if (rho.size() < 100) throw fail(lineno, "need at least 100 coefficients, found " + std::to_string(rho.size()));
  if (rho[0] != 1) throw fail(lines[0], "normalization requires rho(1) = 1");

  MaassFormData phi;
  phi.R = R;
  phi.rho = rho;
  phi.source = source;
  phi.hecke_tol = tol;
  const std::int64_t N = std::int64_t(rho.size());
  for (std::int64_t m = 2; m * m <= N; ++m)
    for (std::int64_t n = m; m * n <= N; ++n) {
      const double r = hecke_residual(phi, m, n);
      if (!(r <= tol)) {
        std::ostringstream os;
        os << "Hecke relation fails for (m, n) = (" << m << ", " << n << "): residual " << r << " > " << tol;
        throw fail(lines[std::size_t(m * n - 1)], os.str());
      }
    }
  phi.kernel = std::make_shared<const detail::BesselTable>(R);
  return phi;
}

inline MaassFormData load_maass_form(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_maass_form(in, path);
}

// ---------------------------------------------------------------------------
// Evaluation

struct PhiValue {
  double value = 0;
  double tail_bound = 0;
  std::size_t terms = 0;
};

/// phi(., t) at fixed t: coefficients 2t rho(n) K(2 pi n t^2), summed by Clenshaw.
class PhiSlice {
 public:
  /// Truncation chosen so that the tail is below `tol`.
  PhiSlice(const MaassFormData& phi, double t, double tol) : t_(t) {
    check_t(t);
    if (!(tol > 0)) throw std::invalid_argument("phi_eval: tolerance must be positive");
    const double B = std::abs(phi.amplitude) * phi.coefficient_envelope();
    const double q = std::exp(-kTwoPi * t * t);
    std::size_t M = 0;
    if (B > 0) {
      // B q^{M+1}/(1-q) <= tol
      const double need = std::log(tol * (1 - q) / B) / std::log(q) - 1;
      M = need <= 0 ? 0 : static_cast<std::size_t>(std::ceil(need));
      if (M > phi.n_max()) throw InsufficientCoefficients(M, phi.n_max(), "phi_eval at t = " + std::to_string(t));
    }
    build(phi, M);
  }

  /// Exactly `terms` terms.
  PhiSlice(const MaassFormData& phi, double t, std::size_t terms, bool) : t_(t) {
    check_t(t);
    if (terms > phi.n_max()) throw InsufficientCoefficients(terms, phi.n_max(), "phi_eval");
    build(phi, terms);
  }

  double operator()(double u) const {
    const double x = std::cos(kTwoPi * u);
    long double b1 = 0, b2 = 0;
    for (std::size_t k = c_.size(); k-- > 0;) {
      const long double b = c_[k] + 2 * x * b1 - b2;
      b2 = b1;
      b1 = b;
    }
    return static_cast<double>(x * b1 - b2);
  }

  double t() const { return t_; }
  std::size_t terms() const { return c_.size(); }
  double tail_bound() const { return tail_; }

 private:
  static void check_t(double t) {
    if (!(t >= 0.1) || !std::isfinite(t)) throw std::domain_error("phi_eval: need t >= 0.1");
  }

  void build(const MaassFormData& phi, std::size_t M) {
    c_.resize(M);
    const double a = phi.amplitude;
    for (std::size_t n = 1; n <= M; ++n) {
      const double x = kTwoPi * n * t_ * t_;
      c_[n - 1] = a == 0 ? 0 : 2 * t_ * a * phi.rho[n - 1] * phi.bessel(x);
    }
    const double B = std::abs(a) * phi.coefficient_envelope();
    const double q = std::exp(-kTwoPi * t_ * t_);
    tail_ = B * std::pow(q, double(M + 1)) / (1 - q);
  }

  double t_;
  double tail_ = 0;
  std::vector<double> c_;  // c_[n-1] multiplies cos(2 pi n u)
};

inline constexpr double kPhiTolerance = 1e-8;

inline PhiValue phi_eval(const MaassFormData& phi, double u, double t, double tol = kPhiTolerance) {
  if (!std::isfinite(u)) throw std::domain_error("phi_eval: non-finite u");
  const PhiSlice s(phi, t, tol);
  return {s(u), s.tail_bound(), s.terms()};
}

inline PhiValue phi_truncated(const MaassFormData& phi, double u, double t, std::size_t terms) {
  const PhiSlice s(phi, t, terms, true);
  return {s(u), s.tail_bound(), s.terms()};
}

/// Largest |phi| on a grid over the standard fundamental domain (u in [0, 1/2] by evenness).
inline double phi_sup_on_domain(const MaassFormData& phi) {
  double sup = 0;
  for (double t = kMinReducedT; t <= 3.0; t += 0.01) {
    const PhiSlice s(phi, t, 1e-30);
    for (int i = 0; i <= 64; ++i) sup = std::max(sup, std::abs(s(i / 128.0)));
  }
  return sup;
}

// ---------------------------------------------------------------------------
// Convolution identity
//
// For h = n_{u0} a_{t0}, with g = n_u a_t k and dg = du dt/t^3 dk,
//   int exp(-tr g^t g) phi(h g^{-1}) dg = int exp(-t^2 - 1/t^2 - u^2/t^2) phi(h n_u a_t) du dt/t^3,
// since g -> g^{-1} preserves dg and tr((g g^t)^{-1}) = tr(g g^t) on SL2.
// h n_u a_t = n_{u0 + t0^2 u} a_{t0 t}.

struct ConvolutionConfig {
  double t_min = 0.15;      // exp(-1/t^2) below 1e-19 under this
  double t_max = 7.0;
  double v_max = 6.5;       // u = t v, exp(-v^2) below 1e-18 beyond
  double rel_tol = 1e-10;   // outer Gauss-Kronrod, relative to the L1 norm
  unsigned max_depth = 10;
  /// Absolute accuracy requested of phi at each node, relative to sup |phi|, before weighting.
  double phi_rel_tol = 1e-16;
};

struct ConvolutionCheck {
  double lhs = 0, rhs = 0, gap = 0;
  double eigenvalue = 0;
  double quadrature_error = 0;
};

inline double convolution_eigenvalue(const MaassFormData& phi) {
  return std::sqrt(std::numbers::pi) * bessel_k(phi.nu(), 2.0).real();
}

inline ConvolutionCheck convolution_eigenvalue_check(const MaassFormData& phi, double u0, double t0,
                                                     const ConvolutionConfig& cfg = {}) {
  if (!(t0 >= 0.5 && t0 <= 2)) throw std::domain_error("convolution_eigenvalue_check: need t in [0.5, 2]");
  if (!std::isfinite(u0)) throw std::domain_error("convolution_eigenvalue_check: non-finite u");
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const double scale = std::max(phi_sup_on_domain(phi), 1e-300);

  auto inner = [&](double t) -> double {
    const double w = std::exp(-t * t - 1 / (t * t)) / (t * t * t);
    if (w == 0 || phi.amplitude == 0) return 0.0;
    // error in phi enters as w sqrt(pi) t err
    const double tol = cfg.phi_rel_tol * scale / (w * t);
    const PhiSlice s(phi, t0 * t, std::max(tol, 1e-300));
    // highest frequency in v is 2 pi M t0^2 t; two periods per 20-point panel
    const double periods = 2 * cfg.v_max * double(s.terms()) * t0 * t0 * t;
    const int panels = std::max(8, static_cast<int>(std::ceil(periods / 2)));
    const double h = 2 * cfg.v_max / panels;
    long double acc = 0;
    for (int p = 0; p < panels; ++p) {
      const double a = -cfg.v_max + p * h;
      acc += gauss<double, 20>::integrate(
          [&](double v) { return std::exp(-v * v) * s(u0 + t0 * t0 * t * v); }, a, a + h);
    }
    return w * t * static_cast<double>(acc);
  };
  double err = 0, l1 = 0;
  const double lhs = gauss_kronrod<double, 61>::integrate(inner, cfg.t_min, cfg.t_max, cfg.max_depth, cfg.rel_tol, &err, &l1);
  if (!std::isfinite(lhs)) throw std::runtime_error("convolution_eigenvalue_check: quadrature produced a non-finite value");
  if (err > 1e-8 * l1) throw std::runtime_error("convolution_eigenvalue_check: quadrature did not converge");

  ConvolutionCheck out;
  out.lhs = lhs;
  out.eigenvalue = convolution_eigenvalue(phi);
  out.rhs = out.eigenvalue * PhiSlice(phi, t0, cfg.phi_rel_tol * scale)(u0);
  out.quadrature_error = err;
  out.gap = std::abs(out.lhs - out.rhs) / std::max(std::abs(out.rhs), 1e-300);
  return out;
}

// ---------------------------------------------------------------------------
// Twisted partial sums

/// Reduced (u, t) of the point g_f with f = g_f d_lambda f_pm. The integral
/// form is reduced exactly first so large representatives lose no precision.
inline HomogeneousCoords twist_point(const IntegerCubicForm& f0) {
  const IntegerCubicForm f = reduce_form(f0).representative;
  const RealCubicForm r{double(f.a), double(f.b), double(f.c), double(f.d)};
  return fundamental_domain_reduce(coords_from_form(r)).coords;
}

struct TwistedSum {
  Complex value{0, 0};
  double tail_estimate = 0;
  std::int64_t N = 0;
  std::size_t classes = 0;
};

/// sum over classes with sign(Disc) = sign, |Disc| <= N, of phi(f)/|Stab f| |Disc f|^{-s}.
/// `records` must contain every class with |Disc| <= records_bound.
inline TwistedSum twisted_partial_sum(Complex s, int sign, const std::vector<ClassRecord>& records, std::int64_t records_bound,
                                      const MaassFormData& phi, std::int64_t N, double phi_sup = -1) {
  if (!(s.real() >= 1.2)) throw std::domain_error("twisted_partial_sum: need Re s >= 1.2");
  if (sign != 1 && sign != -1) throw std::invalid_argument("twisted_partial_sum: sign must be +1 or -1");
  if (N < 1) throw std::invalid_argument("twisted_partial_sum: N must be positive");
  if (N > records_bound)
    throw std::invalid_argument("twisted_partial_sum: representatives cover |Disc| <= " + std::to_string(records_bound) +
                                ", requested N = " + std::to_string(N));
  // phi is tiny relative to 1 in the normalization rho(1) = 1; ask for 1e-16 of its size
  const double sup = phi_sup < 0 ? phi_sup_on_domain(phi) : phi_sup;
  const double tol = std::max(1e-16 * sup, 1e-300);
  long double re = 0, im = 0;
  TwistedSum out;
  out.N = N;
  std::int64_t count = 0;
  for (const auto& r : records) {
    const std::int64_t n = r.disc < 0 ? -r.disc : r.disc;
    if (n > N) continue;
    ++count;
    if ((r.disc > 0 ? 1 : -1) != sign) continue;
    ++out.classes;
    const HomogeneousCoords p = twist_point(r.representative);
    const double v = phi.amplitude == 0 ? 0.0 : phi_eval(phi, p.u, p.t, tol).value;
    const Complex term = v / double(r.stab_order) * std::exp(-s * std::log(double(n)));
    re += term.real();
    im += term.imag();
  }
  out.value = {double(re), double(im)};
  // classes up to x grow linearly: count(x) <= c x with c measured on [1, N]
  const double sigma = s.real();
  const double c = double(count) / double(N);
  out.tail_estimate = sup * c * sigma / (sigma - 1) * std::pow(double(N), 1 - sigma);
  return out;
}

inline constexpr const char* kTwistCsvHeader = "s_re,s_im,N,re,im,tail_est";

inline void write_twist_csv_row(std::ostream& os, Complex s, const TwistedSum& t) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%lld,%.17g,%.17g,%.17g\n", s.real(), s.imag(), static_cast<long long>(t.N),
                t.value.real(), t.value.imag(), t.tail_estimate);
  os << buf;
}

}  // namespace shintani
