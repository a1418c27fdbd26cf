#pragma once

// Enumeration of SL2(Z)-classes of integral binary cubic forms with
// 0 < |Disc| <= X, class tables and Dirichlet coefficients.
//
// Every class has a reduced representative with positive leading coefficient
// (see reduction.hpp). The loops below walk coefficient boxes containing all
// such forms. The bounds come from writing f = n_u a_t k_theta d_lambda f_pm
// with u + i t^2 in F, so that lambda = |Disc|^{1/4} and t >= 3^{1/4}/sqrt 2:
//
//   Disc > 0:  a = lambda s/(c t^3),  b - 3au = 3 lambda k/(c t),  c = 108^{1/4}
//   Disc < 0:  a = lambda s/(r t^3),  b - 3au =   lambda k/(r t),  r = sqrt 2
//
// Interior forms are counted directly; forms on the boundary of F are counted
// only when they are the canonical element of their class.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "shintani/forms.hpp"
#include "shintani/reduction.hpp"

namespace shintani {

struct ClassRecord {
  IntegerCubicForm representative;
  std::int64_t disc = 0;
  int stab_order = 1;

  friend bool operator==(const ClassRecord&, const ClassRecord&) = default;
};

/// Per-discriminant class counts for 0 < |n| <= X.
class ClassTable {
 public:
  ClassTable() = default;
  explicit ClassTable(std::int64_t X) : X_(std::max<std::int64_t>(X, 0)), hp_(X_ + 1, 0), hm_(X_ + 1, 0) {}

  std::int64_t bound() const { return X_; }

  std::uint32_t h_plus(std::int64_t n) const { return in_range(n) ? hp_[n] : 0; }
  std::uint32_t h_minus(std::int64_t n) const { return in_range(n) ? hm_[n] : 0; }
  /// Number of classes with stabilizer of order 3.
  std::uint32_t stab3_plus(std::int64_t n) const { return lookup(s3p_, n); }
  std::uint32_t stab3_minus(std::int64_t n) const { return lookup(s3m_, n); }

  /// 3 w(n), where w(n) = sum over classes of 1/|Stab|.
  std::int64_t w_plus_num(std::int64_t n) const { return 3 * std::int64_t(h_plus(n)) - 2 * std::int64_t(stab3_plus(n)); }
  std::int64_t w_minus_num(std::int64_t n) const { return 3 * std::int64_t(h_minus(n)) - 2 * std::int64_t(stab3_minus(n)); }
  double w_plus(std::int64_t n) const { return w_plus_num(n) / 3.0; }
  double w_minus(std::int64_t n) const { return w_minus_num(n) / 3.0; }

  /// Thread-safe registration of one class.
  void add(std::int64_t disc, int stab) {
    const std::int64_t n = disc < 0 ? -disc : disc;
    if (disc == 0 || n > X_) throw std::out_of_range("ClassTable::add: discriminant outside table");
    if (stab != 1 && stab != 3) throw std::invalid_argument("ClassTable::add: stabilizer order must be 1 or 3");
    auto& h = disc > 0 ? hp_ : hm_;
    std::atomic_ref<std::uint32_t>(h[n]).fetch_add(1, std::memory_order_relaxed);
    if (stab == 3) {
      std::lock_guard<std::mutex> lock(*mu_);
      ++(disc > 0 ? s3p_ : s3m_)[n];
    }
  }

  /// Sum of h_plus + h_minus over 0 < |n| <= Y.
  std::uint64_t total_classes(std::int64_t Y) const {
    std::uint64_t s = 0;
    for (std::int64_t n = 1; n <= std::min(Y, X_); ++n) s += hp_[n] + hm_[n];
    return s;
  }

  /// Copy restricted to |n| <= Y.
  ClassTable truncated(std::int64_t Y) const {
    ClassTable t(std::min(Y, X_));
    std::copy(hp_.begin(), hp_.begin() + t.X_ + 1, t.hp_.begin());
    std::copy(hm_.begin(), hm_.begin() + t.X_ + 1, t.hm_.begin());
    for (auto [n, k] : s3p_) if (n <= t.X_) t.s3p_[n] = k;
    for (auto [n, k] : s3m_) if (n <= t.X_) t.s3m_[n] = k;
    return t;
  }

  friend bool operator==(const ClassTable& x, const ClassTable& y) {
    return x.X_ == y.X_ && x.hp_ == y.hp_ && x.hm_ == y.hm_ && x.s3p_ == y.s3p_ && x.s3m_ == y.s3m_;
  }

  static constexpr const char* kCsvHeader = "n,h_plus,h_minus,w_plus_num,w_minus_num,denominator=3";

  /// One row per n with a nonzero entry; the last column is the denominator 3.
  void write_csv(std::ostream& os) const {
    os << kCsvHeader << '\n';
    for (std::int64_t n = 1; n <= X_; ++n) {
      if (hp_[n] == 0 && hm_[n] == 0) continue;
      os << n << ',' << hp_[n] << ',' << hm_[n] << ',' << w_plus_num(n) << ',' << w_minus_num(n) << ",3\n";
    }
  }

  /// Inverse of write_csv. The bound is taken from `X`, or from the last row when X < 0.
  static ClassTable read_csv(std::istream& is, std::int64_t X = -1) {
    std::string line;
    if (!std::getline(is, line) || trim(line) != kCsvHeader)
      throw std::runtime_error("class table: missing or unexpected header");
    struct Row { std::int64_t n, hp, hm, wp, wm; };
    std::vector<Row> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      std::stringstream ss(line);
      std::string cell;
      std::vector<std::int64_t> v;
      while (std::getline(ss, cell, ',')) {
        try {
          std::size_t pos = 0;
          v.push_back(std::stoll(cell, &pos));
          if (trim(cell.substr(pos)).size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
          throw std::runtime_error("class table: bad field on line " + std::to_string(lineno));
        }
      }
      if (v.size() != 6 || v[5] != 3 || v[0] < 1)
        throw std::runtime_error("class table: malformed row on line " + std::to_string(lineno));
      rows.push_back({v[0], v[1], v[2], v[3], v[4]});
    }
    if (X < 0) X = rows.empty() ? 0 : rows.back().n;
    ClassTable t(X);
    for (const auto& r : rows) {
      if (r.n > X) throw std::runtime_error("class table: row beyond declared bound");
      const std::int64_t sp = 3 * r.hp - r.wp, sm = 3 * r.hm - r.wm;
      if (sp < 0 || sm < 0 || sp % 2 || sm % 2 || sp / 2 > r.hp || sm / 2 > r.hm)
        throw std::runtime_error("class table: inconsistent weights for n=" + std::to_string(r.n));
      t.hp_[r.n] = std::uint32_t(r.hp);
      t.hm_[r.n] = std::uint32_t(r.hm);
      if (sp) t.s3p_[r.n] = std::uint32_t(sp / 2);
      if (sm) t.s3m_[r.n] = std::uint32_t(sm / 2);
    }
    return t;
  }

  void save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_csv(os);
  }
  static ClassTable load(const std::string& path, std::int64_t X = -1) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_csv(is, X);
  }

 private:
  bool in_range(std::int64_t n) const { return n >= 1 && n <= X_; }
  static std::uint32_t lookup(const std::map<std::int64_t, std::uint32_t>& m, std::int64_t n) {
    auto it = m.find(n);
    return it == m.end() ? 0 : it->second;
  }
  static std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
  }

  std::int64_t X_ = 0;
  std::vector<std::uint32_t> hp_, hm_;
  std::map<std::int64_t, std::uint32_t> s3p_, s3m_;
  std::shared_ptr<std::mutex> mu_ = std::make_shared<std::mutex>();
};

enum class Variant { plus, minus, add, sub };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::plus: return "plus";
    case Variant::minus: return "minus";
    case Variant::add: return "add";
    case Variant::sub: return "sub";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "plus") return Variant::plus;
  if (s == "minus") return Variant::minus;
  if (s == "add") return Variant::add;
  if (s == "sub") return Variant::sub;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

/// a(n) for 1 <= n <= X; element 0 is unused and zero.
inline std::vector<double> dirichlet_coefficients(const ClassTable& t, Variant v) {
  const double r3 = std::sqrt(3.0);
  std::vector<double> out(t.bound() + 1, 0.0);
  for (std::int64_t n = 1; n <= t.bound(); ++n) {
    const double wp = t.w_plus(n), wm = t.w_minus(n);
    switch (v) {
      case Variant::plus: out[n] = wp; break;
      case Variant::minus: out[n] = wm; break;
      case Variant::add: out[n] = r3 * wp + wm; break;
      case Variant::sub: out[n] = r3 * wp - wm; break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace detail {

using i128 = __int128;

inline i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
inline i128 ceil_div(i128 a, i128 b) { return -floor_div(-a, b); }

inline std::int64_t lfloor(long double x) { return static_cast<std::int64_t>(std::floor(x)); }
inline std::int64_t lceil(long double x) { return static_cast<std::int64_t>(std::ceil(x)); }

/// Exact discriminant for coefficients far below 2^29.
inline i128 disc_exact(i128 a, i128 b, i128 c, i128 d) {
  return b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d;
}

using Visitor = std::function<void(unsigned worker, const ClassRecord&)>;

class Enumerator {
 public:
  Enumerator(std::int64_t X, const Visitor& visit) : X_(X), visit_(visit) {
    X4_ = std::pow(static_cast<long double>(X), 0.25L);
    sX_ = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(X)));
    while (i128(sX_ + 1) * (sX_ + 1) <= X) ++sX_;
    while (i128(sX_) * sX_ > X) --sX_;
  }

  enum Region { pos_a, pos_zero, neg_a, neg_zero };
  struct Task { Region region; std::int64_t k; };

  std::vector<Task> tasks() const {
    std::vector<Task> out;
    const std::int64_t amax_pos = lfloor(0.38490018L * X4_ * (1 + kSlack)) + 1;
    for (std::int64_t a = 1; a <= amax_pos; ++a) out.push_back({pos_a, a});
    for (std::int64_t b = 1; b <= lfloor(X4_) + 1; ++b) out.push_back({pos_zero, b});
    const long double A1 = X4_ / std::sqrt(2.0L) * (1 + kSlack);
    const std::int64_t amax_neg = lfloor(A1 / (kT0 * kT0 * kT0)) + 1;
    for (std::int64_t a = 1; a <= amax_neg; ++a) out.push_back({neg_a, a});
    for (std::int64_t b = 1; b <= lfloor(std::pow(X_ / 3.0L, 0.25L)) + 1; ++b) out.push_back({neg_zero, b});
    // largest work first for better load balance
    std::stable_sort(out.begin(), out.end(), [](const Task& x, const Task& y) { return x.k < y.k; });
    return out;
  }

  void run(const Task& task, unsigned worker) {
    switch (task.region) {
      case pos_a: positive_a(task.k, worker); break;
      case pos_zero: positive_zero(task.k, worker); break;
      case neg_a: negative_a(task.k, worker); break;
      case neg_zero: negative_zero(task.k, worker); break;
    }
  }

 private:
  static constexpr long double kSlack = 1e-7L;
  // 3^{1/4}/sqrt 2 slightly lowered
  static constexpr long double kT0 = 0.930604859102099616L * (1 - 1e-7L);

  void emit(unsigned worker, const IntegerCubicForm& f, i128 D, Membership m) {
    const int sign = D > 0 ? 1 : -1;
    if (m == Membership::interior) {
      visit_(worker, {f, static_cast<std::int64_t>(D), 1});
      return;
    }
    const auto r = canonical_near(f, sign);
    if (r.representative == f) visit_(worker, {f, static_cast<std::int64_t>(D), r.stabilizer_order});
  }

  void positive_a(std::int64_t a, unsigned worker) {
    const std::int64_t bmax = lfloor(1.5L * a + X4_ * (1 + kSlack)) + 1;
    const i128 a27 = i128(27) * a * a;
    for (std::int64_t b = -bmax; b <= bmax; ++b) {
      const i128 b2 = i128(b) * b;
      const i128 cmin = ceil_div(b2 - sX_, 3 * a), cmax = floor_div(b2 - 1, 3 * a);
      for (i128 c = cmin; c <= cmax; ++c) {
        const i128 P = b2 - 3 * a * c;
        const i128 bc = b * c;
        std::int64_t dlo = static_cast<std::int64_t>(ceil_div(bc - P, 9 * a));
        std::int64_t dhi = static_cast<std::int64_t>(floor_div(bc + P, 9 * a));
        const i128 G0 = 2 * b2 * b - 9 * a * bc;
        const long double P3 = 4.0L * static_cast<long double>(P * P * P);
        const long double gmax = std::sqrt(P3);
        const long double rest = P3 - static_cast<long double>(a27) * X_;
        const long double gmin = rest > 0 ? std::sqrt(rest) : 0.0L;
        const long double g0 = static_cast<long double>(G0), den = static_cast<long double>(a27);
        // G = G0 + 27 a^2 d with gmin <= |G| < gmax
        const std::int64_t hi1 = lfloor((gmax - g0) / den) + 1, lo1 = lceil((-gmax - g0) / den) - 1;
        dlo = std::max(dlo, lo1);
        dhi = std::min(dhi, hi1);
        if (dlo > dhi) continue;
        auto scan = [&](std::int64_t lo, std::int64_t hi) {
          for (std::int64_t d = lo; d <= hi; ++d) {
            const i128 G = G0 + a27 * d;
            const i128 num = 4 * P * P * P - G * G;
            if (num <= 0) continue;
            const i128 D = num / a27;
            if (D > X_) continue;
            const i128 R = i128(c) * c - 3 * i128(b) * d;
            if (R < P) continue;
            const QuadraticForm h{P, bc - 9 * i128(a) * d, R};
            const Membership m = classify_hessian(h);
            if (m == Membership::outside) continue;
            emit(worker, {a, b, static_cast<std::int64_t>(c), d}, D, m);
          }
        };
        if (gmin > 0) {
          const std::int64_t up = lceil((gmin - g0) / den) - 1;     // d >= up
          const std::int64_t down = lfloor((-gmin - g0) / den) + 1;  // d <= down
          if (down >= up) {
            scan(dlo, dhi);
          } else {
            scan(dlo, std::min(dhi, down));
            scan(std::max(dlo, up), dhi);
          }
        } else {
          scan(dlo, dhi);
        }
      }
    }
  }

  void positive_zero(std::int64_t b, unsigned worker) {
    const i128 bb = b;
    if (bb * bb > sX_) return;
    const i128 Xb = X_ / (bb * bb);
    for (i128 c = -bb; c <= bb; ++c) {
      const i128 c2 = c * c;
      const i128 dlo = ceil_div(c2 - Xb, 4 * bb);
      const i128 dhi = std::min(floor_div(c2 - bb * bb, 3 * bb), floor_div(c2 - 1, 4 * bb));
      for (i128 d = dlo; d <= dhi; ++d) {
        const i128 D = bb * bb * (c2 - 4 * bb * d);
        if (D <= 0 || D > X_) continue;
        const QuadraticForm h{bb * bb, bb * c, c2 - 3 * bb * d};
        const Membership m = classify_hessian(h);
        if (m == Membership::outside) continue;
        emit(worker, {0, b, static_cast<std::int64_t>(c), static_cast<std::int64_t>(d)}, D, m);
      }
    }
  }

  void negative_a(std::int64_t a, unsigned worker) {
    const long double A1 = X4_ / std::sqrt(2.0L) * (1 + kSlack);
    const long double tmax = std::cbrt(A1 / a) * (1 + kSlack);
    if (tmax < kT0) return;
    const std::int64_t bmax = lfloor(1.5L * a + A1 / kT0) + 1;
    const i128 a27 = i128(27) * a * a;
    const long double sqX = std::sqrt(static_cast<long double>(X_));
    const long double U = 0.5L + 1e-7L;
    for (std::int64_t b = -bmax; b <= bmax; ++b) {
      const long double ab = std::abs(static_cast<long double>(b));
      long double T = tmax;
      const long double excess = ab - 1.5L * a;
      if (excess > 0) T = std::min(T, A1 / excess * (1 + kSlack));
      if (T < kT0) continue;
      const i128 b2 = i128(b) * b;
      // c = a t^4 + 2bu - 3au^2 and P = b^2 - 3ac lies in [-1.5, 0.5] lambda^2 / t^2
      std::int64_t cmin = lfloor(-ab - 0.75L * a) - 1;
      std::int64_t cmax = lceil(a * T * T * T * T + ab) + 1;
      const long double lam2 = sqX * (1 + kSlack) / (kT0 * kT0);
      cmin = std::max(cmin, lfloor((b2 - 0.5L * lam2) / (3.0L * a)) - 1);
      cmax = std::min(cmax, lceil((b2 + 1.5L * lam2) / (3.0L * a)) + 1);
      for (std::int64_t c = cmin; c <= cmax; ++c) {
        const i128 P = b2 - 3 * i128(a) * c;
        const long double P3 = 4.0L * static_cast<long double>(P * P * P);
        const long double top = P3 + static_cast<long double>(a27) * X_;
        if (top < 0) continue;
        const long double gmax = std::sqrt(top);
        const i128 G0 = 2 * b2 * b - 9 * i128(a) * b * c;
        const long double g0 = static_cast<long double>(G0), den = static_cast<long double>(a27);
        std::int64_t dlo = lceil((-gmax - g0) / den) - 1, dhi = lfloor((gmax - g0) / den) + 1;
        // range of d(u) = [bc - 2(ac + b^2)u + 8abu^2 - 8a^2u^3]/a over |u| <= U
        const long double la = a, lb = b, lc = c;
        auto du = [&](long double u) {
          return (lb * lc - 2 * (la * lc + lb * lb) * u + 8 * la * lb * u * u - 8 * la * la * u * u * u) / la;
        };
        long double lo = std::min(du(-U), du(U)), hi = std::max(du(-U), du(U));
        const long double qa = 12 * la * la, qb = -8 * la * lb, qc = la * lc + lb * lb;
        const long double qd = qb * qb - 4 * qa * qc;
        if (qd >= 0) {
          for (int sgn : {-1, 1}) {
            const long double u = (-qb + sgn * std::sqrt(qd)) / (2 * qa);
            if (std::abs(u) <= U) {
              lo = std::min(lo, du(u));
              hi = std::max(hi, du(u));
            }
          }
        }
        dlo = std::max(dlo, lfloor(lo) - 1);
        dhi = std::min(dhi, lceil(hi) + 1);
        for (std::int64_t d = dlo; d <= dhi; ++d) {
          const i128 D = disc_exact(a, b, c, d);
          if (D >= 0 || D < -X_) continue;
          const IntegerCubicForm f{a, b, c, d};
          const Membership m = classify_point(cusp_point(f, -1));
          if (m == Membership::outside) continue;
          emit(worker, f, D, m);
        }
      }
    }
  }

  void negative_zero(std::int64_t b, unsigned worker) {
    const i128 bb = b;
    if (3 * bb * bb * bb * bb > X_) return;
    const i128 Xb = X_ / (bb * bb);
    for (i128 c = -bb; c <= bb; ++c) {
      const i128 dhi = floor_div(Xb + c * c, 4 * bb);
      for (i128 d = bb; d <= dhi; ++d) {
        const i128 D = bb * bb * (c * c - 4 * bb * d);
        if (D >= 0 || D < -X_) continue;
        const IntegerCubicForm f{0, b, static_cast<std::int64_t>(c), static_cast<std::int64_t>(d)};
        const Membership m = classify_point(cusp_point(f, -1));
        if (m == Membership::outside) continue;
        emit(worker, f, D, m);
      }
    }
  }

  std::int64_t X_;
  const Visitor& visit_;
  long double X4_ = 0;
  std::int64_t sX_ = 0;
};

}  // namespace detail

inline unsigned default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Calls visit(worker, record) once per class with 0 < |Disc| <= X, from
/// `threads` workers concurrently. Visiting order is unspecified.
inline void for_each_class(std::int64_t X, const detail::Visitor& visit, unsigned threads = 1) {
  if (X < 1) return;
  if (X > (std::int64_t(1) << 50)) throw std::invalid_argument("for_each_class: bound too large");
  detail::Enumerator en(X, visit);
  const auto tasks = en.tasks();
  threads = std::max(1u, threads);
  std::atomic<std::size_t> next{0};
  auto work = [&](unsigned w) {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) en.run(tasks[tasks.size() - 1 - i], w);
  };
  if (threads == 1) {
    work(0);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        work(w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        next = tasks.size();
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

inline ClassTable enumerate_classes(std::int64_t X, unsigned threads = 1) {
  ClassTable table(X);
  for_each_class(X, [&](unsigned, const ClassRecord& r) { table.add(r.disc, r.stab_order); }, threads);
  return table;
}

/// All class records, sorted by (|disc|, sign, representative).
inline std::vector<ClassRecord> enumerate_records(std::int64_t X, unsigned threads = 1) {
  threads = std::max(1u, threads);
  std::vector<std::vector<ClassRecord>> parts(threads);
  for_each_class(X, [&](unsigned w, const ClassRecord& r) { parts[w].push_back(r); }, threads);
  std::vector<ClassRecord> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  std::sort(out.begin(), out.end(), [](const ClassRecord& x, const ClassRecord& y) {
    const auto ax = x.disc < 0 ? -x.disc : x.disc, ay = y.disc < 0 ? -y.disc : y.disc;
    if (ax != ay) return ax < ay;
    if (x.disc != y.disc) return x.disc > y.disc;
    return x.representative < y.representative;
  });
  return out;
}

}  // namespace shintani
