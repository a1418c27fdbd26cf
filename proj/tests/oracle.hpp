#pragma once

// Independent class-count oracle: every form in a coefficient box, orbits
// merged by the generator moves T, T^-1 and S that stay inside the box.

#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "shintani/enumerate.hpp"
#include "shintani/forms.hpp"

namespace oracle {

using shintani::IntegerCubicForm;

inline std::int64_t disc(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  return b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d;
}

/// Order of {g : g.f = f} among integer matrices with |entries| <= bound and det 1.
inline int brute_stabilizer(const IntegerCubicForm& f, int bound = 10) {
  int n = 0;
  for (int p = -bound; p <= bound; ++p)
    for (int q = -bound; q <= bound; ++q)
      for (int r = -bound; r <= bound; ++r)
        for (int s = -bound; s <= bound; ++s) {
          if (p * s - q * r != 1) continue;
          const std::int64_t P = p, Q = q, R = r, S = s;
          // f((x,y) g) with (x,y) g = (Px + Ry, Qx + Sy)
          auto ev = [&](std::int64_t x, std::int64_t y) {
            const std::int64_t X = P * x + R * y, Y = Q * x + S * y;
            return f.a * X * X * X + f.b * X * X * Y + f.c * X * Y * Y + f.d * Y * Y * Y;
          };
          // a cubic is determined by four values
          if (ev(1, 0) == f.a && ev(0, 1) == f.d && ev(1, 1) == f.a + f.b + f.c + f.d &&
              ev(1, -1) == f.a - f.b + f.c - f.d)
            ++n;
        }
  return n;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t x, std::size_t y) {
    x = find(x), y = find(y);
    if (x != y) parent_[std::max(x, y)] = std::min(x, y);
  }

 private:
  std::vector<std::size_t> parent_;
};

/// Class table for 0 < |Disc| <= X from all forms with coefficients in [-M, M].
/// With link_reduce, each form is also joined to its reduce_form representative.
inline shintani::ClassTable brute_force_class_oracle(std::int64_t X, std::int64_t M, bool link_reduce = false) {
  std::vector<IntegerCubicForm> forms;
  std::unordered_map<std::uint64_t, std::size_t> index;
  const std::int64_t W = 2 * M + 1;
  auto key = [&](const IntegerCubicForm& f) {
    return std::uint64_t((((f.a + M) * W + (f.b + M)) * W + (f.c + M)) * W + (f.d + M));
  };
  auto inside = [&](const IntegerCubicForm& f) {
    return std::abs(f.a) <= M && std::abs(f.b) <= M && std::abs(f.c) <= M && std::abs(f.d) <= M;
  };
  for (std::int64_t a = -M; a <= M; ++a)
    for (std::int64_t b = -M; b <= M; ++b)
      for (std::int64_t c = -M; c <= M; ++c)
        for (std::int64_t d = -M; d <= M; ++d) {
          const std::int64_t D = disc(a, b, c, d);
          if (D == 0 || D > X || D < -X) continue;
          index.emplace(key({a, b, c, d}), forms.size());
          forms.push_back({a, b, c, d});
        }
  UnionFind uf(forms.size());
  std::vector<IntegerCubicForm> extra;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const auto& f = forms[i];
    // T: f(x + y, y); T^-1: f(x - y, y); S: f(-y, x)
    const IntegerCubicForm T{f.a, 3 * f.a + f.b, 3 * f.a + 2 * f.b + f.c, f.a + f.b + f.c + f.d};
    const IntegerCubicForm Ti{f.a, -3 * f.a + f.b, 3 * f.a - 2 * f.b + f.c, -f.a + f.b - f.c + f.d};
    const IntegerCubicForm S{f.d, -f.c, f.b, -f.a};
    for (const auto& g : {T, Ti, S})
      if (inside(g)) uf.unite(i, index.at(key(g)));
    if (link_reduce) {
      const auto r = shintani::reduce_form(f).representative;
      for (const auto& g : {r, IntegerCubicForm(-r)})
        if (inside(g)) uf.unite(i, index.at(key(g)));
    }
  }
  // one component per orbit; -I merges f with -f, which S^2 already does
  shintani::ClassTable table(X);
  std::vector<std::size_t> best(forms.size(), SIZE_MAX);
  auto size = [](const IntegerCubicForm& f) {
    return std::max(std::max(std::abs(f.a), std::abs(f.b)), std::max(std::abs(f.c), std::abs(f.d)));
  };
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const std::size_t r = uf.find(i);
    if (best[r] == SIZE_MAX || size(forms[i]) < size(forms[best[r]])) best[r] = i;
  }
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (uf.find(i) != i) continue;
    const auto& f = forms[best[i]];
    table.add(disc(f.a, f.b, f.c, f.d), brute_stabilizer(f));
  }
  return table;
}

}  // namespace oracle
