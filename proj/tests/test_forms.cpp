#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "shintani/enumerate.hpp"
#include "shintani/forms.hpp"
#include "shintani/reduction.hpp"

using namespace shintani;

TEST(Discriminant, Monomials) {
  EXPECT_EQ(discriminant(IntegerCubicForm{1, 0, 0, 1}), -27);
  EXPECT_EQ(discriminant(IntegerCubicForm{0, 1, 1, 0}), 1);
  EXPECT_EQ(discriminant(IntegerCubicForm{0, 1, 0, 1}), -4);
}

TEST(Discriminant, LargeCoefficientsPromote) {
  const IntegerCubicForm f{1'000'000'007, -3, 5, 2'000'000'011};
  const BigInt a(f.a), b(f.b), c(f.c), d(f.d);
  const BigInt expect = b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d;
  EXPECT_EQ(discriminant(f), expect);
}

TEST(GroupAction, Examples) {
  EXPECT_EQ(group_action(UnimodularMatrix::identity(), IntegerCubicForm{1, 2, 3, 4}), (IntegerCubicForm{1, 2, 3, 4}));
  EXPECT_EQ(group_action(UnimodularMatrix{0, 1, 1, 0}, IntegerCubicForm{1, 2, 3, 4}), (IntegerCubicForm{4, 3, 2, 1}));
  EXPECT_EQ(group_action(UnimodularMatrix::unipotent(1), IntegerCubicForm{0, 1, 1, 0}), (IntegerCubicForm{0, 1, 3, 2}));
  EXPECT_THROW(group_action(UnimodularMatrix{1, 2, 2, 4}, IntegerCubicForm{1, 0, 0, 1}), std::invalid_argument);
}

TEST(GroupAction, RationalDiscriminantScaling) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> e(-9, 9);
  for (int i = 0; i < 500; ++i) {
    const UnimodularMatrix g{e(rng), e(rng), e(rng), e(rng)};
    if (g.det() == 0) continue;
    const IntegerCubicForm f{e(rng), e(rng), e(rng), e(rng)};
    const auto h = group_action_rational(g, f);
    EXPECT_EQ(discriminant(h), BigRational(discriminant(f) * g.det() * g.det()));
  }
}

TEST(Pairing, Examples) {
  EXPECT_EQ(pairing(RealCubicForm{1, 0, 0, 0}, RealCubicForm{0, 0, 0, 1}), 1.0);
  const RealCubicForm f{1.5, -2, 0.25, 7};
  EXPECT_EQ(pairing(f, f), 0.0);
  EXPECT_EQ(pairing(IntegerCubicForm{3, 1, 2, 5}, IntegerCubicForm{3, 1, 2, 5}), BigRational(0));
}

TEST(Iota, Coordinates) {
  const auto g = iota_involution(IwasawaElement{0, 1, 0, 1});
  EXPECT_EQ(g.lambda, 1.0);
  const auto h = iota_involution(IwasawaElement{0.3, 1.7, 0.2, 2});
  EXPECT_EQ(h.lambda, 0.5);
  const auto back = iota_involution(h);
  EXPECT_EQ(back.lambda, 2.0);
  EXPECT_EQ(back.u, 0.3);
  EXPECT_THROW(iota_involution(IwasawaElement{0, -1, 0, 1}), std::invalid_argument);
  EXPECT_THROW(iota_involution(IwasawaElement{0, 1, 0, 0}), std::invalid_argument);
}

TEST(Iota, MatrixFormMatchesCoordinates) {
  const IwasawaElement g{0.31, 1.4, 0.17, 2.5};
  const RealMatrix a = iota_involution(g.matrix()), b = iota_involution(g).matrix();
  EXPECT_NEAR(a.p, b.p, 1e-12);
  EXPECT_NEAR(a.q, b.q, 1e-12);
  EXPECT_NEAR(a.r, b.r, 1e-12);
  EXPECT_NEAR(a.s, b.s, 1e-12);
}

namespace {
UnimodularMatrix random_word(std::mt19937_64& rng, int len) {
  const UnimodularMatrix gens[3] = {UnimodularMatrix::unipotent(1), UnimodularMatrix::unipotent(-1),
                                    UnimodularMatrix::inversion()};
  UnimodularMatrix g = UnimodularMatrix::identity();
  for (int i = 0; i < len; ++i) g = gens[rng() % 3] * g;
  return g;
}
}  // namespace

TEST(Reduce, IdempotentWithIdentityWitness) {
  for (const IntegerCubicForm f : {IntegerCubicForm{0, 1, 1, 0}, IntegerCubicForm{1, 0, -3, 1}, IntegerCubicForm{0, 1, 0, 1},
                                   IntegerCubicForm{2, -1, 3, 5}}) {
    const auto r = reduce_form(f);
    const auto again = reduce_form(r.representative);
    EXPECT_EQ(again.representative, r.representative);
    EXPECT_EQ(group_action(r.witness, f), r.representative);
    if (again.stabilizer_order == 1) EXPECT_EQ(again.witness, UnimodularMatrix::identity());
    else EXPECT_EQ(group_action(again.witness, r.representative), r.representative);
  }
}

TEST(Reduce, OrbitInvariance) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> e(-12, 12);
  int done = 0;
  while (done < 1000) {
    const IntegerCubicForm f{e(rng), e(rng), e(rng), e(rng)};
    if (discriminant(f) == 0) continue;
    const auto g = random_word(rng, 1 + int(rng() % 8));
    const auto gf = group_action(g, f);
    const auto r1 = reduce_form(f), r2 = reduce_form(gf);
    ASSERT_EQ(r1.representative, r2.representative) << f << " vs " << gf;
    EXPECT_EQ(r1.stabilizer_order, r2.stabilizer_order);
    EXPECT_EQ(group_action(r2.witness, gf), r2.representative);
    ++done;
  }
}

TEST(Reduce, UnipotentExample) {
  EXPECT_EQ(reduce_form(IntegerCubicForm{0, 1, 3, 2}).representative, reduce_form(IntegerCubicForm{0, 1, 1, 0}).representative);
  EXPECT_THROW(reduce_form(IntegerCubicForm{1, 2, 1, 0}), std::invalid_argument);
}

TEST(Reduce, PointOnVerticalEdgeInsideCircle) {
  // Hessian point sits on Re z = 1/2 below the unit circle; shifting alone cycles
  const IntegerCubicForm f{5246, -23607, 35411, -17706};
  const auto r = reduce_form(f);
  EXPECT_EQ(r.representative, (IntegerCubicForm{0, 1, -1, 656}));
  EXPECT_EQ(group_action(r.witness, f), r.representative);
}

TEST(Reduce, LargeFormsPromote) {
  const auto g = UnimodularMatrix{1, 0, 20000, 1} * UnimodularMatrix::inversion() * UnimodularMatrix{1, 0, 30, 1};
  const IntegerCubicForm f{1, 0, -3, 1};
  const auto gf = group_action(g, f);
  EXPECT_EQ(reduce_form(gf).representative, reduce_form(f).representative);
}

TEST(Stabilizer, Examples) {
  EXPECT_EQ(stabilizer_order(IntegerCubicForm{0, 1, 0, 1}), 1);
  EXPECT_EQ(stabilizer_order(IntegerCubicForm{1, 0, -3, 1}), 3);
  EXPECT_EQ(oracle::brute_stabilizer({0, 1, 0, 1}), 1);
  EXPECT_EQ(oracle::brute_stabilizer({1, 0, -3, 1}), 3);
  // (x, y) -> (-y, x - y) has order 3 and fixes x^3 - 3xy^2 + y^3
  const UnimodularMatrix rot{0, 1, -1, -1};
  EXPECT_EQ(group_action(rot, IntegerCubicForm{1, 0, -3, 1}), (IntegerCubicForm{1, 0, -3, 1}));
  EXPECT_THROW(stabilizer_order(IntegerCubicForm{0, 0, 1, 0}), std::invalid_argument);
}

TEST(Stabilizer, ConjugationInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> e(-6, 6);
  for (int i = 0; i < 200; ++i) {
    const IntegerCubicForm f{e(rng), e(rng), e(rng), e(rng)};
    if (discriminant(f) == 0) continue;
    const auto gf = group_action(random_word(rng, 6), f);
    EXPECT_EQ(stabilizer_order(gf), stabilizer_order(f));
    EXPECT_EQ(stabilizer_order(f), oracle::brute_stabilizer(reduce_form(f).representative));
  }
}

// Reducible classes such as y(x^2 - xy + 41y^2) at -163 have no member with
// coefficients inside [-40, 40], so the box must grow to about X/4.
TEST(Enumerate, OracleEquivalence) {
  const auto table = enumerate_classes(300);
  const auto brute = oracle::brute_force_class_oracle(300, 80, true);
  for (std::int64_t n = 1; n <= 300; ++n) {
    EXPECT_EQ(table.h_plus(n), brute.h_plus(n)) << n;
    EXPECT_EQ(table.h_minus(n), brute.h_minus(n)) << -n;
    EXPECT_EQ(table.w_plus_num(n), brute.w_plus_num(n)) << n;
    EXPECT_EQ(table.w_minus_num(n), brute.w_minus_num(n)) << -n;
  }
  EXPECT_TRUE(table == brute);
}

TEST(Enumerate, SmallDiscriminants) {
  const auto table = enumerate_classes(30);
  EXPECT_EQ(table.h_plus(1), 1u);  // the orbit of xy(x + y)
  const auto recs = enumerate_records(30);
  int hits = 0;
  const auto target = reduce_form(IntegerCubicForm{0, 1, 1, 0}).representative;
  for (const auto& r : recs)
    if (r.representative == target) {
      ++hits;
      EXPECT_EQ(r.disc, 1);
    }
  EXPECT_EQ(hits, 1);
  for (const auto& r : recs) EXPECT_EQ(reduce_form(r.representative).representative, r.representative);
}

TEST(Enumerate, WorkerCountIndependent) {
  EXPECT_TRUE(enumerate_classes(5000, 1) == enumerate_classes(5000, 4));
  EXPECT_EQ(enumerate_records(2000, 1), enumerate_records(2000, 3));
}

TEST(Enumerate, WeightsBetweenCounts) {
  const auto t = enumerate_classes(3000);
  for (std::int64_t n = 1; n <= 3000; ++n) {
    EXPECT_LE(t.w_plus(n), t.h_plus(n));
    EXPECT_LE(t.h_plus(n), 3 * t.w_plus(n) + 1e-12);
    EXPECT_LE(t.h_minus(n), 3 * t.w_minus(n) + 1e-12);
    EXPECT_EQ(t.stab3_minus(n), 0u);
  }
}

TEST(Enumerate, LinearGrowth) {
  const auto t = enumerate_classes(4000);
  const double ratio = double(t.total_classes(4000)) / double(t.total_classes(2000));
  EXPECT_GE(ratio, 1.7);
  EXPECT_LE(ratio, 2.3);
}

TEST(ClassTableCsv, RoundTrip) {
  const auto t = enumerate_classes(500);
  std::stringstream ss;
  t.write_csv(ss);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "n,h_plus,h_minus,w_plus_num,w_minus_num,denominator=3");
  const auto back = ClassTable::read_csv(ss, 500);
  EXPECT_TRUE(back == t);
  std::stringstream bad("n,h_plus,h_minus,w_plus_num,w_minus_num,denominator=3\n5,1,x,3,0,3\n");
  EXPECT_THROW(ClassTable::read_csv(bad), std::runtime_error);
}

TEST(Dirichlet, Variants) {
  const auto t = enumerate_classes(1000);
  const auto add = dirichlet_coefficients(t, Variant::add), sub = dirichlet_coefficients(t, Variant::sub);
  const auto plus = dirichlet_coefficients(t, Variant::plus), minus = dirichlet_coefficients(t, Variant::minus);
  for (std::int64_t n = 1; n <= 1000; ++n) {
    EXPECT_NEAR((add[n] + sub[n]) / (2 * std::sqrt(3.0)), plus[n], 1e-14 * (1 + plus[n]));
    EXPECT_NEAR((add[n] - sub[n]) / 2, minus[n], 1e-14 * (1 + minus[n]));
  }
  const auto zero = dirichlet_coefficients(ClassTable(50), Variant::add);
  for (double v : zero) EXPECT_EQ(v, 0.0);
  const auto brute = oracle::brute_force_class_oracle(1, 10);
  EXPECT_NEAR(add[1], std::sqrt(3.0) * brute.w_plus(1) + brute.w_minus(1), 1e-15);
  EXPECT_GE(brute.h_plus(1), 1u);
}

TEST(Oracle, SmallBoxMissesReducibleClass) {
  const auto brute = oracle::brute_force_class_oracle(170, 40, true);
  EXPECT_EQ(brute.h_minus(163), 0u);
  EXPECT_EQ(enumerate_classes(170).h_minus(163), 1u);
}

TEST(Oracle, MonotoneInBox) {
  std::uint64_t prev = 0;
  for (int M : {6, 10, 16, 24}) {
    const auto t = oracle::brute_force_class_oracle(40, M);
    std::uint64_t total = 0;
    for (int n = 1; n <= 40; ++n) total += t.h_plus(n) + t.h_minus(n);
    EXPECT_GE(total, prev) << M;
    prev = total;
  }
}
