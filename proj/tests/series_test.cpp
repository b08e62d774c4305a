#include <gtest/gtest.h>

#include <random>

#include "hodgekit/checks.hpp"
#include "hodgekit/series.hpp"
#include "hodgekit/witten.hpp"

using namespace hodgekit;

namespace {

TruncatedSeries poly(int K, int D) { return TruncatedSeries::polynomial(VariableFamily::T, K, D); }

TruncatedSeries window(int K, int D, int lo, int hi) {
  return TruncatedSeries(VariableFamily::T, TruncationSpec{K, D, lo, hi});
}

/// Every certified coefficient of a residual vanishes, and at least `min_slots` were certified.
void expect_vanishes(const TruncatedSeries& r, int h_lo, long min_slots = 1) {
  EXPECT_TRUE(r.is_zero()) << to_json(r).dump();
  EXPECT_GE(r.certified_slots(h_lo), min_slots);
}

}  // namespace

TEST(Series, ArithmeticExamples) {
  auto t0 = poly(1, 4);
  t0.set(0, {1, 0}, 1);
  auto t0sq = t0 * t0;
  auto d = t0sq.differentiated(0);
  EXPECT_EQ(d.coefficient(0, {1, 0}), Rational(2));
  EXPECT_EQ(d.terms().size(), 1u);

  auto sum = poly(1, 4);
  sum.set(0, {1, 0}, 1);
  sum.set(0, {0, 1}, 1);
  auto prod = sum * t0;
  EXPECT_EQ(prod.terms().size(), 2u);
  EXPECT_EQ(prod.coefficient(0, {2, 0}), Rational(1));
  EXPECT_EQ(prod.coefficient(0, {1, 1}), Rational(1));

  auto cube = poly(2, 4);
  cube.set(0, {3, 0, 0}, 1);
  EXPECT_TRUE(cube.differentiated(2).is_zero());
}

TEST(Series, MixedFamiliesRejected) {
  TruncatedSeries a(VariableFamily::T, TruncationSpec{2, 3, 0, 0});
  TruncatedSeries b(VariableFamily::P, TruncationSpec{2, 3, 0, 0});
  EXPECT_THROW(a + b, InvalidInput);
  EXPECT_THROW(a * b, InvalidInput);
  EXPECT_THROW(a.differentiated(5), InvalidInput);
  EXPECT_THROW(TruncatedSeries(VariableFamily::T, TruncationSpec{2, -1, 0, 0}), InvalidInput);
  EXPECT_THROW(TruncatedSeries(VariableFamily::T, TruncationSpec{2, 3, 1, 0}), InvalidInput);
}

TEST(Series, ExpExamples) {
  auto zero = window(1, 6, -4, 2);
  auto one = exp_truncated(zero);
  EXPECT_EQ(one.terms().size(), 1u);
  EXPECT_EQ(one.coefficient(0, {0, 0}), Rational(1));

  auto F = window(1, 6, -2, 0);
  F.set(-2, {3, 0}, Rational(1, 6));
  auto tau = exp_truncated(F);
  EXPECT_EQ(tau.coefficient(-4, {6, 0}), Rational(1, 72));

  F.set(0, {0, 1}, Rational(1, 24));
  tau = exp_truncated(F);
  EXPECT_EQ(tau.coefficient(-2, {3, 1}), Rational(1, 144));
}

TEST(Series, ExpRejectsConstantsAndNarrowWindows) {
  auto F = window(1, 4, -2, 0);
  F.set(0, {0, 0}, 1);
  EXPECT_THROW(exp_truncated(F), InvalidInput);

  auto G = window(1, 6, -2, 0);
  G.set(-2, {3, 0}, Rational(1, 6));
  // t_0^6 carries hbar^{-4}: an output window starting at -2 cannot hold it
  EXPECT_THROW(exp_truncated(G, false, TruncationSpec{1, 6, -2, 0}), ExactnessViolation);
  EXPECT_NO_THROW(exp_truncated(G, false, TruncationSpec{1, 6, -4, 0}));
}

TEST(Series, ExpWithPermittedConstant) {
  // e^{hbar^2} = 1 + hbar^2 + hbar^4/2 on the window h <= 4
  auto F = window(0, 2, 0, 4);
  F.set(2, {0}, 1);
  auto tau = exp_truncated(F, true);
  EXPECT_EQ(tau.coefficient(0, {0}), Rational(1));
  EXPECT_EQ(tau.coefficient(2, {0}), Rational(1));
  EXPECT_EQ(tau.coefficient(4, {0}), Rational(1, 2));
  EXPECT_THROW(tau.coefficient(6, {0}), ExactnessViolation);
}

TEST(Series, ExpIsInverseOfLogOnOnePlusX) {
  // e^{log(1+p_1)} = 1 + p_1
  auto tau = exp_truncated(log_one_plus_p1(5, 8));
  EXPECT_EQ(tau.terms().size(), 2u);
  EXPECT_EQ(tau.coefficient(0, {1, 0, 0, 0, 0}), Rational(1));
}

TEST(Series, ProductIsAssociativeAndDerivativesCommute) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coef(-5, 5), hdist(-2, 2), edist(0, 2);
  auto random_series = [&] {
    auto s = window(3, 5, -2, 2);
    for (int i = 0; i < 25; ++i) {
      std::vector<int> e{edist(rng), edist(rng), edist(rng), edist(rng)};
      if (e[0] + e[1] + e[2] + e[3] > 5) continue;
      s.set(hdist(rng), e, make_rational(coef(rng), 1 + edist(rng)));
    }
    return s;
  };
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_series(), b = random_series(), c = random_series();
    auto left = (a * b) * c;
    auto right = a * (b * c);
    EXPECT_EQ(left.profile().cap, right.profile().cap);
    EXPECT_EQ(left.terms(), right.terms());
    for (int i = 0; i <= 3; ++i) {
      for (int j = 0; j <= 3; ++j) {
        EXPECT_EQ(a.differentiated({i, j}).terms(), a.differentiated({j, i}).terms());
      }
    }
  }
}

TEST(Series, ProductNeverReportsUncertifiedCoefficients) {
  // a is exact only for h <= 0, b has a term at h = -2: the product is exact only up to h = -2
  auto a = window(0, 3, -2, 0);
  a.set(0, {1}, 1);
  auto b = window(0, 3, -2, 0);
  b.set(-2, {1}, 1);
  auto p = a * b;
  EXPECT_EQ(p.coefficient(-2, {2}), Rational(1));
  EXPECT_THROW(p.coefficient(0, {2}), ExactnessViolation);
}

TEST(Series, JsonRoundTrip) {
  auto s = window(2, 3, -2, 2);
  s.set(-2, {3, 0, 0}, Rational(1, 6));
  s.set(0, {0, 1, 0}, Rational(1, 24));
  auto j = to_json(s);
  EXPECT_EQ(j.dump(),
            R"({"family":"t","spec":{"D":3,"Hmax":2,"Hmin":-2,"K":2},"terms":[{"e":[3,0,0],"h":-2,"v":"1/6"},{"e":[0,1,0],"h":0,"v":"1/24"}]})");
  auto back = series_from_json(j);
  EXPECT_EQ(back.terms(), s.terms());
  EXPECT_THROW(series_from_json(nlohmann::json::parse(R"({"family":"x"})")), InvalidInput);
}

TEST(Kdv, ZeroSeries) {
  auto r = kdv_residual(window(6, 6, 0, 0), 1);
  EXPECT_TRUE(r.is_zero());
}

TEST(Kdv, NeedsFifthDerivatives) {
  EXPECT_THROW(kdv_residual(window(3, 4, 0, 0), 1), ExactnessViolation);
  EXPECT_THROW(kdv_residual(window(3, 6, 0, 0), 0), InvalidInput);
}

TEST(Kdv, WittenTruncationSatisfiesKdv) {
  auto F = f_truncated(TruncationSpec{6, 6, -2, 2});
  for (int n = 1; n <= 3; ++n) expect_vanishes(kdv_residual(F, n), -2, 40);  // degrees 0..1, h in [-2, 2], 7 variables
}

TEST(Kdv, PerturbedCorrelatorBreaksKdv) {
  IntersectionNumbers w;
  w.pin(CorrelatorKey(1, {1}), Rational(1, 25));
  auto F = f_truncated(TruncationSpec{6, 6, -2, 2}, w);
  auto r = kdv_residual(F, 3);
  EXPECT_FALSE(r.is_zero());
  // 7 <tau_3 tau_0^2>_1 = <tau_2 tau_0>_1 + 1/4 <tau_2 tau_0^4>_0 ties the constant term to <tau_1>_1
  EXPECT_NE(r.coefficient(0, std::vector<int>(7, 0)), 0);
}

TEST(Kp, ZeroAndLogAndSquare) {
  for (const auto& r : kp_residuals(TruncatedSeries(VariableFamily::P, TruncationSpec{5, 8, 0, 0}))) {
    EXPECT_TRUE(r.is_zero());
  }
  for (const auto& r : kp_residuals(log_one_plus_p1(5, 8))) expect_vanishes(r, 0);

  TruncatedSeries sq(VariableFamily::P, TruncationSpec{5, 8, 0, 0});
  sq.set(0, {2, 0, 0, 0, 0}, 1);
  auto res = kp_residuals(sq);
  EXPECT_EQ(res[0].coefficient(0, {0, 0, 0, 0, 0}), Rational(2));  // 0 - (-1/2 * 2^2)
  EXPECT_THROW(kp_residuals(TruncatedSeries(VariableFamily::P, TruncationSpec{4, 8, 0, 0})), InvalidInput);
}

TEST(Virasoro, ActionOnOne) {
  auto one = poly(4, 6);
  one.set(0, {0, 0, 0, 0, 0}, 1);
  auto a = virasoro_apply(-1, one);
  EXPECT_EQ(a.terms().size(), 1u);
  EXPECT_EQ(a.coefficient(-2, {2, 0, 0, 0, 0}), Rational(1, 2));
  auto b = virasoro_apply(0, one);
  EXPECT_EQ(b.terms().size(), 1u);
  EXPECT_EQ(b.coefficient(0, {0, 0, 0, 0, 0}), Rational(1, 16));
}

TEST(Virasoro, AnnihilatesWittenTau) {
  auto F = f_truncated(TruncationSpec{5, 6, -2, 2});
  auto tau = exp_truncated(F);
  for (int n = -1; n <= 2; ++n) expect_vanishes(virasoro_apply(n, tau), -4, 20);
}

TEST(Virasoro, WrongQuadraticRangeFailsOnTau) {
  IntersectionNumbers w(QuadraticRange::FromOne);
  auto tau = exp_truncated(f_truncated(TruncationSpec{5, 6, -2, 2}, w));
  bool any_nonzero = false;
  for (int n = 1; n <= 2; ++n) any_nonzero |= !virasoro_apply(n, tau, QuadraticRange::FromOne).is_zero();
  EXPECT_TRUE(any_nonzero);
}

TEST(Virasoro, CommutatorIdentity) {
  for (int m = -1; m <= 3; ++m) {
    for (int n = -1; n <= 3; ++n) {
      if (m != n) {
        EXPECT_TRUE(commutator_holds(m, n, QuadraticRange::FromZero)) << m << "," << n;
      }
    }
  }
}

TEST(Virasoro, CommutatorSelectsQuadraticRange) {
  EXPECT_FALSE(commutator_holds(1, -1, QuadraticRange::FromOne));
}
