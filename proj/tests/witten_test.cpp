#include <gtest/gtest.h>

#include <sstream>

#include "hodgekit/witten.hpp"

using namespace hodgekit;

namespace {

// Independent genus-0 closed form: <tau_{d_1}..tau_{d_n}>_0 = (n-3)! / prod d_i!
Rational genus_zero_oracle(const std::vector<int>& d) {
  const int n = static_cast<int>(d.size());
  int sum = 0;
  for (int x : d) sum += x;
  if (sum != n - 3) return 0;
  Rational v(factorial(n - 3));
  for (int x : d) v /= Rational(factorial(x));
  return v;
}

}  // namespace

TEST(Correlator, BaseValues) {
  IntersectionNumbers w;
  EXPECT_EQ(w.correlator(0, {0, 0, 0}), Rational(1));
  EXPECT_EQ(w.correlator(1, {1}), Rational(1, 24));
  EXPECT_EQ(w.correlator(2, {4}), Rational(1, 1152));
  EXPECT_EQ(w.correlator(1, {0}), Rational(0));
}

TEST(Correlator, KnownHigherValues) {
  IntersectionNumbers w;
  EXPECT_EQ(w.correlator(3, {7}), Rational(1, 82944));
  EXPECT_EQ(w.correlator(2, {2, 3}), Rational(29, 5760));
  EXPECT_EQ(w.correlator(1, {1, 1}), Rational(1, 24));
  EXPECT_EQ(w.correlator(0, {0, 0, 0, 1}), Rational(1));
}

TEST(Correlator, RejectsInvalidKeys) {
  IntersectionNumbers w;
  EXPECT_THROW(w.correlator(0, {0}), InvalidInput);
  EXPECT_THROW(w.correlator(0, {0, 0}), InvalidInput);
  EXPECT_THROW(w.correlator(1, {}), InvalidInput);
  EXPECT_THROW(w.correlator(1, {-1, 3}), InvalidInput);
  EXPECT_THROW(w.correlator(-1, {2}), InvalidInput);
}

TEST(Correlator, IndexOrderIsImmaterial) {
  IntersectionNumbers w;
  EXPECT_EQ(w.correlator(2, {3, 2}), w.correlator(2, {2, 3}));
  EXPECT_EQ(w.correlator(1, {2, 0, 1}), w.correlator(1, {0, 1, 2}));
}

TEST(Correlator, DimensionVanishing) {
  IntersectionNumbers w;
  for (int g = 0; g <= 2; ++g) {
    for (int n = 1; n <= 4; ++n) {
      if (2 * g - 2 + n <= 0) continue;
      for (int s = 0; s <= 3 * g - 3 + n + 2; ++s) {
        if (s == 3 * g - 3 + n) continue;
        for (const auto& idx : index_multisets(n, s, s)) EXPECT_EQ(w.correlator(g, idx), 0);
      }
    }
  }
}

TEST(Correlator, GenusZeroClosedForm) {
  IntersectionNumbers w;
  for (int n = 3; n <= 8; ++n) {
    for (const auto& idx : index_multisets(n, n - 3, n - 3)) {
      EXPECT_EQ(w.correlator(0, idx), genus_zero_oracle(idx)) << CorrelatorKey(0, idx).str();
    }
  }
}

TEST(Correlator, StringAndDilaton) {
  IntersectionNumbers w;
  for (int g = 0; g <= 3; ++g) {
    for (int n = 1; 3 * g - 3 + n <= 7; ++n) {
      if (2 * g - 2 + n <= 0) continue;
      for (const auto& idx : index_multisets(n, 3 * g - 3 + n + 1, 3 * g - 3 + n + 1)) {
        // string: <tau_0 S> = sum_j <S with d_j lowered>
        std::vector<int> with0 = idx;
        with0.push_back(0);
        Rational rhs = 0;
        for (std::size_t j = 0; j < idx.size(); ++j) {
          if (idx[j] == 0) continue;
          std::vector<int> s = idx;
          s[j] -= 1;
          rhs += w.correlator(g, s);
        }
        EXPECT_EQ(w.correlator(g, with0), rhs);
      }
      for (const auto& idx : index_multisets(n, 3 * g - 3 + n, 3 * g - 3 + n)) {
        std::vector<int> with1 = idx;
        with1.push_back(1);
        EXPECT_EQ(w.correlator(g, with1), Rational(2 * g - 2 + n) * w.correlator(g, idx));
      }
    }
  }
}

TEST(Correlator, StoreIsIdempotent) {
  CorrelatorStore store;
  CorrelatorKey k(1, {1});
  store.insert(k, Rational(1, 24), "a");
  EXPECT_NO_THROW(store.insert(k, Rational(1, 24), "b"));
  EXPECT_THROW(store.insert(k, Rational(1, 25), "c"), IntegrityError);
  EXPECT_EQ(store.find(k)->provenance, "a");
}

TEST(Correlator, StoreSerializationRoundTrip) {
  IntersectionNumbers w;
  w.correlator(2, {2, 3});
  std::ostringstream out;
  w.store().save(out);
  EXPECT_NE(out.str().find(R"({"d":[1],"g":1,"v":"1/24"})"), std::string::npos);
  CorrelatorStore copy;
  std::istringstream in(out.str());
  copy.load(in);
  EXPECT_EQ(copy.size(), w.store().size());
  for (const auto& [k, e] : w.store().snapshot()) EXPECT_EQ(copy.find(k)->value, e.value);
}

TEST(Correlator, StoreRejectsCorruptLine) {
  CorrelatorStore store;
  std::istringstream in("{\"d\":[1],\"g\":1,\"v\":\"1/24\"}\n{\"d\":[4],\"g\":2,\"v\":\"2/2304\"}\n");
  try {
    store.load(in);
    FAIL() << "expected CacheIntegrity";
  } catch (const CacheIntegrity& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Correlator, PinnedValuePropagates) {
  IntersectionNumbers w;
  w.pin(CorrelatorKey(1, {1}), Rational(1, 25));
  EXPECT_EQ(w.correlator(1, {1}), Rational(1, 25));
  EXPECT_EQ(w.correlator(1, {1, 1}), Rational(1, 25));  // dilaton
}

TEST(FTruncated, Coefficients) {
  TruncatedSeries F = f_truncated(TruncationSpec{3, 4, -2, 2});
  const int K = 3;
  EXPECT_EQ(F.coefficient(-2, exponents_of({0, 0, 0}, K)), Rational(1, 6));
  EXPECT_EQ(F.coefficient(0, exponents_of({1}, K)), Rational(1, 24));
  // <tau_0^2 tau_1>_0 violates the dimension constraint; the first t_1 term in genus 0 is t_0^3 t_1
  EXPECT_EQ(F.coefficient(-2, exponents_of({0, 0, 1}, K)), Rational(0));
  EXPECT_EQ(F.coefficient(-2, exponents_of({0, 0, 0, 1}, K)), Rational(1, 6));
  EXPECT_EQ(F.coefficient(2, exponents_of({3, 3}, K)), Rational(0));
  EXPECT_EQ(F.coefficient(2, exponents_of({2, 3}, K)), Rational(29, 5760));
  EXPECT_EQ(F.coefficient(-1, exponents_of({1}, K)), Rational(0));
}

TEST(FTruncated, WidensWindowToGenusZero) {
  TruncatedSeries F = f_truncated(TruncationSpec{2, 3, 0, 0});
  EXPECT_EQ(F.spec().h_min, -2);
  EXPECT_EQ(F.coefficient(-2, {3, 0, 0}), Rational(1, 6));
  EXPECT_THROW(F.coefficient(2, {0, 0, 0}), ExactnessViolation);
}

TEST(LinearRoute, AgreesWithRecursionSmall) {
  VirasoroLinearSystem system(5, 2);
  auto solved = system.solve();
  IntersectionNumbers w;
  EXPECT_EQ(solved.size(), system.keys().size());
  for (const auto& [key, v] : solved) EXPECT_EQ(v, w.correlator(key)) << key.str();
  EXPECT_GT(system.equations_used(), static_cast<int>(solved.size()));
}
