#include <gtest/gtest.h>

#include "hodgekit/dhstruct.hpp"
#include "hodgekit/elsv.hpp"

using namespace hodgekit;

TEST(Elsv, GenusOneOnePoint) {
  auto poly = interpolate_hurwitz_polynomial(1, 1, elsv_grid(1, 7));
  EXPECT_EQ(poly.coefficient({1}), make_rational(1, 24));
  EXPECT_EQ(poly.coefficient({0}), make_rational(-1, 24));
  auto table = extract_hodge_integrals(poly, 1, 1);
  EXPECT_EQ(table.at({1}, 0), make_rational(1, 24));
  EXPECT_EQ(table.at({0}, 1), make_rational(1, 24));
}

TEST(Elsv, GenusZeroThreePointIsConstant) {
  auto poly = interpolate_hurwitz_polynomial(0, 3, elsv_grid(3, 4));
  ASSERT_EQ(poly.coefficients.size(), 1u);
  EXPECT_EQ(poly.coefficient({0, 0, 0}), 1);
  for (const auto& alpha : elsv_grid(3, 4)) EXPECT_EQ(normalized_single_hurwitz(0, alpha), 1);
}

TEST(Elsv, BandIsMeasured) {
  auto poly = interpolate_hurwitz_polynomial(1, 2, elsv_grid(2, 5));
  EXPECT_EQ(poly.degrees(), (std::vector<int>{1, 2}));
  EXPECT_EQ(elsv_band(1, 2), std::make_pair(1, 2));
}

TEST(Elsv, PsiOnlyEntriesMatchRecursion) {
  IntersectionNumbers numbers;
  for (auto [g, n, m] : std::vector<std::tuple<int, int, int>>{{0, 4, 6}, {1, 2, 5}, {1, 3, 5}, {2, 1, 9}}) {
    auto table = extract_hodge_integrals(interpolate_hurwitz_polynomial(g, n, elsv_grid(n, m)), g, n);
    EXPECT_TRUE(witten_mismatches(table, numbers).empty()) << g << "," << n;
  }
}

TEST(Elsv, LambdaGConstant) {
  for (int n = 1; n <= 3; ++n) {
    auto table = extract_hodge_integrals(interpolate_hurwitz_polynomial(1, n, elsv_grid(n, n == 1 ? 7 : 5)), 1, n);
    auto report = check_lambda_g(table);
    EXPECT_TRUE(report.all_match);
    EXPECT_EQ(report.c_g, make_rational(1, 24)) << n;
  }
  auto two = check_lambda_g(extract_hodge_integrals(interpolate_hurwitz_polynomial(2, 1, elsv_grid(1, 9)), 2, 1));
  EXPECT_EQ(two.c_g, make_rational(7, 5760));
}

TEST(Elsv, LambdaGFlagsCorruptedEntry) {
  auto table = extract_hodge_integrals(interpolate_hurwitz_polynomial(1, 3, elsv_grid(3, 5)), 1, 3);
  auto key = std::make_pair(std::vector<int>{0, 1, 1}, 1);
  table.entries[key] += 1;
  auto report = check_lambda_g(table);
  EXPECT_FALSE(report.all_match);
  EXPECT_EQ(report.c_g, make_rational(1, 24));
  int flagged = 0;
  for (const auto& e : report.entries) {
    if (!e.match) {
      ++flagged;
      EXPECT_EQ(e.b, key.first);
    }
  }
  EXPECT_EQ(flagged, 1);
}

TEST(Elsv, RightHandSideReproducesHurwitzNumbers) {
  auto table = extract_hodge_integrals(interpolate_hurwitz_polynomial(1, 2, elsv_grid(2, 5)), 1, 2);
  for (const auto& alpha : bounded_partitions(2, 6)) EXPECT_EQ(elsv_right_hand_side(table, alpha), single_hurwitz(1, alpha));
}

TEST(Elsv, Errors) {
  EXPECT_THROW(normalized_single_hurwitz(0, Partition({1, 1})), InvalidInput);
  EXPECT_THROW(interpolate_hurwitz_polynomial(1, 2, elsv_grid(2, 2)), DegenerateGrid);
  EXPECT_THROW(interpolate_hurwitz_polynomial(1, 2, elsv_grid(3, 3)), InvalidInput);
  // enough rows, but a single distinct point
  std::vector<Partition> repeated{Partition({2}), Partition({2}), Partition({2})};
  EXPECT_THROW(interpolate_hurwitz_polynomial(1, 1, repeated), DegenerateGrid);
}

TEST(Elsv, FitDetectsNonPolynomialData) {
  std::vector<std::pair<std::vector<int>, Rational>> samples;
  for (int a = 1; a <= 6; ++a) samples.push_back({{a}, make_rational(1, a)});
  EXPECT_EQ(fit_symmetric(1, {0, 1}, samples).status, SymmetricFit::Status::Inconsistent);
}

TEST(Elsv, StableUnderGridEnlargement) {
  EXPECT_EQ(interpolate_hurwitz_polynomial(1, 2, elsv_grid(2, 5)).coefficients,
            interpolate_hurwitz_polynomial(1, 2, elsv_grid(2, 7)).coefficients);
}

TEST(Elsv, ReportJson) {
  auto table = extract_hodge_integrals(interpolate_hurwitz_polynomial(1, 1, elsv_grid(1, 7)), 1, 1);
  auto j = elsv_report_json(table, check_lambda_g(table));
  EXPECT_EQ(j["band"], nlohmann::json({0, 1}));
  EXPECT_EQ(j["lambda_g"]["c_g"], "1/24");
  EXPECT_EQ(j["entries"].size(), 2u);
}

TEST(DoubleHurwitz, GenusZeroThreePoint) {
  auto table = dh_fit(0, 3, dh_grid(3, 5));
  ASSERT_EQ(table.polynomial.coefficients.size(), 1u);
  EXPECT_EQ(table.polynomial.coefficient({0, 0, 0}), 1);
}

TEST(DoubleHurwitz, GenusOneOnePoint) {
  std::vector<Partition> grid{Partition({2}), Partition({3}), Partition({4}), Partition({5})};
  EXPECT_EQ(normalized_double_hurwitz(1, Partition({2})), make_rational(1, 8));
  auto table = dh_fit(1, 1, grid);
  EXPECT_EQ(table.polynomial.coefficient({2}), make_rational(1, 24));
  EXPECT_EQ(table.polynomial.coefficient({0}), make_rational(-1, 24));
  EXPECT_EQ(*table.find({2}, 0), make_rational(1, 24));
  EXPECT_EQ(*table.find({0}, 2), make_rational(1, 24));
}

TEST(DoubleHurwitz, EvenCodegree) {
  for (auto [g, n, m] : std::vector<std::tuple<int, int, int>>{{0, 3, 6}, {0, 4, 8}, {1, 1, 6}, {1, 2, 8}}) {
    auto table = dh_fit(g, n, dh_grid(n, m));
    for (int deg : table.polynomial.degrees()) EXPECT_EQ((dh_top_degree(g, n) - deg) % 2, 0);
    EXPECT_TRUE(dh_structure(table, std::nullopt).parity_ok);
  }
}

TEST(DoubleHurwitz, StringAcrossGenusZero) {
  auto report = dh_structure(dh_fit(0, 3, dh_grid(3, 6)), dh_fit(0, 4, dh_grid(4, 8)));
  EXPECT_EQ(report.string.status, "complete");
  EXPECT_GT(report.string.checked, 0);
  EXPECT_TRUE(report.string.ok());
}

TEST(DoubleHurwitz, DilatonGenusOne) {
  auto lower = dh_fit(1, 1, dh_grid(1, 6));
  auto upper = dh_fit(1, 2, dh_grid(2, 8));
  auto report = dh_structure(lower, upper);
  EXPECT_TRUE(report.dilaton.ok());
  EXPECT_TRUE(report.string.ok());
  EXPECT_EQ(*upper.find({1, 2}, 0), Rational(2 * 1 - 2 + 1) * *lower.find({2}, 0));
}

TEST(DoubleHurwitz, PartialWithoutCompanion) {
  auto report = dh_structure(dh_fit(1, 1, dh_grid(1, 6)), std::nullopt);
  EXPECT_EQ(report.string.status, "partial");
  EXPECT_EQ(report.dilaton.status, "partial");
  auto j = dh_report_json(report);
  EXPECT_EQ(j["conjecture_form"], "GJV-3.5");
  EXPECT_TRUE(j["parity_ok"].get<bool>());
}

TEST(DoubleHurwitz, CorruptedSampleIsViolation) {
  std::vector<std::pair<std::vector<int>, Rational>> samples;
  for (const auto& beta : dh_grid(3, 5)) samples.emplace_back(beta.parts(), normalized_double_hurwitz(0, beta));
  samples.back().second += 1;
  EXPECT_EQ(fit_symmetric(3, {0}, samples).status, SymmetricFit::Status::Inconsistent);
}

TEST(DoubleHurwitz, Errors) {
  EXPECT_THROW(dh_fit(0, 2, dh_grid(2, 6)), InvalidInput);
  EXPECT_THROW(dh_fit(0, 1, dh_grid(1, 6)), InvalidInput);
  EXPECT_THROW(dh_fit(1, 2, dh_grid(2, 4)), DegenerateGrid);
}

TEST(DoubleHurwitz, StableUnderGridEnlargement) {
  EXPECT_EQ(dh_fit(1, 2, dh_grid(2, 7)).polynomial.coefficients, dh_fit(1, 2, dh_grid(2, 9)).polynomial.coefficients);
}
