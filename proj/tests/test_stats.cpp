#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "zscreen/error.hpp"
#include "zscreen/stats.hpp"

using namespace zscreen;
using zscreen::fixtures::column;
using zscreen::fixtures::dated;
using zscreen::fixtures::to_rows;
using zscreen::fixtures::random_design;

namespace {

const std::vector<double> kWorked{0.0, 1.0, 5.0, 6.0};

}  // namespace

TEST_CASE("worked values") {
  const std::vector<double> t0_data{0.0, 2.0, 4.0};
  CHECK(std::abs(t0_last(t0_data).value - std::sqrt(3.0)) <= 1e-12);

  const auto r1 = t1_max_outlier(kWorked);
  CHECK(std::abs(r1.value - 4.0 / std::sqrt(28.0 / 3.0)) <= 1e-9);
  CHECK(r1.first == 1);

  const auto r2 = t2_subsequence(kWorked);
  CHECK(std::abs(r2.value - 5.0 / std::sqrt(0.5)) <= 1e-9);
  CHECK(r2.first == 1);
  CHECK(r2.last == 2);

  CHECK(std::abs(t3_multivariate(column(kWorked)).value - 12.0 / 7.0) <= 1e-9);
}

TEST_CASE("T0 exact p-value and Student distribution") {
  CHECK(student_cdf(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(student_cdf(0.0, 7.0) == doctest::Approx(0.5));
  CHECK(student_quantile(student_cdf(2.2, 5.0), 5.0) == doctest::Approx(2.2).epsilon(1e-10));
  const std::vector<double> x{0.0, 2.0, 4.0};
  const auto r = t0_last(x);
  CHECK(r.df == 1);
  CHECK(t0_p_value(r) == doctest::Approx(2.0 * (1.0 - student_cdf(std::sqrt(3.0), 1.0))));
  CHECK_THROWS_AS(t0_last(std::vector<double>{1.0, 2.0}), IneligibleError);
  CHECK_THROWS_AS(t0_last(std::vector<double>{1.0, 1.0, 5.0}), DegenerateError);
}

TEST_CASE("T1 and T2 agree with direct implementations") {
  std::mt19937_64 gen(101);
  std::uniform_int_distribution<std::size_t> len(4, 30);
  for (int k = 0; k < 200; ++k) {
    const auto x = oracle::gaussian(gen, len(gen), 3.0, 2.0);
    REQUIRE(oracle::close_rel(t1_max_outlier(x).value, oracle::t1(x), 1e-10));
    REQUIRE(oracle::close_rel(t2_subsequence(x).value, oracle::t2(x), 1e-10));
  }
}

TEST_CASE("T3 agrees with a direct implementation") {
  std::mt19937_64 gen(202);
  for (int k = 0; k < 100; ++k) {
    const std::size_t d = 1 + k % 3;
    const std::size_t n = d + 2 + gen() % 15;
    Matrix pts(n, d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) pts(i, j) = oracle::gaussian(gen, 1)[0];
    REQUIRE(oracle::close_rel(t3_multivariate(pts).value, oracle::t3(to_rows(pts)), 1e-9));
  }
}

TEST_CASE("T1 ignores order; T2 does not") {
  std::mt19937_64 gen(7);
  for (int k = 0; k < 100; ++k) {
    auto x = oracle::gaussian(gen, 4 + k % 20);
    const double before = t1_max_outlier(x).value;
    std::shuffle(x.begin(), x.end(), gen);
    REQUIRE(oracle::close_rel(t1_max_outlier(x).value, before, 1e-12));
  }
  const std::vector<double> grouped{0, 0.1, 5, 5.1, 0.2, 0.05};
  const std::vector<double> spread{0, 5, 0.1, 5.1, 0.2, 0.05};
  CHECK(t1_max_outlier(grouped).value == doctest::Approx(t1_max_outlier(spread).value));
  CHECK(t2_subsequence(grouped).value > t2_subsequence(spread).value + 1.0);
}

TEST_CASE("identities between statistics") {
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<std::size_t> len(4, 30);
  for (int k = 0; k < 300; ++k) {
    const auto x = oracle::gaussian(gen, len(gen));
    const double v1 = t1_max_outlier(x).value;
    REQUIRE(std::abs(t4_linear_model(x, build_design(Model::A, x.size())).value - v1) <= 1e-10);
    REQUIRE(oracle::close_rel(t3_multivariate(column(x)).value, v1 * v1, 1e-8));
    REQUIRE(t2_subsequence(x).value >= v1 - 1e-12);
  }
}

TEST_CASE("affine invariance") {
  std::mt19937_64 gen(41);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 6 + k % 20;
    auto x = oracle::gaussian(gen, n);
    auto y = x;
    for (auto& v : y) v = 3.7 * v - 11.2;
    REQUIRE(oracle::close_rel(t1_max_outlier(x).value, t1_max_outlier(y).value, 1e-8));
    REQUIRE(oracle::close_rel(t2_subsequence(x).value, t2_subsequence(y).value, 1e-8));
    REQUIRE(oracle::close_rel(t3_multivariate(column(x)).value, t3_multivariate(column(y)).value, 1e-8));
    const auto design = random_design(gen, n, k % 3);
    REQUIRE(oracle::close_rel(t4_linear_model(x, design).value, t4_linear_model(y, design).value, 1e-8));
  }
}

TEST_CASE("T3 is invariant under invertible linear maps plus shifts") {
  std::mt19937_64 gen(43);
  const double a[2][2] = {{2.0, 0.5}, {-1.0, 3.0}};
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 6 + k % 10;
    Matrix p(n, 2), q(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      const auto z = oracle::gaussian(gen, 2);
      p(i, 0) = z[0];
      p(i, 1) = z[1];
      q(i, 0) = a[0][0] * z[0] + a[0][1] * z[1] + 4.0;
      q(i, 1) = a[1][0] * z[0] + a[1][1] * z[1] - 9.0;
    }
    REQUIRE(oracle::close_rel(t3_multivariate(p).value, t3_multivariate(q).value, 1e-8));
  }
}

TEST_CASE("T3 rejects singular leave-one-out covariance and small n") {
  Matrix collinear(6, 2);
  for (std::size_t i = 0; i < 6; ++i) {
    collinear(i, 0) = static_cast<double>(i);
    collinear(i, 1) = 2.0 * static_cast<double>(i);
  }
  CHECK_THROWS_AS(t3_multivariate(collinear), SingularError);
  CHECK_THROWS_AS(t3_multivariate(Matrix(4, 3, 1.0)), IneligibleError);
}

TEST_CASE("T4 leave-one-out identity matches explicit refits") {
  std::mt19937_64 gen(53);
  for (int k = 0; k < 150; ++k) {
    const std::size_t n = 6 + k % 15;
    const auto design = random_design(gen, n, k % 3);
    const auto x = oracle::gaussian(gen, n);
    REQUIRE(oracle::close_rel(t4_linear_model(x, design).value, oracle::t4_refit(x, to_rows(design.m)), 1e-10));
  }
}

TEST_CASE("design matrices") {
  const std::vector<TimePoint> seasons{SeasonCode{2015, Season::summer}, SeasonCode{2015, Season::winter},
                                       SeasonCode{2016, Season::summer}, SeasonCode{2016, Season::winter}};
  const auto b = build_design(Model::B, seasons);
  const double expected_b[4][2] = {{1, 1}, {1, 0}, {1, 1}, {1, 0}};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(b.m(i, 0) == expected_b[i][0]);
    CHECK(b.m(i, 1) == expected_b[i][1]);
  }
  const auto c = build_design(Model::C, dated({10, 375}));
  CHECK(c.m(0, 1) == 0.0);
  CHECK(c.m(1, 1) == doctest::Approx(365.0 / 365.25).epsilon(1e-15));
  CHECK_THROWS_AS(build_design(Model::C, seasons), IneligibleError);
}

TEST_CASE("T4C does not depend on the time unit") {
  std::mt19937_64 gen(59);
  for (int k = 0; k < 50; ++k) {
    const auto design = random_design(gen, 8 + k % 8, 2);
    auto scaled = design;
    scaled.model = Model::custom;
    for (std::size_t i = 0; i < design.rows(); ++i) scaled.m(i, 1) *= 365.25;
    const auto x = oracle::gaussian(gen, design.rows());
    REQUIRE(oracle::close_rel(t4_linear_model(x, design).value, t4_linear_model(x, scaled).value, 1e-9));
  }
}

TEST_CASE("model C bump is located") {
  const std::vector<int> offs{0, 30, 60, 90, 120, 150, 180, 210};
  std::vector<double> x;
  for (int o : offs) x.push_back(1.0 + 0.01 * o);
  x[5] += 10.0;
  const auto r = t4_linear_model(x, build_design(Model::C, dated(offs)));
  CHECK(r.first == 6);
  CHECK(r.value > 10.0);
}

TEST_CASE("T4 eligibility and degenerate fits") {
  const auto a = build_design(Model::A, 4);
  CHECK(t4_linear_model(std::vector<double>{2, 2, 2, 2}, a).value == 0.0);
  const std::vector<TimePoint> one_winter{SeasonCode{2015, Season::summer}, SeasonCode{2016, Season::summer},
                                          SeasonCode{2017, Season::summer}, SeasonCode{2017, Season::winter}};
  CHECK_THROWS_AS(t4_linear_model(std::vector<double>{1, 2, 3, 4}, build_design(Model::B, one_winter)),
                  IneligibleError);
  CHECK_THROWS_AS(t4_linear_model(std::vector<double>{1, 2}, build_design(Model::A, 2)), IneligibleError);
}

TEST_CASE("pearson_r") {
  CHECK(pearson_r(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}) == doctest::Approx(0.5));
  CHECK(pearson_r(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(pearson_r(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DegenerateError);
}
