#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zscreen/domain.hpp"
#include "zscreen/linalg.hpp"

namespace zscreen {

// T0: last-observation test; T1: leave-one-out max; T2: abnormal
// subsequence; T3: multivariate leave-one-out; T4A/B/C: linear-model max
// studentized residual for the baseline, season and date designs; T4 for an
// arbitrary user-supplied design.
enum class StatKind { T0, T1, T2, T3, T4A, T4B, T4C, T4 };

// Lowercase CLI token: t0, t1, t2, t3, t4a, t4b, t4c, t4.
std::string_view kind_token(StatKind k);
std::optional<StatKind> parse_kind(std::string_view token);

struct StatResult {
  StatKind kind = StatKind::T1;
  // Nonnegative for max statistics (may be +inf). T0 keeps the signed t.
  double value = 0.0;
  // 1-based location; first == last except for T2 intervals.
  std::size_t first = 0;
  std::size_t last = 0;
  // Degrees of freedom for T0; design rows x cols for T4; n x d for T3.
  std::size_t df = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string note;

  bool infinite() const noexcept;
};

double student_cdf(double t, double df);
double student_quantile(double p, double df);

StatResult t0_last(std::span<const double> x);
// Two-sided exact p-value 2 * (1 - F(|t|)).
double t0_p_value(const StatResult& r);

StatResult t1_max_outlier(std::span<const double> x);
StatResult t2_subsequence(std::span<const double> x);
// `points` is n x d, one observation per row.
StatResult t3_multivariate(const Matrix& points);

enum class Model { A, B, C, custom };

std::string_view model_token(Model m);

struct DesignMatrix {
  Matrix m;
  Model model = Model::custom;

  std::size_t rows() const noexcept { return m.rows(); }
  std::size_t cols() const noexcept { return m.cols(); }
};

// A: intercept only; B: [1, s_i] with s_i = 1 in summer; C: [1, t_i] with
// t_i in years (365.25 days) since the first sample.
DesignMatrix build_design(Model model, std::span<const TimePoint> times);
DesignMatrix build_design(Model model, std::size_t n);  // model A only

struct LeastSquaresFit {
  std::vector<double> coefficients;
  std::vector<double> fitted;
  double residual_variance = 0.0;  // SSE / (n - p)
};

LeastSquaresFit least_squares(std::span<const double> x, const Matrix& m);

// Max over i of the externally studentized residual, computed from one fit
// through the leave-one-out identities.
StatResult t4_linear_model(std::span<const double> x, const DesignMatrix& design);

double pearson_r(std::span<const double> x, std::span<const double> y);

}  // namespace zscreen
