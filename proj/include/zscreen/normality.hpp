#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "zscreen/domain.hpp"
#include "zscreen/transforms.hpp"

namespace zscreen {

struct ShapiroResult {
  double w = 0.0;
  double p = 0.0;
};

// Royston's AS R94 algorithm, valid for 3 <= n <= 5000. Throws
// DegenerateError for a zero-range sample, std::invalid_argument for n out
// of range.
ShapiroResult shapiro_wilk(std::span<const double> sample);

struct KsResult {
  double d = 0.0;
  double p = 0.0;
};

// Two-sided one-sample KS against U[0, 1] with the asymptotic Kolmogorov
// p-value at sqrt(n) * D.
KsResult ks_uniform(std::span<const double> p_values);

// Survival function of the Kolmogorov distribution.
double kolmogorov_sf(double lambda);

struct TransformationScore {
  Transformation transformation = Transformation::identity();
  std::vector<double> p_values;
  std::size_t tested = 0;
  std::size_t skipped_degenerate = 0;
  double ks_d = 0.0;
  double global_p = 0.0;
};

struct NormalityReport {
  std::vector<TransformationScore> scores;  // applicable transformations, family order
  std::vector<std::string> dropped;         // members inapplicable to the data
  std::size_t eligible_sequences = 0;
  std::size_t selected = 0;  // index into scores

  const Transformation& selected_transformation() const { return scores.at(selected).transformation; }
};

// Scores every applicable family member on the sequences with n >= min_n
// and selects the one with the largest global p-value (first on ties).
NormalityReport select_transformation(const std::vector<Sequence>& sequences,
                                      const TransformationFamily& family, std::size_t min_n = 4);

}  // namespace zscreen
