#pragma once

#include <algorithm>
#include <chrono>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "zscreen/stats.hpp"

namespace zscreen::fixtures {

// Calendar dates at the given day offsets from 2015-01-01.
inline std::vector<TimePoint> dated(const std::vector<int>& offsets) {
  using namespace std::chrono;
  std::vector<TimePoint> out;
  for (int d : offsets) out.emplace_back(Date{sys_days{Date{year{2015}, January, day{1}}} + days{d}});
  return out;
}

// which: 0 = model A, 1 = model B with at least two per season, 2 = model C
// with distinct random dates.
inline DesignMatrix random_design(std::mt19937_64& gen, std::size_t n, int which) {
  if (which == 0) return build_design(Model::A, n);
  if (which == 1) {
    std::vector<TimePoint> times;
    for (std::size_t i = 0; i < n; ++i) {
      const bool summer = i < 2 || (i >= 4 && gen() % 2);
      times.emplace_back(SeasonCode{2010 + static_cast<int>(i), summer ? Season::summer : Season::winter});
    }
    return build_design(Model::B, times);
  }
  std::vector<int> offs(n);
  for (auto& o : offs) o = static_cast<int>(gen() % 2000);
  std::sort(offs.begin(), offs.end());
  for (std::size_t i = 1; i < n; ++i) offs[i] = std::max(offs[i], offs[i - 1] + 1);
  return build_design(Model::C, dated(offs));
}

inline Matrix column(const std::vector<double>& x) {
  Matrix m(x.size(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) m(i, 0) = x[i];
  return m;
}

inline oracle::Mat to_rows(const Matrix& m) {
  oracle::Mat out(m.rows(), oracle::Vec(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

}  // namespace zscreen::fixtures
