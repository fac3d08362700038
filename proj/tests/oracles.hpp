#pragma once

// Slow, direct implementations used to check the library from outside. They
// share no code with it: loops over explicit subsets and Cholesky solves.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

namespace zscreen::oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

inline double mean(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double sum_sq_dev(const Vec& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s;
}

inline Vec without(const Vec& x, std::size_t i) {
  Vec out;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (k != i) out.push_back(x[k]);
  return out;
}

inline double t1(const Vec& x) {
  const std::size_t n = x.size();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec rest = without(x, i);
    const double sd = std::sqrt(sum_sq_dev(rest) / static_cast<double>(n - 2));
    const double v = std::abs(x[i] - mean(rest)) / (sd * std::sqrt(1.0 + 1.0 / static_cast<double>(n - 1)));
    best = std::max(best, v);
  }
  return best;
}

// Every contiguous interval, means and pooled sums of squares recomputed from
// scratch: O(n^3).
inline double t2(const Vec& x) {
  const std::size_t n = x.size();
  double best = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const std::size_t len = b - a + 1;
      if (len == n) continue;
      Vec in, out;
      for (std::size_t k = 0; k < n; ++k) (k >= a && k <= b ? in : out).push_back(x[k]);
      const double s2 = (sum_sq_dev(in) + sum_sq_dev(out)) / static_cast<double>(n - 2);
      const double se = std::sqrt(s2 * (1.0 / static_cast<double>(len) + 1.0 / static_cast<double>(n - len)));
      best = std::max(best, std::abs(mean(in) - mean(out)) / se);
    }
  }
  return best;
}

// Lower-triangular L with A = L L^T; throws when A is not positive definite.
inline Mat cholesky(const Mat& a) {
  const std::size_t p = a.size();
  Mat l(p, Vec(p, 0.0));
  for (std::size_t j = 0; j < p; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (!(d > 0.0)) throw std::runtime_error("not positive definite");
    l[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = s / l[j][j];
    }
  }
  return l;
}

inline Vec cholesky_solve(const Mat& a, const Vec& b) {
  const Mat l = cholesky(a);
  const std::size_t p = b.size();
  Vec y(p), x(p);
  for (std::size_t i = 0; i < p; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * y[k];
    y[i] = s / l[i][i];
  }
  for (std::size_t i = p; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < p; ++k) s -= l[k][i] * x[k];
    x[i] = s / l[i][i];
  }
  return x;
}

inline double quad_form(const Mat& a, const Vec& v) {
  const Vec z = cholesky_solve(a, v);
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += v[k] * z[k];
  return s;
}

// points: n rows of d coordinates.
inline double t3(const Mat& points) {
  const std::size_t n = points.size(), d = points[0].size();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Vec m(d, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      if (k != i)
        for (std::size_t j = 0; j < d; ++j) m[j] += points[k][j] / static_cast<double>(n - 1);
    Mat s(d, Vec(d, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          s[a][b] += (points[k][a] - m[a]) * (points[k][b] - m[b]) / static_cast<double>(n - 1 - d);
    }
    Vec dev(d);
    for (std::size_t j = 0; j < d; ++j) dev[j] = points[i][j] - m[j];
    best = std::max(best, quad_form(s, dev));
  }
  return best * static_cast<double>(n - 1) / static_cast<double>(n * d);
}

// Refits the regression without observation i for every i and studentizes
// the prediction error of the held-out point.
inline double t4_refit(const Vec& x, const Mat& design) {
  const std::size_t n = x.size(), p = design[0].size();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Mat g(p, Vec(p, 0.0));
    Vec xty(p, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      for (std::size_t a = 0; a < p; ++a) {
        xty[a] += design[k][a] * x[k];
        for (std::size_t b = 0; b < p; ++b) g[a][b] += design[k][a] * design[k][b];
      }
    }
    const Vec beta = cholesky_solve(g, xty);
    double sse = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      double fit = 0.0;
      for (std::size_t a = 0; a < p; ++a) fit += design[k][a] * beta[a];
      sse += (x[k] - fit) * (x[k] - fit);
    }
    const double s2 = sse / static_cast<double>(n - 1 - p);
    double pred = 0.0;
    for (std::size_t a = 0; a < p; ++a) pred += design[i][a] * beta[a];
    const double lev = quad_form(g, design[i]);
    best = std::max(best, std::abs(x[i] - pred) / std::sqrt(s2 * (1.0 + lev)));
  }
  return best;
}

inline Vec gaussian(std::mt19937_64& gen, std::size_t n, double mu = 0.0, double sigma = 1.0) {
  std::normal_distribution<double> nd(mu, sigma);
  Vec x(n);
  for (auto& v : x) v = nd(gen);
  return x;
}

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace zscreen::oracle
