#include "zscreen/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "zscreen/error.hpp"

namespace zscreen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Deleted sums of squares at or below this fraction of the full one are
// treated as exact zeros produced by roundoff.
constexpr double kZeroRatio = 1e-12;

constexpr std::string_view kConstantNote = "constant sequence";

bool all_equal(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

StatResult make_result(StatKind kind, std::size_t n) {
  StatResult r;
  r.kind = kind;
  r.rows = n;
  r.cols = 1;
  return r;
}

}  // namespace

std::string_view kind_token(StatKind k) {
  switch (k) {
    case StatKind::T0: return "t0";
    case StatKind::T1: return "t1";
    case StatKind::T2: return "t2";
    case StatKind::T3: return "t3";
    case StatKind::T4A: return "t4a";
    case StatKind::T4B: return "t4b";
    case StatKind::T4C: return "t4c";
    case StatKind::T4: return "t4";
  }
  return "t1";
}

std::optional<StatKind> parse_kind(std::string_view token) {
  for (auto k : {StatKind::T0, StatKind::T1, StatKind::T2, StatKind::T3, StatKind::T4A, StatKind::T4B,
                 StatKind::T4C, StatKind::T4}) {
    if (kind_token(k) == token) return k;
  }
  return std::nullopt;
}

std::string_view model_token(Model m) {
  switch (m) {
    case Model::A: return "A";
    case Model::B: return "B";
    case Model::C: return "C";
    case Model::custom: return "custom";
  }
  return "custom";
}

bool StatResult::infinite() const noexcept { return std::isinf(value); }

double student_cdf(double t, double df) {
  if (!(df >= 1.0)) throw std::invalid_argument("student_cdf: df must be >= 1");
  if (std::isnan(t)) return t;
  if (t == kInf) return 1.0;
  if (t == -kInf) return 0.0;
  return boost::math::cdf(boost::math::students_t_distribution<double>(df), t);
}

double student_quantile(double p, double df) {
  if (!(df >= 1.0)) throw std::invalid_argument("student_quantile: df must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("student_quantile: p must be in (0, 1)");
  return boost::math::quantile(boost::math::students_t_distribution<double>(df), p);
}

StatResult t0_last(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 3) throw IneligibleError("T0 needs at least 3 observations");
  const auto prior = x.first(n - 1);
  if (all_equal(prior)) throw DegenerateError("T0: the first n-1 observations have zero variance");
  const double m = mean(prior);
  double ss = 0.0;
  for (double v : prior) ss += (v - m) * (v - m);
  const double var = ss / static_cast<double>(n - 2);
  StatResult r = make_result(StatKind::T0, n);
  r.value = (x[n - 1] - m) / std::sqrt(var * (1.0 + 1.0 / static_cast<double>(n - 1)));
  r.first = r.last = n;
  r.df = n - 2;
  return r;
}

double t0_p_value(const StatResult& r) {
  if (std::isinf(r.value)) return 0.0;
  const double upper = 1.0 - student_cdf(std::abs(r.value), static_cast<double>(r.df));
  return std::min(1.0, 2.0 * upper);
}

StatResult t1_max_outlier(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 3) throw IneligibleError("T1 needs at least 3 observations");
  StatResult r = make_result(StatKind::T1, n);
  r.df = n - 2;
  if (all_equal(x)) {
    r.first = r.last = 1;
    r.note = kConstantNote;
    return r;
  }
  const double dn = static_cast<double>(n);
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  // Deleting x_i: x_i - mean_{-i} = n/(n-1) c_i and SS_{-i} = SS - n/(n-1) c_i^2.
  const double shrink = dn / (dn - 1.0);
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = x[i] - m;
    const double ss_del = ss - shrink * c * c;
    double value;
    if (ss_del <= kZeroRatio * ss) {
      value = kInf;
    } else {
      const double var = ss_del / (dn - 2.0);
      value = std::abs(shrink * c) / std::sqrt(var * shrink);
    }
    if (value > best) {
      best = value;
      r.first = r.last = i + 1;
    }
  }
  r.value = best;
  return r;
}

StatResult t2_subsequence(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) throw IneligibleError("T2 needs at least 4 observations");
  StatResult r = make_result(StatKind::T2, n);
  r.df = n - 2;
  if (all_equal(x)) {
    r.first = r.last = 1;
    r.note = kConstantNote;
    return r;
  }
  const double m = mean(x);
  std::vector<double> s(n + 1, 0.0), q(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = x[i] - m;
    s[i + 1] = s[i] + c;
    q[i + 1] = q[i] + c * c;
  }
  const double s_tot = s[n];
  const double q_tot = q[n];
  const double dn = static_cast<double>(n);
  double best = -1.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const std::size_t len = b - a + 1;
      if (len >= n) continue;
      const double m_in = static_cast<double>(len);
      const double m_out = dn - m_in;
      const double s_in = s[b + 1] - s[a];
      const double q_in = q[b + 1] - q[a];
      const double s_out = s_tot - s_in;
      const double q_out = q_tot - q_in;
      const double within = std::max(0.0, q_in - s_in * s_in / m_in) + std::max(0.0, q_out - s_out * s_out / m_out);
      const double diff = s_in / m_in - s_out / m_out;
      double value;
      if (within <= kZeroRatio * q_tot) {
        value = std::abs(diff) * std::sqrt(dn) > 1e-12 * std::sqrt(q_tot) ? kInf : 0.0;
      } else {
        const double var = within / (dn - 2.0);
        value = std::abs(diff) / std::sqrt(var * (1.0 / m_in + 1.0 / m_out));
      }
      if (value > best) {
        best = value;
        r.first = a + 1;
        r.last = b + 1;
      }
    }
  }
  r.value = best;
  return r;
}

StatResult t3_multivariate(const Matrix& points) {
  const std::size_t n = points.rows();
  const std::size_t d = points.cols();
  if (d < 1) throw std::invalid_argument("T3 needs at least one dimension");
  if (n < d + 2) throw IneligibleError("T3 needs n >= d + 2 observations");
  StatResult r = make_result(StatKind::T3, n);
  r.cols = d;
  r.df = n - 1 - d;

  std::vector<double> total(d, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < d; ++j) total[j] += points(k, j);
  }
  const double dn = static_cast<double>(n);
  double best = -1.0;
  std::vector<double> mu(d), diff(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mu[j] = (total[j] - points(i, j)) / (dn - 1.0);
    Matrix cov(d, d);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      for (std::size_t a = 0; a < d; ++a) {
        const double da = points(k, a) - mu[a];
        for (std::size_t b = a; b < d; ++b) cov(a, b) += da * (points(k, b) - mu[b]);
      }
    }
    const double denom = dn - 1.0 - static_cast<double>(d);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a; b < d; ++b) {
        cov(a, b) /= denom;
        cov(b, a) = cov(a, b);
      }
    }
    for (std::size_t j = 0; j < d; ++j) diff[j] = points(i, j) - mu[j];
    const auto v = solve(cov, diff);
    if (!v) throw SingularError("T3: singular leave-one-out covariance at index " + std::to_string(i + 1), i + 1);
    double quad = 0.0;
    for (std::size_t j = 0; j < d; ++j) quad += diff[j] * (*v)[j];
    if (quad > best) {
      best = quad;
      r.first = r.last = i + 1;
    }
  }
  r.value = (dn - 1.0) / (dn * static_cast<double>(d)) * best;
  return r;
}

DesignMatrix build_design(Model model, std::span<const TimePoint> times) {
  const std::size_t n = times.size();
  DesignMatrix out;
  out.model = model;
  switch (model) {
    case Model::A:
      out.m = Matrix(n, 1, 1.0);
      break;
    case Model::B:
      out.m = Matrix(n, 2, 1.0);
      for (std::size_t i = 0; i < n; ++i) out.m(i, 1) = times[i].season() == Season::summer ? 1.0 : 0.0;
      break;
    case Model::C: {
      out.m = Matrix(n, 2, 1.0);
      for (const auto& t : times) {
        if (!t.has_date()) throw IneligibleError("model C needs calendar dates; season-coded data has none");
      }
      if (n == 0) break;
      const long origin = times[0].ordering_key();
      for (std::size_t i = 0; i < n; ++i)
        out.m(i, 1) = static_cast<double>(times[i].ordering_key() - origin) / 365.25;
      break;
    }
    case Model::custom:
      throw std::invalid_argument("build_design: custom designs are supplied directly");
  }
  return out;
}

DesignMatrix build_design(Model model, std::size_t n) {
  if (model != Model::A) throw std::invalid_argument("build_design(model, n) supports model A only");
  return DesignMatrix{Matrix(n, 1, 1.0), Model::A};
}

namespace {

struct Projection {
  Matrix gram_inverse;
  std::vector<double> coefficients;
  std::vector<double> residuals;
};

Projection project(std::span<const double> x, const Matrix& m) {
  const std::size_t n = m.rows();
  const std::size_t p = m.cols();
  if (x.size() != n) throw std::invalid_argument("design rows do not match sequence length");
  Matrix gram(p, p);
  std::vector<double> rhs(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < p; ++a) {
      rhs[a] += m(i, a) * x[i];
      for (std::size_t b = 0; b < p; ++b) gram(a, b) += m(i, a) * m(i, b);
    }
  }
  auto ginv = inverse(gram);
  if (!ginv) throw IneligibleError("design matrix is not of full column rank");
  Projection out{std::move(*ginv), std::vector<double>(p, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < p; ++b) out.coefficients[a] += out.gram_inverse(a, b) * rhs[b];
  }
  for (std::size_t i = 0; i < n; ++i) {
    double fit = 0.0;
    for (std::size_t a = 0; a < p; ++a) fit += m(i, a) * out.coefficients[a];
    out.residuals[i] = x[i] - fit;
  }
  return out;
}

}  // namespace

LeastSquaresFit least_squares(std::span<const double> x, const Matrix& m) {
  if (m.rows() <= m.cols()) throw IneligibleError("least squares needs more rows than columns");
  const auto proj = project(x, m);
  LeastSquaresFit fit;
  fit.coefficients = proj.coefficients;
  fit.fitted.resize(x.size());
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.fitted[i] = x[i] - proj.residuals[i];
    sse += proj.residuals[i] * proj.residuals[i];
  }
  fit.residual_variance = sse / static_cast<double>(m.rows() - m.cols());
  return fit;
}

StatResult t4_linear_model(std::span<const double> x, const DesignMatrix& design) {
  const std::size_t n = design.rows();
  const std::size_t p = design.cols();
  StatKind kind = StatKind::T4;
  if (design.model == Model::A) kind = StatKind::T4A;
  if (design.model == Model::B) kind = StatKind::T4B;
  if (design.model == Model::C) kind = StatKind::T4C;
  if (x.size() != n) throw std::invalid_argument("T4: design rows do not match sequence length");
  if (p == 0 || n < p + 2) throw IneligibleError("T4 needs n >= p + 2 observations");

  StatResult r = make_result(kind, n);
  r.cols = p;
  r.df = n - p - 1;
  const auto proj = project(x, design.m);
  std::vector<double> leverage(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double h = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) h += design.m(i, a) * proj.gram_inverse(a, b) * design.m(i, b);
    }
    if (1.0 - h <= 1e-10)
      throw IneligibleError("T4: design without observation " + std::to_string(i + 1) + " is rank deficient");
    leverage[i] = h;
  }
  if (all_equal(x)) {
    r.first = r.last = 1;
    r.note = kConstantNote;
    return r;
  }
  double sse = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sse += proj.residuals[i] * proj.residuals[i];
    scale = std::max(scale, std::abs(x[i]));
  }
  const double roundoff = 1e-13 * scale;
  if (sse <= static_cast<double>(n) * roundoff * roundoff) {
    r.first = r.last = 1;
    r.note = "exact fit";
    return r;
  }
  const double resid_df = static_cast<double>(n - p - 1);
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = proj.residuals[i];
    const double one_minus_h = 1.0 - leverage[i];
    const double sse_del = sse - e * e / one_minus_h;
    double value;
    if (sse_del <= kZeroRatio * sse) {
      value = kInf;
    } else {
      const double var = sse_del / resid_df;
      value = std::abs(e) / std::sqrt(var * one_minus_h);
    }
    if (value > best) {
      best = value;
      r.first = r.last = i + 1;
    }
  }
  r.value = best;
  return r;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson_r: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson_r: need at least 2 pairs");
  if (all_equal(x) || all_equal(y)) throw DegenerateError("pearson_r: constant input");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace zscreen
