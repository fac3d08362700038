#include "zscreen/normality.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "zscreen/error.hpp"

namespace zscreen {

namespace {

// cc[0] + cc[1] x + ... + cc[nord-1] x^(nord-1)
double poly(const double* cc, int nord, double x) {
  double ret = cc[0];
  if (nord > 1) {
    double p = x * cc[nord - 1];
    for (int j = nord - 2; j > 0; --j) p = (p + cc[j]) * x;
    ret += p;
  }
  return ret;
}

int sign(long v) { return (v > 0) - (v < 0); }

}  // namespace

ShapiroResult shapiro_wilk(std::span<const double> sample) {
  const long n = static_cast<long>(sample.size());
  if (n < 3 || n > 5000) throw std::invalid_argument("shapiro_wilk: sample size must be in 3..5000");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  if (x.front() == x.back()) throw DegenerateError("shapiro_wilk: degenerate sample (zero variance)");

  static constexpr double small = 1e-19;
  static constexpr double g[2] = {-2.273, .459};
  static constexpr double c1[6] = {0., .221157, -.147981, -2.07119, 4.434685, -2.706056};
  static constexpr double c2[6] = {0., .042981, -.293762, -1.752461, 5.682633, -3.582633};
  static constexpr double c3[4] = {.544, -.39978, .025054, -6.714e-4};
  static constexpr double c4[4] = {1.3822, -.77857, .062767, -.0020322};
  static constexpr double c5[4] = {-1.5861, -.31082, -.083751, .0038915};
  static constexpr double c6[3] = {-.4803, -.082676, .0030302};

  const boost::math::normal_distribution<double> std_normal;
  const long nn2 = n / 2;
  const double an = static_cast<double>(n);
  // Approximate normalized coefficients, 1-based: a[1] .. a[nn2].
  std::vector<double> a(static_cast<std::size_t>(nn2) + 1, 0.0);

  if (n == 3) {
    a[1] = std::sqrt(0.5);
  } else {
    const double an25 = an + .25;
    double summ2 = 0.0;
    for (long i = 1; i <= nn2; ++i) {
      a[i] = boost::math::quantile(std_normal, (static_cast<double>(i) - .375) / an25);
      summ2 += a[i] * a[i];
    }
    summ2 *= 2.;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1. / std::sqrt(an);
    const double a1 = poly(c1, 6, rsn) - a[1] / ssumm2;
    long i1;
    double fac;
    if (n > 5) {
      i1 = 3;
      const double a2 = -a[2] / ssumm2 + poly(c2, 6, rsn);
      fac = std::sqrt((summ2 - 2. * (a[1] * a[1]) - 2. * (a[2] * a[2])) / (1. - 2. * (a1 * a1) - 2. * (a2 * a2)));
      a[2] = a2;
    } else {
      i1 = 2;
      fac = std::sqrt((summ2 - 2. * (a[1] * a[1])) / (1. - 2. * (a1 * a1)));
    }
    a[1] = a1;
    for (long i = i1; i <= nn2; ++i) a[i] /= -fac;
  }

  const double range = x[n - 1] - x[0];
  if (range < small) throw DegenerateError("shapiro_wilk: degenerate sample (zero range)");

  double sx = x[0] / range;
  double sa = -a[1];
  for (long i = 1, j = n - 1; i < n; --j) {
    const double xi = x[i] / range;
    sx += xi;
    ++i;
    if (i != j) sa += sign(i - j) * a[std::min(i, j)];
  }

  // W as the squared correlation between data and coefficients.
  sa /= an;
  sx /= an;
  double ssa = 0., ssx = 0., sax = 0.;
  for (long i = 0, j = n - 1; i < n; ++i, --j) {
    const double asa = (i != j) ? sign(i - j) * a[1 + std::min(i, j)] - sa : -sa;
    const double xsx = x[i] / range - sx;
    ssa += asa * asa;
    ssx += xsx * xsx;
    sax += asa * xsx;
  }
  // w1 = 1 - W, computed directly to avoid rounding for W near 1.
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  ShapiroResult out;
  out.w = 1. - w1;

  if (n == 3) {
    constexpr double pi6 = 6.0 / std::numbers::pi;
    constexpr double stqr = std::numbers::pi / 3.0;
    out.p = std::max(0.0, pi6 * (std::asin(std::sqrt(out.w)) - stqr));
    return out;
  }
  double y = std::log(w1);
  const double lxx = std::log(an);
  double m, s;
  if (n <= 11) {
    const double gamma = poly(g, 2, an);
    if (y >= gamma) {
      out.p = 1e-99;
      return out;
    }
    y = -std::log(gamma - y);
    m = poly(c3, 4, an);
    s = std::exp(poly(c4, 4, an));
  } else {
    m = poly(c5, 4, lxx);
    s = std::exp(poly(c6, 3, lxx));
  }
  out.p = boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(m, s), y));
  return out;
}

double kolmogorov_sf(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.0) {
    // Theta-function form of the CDF; converges quickly for small lambda.
    const double c = -std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(c * odd * odd);
      cdf += term;
      if (term < 1e-16) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_uniform(std::span<const double> p_values) {
  if (p_values.empty()) throw std::invalid_argument("ks_uniform: empty input");
  std::vector<double> x(p_values.begin(), p_values.end());
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("ks_uniform: inputs must lie in [0, 1]");
  }
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double di = static_cast<double>(i);
    d = std::max({d, (di + 1.0) / n - x[i], x[i] - di / n});
  }
  return {d, kolmogorov_sf(d * std::sqrt(n))};
}

NormalityReport select_transformation(const std::vector<Sequence>& sequences,
                                      const TransformationFamily& family, std::size_t min_n) {
  if (family.empty()) throw std::invalid_argument("select_transformation: empty family");
  std::vector<const Sequence*> eligible;
  for (const auto& s : sequences) {
    if (s.size() >= min_n) eligible.push_back(&s);
  }
  if (eligible.empty())
    throw IneligibleError("no sequence has at least " + std::to_string(min_n) + " observations");

  NormalityReport report;
  report.eligible_sequences = eligible.size();
  for (const auto& t : family) {
    const bool ok = std::all_of(sequences.begin(), sequences.end(),
                                [&](const Sequence& s) { return applicable(t, s); });
    if (!ok) {
      report.dropped.push_back(t.name());
      continue;
    }
    TransformationScore score;
    score.transformation = t;
    std::vector<double> values;
    for (const auto* seq : eligible) {
      values.resize(seq->size());
      std::transform(seq->values.begin(), seq->values.end(), values.begin(), [&](double v) { return t.apply(v); });
      try {
        score.p_values.push_back(shapiro_wilk(values).p);
      } catch (const DegenerateError&) {
        ++score.skipped_degenerate;
      }
    }
    score.tested = score.p_values.size();
    if (score.tested > 0) {
      const auto ks = ks_uniform(score.p_values);
      score.ks_d = ks.d;
      score.global_p = ks.p;
    } else {
      score.ks_d = std::numeric_limits<double>::quiet_NaN();
      score.global_p = 0.0;
    }
    report.scores.push_back(std::move(score));
  }
  if (report.scores.empty())
    throw IneligibleError("no transformation in the family is applicable to every sequence");
  const bool any_tested = std::any_of(report.scores.begin(), report.scores.end(),
                                      [](const TransformationScore& s) { return s.tested > 0; });
  if (!any_tested) throw DegenerateError("all eligible sequences are degenerate");
  for (std::size_t i = 1; i < report.scores.size(); ++i) {
    if (report.scores[i].global_p > report.scores[report.selected].global_p) report.selected = i;
  }
  return report;
}

}  // namespace zscreen
