#include "zscreen/transforms.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "zscreen/error.hpp"

namespace zscreen {

Transformation Transformation::root(int m) {
  if (m < 2 || m > 10) throw std::invalid_argument("root order must be in 2..10");
  return Transformation(Kind::mth_root, m);
}

Transformation Transformation::box_cox(double lambda) {
  if (!std::isfinite(lambda)) throw std::invalid_argument("box-cox lambda must be finite");
  if (lambda == 0.0) return log();
  return Transformation(Kind::box_cox, lambda);
}

Transformation Transformation::parse(std::string_view name) {
  if (name == "identity") return identity();
  if (name == "square") return square();
  if (name == "log") return log();
  if (name == "lambertw0") return lambert_w0();
  if (name.starts_with("root") && name.size() > 4) {
    int m = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 4, name.data() + name.size(), m);
    if (ec == std::errc{} && ptr == name.data() + name.size() && m >= 2 && m <= 10) return root(m);
  }
  if (name.starts_with("boxcox(") && name.ends_with(")")) {
    const auto inner = name.substr(7, name.size() - 8);
    double lambda = 0.0;
    auto [ptr, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), lambda);
    if (ec == std::errc{} && ptr == inner.data() + inner.size()) return box_cox(lambda);
  }
  throw InputError("unknown transformation '" + std::string(name) + "'");
}

std::string Transformation::name() const {
  switch (kind_) {
    case Kind::identity: return "identity";
    case Kind::mth_root: return "root" + std::to_string(root_order());
    case Kind::square: return "square";
    case Kind::log: return "log";
    case Kind::lambert_w0: return "lambertw0";
    case Kind::box_cox: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "boxcox(%.4f)", param_);
      return buf;
    }
  }
  return "identity";
}

bool Transformation::in_domain(double x) const noexcept {
  if (!std::isfinite(x)) return false;
  switch (kind_) {
    case Kind::identity: return true;
    case Kind::square:
    case Kind::lambert_w0: return x >= 0.0;
    case Kind::mth_root:
    case Kind::log:
    case Kind::box_cox: return x > 0.0;
  }
  return false;
}

double Transformation::apply(double x) const {
  if (!in_domain(x)) throw DomainError(name(), x);
  switch (kind_) {
    case Kind::identity: return x;
    case Kind::mth_root: {
      const int m = root_order();
      if (m == 2) return std::sqrt(x);
      if (m == 3) return std::cbrt(x);
      return std::pow(x, 1.0 / m);
    }
    case Kind::square: return x * x;
    case Kind::log: return std::log(x);
    case Kind::lambert_w0: return zscreen::lambert_w0(x);
    case Kind::box_cox: return std::expm1(param_ * std::log(x)) / param_;
  }
  return x;
}

TransformationFamily default_family() {
  TransformationFamily family{Transformation::identity()};
  for (int m = 2; m <= 10; ++m) family.push_back(Transformation::root(m));
  family.push_back(Transformation::square());
  family.push_back(Transformation::log());
  family.push_back(Transformation::lambert_w0());
  for (double lambda : {-0.0606, 0.0202, -0.3030}) family.push_back(Transformation::box_cox(lambda));
  return family;
}

TransformationFamily parse_family(std::string_view text) {
  if (text.empty() || text == "default") return default_family();
  TransformationFamily family;
  while (!text.empty()) {
    const auto sep = text.find(',');
    const auto part = text.substr(0, sep);
    if (!part.empty()) family.push_back(Transformation::parse(part));
    if (sep == std::string_view::npos) break;
    text.remove_prefix(sep + 1);
  }
  if (family.empty()) throw InputError("empty transformation family");
  return family;
}

Sequence apply_sequence(const Transformation& t, const Sequence& seq) {
  Sequence out = seq;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (!t.in_domain(out.values[i])) throw DomainError(t.name(), out.values[i], i + 1);
    out.values[i] = t.apply(out.values[i]);
  }
  return out;
}

bool applicable(const Transformation& t, const Sequence& seq) noexcept {
  for (double v : seq.values) {
    if (!t.in_domain(v)) return false;
  }
  return true;
}

double lambert_w0(double x) {
  constexpr double branch = -1.0 / std::numbers::e;
  if (std::isnan(x) || x < branch) throw DomainError("lambertw0", x);
  if (x == 0.0) return 0.0;
  if (x == branch) return -1.0;
  if (std::isinf(x)) return x;

  double w;
  if (x < -0.25) {
    // Series about the branch point.
    const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x < 3.0) {
    w = std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) break;
  }
  return w;
}

}  // namespace zscreen
