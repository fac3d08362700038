#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "zscreen/domain.hpp"

namespace zscreen {

// One member of the deterministic normalizing family. All members are
// strictly increasing on (0, inf).
class Transformation {
 public:
  enum class Kind { identity, mth_root, square, log, lambert_w0, box_cox };

  static Transformation identity() { return Transformation(Kind::identity, 0.0); }
  static Transformation root(int m);  // 2 <= m <= 10
  static Transformation square() { return Transformation(Kind::square, 0.0); }
  static Transformation log() { return Transformation(Kind::log, 0.0); }
  static Transformation lambert_w0() { return Transformation(Kind::lambert_w0, 0.0); }
  static Transformation box_cox(double lambda);  // lambda != 0

  // Inverse of name(): identity, root2..root10, square, log, lambertw0, boxcox(<lambda>).
  static Transformation parse(std::string_view name);

  Kind kind() const noexcept { return kind_; }
  int root_order() const noexcept { return static_cast<int>(param_); }
  double lambda() const noexcept { return param_; }

  std::string name() const;
  bool in_domain(double x) const noexcept;
  // Throws DomainError when x is outside the domain.
  double apply(double x) const;

  friend bool operator==(const Transformation&, const Transformation&) = default;

 private:
  Transformation(Kind k, double p) : kind_(k), param_(p) {}
  Kind kind_;
  double param_;
};

using TransformationFamily = std::vector<Transformation>;

// identity, roots 2..10, square, log, lambert W0 and three Box-Cox members.
TransformationFamily default_family();
// Comma-separated list of names, or "default".
TransformationFamily parse_family(std::string_view text);

inline double apply(const Transformation& t, double x) { return t.apply(x); }

// The first out-of-domain value aborts with its 1-based index in the error.
Sequence apply_sequence(const Transformation& t, const Sequence& seq);
bool applicable(const Transformation& t, const Sequence& seq) noexcept;

// Principal branch: w * exp(w) = x for x >= -1/e.
double lambert_w0(double x);

}  // namespace zscreen
