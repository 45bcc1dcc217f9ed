#pragma once

// Built-in MPS families: SO(2) ladder, XYZ chain, three-body chain.

#include "mpsbell/correlations.hpp"
#include "mpsbell/errors.hpp"
#include "mpsbell/model_family.hpp"
#include "mpsbell/numerics.hpp"

#include <cmath>
#include <string>
#include <variant>

namespace mpsbell {

namespace detail {

inline ComplexMatrix mat2(double a, double b, double c, double d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

} // namespace detail

/// Rung of the SO(2) ladder as a d = 4 chain, D = 2.
///
/// The matrices are stored in two-qubit basis order |00>, |01>, |10>, |11>:
/// g E12, a I, a I, E21. The rung state depends only on x = g / (2 a^2).
inline ModelFamily ladder_family(double a) {
  if (a == 0.0 || !std::isfinite(a)) throw InvalidModel("ladder_family: a must be finite and nonzero");
  ModelFamily f;
  f.name = "ladder";
  f.d = 4;
  f.D = 2;
  f.kind = FamilyKind::ladder;
  f.ladder_a = a;
  f.domain = {-6.0 * a * a, 6.0 * a * a};
  f.matrix_fn = [a](double g) {
    return MPSModel({detail::mat2(0, g, 0, 0), detail::mat2(a, 0, 0, a), detail::mat2(a, 0, 0, a),
                     detail::mat2(0, 0, 1, 0)});
  };
  return f;
}

/// x = g / (2 a^2).
inline double ladder_x(double g, double a) { return g / (2.0 * a * a); }
inline double ladder_g(double x, double a) { return 2.0 * a * a * x; }

inline ModelFamily xyz_family() {
  ModelFamily f;
  f.name = "xyz";
  f.d = 2;
  f.D = 2;
  f.kind = FamilyKind::xyz;
  f.domain = {-2.0, 2.0};
  f.matrix_fn = [](double g) { return MPSModel({detail::mat2(1, g, 1, 1), detail::mat2(1, -g, -1, 1)}); };
  return f;
}

inline ModelFamily three_body_family() {
  ModelFamily f;
  f.name = "three_body";
  f.d = 2;
  f.D = 2;
  f.kind = FamilyKind::three_body;
  f.domain = {-2.0, 2.0};
  f.matrix_fn = [](double g) { return MPSModel({detail::mat2(0, 0, 1, 1), detail::mat2(1, g, 0, 0)}); };
  return f;
}

/// Looks up "ladder", "xyz" or "three_body".
inline ModelFamily builtin_family(const std::string &name, double ladder_a = 1.0) {
  if (name == "ladder") return ladder_family(ladder_a);
  if (name == "xyz") return xyz_family();
  if (name == "three_body") return three_body_family();
  throw UnsupportedFamily("unknown built-in model '" + name + "' (expected ladder, xyz or three_body)");
}

/// Unnormalized element pattern of the two-qubit states of the built-ins.
struct XStatePattern {
  double x11 = 0, x22 = 0, x33 = 0, x44 = 0;
  double x14 = 0, x23 = 0;
  /// Shared value of every o position (12, 13, 21, 24, 31, 34, 42, 43).
  double o = 0;

  [[nodiscard]] ComplexMatrix matrix() const {
    ComplexMatrix m(4, 4);
    m << x11, o, o, x14,
         o, x22, x23, o,
         o, x23, x33, o,
         x14, o, o, x44;
    return m;
  }
};

namespace detail {

inline XStatePattern ladder_pattern(double x) {
  XStatePattern p;
  p.x11 = p.x44 = std::abs(x);
  p.x22 = p.x33 = p.x23 = 1.0;
  return p;
}

inline XStatePattern xyz_pattern(double g, bool positive_branch) {
  XStatePattern p;
  const double big = g * g + 6.0 * g + 1.0;
  const double small = (g - 1.0) * (g - 1.0);
  p.x22 = p.x33 = p.x23 = small;
  if (positive_branch) {
    p.x11 = p.x44 = big;
    p.x14 = small;
  } else {
    p.x14 = big;
    p.x11 = p.x44 = small;
  }
  p.o = 1.0 - g * g;
  return p;
}

inline XStatePattern three_body_pattern(double g, int r, bool positive_branch) {
  XStatePattern p;
  if (r == 1) {
    if (positive_branch) {
      p.x11 = p.x44 = (g + 1.0) / 2.0;
      p.x22 = p.x33 = (g * g + g) / 2.0;
      p.x23 = 2.0 * g * g / (g + 1.0);
      p.x14 = 2.0 * g / (g + 1.0);
      p.o = g;
    } else {
      p.x11 = p.x44 = 1.0;
      p.x22 = p.x33 = -g;
    }
    return p;
  }
  if (positive_branch) {
    const double t = std::pow((1.0 - g) / (1.0 + g), r);
    p.x11 = p.x44 = 1.0 + t;
    p.x22 = p.x33 = 1.0 - t;
    p.x14 = p.x23 = 16.0 * g * g / std::pow(1.0 + g, 4);
    p.o = 4.0 * g / ((1.0 + g) * (1.0 + g));
  } else {
    const double t = std::pow((1.0 + g) / (1.0 - g), r);
    p.x11 = p.x44 = 1.0 + t;
    p.x22 = p.x33 = 1.0 - t;
  }
  return p;
}

inline ComplexMatrix normalized_pattern(const XStatePattern &p) {
  ComplexMatrix m = p.matrix();
  return m / m.trace();
}

/// Picks the branch by the sign of g; at g = 0 both branches must agree.
template <class F>
ComplexMatrix branch_split(double g, const F &pattern) {
  if (g > 0.0) return normalized_pattern(pattern(true));
  if (g < 0.0) return normalized_pattern(pattern(false));
  const ComplexMatrix plus = normalized_pattern(pattern(true));
  const ComplexMatrix minus = normalized_pattern(pattern(false));
  if (max_abs(plus - minus) > 1e-12) throw Error("closed-form branches disagree at g = 0");
  return plus;
}

} // namespace detail

/// Closed-form two-qubit state: the ladder rung (r = 0 only), or sites i, i + r
/// (r >= 1) of the XYZ and three-body chains.
inline TwoQubitState closed_form_rdm(const ModelFamily &family, double g, int r) {
  if (!std::isfinite(g)) throw InvalidModel("closed_form_rdm: g must be finite");
  switch (family.kind) {
  case FamilyKind::ladder:
    if (r != 0) throw UnsupportedFamily("ladder closed form exists only for the rung (r = 0)");
    return TwoQubitState::normalized(detail::ladder_pattern(ladder_x(g, family.ladder_a)).matrix());
  case FamilyKind::xyz:
    if (r < 1) throw UnsupportedFamily("xyz closed form needs r >= 1");
    return TwoQubitState(detail::branch_split(g, [g](bool plus) { return detail::xyz_pattern(g, plus); }));
  case FamilyKind::three_body:
    if (r < 1) throw UnsupportedFamily("three_body closed form needs r >= 1");
    return TwoQubitState(detail::branch_split(g, [g, r](bool plus) { return detail::three_body_pattern(g, r, plus); }));
  case FamilyKind::custom:
    break;
  }
  throw UnsupportedFamily("no closed form for model '" + family.name + "'");
}

struct XyzCoefficients {
  double jx, jy, jz, field;
};

struct ThreeBodyCoefficients {
  double j3, jz, field;
};

using HamiltonianCoefficients = std::variant<XyzCoefficients, ThreeBodyCoefficients>;

/// Parent-Hamiltonian couplings, as metadata. j is the free overall shift of the XYZ chain.
inline HamiltonianCoefficients hamiltonian_coefficients(const ModelFamily &family, double g, double j = 0.0) {
  switch (family.kind) {
  case FamilyKind::xyz:
    return XyzCoefficients{-j + 0.5 * (1.0 + g * g), -j + g, -j - g, 1.0 - g * g};
  case FamilyKind::three_body:
    return ThreeBodyCoefficients{(g - 1.0) * (g - 1.0), 2.0 * (g * g - 1.0), (1.0 + g) * (1.0 + g)};
  default:
    throw UnsupportedFamily("no Hamiltonian coefficients for model '" + family.name + "'");
  }
}

} // namespace mpsbell
