#pragma once

#include "mpsbell/errors.hpp"
#include "mpsbell/numerics.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace mpsbell {

/// Defining matrices A_i of a translation-invariant MPS at one parameter value.
class MPSModel {
public:
  explicit MPSModel(std::vector<ComplexMatrix> matrices) : matrices_(std::move(matrices)) {
    if (matrices_.size() < 2) throw InvalidModel("MPS needs at least two physical states (d >= 2)");
    const Eigen::Index bond = matrices_.front().rows();
    if (bond < 1) throw InvalidModel("bond dimension must be >= 1");
    bool any_nonzero = false;
    for (std::size_t i = 0; i < matrices_.size(); ++i) {
      const auto &a = matrices_[i];
      if (a.rows() != bond || a.cols() != bond) {
        throw InvalidModel("matrix " + std::to_string(i + 1) + " is " + std::to_string(a.rows()) + "x" +
                           std::to_string(a.cols()) + ", expected " + std::to_string(bond) + "x" +
                           std::to_string(bond));
      }
      if (!all_finite(a)) throw InvalidModel("matrix " + std::to_string(i + 1) + " has non-finite entries");
      any_nonzero = any_nonzero || max_abs(a) > 0.0;
    }
    if (!any_nonzero) throw InvalidModel("all defining matrices are zero");
  }

  [[nodiscard]] int physical_dim() const { return static_cast<int>(matrices_.size()); }
  [[nodiscard]] int bond_dim() const { return static_cast<int>(matrices_.front().rows()); }
  [[nodiscard]] const std::vector<ComplexMatrix> &matrices() const { return matrices_; }
  [[nodiscard]] const ComplexMatrix &operator[](std::size_t i) const { return matrices_[i]; }

private:
  std::vector<ComplexMatrix> matrices_;
};

struct Interval {
  double lo = -1.0;
  double hi = 1.0;

  [[nodiscard]] bool contains(double x) const { return lo <= x && x <= hi; }
};

enum class FamilyKind { ladder, xyz, three_body, custom };

inline std::string to_string(FamilyKind kind) {
  switch (kind) {
  case FamilyKind::ladder: return "ladder";
  case FamilyKind::xyz: return "xyz";
  case FamilyKind::three_body: return "three_body";
  case FamilyKind::custom: return "custom";
  }
  return "custom";
}

/// A g-parameterized family of MPS defining matrices.
struct ModelFamily {
  std::string name;
  int d = 2;
  int D = 2;
  FamilyKind kind = FamilyKind::custom;
  /// Rung coupling a of the ladder; unused otherwise.
  double ladder_a = 1.0;
  Interval domain;
  std::function<MPSModel(double)> matrix_fn;

  [[nodiscard]] bool closed_form_available() const { return kind != FamilyKind::custom; }
  [[nodiscard]] MPSModel at(double g) const { return matrix_fn(g); }
};

} // namespace mpsbell
