#pragma once

// Dense complex kernel for the small matrices used throughout the library
// (D^2 x D^2 transfer matrices, 4x4 two-qubit states, 3x3 correlation tensors).

#include "mpsbell/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

namespace mpsbell {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace tol {
/// Hermiticity, trace and positivity slack for density matrices.
inline constexpr double physicality = 1e-10;
/// Relative eigenpair residual ||Mv - lv|| / ||M||.
inline constexpr double eigen_residual = 1e-9;
/// Entrywise |h - h^dagger| accepted by eig_hermitian.
inline constexpr double hermiticity = 1e-10;
/// |l1| = |l2| test for an infinite correlation length.
inline constexpr double modulus_tie = 1e-12;
/// gap_ratio closeness to 1 that counts as a level crossing.
inline constexpr double crossing = 1e-9;
/// Relative radius of the dominant eigenvalue cluster. Jordan blocks split
/// exactly-equal eigenvalues by ~sqrt(machine eps), so this must be looser.
inline constexpr double cluster = 1e-6;
} // namespace tol

inline bool all_finite(const ComplexMatrix &m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline double max_abs(const ComplexMatrix &m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline ComplexMatrix matmul(const ComplexMatrix &a, const ComplexMatrix &b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                            " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  return a * b;
}

/// (a kron b)[i*R + k, j*C + l] = a[i,j] * b[k,l], R x C the shape of b.
inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

struct GeneralEigen {
  /// Sorted by descending modulus, ties broken by descending real part.
  std::vector<Complex> values;
  /// Column k is the right eigenvector of values[k], unit 2-norm.
  ComplexMatrix right;
  /// Row k is the left eigenvector (row * M = value * row), scaled so that
  /// left.row(k) * right.col(k) = 1 whenever the pair is not defective.
  ComplexMatrix left;
};

namespace detail {

inline std::vector<Eigen::Index> eigen_order(const Eigen::VectorXcd &values) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(values[a]) > std::abs(values[b]);
  });
  // Re-sort runs whose moduli agree to within roundoff by real part.
  const double scale = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() &&
           std::abs(values[order[end - 1]]) - std::abs(values[order[end]]) <= tol::modulus_tie * std::max(1.0, scale)) {
      ++end;
    }
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](Eigen::Index a, Eigen::Index b) {
                       if (values[a].real() != values[b].real()) return values[a].real() > values[b].real();
                       return values[a].imag() > values[b].imag();
                     });
    start = end;
  }
  return order;
}

} // namespace detail

inline GeneralEigen eig_general(const ComplexMatrix &m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("eig_general: matrix is not square");
  if (!all_finite(m)) throw EigensolverFailure("eig_general: non-finite input");
  const Eigen::Index n = m.rows();

  Eigen::ComplexEigenSolver<ComplexMatrix> rsolve(m, true);
  if (rsolve.info() != Eigen::Success) throw EigensolverFailure("eig_general: right eigenproblem did not converge");
  // Left vectors from the conjugate-transpose problem: M^dagger y = conj(l) y.
  Eigen::ComplexEigenSolver<ComplexMatrix> lsolve(m.adjoint(), true);
  if (lsolve.info() != Eigen::Success) throw EigensolverFailure("eig_general: left eigenproblem did not converge");

  const auto order = detail::eigen_order(rsolve.eigenvalues());
  GeneralEigen out;
  out.values.reserve(static_cast<std::size_t>(n));
  out.right.resize(n, n);
  out.left.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values.push_back(rsolve.eigenvalues()[order[static_cast<std::size_t>(k)]]);
    out.right.col(k) = rsolve.eigenvectors().col(order[static_cast<std::size_t>(k)]).normalized();
  }

  // Greedy match of each right eigenvalue to the closest unused conj(left) eigenvalue.
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index best = -1;
    double best_dist = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double dist = std::abs(std::conj(lsolve.eigenvalues()[j]) - out.values[static_cast<std::size_t>(k)]);
      if (best < 0 || dist < best_dist) {
        best = j;
        best_dist = dist;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    out.left.row(k) = lsolve.eigenvectors().col(best).adjoint();
  }

  // Biorthogonalize within clusters of coincident eigenvalues.
  const double scale = std::max(1.0, max_abs(m));
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && std::abs(out.values[static_cast<std::size_t>(end)] - out.values[static_cast<std::size_t>(start)]) <=
                          1e-9 * scale) {
      ++end;
    }
    const Eigen::Index size = end - start;
    ComplexMatrix gram = out.left.middleRows(start, size) * out.right.middleCols(start, size);
    Eigen::JacobiSVD<ComplexMatrix> svd(gram);
    const auto &sv = svd.singularValues();
    if (sv(size - 1) > 1e-10 * std::max(1.0, sv(0))) {
      out.left.middleRows(start, size) = gram.inverse() * out.left.middleRows(start, size);
    }
    start = end;
  }
  return out;
}

struct HermitianEigen {
  /// Ascending.
  RealVector values;
  /// Unitary; column k belongs to values[k].
  ComplexMatrix vectors;
};

inline double hermiticity_defect(const ComplexMatrix &h) {
  if (h.rows() != h.cols()) throw DimensionMismatch("hermiticity_defect: matrix is not square");
  return max_abs(h - h.adjoint());
}

inline HermitianEigen eig_hermitian(const ComplexMatrix &h) {
  if (h.rows() != h.cols()) throw DimensionMismatch("eig_hermitian: matrix is not square");
  if (!all_finite(h)) throw EigensolverFailure("eig_hermitian: non-finite input");
  const double defect = hermiticity_defect(h);
  if (defect > tol::hermiticity) {
    throw NotHermitian("eig_hermitian: max |h - h^dagger| = " + std::to_string(defect));
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw EigensolverFailure("eig_hermitian: did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace pauli {
inline ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }
inline ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
inline ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
} // namespace pauli

} // namespace mpsbell
