#pragma once

// Two-qubit correlation measures: Bell-CHSH function, concurrence, entropies,
// classical correlation and quantum discord.
//
// Basis ordering is |00>, |01>, |10>, |11>; the first qubit is subsystem A,
// the second is B. Entropies are in bits.

#include "mpsbell/errors.hpp"
#include "mpsbell/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace mpsbell {

/// Validated 4x4 two-qubit density matrix.
class TwoQubitState {
public:
  /// Throws InvalidState unless m is Hermitian (1e-10), unit trace (1e-12) and
  /// has no eigenvalue below -1e-10. The stored matrix is exactly Hermitian.
  explicit TwoQubitState(const ComplexMatrix &m) {
    if (m.rows() != 4 || m.cols() != 4) throw InvalidState("two-qubit state must be 4x4");
    if (!all_finite(m)) throw InvalidState("two-qubit state has non-finite entries");
    const double defect = hermiticity_defect(m);
    if (defect > tol::physicality) throw InvalidState("state is not Hermitian (defect " + std::to_string(defect) + ")");
    const double trace_error = std::abs(m.trace() - Complex{1.0, 0.0});
    if (trace_error > 1e-12) throw InvalidState("state trace differs from 1 by " + std::to_string(trace_error));
    matrix_ = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues()(0) < -tol::physicality) {
      throw InvalidState("state has eigenvalue " + std::to_string(solver.eigenvalues()(0)));
    }
  }

  /// Divides by the trace first.
  static TwoQubitState normalized(const ComplexMatrix &m) {
    const Complex trace = m.trace();
    if (!(std::abs(trace) > 0.0)) throw InvalidState("cannot normalize a traceless matrix");
    return TwoQubitState(m / trace);
  }

  [[nodiscard]] const ComplexMatrix &matrix() const { return matrix_; }
  [[nodiscard]] Complex operator()(int i, int j) const { return matrix_(i, j); }

private:
  ComplexMatrix matrix_;
};

struct CorrelationReport {
  double bcf = 0.0;
  double concurrence = 0.0;
  double discord = 0.0;
  double mutual_information = 0.0;
  double classical_correlation = 0.0;
  bool nonlocal = false;
  bool entangled = false;
  bool discordant = false;
};

namespace measure_tol {
/// B > 2 + this counts as a Bell-CHSH violation.
inline constexpr double bell_violation = 1e-10;
/// C > this counts as entangled.
inline constexpr double entangled = 1e-10;
/// D > this counts as discordant.
inline constexpr double discordant = 1e-6;
/// Discord below -this is an optimizer failure rather than roundoff.
inline constexpr double negative_discord = 1e-8;
} // namespace measure_tol

inline const std::array<ComplexMatrix, 3> &pauli_basis() {
  static const std::array<ComplexMatrix, 3> basis{pauli::x(), pauli::y(), pauli::z()};
  return basis;
}

/// L_ij = Tr[rho sigma_i kron sigma_j].
inline Eigen::Matrix3d correlation_tensor(const TwoQubitState &rho) {
  Eigen::Matrix3d out;
  const auto &paulis = pauli_basis();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Complex value = (rho.matrix() * kron(paulis[static_cast<std::size_t>(i)], paulis[static_cast<std::size_t>(j)])).trace();
      if (std::abs(value.imag()) > tol::physicality) {
        throw InvalidState("correlation tensor has imaginary residue " + std::to_string(value.imag()));
      }
      out(i, j) = value.real();
    }
  }
  return out;
}

/// Horodecki closed form: B = 2 sqrt(u + v), u, v the two largest eigenvalues of L^T L.
inline double bcf(const TwoQubitState &rho) {
  const Eigen::Matrix3d l = correlation_tensor(rho);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(l.transpose() * l, Eigen::EigenvaluesOnly);
  const double top_two = solver.eigenvalues()(2) + solver.eigenvalues()(1);
  return 2.0 * std::sqrt(std::max(top_two, 0.0));
}

struct BruteForceGrid {
  int points_per_angle = 24;
  double angle_tolerance = 1e-6;
  /// Number of best coarse-grid seeds refined by coordinate ascent.
  int seeds = 6;
};

namespace detail {

inline Eigen::Vector3d bloch(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

/// Coordinate ascent on a box-free angle vector with step halving.
template <class F, std::size_t N>
double coordinate_ascent(const F &f, std::array<double, N> &x, double step, double tolerance) {
  double best = f(x);
  while (step >= tolerance) {
    bool improved = false;
    for (std::size_t k = 0; k < N; ++k) {
      for (double sign : {1.0, -1.0}) {
        auto trial = x;
        trial[k] += sign * step;
        const double value = f(trial);
        if (value > best) {
          best = value;
          x = trial;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

} // namespace detail

/// max over unit vectors a1, a2, b1, b2 of |<A1 B1 + A1 B2 + A2 B1 - A2 B2>|,
/// evaluated through <(a.sigma) kron (b.sigma)> = a^T L b.
///
/// The coarse stage scans b1, b2 on a (theta, phi) grid with a1, a2 aligned to
/// L(b1 + b2) and L(b1 - b2); the best seeds are then refined over all eight
/// angles by coordinate ascent.
inline double bcf_bruteforce(const TwoQubitState &rho, const BruteForceGrid &grid = {}) {
  const Eigen::Matrix3d l = correlation_tensor(rho);
  const int n = grid.points_per_angle;
  const double pi = std::acos(-1.0);

  struct Direction {
    double theta, phi;
    Eigen::Vector3d lb;
  };
  std::vector<Direction> directions;
  directions.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    const double theta = pi * (i + 0.5) / n;
    for (int j = 0; j < n; ++j) {
      const double phi = 2.0 * pi * j / n;
      directions.push_back({theta, phi, l * detail::bloch(theta, phi)});
    }
  }

  struct Seed {
    double value;
    std::size_t b1, b2;
  };
  std::vector<Seed> best;
  for (std::size_t p = 0; p < directions.size(); ++p) {
    for (std::size_t q = 0; q < directions.size(); ++q) {
      const double value = (directions[p].lb + directions[q].lb).norm() + (directions[p].lb - directions[q].lb).norm();
      if (static_cast<int>(best.size()) < grid.seeds || value > best.back().value) {
        best.push_back({value, p, q});
        std::sort(best.begin(), best.end(), [](const Seed &a, const Seed &b) { return a.value > b.value; });
        if (static_cast<int>(best.size()) > grid.seeds) best.pop_back();
      }
    }
  }

  auto objective = [&](const std::array<double, 8> &x) {
    const Eigen::Vector3d a1 = detail::bloch(x[0], x[1]), a2 = detail::bloch(x[2], x[3]);
    const Eigen::Vector3d b1 = detail::bloch(x[4], x[5]), b2 = detail::bloch(x[6], x[7]);
    return std::abs(a1.dot(l * (b1 + b2)) + a2.dot(l * (b1 - b2)));
  };
  auto angles_of = [](const Eigen::Vector3d &v) {
    if (v.norm() == 0.0) return std::array<double, 2>{0.0, 0.0};
    const Eigen::Vector3d u = v.normalized();
    return std::array<double, 2>{std::acos(std::clamp(u.z(), -1.0, 1.0)), std::atan2(u.y(), u.x())};
  };

  double result = 0.0;
  for (const auto &seed : best) {
    const auto &b1 = directions[seed.b1];
    const auto &b2 = directions[seed.b2];
    const auto a1 = angles_of(b1.lb + b2.lb);
    const auto a2 = angles_of(b1.lb - b2.lb);
    std::array<double, 8> x{a1[0], a1[1], a2[0], a2[1], b1.theta, b1.phi, b2.theta, b2.phi};
    result = std::max(result, detail::coordinate_ascent(objective, x, pi / n, grid.angle_tolerance));
  }
  return result;
}

/// (sigma_y kron sigma_y) conj(rho) (sigma_y kron sigma_y).
inline ComplexMatrix spin_flip(const TwoQubitState &rho) {
  const ComplexMatrix yy = kron(pauli::y(), pauli::y());
  return yy * rho.matrix().conjugate() * yy;
}

/// Wootters concurrence. With rho = A A^dagger, the square roots of the
/// spectrum of rho * flip(rho) are the singular values of A^T (Y kron Y) A.
/// Eigenvalues of rho at roundoff level are dropped from A: their square roots
/// would otherwise inject ~1e-8 noise into rank-deficient states.
inline double concurrence(const TwoQubitState &rho) {
  const HermitianEigen eig = eig_hermitian(rho.matrix());
  const double floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(eig.values.maxCoeff(), 0.0);
  ComplexMatrix a = eig.vectors;
  for (Eigen::Index k = 0; k < 4; ++k) {
    const double p = eig.values(k);
    a.col(k) *= p > floor ? std::sqrt(p) : 0.0;
  }
  const ComplexMatrix yy = kron(pauli::y(), pauli::y());
  const ComplexMatrix tau = a.transpose() * yy * a;
  const Eigen::JacobiSVD<ComplexMatrix> svd(tau);
  const RealVector mu = svd.singularValues();
  return std::clamp(mu(0) - mu(1) - mu(2) - mu(3), 0.0, 1.0);
}

namespace detail {
inline double entropy_term(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }
} // namespace detail

/// S = -sum lambda log2 lambda, 0 log 0 = 0.
inline double von_neumann_entropy(const ComplexMatrix &rho) {
  const HermitianEigen eig = eig_hermitian(rho);
  double s = 0.0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) < -tol::physicality) {
      throw InvalidState("density matrix has eigenvalue " + std::to_string(eig.values(k)));
    }
    s += detail::entropy_term(eig.values(k));
  }
  return s;
}

/// rho_A = Tr_B rho.
inline ComplexMatrix reduced_a(const TwoQubitState &rho) {
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c)
      for (int b = 0; b < 2; ++b) out(a, c) += rho(2 * a + b, 2 * c + b);
  return out;
}

/// rho_B = Tr_A rho.
inline ComplexMatrix reduced_b(const TwoQubitState &rho) {
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  for (int b = 0; b < 2; ++b)
    for (int e = 0; e < 2; ++e)
      for (int a = 0; a < 2; ++a) out(b, e) += rho(2 * a + b, 2 * a + e);
  return out;
}

inline double mutual_information(const TwoQubitState &rho) {
  return von_neumann_entropy(reduced_a(rho)) + von_neumann_entropy(reduced_b(rho)) - von_neumann_entropy(rho.matrix());
}

struct DiscordOptions {
  int theta_points = 64;
  int phi_points = 128;
  double angle_tolerance = 1e-6;
  int seeds = 4;
};

namespace detail {

/// p log2-entropy contribution of an unnormalized 2x2 block: p S(block / p).
inline double weighted_qubit_entropy(const Eigen::Matrix2cd &block) {
  const double p = block.trace().real();
  if (p <= 0.0) return 0.0;
  const double det = std::max((block(0, 0) * block(1, 1) - block(0, 1) * block(1, 0)).real(), 0.0);
  const double disc = std::sqrt(std::max(p * p - 4.0 * det, 0.0));
  const double large = 0.5 * (p + disc);
  const double small = large > 0.0 ? det / large : 0.0;
  auto term = [p](double mu) { return mu > 0.0 ? -mu * std::log2(mu / p) : 0.0; };
  return term(large) + term(small);
}

/// Outcome-weighted entropy of A after the rank-1 projective measurement of B
/// along Bloch direction (theta, phi).
inline double conditional_entropy(const TwoQubitState &rho, double theta, double phi) {
  const Complex phase = std::polar(1.0, phi);
  const std::array<Eigen::Vector2cd, 2> outcomes{
      Eigen::Vector2cd(std::cos(theta / 2), phase * std::sin(theta / 2)),
      Eigen::Vector2cd(-std::conj(phase) * std::sin(theta / 2), std::cos(theta / 2))};
  double total = 0.0;
  for (const auto &v : outcomes) {
    Eigen::Matrix2cd block;
    for (int a = 0; a < 2; ++a) {
      for (int c = 0; c < 2; ++c) {
        Complex sum{0.0, 0.0};
        for (int b = 0; b < 2; ++b)
          for (int e = 0; e < 2; ++e) sum += std::conj(v(b)) * rho(2 * a + b, 2 * c + e) * v(e);
        block(a, c) = sum;
      }
    }
    total += weighted_qubit_entropy(block);
  }
  return total;
}

/// min over measurement directions of the conditional entropy.
inline double min_conditional_entropy(const TwoQubitState &rho, const DiscordOptions &options) {
  const double pi = std::acos(-1.0);
  struct Seed {
    double value, theta, phi;
  };
  std::vector<Seed> seeds;
  for (int i = 0; i < options.theta_points; ++i) {
    const double theta = pi * i / options.theta_points;
    const int phis = i == 0 ? 1 : options.phi_points;
    for (int j = 0; j < phis; ++j) {
      const double phi = 2.0 * pi * j / options.phi_points;
      seeds.push_back({conditional_entropy(rho, theta, phi), theta, phi});
    }
  }
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(options.seeds), seeds.size());
  std::partial_sort(seeds.begin(), seeds.begin() + static_cast<std::ptrdiff_t>(keep), seeds.end(),
                    [](const Seed &a, const Seed &b) { return a.value < b.value; });

  auto objective = [&](const std::array<double, 2> &x) { return -conditional_entropy(rho, x[0], x[1]); };
  double best = seeds.front().value;
  for (std::size_t s = 0; s < keep; ++s) {
    std::array<double, 2> x{seeds[s].theta, seeds[s].phi};
    best = std::min(best, -coordinate_ascent(objective, x, pi / options.theta_points, options.angle_tolerance));
  }
  return best;
}

} // namespace detail

/// J = S(rho_A) - min over projective measurements on B of the conditional entropy.
inline double classical_correlation(const TwoQubitState &rho, const DiscordOptions &options = {}) {
  return von_neumann_entropy(reduced_a(rho)) - detail::min_conditional_entropy(rho, options);
}

namespace detail {

struct DiscordParts {
  double mutual_information, classical_correlation, discord;
};

inline DiscordParts discord_parts(const TwoQubitState &rho, const DiscordOptions &options) {
  const double s_a = von_neumann_entropy(reduced_a(rho));
  const double s_b = von_neumann_entropy(reduced_b(rho));
  const double s_ab = von_neumann_entropy(rho.matrix());
  const double conditional = min_conditional_entropy(rho, options);
  // D = S_B - S_AB + min conditional entropy, without the S_A cancellation.
  double d = s_b - s_ab + conditional;
  if (d < -measure_tol::negative_discord) {
    throw OptimizerFailure("discord came out negative (" + std::to_string(d) + ")");
  }
  d = std::max(d, 0.0);
  const double mutual = s_a + s_b - s_ab;
  return {mutual, mutual - d, d};
}

} // namespace detail

/// D = I - J, clamped at 0 within roundoff.
inline double discord(const TwoQubitState &rho, const DiscordOptions &options = {}) {
  return detail::discord_parts(rho, options).discord;
}

inline CorrelationReport classify(const TwoQubitState &rho, const DiscordOptions &options = {}) {
  CorrelationReport out;
  out.bcf = bcf(rho);
  out.concurrence = concurrence(rho);
  const auto parts = detail::discord_parts(rho, options);
  out.discord = parts.discord;
  out.mutual_information = parts.mutual_information;
  out.classical_correlation = parts.classical_correlation;
  out.nonlocal = out.bcf > 2.0 + measure_tol::bell_violation;
  out.entangled = out.concurrence > measure_tol::entangled;
  out.discordant = out.discord > measure_tol::discordant;
  return out;
}

} // namespace mpsbell
