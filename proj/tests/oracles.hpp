#pragma once

// Independent reference implementations for tests. Nothing here calls the
// library's numerics beyond plain Eigen storage and the types.

#include "mpsbell/numerics.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using mpsbell::Complex;
using mpsbell::ComplexMatrix;

inline ComplexMatrix matmul(const ComplexMatrix &a, const ComplexMatrix &b) {
  ComplexMatrix out(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Complex s{0.0, 0.0};
      for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  }
  return out;
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      out(r, c) = a(r / b.rows(), c / b.cols()) * b(r % b.rows(), c % b.cols());
    }
  }
  return out;
}

/// E[(a,b),(c,e)] = sum_i conj(A_i[a,c]) A_i[b,e].
inline ComplexMatrix transfer(const std::vector<ComplexMatrix> &as) {
  const Eigen::Index n = as.front().rows();
  ComplexMatrix e = ComplexMatrix::Zero(n * n, n * n);
  for (const auto &m : as)
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b)
        for (Eigen::Index c = 0; c < n; ++c)
          for (Eigen::Index f = 0; f < n; ++f) e(a * n + b, c * n + f) += std::conj(m(a, c)) * m(b, f);
  return e;
}

/// Amplitudes Tr(A_{i1} ... A_{iN}) of the periodic MPS, index i1 most significant.
inline std::vector<Complex> mps_state(const std::vector<ComplexMatrix> &as, int sites) {
  const auto d = static_cast<std::int64_t>(as.size());
  std::int64_t total = 1;
  for (int s = 0; s < sites; ++s) total *= d;
  std::vector<Complex> psi(static_cast<std::size_t>(total));
  for (std::int64_t idx = 0; idx < total; ++idx) {
    ComplexMatrix w = ComplexMatrix::Identity(as.front().rows(), as.front().cols());
    std::int64_t rest = idx, place = total / d;
    for (int s = 0; s < sites; ++s) {
      w = matmul(w, as[static_cast<std::size_t>(rest / place)]);
      rest %= place;
      place = place > 1 ? place / d : 1;
    }
    psi[static_cast<std::size_t>(idx)] = w.trace();
  }
  return psi;
}

/// Reduced density matrix of sites p < q of an explicit N-site state, traced by brute force.
inline ComplexMatrix two_site_rdm(const std::vector<Complex> &psi, int d, int sites, int p, int q) {
  ComplexMatrix rho = ComplexMatrix::Zero(d * d, d * d);
  auto digit = [&](std::int64_t idx, int site) {
    std::int64_t place = 1;
    for (int s = site + 1; s < sites; ++s) place *= d;
    return static_cast<int>((idx / place) % d);
  };
  auto with = [&](std::int64_t idx, int site, int value) {
    std::int64_t place = 1;
    for (int s = site + 1; s < sites; ++s) place *= d;
    return idx + (value - digit(idx, site)) * place;
  };
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(psi.size()); ++idx) {
    const int i1 = digit(idx, p), i2 = digit(idx, q);
    for (int j1 = 0; j1 < d; ++j1) {
      for (int j2 = 0; j2 < d; ++j2) {
        const std::int64_t other = with(with(idx, p, j1), q, j2);
        rho(i1 * d + i2, j1 * d + j2) += psi[static_cast<std::size_t>(idx)] * std::conj(psi[static_cast<std::size_t>(other)]);
      }
    }
  }
  return rho / rho.trace();
}

/// Single-site rdm of an explicit state.
inline ComplexMatrix one_site_rdm(const std::vector<Complex> &psi, int d, int sites, int p) {
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  std::int64_t place = 1;
  for (int s = p + 1; s < sites; ++s) place *= d;
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(psi.size()); ++idx) {
    const int i = static_cast<int>((idx / place) % d);
    for (int j = 0; j < d; ++j) {
      const std::int64_t other = idx + (j - i) * place;
      rho(i, j) += psi[static_cast<std::size_t>(idx)] * std::conj(psi[static_cast<std::size_t>(other)]);
    }
  }
  return rho / rho.trace();
}

inline ComplexMatrix partial_trace_second(const ComplexMatrix &rho, int da, int db) {
  ComplexMatrix out = ComplexMatrix::Zero(da, da);
  for (int a = 0; a < da; ++a)
    for (int c = 0; c < da; ++c)
      for (int b = 0; b < db; ++b) out(a, c) += rho(a * db + b, c * db + b);
  return out;
}

inline ComplexMatrix partial_trace_first(const ComplexMatrix &rho, int da, int db) {
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (int b = 0; b < db; ++b)
    for (int e = 0; e < db; ++e)
      for (int a = 0; a < da; ++a) out(b, e) += rho(a * db + b, a * db + e);
  return out;
}

inline ComplexMatrix random_matrix(std::mt19937_64 &rng, int rows, int cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(n(rng), n(rng));
  return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64 &rng, int n) {
  const ComplexMatrix m = random_matrix(rng, n, n);
  return 0.5 * (m + m.adjoint());
}

inline Eigen::VectorXcd random_pure(std::mt19937_64 &rng, int n) {
  Eigen::VectorXcd v = random_matrix(rng, n, 1);
  return v / v.norm();
}

/// Convex mixture of 1..4 random pure states with random weights.
inline ComplexMatrix random_density(std::mt19937_64 &rng, int n = 4) {
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int k = count(rng);
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    const double w = u(rng) + 1e-3;
    const Eigen::VectorXcd v = random_pure(rng, n);
    rho += w * v * v.adjoint();
    total += w;
  }
  rho /= total;
  return 0.5 * (rho + rho.adjoint());
}

/// Random SU(2) from Euler angles.
inline ComplexMatrix random_unitary2(std::mt19937_64 &rng) {
  const double pi = std::acos(-1.0);
  std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  const double theta = std::acos(std::sqrt(t(rng)));
  const double alpha = u(rng), beta = u(rng);
  ComplexMatrix m(2, 2);
  m << std::polar(std::cos(theta), alpha), std::polar(std::sin(theta), beta),
       -std::polar(std::sin(theta), -beta), std::polar(std::cos(theta), -alpha);
  return m;
}

inline ComplexMatrix bell_01_10() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(1, 1) = m(1, 2) = m(2, 1) = m(2, 2) = 0.5;
  return m;
}

inline ComplexMatrix projector(const Eigen::VectorXcd &v) { return v * v.adjoint(); }

/// B for a diagonal state: the x and y correlations vanish, so B = 2 |<zz>|.
inline double diagonal_bcf(double p1, double p2, double p3, double p4) { return 2.0 * std::abs(p1 + p4 - p2 - p3); }

/// Shannon entropy in bits of a probability list.
inline double shannon(const std::vector<double> &p) {
  double s = 0.0;
  for (double x : p)
    if (x > 0.0) s -= x * std::log2(x);
  return s;
}

} // namespace oracle
