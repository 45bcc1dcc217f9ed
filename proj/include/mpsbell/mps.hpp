#pragma once

// Transfer-matrix formalism for translation-invariant MPS on a ring of N sites
// and in the thermodynamic limit N -> infinity.

#include "mpsbell/errors.hpp"
#include "mpsbell/model_family.hpp"
#include "mpsbell/numerics.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mpsbell {

/// Number of sites of the ring, or the thermodynamic limit.
class ChainLength {
public:
  static ChainLength infinite() { return ChainLength{}; }
  static ChainLength finite(std::int64_t sites) {
    if (sites < 1) throw InvalidModel("chain length must be positive");
    ChainLength out;
    out.sites_ = sites;
    return out;
  }

  [[nodiscard]] bool is_infinite() const { return !sites_.has_value(); }
  [[nodiscard]] std::int64_t sites() const { return sites_.value(); }

private:
  std::optional<std::int64_t> sites_;
};

/// Ring size used when the thermodynamic limit is undefined at a level crossing.
inline constexpr std::int64_t kFallbackSites = std::int64_t{1} << 20;

struct TransferSpectrum {
  /// All D^2 eigenvalues, descending modulus.
  std::vector<Complex> eigenvalues;
  /// Dominant eigenvalue cluster: right vectors as columns (D^2 x m) and left
  /// vectors as rows (m x D^2) with dominant_left * dominant_right = I.
  /// Empty when the cluster is defective.
  ComplexMatrix dominant_right;
  ComplexMatrix dominant_left;
  /// |l_next| / |l_1| where l_next is the largest eigenvalue outside the dominant
  /// cluster; 1 when degenerate.
  double gap_ratio = 0.0;
  std::size_t dominant_multiplicity = 1;
  /// Dominant cluster is a Jordan block or shares its modulus with a distinct eigenvalue.
  bool degenerate = false;

  [[nodiscard]] Complex dominant() const { return eigenvalues.front(); }
  [[nodiscard]] double lambda1_abs() const { return std::abs(eigenvalues.front()); }
  [[nodiscard]] double lambda2_abs() const { return gap_ratio * lambda1_abs(); }
  /// Spectral projector onto the dominant eigenspace.
  [[nodiscard]] ComplexMatrix projector() const { return dominant_right * dominant_left; }
};

/// E = sum_i conj(A_i) kron A_i.
inline ComplexMatrix transfer_matrix(const MPSModel &model) {
  const int bond = model.bond_dim();
  ComplexMatrix e = ComplexMatrix::Zero(bond * bond, bond * bond);
  for (const auto &a : model.matrices()) e += kron(a.conjugate(), a);
  return e;
}

/// Generalized single-site operator E_{ij} = conj(A_i) kron A_j.
inline ComplexMatrix site_operator(const MPSModel &model, int i, int j) {
  return kron(model[static_cast<std::size_t>(i)].conjugate(), model[static_cast<std::size_t>(j)]);
}

inline TransferSpectrum transfer_spectrum(const MPSModel &model) {
  const ComplexMatrix e = transfer_matrix(model);
  const GeneralEigen eig = eig_general(e);

  TransferSpectrum out;
  out.eigenvalues = eig.values;
  const Complex lead = eig.values.front();
  const double lead_abs = std::abs(lead);
  if (!(lead_abs > std::numeric_limits<double>::min() * 1e10) || lead_abs <= 1e-14 * std::max(1.0, max_abs(e))) {
    throw InvalidModel("dominant transfer-matrix eigenvalue is zero");
  }

  std::size_t cluster = 0;
  Complex centre{0.0, 0.0};
  for (const auto &value : eig.values) {
    if (std::abs(value - lead) <= tol::cluster * lead_abs) {
      ++cluster;
      centre += value;
    }
  }
  centre /= static_cast<double>(cluster);
  out.dominant_multiplicity = cluster;

  // First eigenvalue outside the cluster (the list is modulus-sorted, but a
  // cluster member may sit behind an outsider of equal modulus).
  std::optional<Complex> next;
  for (const auto &value : eig.values) {
    if (std::abs(value - lead) > tol::cluster * lead_abs) {
      next = value;
      break;
    }
  }
  const bool modulus_tie = next && std::abs(*next) >= (1.0 - tol::modulus_tie) * lead_abs;

  // Semisimple iff the geometric multiplicity (nullity of E - centre) matches the cluster size.
  const Eigen::Index n = e.rows();
  const ComplexMatrix shifted = e - centre * ComplexMatrix::Identity(n, n);
  Eigen::JacobiSVD<ComplexMatrix> svd(shifted, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector &sv = svd.singularValues();
  const double null_threshold = 1e-8 * std::max(1.0, max_abs(e));
  std::size_t nullity = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= null_threshold) ++nullity;
  }

  bool defective = nullity < cluster;
  if (!defective) {
    const auto m = static_cast<Eigen::Index>(cluster);
    ComplexMatrix right = svd.matrixV().rightCols(m);
    ComplexMatrix left = svd.matrixU().rightCols(m).adjoint();
    const ComplexMatrix gram = left * right;
    Eigen::JacobiSVD<ComplexMatrix> gsvd(gram);
    if (gsvd.singularValues()(m - 1) <= 1e-8) {
      defective = true;
    } else {
      out.dominant_right = right;
      out.dominant_left = gram.inverse() * left;
    }
  }

  out.degenerate = defective || modulus_tie;
  if (out.degenerate) {
    out.gap_ratio = 1.0;
  } else {
    out.gap_ratio = next ? std::abs(*next) / lead_abs : 0.0;
  }
  return out;
}

/// xi = 1 / ln(|l_1| / |l_2|); +infinity at a level crossing, 0 when l_2 = 0.
inline double correlation_length(const TransferSpectrum &spectrum) {
  if (spectrum.eigenvalues.empty() || spectrum.lambda1_abs() == 0.0) {
    throw InvalidModel("correlation_length: zero dominant eigenvalue");
  }
  if (spectrum.gap_ratio >= 1.0 - tol::modulus_tie) return std::numeric_limits<double>::infinity();
  if (spectrum.gap_ratio <= 0.0) return 0.0;
  return -1.0 / std::log(spectrum.gap_ratio);
}

namespace detail {

/// M^n up to a positive scalar; the scalar is irrelevant after trace normalization.
inline ComplexMatrix scaled_power(const ComplexMatrix &m, std::int64_t n) {
  ComplexMatrix result = ComplexMatrix::Identity(m.rows(), m.cols());
  ComplexMatrix base = m;
  auto rescale = [](ComplexMatrix &x) {
    const double s = max_abs(x);
    if (s > 0.0) x /= s;
  };
  rescale(base);
  while (n > 0) {
    if (n & 1) {
      result = result * base;
      rescale(result);
    }
    n >>= 1;
    if (n > 0) {
      base = base * base;
      rescale(base);
    }
  }
  return result;
}

/// Tr[(X kron Y) Q] without forming the Kronecker product.
inline Complex kron_trace(const ComplexMatrix &x, const ComplexMatrix &y, const ComplexMatrix &q) {
  const Eigen::Index dy = y.rows();
  Complex sum{0.0, 0.0};
  for (Eigen::Index a = 0; a < x.rows(); ++a) {
    for (Eigen::Index b = 0; b < x.cols(); ++b) {
      if (x(a, b) == Complex{0.0, 0.0}) continue;
      for (Eigen::Index c = 0; c < dy; ++c) {
        for (Eigen::Index e = 0; e < y.cols(); ++e) {
          sum += x(a, b) * y(c, e) * q(b * dy + e, a * dy + c);
        }
      }
    }
  }
  return sum;
}

inline void require_thermodynamic_limit(const TransferSpectrum &spectrum) {
  if (spectrum.degenerate) {
    throw DegenerateTransferSpectrum("thermodynamic limit undefined: dominant transfer-matrix eigenvalue is degenerate "
                                     "(gap_ratio = 1); use a finite chain");
  }
}

} // namespace detail

struct DensityCheck {
  double hermiticity_defect = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;

  [[nodiscard]] bool ok() const {
    return hermiticity_defect <= tol::physicality && trace_error <= 1e-12 && min_eigenvalue >= -tol::physicality;
  }
};

inline DensityCheck check_density(const ComplexMatrix &rho) {
  DensityCheck out;
  out.hermiticity_defect = hermiticity_defect(rho);
  out.trace_error = std::abs(rho.trace() - Complex{1.0, 0.0});
  const ComplexMatrix sym = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = solver.eigenvalues()(0);
  return out;
}

/// Trace-normalize, Hermitize, and clamp roundoff-level negative eigenvalues.
/// Anything beyond tolerance is an error.
inline ComplexMatrix finalize_density(ComplexMatrix rho) {
  const Complex trace = rho.trace();
  if (!(std::abs(trace) > 0.0) || !all_finite(rho)) throw InvalidModel("reduced density matrix has zero norm");
  if (std::abs(trace.imag()) > tol::physicality * std::abs(trace) || trace.real() <= 0.0) {
    throw InvalidState("reduced density matrix has non-positive trace");
  }
  rho /= trace;
  const double defect = hermiticity_defect(rho);
  if (defect > tol::physicality) {
    throw InvalidState("reduced density matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  }
  rho = 0.5 * (rho + rho.adjoint());
  const HermitianEigen eig = eig_hermitian(rho);
  const double lowest = eig.values(0);
  if (lowest < -tol::physicality) {
    throw InvalidState("reduced density matrix has eigenvalue " + std::to_string(lowest));
  }
  if (lowest < 0.0) {
    const RealVector clamped = eig.values.cwiseMax(0.0);
    rho = eig.vectors * clamped.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    rho /= rho.trace();
    rho = 0.5 * (rho + rho.adjoint());
  }
  return rho;
}

/// Density matrix of k adjacent sites, composite index (i_1..i_k) -> sum i_j d^(k-j).
inline ComplexMatrix rdm_adjacent(const MPSModel &model, const TransferSpectrum &spectrum, int k, ChainLength length) {
  if (k < 1) throw InvalidModel("rdm_adjacent: k must be >= 1");
  const int d = model.physical_dim();
  ComplexMatrix closure;
  if (length.is_infinite()) {
    detail::require_thermodynamic_limit(spectrum);
    closure = spectrum.projector();
  } else {
    if (length.sites() <= k) throw InvalidModel("rdm_adjacent: chain must have more than k sites");
    closure = detail::scaled_power(transfer_matrix(model), length.sites() - k);
  }

  std::int64_t strings = 1;
  for (int j = 0; j < k; ++j) strings *= d;
  const double lead = std::abs(spectrum.dominant());
  std::vector<ComplexMatrix> words(static_cast<std::size_t>(strings));
  for (std::int64_t s = 0; s < strings; ++s) {
    ComplexMatrix w = ComplexMatrix::Identity(model.bond_dim(), model.bond_dim());
    std::int64_t rest = s;
    std::int64_t place = strings / d;
    for (int j = 0; j < k; ++j) {
      w = w * (model[static_cast<std::size_t>(rest / place)] / std::sqrt(lead));
      rest %= place;
      place = std::max<std::int64_t>(place / d, 1);
    }
    words[static_cast<std::size_t>(s)] = w;
  }

  // rho(s, t) ~ psi_s conj(psi_t): the conjugated word belongs to the column.
  ComplexMatrix rho(strings, strings);
  for (std::int64_t t = 0; t < strings; ++t) {
    const ComplexMatrix bra = words[static_cast<std::size_t>(t)].conjugate();
    for (std::int64_t s = 0; s < strings; ++s) {
      rho(s, t) = detail::kron_trace(bra, words[static_cast<std::size_t>(s)], closure);
    }
  }
  return finalize_density(std::move(rho));
}

inline ComplexMatrix rdm_adjacent(const MPSModel &model, int k, ChainLength length) {
  return rdm_adjacent(model, transfer_spectrum(model), k, length);
}

/// Density matrix of sites i and i + r.
inline ComplexMatrix rdm_pair(const MPSModel &model, const TransferSpectrum &spectrum, int r, ChainLength length) {
  if (r < 1) throw InvalidModel("rdm_pair: distance must be >= 1");
  const int d = model.physical_dim();
  const ComplexMatrix e = transfer_matrix(model);
  ComplexMatrix closure;
  if (length.is_infinite()) {
    detail::require_thermodynamic_limit(spectrum);
    closure = spectrum.projector();
  } else {
    if (length.sites() <= r) throw InvalidModel("rdm_pair: chain must have more than r sites");
    closure = detail::scaled_power(e, length.sites() - r - 1);
  }
  const ComplexMatrix between = detail::scaled_power(e, r - 1);

  // rho(i1 i2, j1 j2) = Tr[E_{j1 i1} T E_{j2 i2} Q] with E_{ji} = conj(A_j) kron A_i.
  std::vector<ComplexMatrix> tail(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) tail[static_cast<std::size_t>(i * d + j)] = between * site_operator(model, j, i) * closure;
  }
  ComplexMatrix rho(d * d, d * d);
  for (int i1 = 0; i1 < d; ++i1) {
    for (int j1 = 0; j1 < d; ++j1) {
      const ComplexMatrix head = site_operator(model, j1, i1);
      for (int i2 = 0; i2 < d; ++i2) {
        for (int j2 = 0; j2 < d; ++j2) {
          rho(i1 * d + i2, j1 * d + j2) = (head * tail[static_cast<std::size_t>(i2 * d + j2)]).trace();
        }
      }
    }
  }
  return finalize_density(std::move(rho));
}

inline ComplexMatrix rdm_pair(const MPSModel &model, int r, ChainLength length) {
  return rdm_pair(model, transfer_spectrum(model), r, length);
}

struct GridBracket {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double centre() const { return 0.5 * (lo + hi); }
  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] bool overlaps(const GridBracket &other) const { return lo <= other.hi && other.lo <= hi; }
};

namespace detail {

inline bool dominant_space_changed(const TransferSpectrum &a, const TransferSpectrum &b) {
  if (a.dominant_multiplicity != b.dominant_multiplicity) return true;
  if (a.dominant_right.cols() == 0 || b.dominant_right.cols() == 0) return false;
  const ComplexMatrix qa = Eigen::HouseholderQR<ComplexMatrix>(a.dominant_right).householderQ() *
                           ComplexMatrix::Identity(a.dominant_right.rows(), a.dominant_right.cols());
  const ComplexMatrix qb = Eigen::HouseholderQR<ComplexMatrix>(b.dominant_right).householderQ() *
                           ComplexMatrix::Identity(b.dominant_right.rows(), b.dominant_right.cols());
  Eigen::JacobiSVD<ComplexMatrix> svd(qa.adjoint() * qb);
  // Smallest principal cosine between the two dominant eigenspaces.
  return svd.singularValues().minCoeff() < 0.5;
}

/// The inverse correlation length -ln(gap_ratio) touches zero linearly at a
/// crossing. Test whether both one-sided linear extrapolations land inside
/// (g[i], g[i+1]).
inline bool v_shaped_zero(const std::vector<double> &g, const std::vector<double> &inv_xi, std::size_t i) {
  if (i < 1 || i + 2 >= g.size()) return false;
  for (std::size_t j = i - 1; j <= i + 2; ++j) {
    if (!std::isfinite(inv_xi[j])) return false;
  }
  const double y0 = inv_xi[i - 1], y1 = inv_xi[i], y2 = inv_xi[i + 1], y3 = inv_xi[i + 2];
  if (!(y1 < y0 && y2 < y3)) return false;
  const double left_slope = (y1 - y0) / (g[i] - g[i - 1]);
  const double right_slope = (y3 - y2) / (g[i + 2] - g[i + 1]);
  if (!(left_slope < 0.0 && right_slope > 0.0)) return false;
  const double step = g[i + 1] - g[i];
  const double zero_left = g[i] - y1 / left_slope;
  const double zero_right = g[i + 1] - y2 / right_slope;
  const double slack = 0.25 * step;
  auto inside = [&](double z) { return z >= g[i] - slack && z <= g[i + 1] + slack; };
  return inside(zero_left) && inside(zero_right) && std::abs(zero_left - zero_right) <= 0.5 * step;
}

} // namespace detail

/// Crossing intervals from spectra already evaluated on a sorted grid.
inline std::vector<GridBracket> crossing_intervals(const std::vector<double> &g,
                                                   const std::vector<TransferSpectrum> &spectra) {
  if (g.size() != spectra.size()) throw GridError("crossing_intervals: grid and spectra differ in length");
  const std::size_t n = g.size();
  std::vector<bool> flagged(n > 0 ? n - 1 : 0, false);
  std::vector<double> inv_xi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = spectra[i].gap_ratio;
    inv_xi[i] = gap > 0.0 ? -std::log(std::min(gap, 1.0)) : std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (spectra[i].gap_ratio >= 1.0 - tol::crossing) {
      if (i > 0) flagged[i - 1] = true;
      if (i + 1 < n) flagged[i] = true;
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (flagged[i]) continue;
    if (spectra[i].degenerate || spectra[i + 1].degenerate) continue;
    if (detail::dominant_space_changed(spectra[i], spectra[i + 1]) || detail::v_shaped_zero(g, inv_xi, i)) {
      flagged[i] = true;
    }
  }

  std::vector<GridBracket> out;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!flagged[i]) continue;
    if (!out.empty() && out.back().hi >= g[i]) {
      out.back().hi = g[i + 1];
    } else {
      out.push_back({g[i], g[i + 1]});
    }
  }
  // A single degenerate endpoint still deserves a report.
  if (n == 1 && spectra[0].gap_ratio >= 1.0 - tol::crossing) out.push_back({g[0], g[0]});
  return out;
}

/// Grid intervals bracketing a lambda_1 / lambda_2 level crossing.
inline std::vector<GridBracket> level_crossing_scan(const ModelFamily &family, const std::vector<double> &g_grid) {
  if (g_grid.size() < 2) throw GridError("level_crossing_scan: need at least two grid points");
  for (std::size_t i = 1; i < g_grid.size(); ++i) {
    if (!(g_grid[i] > g_grid[i - 1])) throw GridError("level_crossing_scan: grid must be strictly increasing");
  }
  std::vector<TransferSpectrum> spectra;
  spectra.reserve(g_grid.size());
  for (double g : g_grid) spectra.push_back(transfer_spectrum(family.at(g)));
  return crossing_intervals(g_grid, spectra);
}

} // namespace mpsbell
