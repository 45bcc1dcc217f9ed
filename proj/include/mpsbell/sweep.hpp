#pragma once

// Parameter sweeps, kink detection in measure curves, and classification of
// kinks as level crossings (PHYSICAL) or artifacts of a max() in the measure
// definition (MATHEMATICAL).

#include "mpsbell/correlations.hpp"
#include "mpsbell/errors.hpp"
#include "mpsbell/model_family.hpp"
#include "mpsbell/mps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace mpsbell {

enum class Measure { bcf, concurrence, discord, xi };

inline std::string to_string(Measure m) {
  switch (m) {
  case Measure::bcf: return "bcf";
  case Measure::concurrence: return "concurrence";
  case Measure::discord: return "discord";
  case Measure::xi: return "xi";
  }
  return "bcf";
}

struct MeasureSet {
  bool bcf = true;
  bool concurrence = true;
  bool discord = true;
  bool xi = true;

  static MeasureSet none() { return {false, false, false, false}; }

  /// Comma-separated subset of bcf, concurrence, discord, xi.
  static MeasureSet parse(const std::string &text) {
    MeasureSet out = none();
    std::size_t start = 0;
    bool any = false;
    while (start <= text.size()) {
      const std::size_t comma = std::min(text.find(',', start), text.size());
      const std::string item = text.substr(start, comma - start);
      if (item == "bcf") out.bcf = true;
      else if (item == "concurrence") out.concurrence = true;
      else if (item == "discord") out.discord = true;
      else if (item == "xi") out.xi = true;
      else throw GridError("unknown measure '" + item + "' (expected bcf, concurrence, discord or xi)");
      any = true;
      start = comma + 1;
    }
    if (!any) throw GridError("empty measure list");
    return out;
  }

  [[nodiscard]] bool contains(Measure m) const {
    switch (m) {
    case Measure::bcf: return bcf;
    case Measure::concurrence: return concurrence;
    case Measure::discord: return discord;
    case Measure::xi: return xi;
    }
    return false;
  }

  [[nodiscard]] std::vector<Measure> list() const {
    std::vector<Measure> out;
    for (Measure m : {Measure::bcf, Measure::concurrence, Measure::discord, Measure::xi}) {
      if (contains(m)) out.push_back(m);
    }
    return out;
  }
};

/// Pair distance meaning "the two qubits of a single d = 4 site" (ladder rung).
inline constexpr int kRung = 0;

struct SweepSpec {
  ModelFamily family;
  std::vector<double> g_values;
  /// Pair distance, or kRung.
  int r = 1;
  MeasureSet measures;
  ChainLength limit = ChainLength::infinite();
  /// 0: MPSBELL_THREADS, else hardware concurrency.
  unsigned threads = 0;
  DiscordOptions discord_options;
};

struct SweepRow {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  double g = nan;
  double bcf = nan;
  double concurrence = nan;
  double discord = nan;
  double mutual_information = nan;
  double classical_correlation = nan;
  double xi = nan;
  double lambda1_abs = nan;
  double lambda2_abs = nan;
  double gap_ratio = nan;
  /// "ok", "degenerate_fallback" or "error: <message>".
  std::string status = "ok";

  [[nodiscard]] bool failed() const { return status.rfind("error", 0) == 0; }
  [[nodiscard]] double value(Measure m) const {
    switch (m) {
    case Measure::bcf: return bcf;
    case Measure::concurrence: return concurrence;
    case Measure::discord: return discord;
    case Measure::xi: return xi;
    }
    return nan;
  }
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;

  [[nodiscard]] std::vector<double> g() const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto &row : rows) out.push_back(row.g);
    return out;
  }
  [[nodiscard]] std::vector<double> series(Measure m) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto &row : rows) out.push_back(row.value(m));
    return out;
  }
};

/// Two-qubit state of the family at g: the rung (r = kRung, d = 4) or sites i, i + r (d = 2).
/// Falls back to a kFallbackSites ring when the thermodynamic limit is degenerate.
struct PairState {
  ComplexMatrix rho;
  TransferSpectrum spectrum;
  bool fallback = false;
};

inline void check_pair_request(const ModelFamily &family, int r) {
  if (r == kRung) {
    if (family.d != 4) throw InvalidModel("rung state needs d = 4, model '" + family.name + "' has d = " + std::to_string(family.d));
  } else if (r < 0) {
    throw InvalidModel("pair distance must be >= 1");
  } else if (family.d != 2) {
    throw InvalidModel("two-site state needs d = 2, model '" + family.name + "' has d = " + std::to_string(family.d));
  }
}

inline PairState pair_state(const ModelFamily &family, double g, int r, ChainLength limit) {
  check_pair_request(family, r);
  const MPSModel model = family.at(g);
  PairState out{ComplexMatrix(), transfer_spectrum(model), false};
  if (limit.is_infinite() && out.spectrum.degenerate) {
    limit = ChainLength::finite(kFallbackSites);
    out.fallback = true;
  }
  out.rho = r == kRung ? rdm_adjacent(model, out.spectrum, 1, limit) : rdm_pair(model, out.spectrum, r, limit);
  return out;
}

/// One sweep row; exceptions become the row's status.
inline SweepRow evaluate_point(const ModelFamily &family, double g, int r, const MeasureSet &measures, ChainLength limit,
                               const DiscordOptions &options = {}) {
  SweepRow row;
  row.g = g;
  try {
    const PairState ps = pair_state(family, g, r, limit);
    row.lambda1_abs = ps.spectrum.lambda1_abs();
    row.lambda2_abs = ps.spectrum.lambda2_abs();
    row.gap_ratio = ps.spectrum.gap_ratio;
    if (measures.xi) row.xi = correlation_length(ps.spectrum);
    const TwoQubitState state(ps.rho);
    if (measures.bcf) row.bcf = bcf(state);
    if (measures.concurrence) row.concurrence = concurrence(state);
    if (measures.discord) {
      const auto parts = detail::discord_parts(state, options);
      row.discord = parts.discord;
      row.mutual_information = parts.mutual_information;
      row.classical_correlation = parts.classical_correlation;
    }
    if (ps.fallback) row.status = "degenerate_fallback";
  } catch (const Error &e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

/// MPSBELL_THREADS if set to a positive integer, else the hardware concurrency.
inline unsigned default_thread_count() {
  if (const char *env = std::getenv("MPSBELL_THREADS")) {
    char *end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<unsigned>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline void validate_grid(const std::vector<double> &g, std::size_t min_points) {
  if (g.size() < min_points) {
    throw GridError("grid needs at least " + std::to_string(min_points) + " points, got " + std::to_string(g.size()));
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i])) throw GridError("grid contains a non-finite value");
    if (i > 0 && !(g[i] > g[i - 1])) throw GridError("grid must be strictly increasing");
  }
}

inline SweepResult run_sweep(const SweepSpec &spec) {
  validate_grid(spec.g_values, 3);
  check_pair_request(spec.family, spec.r);
  SweepResult result{spec, std::vector<SweepRow>(spec.g_values.size())};

  const std::size_t n = spec.g_values.size();
  const auto workers = static_cast<unsigned>(std::min<std::size_t>(spec.threads ? spec.threads : default_thread_count(), n));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      result.rows[i] = evaluate_point(spec.family, spec.g_values[i], spec.r, spec.measures, spec.limit, spec.discord_options);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto &t : pool) t.join();
  }
  return result;
}

/// lo, lo + step, ... up to hi (inclusive within roundoff). Values within
/// 1e-9 step of zero are snapped to 0 so crossings at g = 0 land on the grid.
inline std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw GridError("grid step must be positive");
  if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) throw GridError("grid range must satisfy min <= max");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double g = lo + static_cast<double>(i) * step;
    if (std::abs(g) < 1e-9 * step) g = 0.0;
    out[i] = g;
  }
  return out;
}

namespace detail {

inline double grid_step(const std::vector<double> &g) {
  const double step = (g.back() - g.front()) / static_cast<double>(g.size() - 1);
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (std::abs((g[i] - g[i - 1]) - step) > 1e-6 * step) throw GridError("grid is not uniform");
  }
  return step;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

inline void push_merged(std::vector<GridBracket> &out, GridBracket b) {
  if (!out.empty() && out.back().hi >= b.lo) {
    out.back().hi = std::max(out.back().hi, b.hi);
  } else {
    out.push_back(b);
  }
}

} // namespace detail

/// Brackets [g_{i-1}, g_{i+1}] around first-derivative discontinuities.
///
/// The second difference at i is compared with the median second difference of
/// the surrounding +-5 points (i and its direct neighbours excluded, since a
/// kink between two grid points shows up in both). Points whose ratio exceeds
/// sensitivity are flagged, provided the second difference also clears
/// max(1e-7 * series scale, 1e-8). An infinite value between finite neighbours is flagged
/// as well. NaN stencils are skipped.
inline std::vector<GridBracket> detect_kinks(const std::vector<double> &g, const std::vector<double> &y,
                                             double sensitivity = 10.0) {
  if (g.size() != y.size()) throw GridError("detect_kinks: grid and series differ in length");
  validate_grid(g, 5);
  detail::grid_step(g);
  const std::size_t n = g.size();

  double scale = 0.0;
  for (double v : y) {
    if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
  }
  // Measures carry ~1e-10 absolute error, so smaller second differences are noise.
  const double significance = std::max(1e-7 * scale, 1e-8);

  std::vector<double> second(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (std::isfinite(y[i - 1]) && std::isfinite(y[i]) && std::isfinite(y[i + 1])) {
      second[i] = std::abs(y[i + 1] - 2.0 * y[i] + y[i - 1]);
    }
  }

  constexpr std::size_t window = 5;
  std::vector<GridBracket> out;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (std::isinf(y[i]) && std::isfinite(y[i - 1]) && std::isfinite(y[i + 1])) {
      detail::push_merged(out, {g[i - 1], g[i + 1]});
      continue;
    }
    if (!std::isfinite(second[i]) || second[i] <= significance) continue;
    std::vector<double> background;
    double first_scale = 0.0;
    std::size_t first_count = 0;
    const std::size_t lo = i > window ? i - window : 1;
    const std::size_t hi = std::min(i + window, n - 2);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j + 1 >= i && j <= i + 1) continue;
      if (std::isfinite(second[j])) background.push_back(second[j]);
    }
    for (std::size_t j = lo; j < hi + 1 && j < n - 1; ++j) {
      if (std::isfinite(y[j]) && std::isfinite(y[j + 1])) {
        first_scale += std::abs(y[j + 1] - y[j]);
        ++first_count;
      }
    }
    if (first_count) first_scale /= static_cast<double>(first_count);
    const double denominator =
        detail::median(background) + 1e-8 * first_scale + std::numeric_limits<double>::min();
    if (second[i] / denominator > sensitivity) detail::push_merged(out, {g[i - 1], g[i + 1]});
  }
  return out;
}

enum class SingularityKind { physical, mathematical };

inline std::string to_string(SingularityKind k) { return k == SingularityKind::physical ? "PHYSICAL" : "MATHEMATICAL"; }

struct SingularityReport {
  GridBracket bracket;
  std::vector<Measure> affected_measures;
  SingularityKind kind = SingularityKind::mathematical;
  /// Largest gap_ratio seen in the refined scan around the bracket.
  double max_gap_ratio = 0.0;
  /// Level-crossing intervals found by that scan.
  std::vector<GridBracket> crossings;
};

/// Scans 33 points across the bracket widened by its own width on each side.
inline SingularityReport classify_singularity(const GridBracket &bracket, const ModelFamily &family) {
  const double width = std::max(bracket.width(), 1e-9 * std::max(1.0, std::abs(bracket.centre())));
  const GridBracket widened{bracket.lo - width, bracket.hi + width};
  constexpr int points = 33;
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k) grid[static_cast<std::size_t>(k)] = widened.lo + widened.width() * k / (points - 1);
  std::vector<TransferSpectrum> spectra;
  spectra.reserve(points);
  for (double g : grid) spectra.push_back(transfer_spectrum(family.at(g)));

  SingularityReport out;
  out.bracket = bracket;
  for (const auto &s : spectra) out.max_gap_ratio = std::max(out.max_gap_ratio, s.gap_ratio);
  out.crossings = crossing_intervals(grid, spectra);
  for (const auto &c : out.crossings) {
    if (c.overlaps(widened)) out.kind = SingularityKind::physical;
  }
  return out;
}

/// Abscissae where the series crosses level, by linear interpolation. A run of
/// points sitting on the level (within 1e-9) counts once, at its midpoint, if
/// the series changes side across it.
inline std::vector<double> threshold_crossing(const std::vector<double> &g, const std::vector<double> &y,
                                              double level = 2.0) {
  if (g.size() != y.size()) throw GridError("threshold_crossing: grid and series differ in length");
  if (g.size() < 2) return {};
  detail::grid_step(g);
  constexpr double on_level = 1e-9;
  auto side = [&](double v) {
    if (!std::isfinite(v)) return 2;
    if (std::abs(v - level) <= on_level) return 0;
    return v > level ? 1 : -1;
  };

  std::vector<double> out;
  std::size_t i = 0;
  const std::size_t n = g.size();
  while (i < n && side(y[i]) == 0) ++i;
  while (i < n) {
    const int s = side(y[i]);
    std::size_t j = i + 1;
    while (j < n && side(y[j]) == 0) ++j;
    if (j >= n) break;
    const int t = side(y[j]);
    if (s != 2 && t != 2 && s != t) {
      if (j == i + 1) {
        out.push_back(g[i] + (level - y[i]) * (g[j] - g[i]) / (y[j] - y[i]));
      } else {
        out.push_back(0.5 * (g[i + 1] + g[j - 1]));
      }
    }
    i = j;
  }
  return out;
}

/// Kinks of every requested measure, grouped by overlapping brackets and classified.
inline std::vector<SingularityReport> find_singularities(const SweepResult &result, double sensitivity = 10.0) {
  const std::vector<double> g = result.g();
  struct Tagged {
    GridBracket bracket;
    Measure measure;
  };
  std::vector<Tagged> all;
  for (Measure m : result.spec.measures.list()) {
    for (const auto &b : detect_kinks(g, result.series(m), sensitivity)) all.push_back({b, m});
  }
  std::sort(all.begin(), all.end(), [](const Tagged &a, const Tagged &b) { return a.bracket.lo < b.bracket.lo; });

  std::vector<SingularityReport> out;
  for (const auto &t : all) {
    if (!out.empty() && out.back().bracket.overlaps(t.bracket)) {
      auto &last = out.back();
      last.bracket.lo = std::min(last.bracket.lo, t.bracket.lo);
      last.bracket.hi = std::max(last.bracket.hi, t.bracket.hi);
      if (std::find(last.affected_measures.begin(), last.affected_measures.end(), t.measure) ==
          last.affected_measures.end()) {
        last.affected_measures.push_back(t.measure);
      }
    } else {
      SingularityReport r;
      r.bracket = t.bracket;
      r.affected_measures.push_back(t.measure);
      out.push_back(r);
    }
  }
  for (auto &r : out) {
    auto measures = r.affected_measures;
    r = classify_singularity(r.bracket, result.spec.family);
    r.affected_measures = std::move(measures);
  }
  return out;
}

} // namespace mpsbell
