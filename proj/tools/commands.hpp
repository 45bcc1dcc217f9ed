#pragma once

// Subcommands of the mpsbell tool. run_cli() is the whole program; main() only
// forwards to it so tests can drive the CLI in-process.

#include "mpsbell/mpsbell.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mpsbell::cli {

enum ExitCode : int { kOk = 0, kBadArgs = 2, kModelError = 3 };

/// Raised for invalid flag combinations found after CLI11 parsing.
class UsageError : public Error {
public:
  using Error::Error;
};

struct Options {
  std::string model;
  std::string config;
  double a = 1.0;
  std::optional<double> g;
  std::string range;
  std::optional<int> r;
  std::optional<int> k;
  std::string measures = "bcf,concurrence,discord,xi";
  /// Empty: thermodynamic limit with finite-ring fallback at crossings.
  /// "inf": strict thermodynamic limit. Otherwise a ring size.
  std::string n_sites;
  std::string output;
  std::string format = "text";
  bool closed_form = false;
};

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

struct Range {
  double lo, hi, step;
};

inline Range parse_range(const std::string &text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 3) throw UsageError("--range must be min:max:step, got '" + text + "'");
  double v[3];
  for (int i = 0; i < 3; ++i) {
    const std::string &p = parts[static_cast<std::size_t>(i)];
    char *end = nullptr;
    v[i] = std::strtod(p.c_str(), &end);
    if (p.empty() || end != p.c_str() + p.size() || !std::isfinite(v[i])) {
      throw UsageError("--range component '" + p + "' is not a number");
    }
  }
  if (!(v[2] > 0.0)) throw UsageError("--range step must be > 0");
  if (v[1] < v[0]) throw UsageError("--range needs min <= max");
  return {v[0], v[1], v[2]};
}

struct Limit {
  ChainLength length = ChainLength::infinite();
  /// Thermodynamic limit requested explicitly: no finite-ring fallback.
  bool strict = false;
};

inline Limit parse_limit(const std::string &text) {
  if (text.empty()) return {};
  if (text == "inf" || text == "infinite") return {ChainLength::infinite(), true};
  char *end = nullptr;
  const long long n = std::strtoll(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size() || n < 2) throw UsageError("--n-sites must be an integer >= 2 or 'inf'");
  return {ChainLength::finite(n), true};
}

inline ModelFamily resolve_family(const Options &o) {
  if (!o.model.empty() && !o.config.empty()) throw UsageError("give either --model or --config, not both");
  if (!o.config.empty()) return load_model_config_file(o.config);
  if (o.model.empty()) throw UsageError("one of --model or --config is required");
  if (o.model != "ladder" && o.model != "xyz" && o.model != "three_body") {
    throw UsageError("unknown model '" + o.model + "' (expected ladder, xyz or three_body)");
  }
  if (o.model == "ladder" && o.a == 0.0) throw UsageError("--a must be nonzero");
  return builtin_family(o.model, o.a);
}

/// Pair distance for two-qubit measures: the rung for d = 4, else --r (default 1).
inline int resolve_pair(const ModelFamily &family, const Options &o) {
  if (family.d == 4) {
    if (o.r) throw UsageError("model '" + family.name + "' has one two-qubit state per site; drop --r");
    return kRung;
  }
  if (family.d != 2) throw UsageError("two-qubit measures need d = 2 or d = 4, model has d = " + std::to_string(family.d));
  const int r = o.r.value_or(1);
  if (r < 1) throw UsageError("--r must be >= 1");
  return r;
}

inline bool is_ladder_axis(const ModelFamily &family) { return family.kind == FamilyKind::ladder; }

inline std::ostream &open_output(const Options &o, std::ofstream &file, std::ostream &out) {
  if (o.output.empty()) return out;
  file.open(o.output, std::ios::binary);
  if (!file) throw UsageError("cannot write '" + o.output + "'");
  return file;
}

inline int cmd_sweep(const Options &o, std::ostream &out, std::ostream &err) {
  if (o.range.empty()) throw UsageError("sweep needs --range min:max:step");
  const ModelFamily family = resolve_family(o);
  const Range range = parse_range(o.range);
  const Limit limit = parse_limit(o.n_sites);
  const bool ladder = is_ladder_axis(family);

  SweepSpec spec;
  spec.family = family;
  spec.r = resolve_pair(family, o);
  spec.measures = MeasureSet::parse(o.measures);
  spec.limit = limit.length;
  const std::vector<double> axis = make_grid(range.lo, range.hi, range.step);
  for (double v : axis) spec.g_values.push_back(ladder ? ladder_g(v, family.ladder_a) : v);
  SweepResult result = run_sweep(spec);
  if (limit.strict && limit.length.is_infinite()) {
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      if (result.rows[i].status == "degenerate_fallback") {
        result.rows[i] = SweepRow{};
        result.rows[i].g = spec.g_values[i];
        result.rows[i].status = "error: thermodynamic limit undefined at a level crossing";
      }
    }
  }

  std::ofstream file;
  std::ostream &csv = open_output(o, file, out);
  std::ostream &summary = o.output.empty() ? err : out;
  csv << "g,B,C,D,xi,lambda1_abs,lambda2_abs,gap_ratio,status" << (ladder ? ",x" : "") << "\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const SweepRow &row = result.rows[i];
    csv << fmt(row.g) << ',' << fmt(row.bcf) << ',' << fmt(row.concurrence) << ',' << fmt(row.discord) << ','
        << fmt(row.xi) << ',' << fmt(row.lambda1_abs) << ',' << fmt(row.lambda2_abs) << ',' << fmt(row.gap_ratio) << ','
        << csv_field(row.status);
    if (ladder) csv << ',' << fmt(axis[i]);
    csv << '\n';
  }
  csv.flush();

  std::size_t failed = 0, fallback = 0;
  for (const auto &row : result.rows) {
    failed += row.failed();
    fallback += row.status == "degenerate_fallback";
  }
  const double a2 = 2.0 * family.ladder_a * family.ladder_a;
  auto axis_of = [&](double g) { return ladder ? g / a2 : g; };
  const char *name = ladder ? "x" : "g";
  summary << "rows: " << result.rows.size() << " (failed " << failed << ", degenerate_fallback " << fallback << ")\n";
  const auto singularities = result.rows.size() >= 5 ? find_singularities(result) : std::vector<SingularityReport>{};
  for (const auto &s : singularities) {
    summary << "singularity " << name << " in [" << fmt(axis_of(s.bracket.lo)) << ", " << fmt(axis_of(s.bracket.hi))
            << "] " << to_string(s.kind) << " measures=";
    for (std::size_t m = 0; m < s.affected_measures.size(); ++m) summary << (m ? "," : "") << to_string(s.affected_measures[m]);
    summary << " max_gap_ratio=" << fmt(s.max_gap_ratio) << "\n";
  }
  if (spec.measures.bcf) {
    std::vector<double> x(axis.begin(), axis.end());
    for (double c : threshold_crossing(x, result.series(Measure::bcf), 2.0)) {
      summary << "bcf crosses 2 at " << name << " = " << fmt(c) << "\n";
    }
  }
  return kOk;
}

inline int cmd_point(const Options &o, std::ostream &out, std::ostream &err) {
  if (!o.g) throw UsageError("point needs --g");
  const ModelFamily family = resolve_family(o);
  const int r = resolve_pair(family, o);
  const Limit limit = parse_limit(o.n_sites);
  SweepRow row = evaluate_point(family, *o.g, r, MeasureSet{}, limit.length);
  if (limit.strict && row.status == "degenerate_fallback") {
    err << "error: thermodynamic limit undefined at a level crossing (g = " << fmt(*o.g) << "); pass --n-sites N\n";
    return kModelError;
  }
  if (row.failed()) {
    err << row.status << "\n";
    return kModelError;
  }
  const bool nonlocal = row.bcf > 2.0 + measure_tol::bell_violation;
  const bool entangled = row.concurrence > measure_tol::entangled;
  const bool discordant = row.discord > measure_tol::discordant;
  auto flag = [](bool b) { return b ? "true" : "false"; };
  if (o.format == "csv") {
    out << "g,B,C,D,I,J,xi,lambda1_abs,lambda2_abs,gap_ratio,nonlocal,entangled,discordant,status\n";
    out << fmt(row.g) << ',' << fmt(row.bcf) << ',' << fmt(row.concurrence) << ',' << fmt(row.discord) << ','
        << fmt(row.mutual_information) << ',' << fmt(row.classical_correlation) << ',' << fmt(row.xi) << ','
        << fmt(row.lambda1_abs) << ',' << fmt(row.lambda2_abs) << ',' << fmt(row.gap_ratio) << ',' << flag(nonlocal)
        << ',' << flag(entangled) << ',' << flag(discordant) << ',' << csv_field(row.status) << '\n';
    return kOk;
  }
  out << "model: " << family.name << "\n";
  out << "g: " << fmt(row.g) << "\n";
  if (is_ladder_axis(family)) out << "x: " << fmt(ladder_x(row.g, family.ladder_a)) << "\n";
  out << "pair: " << (r == kRung ? std::string("rung") : "r = " + std::to_string(r)) << "\n";
  out << "B: " << fmt(row.bcf) << "\n";
  out << "C: " << fmt(row.concurrence) << "\n";
  out << "D: " << fmt(row.discord) << "\n";
  out << "I: " << fmt(row.mutual_information) << "\n";
  out << "J: " << fmt(row.classical_correlation) << "\n";
  out << "xi: " << fmt(row.xi) << "\n";
  out << "lambda1_abs: " << fmt(row.lambda1_abs) << "\n";
  out << "lambda2_abs: " << fmt(row.lambda2_abs) << "\n";
  out << "gap_ratio: " << fmt(row.gap_ratio) << "\n";
  out << "nonlocal: " << flag(nonlocal) << "\n";
  out << "entangled: " << flag(entangled) << "\n";
  out << "discordant: " << flag(discordant) << "\n";
  out << "status: " << row.status << "\n";
  return kOk;
}

inline void print_matrix(std::ostream &out, const ComplexMatrix &m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? "  " : "") << fmt(m(i, j).real()) << ' ' << fmt(m(i, j).imag());
    }
    out << '\n';
  }
}

inline int cmd_rdm(const Options &o, std::ostream &out, std::ostream &err) {
  if (!o.g) throw UsageError("rdm needs --g");
  const ModelFamily family = resolve_family(o);
  const double g = *o.g;
  if (o.k && o.r) throw UsageError("give either --k or --r, not both");

  if (o.closed_form) {
    if (!family.closed_form_available()) throw UsageError("--closed-form needs a built-in model");
    if (o.k && !(family.d == 4 && *o.k == 1) && !(family.d == 2 && *o.k == 2)) {
      throw UsageError("closed forms exist for the rung (ladder) or two sites (xyz, three_body)");
    }
    const int r = family.d == 4 ? kRung : (o.k ? 1 : resolve_pair(family, o));
    if (family.d == 4 && o.r) throw UsageError("model '" + family.name + "' has one two-qubit state per site; drop --r");
    out << "# " << family.name << " g = " << fmt(g) << " closed form, entries as real imag pairs\n";
    print_matrix(out, closed_form_rdm(family, g, r).matrix());
    return kOk;
  }

  const MPSModel model = family.at(g);
  const TransferSpectrum spectrum = transfer_spectrum(model);
  Limit limit = parse_limit(o.n_sites);
  if (!limit.strict && spectrum.degenerate) {
    limit.length = ChainLength::finite(kFallbackSites);
    err << "note: level crossing at g = " << fmt(g) << ", using a ring of " << kFallbackSites << " sites\n";
  }
  ComplexMatrix rho;
  std::string what;
  if (o.k || family.d != 2) {
    const int k = o.k.value_or(1);
    if (k < 1) throw UsageError("--k must be >= 1");
    if (o.r) throw UsageError("model '" + family.name + "' has d = " + std::to_string(family.d) + "; use --k");
    rho = rdm_adjacent(model, spectrum, k, limit.length);
    what = "k = " + std::to_string(k) + " adjacent sites";
  } else {
    const int r = o.r.value_or(1);
    if (r < 1) throw UsageError("--r must be >= 1");
    rho = rdm_pair(model, spectrum, r, limit.length);
    what = "sites i, i + " + std::to_string(r);
  }
  out << "# " << family.name << " g = " << fmt(g) << " " << what << ", entries as real imag pairs\n";
  print_matrix(out, rho);
  return kOk;
}

inline int cmd_crossings(const Options &o, std::ostream &out, std::ostream &) {
  if (o.range.empty()) throw UsageError("crossings needs --range min:max:step");
  const ModelFamily family = resolve_family(o);
  const Range range = parse_range(o.range);
  const bool ladder = is_ladder_axis(family);
  const std::vector<double> axis = make_grid(range.lo, range.hi, range.step);
  if (axis.size() < 2) throw UsageError("--range must contain at least two points");
  std::vector<double> g;
  for (double v : axis) g.push_back(ladder ? ladder_g(v, family.ladder_a) : v);
  const double a2 = 2.0 * family.ladder_a * family.ladder_a;
  for (const auto &b : level_crossing_scan(family, g)) {
    out << fmt(ladder ? b.lo / a2 : b.lo) << ':' << fmt(ladder ? b.hi / a2 : b.hi) << '\n';
  }
  return kOk;
}

inline std::string physicality_diagnostic(const DensityCheck &check) {
  if (check.ok()) return "";
  std::ostringstream s;
  s << "probe rdm is unphysical:";
  if (check.hermiticity_defect > tol::physicality) s << " hermiticity defect " << fmt(check.hermiticity_defect);
  if (check.trace_error > 1e-12) s << " trace error " << fmt(check.trace_error);
  if (check.min_eigenvalue < -tol::physicality) s << " eigenvalue " << fmt(check.min_eigenvalue);
  return s.str();
}

/// k = 1 density matrix at the probe point, on a finite ring at a crossing.
inline ComplexMatrix probe_rdm(const MPSModel &model, const TransferSpectrum &spectrum) {
  ChainLength length = spectrum.degenerate ? ChainLength::finite(kFallbackSites) : ChainLength::infinite();
  return rdm_adjacent(model, spectrum, 1, length);
}

inline int cmd_validate(const Options &o, std::ostream &out, std::ostream &err) {
  if (o.config.empty()) throw UsageError("validate needs a config path");
  ModelConfig cfg;
  try {
    cfg = parse_model_config(read_text_file(o.config));
  } catch (const ConfigError &e) {
    err << o.config << ": schema: " << e.what() << "\n";
    return kModelError;
  }
  out << "schema: ok (name " << cfg.name << ", d = " << cfg.d << ", D = " << cfg.D << ")\n";
  ModelFamily family;
  try {
    family = build_model_family(cfg);
  } catch (const ConfigError &e) {
    err << o.config << ": " << e.what() << "\n";
    return kModelError;
  }
  const double probe = probe_point(family.domain);
  try {
    const MPSModel model = family.at(probe);
    const TransferSpectrum spectrum = transfer_spectrum(model);
    out << "probe: g = " << fmt(probe) << "\n";
    out << "spectrum: lambda1_abs = " << fmt(spectrum.lambda1_abs()) << ", lambda2_abs = " << fmt(spectrum.lambda2_abs())
        << ", gap_ratio = " << fmt(spectrum.gap_ratio) << ", xi = " << fmt(correlation_length(spectrum))
        << ", dominant multiplicity " << spectrum.dominant_multiplicity << (spectrum.degenerate ? ", degenerate" : "")
        << "\n";
    const ComplexMatrix rho = probe_rdm(model, spectrum);
    const std::string problem = physicality_diagnostic(check_density(rho));
    if (!problem.empty()) {
      err << o.config << ": " << problem << "\n";
      return kModelError;
    }
    out << "physicality: ok (k = 1 rdm, " << rho.rows() << "x" << rho.cols() << ")\n";
  } catch (const InvalidState &e) {
    err << o.config << ": physicality: probe g = " << fmt(probe) << ": " << e.what() << "\n";
    return kModelError;
  } catch (const Error &e) {
    err << o.config << ": probe g = " << fmt(probe) << ": " << e.what() << "\n";
    return kModelError;
  }
  out << "valid\n";
  return kOk;
}

inline int run_cli(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
  CLI::App app{"Bell-CHSH, concurrence and discord of matrix product states"};
  app.require_subcommand(1);
  Options o;
  double g_value = 0.0;
  int r_value = 1, k_value = 1;

  auto add_model = [&](CLI::App *sub) {
    sub->add_option("--model,-m", o.model, "built-in model: ladder, xyz, three_body");
    sub->add_option("--config,-c", o.config, "model config file");
    sub->add_option("--a", o.a, "ladder rung coupling (default 1)");
  };
  auto add_limit = [&](CLI::App *sub) {
    sub->add_option("--n-sites", o.n_sites, "ring size, or 'inf' for a strict thermodynamic limit");
  };

  CLI::App *sweep = app.add_subcommand("sweep", "sweep g and write CSV plus a singularity summary");
  add_model(sweep);
  add_limit(sweep);
  sweep->add_option("--range", o.range, "min:max:step (x = g/(2a^2) for the ladder)")->required();
  auto *sweep_r = sweep->add_option("--r", r_value, "pair distance (default 1)");
  sweep->add_option("--measures", o.measures, "comma list of bcf, concurrence, discord, xi");
  sweep->add_option("--output,-o", o.output, "CSV path (default stdout)");

  CLI::App *point = app.add_subcommand("point", "correlation report at one g");
  add_model(point);
  add_limit(point);
  auto *point_g = point->add_option("--g", g_value, "parameter value")->required();
  auto *point_r = point->add_option("--r", r_value, "pair distance (default 1)");
  point->add_option("--format", o.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  CLI::App *rdm = app.add_subcommand("rdm", "print a reduced density matrix");
  add_model(rdm);
  add_limit(rdm);
  auto *rdm_g = rdm->add_option("--g", g_value, "parameter value")->required();
  auto *rdm_r = rdm->add_option("--r", r_value, "pair distance");
  auto *rdm_k = rdm->add_option("--k", k_value, "number of adjacent sites");
  rdm->add_flag("--closed-form", o.closed_form, "print the closed-form state of a built-in model");

  CLI::App *crossings = app.add_subcommand("crossings", "list level-crossing brackets");
  add_model(crossings);
  crossings->add_option("--range", o.range, "min:max:step (x for the ladder)")->required();

  CLI::App *validate = app.add_subcommand("validate", "check a model config file");
  validate->add_option("config", o.config, "config path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadArgs;
  }
  if (point_g->count() || rdm_g->count()) o.g = g_value;
  if (sweep_r->count() || point_r->count() || rdm_r->count()) o.r = r_value;
  if (rdm_k->count()) o.k = k_value;

  try {
    if (sweep->parsed()) return cmd_sweep(o, out, err);
    if (point->parsed()) return cmd_point(o, out, err);
    if (rdm->parsed()) return cmd_rdm(o, out, err);
    if (crossings->parsed()) return cmd_crossings(o, out, err);
    return cmd_validate(o, out, err);
  } catch (const UsageError &e) {
    err << "error: " << e.what() << "\n";
    return kBadArgs;
  } catch (const GridError &e) {
    err << "error: " << e.what() << "\n";
    return kBadArgs;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kModelError;
  }
}

} // namespace mpsbell::cli
