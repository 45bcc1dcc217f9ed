#pragma once

// Text format for user-defined families (grammar in docs/config-format.md):
//
//   # comment
//   name: xyz
//   d: 2
//   D: 2
//   domain: -2 2
//   matrix:
//     1, g
//     1, 1
//   matrix:
//     1, -g
//     -1, 1

#include "mpsbell/errors.hpp"
#include "mpsbell/expr.hpp"
#include "mpsbell/model_family.hpp"
#include "mpsbell/mps.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mpsbell {

struct ConfigEntry {
  std::string text;
  std::size_t line = 0;
};

struct ModelConfig {
  std::string name;
  int d = 0;
  int D = 0;
  /// matrices[i][row][col].
  std::vector<std::vector<std::vector<ConfigEntry>>> matrices;
  std::optional<Interval> domain;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline int parse_positive_int(const std::string &value, std::size_t line, const std::string &key) {
  int out = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size() || out < 1) {
    throw ConfigError(line, key + " must be a positive integer, got '" + value + "'");
  }
  return out;
}

inline double parse_real(const std::string &value, std::size_t line, const std::string &key) {
  double out = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw ConfigError(line, key + " expects a real number, got '" + value + "'");
  }
  return out;
}

} // namespace detail

/// Schema-level parse; expressions are kept as text.
inline ModelConfig parse_model_config(const std::string &contents) {
  ModelConfig cfg;
  std::optional<std::size_t> name_line, d_line, bond_line;
  std::istringstream in(contents);
  std::string raw;
  std::size_t line_no = 0;
  // Inside a "matrix:" block.
  bool in_matrix = false;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;

    const std::size_t colon = line.find(':');
    const bool is_key = colon != std::string::npos;
    if (!is_key) {
      if (!in_matrix) throw ConfigError(line_no, "expected 'key: value', got '" + line + "'");
      if (!bond_line) throw ConfigError(line_no, "D must be declared before the first matrix");
      auto &rows = cfg.matrices.back();
      if (static_cast<int>(rows.size()) == cfg.D) {
        throw ConfigError(line_no, "matrix " + std::to_string(cfg.matrices.size()) + " has more than D = " +
                                       std::to_string(cfg.D) + " rows");
      }
      std::vector<ConfigEntry> row;
      std::size_t start = 0;
      for (;;) {
        const std::size_t comma = line.find(',', start);
        const std::string entry = detail::trim(std::string_view(line).substr(start, comma - start));
        if (entry.empty()) throw ConfigError(line_no, "empty matrix entry");
        row.push_back({entry, line_no});
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (static_cast<int>(row.size()) != cfg.D) {
        throw ConfigError(line_no, "row has " + std::to_string(row.size()) + " entries, expected D = " + std::to_string(cfg.D));
      }
      rows.push_back(std::move(row));
      continue;
    }

    if (in_matrix && static_cast<int>(cfg.matrices.back().size()) != cfg.D) {
      throw ConfigError(line_no, "matrix " + std::to_string(cfg.matrices.size()) + " has " +
                                     std::to_string(cfg.matrices.back().size()) + " rows, expected D = " +
                                     std::to_string(cfg.D));
    }
    in_matrix = false;
    const std::string key = detail::trim(std::string_view(line).substr(0, colon));
    const std::string value = detail::trim(std::string_view(line).substr(colon + 1));
    if (key == "name") {
      if (name_line) throw ConfigError(line_no, "duplicate key 'name'");
      if (value.empty()) throw ConfigError(line_no, "name must not be empty");
      cfg.name = value;
      name_line = line_no;
    } else if (key == "d") {
      if (d_line) throw ConfigError(line_no, "duplicate key 'd'");
      cfg.d = detail::parse_positive_int(value, line_no, "d");
      if (cfg.d < 2) throw ConfigError(line_no, "d must be >= 2");
      d_line = line_no;
    } else if (key == "D") {
      if (bond_line) throw ConfigError(line_no, "duplicate key 'D'");
      cfg.D = detail::parse_positive_int(value, line_no, "D");
      bond_line = line_no;
    } else if (key == "domain") {
      if (cfg.domain) throw ConfigError(line_no, "duplicate key 'domain'");
      std::istringstream parts(value);
      std::string lo, hi, extra;
      if (!(parts >> lo >> hi) || (parts >> extra)) throw ConfigError(line_no, "domain expects two numbers 'lo hi'");
      const Interval domain{detail::parse_real(lo, line_no, "domain"), detail::parse_real(hi, line_no, "domain")};
      if (!(domain.lo < domain.hi)) throw ConfigError(line_no, "domain needs lo < hi");
      cfg.domain = domain;
    } else if (key == "matrix") {
      if (!value.empty()) throw ConfigError(line_no, "'matrix:' takes no value; rows follow on their own lines");
      cfg.matrices.emplace_back();
      in_matrix = true;
    } else {
      throw ConfigError(line_no, "unknown key '" + key + "'");
    }
  }
  if (in_matrix && static_cast<int>(cfg.matrices.back().size()) != cfg.D) {
    throw ConfigError(line_no, "matrix " + std::to_string(cfg.matrices.size()) + " has " +
                                   std::to_string(cfg.matrices.back().size()) + " rows, expected D = " +
                                   std::to_string(cfg.D));
  }
  if (!name_line) throw ConfigError(0, "missing key 'name'");
  if (!d_line) throw ConfigError(0, "missing key 'd'");
  if (!bond_line) throw ConfigError(0, "missing key 'D'");
  if (static_cast<int>(cfg.matrices.size()) != cfg.d) {
    throw ConfigError(*d_line, "d = " + std::to_string(cfg.d) + " but " + std::to_string(cfg.matrices.size()) +
                                   " matrices are given");
  }
  return cfg;
}

/// Probe point used to validate a loaded family: lo + 0.381966 (hi - lo).
inline double probe_point(const Interval &domain) { return domain.lo + 0.381966 * (domain.hi - domain.lo); }

/// Compile a parsed config into a family and validate it at the probe point.
inline ModelFamily build_model_family(const ModelConfig &cfg) {
  struct Compiled {
    Expr expr;
    std::size_t line;
  };
  auto compiled = std::make_shared<std::vector<Compiled>>();
  for (const auto &matrix : cfg.matrices) {
    for (const auto &row : matrix) {
      for (const auto &entry : row) {
        try {
          compiled->push_back({parse_expr(entry.text), entry.line});
        } catch (const ParseError &e) {
          throw ConfigError(entry.line, "entry '" + entry.text + "': " + e.what());
        }
      }
    }
  }

  ModelFamily family;
  family.name = cfg.name;
  family.d = cfg.d;
  family.D = cfg.D;
  family.kind = FamilyKind::custom;
  family.domain = cfg.domain.value_or(Interval{});
  const int d = cfg.d, bond = cfg.D;
  family.matrix_fn = [compiled, d, bond](double g) {
    std::vector<ComplexMatrix> matrices;
    matrices.reserve(static_cast<std::size_t>(d));
    std::size_t k = 0;
    for (int i = 0; i < d; ++i) {
      ComplexMatrix m(bond, bond);
      for (int r = 0; r < bond; ++r) {
        for (int c = 0; c < bond; ++c) {
          const auto &entry = (*compiled)[k++];
          try {
            m(r, c) = eval_expr(entry.expr, g);
          } catch (const EvalError &e) {
            throw ConfigError(entry.line, e.what());
          }
        }
      }
      matrices.push_back(std::move(m));
    }
    return MPSModel(std::move(matrices));
  };

  const double probe = probe_point(family.domain);
  try {
    transfer_spectrum(family.at(probe));
  } catch (const ConfigError &) {
    throw;
  } catch (const Error &e) {
    throw ConfigError(0, "model is invalid at probe point g = " + std::to_string(probe) + ": " + e.what());
  }
  return family;
}

inline ModelFamily load_model_config(const std::string &contents) { return build_model_family(parse_model_config(contents)); }

inline std::string read_text_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot read '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline ModelFamily load_model_config_file(const std::string &path) { return load_model_config(read_text_file(path)); }

} // namespace mpsbell
