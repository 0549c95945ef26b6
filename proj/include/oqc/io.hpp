// Copyright 2026 The oqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Structured-text (JSON) and CSV conventions shared by the CLI.
//
// Matrices are row-major lists of [re, im] pairs, either flat (N^2 pairs) or nested by row.
// Exact (kraus-search) entries use the same layout; each component is an integer, a rational
// string "p/q", or {"a": "p/q", "b": "r/s"} meaning a + b sqrt(d) for the alphabet's declared d.

#include "oqc/core.hpp"
#include "oqc/exact.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace oqc::io {

using json = nlohmann::json;

/// Input document violates its schema; `path` names the offending field ("model.energies[2]").
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::invalid_argument(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Shortest round-trip form: 17 significant digits.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path.empty() ? key : path + "." + key, "required field is missing");
  return *it;
}

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

inline double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

inline double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_number(*it, join(path, key));
}

inline long integer_or(const json& obj, const std::string& key, long fallback, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  return it->get<long>();
}

inline bool bool_or(const json& obj, const std::string& key, bool fallback, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError(join(path, key), "expected a boolean");
  return it->get<bool>();
}

inline std::string string_or(const json& obj, const std::string& key, const std::string& fallback,
                             const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) throw ConfigError(join(path, key), "expected a string");
  return it->get<std::string>();
}

namespace detail {

// Flattens flat or nested layouts into a list of entries plus the inferred dimension.
inline std::vector<const json*> matrix_entries(const json& v, const std::string& path, Index& dim) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a nonempty matrix");
  std::vector<const json*> entries;
  const bool nested = v[0].is_array() && !v[0].empty() && v[0][0].is_array();
  if (nested) {
    dim = static_cast<Index>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_array() || static_cast<Index>(v[i].size()) != dim)
        throw ConfigError(path + "[" + std::to_string(i) + "]", "row length does not match matrix dimension");
      for (const auto& e : v[i]) entries.push_back(&e);
    }
  } else {
    const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (n * n != static_cast<Index>(v.size())) throw ConfigError(path, "flat matrix length is not a square");
    dim = n;
    for (const auto& e : v) entries.push_back(&e);
  }
  for (std::size_t k = 0; k < entries.size(); ++k)
    if (!entries[k]->is_array() || entries[k]->size() != 2)
      throw ConfigError(path + "[" + std::to_string(k) + "]", "entry must be an [re, im] pair");
  return entries;
}

}  // namespace detail

inline CMatrix parse_matrix(const json& v, const std::string& path) {
  Index n = 0;
  const auto entries = detail::matrix_entries(v, path, n);
  CMatrix m(n, n);
  for (Index k = 0; k < n * n; ++k) {
    const json& e = *entries[static_cast<std::size_t>(k)];
    const std::string p = path + "[" + std::to_string(k) + "]";
    m(k / n, k % n) = cplx(as_number(e[0], p + "[0]"), as_number(e[1], p + "[1]"));
  }
  return m;
}

/// Square real matrix given as nested rows of numbers.
inline RMatrix parse_real_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a nonempty matrix");
  const auto n = static_cast<Index>(v.size());
  RMatrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != n) throw ConfigError(p, "row length does not match");
    for (Index j = 0; j < n; ++j) m(i, j) = as_number(row[static_cast<std::size_t>(j)], p + "[" + std::to_string(j) + "]");
  }
  return m;
}

inline RVector parse_vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a nonempty list of numbers");
  RVector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = as_number(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

inline exact::Rational parse_exact_rational(const json& v, const std::string& path) {
  if (v.is_number_integer()) return exact::Rational(v.get<long long>());
  if (v.is_string()) {
    try {
      return exact::parse_rational(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path, e.what());
    }
  }
  throw ConfigError(path, "exact entries must be integers or \"p/q\" strings");
}

inline exact::QuadraticNumber parse_exact_component(const json& v, int root, const std::string& path) {
  if (v.is_object()) {
    if (root < 2) throw ConfigError(path, "a + b sqrt(d) entries need a declared \"sqrt\" >= 2");
    return {parse_exact_rational(require(v, "a", path), join(path, "a")),
            parse_exact_rational(require(v, "b", path), join(path, "b")), root};
  }
  return parse_exact_rational(v, path);
}

inline exact::Matrix parse_exact_matrix(const json& v, int root, const std::string& path) {
  Index n = 0;
  const auto entries = detail::matrix_entries(v, path, n);
  exact::Matrix m(n, n);
  for (Index k = 0; k < n * n; ++k) {
    const json& e = *entries[static_cast<std::size_t>(k)];
    const std::string p = path + "[" + std::to_string(k) + "]";
    m(k / n, k % n) = exact::Complex{parse_exact_component(e[0], root, p + "[0]"), parse_exact_component(e[1], root, p + "[1]")};
  }
  return m;
}

/// Flat row-major list of [re, im] pairs; numbers keep 17 significant digits via the serializer.
inline json matrix_to_json(const CMatrix& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
  return out;
}

inline json exact_matrix_to_json(const exact::Matrix& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out.push_back(json::array({m(i, j).re.str(), m(i, j).im.str()}));
  return out;
}

/// Minimal CSV builder with fixed 17-digit number formatting.
class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }
  Csv& row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt(values[i]);
    out_ << "\n";
    return *this;
  }
  Csv& raw(const std::string& line) {
    out_ << line << "\n";
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

/// FNV-1a 64-bit digest, hex encoded.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace oqc::io
