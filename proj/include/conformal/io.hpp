#pragma once

// Records, polyline files (CSV, JSON, OBJ) and the on-disk inversion cache.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conformal/errors.hpp"
#include "conformal/geometry_analysis.hpp"
#include "conformal/moduli.hpp"
#include "conformal/period_map.hpp"
#include "conformal/string_synthesis.hpp"

namespace conformal {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCacheEnvVar = "CONFORMAL_STRINGS_CACHE";

/// Everything known about one string, as stored in files and printed by the CLI.
struct StringRecord {
  QuantumNumbers quantum;
  Modulus modulus;
  double a = 0.0, b = 0.0, omega = 0.0;
  double residual = 0.0;  ///< max-norm of Phi(a, b) - (-q1, q2)
  double jacobian = 0.0;
  std::optional<double> closure;
  std::optional<LinkingReport> linking;
  Int order = 0;
  Int euclidean_order = 0;
  Int clifford_order = 0;
};

/// Number formatted with 17 significant digits.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("malformed number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("malformed number '" + s + "'");
  }
}

/// Inverts q (through `cache`) and fills the record; geometry adds closure and linking numbers.
inline StringRecord make_string_record(const Modulus& q, InversionCache& cache, bool geometry,
                                       std::size_t samples_per_period = 2048, const NewtonOptions& opt = {}) {
  const auto inv = invert_cached(q, cache, opt);
  const Parameters p(inv.a, inv.b);
  const auto sym = symmetry_report(q);
  StringRecord r{quantum_from_modulus(q), q, inv.a, inv.b, inv.omega, inv.residual, phi_jacobian(p),
                 std::nullopt, std::nullopt, sym.order, sym.euclidean_order, sym.clifford_order};
  if (geometry) {
    r.closure = closure_residual(q, p);
    r.linking = linking_by_winding(sample_string(q, p, samples_per_period));
  }
  return r;
}

inline ordered_json record_to_json(const StringRecord& r) {
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["quantum"] = {{"n", r.quantum.n}, {"l1", r.quantum.l1}, {"l2", r.quantum.l2}};
  j["modulus"] = {{"q1", r.modulus.q1().str()}, {"q2", r.modulus.q2().str()}};
  j["params"] = {{"a", r.a}, {"b", r.b}, {"omega", r.omega}};
  ordered_json d;
  d["closure"] = r.closure ? ordered_json(*r.closure) : ordered_json(nullptr);
  d["lk_axis"] = r.linking ? ordered_json(r.linking->lk_axis) : ordered_json(nullptr);
  d["lk_clifford"] = r.linking ? ordered_json(r.linking->lk_clifford) : ordered_json(nullptr);
  d["order"] = r.order;
  d["euclidean_order"] = r.euclidean_order;
  d["clifford_order"] = r.clifford_order;
  d["residual"] = r.residual;
  d["jacobian"] = r.jacobian;
  j["diagnostics"] = d;
  return j;
}

inline StringRecord record_from_json(const ordered_json& j) {
  try {
    if (j.at("schema").get<int>() != kSchemaVersion) throw ParseError("unsupported schema version");
    const auto& qj = j.at("quantum");
    const Modulus q(Rational::parse(j.at("modulus").at("q1").get<std::string>()),
                    Rational::parse(j.at("modulus").at("q2").get<std::string>()));
    const auto& d = j.at("diagnostics");
    StringRecord r{{qj.at("n").get<Int>(), qj.at("l1").get<Int>(), qj.at("l2").get<Int>()},
                   q,
                   j.at("params").at("a").get<double>(),
                   j.at("params").at("b").get<double>(),
                   j.at("params").at("omega").get<double>(),
                   d.value("residual", 0.0),
                   d.value("jacobian", 0.0),
                   std::nullopt,
                   std::nullopt,
                   d.at("order").get<Int>(),
                   d.value("euclidean_order", Int{0}),
                   d.value("clifford_order", Int{0})};
    if (!d.at("closure").is_null()) r.closure = d.at("closure").get<double>();
    if (!d.at("lk_axis").is_null())
      r.linking = LinkingReport{d.at("lk_axis").get<double>(), d.at("lk_clifford").get<double>(),
                                LinkingMethod::winding};
    if (!(quantum_from_modulus(q) == r.quantum)) throw ParseError("record quantum numbers disagree with modulus");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("string record: ") + e.what());
  }
}

enum class PolylineFormat { csv, json, obj };

inline PolylineFormat parse_format(const std::string& s) {
  if (s == "csv") return PolylineFormat::csv;
  if (s == "json") return PolylineFormat::json;
  if (s == "obj") return PolylineFormat::obj;
  throw ParseError("unknown format '" + s + "' (expected csv, json or obj)");
}

inline void write_csv(std::ostream& os, const CurveSamples& s) {
  os << "t,x,y,z\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    os << format_double(s.ts[i]) << ',' << format_double(s.points[i][0]) << ',' << format_double(s.points[i][1])
       << ',' << format_double(s.points[i][2]) << '\n';
}

inline CurveSamples read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t,x,y,z") throw ParseError("csv: missing header t,x,y,z");
  CurveSamples s;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::array<double, 4> row{};
    std::string cell;
    for (auto& v : row) {
      if (!std::getline(ss, cell, ',')) throw ParseError("csv: expected 4 columns in '" + line + "'");
      v = parse_double(cell);
    }
    s.ts.push_back(row[0]);
    s.points.push_back({row[1], row[2], row[3]});
  }
  return s;
}

/// Vertices followed by one polyline element; a closed curve repeats its first index.
inline void write_obj(std::ostream& os, const CurveSamples& s) {
  for (const auto& p : s.points)
    os << "v " << format_double(p[0]) << ' ' << format_double(p[1]) << ' ' << format_double(p[2]) << '\n';
  os << 'l';
  for (std::size_t i = 1; i <= s.size(); ++i) os << ' ' << i;
  if (s.meta.closed && s.size() > 0) os << " 1";
  os << '\n';
}

inline CurveSamples read_obj(std::istream& is) {
  CurveSamples s;
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("v ", 0) == 0) {
      std::stringstream ss(line.substr(2));
      std::string x, y, z;
      if (!(ss >> x >> y >> z)) throw ParseError("obj: malformed vertex '" + line + "'");
      s.points.push_back({parse_double(x), parse_double(y), parse_double(z)});
    } else if (line.rfind("l ", 0) == 0) {
      std::stringstream ss(line.substr(2));
      std::vector<std::size_t> idx;
      std::size_t k;
      while (ss >> k) idx.push_back(k);
      s.meta.closed = idx.size() > 1 && idx.front() == idx.back();
    }
  }
  return s;
}

inline ordered_json samples_to_json(const CurveSamples& s) {
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < s.size(); ++i)
    arr.push_back({s.ts[i], s.points[i][0], s.points[i][1], s.points[i][2]});
  return arr;
}

inline void write_json(std::ostream& os, const StringRecord& r, const CurveSamples& s) {
  auto j = record_to_json(r);
  j["samples"] = samples_to_json(s);
  os << j.dump() << '\n';
}

struct JsonPolyline {
  StringRecord record;
  CurveSamples samples;
};

inline JsonPolyline read_json(std::istream& is) {
  ordered_json j;
  try {
    j = ordered_json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("json: ") + e.what());
  }
  JsonPolyline out{record_from_json(j), {}};
  try {
    for (const auto& row : j.at("samples")) {
      out.samples.ts.push_back(row.at(0).get<double>());
      out.samples.points.push_back({row.at(1).get<double>(), row.at(2).get<double>(), row.at(3).get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("json samples: ") + e.what());
  }
  return out;
}

/// JSON document for the inversion cache: {"schema": 1, "entries": {"l1/n,l2/n": {...}}}.
inline ordered_json cache_to_json(const InversionCache& cache) {
  ordered_json entries = ordered_json::object();
  for (const auto& [key, v] : cache.snapshot())
    entries[key] = {{"a", v.a}, {"b", v.b}, {"omega", v.omega}, {"residual", v.residual}};
  return {{"schema", kSchemaVersion}, {"entries", entries}};
}

inline void cache_from_json(const ordered_json& j, InversionCache& cache) {
  try {
    if (j.at("schema").get<int>() != kSchemaVersion) throw ParseError("cache: unsupported schema version");
    for (const auto& [key, v] : j.at("entries").items())
      cache.store(key, {v.at("a").get<double>(), v.at("b").get<double>(), v.at("omega").get<double>(),
                        v.at("residual").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("cache: ") + e.what());
  }
}

/// Loads a cache file; a missing file leaves the cache empty.
inline void load_cache(const std::filesystem::path& path, InversionCache& cache) {
  std::ifstream in(path);
  if (!in) return;
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("cache file " + path.string() + ": " + e.what());
  }
  cache_from_json(j, cache);
}

/// Writes the cache through a temporary file and a rename.
inline void save_cache(const std::filesystem::path& path, const InversionCache& cache) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write cache file " + tmp.string());
    out << cache_to_json(cache).dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace conformal
