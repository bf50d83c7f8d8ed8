#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "nubound/format.hpp"
#include "nubound/scenario.hpp"

namespace nubound {

/// Malformed scenario document. line() is 0 when the problem is not tied to a line.
class ScenarioFormatError : public std::runtime_error {
public:
  ScenarioFormatError(const std::string& what, std::size_t line, std::string field)
      : std::runtime_error(what), line_(line), field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

private:
  std::size_t line_;
  std::string field_;
};

struct LoadedScenario {
  NetworkScenario scenario;
  std::vector<std::string> warnings;
};

inline constexpr const char* kScenarioVersion = "1";

namespace detail {

inline void write_array(std::ostream& os, const std::vector<double>& v) {
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << format_double(v[i]);
  os << ']';
}

inline void write_points(std::ostream& os, const std::vector<Point2>& pts) {
  os << '[';
  for (std::size_t i = 0; i < pts.size(); ++i)
    os << (i ? ", " : "") << '[' << format_double(pts[i].x) << ", " << format_double(pts[i].y) << ']';
  os << ']';
}

inline std::vector<double> read_numbers(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) throw ScenarioFormatError("field '" + field + "' must be an array of numbers", 0, field);
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ScenarioFormatError("field '" + field + "' entry " + std::to_string(i) + " is not a number", 0, field);
    out.push_back(j[i].get<double>());
  }
  return out;
}

inline std::vector<Point2> read_points(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) throw ScenarioFormatError("field '" + field + "' must be an array of [x, y] pairs", 0, field);
  std::vector<Point2> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto xy = read_numbers(j[i], field + "[" + std::to_string(i) + "]");
    if (xy.size() != 2)
      throw ScenarioFormatError("field '" + field + "' entry " + std::to_string(i) + " must have 2 coordinates", 0,
                                field);
    out.push_back({xy[0], xy[1]});
  }
  return out;
}

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

inline LoadedScenario read_scenario_document(const nlohmann::json& doc);

// Line of the first `"key"` occurrence, 0 if absent.
inline std::size_t line_of_key(const std::string& text, const std::string& key) {
  const auto base = key.substr(0, key.find_first_of(".["));
  const auto pos = text.find('"' + base + '"');
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

} // namespace detail

/**
 * Writes a scenario document (JSON, version "1"). Every real is printed with
 * 17 significant digits so that reading it back is exact.
 */
inline void write_scenario(std::ostream& os, const NetworkScenario& s) {
  s.validate();
  const std::size_t n = s.num_links;
  os << "{\n";
  os << "  \"version\": \"" << kScenarioVersion << "\",\n";
  os << "  \"num_links\": " << n << ",\n";
  os << "  \"seed\": " << s.seed << ",\n";
  os << "  \"gain_matrix\": [\n";
  for (std::size_t i = 0; i < n; ++i) {
    os << "    ";
    const auto row = s.gain.row(i);
    detail::write_array(os, std::vector<double>(row.begin(), row.end()));
    os << (i + 1 < n ? ",\n" : "\n");
  }
  os << "  ],\n";
  os << "  \"noise_power\": ";
  detail::write_array(os, s.noise_power);
  os << ",\n  \"sinr_targets\": ";
  detail::write_array(os, s.sinr_targets);
  if (s.geometry) {
    os << ",\n  \"geometry\": {\n    \"transmitters\": ";
    detail::write_points(os, s.geometry->transmitters);
    os << ",\n    \"receivers\": ";
    detail::write_points(os, s.geometry->receivers);
    os << "\n  }";
  }
  os << "\n}\n";
}

/**
 * Parses a scenario document. A missing sinr_targets array defaults to all
 * ones and a missing seed to 0, each with a warning. Syntax errors report
 * the line; structural errors name the field.
 */
inline LoadedScenario read_scenario(std::istream& is) {
  const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t line = detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ScenarioFormatError("scenario parse error at line " + std::to_string(line) + ": " + e.what(), line, "");
  }
  if (!doc.is_object()) throw ScenarioFormatError("scenario document must be a JSON object", 1, "");

  try {
    return detail::read_scenario_document(doc);
  } catch (const ScenarioFormatError& e) {
    if (e.line() != 0 || e.field().empty()) throw;
    const std::size_t line = detail::line_of_key(text, e.field());
    if (line == 0) throw;
    throw ScenarioFormatError(std::string(e.what()) + " (line " + std::to_string(line) + ")", line, e.field());
  }
}

namespace detail {

inline LoadedScenario read_scenario_document(const nlohmann::json& doc) {
  LoadedScenario out;
  NetworkScenario& s = out.scenario;

  if (!doc.contains("version")) throw ScenarioFormatError("missing field 'version'", 0, "version");
  if (!doc["version"].is_string() || doc["version"].get<std::string>() != kScenarioVersion)
    throw ScenarioFormatError("unsupported scenario version (expected \"1\")", 0, "version");

  if (!doc.contains("num_links") || !doc["num_links"].is_number_unsigned())
    throw ScenarioFormatError("field 'num_links' must be a positive integer", 0, "num_links");
  const std::size_t n = doc["num_links"].get<std::size_t>();
  if (n == 0) throw ScenarioFormatError("field 'num_links' must be a positive integer", 0, "num_links");
  s.num_links = n;

  if (!doc.contains("gain_matrix")) throw ScenarioFormatError("missing field 'gain_matrix'", 0, "gain_matrix");
  const auto& g = doc["gain_matrix"];
  if (!g.is_array() || g.size() != n)
    throw ScenarioFormatError("field 'gain_matrix' must have num_links = " + std::to_string(n) + " rows", 0,
                              "gain_matrix");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    rows.push_back(detail::read_numbers(g[i], "gain_matrix"));
    if (rows.back().size() != n)
      throw ScenarioFormatError("field 'gain_matrix' row " + std::to_string(i) + " has " +
                                    std::to_string(rows.back().size()) + " entries, expected " + std::to_string(n),
                                0, "gain_matrix");
  }
  s.gain = Matrix::from_rows(rows);

  if (!doc.contains("noise_power")) throw ScenarioFormatError("missing field 'noise_power'", 0, "noise_power");
  s.noise_power = detail::read_numbers(doc["noise_power"], "noise_power");
  if (s.noise_power.size() != n)
    throw ScenarioFormatError("field 'noise_power' has " + std::to_string(s.noise_power.size()) +
                                  " entries, expected " + std::to_string(n),
                              0, "noise_power");

  if (doc.contains("sinr_targets")) {
    s.sinr_targets = detail::read_numbers(doc["sinr_targets"], "sinr_targets");
    if (s.sinr_targets.size() != n)
      throw ScenarioFormatError("field 'sinr_targets' has " + std::to_string(s.sinr_targets.size()) +
                                    " entries, expected " + std::to_string(n),
                                0, "sinr_targets");
  } else {
    s.sinr_targets.assign(n, 1.0);
    out.warnings.emplace_back("field 'sinr_targets' missing; defaulting to all ones");
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned())
      throw ScenarioFormatError("field 'seed' must be a nonnegative integer", 0, "seed");
    s.seed = doc["seed"].get<std::uint64_t>();
  } else {
    out.warnings.emplace_back("field 'seed' missing; defaulting to 0");
  }

  if (doc.contains("geometry")) {
    const auto& geo = doc["geometry"];
    if (!geo.is_object() || !geo.contains("transmitters") || !geo.contains("receivers"))
      throw ScenarioFormatError("field 'geometry' needs 'transmitters' and 'receivers'", 0, "geometry");
    Geometry gm;
    gm.transmitters = detail::read_points(geo["transmitters"], "geometry.transmitters");
    gm.receivers = detail::read_points(geo["receivers"], "geometry.receivers");
    if (gm.transmitters.size() != n || gm.receivers.size() != n)
      throw ScenarioFormatError("field 'geometry' must list num_links transmitters and receivers", 0, "geometry");
    s.geometry = std::move(gm);
  }

  for (std::size_t i = 0; i < n; ++i)
    if (!(s.gain(i, i) > 0.0))
      throw ScenarioFormatError("non-positive direct gain G[" + std::to_string(i) + "][" + std::to_string(i) + "]",
                                0, "gain_matrix");
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioFormatError(e.what(), 0, "");
  }
  return out;
}

} // namespace detail

inline void save_scenario(const NetworkScenario& s, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_scenario(os, s);
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

inline LoadedScenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open scenario file '" + path + "'");
  return read_scenario(is);
}

} // namespace nubound
