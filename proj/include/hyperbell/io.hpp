#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hyperbell/functionals.hpp"
#include "hyperbell/version.hpp"

namespace hyperbell {

using json = nlohmann::json;

// Fixed-width general formatting so emitted files are reproducible across
// platforms and runs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

namespace detail {

inline const json& require_field(const json& j, const std::string& field,
                                 const char* context) {
  if (!j.contains(field))
    throw std::runtime_error(std::string(context) + ": missing field '" + field + "'");
  return j.at(field);
}

inline double require_number(const json& j, const std::string& field,
                             const char* context) {
  const json& v = require_field(j, field, context);
  if (!v.is_number())
    throw std::runtime_error(std::string(context) + ": field '" + field +
                             "' must be a number");
  return v.get<double>();
}

inline std::vector<double> require_vector(const json& j, const std::string& field,
                                          int n, const char* context) {
  const json& v = require_field(j, field, context);
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw std::runtime_error(std::string(context) + ": field '" + field +
                             "' must be an array of length " + std::to_string(n));
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number())
      throw std::runtime_error(std::string(context) + ": field '" + field +
                               "' must contain numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

}

inline BellFunctional functional_from_json(const json& j, const char* context) {
  BellFunctional f;
  const json& name = detail::require_field(j, "name", context);
  if (!name.is_string())
    throw std::runtime_error(std::string(context) + ": field 'name' must be a string");
  f.name = name.get<std::string>();
  f.nA = static_cast<int>(detail::require_number(j, "nA", context));
  f.nB = static_cast<int>(detail::require_number(j, "nB", context));
  if (f.nA < 1 || f.nB < 1)
    throw std::runtime_error(std::string(context) + ": nA and nB must be positive");
  const json& joint = detail::require_field(j, "joint", context);
  if (!joint.is_array() || static_cast<int>(joint.size()) != f.nA)
    throw std::runtime_error(std::string(context) +
                             ": field 'joint' must be an array of nA rows");
  f.joint.resize(f.nA, f.nB);
  for (int i = 0; i < f.nA; ++i) {
    if (!joint[i].is_array() || static_cast<int>(joint[i].size()) != f.nB)
      throw std::runtime_error(std::string(context) + ": field 'joint' row " +
                               std::to_string(i) + " must have nB entries");
    for (int jj = 0; jj < f.nB; ++jj) {
      if (!joint[i][jj].is_number())
        throw std::runtime_error(std::string(context) + ": field 'joint' entry (" +
                                 std::to_string(i) + "," + std::to_string(jj) +
                                 ") must be a number");
      f.joint(i, jj) = joint[i][jj].get<double>();
    }
  }
  std::vector<double> ma = detail::require_vector(j, "margA", f.nA, context);
  std::vector<double> mb = detail::require_vector(j, "margB", f.nB, context);
  f.margA = Eigen::Map<Eigen::VectorXd>(ma.data(), f.nA);
  f.margB = Eigen::Map<Eigen::VectorXd>(mb.data(), f.nB);
  if (j.contains("constant")) {
    if (!j.at("constant").is_number())
      throw std::runtime_error(std::string(context) +
                               ": field 'constant' must be a number");
    f.constant = j.at("constant").get<double>();
  }
  if (j.contains("bounds")) {
    const json& b = j.at("bounds");
    if (!b.is_object())
      throw std::runtime_error(std::string(context) +
                               ": field 'bounds' must be an object");
    auto opt = [&](const char* key) -> std::optional<double> {
      if (!b.contains(key)) return std::nullopt;
      if (!b.at(key).is_number())
        throw std::runtime_error(std::string(context) + ": field 'bounds." + key +
                                 "' must be a number");
      return b.at(key).get<double>();
    };
    f.bound_local = opt("local");
    f.bound_qubit = opt("qubit");
    f.bound_apparatus_max = opt("apparatus_max");
    f.bound_quantum = opt("quantum");
    if (f.bound_local && f.bound_qubit && f.bound_quantum &&
        !(*f.bound_local <= *f.bound_qubit && *f.bound_qubit <= *f.bound_quantum))
      throw std::runtime_error(std::string(context) +
                               ": bounds must satisfy local <= qubit <= quantum");
  }
  return f;
}

inline json functional_to_json(const BellFunctional& f) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = f.name;
  j["nA"] = f.nA;
  j["nB"] = f.nB;
  json joint = json::array();
  for (int i = 0; i < f.nA; ++i) {
    json row = json::array();
    for (int jj = 0; jj < f.nB; ++jj) row.push_back(f.joint(i, jj));
    joint.push_back(row);
  }
  j["joint"] = joint;
  j["margA"] = std::vector<double>(f.margA.data(), f.margA.data() + f.nA);
  j["margB"] = std::vector<double>(f.margB.data(), f.margB.data() + f.nB);
  if (f.constant != 0.0) j["constant"] = f.constant;
  json bounds = json::object();
  if (f.bound_local) bounds["local"] = *f.bound_local;
  if (f.bound_qubit) bounds["qubit"] = *f.bound_qubit;
  if (f.bound_apparatus_max) bounds["apparatus_max"] = *f.bound_apparatus_max;
  if (f.bound_quantum) bounds["quantum"] = *f.bound_quantum;
  if (!bounds.empty()) j["bounds"] = bounds;
  return j;
}

inline BellFunctional load_functional(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("functional file '" + path + "': cannot open");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("functional file '" + path + "': " + e.what());
  }
  std::string context = "functional file '" + path + "'";
  return functional_from_json(j, context.c_str());
}

inline void save_functional(const BellFunctional& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << functional_to_json(f).dump(2) << "\n";
}

// Settings tables on disk carry degrees; the in-memory structs use radians.
inline json settings_to_json(const AnalyzerSettings& s) {
  json j;
  j["hwp1"] = s.hwp1 / kDegree;
  j["qwp1"] = s.qwp1 / kDegree;
  j["hwp2"] = s.hwp2 / kDegree;
  j["qwp2"] = s.qwp2 / kDegree;
  j["hwp3"] = s.hwp3 / kDegree;
  j["qwp3"] = s.qwp3 / kDegree;
  return j;
}

inline AnalyzerSettings settings_from_json(const json& j, const char* context) {
  AnalyzerSettings s;
  s.hwp1 = detail::require_number(j, "hwp1", context) * kDegree;
  s.qwp1 = detail::require_number(j, "qwp1", context) * kDegree;
  s.hwp2 = detail::require_number(j, "hwp2", context) * kDegree;
  s.qwp2 = detail::require_number(j, "qwp2", context) * kDegree;
  s.hwp3 = detail::require_number(j, "hwp3", context) * kDegree;
  s.qwp3 = detail::require_number(j, "qwp3", context) * kDegree;
  return s;
}

inline json plan_to_json(const MeasurementPlan& planA, const MeasurementPlan& planB,
                         double value) {
  json j;
  j["schema_version"] = kSchemaVersion;
  json pa = json::array(), pb = json::array();
  for (const auto& s : planA.settings) pa.push_back(settings_to_json(s));
  for (const auto& s : planB.settings) pb.push_back(settings_to_json(s));
  j["partyA"] = pa;
  j["partyB"] = pb;
  j["value"] = value;
  return j;
}

struct LoadedPlans {
  MeasurementPlan planA, planB;
  double value = 0.0;
};

inline LoadedPlans plans_from_json(const json& j, const char* context) {
  LoadedPlans out;
  const json& pa = detail::require_field(j, "partyA", context);
  const json& pb = detail::require_field(j, "partyB", context);
  if (!pa.is_array() || !pb.is_array())
    throw std::runtime_error(std::string(context) +
                             ": partyA and partyB must be arrays");
  for (const auto& s : pa)
    out.planA.settings.push_back(settings_from_json(s, context));
  for (const auto& s : pb)
    out.planB.settings.push_back(settings_from_json(s, context));
  if (j.contains("value")) out.value = j.at("value").get<double>();
  return out;
}

inline LoadedPlans load_plans(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("settings file '" + path + "': cannot open");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("settings file '" + path + "': " + e.what());
  }
  std::string context = "settings file '" + path + "'";
  return plans_from_json(j, context.c_str());
}

// Tabular output with a reproducibility header (tool version, seed, request)
// in either a commented CSV or a single JSON document. Headers carry no
// clock or machine data, so identical invocations emit identical bytes.
class TableWriter {
 public:
  TableWriter(std::string format, std::vector<std::string> columns)
      : format_(std::move(format)), columns_(std::move(columns)) {
    if (format_ != "csv" && format_ != "json")
      throw std::invalid_argument("format must be csv or json");
  }

  void header(const std::string& key, const std::string& value) {
    header_.emplace_back(key, value);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size())
      throw std::invalid_argument("row width mismatch");
    rows_.push_back(cells);
  }

  void write(std::ostream& os) const {
    if (format_ == "csv") {
      for (const auto& [k, v] : header_) os << "# " << k << ": " << v << "\n";
      for (std::size_t c = 0; c < columns_.size(); ++c)
        os << columns_[c] << (c + 1 < columns_.size() ? "," : "\n");
      for (const auto& r : rows_)
        for (std::size_t c = 0; c < r.size(); ++c)
          os << r[c] << (c + 1 < r.size() ? "," : "\n");
      return;
    }
    json j;
    json h = json::object();
    for (const auto& [k, v] : header_) h[k] = v;
    j["header"] = h;
    j["columns"] = columns_;
    json rows = json::array();
    for (const auto& r : rows_) rows.push_back(r);
    j["rows"] = rows;
    os << j.dump(2) << "\n";
  }

 private:
  std::string format_;
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> header_;
  std::vector<std::vector<std::string>> rows_;
};

}
