#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "hwm/data.hpp"

namespace hwm {

/// Datum files are JSON with every complex number written as a two-element
/// [re, im] array:
///
///   {
///     "m0":    [0.0, 0.0, 1.0],
///     "poles": [[0.0, 1.0], ...],
///     "spins": [[[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]], ...]
///   }
///
/// Structural problems raise SchemaError with the offending field path.

namespace detail {

inline Complex read_complex(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw SchemaError(path + ": expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline const nlohmann::json& member(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string(key) + ": missing field");
  return j[key];
}

}  // namespace detail

inline RationalData parse_datum(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("datum: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("datum: expected a JSON object");

  RationalData d;
  const nlohmann::json& m0 = detail::member(j, "m0");
  if (!m0.is_array() || m0.size() != 3 || !m0[0].is_number() || !m0[1].is_number() ||
      !m0[2].is_number())
    throw SchemaError("m0: expected three real numbers");
  d.m0 = {Complex(m0[0].get<double>(), 0), Complex(m0[1].get<double>(), 0),
          Complex(m0[2].get<double>(), 0)};

  const nlohmann::json& poles = detail::member(j, "poles");
  if (!poles.is_array() || poles.empty()) throw SchemaError("poles: expected a nonempty array");
  for (std::size_t k = 0; k < poles.size(); ++k)
    d.poles.push_back(detail::read_complex(poles[k], "poles[" + std::to_string(k) + "]"));

  const nlohmann::json& spins = detail::member(j, "spins");
  if (!spins.is_array() || spins.empty()) throw SchemaError("spins: expected a nonempty array");
  if (spins.size() != poles.size())
    throw SchemaError("spins: length " + std::to_string(spins.size()) +
                      " does not match poles length " + std::to_string(poles.size()));
  for (std::size_t k = 0; k < spins.size(); ++k) {
    const std::string path = "spins[" + std::to_string(k) + "]";
    const nlohmann::json& s = spins[k];
    if (!s.is_array() || s.size() != 3) throw SchemaError(path + ": expected three components");
    d.spins.push_back({detail::read_complex(s[0], path + "[0]"),
                       detail::read_complex(s[1], path + "[1]"),
                       detail::read_complex(s[2], path + "[2]")});
  }
  return d;
}

inline RationalData load_datum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open datum file: " + path);
  return parse_datum(in);
}

inline void write_datum(std::ostream& out, const RationalData& d) {
  nlohmann::json j;
  j["m0"] = {d.m0.s1.real(), d.m0.s2.real(), d.m0.s3.real()};
  j["poles"] = nlohmann::json::array();
  for (const Complex& x : d.poles) j["poles"].push_back({x.real(), x.imag()});
  j["spins"] = nlohmann::json::array();
  for (const ComplexSpin& s : d.spins)
    j["spins"].push_back({{s.s1.real(), s.s1.imag()},
                          {s.s2.real(), s.s2.imag()},
                          {s.s3.real(), s.s3.imag()}});
  out << j.dump(2) << "\n";
}

inline void save_datum(const std::string& path, const RationalData& d) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write datum file: " + path);
  write_datum(out, d);
}

}  // namespace hwm
