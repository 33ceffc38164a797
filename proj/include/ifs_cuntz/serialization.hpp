#pragma once

#include "json.hpp"

#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ifs_cuntz/coding_space.hpp"
#include "ifs_cuntz/cuntz_rep.hpp"
#include "ifs_cuntz/hilbert.hpp"
#include "ifs_cuntz/l2_realization.hpp"
#include "ifs_cuntz/measures.hpp"

// Text formats. Words are written as 0-based digit strings ("01" is the
// cylinder of branches 1 then 2); branch numbers in configs are 1-based.
//
// Measure:
//   {"schema": "ifs-cuntz/v1", "kind": "measure", "alphabet": N, "depth": k,
//    "model": "uniform" | "frozen" | "bernoulli", "weights": ["1/3", ...],
//    "masses": [[word, num, den], ...], "atoms": [[prefix, period, num, den], ...]}
// Exact masses carry integer num/den (strings when they exceed 64 bits);
// floating masses carry the value in num and den = 1.

namespace ifs_cuntz {

using Json = nlohmann::json;

inline constexpr const char* kSchema = "ifs-cuntz/v1";

namespace detail {

inline Json big_int_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
    return v.convert_to<std::int64_t>();
  }
  return v.str();
}

inline BigInt json_big_int(const Json& j) {
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) return parse_rational(j.get<std::string>()).convert_to<BigInt>();
  throw ParseError("expected an integer, got " + j.dump());
}

template <class T>
void put_fraction(Json& row, const T& value) {
  if constexpr (std::is_same_v<T, Rational>) {
    row.push_back(big_int_json(boost::multiprecision::numerator(value)));
    row.push_back(big_int_json(boost::multiprecision::denominator(value)));
  } else {
    row.push_back(value);
    row.push_back(1);
  }
}

template <class T>
T get_fraction(const Json& num, const Json& den) {
  if constexpr (std::is_same_v<T, Rational>) {
    if (num.is_number_float() || den.is_number_float()) throw ParseError("exact measure with a floating-point mass");
    const BigInt d = json_big_int(den);
    if (d == 0) throw ParseError("zero denominator");
    return Rational(json_big_int(num), d);
  } else {
    return num.get<double>() / den.get<double>();
  }
}

template <class T>
Json scalar_json(const T& value) {
  if constexpr (std::is_same_v<T, Rational>) {
    return to_string(value);
  } else {
    return value;
  }
}

template <class T>
T json_scalar(const Json& j) {
  if constexpr (std::is_same_v<T, Rational>) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    throw ParseError("expected an exact rational, got " + j.dump());
  } else {
    if (j.is_string()) return to_double(parse_rational(j.get<std::string>()));
    return j.get<double>();
  }
}

inline void require_schema(const Json& j, const char* kind) {
  if (!j.is_object() || j.value("schema", "") != kSchema) throw ParseError("missing or unknown schema tag");
  if (j.value("kind", "") != kind) throw ParseError(std::string("expected a ") + kind + " document");
}

}  // namespace detail

template <class T>
Json to_json(const Measure<T>& m) {
  Json j;
  j["schema"] = kSchema;
  j["kind"] = "measure";
  j["alphabet"] = m.n_branches();
  j["depth"] = m.depth();
  using Kind = typename RefinementModel<T>::Kind;
  switch (m.model().kind()) {
    case Kind::Uniform:
      j["model"] = "uniform";
      break;
    case Kind::Frozen:
      j["model"] = "frozen";
      break;
    case Kind::Bernoulli: {
      j["model"] = "bernoulli";
      Json w = Json::array();
      for (const auto& x : m.model().weights()) w.push_back(detail::scalar_json(x));
      j["weights"] = std::move(w);
      break;
    }
  }
  Json masses = Json::array();
  for (std::size_t idx = 0; idx < m.diffuse().size(); ++idx) {
    Json row = Json::array({digits(m.diffuse().symbols_at(idx))});
    detail::put_fraction(row, m.diffuse()[idx]);
    masses.push_back(std::move(row));
  }
  j["masses"] = std::move(masses);
  Json atoms = Json::array();
  for (const auto& a : m.atoms()) {
    Json row = Json::array({digits(a.point.prefix()), digits(a.point.period())});
    detail::put_fraction(row, a.mass);
    atoms.push_back(std::move(row));
  }
  j["atoms"] = std::move(atoms);
  return j;
}

template <class T>
Measure<T> measure_from_json(const Json& j) {
  try {
    detail::require_schema(j, "measure");
    const int n = j.at("alphabet").get<int>();
    const int depth = j.at("depth").get<int>();
    const std::string model_name = j.at("model").get<std::string>();
    RefinementModel<T> model = RefinementModel<T>::frozen();
    if (model_name == "uniform") {
      model = RefinementModel<T>::uniform();
    } else if (model_name == "bernoulli") {
      std::vector<T> w;
      for (const auto& x : j.at("weights")) w.push_back(detail::json_scalar<T>(x));
      model = RefinementModel<T>::bernoulli(std::move(w));
    } else if (model_name != "frozen") {
      throw ParseError("unknown refinement model '" + model_name + "'");
    }
    CylinderTable<T> table(n, depth);
    for (const auto& row : j.at("masses")) {
      const auto w = parse_digits(row.at(0).get<std::string>());
      table.at(w) = detail::get_fraction<T>(row.at(1), row.at(2));
    }
    std::vector<Atom<T>> atoms;
    for (const auto& row : j.at("atoms")) {
      Word p(parse_digits(row.at(0).get<std::string>()), parse_digits(row.at(1).get<std::string>()));
      atoms.push_back({std::move(p), detail::get_fraction<T>(row.at(2), row.at(3))});
    }
    return Measure<T>(n, std::move(table), std::move(model), std::move(atoms));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed measure JSON: ") + e.what());
  }
}

/// word,mass rows of the full depth-k mass table. Exact masses add an
/// "exact" column with num/den.
template <class T>
void write_mass_csv(std::ostream& out, const Measure<T>& m, int depth) {
  const CylinderTable<T> table = mass_table(m, depth);
  out << (std::is_same_v<T, Rational> ? "word,mass,exact\n" : "word,mass\n");
  out.precision(17);
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    out << digits(table.symbols_at(idx)) << ',' << to_double(table[idx]);
    if constexpr (std::is_same_v<T, Rational>) out << ',' << to_string(table[idx]);
    out << '\n';
  }
}

inline Json to_json(const SquareDensity& a) {
  Json j;
  j["schema"] = kSchema;
  j["kind"] = "square_density";
  j["base"] = to_json(a.base());
  Json values = Json::array();
  for (std::size_t idx = 0; idx < a.values().size(); ++idx) {
    values.push_back({digits(a.base().diffuse().symbols_at(idx)), a.values()[idx].real(), a.values()[idx].imag()});
  }
  j["values"] = std::move(values);
  Json atom_values = Json::array();
  for (std::size_t k = 0; k < a.atom_values().size(); ++k) {
    const Word& p = a.base().atoms()[k].point;
    atom_values.push_back({digits(p.prefix()), digits(p.period()), a.atom_values()[k].real(), a.atom_values()[k].imag()});
  }
  j["atom_values"] = std::move(atom_values);
  return j;
}

inline SquareDensity square_density_from_json(const Json& j) {
  try {
    detail::require_schema(j, "square_density");
    Measure<double> base = measure_from_json<double>(j.at("base"));
    CylinderTable<Complex> values(base.n_branches(), base.depth());
    for (const auto& row : j.at("values")) {
      values.at(parse_digits(row.at(0).get<std::string>())) = {row.at(1).get<double>(), row.at(2).get<double>()};
    }
    std::vector<Complex> atom_values(base.atoms().size(), 0.0);
    for (const auto& row : j.at("atom_values")) {
      const Word p(parse_digits(row.at(0).get<std::string>()), parse_digits(row.at(1).get<std::string>()));
      bool found = false;
      for (std::size_t k = 0; k < base.atoms().size(); ++k) {
        if (base.atoms()[k].point == p) {
          atom_values[k] = {row.at(2).get<double>(), row.at(3).get<double>()};
          found = true;
        }
      }
      if (!found) throw ParseError("density value for an atom missing from the base");
    }
    return SquareDensity(std::move(base), std::move(values.values()), std::move(atom_values));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed square density JSON: ") + e.what());
  }
}

inline Json residual_rows_json(const std::vector<RelationResidual>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) out.push_back({{"vector_id", r.vector_id}, {"relation", r.relation}, {"residual", r.residual}});
  return out;
}

inline Json to_json(const CuntzReport& report) {
  Json j;
  j["schema"] = kSchema;
  j["kind"] = "cuntz_report";
  j["tolerance"] = report.tolerance;
  j["max_residual"] = report.max_residual();
  j["ok"] = report.ok();
  j["rows"] = residual_rows_json(report.rows);
  return j;
}

// ---------------------------------------------------------------------------
// Configs

namespace detail {

inline Rational config_rational(const Json& j) {
  if (j.is_array() && j.size() == 2) {
    const BigInt den = json_big_int(j[1]);
    if (den == 0) throw ParseError("zero denominator in config");
    return Rational(json_big_int(j[0]), den);
  }
  return json_scalar<Rational>(j);
}

}  // namespace detail

/// {"alphabet": N, "geometry": "symbolic"|"affine"|"dyadic"|"cantor",
///  "maps": [[slope, offset], ...], "branches": [1-based, ...]}
/// Rationals are "num/den" strings, integers, or [num, den] pairs.
inline IfsSystem ifs_from_json(const Json& j) {
  try {
    const std::string geometry = j.value("geometry", "symbolic");
    IfsSystem ifs = IfsSystem::dyadic();
    if (geometry == "dyadic") {
      ifs = IfsSystem::dyadic();
    } else if (geometry == "cantor") {
      ifs = IfsSystem::cantor();
    } else if (geometry == "symbolic") {
      ifs = IfsSystem::symbolic(j.at("alphabet").get<int>());
    } else if (geometry == "affine") {
      std::vector<AffineMap> maps;
      for (const auto& m : j.at("maps")) {
        if (!m.is_array() || m.size() != 2) throw ParseError("each affine map is [slope, offset]");
        maps.push_back({detail::config_rational(m[0]), detail::config_rational(m[1])});
      }
      ifs = IfsSystem::affine(std::move(maps));
    } else {
      throw ParseError("unknown geometry '" + geometry + "'");
    }
    if (j.contains("alphabet") && j.at("alphabet").get<int>() != ifs.n_branches()) {
      throw ParseError("alphabet size does not match the geometry");
    }
    if (j.contains("branches")) ifs = ifs.with_branches(j.at("branches").get<std::vector<Symbol>>());
    return ifs;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed system config: ") + e.what());
  }
}

/// {"alphabet": N, "index_maps": [[scale, shift], ...]}
inline PermutativeRep rep_from_json(const Json& j) {
  try {
    std::vector<IndexMap> maps;
    for (const auto& m : j.at("index_maps")) {
      if (!m.is_array() || m.size() != 2) throw ParseError("each index map is [scale, shift]");
      maps.push_back({m[0].get<std::int64_t>(), m[1].get<std::int64_t>()});
    }
    if (j.contains("alphabet") && j.at("alphabet").get<std::size_t>() != maps.size()) {
      throw ParseError("alphabet size does not match the number of index maps");
    }
    return PermutativeRep(std::move(maps));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed representation config: ") + e.what());
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) field.pop_back();
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) field.erase(field.begin());
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline double parse_number(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": invalid number '" + s + "'");
  }
}

template <class Fn>
void for_csv_rows(std::istream& in, const char* header_key, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    const auto fields = split_csv_line(line);
    if (line_no == 1 && !fields.empty() && fields[0] == header_key) continue;
    if (fields.size() != 3) throw ParseError("line " + std::to_string(line_no) + ": expected 3 fields");
    fn(fields, line_no);
  }
}

}  // namespace detail

/// index,re,im rows (header "index,re,im" optional); repeated indices add.
inline RepVector read_rep_vector_csv(std::istream& in) {
  std::map<std::int64_t, Complex> coefficients;
  detail::for_csv_rows(in, "index", [&](const std::vector<std::string>& f, std::size_t line_no) {
    std::int64_t n = 0;
    try {
      std::size_t used = 0;
      n = std::stoll(f[0], &used);
      if (used != f[0].size()) throw std::invalid_argument(f[0]);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": invalid index '" + f[0] + "'");
    }
    coefficients[n] += Complex(detail::parse_number(f[1], line_no), detail::parse_number(f[2], line_no));
  });
  return RepVector(std::move(coefficients));
}

/// word,re,im rows for one cylinder depth (all words the same length);
/// missing cells are 0. Atom values are not read; they start at 0.
inline L2Vector read_l2_vector_csv(std::istream& in, const ProbabilityMeasure& base) {
  std::vector<std::pair<std::vector<Symbol>, Complex>> rows;
  std::optional<std::size_t> depth;
  detail::for_csv_rows(in, "word", [&](const std::vector<std::string>& f, std::size_t line_no) {
    auto w = parse_digits(f[0]);
    if (depth && *depth != w.size()) throw ParseError("line " + std::to_string(line_no) + ": mixed word lengths");
    depth = w.size();
    rows.emplace_back(std::move(w), Complex(detail::parse_number(f[1], line_no), detail::parse_number(f[2], line_no)));
  });
  const int k = static_cast<int>(depth.value_or(0));
  CylinderTable<Complex> table(base.n_branches(), k);
  for (const auto& [w, c] : rows) table.at(w) = c;
  return L2Vector(base, k, std::move(table.values()), std::vector<Complex>(base->atoms().size(), 0.0));
}

inline void write_l2_vector_csv(std::ostream& out, const L2Vector& v) {
  out.precision(17);
  out << "word,re,im\n";
  const CylinderTable<Complex> shape(v.n_branches(), v.depth());
  for (std::size_t idx = 0; idx < v.values().size(); ++idx) {
    out << digits(shape.symbols_at(idx)) << ',' << v.values()[idx].real() << ',' << v.values()[idx].imag() << '\n';
  }
}

}  // namespace ifs_cuntz
