#pragma once

#include "json.hpp"

#include "holointerp/errors.hpp"
#include "holointerp/geometry.hpp"

namespace holointerp::detail {

using nlohmann::json;

inline json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError("expected a complex number [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json complex_list_to_json(const std::vector<Complex>& v) {
  json out = json::array();
  for (const auto& c : v) out.push_back(complex_to_json(c));
  return out;
}

inline std::vector<Complex> complex_list_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("expected an array of complex numbers");
  std::vector<Complex> out;
  for (const auto& e : j) out.push_back(complex_from_json(e));
  return out;
}

inline json point_to_json(const CPoint& z) {
  json out = json::array();
  for (Eigen::Index i = 0; i < z.size(); ++i) out.push_back(complex_to_json(z[i]));
  return out;
}

inline CPoint point_from_json(const json& j) {
  const auto v = complex_list_from_json(j);
  CPoint z(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) z[static_cast<Eigen::Index>(i)] = v[i];
  if (!is_finite(z)) throw ParseError("point has non-finite coordinates");
  return z;
}

inline json matrix_to_json(const CMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    out.push_back(std::move(row));
  }
  return out;
}

inline CMatrix matrix_from_json(const json& j, std::size_t n) {
  if (!j.is_array() || j.size() != n) throw ParseError("matrix must have " + std::to_string(n) + " rows");
  CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n) throw ParseError("matrix row has the wrong length");
    for (std::size_t k = 0; k < n; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = complex_from_json(j[i][k]);
    }
  }
  return m;
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

inline void require_version(const json& doc) {
  if (!doc.is_object()) throw ParseError("document must be a JSON object");
  if (!doc.contains("format_version") || doc["format_version"] != 1) throw ParseError("format_version must be 1");
}

/// Runs f, turning library-internal JSON type errors into ParseError.
template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

}  // namespace holointerp::detail
