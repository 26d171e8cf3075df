#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pgm/certificates.hpp"
#include "pgm/core_rates.hpp"
#include "pgm/mixed_measures.hpp"
#include "pgm/pgm_engine.hpp"

namespace pgm {

using Json = nlohmann::json;

namespace detail {

// JSON has no infinities; they are written as null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

inline Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

inline Vector vector_from_json(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = j[i].is_null() ? kInf : j[i].get<double>();
  return v;
}

inline std::optional<double> optional_number(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace detail

inline Json to_json(const IterateRecord& r, std::size_t k) {
  return Json{{"k", k},
              {"x", detail::vector_json(r.x)},
              {"grad_f", detail::vector_json(r.grad_f)},
              {"s", r.s ? detail::vector_json(*r.s) : Json(nullptr)},
              {"F", detail::number(r.F)},
              {"dist_sq", detail::number(r.dist_sq)},
              {"func_gap", detail::number(r.func_gap)},
              {"residual_grad_sq", detail::number(r.residual_grad_sq)}};
}

inline Json to_json(const IterateTrace& t) {
  Json records = Json::array();
  for (std::size_t k = 0; k < t.records.size(); ++k) records.push_back(to_json(t.records[k], k));
  return Json{{"mu", t.problem.params().mu},
              {"L", t.problem.params().L},
              {"f", t.problem.f.is_diagonal() ? "diagonal_quadratic" : "dense_quadratic"},
              {"h", t.problem.h.name()},
              {"gamma_used", t.gamma_used},
              {"outside_theory", t.outside_theory},
              {"records", std::move(records)}};
}

/// Records of a serialized trace; the problem itself is not serialized.
inline std::vector<IterateRecord> records_from_json(const Json& trace) {
  std::vector<IterateRecord> out;
  for (const auto& j : trace.at("records")) {
    IterateRecord r;
    r.x = detail::vector_from_json(j.at("x"));
    r.grad_f = detail::vector_from_json(j.at("grad_f"));
    if (!j.at("s").is_null()) r.s = detail::vector_from_json(j.at("s"));
    r.F = j.at("F").is_null() ? kInf : j.at("F").get<double>();
    r.dist_sq = detail::optional_number(j, "dist_sq");
    r.func_gap = detail::optional_number(j, "func_gap");
    r.residual_grad_sq = detail::optional_number(j, "residual_grad_sq");
    out.push_back(std::move(r));
  }
  return out;
}

inline Json to_json(const NamedValue& v) {
  Json j{{"name", v.name}, {"value", to_string(v.value)}, {"nonneg", v.nonneg}};
  if (!v.descriptor.empty()) j["descriptor"] = v.descriptor;
  return j;
}

inline Json to_json(const CertificateReport& r) {
  Json mult = Json::array(), sos = Json::array(), side = Json::array(), off = Json::array();
  for (const auto& v : r.multipliers) mult.push_back(to_json(v));
  for (const auto& v : r.sos_terms) sos.push_back(to_json(v));
  for (const auto& v : r.side_conditions) side.push_back(to_json(v));
  for (const auto& [k, v] : r.offending) off.push_back(Json{{"entry", k}, {"coefficient", v}});
  Json j{{"theorem", to_string(r.theorem)},
         {"regime", to_string(r.regime)},
         {"mu", to_string(r.mu)},
         {"L", to_string(r.L)},
         {"gamma", to_string(r.gamma)},
         {"multipliers", std::move(mult)},
         {"sos_terms", std::move(sos)},
         {"side_conditions", std::move(side)},
         {"residual_zero", r.residual_zero},
         {"offending", std::move(off)},
         {"verified", r.verified}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline Json to_json(const UnivariateReport& r) {
  Json checks = Json::array(), off = Json::array();
  for (const auto& [name, ok] : r.sign_checks) checks.push_back(Json{{"name", name}, {"nonneg", ok}});
  for (const auto& [k, v] : r.offending) off.push_back(Json{{"entry", k}, {"coefficient", v}});
  return Json{{"theorem", to_string(r.theorem)},
              {"regime", to_string(r.regime)},
              {"mu", to_string(r.mu)},
              {"L", to_string(r.L)},
              {"gamma_interval", Json::array({to_string(r.lo), to_string(r.hi)})},
              {"identity_zero", r.identity_zero},
              {"max_numerator_degree", r.max_numerator_degree},
              {"max_denominator_degree", r.max_denominator_degree},
              {"sign_checks", std::move(checks)},
              {"offending", std::move(off)},
              {"verified", r.verified}};
}

inline Json to_json(const BoundValue& b) {
  return Json{{"unbounded", b.unbounded},
              {"value", b.unbounded ? Json(nullptr) : detail::number(b.value)},
              {"provenance", to_string(b.provenance)}};
}

}  // namespace pgm
