#pragma once

// File formats: state JSON, transcript JSON, scan CSV / JSON reports.
//
// State files: {"dims": [..], "kind": "pure"|"mixed", "data": [[re, im], ...]}
// with the vector (pure) or the row-major density matrix (mixed), subsystem 1
// most significant. State files keep full double precision; reports print
// numbers with 9 significant digits.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "entmono/measures.hpp"
#include "entmono/monogamy.hpp"
#include "entmono/protocols.hpp"
#include "entmono/states.hpp"

namespace entmono {

using Json = nlohmann::json;

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

// Value rounded to 9 significant digits, or a string for non-finite values.
inline Json json_number(double x) {
  if (!std::isfinite(x)) return format_number(x);
  return std::strtod(format_number(x).c_str(), nullptr);
}

inline Json state_to_json(const QuantumState& state) {
  Json data = Json::array();
  auto push = [&](std::span<const cplx> values) {
    for (const cplx& z : values) data.push_back(Json::array({z.real(), z.imag()}));
  };
  if (state.has_vector()) {
    push(state.vector().data());
  } else {
    const Matrix rho = state.density();
    push(rho.data());
  }
  return Json{{"dims", state.dims()}, {"kind", to_string(state.kind())}, {"data", std::move(data)}};
}

inline QuantumState state_from_json(const Json& j) {
  try {
    if (!j.is_object()) fail(ErrorCode::parse_error, "state file must hold a JSON object");
    const Dims dims = j.at("dims").get<Dims>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "pure" && kind != "mixed") fail(ErrorCode::parse_error, "kind must be \"pure\" or \"mixed\"");
    std::vector<cplx> raw;
    for (const Json& entry : j.at("data")) {
      if (!entry.is_array() || entry.size() != 2) fail(ErrorCode::parse_error, "data entries must be [re, im] pairs");
      raw.emplace_back(entry[0].get<double>(), entry[1].get<double>());
    }
    return validate(dims, std::move(raw), kind == "pure" ? StateKind::pure : StateKind::mixed);
  } catch (const Json::exception& e) {
    fail(ErrorCode::parse_error, e.what());
  }
}

inline QuantumState read_state_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    fail(ErrorCode::parse_error, path + ": " + e.what());
  }
  return state_from_json(j);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::io_error, "write failed for " + path);
}

inline void write_state_file(const std::string& path, const QuantumState& state) {
  write_text_file(path, state_to_json(state).dump(2) + "\n");
}

inline Json transcript_to_json(const Transcript& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps)
    steps.push_back({{"actor", s.actor}, {"action", s.action}, {"outcome", s.outcome}, {"probability", json_number(s.probability)}});
  return Json{{"steps", std::move(steps)}, {"final_state", state_to_json(t.final_state)}};
}

inline Json measure_result_to_json(const MeasureResult& r) {
  Json j{{"value", json_number(r.value)}, {"method", to_string(r.method)}};
  if (r.method == Method::convex_roof || r.method == Method::heuristic_upper_bound) {
    j["iterations"] = r.iterations;
    j["residual"] = json_number(r.residual);
    j["converged"] = r.converged;
  }
  if (!r.ensemble.empty()) {
    Json members = Json::array();
    for (const auto& m : r.ensemble) members.push_back({{"probability", json_number(m.probability)}, {"state", state_to_json(m.state)}});
    j["ensemble"] = std::move(members);
  }
  return j;
}

inline std::string scan_csv(const ScanReport& report) {
  std::ostringstream os;
  os << "sample_index,e_ab,e_ac,e_abc,slack\n";
  for (const auto& s : report.samples)
    os << s.index << ',' << format_number(s.triple.e_ab) << ',' << format_number(s.triple.e_ac) << ','
       << format_number(s.triple.e_abc) << ',' << format_number(s.slack) << '\n';
  return os.str();
}

inline std::string region_csv(const std::vector<RegionRow>& rows) {
  std::ostringstream os;
  os << "sample_index,e_ab,e_ac,e_abc,x,y\n";
  for (const auto& r : rows)
    os << r.index << ',' << format_number(r.e_ab) << ',' << format_number(r.e_ac) << ',' << format_number(r.e_abc) << ','
       << format_number(r.x) << ',' << format_number(r.y) << '\n';
  return os.str();
}

inline Json scan_report_to_json(const ScanReport& report) {
  Json samples = Json::array();
  for (const auto& s : report.samples)
    samples.push_back({{"sample_index", s.index},
                       {"seed", s.seed},
                       {"e_ab", json_number(s.triple.e_ab)},
                       {"e_ac", json_number(s.triple.e_ac)},
                       {"e_abc", json_number(s.triple.e_abc)},
                       {"slack", json_number(s.slack)}});
  Json j{{"measure", to_string(report.measure)},
         {"dims", report.dims},
         {"master_seed", report.master_seed},
         {"slack_kind", to_string(report.kind)},
         {"tolerance", json_number(report.tolerance)},
         {"heuristic_rhs", report.heuristic_rhs},
         {"violations", report.violations},
         {"min_slack", json_number(report.samples.empty() ? 0.0 : report.min_slack)},
         {"samples", std::move(samples)}};
  j["alpha_star"] = report.alpha_star ? json_number(*report.alpha_star) : Json(nullptr);
  return j;
}

}  // namespace entmono
