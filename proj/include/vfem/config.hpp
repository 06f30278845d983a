#pragma once

// JSON run configuration and certificate/radii serialization.  Interval
// endpoints are emitted both as decimals (for humans) and as C99 hex floats
// (bit-exact round trips for machine checking); unknown configuration keys
// are rejected so typos cannot silently fall back to defaults.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vfem/driver.hpp"

namespace vfem {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& j, const char* where,
                           std::initializer_list<const char*> known) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok)
      throw ConfigError(std::string("config: unknown key \"") + key +
                        "\" in " + where);
  }
}

inline double require_number(const json& j, const char* where) {
  if (!j.is_number())
    throw ConfigError(std::string("config: ") + where + " must be a number");
  return j.get<double>();
}

inline std::string hex_float(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

inline json interval_to_json(const Interval& x) {
  return json{{"lo", x.lo()},
              {"hi", x.hi()},
              {"lo_hex", hex_float(x.lo())},
              {"hi_hex", hex_float(x.hi())}};
}

inline Interval interval_from_json(const json& j, const char* where) {
  if (j.is_number()) return Interval(j.get<double>());
  if (!j.is_object())
    throw ConfigError(std::string("config: ") + where +
                      " must be a number or an endpoint object");
  reject_unknown(j, where, {"lo", "hi", "lo_hex", "hi_hex"});
  double lo, hi;
  if (j.contains("lo_hex") && j.contains("hi_hex")) {
    lo = std::strtod(j.at("lo_hex").get<std::string>().c_str(), nullptr);
    hi = std::strtod(j.at("hi_hex").get<std::string>().c_str(), nullptr);
  } else {
    lo = require_number(j.at("lo"), where);
    hi = require_number(j.at("hi"), where);
  }
  if (!(lo <= hi))
    throw ConfigError(std::string("config: ") + where +
                      " has inverted endpoints");
  return Interval(lo, hi);
}

}  // namespace detail

inline Forcing forcing_from_json(const nlohmann::json& j) {
  detail::reject_unknown(j, "forcing", {"period", "terms"});
  Forcing f;
  if (j.contains("period"))
    f.period = detail::interval_from_json(j.at("period"), "forcing.period");
  if (!j.contains("terms") || !j.at("terms").is_array())
    throw ConfigError("config: forcing.terms must be an array");
  for (const auto& t : j.at("terms")) {
    detail::reject_unknown(t, "forcing term",
                           {"amplitude", "spatial_mode", "temporal"});
    ForcingTerm term;
    term.amplitude =
        detail::interval_from_json(t.at("amplitude"), "amplitude");
    term.spatial_mode = t.at("spatial_mode").get<int>();
    if (term.spatial_mode < 1)
      throw ConfigError("config: spatial_mode must be at least 1");
    if (t.contains("temporal")) {
      const auto& w = t.at("temporal");
      detail::reject_unknown(w, "temporal wave", {"c0", "c1", "phase"});
      if (w.contains("c0"))
        term.temporal.c0 = detail::interval_from_json(w.at("c0"), "c0");
      if (w.contains("c1"))
        term.temporal.c1 = detail::interval_from_json(w.at("c1"), "c1");
      if (w.contains("phase"))
        term.temporal.phase =
            detail::interval_from_json(w.at("phase"), "phase");
    }
    f.terms.push_back(term);
  }
  return f;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  detail::reject_unknown(
      j, "run configuration",
      {"forcing", "mesh_k", "steps_per_period", "leading_count",
       "taylor_order", "norm_mode", "grid", "use_global_radii_init",
       "initial_box", "burn_in_periods", "initial_inflate",
       "reference_substeps"});
  RunConfig cfg;
  if (!j.contains("forcing"))
    throw ConfigError("config: missing forcing section");
  cfg.forcing = forcing_from_json(j.at("forcing"));
  if (j.contains("mesh_k")) cfg.mesh_k = j.at("mesh_k").get<int>();
  if (j.contains("steps_per_period"))
    cfg.steps_per_period = j.at("steps_per_period").get<int>();
  if (j.contains("leading_count"))
    cfg.leading_count = j.at("leading_count").get<int>();
  if (j.contains("taylor_order"))
    cfg.taylor_order = j.at("taylor_order").get<int>();
  if (j.contains("norm_mode")) {
    std::string m = j.at("norm_mode").get<std::string>();
    if (m == "triangle")
      cfg.norm_mode = NormMode::triangle;
    else if (m == "orthogonal")
      cfg.norm_mode = NormMode::orthogonal;
    else
      throw ConfigError("config: norm_mode must be triangle or orthogonal");
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    detail::reject_unknown(g, "grid", {"resolution", "passes"});
    if (g.contains("resolution"))
      cfg.grid.resolution = g.at("resolution").get<int>();
    if (g.contains("passes")) cfg.grid.passes = g.at("passes").get<int>();
  }
  if (j.contains("use_global_radii_init"))
    cfg.use_global_radii_init = j.at("use_global_radii_init").get<bool>();
  if (j.contains("initial_box")) {
    for (const auto& b : j.at("initial_box")) {
      Interval x = detail::interval_from_json(b, "initial_box entry");
      cfg.initial_box.push_back({x.lo(), x.hi()});
    }
  }
  if (j.contains("burn_in_periods"))
    cfg.burn_in_periods = j.at("burn_in_periods").get<int>();
  if (j.contains("initial_inflate"))
    cfg.initial_inflate = j.at("initial_inflate").get<double>();
  if (j.contains("reference_substeps"))
    cfg.reference_substeps = j.at("reference_substeps").get<int>();
  try {
    validate(cfg);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json terms = nlohmann::json::array();
  for (const ForcingTerm& t : cfg.forcing.terms)
    terms.push_back({{"amplitude", detail::interval_to_json(t.amplitude)},
                     {"spatial_mode", t.spatial_mode},
                     {"temporal",
                      {{"c0", detail::interval_to_json(t.temporal.c0)},
                       {"c1", detail::interval_to_json(t.temporal.c1)},
                       {"phase",
                        detail::interval_to_json(t.temporal.phase)}}}});
  nlohmann::json j{
      {"forcing",
       {{"period", detail::interval_to_json(cfg.forcing.period)},
        {"terms", terms}}},
      {"mesh_k", cfg.mesh_k},
      {"steps_per_period", cfg.steps_per_period},
      {"leading_count", cfg.leading_count},
      {"taylor_order", cfg.taylor_order},
      {"norm_mode",
       cfg.norm_mode == NormMode::triangle ? "triangle" : "orthogonal"},
      {"grid",
       {{"resolution", cfg.grid.resolution}, {"passes", cfg.grid.passes}}},
      {"use_global_radii_init", cfg.use_global_radii_init},
      {"burn_in_periods", cfg.burn_in_periods},
      {"initial_inflate", cfg.initial_inflate},
      {"reference_substeps", cfg.reference_substeps}};
  if (!cfg.initial_box.empty()) {
    nlohmann::json box = nlohmann::json::array();
    for (const auto& [lo, hi] : cfg.initial_box)
      box.push_back(detail::interval_to_json(Interval(lo, hi)));
    j["initial_box"] = box;
  }
  return j;
}

inline nlohmann::json radii_to_json(const TrappingRadii& r) {
  auto level = [&](int i, const Interval& R, const Interval& S) {
    nlohmann::json j{{"radius", detail::interval_to_json(R)},
                     {"method", r.method[i]},
                     {"slope", detail::interval_to_json(S)}};
    if (i > 0) j["certificate_checked"] = check_certificate(r.witness[i], R, S);
    return j;
  };
  return nlohmann::json{{"R1", level(0, r.R1, Interval(0.0))},
                        {"R2", level(1, r.R2, r.S2)},
                        {"R3", level(2, r.R3, r.S3)},
                        {"R4", level(3, r.R4, r.S4)},
                        {"R5", level(4, r.R5, r.S5)}};
}

namespace detail {

inline json box_to_json(const IVector& box) {
  json out = json::array();
  for (const Interval& b : box) out.push_back(interval_to_json(b));
  return out;
}

inline json trace_step_to_json(const TraceStep& ts) {
  return json{
      {"window", interval_to_json(ts.window)},
      {"beta_box", box_to_json(ts.beta_box)},
      {"eps", box_to_json(ts.eps)},
      {"norm_bounds",
       {{"M1", interval_to_json(ts.bounds.M1)},
        {"M2", interval_to_json(ts.bounds.M2)},
        {"M3", interval_to_json(ts.bounds.M3)},
        {"M4", interval_to_json(ts.bounds.M4)},
        {"M5", interval_to_json(ts.bounds.M5)},
        {"R1", interval_to_json(ts.bounds.R1)},
        {"R2", interval_to_json(ts.bounds.R2)},
        {"R3", interval_to_json(ts.bounds.R3)},
        {"R4", interval_to_json(ts.bounds.R4)},
        {"R5", interval_to_json(ts.bounds.R5)}}},
      {"unresolved", {{"h1", interval_to_json(ts.qk.h1)},
                      {"l2", interval_to_json(ts.qk.l2)}}}};
}

}  // namespace detail

inline nlohmann::json certificate_to_json(const Certificate& cert,
                                          bool with_trace = true) {
  nlohmann::json j{{"verdict", to_string(cert.verdict)},
                   {"reason", cert.reason},
                   {"completed", cert.run.completed},
                   {"radii", radii_to_json(cert.run.radii)},
                   {"initial_box", detail::box_to_json(cert.run.initial_box)}};
  if (cert.run.completed)
    j["final_box"] = detail::box_to_json(cert.run.final_box);
  if (cert.run.failed_step >= 0) {
    j["failed_step"] = cert.run.failed_step;
    j["failure"] = cert.run.failure;
  }
  if (with_trace) {
    nlohmann::json trace = nlohmann::json::array();
    for (const TraceStep& ts : cert.run.trace)
      trace.push_back(detail::trace_step_to_json(ts));
    j["trace"] = trace;
  }
  return j;
}

}  // namespace vfem
