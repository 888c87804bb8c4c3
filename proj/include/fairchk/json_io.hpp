// Copyright 2026 The fairchk Authors
// SPDX-License-Identifier: Apache-2.0

// JSON encodings of reports, verdicts and run outcomes. Requires
// nlohmann/json on the include path.

#ifndef FAIRCHK_JSON_IO_HPP
#define FAIRCHK_JSON_IO_HPP

#include "json.hpp"

#include "fairchk/runtime.hpp"
#include "fairchk/subtyping.hpp"
#include "fairchk/typecheck.hpp"

namespace fairchk {

using Json = nlohmann::ordered_json;

inline Json weight_json(Weight w) { return w.finite() ? Json(w.value()) : Json(nullptr); }

inline Json to_json(const Diagnostic& d) {
  Json details = Json::object();
  for (const auto& [k, v] : d.details) details[k] = v;
  return Json{{"code", d.code},
              {"rule", d.rule},
              {"definition", d.definition},
              {"line", d.span.line},
              {"column", d.span.column},
              {"message", d.message},
              {"details", details}};
}

inline Json to_json(const CheckReport& r) {
  Json j;
  j["verdict"] = r.diagnostics.empty() ? (r.accepted ? "accepted" : "rejected") : "error";
  Json defs = Json::array();
  for (const auto& d : r.definitions) {
    Json diags = Json::array();
    for (const auto& x : d.diagnostics) diags.push_back(to_json(x));
    defs.push_back({{"name", d.name},
                    {"rank", weight_json(d.rank)},
                    {"status", d.ok ? "ok" : "rejected"},
                    {"diagnostics", diags}});
  }
  j["definitions"] = defs;
  if (!r.diagnostics.empty()) {
    Json diags = Json::array();
    for (const auto& x : r.diagnostics) diags.push_back(to_json(x));
    j["diagnostics"] = diags;
  }
  Json t = Json::object();
  for (const auto& [phase, ms] : r.timings) t[phase] = ms;
  j["timings"] = t;
  return j;
}

inline Json to_json(const TypeTable& table, const SubtypeVerdict& v) {
  Json j{{"holds", v.holds}, {"weight", v.holds ? weight_json(v.weight) : Json(nullptr)}};
  if (v.offending) {
    j["offendingPair"] = {
        {"left", render_type(table, v.offending->first, false)},
        {"right", render_type(table, v.offending->second, false)},
        {"kind", v.failure == SubtypeVerdict::Failure::Diverges ? "diverges" : "not-simulated"},
        {"reason", v.reason}};
  }
  j["simulationSize"] = v.simulation_size;
  return j;
}

inline Json to_json(const TraceEvent& e) {
  return Json{{"step", e.step}, {"rule", e.rule}, {"session", e.session}, {"detail", e.detail}};
}

inline Json to_json(const RunOutcome& o) {
  Json j{{"outcome", RunOutcome::kind_name(o.kind)}, {"steps", o.steps}};
  if (o.kind == RunOutcome::Kind::Stuck) j["dump"] = o.dump;
  return j;
}

}  // namespace fairchk

#endif  // FAIRCHK_JSON_IO_HPP
