#pragma once

// JSON serialization for command reports.  All objects are emitted in
// insertion order with deterministic content, so identical invocations
// produce byte-identical documents.

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "workspace.hpp"

namespace asmcat {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;

inline const char* tri_word(Tri t) {
  switch (t) {
    case Tri::Yes: return "pass";
    case Tri::No: return "fail";
    default: return "unknown";
  }
}

inline int tri_exit(Tri t) {
  switch (t) {
    case Tri::Yes: return 0;
    case Tri::No: return 1;
    default: return 2;
  }
}

inline const char* status_word(ApplyResult::Status s) {
  switch (s) {
    case ApplyResult::Status::Defined: return "defined";
    case ApplyResult::Status::Stuck: return "stuck";
    default: return "out-of-fuel";
  }
}

inline Json terms_json(const std::vector<TermPtr>& ts) {
  Json a = Json::array();
  for (const auto& t : ts) a.push_back(print_term(t));
  return a;
}

inline Json table_json(const RealizerTable& table) {
  Json cells = Json::object();
  for (const auto& [e, ts] : table) cells[e] = terms_json(ts);
  return cells;
}

inline Json finobject_json(const FinObject& x) {
  Json a = Json::array();
  for (const auto& e : x.elements()) a.push_back(e);
  return a;
}

inline Json finmap_json(const FinMap& f) {
  Json j;
  j["src"] = finobject_json(f.src());
  j["dst"] = finobject_json(f.dst());
  Json t = Json::object();
  for (const auto& e : f.src().elements()) t[e] = f.apply(e);
  j["table"] = std::move(t);
  return j;
}

inline Json assembly_json(const Assembly& a) {
  Json j;
  j["name"] = a.name;
  j["carrier"] = finobject_json(a.carrier);
  j["cells"] = table_json(a.realizers);
  return j;
}

inline Json morphism_json(const TrackedMorphism& f) {
  Json j;
  j["src"] = f.src.name;
  j["dst"] = f.dst.name;
  Json t = Json::object();
  for (const auto& e : f.map.src().elements()) t[e] = f.map.apply(e);
  j["map"] = std::move(t);
  j["tracker"] = print_term(f.tracker);
  return j;
}

// Finitary data list their cells.  Membership-test data (implication,
// fiberwise universal) are reported by sampling a deterministic candidate
// pool per element.
inline Json datum_json(const PcaInstance& pca, const RealizerDatum& d,
                       Fuel fuel, int sample_bound) {
  Json j;
  switch (d.kind) {
    case DatumKind::Finitary: j["kind"] = "finitary"; break;
    case DatumKind::Impl: j["kind"] = "implication"; break;
    case DatumKind::ForAll: j["kind"] = "universal"; break;
  }
  j["carrier"] = finobject_json(d.carrier);
  if (d.kind == DatumKind::Finitary) {
    j["cells"] = table_json(d.table);
    return j;
  }
  Json cells = Json::object();
  std::vector<TermPtr> pool = pca.first_elems(sample_bound);
  for (const auto& e : d.carrier.elements()) {
    Json accepted = Json::array();
    for (const auto& t : pool)
      if (datum_member(d, pca, t, e, fuel) == Tri::Yes)
        accepted.push_back(print_term(t));
    cells[e] = std::move(accepted);
  }
  j["sampled_cells"] = std::move(cells);
  j["sample_bound"] = sample_bound;
  return j;
}

inline Json items_json(const std::vector<CheckItem>& items) {
  Json a = Json::array();
  for (const auto& it : items) {
    Json j;
    j["name"] = it.name;
    j["status"] = tri_word(it.ok);
    if (!it.note.empty()) j["note"] = it.note;
    a.push_back(std::move(j));
  }
  return a;
}

inline Json check_report_json(const CheckReport& rep) {
  Json a = Json::array();
  for (const auto& l : rep.lines) {
    Json j;
    j["name"] = l.name;
    j["status"] = tri_word(l.status);
    if (!l.detail.empty()) j["detail"] = l.detail;
    a.push_back(std::move(j));
  }
  return a;
}

inline std::string passed_of(const std::vector<CheckItem>& items) {
  std::size_t ok = 0;
  for (const auto& it : items)
    if (it.ok == Tri::Yes) ++ok;
  return std::to_string(ok) + "/" + std::to_string(items.size());
}

}  // namespace asmcat
