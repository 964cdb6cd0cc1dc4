#pragma once

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tcasim/fta/risk.hpp"

namespace tcasim::harness {

struct FtaDocument {
  fta::BasicEvents events;
  fta::HumanFactors factors;
  fta::FactorGrid grid;
  std::map<char, double> overrides;
  double p_without = 1.0;
  std::string scenario = "baseline";
};

/// Accepts a basic-event letter (a..o) or a human-factor name.
inline void apply_override(FtaDocument& doc, const std::string& key, double value) {
  if (key.size() == 1 && key[0] >= 'a' && key[0] <= 'o') {
    if (!(value >= 0.0 && value <= 1.0)) throw Error(ErrorCode::range, "basic event " + key + " must lie in [0,1]");
    doc.overrides[key[0]] = value;
    return;
  }
  doc.factors[fta::HumanFactors::index(key)] = value;
  doc.factors.validate();
}

inline FtaDocument parse_fta_document(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::load, "FTA document must be an object");
  FtaDocument doc;
  for (const auto& [k, v] : j.items()) {
    if (k == "schema_version") {
      if (!v.is_number_integer() || v.get<int>() != 1) throw Error(ErrorCode::load, "field 'schema_version': unsupported");
    } else if (k == "scenario") {
      if (!v.is_string()) throw Error(ErrorCode::load, "field 'scenario': expected a string");
      doc.scenario = v.get<std::string>();
      if (doc.scenario == "phantom_attack")
        for (auto [e, p] : fta::phantom_attack_overrides()) doc.overrides[e] = p;
      else if (doc.scenario != "baseline")
        throw Error(ErrorCode::load, "field 'scenario': expected baseline or phantom_attack");
    } else if (k == "basic_events") {
      if (!v.is_object()) throw Error(ErrorCode::load, "field 'basic_events': expected an object");
      for (const auto& [e, p] : v.items()) {
        if (e.size() != 1 || e[0] < 'a' || e[0] > 'o') throw Error(ErrorCode::load, "field 'basic_events." + e + "': unknown field");
        if (!p.is_number()) throw Error(ErrorCode::load, "field 'basic_events." + e + "': expected a number");
        doc.events.set(e[0], p.get<double>());
      }
    } else if (k == "overrides") {
      if (!v.is_object()) throw Error(ErrorCode::load, "field 'overrides': expected an object");
      for (const auto& [e, p] : v.items()) {
        if (!p.is_number()) throw Error(ErrorCode::load, "field 'overrides." + e + "': expected a number");
        try {
          apply_override(doc, e, p.get<double>());
        } catch (const Error& err) {
          throw Error(ErrorCode::load, "field 'overrides." + e + "': " + err.what());
        }
      }
    } else if (k == "human_factors") {
      if (!v.is_object()) throw Error(ErrorCode::load, "field 'human_factors': expected an object");
      for (const auto& [f, p] : v.items()) {
        if (!p.is_number()) throw Error(ErrorCode::load, "field 'human_factors." + f + "': expected a number");
        try {
          doc.factors[fta::HumanFactors::index(f)] = p.get<double>();
        } catch (const Error&) {
          throw Error(ErrorCode::load, "field 'human_factors." + f + "': unknown field");
        }
      }
      doc.factors.validate();
    } else if (k == "grid") {
      if (!v.is_object()) throw Error(ErrorCode::load, "field 'grid': expected an object");
      for (const auto& [f, arr] : v.items()) {
        try {
          fta::HumanFactors::index(f);
        } catch (const Error&) {
          throw Error(ErrorCode::load, "field 'grid." + f + "': unknown field");
        }
        if (!arr.is_array()) throw Error(ErrorCode::load, "field 'grid." + f + "': expected an array");
        std::vector<double> values;
        for (const auto& x : arr) {
          if (!x.is_number()) throw Error(ErrorCode::load, "field 'grid." + f + "': expected numbers");
          values.push_back(x.get<double>());
        }
        doc.grid.axes[f] = values;
      }
    } else if (k == "p_without") {
      if (!v.is_number()) throw Error(ErrorCode::load, "field 'p_without': expected a number");
      doc.p_without = v.get<double>();
    } else {
      throw Error(ErrorCode::load, "field '" + k + "': unknown field");
    }
  }
  return doc;
}

inline FtaDocument load_fta_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open FTA document " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_fta_document(nlohmann::json::parse(ss.str()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::load, std::string("malformed FTA document: ") + e.what());
  }
}

inline std::vector<fta::SweepRow> fta_report(const FtaDocument& doc) {
  return fta::sensitivity_sweep(doc.events, doc.factors, doc.grid, doc.overrides, {}, doc.p_without);
}

inline nlohmann::json fta_rows_json(const std::vector<fta::SweepRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json f;
    for (std::size_t i = 0; i < fta::HumanFactors::kNames.size(); ++i) f[fta::HumanFactors::kNames[i]] = r.factors[i];
    out.push_back({{"factors", f},
                   {"p_unresolved", r.report.p_unresolved},
                   {"p_induced", r.report.p_induced},
                   {"p_top_sum", r.report.p_top_sum},
                   {"p_top_published", r.report.p_top_published},
                   {"risk_ratio", r.report.risk_ratio},
                   {"flags", r.report.flags}});
  }
  return out;
}

}  // namespace tcasim::harness
