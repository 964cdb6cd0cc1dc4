#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "tcasim/error.hpp"

namespace tcasim::fta {

/// Basic events a..o of the original safety study.
struct BasicEvents {
  std::array<double, 15> p = {0.16, 0.7, 0.79, 0.92, 0.61, 0.317, 0.0143, 0.0174, 0.027, 0.06, 0.03, 0.002, 0.0001, 0.17, 0.35};

  static constexpr int index(char name) {
    if (name < 'a' || name > 'o') throw Error(ErrorCode::parameter, std::string("unknown basic event '") + name + "'");
    return name - 'a';
  }
  double get(char name) const { return p[static_cast<std::size_t>(index(name))]; }
  void set(char name, double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::range, std::string("basic event ") + name + " must lie in [0,1]");
    p[static_cast<std::size_t>(index(name))] = v;
  }
  double n() const { return get('n'); }
  double o() const { return get('o'); }
};

struct HumanFactors {
  double vna = 0.0;   // visual acquisition not achieved
  double vmir = 0.0;  // maneuvering intruder
  double rnf = 0.0;   // RA not followed
  double tna = 0.0;   // TA not acted on
  double ti = 0.0;    // incorrect response

  static constexpr std::array<const char*, 5> kNames = {"VNA", "VMIR", "RNF", "TNA", "TI"};

  double& operator[](std::size_t i) {
    switch (i) {
      case 0: return vna;
      case 1: return vmir;
      case 2: return rnf;
      case 3: return tna;
      default: return ti;
    }
  }
  double operator[](std::size_t i) const { return const_cast<HumanFactors&>(*this)[i]; }

  static std::size_t index(const std::string& name) {
    for (std::size_t i = 0; i < kNames.size(); ++i)
      if (name == kNames[i]) return i;
    throw Error(ErrorCode::parameter, "unknown human factor '" + name + "'");
  }

  void validate() const {
    for (std::size_t i = 0; i < kNames.size(); ++i)
      if (!((*this)[i] >= 0.0 && (*this)[i] <= 1.0))
        throw Error(ErrorCode::range, std::string("human factor ") + kNames[i] + " must lie in [0,1]");
  }
};

inline constexpr double kUnresolvedBase = 0.413;
inline constexpr double kInducedBase = 0.11;
inline constexpr double kPublishedBase = 0.424;

inline double unresolved_component(const HumanFactors& hf) {
  hf.validate();
  return kUnresolvedBase + 0.259 * (hf.vna + hf.tna) + 0.327 * hf.rnf + 0.0008 * hf.vmir;
}

inline double induced_component(const HumanFactors& hf) {
  hf.validate();
  return kInducedBase + 0.014 * hf.vmir + 0.59 * hf.ti;
}

/// Alternate top-event form: constant 0.424 plus the variable terms of both components.
inline double published_top_event(const HumanFactors& hf) {
  hf.validate();
  return kPublishedBase + 0.259 * (hf.vna + hf.tna) + 0.327 * hf.rnf + 0.0008 * hf.vmir + 0.014 * hf.vmir + 0.59 * hf.ti;
}

inline double risk_ratio(double p_with, double p_without) {
  if (p_without == 0.0) throw Error(ErrorCode::undefined, "risk ratio undefined without a baseline probability");
  if (p_without < 0.0 || p_with < 0.0) throw Error(ErrorCode::range, "probabilities must be nonnegative");
  return p_with / p_without;
}

struct RiskReport {
  double p_unresolved = 0.0;
  double p_induced = 0.0;
  double p_top_sum = 0.0;
  double p_top_published = 0.0;
  double risk_ratio = 0.0;
  std::vector<std::string> flags;

  bool exceeds_probability() const { return std::find(flags.begin(), flags.end(), "exceeds_probability") != flags.end(); }
};

inline RiskReport top_event(const HumanFactors& hf, double p_without = 1.0) {
  RiskReport r;
  r.p_unresolved = unresolved_component(hf);
  r.p_induced = induced_component(hf);
  r.p_top_sum = r.p_unresolved + r.p_induced;
  r.p_top_published = published_top_event(hf);
  r.risk_ratio = risk_ratio(r.p_top_sum, p_without);
  if (r.p_unresolved > 1.0 || r.p_induced > 1.0 || r.p_top_sum > 1.0) r.flags.push_back("exceeds_probability");
  return r;
}

/// Assumed link from the visual-acquisition events to the human
/// factors. Raising n from its baseline moves VNA toward 1 in proportion,
/// and o does the same for TNA; at the baselines nothing changes.
struct VisualAcquisitionMapping {
  double n_baseline = 0.17;
  double o_baseline = 0.35;

  static double lift(double factor, double event, double baseline) {
    if (baseline >= 1.0) return factor;
    return std::clamp(factor + (1.0 - factor) * (event - baseline) / (1.0 - baseline), 0.0, 1.0);
  }

  HumanFactors apply(HumanFactors hf, const BasicEvents& ev) const {
    hf.vna = lift(hf.vna, ev.n(), n_baseline);
    hf.tna = lift(hf.tna, ev.o(), o_baseline);
    return hf;
  }
};

/// Event overrides of the phantom attack: nothing to visually acquire.
inline std::map<char, double> phantom_attack_overrides() { return {{'n', 1.0}, {'o', 1.0}}; }

struct FactorGrid {
  /// Values per human factor; factors without an axis keep the base value.
  std::map<std::string, std::vector<double>> axes;
};

struct SweepRow {
  HumanFactors factors;  // evaluated (post-mapping) values
  RiskReport report;
};

/// Cross product in factor order VNA, VMIR, RNF, TNA, TI; the last factor
/// varies fastest.
inline std::vector<SweepRow> sensitivity_sweep(const BasicEvents& base, const HumanFactors& base_factors, const FactorGrid& grid,
                                               const std::map<char, double>& overrides = {},
                                               const VisualAcquisitionMapping& mapping = {}, double p_without = 1.0) {
  BasicEvents ev = base;
  for (const auto& [k, v] : overrides) ev.set(k, v);
  const bool mapped = ev.n() != mapping.n_baseline || ev.o() != mapping.o_baseline;

  std::array<std::vector<double>, 5> axes;
  for (std::size_t i = 0; i < axes.size(); ++i) axes[i] = {base_factors[i]};
  for (const auto& [name, values] : grid.axes) {
    if (values.empty()) throw Error(ErrorCode::parameter, "grid axis " + name + " is empty");
    for (double v : values)
      if (!std::isfinite(v)) throw Error(ErrorCode::parameter, "grid axis " + name + " holds a non-finite value");
    axes[HumanFactors::index(name)] = values;
  }

  std::vector<SweepRow> rows;
  std::array<std::size_t, 5> idx{};
  while (true) {
    HumanFactors hf;
    for (std::size_t i = 0; i < 5; ++i) hf[i] = axes[i][idx[i]];
    hf.validate();
    HumanFactors eff = mapping.apply(hf, ev);
    SweepRow row{eff, top_event(eff, p_without)};
    if (mapped) row.report.flags.push_back("visual_acquisition_mapping");
    rows.push_back(std::move(row));
    std::size_t d = 5;
    while (d > 0) {
      --d;
      if (++idx[d] < axes[d].size()) break;
      idx[d] = 0;
      if (d == 0) return rows;
    }
  }
}

inline constexpr const char* kSweepHeader = "VNA,VMIR,RNF,TNA,TI,p_unresolved,p_induced,p_top_sum,p_top_published,risk_ratio,flags";

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < 5; ++i) out << format_number(r.factors[i]) << ',';
    out << format_number(r.report.p_unresolved) << ',' << format_number(r.report.p_induced) << ','
        << format_number(r.report.p_top_sum) << ',' << format_number(r.report.p_top_published) << ','
        << format_number(r.report.risk_ratio) << ',';
    for (std::size_t i = 0; i < r.report.flags.size(); ++i) out << (i ? ";" : "") << r.report.flags[i];
    out << '\n';
  }
}

}  // namespace tcasim::fta
