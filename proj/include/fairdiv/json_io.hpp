#pragma once

// JSON wire formats. Rationals travel as "p/q" strings so no host ever sees
// them as floating point; parse(serialize(x)) == x bit-exactly on canonical
// forms.

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fairdiv/continuous.hpp"
#include "fairdiv/discrete.hpp"
#include "fairdiv/interval_set.hpp"
#include "fairdiv/partition.hpp"
#include "fairdiv/rational.hpp"
#include "fairdiv/realize.hpp"
#include "fairdiv/step_measure.hpp"

namespace fairdiv {

using nlohmann::json;

inline json to_json(const Rational& q) { return format_rational(q); }

inline Rational rational_from_json(const json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + ": " + e.what());
    }
  }
  if (j.is_number_integer()) return Rational(Integer(j.get<int64_t>()));
  throw std::invalid_argument(where + ": expected a rational string \"p/q\"");
}

inline json to_json(const IntervalSet& s) {
  json arr = json::array();
  for (const auto& iv : s.intervals())
    arr.push_back(json::array({to_json(iv.lo), to_json(iv.hi)}));
  return arr;
}

inline IntervalSet interval_set_from_json(const json& j, const std::string& where) {
  if (!j.is_array())
    throw std::invalid_argument(where + ": expected a list of [lo, hi] pairs");
  std::vector<HalfOpenInterval> intervals;
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2)
      throw std::invalid_argument(at + ": expected an [lo, hi] pair");
    intervals.push_back({rational_from_json(j[i][0], at + "[0]"),
                         rational_from_json(j[i][1], at + "[1]")});
  }
  try {
    return IntervalSet(std::move(intervals));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(where + ": " + e.what());
  }
}

inline json to_json(const StepMeasure& m) {
  json breakpoints = json::array();
  for (const auto& b : m.breakpoints()) breakpoints.push_back(to_json(b));
  json densities = json::array();
  for (const auto& d : m.densities()) densities.push_back(to_json(d));
  return json{{"breakpoints", std::move(breakpoints)}, {"densities", std::move(densities)}};
}

inline StepMeasure step_measure_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("breakpoints") || !j.contains("densities"))
    throw std::invalid_argument(where +
                                ": expected {\"breakpoints\": [...], \"densities\": [...]}");
  std::vector<Rational> breakpoints, densities;
  const json& bp = j["breakpoints"];
  const json& dn = j["densities"];
  if (!bp.is_array() || !dn.is_array())
    throw std::invalid_argument(where + ": breakpoints and densities must be arrays");
  for (size_t i = 0; i < bp.size(); ++i)
    breakpoints.push_back(
        rational_from_json(bp[i], where + ".breakpoints[" + std::to_string(i) + "]"));
  for (size_t i = 0; i < dn.size(); ++i)
    densities.push_back(
        rational_from_json(dn[i], where + ".densities[" + std::to_string(i) + "]"));
  try {
    return StepMeasure(std::move(breakpoints), std::move(densities));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(where + ": " + e.what());
  }
}

// Accepts either {"measures": [...]} or a bare array of measures.
inline std::vector<StepMeasure> measures_from_json(const json& j, const std::string& where) {
  const json* list = &j;
  if (j.is_object()) {
    if (!j.contains("measures"))
      throw std::invalid_argument(where + ": expected a \"measures\" array");
    list = &j["measures"];
  }
  if (!list->is_array() || list->empty())
    throw std::invalid_argument(where + ": expected a non-empty array of measures");
  std::vector<StepMeasure> measures;
  for (size_t i = 0; i < list->size(); ++i)
    measures.push_back(
        step_measure_from_json((*list)[i], where + "[" + std::to_string(i) + "]"));
  return measures;
}

inline json to_json(const Partition& p) {
  json arr = json::array();
  for (const auto& part : p.parts()) arr.push_back(to_json(part));
  return arr;
}

inline json to_json(const DiscreteProfile& p) {
  return json{{"M", p.utility_cap()}, {"utilities", p.utilities()}};
}

inline DiscreteProfile profile_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("M") || !j.contains("utilities"))
    throw std::invalid_argument(where + ": expected {\"M\": int, \"utilities\": [[...]]}");
  if (!j["M"].is_number_integer())
    throw std::invalid_argument(where + ".M: expected an integer");
  const json& rows = j["utilities"];
  if (!rows.is_array() || rows.empty())
    throw std::invalid_argument(where + ".utilities: expected a non-empty array of rows");
  std::vector<std::vector<int64_t>> utilities;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array())
      throw std::invalid_argument(where + ".utilities[" + std::to_string(i) +
                                  "]: expected an array of integers");
    std::vector<int64_t> row;
    for (size_t c = 0; c < rows[i].size(); ++c) {
      if (!rows[i][c].is_number_integer())
        throw std::invalid_argument(where + ".utilities[" + std::to_string(i) + "][" +
                                    std::to_string(c) + "]: expected an integer");
      row.push_back(rows[i][c].get<int64_t>());
    }
    utilities.push_back(std::move(row));
  }
  try {
    return DiscreteProfile(j["M"].get<int64_t>(), std::move(utilities));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(where + ": " + e.what());
  }
}

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::BinSplit:
      return "bin-split";
    case Provenance::Leftover:
      return "leftover";
    case Provenance::RawRandom:
      return "raw-random";
  }
  return "unknown";
}

// Owners are 1-based on the wire.
inline json to_json(const DiscreteAllocation& a) {
  json owner = json::array();
  for (size_t o : a.owner) owner.push_back(o + 1);
  json provenance = json::array();
  for (Provenance p : a.provenance) provenance.push_back(provenance_name(p));
  return json{{"owner", std::move(owner)},
              {"provenance", std::move(provenance)},
              {"parts", a.parts}};
}

inline json to_json(const ContinuousAllocation& a) {
  json pieces = json::array();
  for (const auto& piece : a.pieces) pieces.push_back(to_json(piece));
  json permutation;
  if (a.permutation_used) {
    permutation = json::array();
    for (size_t p : *a.permutation_used) permutation.push_back(p + 1);
  }
  return json{{"pieces", std::move(pieces)},
              {"permutation", std::move(permutation)},
              {"superfair_accepted", a.superfair_accepted}};
}

inline json to_json(const FractionMatrix& f) {
  json rows = json::array();
  for (const auto& row : f.rows()) {
    json r = json::array();
    for (const auto& entry : row) r.push_back(to_json(entry));
    rows.push_back(std::move(r));
  }
  return rows;
}

// Accepts either {"fractions": [[...]]} or a bare matrix; rows are parts,
// columns are goods, entries "p/q".
inline FractionMatrix fractions_from_json(const json& j, const std::string& where) {
  const json* rows = &j;
  if (j.is_object()) {
    if (!j.contains("fractions"))
      throw std::invalid_argument(where + ": expected a \"fractions\" matrix");
    rows = &j["fractions"];
  }
  if (!rows->is_array() || rows->empty())
    throw std::invalid_argument(where + ": expected a non-empty matrix of rationals");
  std::vector<std::vector<Rational>> entries;
  for (size_t p = 0; p < rows->size(); ++p) {
    const json& row = (*rows)[p];
    if (!row.is_array())
      throw std::invalid_argument(where + "[" + std::to_string(p) +
                                  "]: expected an array of rationals");
    std::vector<Rational> out_row;
    for (size_t c = 0; c < row.size(); ++c)
      out_row.push_back(
          rational_from_json(row[c], where + "[" + std::to_string(p) + "][" +
                                         std::to_string(c) + "]"));
    entries.push_back(std::move(out_row));
  }
  try {
    return FractionMatrix(std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(where + ": " + e.what());
  }
}

inline json to_json(const TargetMatrix& t) {
  json rows = json::array();
  for (const auto& row : t) {
    json r = json::array();
    for (const auto& entry : row) r.push_back(to_json(entry));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace fairdiv
