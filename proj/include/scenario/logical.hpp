#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scenario/error.hpp"
#include "scenario/expression.hpp"
#include "scenario/functional.hpp"
#include "scenario/interval.hpp"
#include "scenario/json_io.hpp"

namespace scenario {

enum class DistributionKind { uniform, truncated_gaussian };

struct Distribution {
  DistributionKind kind = DistributionKind::uniform;
  double mean = 0.0;    // truncated_gaussian only
  double stddev = 0.0;  // truncated_gaussian only

  static Distribution uniform() { return {}; }
  static Distribution truncated_gaussian(double mean, double stddev) {
    return {DistributionKind::truncated_gaussian, mean, stddev};
  }
  bool operator==(const Distribution&) const = default;
};

/// Reason the distribution is invalid on `range`, or nullopt.
inline std::optional<std::string> distribution_problem(const Distribution& d, const Interval& range) {
  if (d.kind != DistributionKind::truncated_gaussian) return std::nullopt;
  if (!std::isfinite(d.stddev) || d.stddev <= 0.0) return "truncated-gaussian stddev must be > 0";
  if (!std::isfinite(d.mean) || !range.contains(d.mean)) return "truncated-gaussian mean must lie within the range";
  return std::nullopt;
}

inline bool range_ok(const Interval& r) { return std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi; }

enum class ParameterKind { scalar_static, scalar_initial };

inline std::string_view to_string(ParameterKind k) {
  return k == ParameterKind::scalar_static ? "scalar-static" : "scalar-initial";
}

inline ParameterKind parse_parameter_kind(std::string_view s) {
  if (s == "scalar-static") return ParameterKind::scalar_static;
  if (s == "scalar-initial") return ParameterKind::scalar_initial;
  throw Error(ErrorCode::SchemaViolation, "unknown parameter kind '" + std::string(s) + "'");
}

/// The functional element a parameter or constraint was lowered from.
struct Provenance {
  std::string source;  // "entity" | "attribute" | "relation"
  std::string term;
  std::vector<std::string> instances;
  std::string value;  // attribute value, attributes only

  bool operator==(const Provenance&) const = default;
};

struct Parameter {
  std::string name;
  std::string unit;
  Interval range;
  std::optional<Distribution> distribution;  // absent: uniform by default
  ParameterKind kind = ParameterKind::scalar_static;
  Provenance provenance;

  bool operator==(const Parameter&) const = default;
};

/// target ∈ [slope·source + intercept − tolerance, slope·source + intercept + tolerance]
struct Correlation {
  std::string target;
  std::string source;
  double slope = 1.0;
  double intercept = 0.0;
  double tolerance = 0.0;

  template <typename Lookup>
  bool holds(const Lookup& lookup) const {
    const double center = slope * lookup(source) + intercept;
    const double t = lookup(target);
    return t >= center - tolerance && t <= center + tolerance;
  }

  std::string to_string() const {
    return target + " = " + format_number(slope) + " * " + source + " + " + format_number(intercept) + " ± " +
           format_number(tolerance);
  }

  bool operator==(const Correlation&) const = default;
};

struct Constraint {
  std::string id;
  std::variant<Inequality, Correlation> form;
  Provenance provenance;

  std::set<std::string> variables() const {
    if (const auto* in = std::get_if<Inequality>(&form)) return in->variables();
    const auto& c = std::get<Correlation>(form);
    return {c.target, c.source};
  }

  template <typename Lookup>
  bool holds(const Lookup& lookup) const {
    return std::visit([&](const auto& f) { return f.holds(lookup); }, form);
  }

  std::string to_string() const {
    return std::visit([](const auto& f) { return f.to_string(); }, form);
  }

  bool operator==(const Constraint&) const = default;
};

struct SourceRef {
  std::string scenario_id;
  std::string hash;
  bool operator==(const SourceRef&) const = default;
};

struct LogicalScenario {
  std::string scenario_id;
  SourceRef source_ref;
  std::vector<Parameter> parameters;
  std::vector<Constraint> constraints;

  const Parameter* find_parameter(std::string_view name) const {
    for (const auto& p : parameters)
      if (p.name == name) return &p;
    return nullptr;
  }

  bool operator==(const LogicalScenario&) const = default;
};

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
  std::vector<Finding> findings;
  bool ok() const { return findings.empty(); }
  bool has(std::string_view code) const {
    return std::any_of(findings.begin(), findings.end(), [&](const Finding& f) { return f.code == code; });
  }
};

/// Interval pre-check of a single constraint: true means no assignment within
/// the parameter ranges can satisfy it. Sound, not complete.
inline bool interval_infeasible(const Constraint& c, const std::map<std::string, Interval, std::less<>>& ranges) {
  auto lookup = [&](const std::string& name) { return ranges.at(name); };
  if (const auto* in = std::get_if<Inequality>(&c.form))
    return never_satisfiable(in->lhs.evaluate_interval(lookup), in->comparator, in->rhs.evaluate_interval(lookup));
  const auto& k = std::get<Correlation>(c.form);
  const Interval center = Interval::point(k.slope) * ranges.at(k.source) + Interval::point(k.intercept);
  const Interval band = center + Interval{-k.tolerance, k.tolerance};
  return never_satisfiable(ranges.at(k.target), Comparator::equal, band);
}

inline ValidationReport validate_logical(const LogicalScenario& ls) {
  ValidationReport report;
  auto add = [&](std::string code, std::vector<std::string> elements, std::string message) {
    report.findings.push_back({std::move(code), std::move(elements), std::move(message)});
  };

  std::map<std::string, Interval, std::less<>> ranges;
  std::set<std::string> bad_ranges;
  for (const auto& p : ls.parameters) {
    if (!ranges.emplace(p.name, p.range).second) add("DUPLICATE_PARAMETER", {p.name}, "parameter declared twice");
    if (!range_ok(p.range)) {
      bad_ranges.insert(p.name);
      add("EMPTY_RANGE", {p.name}, "range [" + std::to_string(p.range.lo) + ", " + std::to_string(p.range.hi) + "] is empty");
      continue;
    }
    if (p.distribution)
      if (auto problem = distribution_problem(*p.distribution, p.range)) add("BAD_DISTRIBUTION", {p.name}, *problem);
  }

  std::set<std::string> ids;
  for (const auto& c : ls.constraints) {
    if (!ids.insert(c.id).second) add("DUPLICATE_CONSTRAINT", {c.id}, "constraint id used twice");
    bool resolvable = true;
    for (const auto& name : c.variables()) {
      if (ranges.count(name) == 0) {
        add("UNRESOLVED_REFERENCE", {c.id, name}, "constraint references undeclared parameter '" + name + "'");
        resolvable = false;
      } else if (bad_ranges.count(name) != 0) {
        resolvable = false;
      }
    }
    if (const auto* in = std::get_if<Inequality>(&c.form)) {
      if (in->lhs.degree() > 1 || in->rhs.degree() > 1) {
        add("MALFORMED_CONSTRAINT", {c.id}, "inequality is not linear");
        resolvable = false;
      }
      if (in->variables().empty()) add("MALFORMED_CONSTRAINT", {c.id}, "inequality references no parameter");
    } else {
      const auto& k = std::get<Correlation>(c.form);
      if (!std::isfinite(k.slope) || !std::isfinite(k.intercept) || !std::isfinite(k.tolerance) || k.tolerance < 0.0) {
        add("MALFORMED_CONSTRAINT", {c.id}, "correlation needs finite coefficients and tolerance >= 0");
        resolvable = false;
      }
    }
    if (resolvable && interval_infeasible(c, ranges))
      add("INTERVAL_INFEASIBLE", {c.id}, "constraint " + c.id + " (" + c.to_string() + ") cannot hold within the parameter ranges");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline Json provenance_to_json(const Provenance& p) {
  Json j = {{"source", p.source}, {"term", p.term}, {"instances", p.instances}};
  if (p.source == "attribute") j["value"] = p.value;
  return j;
}

inline Provenance provenance_from_json(const Json& j) {
  Provenance p;
  p.source = schema::string_field(j, "provenance", "source");
  if (p.source != "entity" && p.source != "attribute" && p.source != "relation")
    throw Error(ErrorCode::SchemaViolation, "provenance: unknown source '" + p.source + "'");
  p.term = schema::string_field(j, "provenance", "term");
  for (const Json& i : schema::array_field(j, "provenance", "instances")) p.instances.push_back(schema::string_of(i, "instance"));
  if (p.source == "attribute") p.value = schema::string_field(j, "provenance", "value");
  return p;
}

inline Json distribution_to_json(const std::optional<Distribution>& d) {
  if (!d) return {{"type", "uniform"}, {"source", "default"}};
  if (d->kind == DistributionKind::uniform) return {{"type", "uniform"}, {"source", "declared"}};
  return {{"type", "truncated-gaussian"}, {"mean", d->mean}, {"stddev", d->stddev}, {"source", "declared"}};
}

/// Parses a distribution record; `allow_default` accepts the `source: default` marker.
inline std::optional<Distribution> distribution_from_json(const Json& j, std::string_view context, bool allow_default) {
  const std::string type = schema::string_field(j, context, "type");
  if (const Json* src = schema::optional_field(j, "source")) {
    const std::string s = schema::string_of(*src, std::string(context) + ".source");
    if (s == "default") {
      if (!allow_default || type != "uniform")
        throw Error(ErrorCode::SchemaViolation, std::string(context) + ": only uniform may be a default");
      return std::nullopt;
    }
    if (s != "declared") throw Error(ErrorCode::SchemaViolation, std::string(context) + ": unknown source '" + s + "'");
  }
  if (type == "uniform") return Distribution::uniform();
  if (type == "truncated-gaussian")
    return Distribution::truncated_gaussian(schema::number_field(j, context, "mean"), schema::number_field(j, context, "stddev"));
  throw Error(ErrorCode::SchemaViolation, std::string(context) + ": unknown distribution '" + type + "'");
}

inline Json range_to_json(const Interval& r) { return Json::array({r.lo, r.hi}); }

inline Interval range_from_json(const Json& j, std::string_view context) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::SchemaViolation, std::string(context) + ": range must be [lo, hi]");
  return {schema::number_of(j[0], context), schema::number_of(j[1], context)};
}

}  // namespace detail

inline Json logical_to_json(const LogicalScenario& ls) {
  Json doc = Json::object();
  doc["format"] = "logical/1";
  doc["scenario_id"] = ls.scenario_id;
  doc["source_ref"] = {{"scenario_id", ls.source_ref.scenario_id}, {"hash", ls.source_ref.hash}};
  Json params = Json::array();
  for (const auto& p : ls.parameters) {
    params.push_back({{"name", p.name},
                      {"unit", p.unit},
                      {"range", detail::range_to_json(p.range)},
                      {"distribution", detail::distribution_to_json(p.distribution)},
                      {"kind", std::string(to_string(p.kind))},
                      {"provenance", detail::provenance_to_json(p.provenance)}});
  }
  Json constraints = Json::array();
  for (const auto& c : ls.constraints) {
    Json j = {{"id", c.id}, {"provenance", detail::provenance_to_json(c.provenance)}};
    if (const auto* in = std::get_if<Inequality>(&c.form)) {
      j["form"] = "inequality";
      j["expression"] = in->to_string();
    } else {
      const auto& k = std::get<Correlation>(c.form);
      j["form"] = "correlation";
      j["target"] = k.target;
      j["source"] = k.source;
      j["slope"] = k.slope;
      j["intercept"] = k.intercept;
      j["tolerance"] = k.tolerance;
    }
    constraints.push_back(std::move(j));
  }
  doc["parameters"] = std::move(params);
  doc["constraints"] = std::move(constraints);
  return doc;
}

inline std::string serialize_logical(const LogicalScenario& ls) { return canonical_dump(logical_to_json(ls)); }

inline LogicalScenario logical_from_json(const Json& doc) {
  schema::expect_format(doc, "logical/1");
  LogicalScenario ls;
  ls.scenario_id = schema::string_field(doc, "logical", "scenario_id");
  const Json& ref = schema::object_field(doc, "logical", "source_ref");
  ls.source_ref = {schema::string_field(ref, "source_ref", "scenario_id"), schema::string_field(ref, "source_ref", "hash")};
  for (const Json& p : schema::array_field(doc, "logical", "parameters")) {
    Parameter param;
    param.name = schema::string_field(p, "parameter", "name");
    const std::string context = "parameter '" + param.name + "'";
    param.unit = schema::string_field(p, context, "unit");
    param.range = detail::range_from_json(schema::field(p, context, "range"), context);
    param.distribution = detail::distribution_from_json(schema::object_field(p, context, "distribution"), context, true);
    param.kind = parse_parameter_kind(schema::string_field(p, context, "kind"));
    param.provenance = detail::provenance_from_json(schema::object_field(p, context, "provenance"));
    ls.parameters.push_back(std::move(param));
  }
  for (const Json& c : schema::array_field(doc, "logical", "constraints")) {
    const std::string id = schema::string_field(c, "constraint", "id");
    const std::string context = "constraint '" + id + "'";
    const std::string form = schema::string_field(c, context, "form");
    auto read_form = [&]() -> std::variant<Inequality, Correlation> {
      if (form == "inequality") return parse_inequality(schema::string_field(c, context, "expression"));
      if (form == "correlation")
        return Correlation{schema::string_field(c, context, "target"), schema::string_field(c, context, "source"),
                           schema::number_field(c, context, "slope"), schema::number_field(c, context, "intercept"),
                           schema::number_field(c, context, "tolerance")};
      throw Error(ErrorCode::SchemaViolation, context + ": unknown form '" + form + "'");
    };
    Constraint con{id, read_form(), detail::provenance_from_json(schema::object_field(c, context, "provenance"))};
    ls.constraints.push_back(std::move(con));
  }
  return ls;
}

inline LogicalScenario deserialize_logical(std::string_view text) { return logical_from_json(parse_json(text)); }

inline std::string logical_hash(const LogicalScenario& ls) { return sha256_hex(serialize_logical(ls)); }

}  // namespace scenario
