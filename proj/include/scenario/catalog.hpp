#pragma once

// Parameter catalog: maps vocabulary terms to parameter templates and
// relation terms to constraint templates. Constraint templates name the
// phrase arguments positionally: `A` is the first argument, `B` the second,
// and so on; in attribute templates `A` is the instance carrying the value.
//
//   {
//     "vocabulary_ref": {"domain_name": "highway", "version": "1.0"},
//     "entities":   {"truck": [{"name": "s0", "unit": "m", "range": [0, 200], "kind": "scalar-initial"}]},
//     "attributes": {"geometry": {"curve": {"add": [...], "override": [...], "remove": [...], "constraints": [...]}}},
//     "relations":  {"follows": [{"inequality": "B.s0 > A.s0"}]}
//   }

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "scenario/error.hpp"
#include "scenario/expression.hpp"
#include "scenario/json_io.hpp"
#include "scenario/logical.hpp"
#include "scenario/vocabulary.hpp"

namespace scenario {

struct ParameterTemplate {
  std::string local_name;
  std::string unit;
  Interval range;
  std::optional<Distribution> distribution;
  ParameterKind kind = ParameterKind::scalar_static;

  bool operator==(const ParameterTemplate&) const = default;
};

struct RangeOverride {
  std::string local_name;
  Interval range;
  std::optional<Distribution> distribution;  // absent: keep the current one

  bool operator==(const RangeOverride&) const = default;
};

/// An inequality or correlation whose names are placeholders (`A.s0`).
struct ConstraintTemplate {
  std::variant<Inequality, Correlation> form;

  bool operator==(const ConstraintTemplate&) const = default;
};

/// What assigning one attribute value does to the instance's parameter group.
/// Applied in the order remove, add, override.
struct AttributeEffect {
  std::vector<std::string> remove;
  std::vector<ParameterTemplate> add;
  std::vector<RangeOverride> overrides;
  std::vector<ConstraintTemplate> constraints;

  bool operator==(const AttributeEffect&) const = default;
};

struct ParameterCatalog {
  VocabularyRef vocabulary_ref;
  std::map<std::string, std::vector<ParameterTemplate>, std::less<>> entity_templates;
  std::map<std::string, std::map<std::string, AttributeEffect, std::less<>>, std::less<>> attribute_templates;
  std::map<std::string, std::vector<ConstraintTemplate>, std::less<>> relation_templates;
  std::vector<std::string> warnings;  // vocabulary terms the catalog never mentions
};

/// Splits a placeholder `X.local` into (argument index, local name).
inline std::optional<std::pair<std::size_t, std::string>> split_placeholder(std::string_view name) {
  if (name.size() < 3 || name[1] != '.' || name[0] < 'A' || name[0] > 'Z') return std::nullopt;
  std::string_view local = name.substr(2);
  if (local.find('.') != std::string_view::npos) return std::nullopt;
  return std::pair{static_cast<std::size_t>(name[0] - 'A'), std::string(local)};
}

inline std::set<std::string> constraint_template_names(const ConstraintTemplate& t) {
  if (const auto* in = std::get_if<Inequality>(&t.form)) return in->variables();
  const auto& c = std::get<Correlation>(t.form);
  return {c.target, c.source};
}

namespace detail {

inline bool is_local_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

inline std::optional<Distribution> catalog_distribution(const Json& j, const std::string& context, const Interval& range) {
  const Json* d = schema::optional_field(j, "distribution");
  if (d == nullptr) return std::nullopt;
  std::optional<Distribution> dist = distribution_from_json(*d, context + ".distribution", false);
  if (auto problem = distribution_problem(*dist, range)) throw Error(ErrorCode::BadDistribution, context + ": " + *problem);
  return dist;
}

inline Interval catalog_range(const Json& j, const std::string& context) {
  Interval r = range_from_json(schema::field(j, context, "range"), context);
  if (!range_ok(r))
    throw Error(ErrorCode::BadRange, context + ": range [" + format_number(r.lo) + ", " + format_number(r.hi) + "] has lo > hi");
  return r;
}

inline ParameterTemplate parse_parameter_template(const Json& j, const std::string& context) {
  ParameterTemplate t;
  t.local_name = schema::string_field(j, context, "name");
  if (!is_local_name(t.local_name))
    throw Error(ErrorCode::SchemaViolation, context + ": malformed parameter name '" + t.local_name + "'");
  const std::string where = context + " ('" + t.local_name + "')";
  t.unit = schema::string_field(j, where, "unit");
  t.range = catalog_range(j, where);
  t.distribution = catalog_distribution(j, where, t.range);
  if (const Json* k = schema::optional_field(j, "kind")) t.kind = parse_parameter_kind(schema::string_of(*k, where + ".kind"));
  return t;
}

inline std::vector<ParameterTemplate> parse_template_set(const Json& list, const std::string& context) {
  if (!list.is_array()) throw Error(ErrorCode::SchemaViolation, context + ": expected an array");
  std::vector<ParameterTemplate> out;
  std::set<std::string> names;
  for (std::size_t i = 0; i < list.size(); ++i) {
    ParameterTemplate t = parse_parameter_template(list[i], context + "[" + std::to_string(i) + "]");
    if (!names.insert(t.local_name).second)
      throw Error(ErrorCode::DuplicateParameter, context + ": parameter '" + t.local_name + "' declared twice");
    out.push_back(std::move(t));
  }
  return out;
}

inline ConstraintTemplate parse_constraint_template(const Json& j, const std::string& context) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, context + ": expected an object");
  if (const Json* e = schema::optional_field(j, "inequality")) return {parse_inequality(schema::string_of(*e, context))};
  if (const Json* c = schema::optional_field(j, "correlation")) {
    const std::string where = context + ".correlation";
    Correlation k{schema::string_field(*c, where, "target"), schema::string_field(*c, where, "source"),
                  schema::number_field(*c, where, "slope"), schema::number_field(*c, where, "intercept"),
                  schema::number_field(*c, where, "tolerance")};
    if (!(k.tolerance >= 0.0)) throw Error(ErrorCode::SchemaViolation, where + ": tolerance must be >= 0");
    return {std::move(k)};
  }
  throw Error(ErrorCode::SchemaViolation, context + ": expected 'inequality' or 'correlation'");
}

inline std::vector<ConstraintTemplate> parse_constraint_list(const Json& list, const std::string& context) {
  if (!list.is_array()) throw Error(ErrorCode::SchemaViolation, context + ": expected an array");
  std::vector<ConstraintTemplate> out;
  for (std::size_t i = 0; i < list.size(); ++i)
    out.push_back(parse_constraint_template(list[i], context + "[" + std::to_string(i) + "]"));
  return out;
}

/// Local names any instance of `entity` can carry after attribute effects.
inline std::set<std::string> producible_names(const ParameterCatalog& cat, const Vocabulary& v, const std::string& entity) {
  std::set<std::string> out;
  if (auto it = cat.entity_templates.find(entity); it != cat.entity_templates.end())
    for (const auto& t : it->second) out.insert(t.local_name);
  for (const auto& [attribute, values] : cat.attribute_templates) {
    const Term* term = v.find(attribute, TermKind::attribute);
    if (term == nullptr || !term->applies_to_entity(entity)) continue;
    for (const auto& [value, effect] : values)
      for (const auto& t : effect.add) out.insert(t.local_name);
  }
  return out;
}

inline std::vector<std::string> entities_for(const Vocabulary& v, const Term& term) {
  if (!term.applies_to.empty()) return term.applies_to;
  std::vector<std::string> out;
  for (const auto& [name, t] : v.terms)
    if (t.kind == TermKind::entity) out.push_back(name);
  return out;
}

inline void check_bound(const ParameterCatalog& cat, const Vocabulary& v, const Term& term,
                        const std::vector<ConstraintTemplate>& templates, std::size_t arity, const std::string& context) {
  const std::vector<std::string> candidates = entities_for(v, term);
  for (const auto& t : templates) {
    for (const auto& name : constraint_template_names(t)) {
      auto placeholder = split_placeholder(name);
      if (!placeholder || placeholder->first >= arity)
        throw Error(ErrorCode::UnboundConstraintParameter,
                    context + ": '" + name + "' is not a placeholder of the form A.name .. " +
                        std::string(1, static_cast<char>('A' + arity - 1)) + ".name");
      bool bound = false;
      for (const auto& entity : candidates) bound = bound || producible_names(cat, v, entity).count(placeholder->second) != 0;
      if (!bound)
        throw Error(ErrorCode::UnboundConstraintParameter,
                    context + ": no entity that '" + term.name + "' applies to produces parameter '" + placeholder->second + "'");
    }
  }
}

}  // namespace detail

inline ParameterCatalog catalog_from_json(const Json& doc, const Vocabulary& v) {
  if (!doc.is_object()) throw Error(ErrorCode::SchemaViolation, "catalog: expected a JSON object");
  ParameterCatalog cat;
  const Json& ref = schema::object_field(doc, "catalog", "vocabulary_ref");
  cat.vocabulary_ref = {schema::string_field(ref, "vocabulary_ref", "domain_name"),
                        schema::string_field(ref, "vocabulary_ref", "version")};
  if (cat.vocabulary_ref != v.ref())
    throw Error(ErrorCode::VocabularyMismatch, "catalog is bound to " + cat.vocabulary_ref.domain_name + "@" +
                                                   cat.vocabulary_ref.version + ", vocabulary is " + v.domain_name + "@" + v.version);

  for (const auto& [entity, list] : schema::object_field(doc, "catalog", "entities").items()) {
    if (v.find(entity, TermKind::entity) == nullptr)
      throw Error(ErrorCode::UnknownTerm, "catalog entities: '" + entity + "' is not an entity term");
    cat.entity_templates.emplace(entity, detail::parse_template_set(list, "entities." + entity));
  }

  for (const auto& [attribute, values] : schema::object_field(doc, "catalog", "attributes").items()) {
    const Term* term = v.find(attribute, TermKind::attribute);
    if (term == nullptr) throw Error(ErrorCode::UnknownTerm, "catalog attributes: '" + attribute + "' is not an attribute term");
    if (!values.is_object()) throw Error(ErrorCode::SchemaViolation, "attributes." + attribute + ": expected an object");
    for (const auto& [value, body] : values.items()) {
      const std::string context = "attributes." + attribute + "." + value;
      if (!term->allows_value(value))
        throw Error(ErrorCode::UnknownTerm, context + ": '" + value + "' is not an allowed value of '" + attribute + "'");
      if (!body.is_object()) throw Error(ErrorCode::SchemaViolation, context + ": expected an object");
      AttributeEffect effect;
      if (const Json* r = schema::optional_field(body, "remove")) {
        if (!r->is_array()) throw Error(ErrorCode::SchemaViolation, context + ".remove: expected an array");
        for (const Json& n : *r) effect.remove.push_back(schema::string_of(n, context + ".remove"));
      }
      if (const Json* a = schema::optional_field(body, "add")) effect.add = detail::parse_template_set(*a, context + ".add");
      if (const Json* o = schema::optional_field(body, "override")) {
        if (!o->is_array()) throw Error(ErrorCode::SchemaViolation, context + ".override: expected an array");
        for (const Json& item : *o) {
          RangeOverride ov;
          ov.local_name = schema::string_field(item, context + ".override", "name");
          const std::string where = context + ".override ('" + ov.local_name + "')";
          ov.range = detail::catalog_range(item, where);
          ov.distribution = detail::catalog_distribution(item, where, ov.range);
          effect.overrides.push_back(std::move(ov));
        }
      }
      if (const Json* c = schema::optional_field(body, "constraints"))
        effect.constraints = detail::parse_constraint_list(*c, context + ".constraints");
      cat.attribute_templates[attribute].emplace(value, std::move(effect));
    }
  }

  for (const auto& [relation, list] : schema::object_field(doc, "catalog", "relations").items()) {
    if (v.find(relation, TermKind::relation) == nullptr)
      throw Error(ErrorCode::UnknownTerm, "catalog relations: '" + relation + "' is not a relation term");
    cat.relation_templates.emplace(relation, detail::parse_constraint_list(list, "relations." + relation));
  }

  // Placeholder binding is checked once every template set is known.
  for (const auto& [relation, templates] : cat.relation_templates) {
    const Term& term = *v.find(relation);
    detail::check_bound(cat, v, term, templates, term.arity, "relations." + relation);
  }
  for (const auto& [attribute, values] : cat.attribute_templates) {
    const Term& term = *v.find(attribute);
    for (const auto& [value, effect] : values)
      detail::check_bound(cat, v, term, effect.constraints, 1, "attributes." + attribute + "." + value);
  }

  for (const auto& [name, term] : v.terms) {
    const bool mentioned = cat.entity_templates.count(name) || cat.attribute_templates.count(name) ||
                           cat.relation_templates.count(name);
    if (!mentioned) cat.warnings.push_back("vocabulary term '" + name + "' has no catalog entry");
  }
  return cat;
}

inline ParameterCatalog load_parameter_catalog(std::string_view source, const Vocabulary& v) {
  return catalog_from_json(parse_json(source), v);
}

}  // namespace scenario
