#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "scenario/catalog.hpp"
#include "scenario/error.hpp"
#include "scenario/functional.hpp"
#include "scenario/logical.hpp"

namespace scenario {

namespace detail {

struct GroupEntry {
  ParameterTemplate tmpl;
  Provenance provenance;
};

inline Constraint instantiate(const ConstraintTemplate& t, const std::vector<std::string>& arguments,
                              const std::set<std::string>& declared, Provenance provenance, std::string id) {
  auto substitute = [&](const std::string& name) {
    auto placeholder = split_placeholder(name);
    if (!placeholder || placeholder->first >= arguments.size())
      throw Error(ErrorCode::ConstraintInstantiationError, "'" + name + "' does not name a phrase argument");
    std::string qualified = arguments[placeholder->first] + "." + placeholder->second;
    if (declared.count(qualified) == 0)
      throw Error(ErrorCode::ConstraintInstantiationError,
                  "constraint from '" + provenance.term + "' references '" + qualified + "', which this scenario does not declare");
    return qualified;
  };
  Constraint c{std::move(id), Inequality{Expr::number(0), Comparator::equal, Expr::number(0)}, std::move(provenance)};
  if (const auto* in = std::get_if<Inequality>(&t.form)) {
    c.form = in->rename(substitute);
  } else {
    Correlation k = std::get<Correlation>(t.form);
    k.target = substitute(k.target);
    k.source = substitute(k.source);
    c.form = std::move(k);
  }
  return c;
}

}  // namespace detail

/// Functional -> logical. Each instance contributes `<id>.<local>` parameters
/// from its entity templates, then its attribute effects in assignment order;
/// attribute constraints follow, then relation constraints in phrase order.
/// The scenario is assumed consistent; see the overload taking a Vocabulary.
inline LogicalScenario lower_to_logical(const FunctionalScenario& fs, const ParameterCatalog& cat) {
  if (fs.vocabulary_ref != cat.vocabulary_ref)
    throw Error(ErrorCode::VocabularyMismatch, "scenario '" + fs.scenario_id + "' uses " + fs.vocabulary_ref.domain_name +
                                                   "@" + fs.vocabulary_ref.version + ", catalog is for " +
                                                   cat.vocabulary_ref.domain_name + "@" + cat.vocabulary_ref.version);
  LogicalScenario ls;
  ls.scenario_id = fs.scenario_id;
  ls.source_ref = {fs.scenario_id, functional_hash(fs)};

  for (const auto& inst : fs.instances) {
    std::vector<detail::GroupEntry> group;
    if (auto it = cat.entity_templates.find(inst.term); it != cat.entity_templates.end())
      for (const auto& t : it->second) group.push_back({t, {"entity", inst.term, {inst.id}, {}}});
    auto find = [&](const std::string& local) {
      return std::find_if(group.begin(), group.end(), [&](const detail::GroupEntry& e) { return e.tmpl.local_name == local; });
    };

    for (const auto& assignment : fs.attributes) {
      if (assignment.instance != inst.id) continue;
      auto attr = cat.attribute_templates.find(assignment.attribute);
      if (attr == cat.attribute_templates.end()) continue;
      auto effect_it = attr->second.find(assignment.value);
      if (effect_it == attr->second.end()) continue;
      const AttributeEffect& effect = effect_it->second;
      const std::string origin = assignment.attribute + "=" + assignment.value;

      for (const auto& name : effect.remove)
        if (auto it = find(name); it != group.end()) group.erase(it);
      for (const auto& t : effect.add) {
        if (find(t.local_name) != group.end())
          throw Error(ErrorCode::DuplicateParameter, origin + " adds '" + inst.id + "." + t.local_name + "', which already exists");
        group.push_back({t, {"attribute", assignment.attribute, {inst.id}, assignment.value}});
      }
      for (const auto& ov : effect.overrides) {
        auto it = find(ov.local_name);
        if (it == group.end())
          throw Error(ErrorCode::MissingTemplate, origin + " overrides '" + inst.id + "." + ov.local_name + "', which does not exist");
        const Interval base = it->tmpl.range;
        if (ov.range.lo < base.lo || ov.range.hi > base.hi)
          throw Error(ErrorCode::OverrideWidensRange,
                      origin + " widens '" + inst.id + "." + ov.local_name + "' from [" + format_number(base.lo) + ", " +
                          format_number(base.hi) + "] to [" + format_number(ov.range.lo) + ", " + format_number(ov.range.hi) + "]");
        it->tmpl.range = ov.range;
        if (ov.distribution) it->tmpl.distribution = ov.distribution;
        if (it->tmpl.distribution)
          if (auto problem = distribution_problem(*it->tmpl.distribution, it->tmpl.range))
            throw Error(ErrorCode::BadDistribution, origin + " on '" + inst.id + "." + ov.local_name + "': " + *problem);
      }
    }

    if (group.empty())
      throw Error(ErrorCode::MissingTemplate, "entity term '" + inst.term + "' (instance " + inst.id + ") has no parameter templates");
    for (auto& e : group)
      ls.parameters.push_back({inst.id + "." + e.tmpl.local_name, e.tmpl.unit, e.tmpl.range, e.tmpl.distribution, e.tmpl.kind,
                               std::move(e.provenance)});
  }

  std::set<std::string> declared;
  for (const auto& p : ls.parameters) declared.insert(p.name);
  auto next_id = [&] { return "k" + std::to_string(ls.constraints.size()); };

  for (const auto& inst : fs.instances) {
    for (const auto& assignment : fs.attributes) {
      if (assignment.instance != inst.id) continue;
      auto attr = cat.attribute_templates.find(assignment.attribute);
      if (attr == cat.attribute_templates.end()) continue;
      auto effect_it = attr->second.find(assignment.value);
      if (effect_it == attr->second.end()) continue;
      for (const auto& t : effect_it->second.constraints)
        ls.constraints.push_back(detail::instantiate(
            t, {inst.id}, declared, {"attribute", assignment.attribute, {inst.id}, assignment.value}, next_id()));
    }
  }
  for (const auto& phrase : fs.relations) {
    auto it = cat.relation_templates.find(phrase.relation);
    if (it == cat.relation_templates.end()) continue;
    for (const auto& t : it->second)
      ls.constraints.push_back(
          detail::instantiate(t, phrase.arguments, declared, {"relation", phrase.relation, phrase.arguments, {}}, next_id()));
  }
  return ls;
}

/// Checks consistency first; any finding raises InconsistentScenario.
inline LogicalScenario lower_to_logical(const FunctionalScenario& fs, const ParameterCatalog& cat, const Vocabulary& v) {
  const ConsistencyReport report = check_consistency(fs, v);
  if (!report.ok())
    throw Error(ErrorCode::InconsistentScenario,
                "scenario '" + fs.scenario_id + "' has " + std::to_string(report.findings.size()) +
                    " consistency finding(s), first: " + report.findings.front().code + " " + report.findings.front().message);
  return lower_to_logical(fs, cat);
}

}  // namespace scenario
