#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstring>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "scenario/catalog.hpp"
#include "scenario/concretize.hpp"
#include "scenario/functional.hpp"
#include "scenario/json_io.hpp"
#include "scenario/logical.hpp"
#include "scenario/testcase.hpp"
#include "scenario/vocabulary.hpp"

namespace testing_support {

using namespace scenario;

inline std::string sample_path(const std::string& name) { return std::string(SCENARIO_SAMPLES_DIR) + "/" + name; }
inline std::string data_path(const std::string& name) { return std::string(SCENARIO_TEST_DATA_DIR) + "/" + name; }

inline Vocabulary highway_vocabulary() { return load_vocabulary(read_file(sample_path("vocabulary.json"))); }
inline ParameterCatalog highway_catalog(const Vocabulary& v) {
  return load_parameter_catalog(read_file(sample_path("catalog.json")), v);
}
inline std::string follow_text() { return read_file(sample_path("car_follows_truck.sfd")); }

using Gen = std::mt19937_64;

inline std::size_t pick(Gen& g, std::size_t lo, std::size_t hi) {  // inclusive
  return std::uniform_int_distribution<std::size_t>(lo, hi)(g);
}
inline long long pick_int(Gen& g, long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(g); }
inline bool coin(Gen& g, double p = 0.5) { return std::bernoulli_distribution(p)(g); }

template <class T>
const T& pick_one(Gen& g, const std::vector<T>& v) {
  return v[pick(g, 0, v.size() - 1)];
}

inline std::vector<std::string> subset(Gen& g, const std::vector<std::string>& from) {
  std::vector<std::string> out;
  for (const auto& s : from)
    if (coin(g)) out.push_back(s);
  return out;
}

/// Free text exercising JSON escapes and multi-byte UTF-8.
inline std::string random_text(Gen& g) {
  static const std::vector<std::string> pieces = {"lane", " ", "\"quoted\"", "back\\slash", "tab\t", "nl\n", "ü", "→", "€", "x", "42"};
  std::string s;
  for (std::size_t i = 0, n = pick(g, 0, 5); i < n; ++i) s += pick_one(g, pieces);
  return s;
}

/// Any finite double, from a random bit pattern or a small decimal.
inline double random_double(Gen& g) {
  if (coin(g)) return static_cast<double>(pick_int(g, -100000, 100000)) / 1000.0;
  while (true) {
    const std::uint64_t bits = g();
    double d;
    std::memcpy(&d, &bits, sizeof d);
    if (std::isfinite(d)) return d;
  }
}

// ---------------------------------------------------------------------------
// Vocabulary

inline Vocabulary random_vocabulary(Gen& g) {
  Vocabulary v;
  v.domain_name = "dom" + std::to_string(pick(g, 0, 99));
  v.version = std::to_string(pick(g, 0, 3)) + "." + std::to_string(pick(g, 0, 9));
  std::vector<std::string> entities;
  for (std::size_t i = 0, n = pick(g, 1, 4); i < n; ++i) {
    Term t{"ent-" + std::to_string(i), TermKind::entity, 0, {}, {}, random_text(g), false};
    entities.push_back(t.name);
    v.terms.emplace(t.name, t);
  }
  std::vector<Term> relations;
  for (std::size_t i = 0, n = pick(g, 0, 3); i < n; ++i) {
    Term t{"rel_" + std::to_string(i), TermKind::relation, pick(g, 1, 3), {}, subset(g, entities), random_text(g), false};
    relations.push_back(t);
    v.terms.emplace(t.name, t);
  }
  std::vector<Term> attributes;
  for (std::size_t i = 0, n = pick(g, 0, 3); i < n; ++i) {
    Term t{"attr" + std::to_string(i), TermKind::attribute, 0, {}, subset(g, entities), random_text(g), coin(g, 0.3)};
    for (std::size_t k = 0, m = pick(g, 1, 3); k < m; ++k) t.allowed_values.push_back("val" + std::to_string(k));
    attributes.push_back(t);
    v.terms.emplace(t.name, t);
  }
  for (std::size_t i = 0, n = relations.empty() ? 0 : pick(g, 0, 2); i < n; ++i) {
    const Term& a = pick_one(g, relations);
    std::vector<const Term*> same;
    for (const auto& r : relations)
      if (r.arity == a.arity) same.push_back(&r);
    const Term& b = *same[pick(g, 0, same.size() - 1)];
    std::vector<std::size_t> mapping(a.arity);
    for (std::size_t k = 0; k < mapping.size(); ++k) mapping[k] = k;
    std::shuffle(mapping.begin(), mapping.end(), g);
    v.relation_exclusions.push_back({a.name, b.name, mapping});
  }
  for (std::size_t i = 0, n = attributes.size() < 2 ? 0 : pick(g, 0, 2); i < n; ++i) {
    const Term& a = pick_one(g, attributes);
    const Term& b = pick_one(g, attributes);
    if (a.name == b.name) continue;
    v.value_exclusions.push_back({a.name, pick_one(g, a.allowed_values), b.name, pick_one(g, b.allowed_values)});
  }
  std::sort(v.relation_exclusions.begin(), v.relation_exclusions.end());
  v.relation_exclusions.erase(std::unique(v.relation_exclusions.begin(), v.relation_exclusions.end()), v.relation_exclusions.end());
  std::sort(v.value_exclusions.begin(), v.value_exclusions.end());
  v.value_exclusions.erase(std::unique(v.value_exclusions.begin(), v.value_exclusions.end()), v.value_exclusions.end());
  return v;
}

// ---------------------------------------------------------------------------
// Functional scenarios

/// A scenario the parser accepts: declared instances, applicable relations
/// and attributes, at most one value per (instance, attribute). Exclusions and
/// required attributes are not enforced.
inline FunctionalScenario random_functional(Gen& g, const Vocabulary& v) {
  FunctionalScenario fs;
  fs.scenario_id = "sc" + std::to_string(pick(g, 0, 999));
  fs.vocabulary_ref = v.ref();
  std::vector<std::string> entities;
  std::vector<const Term*> relations, attributes;
  for (const auto& [name, t] : v.terms) {
    if (t.kind == TermKind::entity) entities.push_back(name);
    if (t.kind == TermKind::relation) relations.push_back(&t);
    if (t.kind == TermKind::attribute) attributes.push_back(&t);
  }
  for (std::size_t i = 0, n = pick(g, 0, 5); i < n; ++i)
    fs.instances.push_back({(coin(g) ? "x" : "Veh_") + std::to_string(i), pick_one(g, entities)});
  if (fs.instances.empty()) return fs;

  for (std::size_t i = 0, n = relations.empty() ? 0 : pick(g, 0, 4); i < n; ++i) {
    const Term& r = *relations[pick(g, 0, relations.size() - 1)];
    RelationPhrase phrase{r.name, {}};
    for (std::size_t k = 0; k < r.arity; ++k) {
      std::vector<std::string> ok;
      for (const auto& inst : fs.instances)
        if (r.applies_to_entity(inst.term)) ok.push_back(inst.id);
      if (ok.empty()) break;
      phrase.arguments.push_back(pick_one(g, ok));
    }
    if (phrase.arguments.size() == r.arity) fs.relations.push_back(std::move(phrase));
  }
  std::set<std::pair<std::string, std::string>> assigned;
  for (std::size_t i = 0, n = attributes.empty() ? 0 : pick(g, 0, 5); i < n; ++i) {
    const Term& a = *attributes[pick(g, 0, attributes.size() - 1)];
    const EntityInstance& inst = pick_one(g, fs.instances);
    if (!a.applies_to_entity(inst.term) || !assigned.insert({inst.id, a.name}).second) continue;
    fs.attributes.push_back({inst.id, a.name, pick_one(g, a.allowed_values)});
  }
  return fs;
}

// ---------------------------------------------------------------------------
// Logical scenarios with an independent constraint representation

/// sum(coef[i] * x[var[i]]) + constant  cmp  0
struct LinearSpec {
  std::vector<std::pair<std::size_t, long long>> terms;
  long long constant = 0;
  Comparator cmp = Comparator::greater;
};

/// target within slope*source + intercept ± tolerance
struct CorrelationSpec {
  std::size_t target, source;
  double slope, intercept, tolerance;
};

struct GeneratedLogical {
  LogicalScenario ls;
  std::vector<LinearSpec> linear;
  std::vector<CorrelationSpec> correlations;
};

inline std::string render_linear(const LinearSpec& s, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < s.terms.size(); ++i) {
    const auto [var, coef] = s.terms[i];
    const long long mag = coef < 0 ? -coef : coef;
    if (i == 0)
      out += (coef < 0 ? "-" : "");
    else
      out += coef < 0 ? " - " : " + ";
    out += (mag == 1 ? "" : std::to_string(mag) + " * ") + names[var];
  }
  if (s.constant != 0) out += (s.constant < 0 ? " - " : " + ") + std::to_string(s.constant < 0 ? -s.constant : s.constant);
  return out + " " + std::string(to_string(s.cmp)) + " 0";
}

/// Oracle: evaluates the generated coefficient form directly. Returns the
/// signed slack (positive or zero when satisfied for non-strict forms).
inline bool oracle_holds(const LinearSpec& s, const std::vector<double>& x, long double slack = 0) {
  long double lhs = s.constant;
  for (const auto& [var, coef] : s.terms) lhs += static_cast<long double>(coef) * x[var];
  switch (s.cmp) {
    case Comparator::less: return lhs < slack;
    case Comparator::less_equal: return lhs <= slack;
    case Comparator::greater: return lhs > -slack;
    case Comparator::greater_equal: return lhs >= -slack;
    case Comparator::equal: return std::fabs(static_cast<double>(lhs)) <= slack;
  }
  return false;
}

inline bool oracle_holds(const CorrelationSpec& c, const std::vector<double>& x, double slack = 0) {
  const double center = c.slope * x[c.source] + c.intercept;
  return x[c.target] >= center - c.tolerance - slack && x[c.target] <= center + c.tolerance + slack;
}

struct LogicalShape {
  std::size_t max_parameters = 8;
  std::size_t max_constraints = 4;
  bool allow_point_ranges = true;
  bool allow_correlations = true;
};

/// Random logical scenario whose constraints all hold at a hidden witness
/// point, so the feasible region is never empty.
inline GeneratedLogical random_logical(Gen& g, LogicalShape shape = {}) {
  GeneratedLogical out;
  LogicalScenario& ls = out.ls;
  ls.scenario_id = "lg" + std::to_string(pick(g, 0, 999));
  ls.source_ref = {"fs" + std::to_string(pick(g, 0, 9)), std::string(64, '0' + static_cast<char>(pick(g, 0, 9)))};
  const std::size_t n = pick(g, 1, shape.max_parameters);
  std::vector<std::string> names;
  std::vector<double> witness;
  for (std::size_t i = 0; i < n; ++i) {
    Parameter p;
    p.name = "o" + std::to_string(i / 2) + ".p" + std::to_string(i);
    p.unit = coin(g) ? "m" : "m/s";
    const long long lo = pick_int(g, -50, 50);
    const long long width = shape.allow_point_ranges && coin(g, 0.1) ? 0 : pick_int(g, 1, 40);
    p.range = {static_cast<double>(lo), static_cast<double>(lo + width)};
    const std::size_t d = pick(g, 0, 2);
    if (d == 1) p.distribution = Distribution::uniform();
    if (d == 2 && width > 0)
      p.distribution = Distribution::truncated_gaussian(static_cast<double>(lo) + width * 0.5, std::max(0.5, width / 4.0));
    p.kind = coin(g) ? ParameterKind::scalar_static : ParameterKind::scalar_initial;
    p.provenance = {"entity", "ent", {"o" + std::to_string(i / 2)}, {}};
    names.push_back(p.name);
    // witness on the integer grid keeps the oracle arithmetic exact
    witness.push_back(static_cast<double>(pick_int(g, lo, lo + width)));
    ls.parameters.push_back(std::move(p));
  }

  for (std::size_t c = 0, m = pick(g, 0, shape.max_constraints); c < m; ++c) {
    const std::string id = "k" + std::to_string(c);
    const Provenance prov{"relation", "rel", {"o0"}, {}};
    if (shape.allow_correlations && n >= 2 && coin(g, 0.25)) {
      CorrelationSpec k{pick(g, 0, n - 1), 0, 0.0, 0.0, 0.0};
      do k.source = pick(g, 0, n - 1);
      while (k.source == k.target);
      k.slope = static_cast<double>(pick_int(g, -2, 2)) / 2.0;
      const double width = ls.parameters[k.target].range.hi - ls.parameters[k.target].range.lo;
      k.tolerance = std::max(1.0, width / 2.0);
      k.intercept = witness[k.target] - k.slope * witness[k.source] + static_cast<double>(pick_int(g, -1, 1));
      out.correlations.push_back(k);
      ls.constraints.push_back({id, Correlation{names[k.target], names[k.source], k.slope, k.intercept, k.tolerance}, prov});
      continue;
    }
    LinearSpec s;
    std::vector<std::size_t> vars(n);
    for (std::size_t i = 0; i < n; ++i) vars[i] = i;
    std::shuffle(vars.begin(), vars.end(), g);
    for (std::size_t i = 0, t = pick(g, 1, std::min<std::size_t>(3, n)); i < t; ++i) {
      long long coef = 0;
      while (coef == 0) coef = pick_int(g, -3, 3);
      s.terms.push_back({vars[i], coef});
    }
    long long at = 0;
    for (const auto& [var, coef] : s.terms) at += coef * static_cast<long long>(witness[var]);
    const std::size_t kind = pick(g, 0, 3);
    const long long margin = pick_int(g, 0, 10);
    // lhs(witness) + constant lands strictly on the satisfied side
    switch (kind) {
      case 0: s.cmp = Comparator::greater; s.constant = -at + 1 + margin; break;
      case 1: s.cmp = Comparator::greater_equal; s.constant = -at + margin; break;
      case 2: s.cmp = Comparator::less; s.constant = -at - 1 - margin; break;
      default: s.cmp = Comparator::less_equal; s.constant = -at - margin; break;
    }
    out.linear.push_back(s);
    ls.constraints.push_back({id, parse_inequality(render_linear(s, names)), prov});
  }
  return out;
}

inline std::vector<double> values_of(const LogicalScenario& ls, const ConcreteScenario& cs) {
  std::vector<double> x;
  for (const auto& p : ls.parameters) x.push_back(cs.assignments.at(p.name));
  return x;
}

inline bool oracle_satisfies(const GeneratedLogical& gl, const std::vector<double>& x, double slack = 0) {
  for (const auto& s : gl.linear)
    if (!oracle_holds(s, x, slack)) return false;
  for (const auto& c : gl.correlations)
    if (!oracle_holds(c, x, slack)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Brute-force pair oracle

struct PairKey {
  std::size_t i, a, j, b;  // parameter i at level a, parameter j at level b, i < j
  auto operator<=>(const PairKey&) const = default;
};

/// Every pair of (parameter, level) values that occurs in at least one full
/// level combination satisfying `feasible`.
template <class Feasible>
std::set<PairKey> feasible_pairs_brute_force(const std::vector<std::vector<double>>& levels, Feasible feasible) {
  std::set<PairKey> out;
  const std::size_t n = levels.size();
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> x(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) x[i] = levels[i][idx[i]];
    if (feasible(x))
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.insert({i, idx[i], j, idx[j]});
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++idx[k] < levels[k].size()) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
    if (n == 0) return out;
  }
}

inline std::set<PairKey> pairs_in(const std::vector<std::vector<double>>& levels, const std::vector<std::vector<double>>& rows) {
  std::set<PairKey> out;
  for (const auto& x : rows) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      auto it = std::find(levels[i].begin(), levels[i].end(), x[i]);
      idx.push_back(it == levels[i].end() ? SIZE_MAX : static_cast<std::size_t>(it - levels[i].begin()));
    }
    for (std::size_t i = 0; i < levels.size(); ++i)
      for (std::size_t j = i + 1; j < levels.size(); ++j)
        if (idx[i] != SIZE_MAX && idx[j] != SIZE_MAX) out.insert({i, idx[i], j, idx[j]});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Concrete scenarios and test cases

inline ConcreteScenario random_concrete(Gen& g) {
  ConcreteScenario cs;
  cs.scenario_id = "c-" + std::to_string(pick(g, 0, 9999));
  cs.source_ref = {"lg" + std::to_string(pick(g, 0, 9)), std::string(64, 'a' + static_cast<char>(pick(g, 0, 5)))};
  for (std::size_t i = 0, n = pick(g, 0, 8); i < n; ++i) cs.assignments["o" + std::to_string(i) + ".x"] = random_double(g);
  cs.method = static_cast<Method>(pick(g, 0, 3));
  if (cs.method == Method::random) cs.seed = g();
  for (const auto& [name, value] : cs.assignments)
    if (coin(g)) cs.default_uniform.push_back(name);
  return cs;
}

inline TestCase random_test_case(Gen& g) {
  TestCase tc;
  tc.unique_id = "tc-" + std::to_string(g() % 1000000);
  tc.work_product_ref = "wp/" + random_text(g) + "x";
  tc.preconditions = random_text(g) + "p";
  tc.configuration = "cfg" + std::to_string(pick(g, 0, 9));
  for (std::size_t i = 0, n = pick(g, 1, 4); i < n; ++i) tc.environmental_conditions["r.w" + std::to_string(i)] = random_double(g);
  const double dt = static_cast<double>(pick(g, 1, 20)) / 10.0;
  const std::size_t len = pick(g, 1, 12);
  for (std::size_t i = 0, n = pick(g, 1, 4); i < n; ++i) {
    TimeSeries ts{"v" + std::to_string(i) + ".s0", coin(g) ? "position" : "constant", "m", dt, {}};
    for (std::size_t k = 0; k < len; ++k) ts.samples.push_back(random_double(g));
    tc.input_data.push_back(std::move(ts));
  }
  tc.expected.description = random_text(g) + "d";
  for (std::size_t i = 0, n = pick(g, 1, 3); i < n; ++i)
    tc.expected.checks.push_back({"sig" + std::to_string(i), static_cast<Comparator>(pick(g, 0, 4)), random_double(g),
                                  static_cast<double>(pick(g, 0, 100)) / 10.0});
  tc.source_ref = {"c-" + std::to_string(pick(g, 0, 99)), std::string(64, 'f')};
  return tc;
}

}  // namespace testing_support
