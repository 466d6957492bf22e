#pragma once

// Logical -> concrete. Generators propose assignments; check_concrete is the
// single authority on whether an assignment is consistent.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scenario/error.hpp"
#include "scenario/json_io.hpp"
#include "scenario/logical.hpp"
#include "scenario/random.hpp"

namespace scenario {

enum class Method { boundary, equivalence, pairwise, random };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::boundary: return "boundary";
    case Method::equivalence: return "equivalence";
    case Method::pairwise: return "pairwise";
    case Method::random: return "random";
  }
  return "pairwise";
}

inline Method parse_method(std::string_view s) {
  if (s == "boundary") return Method::boundary;
  if (s == "equivalence") return Method::equivalence;
  if (s == "pairwise") return Method::pairwise;
  if (s == "random") return Method::random;
  throw Error(ErrorCode::SchemaViolation, "unknown method '" + std::string(s) + "'");
}

struct ConcreteScenario {
  std::string scenario_id;
  SourceRef source_ref;
  std::map<std::string, double, std::less<>> assignments;
  Method method = Method::pairwise;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> default_uniform;  // parameters drawn from the implicit uniform default

  bool operator==(const ConcreteScenario&) const = default;
};

/// Per-parameter candidate values for the covering generators.
using Levels = std::map<std::string, std::vector<double>, std::less<>>;

inline SourceRef source_ref_of(const LogicalScenario& ls) { return {ls.scenario_id, logical_hash(ls)}; }

// ---------------------------------------------------------------------------
// Representative values

inline std::vector<double> boundary_values(const Parameter& p) {
  if (p.range.lo == p.range.hi) return {p.range.lo};
  return {p.range.lo, p.range.hi};
}

/// Midpoints of k equal-width classes over the range.
inline std::vector<double> equivalence_classes(const Parameter& p, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::BadK, "equivalence class count must be >= 1");
  if (p.range.lo == p.range.hi) return {p.range.lo};
  const double width = p.range.hi - p.range.lo;
  std::vector<double> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double mid = p.range.lo + width * (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(k));
    out.push_back(std::clamp(mid, p.range.lo, p.range.hi));
  }
  return out;
}

inline Levels boundary_levels(const LogicalScenario& ls) {
  Levels out;
  for (const auto& p : ls.parameters) out[p.name] = boundary_values(p);
  return out;
}

inline Levels equivalence_levels(const LogicalScenario& ls, std::size_t k) {
  Levels out;
  for (const auto& p : ls.parameters) out[p.name] = equivalence_classes(p, k);
  return out;
}

/// Boundary values plus k class midpoints, ascending.
inline Levels combined_levels(const LogicalScenario& ls, std::size_t k) {
  Levels out;
  for (const auto& p : ls.parameters) {
    std::vector<double> v = boundary_values(p);
    for (double m : equivalence_classes(p, k)) v.push_back(m);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    out[p.name] = std::move(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checking

struct Violation {
  std::string code;  // RANGE | CONSTRAINT | MISSING_ASSIGNMENT | UNKNOWN_PARAMETER
  std::string subject;
  std::string message;
  bool operator==(const Violation&) const = default;
};

namespace detail {

class Evaluator {
 public:
  explicit Evaluator(const LogicalScenario& ls) : ls_(ls) {
    for (std::size_t i = 0; i < ls.parameters.size(); ++i) index_.emplace(ls.parameters[i].name, i);
  }

  std::size_t index_of(const std::string& name) const { return index_.at(name); }
  bool has(const std::string& name) const { return index_.count(name) != 0; }

  /// All constraints hold for values given in parameter order.
  bool satisfies(const std::vector<double>& values) const {
    auto lookup = [&](const std::string& name) { return values[index_.at(name)]; };
    return std::all_of(ls_.constraints.begin(), ls_.constraints.end(),
                       [&](const Constraint& c) { return c.holds(lookup); });
  }

 private:
  const LogicalScenario& ls_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace detail

/// Range and constraint check by substitution. Correlation tolerance is
/// inclusive; comparators are exact over binary64.
inline std::vector<Violation> check_concrete(const LogicalScenario& ls, const ConcreteScenario& cs) {
  if (cs.source_ref != source_ref_of(ls))
    throw Error(ErrorCode::SourceMismatch, "concrete scenario '" + cs.scenario_id + "' was not derived from logical scenario '" +
                                               ls.scenario_id + "' (hash mismatch)");
  std::vector<Violation> out;
  bool complete = true;
  for (const auto& p : ls.parameters) {
    auto it = cs.assignments.find(p.name);
    if (it == cs.assignments.end()) {
      out.push_back({"MISSING_ASSIGNMENT", p.name, "no value for '" + p.name + "'"});
      complete = false;
      continue;
    }
    if (!(it->second >= p.range.lo && it->second <= p.range.hi))
      out.push_back({"RANGE", p.name,
                     "'" + p.name + "' = " + std::to_string(it->second) + " outside [" + format_number(p.range.lo) + ", " +
                         format_number(p.range.hi) + "]"});
  }
  for (const auto& [name, value] : cs.assignments)
    if (ls.find_parameter(name) == nullptr) out.push_back({"UNKNOWN_PARAMETER", name, "'" + name + "' is not a parameter"});
  if (!complete) return out;
  auto lookup = [&](const std::string& name) { return cs.assignments.at(name); };
  for (const auto& c : ls.constraints) {
    bool resolvable = true;
    for (const auto& name : c.variables()) resolvable = resolvable && cs.assignments.count(name) != 0;
    if (resolvable && !c.holds(lookup))
      out.push_back({"CONSTRAINT", c.id, "constraint " + c.id + " (" + c.to_string() + ") violated"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pairwise covering

struct CoverageReport {
  double pair_coverage = 1.0;
  double boundary_coverage = 1.0;
  std::size_t scenario_count = 0;
  std::size_t infeasible_combination_count = 0;
  // exact numerators and denominators behind the fractions
  std::size_t covered_pairs = 0;
  std::size_t feasible_pairs = 0;
  std::size_t boundary_parameters_covered = 0;
  std::size_t parameter_count = 0;

  bool operator==(const CoverageReport&) const = default;
};

namespace detail {

/// Row counts up to this bound are enumerated exhaustively, which makes pair
/// feasibility exact. Larger spaces fall back to constructive search.
inline constexpr std::size_t kExhaustiveRowLimit = 1u << 16;
inline constexpr std::size_t kRejectionBudget = 1000;
/// Restart budget for the exhaustive greedy, in passes and in rows scanned.
inline constexpr std::size_t kGreedyPasses = 64;
inline constexpr std::size_t kGreedyWork = 1u << 18;

/// All value pairs of a level table, with pair feasibility and a covering
/// suite computed together.
class PairSpace {
 public:
  PairSpace(const LogicalScenario& ls, const Levels& levels) : ls_(ls), eval_(ls) {
    for (const auto& p : ls.parameters) {
      auto it = levels.find(p.name);
      if (it == levels.end() || it->second.empty())
        throw Error(ErrorCode::BadLevels, "no levels given for parameter '" + p.name + "'");
      std::vector<double> unique;
      for (double x : it->second) {
        if (!(x >= p.range.lo && x <= p.range.hi))
          throw Error(ErrorCode::BadLevels, "level " + std::to_string(x) + " of '" + p.name + "' lies outside its range");
        if (std::find(unique.begin(), unique.end(), x) == unique.end()) unique.push_back(x);
      }
      levels_.push_back(std::move(unique));
    }
    for (const auto& [name, values] : levels)
      if (ls.find_parameter(name) == nullptr) throw Error(ErrorCode::BadLevels, "levels given for unknown parameter '" + name + "'");

    const std::size_t n = levels_.size();
    offset_.assign(n, std::vector<std::size_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        offset_[i][j] = total_pairs_;
        total_pairs_ += levels_[i].size() * levels_[j].size();
      }
    feasible_.assign(total_pairs_, false);

    std::size_t product = 1;
    bool small = true;
    for (const auto& l : levels_) {
      if (product > kExhaustiveRowLimit / l.size()) small = false;
      product *= small ? l.size() : 1;
    }
    if (small) exhaustive(product);
    else constructive();
  }

  std::size_t parameter_count() const { return levels_.size(); }
  std::size_t total_pairs() const { return total_pairs_; }
  std::size_t feasible_pairs() const { return static_cast<std::size_t>(std::count(feasible_.begin(), feasible_.end(), true)); }
  bool feasible(std::size_t pair) const { return feasible_[pair]; }
  const std::vector<std::vector<std::size_t>>& suite() const { return suite_; }
  const std::vector<std::vector<double>>& levels() const { return levels_; }

  std::size_t pair_id(std::size_t i, std::size_t a, std::size_t j, std::size_t b) const {
    return offset_[i][j] + a * levels_[j].size() + b;
  }

  std::vector<double> values(const std::vector<std::size_t>& row) const {
    std::vector<double> v(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) v[i] = levels_[i][row[i]];
    return v;
  }

 private:
  template <typename F>
  void for_each_pair(const std::vector<std::size_t>& row, F&& f) const {
    for (std::size_t i = 0; i < row.size(); ++i)
      for (std::size_t j = i + 1; j < row.size(); ++j) f(pair_id(i, row[i], j, row[j]));
  }

  bool row_ok(const std::vector<std::size_t>& row) const { return eval_.satisfies(values(row)); }

  /// Greedy set cover over every feasible row in lexicographic order. The
  /// first pass breaks ties on the earliest row; later passes break them at
  /// random from a fixed seed. Each pass drops rows made redundant by later
  /// ones, and the smallest suite wins (earliest pass on ties).
  void exhaustive(std::size_t product) {
    const std::size_t n = levels_.size();
    std::vector<std::vector<std::size_t>> rows;
    std::vector<std::size_t> row(n, 0);
    for (std::size_t r = 0; r < product; ++r) {
      if (row_ok(row)) rows.push_back(row);
      for (std::size_t k = n; k-- > 0;) {
        if (++row[k] < levels_[k].size()) break;
        row[k] = 0;
      }
    }
    if (rows.empty())
      throw Error(ErrorCode::InfeasibleLevels, "no combination of the given levels satisfies the constraints of '" + ls_.scenario_id + "'");
    for (const auto& r : rows) for_each_pair(r, [&](std::size_t p) { feasible_[p] = true; });

    if (n < 2) {  // no pairs: one row per feasible level
      suite_ = std::move(rows);
      return;
    }
    // no suite can be smaller than the feasible pairs of a single parameter pair
    std::size_t bound = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto first = feasible_.begin() + static_cast<std::ptrdiff_t>(offset_[i][j]);
        const auto count = std::count(first, first + static_cast<std::ptrdiff_t>(levels_[i].size() * levels_[j].size()), true);
        bound = std::max(bound, static_cast<std::size_t>(count));
      }
    const std::size_t passes = std::clamp<std::size_t>(kGreedyWork / rows.size(), 1, kGreedyPasses);
    Rng rng(0x9a1f5eed);
    for (std::size_t pass = 0; pass < passes && suite_.size() != bound; ++pass) {
      auto candidate = greedy(rows, pass == 0 ? nullptr : &rng);
      if (suite_.empty() || candidate.size() < suite_.size()) suite_ = std::move(candidate);
    }
  }

  std::vector<std::vector<std::size_t>> greedy(const std::vector<std::vector<std::size_t>>& rows, Rng* rng) const {
    std::vector<std::size_t> hits(total_pairs_, 0);
    std::size_t remaining = feasible_pairs();
    std::vector<bool> live(rows.size(), true);
    std::vector<std::vector<std::size_t>> out;
    while (remaining > 0) {
      std::size_t best = rows.size();
      std::size_t best_gain = 0;
      std::size_t ties = 0;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!live[r]) continue;
        std::size_t gain = 0;
        for_each_pair(rows[r], [&](std::size_t p) { gain += hits[p] ? 0 : 1; });
        if (gain == 0) {
          live[r] = false;
        } else if (gain > best_gain) {
          best_gain = gain;
          best = r;
          ties = 1;
        } else if (gain == best_gain && rng != nullptr && rng->canonical() * static_cast<double>(++ties) < 1.0) {
          best = r;
        }
      }
      for_each_pair(rows[best], [&](std::size_t p) { remaining -= hits[p]++ ? 0 : 1; });
      live[best] = false;
      out.push_back(rows[best]);
    }
    // drop rows whose every pair is covered elsewhere, oldest first
    std::vector<std::vector<std::size_t>> kept;
    for (const auto& r : out) {
      bool needed = false;
      for_each_pair(r, [&](std::size_t p) { needed = needed || hits[p] == 1; });
      if (needed) kept.push_back(r);
      else for_each_pair(r, [&](std::size_t p) { --hits[p]; });
    }
    return kept;
  }

  /// For spaces too large to enumerate: seed each row with the first pair not
  /// yet settled, fill the rest greedily, and fall back to random completions
  /// within the rejection budget. A pair whose budget runs out is counted
  /// infeasible.
  void constructive() {
    const std::size_t n = levels_.size();
    std::vector<bool> settled(total_pairs_, false);
    std::vector<bool> covered(total_pairs_, false);
    Rng rng(0x5eedc0de);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t a = 0; a < levels_[i].size(); ++a) {
          for (std::size_t b = 0; b < levels_[j].size(); ++b) {
            if (settled[pair_id(i, a, j, b)]) continue;
            std::vector<std::size_t> row(n, 0);
            std::vector<bool> fixed(n, false);
            row[i] = a;
            row[j] = b;
            fixed[i] = fixed[j] = true;
            for (std::size_t k = 0; k < n; ++k) {
              if (fixed[k]) continue;
              std::size_t best = 0;
              std::size_t best_gain = 0;
              for (std::size_t v = 0; v < levels_[k].size(); ++v) {
                std::size_t gain = 0;
                for (std::size_t m = 0; m < n; ++m) {
                  if (!fixed[m]) continue;
                  const std::size_t p = m < k ? pair_id(m, row[m], k, v) : pair_id(k, v, m, row[m]);
                  gain += covered[p] ? 0 : 1;
                }
                if (gain > best_gain) {
                  best_gain = gain;
                  best = v;
                }
              }
              row[k] = best;
              fixed[k] = true;
            }
            bool found = row_ok(row);
            for (std::size_t attempt = 0; !found && attempt < kRejectionBudget; ++attempt) {
              for (std::size_t k = 0; k < n; ++k)
                if (k != i && k != j) row[k] = static_cast<std::size_t>(rng.canonical() * static_cast<double>(levels_[k].size()));
              found = row_ok(row);
            }
            if (!found) {
              settled[pair_id(i, a, j, b)] = true;
              continue;
            }
            for_each_pair(row, [&](std::size_t p) {
              covered[p] = true;
              settled[p] = true;
              feasible_[p] = true;
            });
            suite_.push_back(std::move(row));
          }
        }
      }
    }
    if (suite_.empty())
      throw Error(ErrorCode::InfeasibleLevels, "rejection search found no feasible combination for '" + ls_.scenario_id + "'");
  }

  const LogicalScenario& ls_;
  Evaluator eval_;
  std::vector<std::vector<double>> levels_;
  std::vector<std::vector<std::size_t>> offset_;
  std::size_t total_pairs_ = 0;
  std::vector<bool> feasible_;
  std::vector<std::vector<std::size_t>> suite_;
};

inline std::vector<ConcreteScenario> materialize(const LogicalScenario& ls, const PairSpace& space, Method method) {
  const SourceRef ref = source_ref_of(ls);
  std::vector<ConcreteScenario> out;
  if (ls.parameters.empty()) {
    out.push_back({ls.scenario_id + "-" + std::string(to_string(method)) + "-0", ref, {}, method, std::nullopt, {}});
    return out;
  }
  for (const auto& row : space.suite()) {
    ConcreteScenario cs{ls.scenario_id + "-" + std::string(to_string(method)) + "-" + std::to_string(out.size()), ref, {}, method,
                        std::nullopt, {}};
    const std::vector<double> values = space.values(row);
    for (std::size_t i = 0; i < values.size(); ++i) cs.assignments.emplace(ls.parameters[i].name, values[i]);
    out.push_back(std::move(cs));
  }
  return out;
}

}  // namespace detail

/// Covering suite over explicit levels: every feasible pair of levels appears
/// in at least one scenario. Levels are deduplicated per parameter; a pair is
/// feasible when some full combination of levels containing it satisfies every
/// constraint.
inline std::vector<ConcreteScenario> pairwise_cover(const LogicalScenario& ls, const Levels& levels,
                                                    Method method = Method::pairwise) {
  detail::PairSpace space(ls, levels);
  return detail::materialize(ls, space, method);
}

/// Pairwise over each parameter's range endpoints.
inline std::vector<ConcreteScenario> boundary_suite(const LogicalScenario& ls) {
  return pairwise_cover(ls, boundary_levels(ls), Method::boundary);
}

/// Pairwise over the k class midpoints of each parameter.
inline std::vector<ConcreteScenario> equivalence_suite(const LogicalScenario& ls, std::size_t k) {
  return pairwise_cover(ls, equivalence_levels(ls, k), Method::equivalence);
}

// ---------------------------------------------------------------------------
// Random sampling

/// n scenarios by per-parameter draws plus rejection on the constraints.
/// Sample i draws from a stream seeded with derive_seed(seed, i). The total
/// attempt budget is 1000·n; running out means acceptance fell below 0.1%.
inline std::vector<ConcreteScenario> sample_random(const LogicalScenario& ls, std::size_t n, std::uint64_t seed) {
  std::vector<ConcreteScenario> out;
  if (n == 0) return out;
  const SourceRef ref = source_ref_of(ls);
  const detail::Evaluator eval(ls);
  std::vector<std::string> defaults;
  for (const auto& p : ls.parameters)
    if (!p.distribution) defaults.push_back(p.name);

  const std::size_t budget = detail::kRejectionBudget * n;
  std::size_t attempts = 0;
  std::vector<double> values(ls.parameters.size());
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, i));
    while (true) {
      if (attempts++ >= budget)
        throw Error(ErrorCode::SamplingExhausted,
                    "rejection sampling of '" + ls.scenario_id + "' accepted " + std::to_string(i) + " of " + std::to_string(n) +
                        " samples in " + std::to_string(budget) + " attempts (acceptance < 0.1%)");
      for (std::size_t k = 0; k < ls.parameters.size(); ++k) {
        const Parameter& p = ls.parameters[k];
        if (p.distribution && p.distribution->kind == DistributionKind::truncated_gaussian)
          values[k] = rng.truncated_normal(p.distribution->mean, p.distribution->stddev, p.range.lo, p.range.hi);
        else
          values[k] = rng.uniform(p.range.lo, p.range.hi);
      }
      if (eval.satisfies(values)) break;
    }
    ConcreteScenario cs{ls.scenario_id + "-random-" + std::to_string(i), ref, {}, Method::random, seed, defaults};
    for (std::size_t k = 0; k < values.size(); ++k) cs.assignments.emplace(ls.parameters[k].name, values[k]);
    out.push_back(std::move(cs));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coverage

/// Mechanical coverage of `set` against the level table. A vacuous fraction
/// (no feasible pairs, no parameters) reports 1.0.
inline CoverageReport coverage_metrics(const LogicalScenario& ls, const Levels& levels, const std::vector<ConcreteScenario>& set) {
  const SourceRef ref = source_ref_of(ls);
  for (const auto& cs : set)
    if (cs.source_ref != ref)
      throw Error(ErrorCode::SourceMismatch, "scenario '" + cs.scenario_id + "' was not derived from '" + ls.scenario_id + "'");

  detail::PairSpace space(ls, levels);
  CoverageReport report;
  report.scenario_count = set.size();
  report.parameter_count = ls.parameters.size();
  report.feasible_pairs = space.feasible_pairs();
  report.infeasible_combination_count = space.total_pairs() - report.feasible_pairs;

  const std::size_t n = ls.parameters.size();
  std::vector<bool> covered(space.total_pairs(), false);
  for (const auto& cs : set) {
    std::vector<std::optional<std::size_t>> level(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto it = cs.assignments.find(ls.parameters[i].name);
      if (it == cs.assignments.end()) continue;
      const auto& l = space.levels()[i];
      if (auto pos = std::find(l.begin(), l.end(), it->second); pos != l.end())
        level[i] = static_cast<std::size_t>(pos - l.begin());
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (level[i] && level[j]) {
          const std::size_t p = space.pair_id(i, *level[i], j, *level[j]);
          if (space.feasible(p)) covered[p] = true;
        }
  }
  report.covered_pairs = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true));
  report.pair_coverage = report.feasible_pairs == 0
                             ? 1.0
                             : static_cast<double>(report.covered_pairs) / static_cast<double>(report.feasible_pairs);

  for (const auto& p : ls.parameters) {
    bool lo = false;
    bool hi = false;
    for (const auto& cs : set) {
      auto it = cs.assignments.find(p.name);
      if (it == cs.assignments.end()) continue;
      lo = lo || it->second == p.range.lo;
      hi = hi || it->second == p.range.hi;
    }
    if (lo && hi) ++report.boundary_parameters_covered;
  }
  report.boundary_coverage = n == 0 ? 1.0
                                    : static_cast<double>(report.boundary_parameters_covered) / static_cast<double>(n);
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

inline Json concrete_to_json(const ConcreteScenario& cs) {
  Json assignments = Json::object();
  for (const auto& [name, value] : cs.assignments) assignments[name] = value;
  Json doc = {{"format", "concrete/1"},
              {"scenario_id", cs.scenario_id},
              {"source_ref", {{"scenario_id", cs.source_ref.scenario_id}, {"hash", cs.source_ref.hash}}},
              {"method", std::string(to_string(cs.method))},
              {"assignments", std::move(assignments)},
              {"default_uniform", cs.default_uniform}};
  doc["seed"] = cs.seed ? Json(*cs.seed) : Json(nullptr);
  return doc;
}

inline std::string serialize_concrete(const ConcreteScenario& cs) { return canonical_dump(concrete_to_json(cs)); }

inline ConcreteScenario concrete_from_json(const Json& doc) {
  schema::expect_format(doc, "concrete/1");
  ConcreteScenario cs;
  cs.scenario_id = schema::string_field(doc, "concrete", "scenario_id");
  const Json& ref = schema::object_field(doc, "concrete", "source_ref");
  cs.source_ref = {schema::string_field(ref, "source_ref", "scenario_id"), schema::string_field(ref, "source_ref", "hash")};
  cs.method = parse_method(schema::string_field(doc, "concrete", "method"));
  const Json& seed = schema::field(doc, "concrete", "seed");
  if (!seed.is_null()) {
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
      throw Error(ErrorCode::SchemaViolation, "concrete.seed: expected a non-negative integer or null");
    cs.seed = seed.get<std::uint64_t>();
  }
  for (const auto& [name, value] : schema::object_field(doc, "concrete", "assignments").items())
    cs.assignments.emplace(name, schema::number_of(value, "assignment '" + name + "'"));
  for (const Json& d : schema::array_field(doc, "concrete", "default_uniform")) cs.default_uniform.push_back(schema::string_of(d, "default_uniform"));
  return cs;
}

inline ConcreteScenario deserialize_concrete(std::string_view text) { return concrete_from_json(parse_json(text)); }

inline std::string concrete_hash(const ConcreteScenario& cs) { return sha256_hex(serialize_concrete(cs)); }

inline Json coverage_to_json(const CoverageReport& r) {
  return {{"pair_coverage", r.pair_coverage},
          {"boundary_coverage", r.boundary_coverage},
          {"scenario_count", r.scenario_count},
          {"infeasible_combination_count", r.infeasible_combination_count},
          {"covered_pairs", r.covered_pairs},
          {"feasible_pairs", r.feasible_pairs},
          {"boundary_parameters_covered", r.boundary_parameters_covered},
          {"parameter_count", r.parameter_count}};
}

inline CoverageReport coverage_from_json(const Json& j) {
  auto count = [&](const char* key) {
    const Json& v = schema::field(j, "coverage", key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw Error(ErrorCode::SchemaViolation, std::string("coverage.") + key + ": expected a count");
    return v.get<std::size_t>();
  };
  CoverageReport r;
  r.pair_coverage = schema::number_field(j, "coverage", "pair_coverage");
  r.boundary_coverage = schema::number_field(j, "coverage", "boundary_coverage");
  r.scenario_count = count("scenario_count");
  r.infeasible_combination_count = count("infeasible_combination_count");
  r.covered_pairs = count("covered_pairs");
  r.feasible_pairs = count("feasible_pairs");
  r.boundary_parameters_covered = count("boundary_parameters_covered");
  r.parameter_count = count("parameter_count");
  return r;
}

/// A generated suite: scenarios plus the coverage they achieve.
struct ConcreteSuite {
  SourceRef logical_ref;
  Method method = Method::pairwise;
  std::optional<std::uint64_t> seed;
  CoverageReport coverage;
  std::vector<ConcreteScenario> scenarios;

  bool operator==(const ConcreteSuite&) const = default;
};

inline std::string serialize_suite(const ConcreteSuite& s) {
  Json scenarios = Json::array();
  for (const auto& cs : s.scenarios) scenarios.push_back(concrete_to_json(cs));
  Json doc = {{"format", "concrete-suite/1"},
              {"logical_ref", {{"scenario_id", s.logical_ref.scenario_id}, {"hash", s.logical_ref.hash}}},
              {"method", std::string(to_string(s.method))},
              {"coverage", coverage_to_json(s.coverage)},
              {"scenarios", std::move(scenarios)}};
  doc["seed"] = s.seed ? Json(*s.seed) : Json(nullptr);
  return canonical_dump(doc);
}

inline ConcreteSuite deserialize_suite(std::string_view text) {
  const Json doc = parse_json(text);
  schema::expect_format(doc, "concrete-suite/1");
  ConcreteSuite s;
  const Json& ref = schema::object_field(doc, "suite", "logical_ref");
  s.logical_ref = {schema::string_field(ref, "logical_ref", "scenario_id"), schema::string_field(ref, "logical_ref", "hash")};
  s.method = parse_method(schema::string_field(doc, "suite", "method"));
  const Json& seed = schema::field(doc, "suite", "seed");
  if (!seed.is_null()) s.seed = seed.get<std::uint64_t>();
  s.coverage = coverage_from_json(schema::object_field(doc, "suite", "coverage"));
  for (const Json& c : schema::array_field(doc, "suite", "scenarios")) s.scenarios.push_back(concrete_from_json(c));
  return s;
}

}  // namespace scenario
