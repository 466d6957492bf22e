#pragma once

// Functional scenarios: the semantic level. A line-oriented controlled
// language whose every word is drawn from a Vocabulary.
//
//   scenario s1                      # header, exactly once, first
//   car c1                           # <entity-term> <id>
//   r1 is road                       # <id> is <entity-term>
//   road r1 is two-lane-motorway     # <entity-term> <id> is <entity-term | attribute value>
//   c1 follows t1                    # <id> <relation-term> <id>...
//   r1 geometry curve                # <id> <attribute-term> <value>
//
// Statements are separated by newlines or '/'; '#' starts a comment.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scenario/error.hpp"
#include "scenario/json_io.hpp"
#include "scenario/vocabulary.hpp"

namespace scenario {

struct EntityInstance {
  std::string id;
  std::string term;
  bool operator==(const EntityInstance&) const = default;
};

struct RelationPhrase {
  std::string relation;
  std::vector<std::string> arguments;
  bool operator==(const RelationPhrase&) const = default;
};

struct AttributeAssignment {
  std::string instance;
  std::string attribute;
  std::string value;
  bool operator==(const AttributeAssignment&) const = default;
};

struct FunctionalScenario {
  std::string scenario_id;
  VocabularyRef vocabulary_ref;
  std::vector<EntityInstance> instances;
  std::vector<RelationPhrase> relations;
  std::vector<AttributeAssignment> attributes;

  const EntityInstance* find_instance(std::string_view id) const {
    for (const auto& i : instances)
      if (i.id == id) return &i;
    return nullptr;
  }
  const AttributeAssignment* find_assignment(std::string_view instance, std::string_view attribute) const {
    for (const auto& a : attributes)
      if (a.instance == instance && a.attribute == attribute) return &a;
    return nullptr;
  }

  bool operator==(const FunctionalScenario&) const = default;
};

/// `[A-Za-z][A-Za-z0-9_]*` -- no '-' or '.', so qualified parameter names stay unambiguous.
inline bool is_instance_id(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

/// `[A-Za-z0-9][A-Za-z0-9_-]*`
inline bool is_scenario_id(std::string_view s) {
  if (s.empty() || !std::isalnum(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; });
}

namespace detail {

struct Statement {
  std::size_t line;
  std::vector<std::string> tokens;
};

inline std::vector<Statement> split_statements(std::string_view text) {
  std::vector<Statement> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t slash = line.find('/', start);
      if (slash == std::string_view::npos) slash = line.size();
      std::string_view piece = line.substr(start, slash - start);
      Statement st{line_no, {}};
      std::size_t i = 0;
      while (i < piece.size()) {
        while (i < piece.size() && std::isspace(static_cast<unsigned char>(piece[i]))) ++i;
        std::size_t j = i;
        while (j < piece.size() && !std::isspace(static_cast<unsigned char>(piece[j]))) ++j;
        if (j > i) st.tokens.emplace_back(piece.substr(i, j - i));
        i = j;
      }
      if (!st.tokens.empty()) out.push_back(std::move(st));
      start = slash + 1;
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

[[noreturn]] inline void unknown_word(const Vocabulary& v, const std::string& word, std::size_t line,
                                      std::string_view role) {
  std::string msg = "unknown " + std::string(role) + " '" + word + "'";
  if (auto hint = nearest_term(v, word)) msg += " (did you mean '" + *hint + "'?)";
  throw Error(ErrorCode::UnknownTerm, msg, line);
}

class FunctionalParser {
 public:
  explicit FunctionalParser(const Vocabulary& v) : v_(v) {}

  FunctionalScenario parse(std::string_view text) {
    fs_.vocabulary_ref = v_.ref();
    const auto statements = split_statements(text);
    if (statements.empty()) throw Error(ErrorCode::SyntaxError, "missing 'scenario <id>' header", 1);
    for (std::size_t i = 0; i < statements.size(); ++i) statement(statements[i], i == 0);
    return std::move(fs_);
  }

 private:
  void statement(const Statement& st, bool first) {
    const auto& t = st.tokens;
    if (t[0] == "scenario") {
      if (!first) throw Error(ErrorCode::SyntaxError, "'scenario' header must be the first statement", st.line);
      if (t.size() != 2) throw Error(ErrorCode::SyntaxError, "expected 'scenario <id>'", st.line);
      if (!is_scenario_id(t[1])) throw Error(ErrorCode::SyntaxError, "malformed scenario id '" + t[1] + "'", st.line);
      fs_.scenario_id = t[1];
      return;
    }
    if (first) throw Error(ErrorCode::SyntaxError, "missing 'scenario <id>' header", st.line);

    if (t.size() == 3 && t[1] == "is") return declare(t[0], t[2], st.line);
    if (t.size() == 4 && t[2] == "is") return declare_as(t, st.line);
    if (ids_.count(t[0]) != 0) return phrase(st);
    if (t.size() == 2) return declare(t[1], t[0], st.line);

    const Term* second = t.size() >= 2 ? v_.find(t[1]) : nullptr;
    if (second != nullptr && second->kind != TermKind::entity)
      throw Error(ErrorCode::UnknownTerm, "undeclared instance '" + t[0] + "'", st.line);
    if (v_.find(t[0]) != nullptr)
      throw Error(ErrorCode::SyntaxError, "cannot parse statement starting with term '" + t[0] + "'", st.line);
    unknown_word(v_, t[0], st.line, "word");
  }

  const Term& expect_entity(const std::string& word, std::size_t line) {
    const Term* term = v_.find(word);
    if (term == nullptr) unknown_word(v_, word, line, "entity term");
    if (term->kind != TermKind::entity)
      throw Error(ErrorCode::SyntaxError, "'" + word + "' is a " + std::string(to_string(term->kind)) +
                                              ", expected an entity term", line);
    return *term;
  }

  // `<entity> <id> is <entity>` declares <id> as the second entity;
  // `<entity> <id> is <value>` declares it as the first and assigns the one
  // applicable attribute that allows <value>.
  void declare_as(const std::vector<std::string>& t, std::size_t line) {
    const Term& noun = expect_entity(t[0], line);
    if (const Term* target = v_.find(t[3]); target != nullptr && target->kind == TermKind::entity)
      return declare(t[1], t[3], line);
    const Term* attribute = nullptr;
    for (const auto& [name, term] : v_.terms) {
      if (term.kind != TermKind::attribute || !term.applies_to_entity(noun.name) || !term.allows_value(t[3])) continue;
      if (attribute != nullptr)
        throw Error(ErrorCode::SyntaxError, "'" + t[3] + "' is ambiguous: allowed by both '" + attribute->name + "' and '" +
                                                name + "'", line);
      attribute = &term;
    }
    if (attribute == nullptr) unknown_word(v_, t[3], line, "entity term or attribute value");
    declare(t[1], noun.name, line);
    fs_.attributes.push_back({t[1], attribute->name, t[3]});
  }

  void declare(const std::string& id, const std::string& entity, std::size_t line) {
    const Term& term = expect_entity(entity, line);
    if (!is_instance_id(id)) throw Error(ErrorCode::SyntaxError, "malformed instance id '" + id + "'", line);
    if (v_.find(id) != nullptr || id == "is" || id == "scenario")
      throw Error(ErrorCode::SyntaxError, "instance id '" + id + "' shadows a vocabulary term or keyword", line);
    if (!ids_.insert(id).second) throw Error(ErrorCode::DuplicateInstance, "instance '" + id + "' declared twice", line);
    fs_.instances.push_back({id, term.name});
  }

  void phrase(const Statement& st) {
    const auto& t = st.tokens;
    if (t.size() < 2) throw Error(ErrorCode::SyntaxError, "incomplete statement after '" + t[0] + "'", st.line);
    const Term* term = v_.find(t[1]);
    if (term == nullptr) unknown_word(v_, t[1], st.line, "relation or attribute");
    const EntityInstance& subject = *fs_.find_instance(t[0]);

    if (term->kind == TermKind::relation) {
      const std::size_t given = t.size() - 1;  // subject plus trailing arguments
      if (given != term->arity)
        throw Error(ErrorCode::ArityMismatch, "relation '" + term->name + "' takes " + std::to_string(term->arity) +
                                                  " argument(s), got " + std::to_string(given), st.line);
      RelationPhrase rp{term->name, {t[0]}};
      for (std::size_t i = 2; i < t.size(); ++i) {
        if (ids_.count(t[i]) == 0) unknown_word(v_, t[i], st.line, "instance");
        rp.arguments.push_back(t[i]);
      }
      for (const std::string& arg : rp.arguments) {
        const EntityInstance& inst = *fs_.find_instance(arg);
        if (!term->applies_to_entity(inst.term))
          throw Error(ErrorCode::IllegalApplication,
                      "relation '" + term->name + "' does not apply to '" + inst.term + "' (" + arg + ")", st.line);
      }
      fs_.relations.push_back(std::move(rp));
      return;
    }
    if (term->kind == TermKind::attribute) {
      if (t.size() != 3) throw Error(ErrorCode::SyntaxError, "expected '<id> " + term->name + " <value>'", st.line);
      if (!term->applies_to_entity(subject.term))
        throw Error(ErrorCode::IllegalApplication,
                    "attribute '" + term->name + "' does not apply to '" + subject.term + "' (" + subject.id + ")",
                    st.line);
      if (!term->allows_value(t[2]))
        throw Error(ErrorCode::IllegalAttributeValue,
                    "'" + t[2] + "' is not an allowed value of '" + term->name + "'", st.line);
      if (fs_.find_assignment(subject.id, term->name) != nullptr)
        throw Error(ErrorCode::DuplicateAttribute,
                    "attribute '" + term->name + "' assigned twice on '" + subject.id + "'", st.line);
      fs_.attributes.push_back({subject.id, term->name, t[2]});
      return;
    }
    throw Error(ErrorCode::SyntaxError, "entity term '" + term->name + "' cannot follow an instance id", st.line);
  }

  const Vocabulary& v_;
  FunctionalScenario fs_;
  std::set<std::string, std::less<>> ids_;
};

}  // namespace detail

inline FunctionalScenario parse_functional(std::string_view dsl, const Vocabulary& v) {
  return detail::FunctionalParser(v).parse(dsl);
}

/// Canonical DSL text: header, declarations, relations, then attributes.
inline std::string format_functional(const FunctionalScenario& fs) {
  std::string out = "scenario " + fs.scenario_id + "\n";
  for (const auto& i : fs.instances) out += i.term + " " + i.id + "\n";
  for (const auto& r : fs.relations) {
    out += r.arguments.empty() ? std::string() : r.arguments.front();
    out += " " + r.relation;
    for (std::size_t k = 1; k < r.arguments.size(); ++k) out += " " + r.arguments[k];
    out += "\n";
  }
  for (const auto& a : fs.attributes) out += a.instance + " " + a.attribute + " " + a.value + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Consistency

struct Finding {
  std::string code;
  std::vector<std::string> elements;
  std::string message;
  bool operator==(const Finding&) const = default;
};

struct ConsistencyReport {
  std::vector<Finding> findings;
  bool ok() const { return findings.empty(); }
  bool has(std::string_view code) const {
    return std::any_of(findings.begin(), findings.end(), [&](const Finding& f) { return f.code == code; });
  }
};

namespace detail {

inline std::string relation_element(std::size_t index) { return "relations[" + std::to_string(index) + "]"; }

inline bool excluded_pair(const RelationExclusion& ex, const RelationPhrase& a, const RelationPhrase& b) {
  if (a.relation != ex.first || b.relation != ex.second) return false;
  if (b.arguments.size() != ex.mapping.size()) return false;
  for (std::size_t i = 0; i < ex.mapping.size(); ++i) {
    if (ex.mapping[i] >= a.arguments.size() || b.arguments[i] != a.arguments[ex.mapping[i]]) return false;
  }
  return true;
}

}  // namespace detail

/// Type invariants plus the vocabulary's exclusion table and required
/// attributes. Findings are data; nothing here throws.
inline ConsistencyReport check_consistency(const FunctionalScenario& fs, const Vocabulary& v) {
  ConsistencyReport report;
  auto add = [&](std::string code, std::vector<std::string> elements, std::string message) {
    report.findings.push_back({std::move(code), std::move(elements), std::move(message)});
  };

  if (fs.vocabulary_ref != v.ref())
    add("VOCABULARY_MISMATCH", {fs.vocabulary_ref.domain_name + "@" + fs.vocabulary_ref.version},
        "scenario is bound to a different vocabulary");

  std::set<std::string, std::less<>> seen;
  for (const auto& inst : fs.instances) {
    if (!seen.insert(inst.id).second) add("DUPLICATE_INSTANCE", {inst.id}, "instance declared twice");
    if (v.find(inst.term, TermKind::entity) == nullptr)
      add("UNKNOWN_TERM", {inst.id, inst.term}, "'" + inst.term + "' is not an entity term");
  }

  for (std::size_t i = 0; i < fs.relations.size(); ++i) {
    const auto& r = fs.relations[i];
    const Term* term = v.find(r.relation, TermKind::relation);
    if (term == nullptr) {
      add("UNKNOWN_TERM", {detail::relation_element(i), r.relation}, "'" + r.relation + "' is not a relation term");
      continue;
    }
    if (r.arguments.size() != term->arity)
      add("ARITY_MISMATCH", {detail::relation_element(i)}, "wrong number of arguments for '" + r.relation + "'");
    for (const auto& arg : r.arguments) {
      const EntityInstance* inst = fs.find_instance(arg);
      if (inst == nullptr)
        add("UNRESOLVED_INSTANCE", {detail::relation_element(i), arg}, "undeclared instance '" + arg + "'");
      else if (!term->applies_to_entity(inst->term))
        add("ILLEGAL_APPLICATION", {detail::relation_element(i), arg},
            "'" + r.relation + "' does not apply to '" + inst->term + "'");
    }
  }

  std::set<std::pair<std::string, std::string>> assigned;
  for (const auto& a : fs.attributes) {
    if (!assigned.emplace(a.instance, a.attribute).second)
      add("DUPLICATE_ATTRIBUTE", {a.instance, a.attribute}, "attribute assigned twice");
    const Term* term = v.find(a.attribute, TermKind::attribute);
    const EntityInstance* inst = fs.find_instance(a.instance);
    if (term == nullptr) {
      add("UNKNOWN_TERM", {a.instance, a.attribute}, "'" + a.attribute + "' is not an attribute term");
      continue;
    }
    if (inst == nullptr) {
      add("UNRESOLVED_INSTANCE", {a.instance, a.attribute}, "undeclared instance '" + a.instance + "'");
      continue;
    }
    if (!term->applies_to_entity(inst->term))
      add("ILLEGAL_APPLICATION", {a.instance, a.attribute}, "'" + a.attribute + "' does not apply to '" + inst->term + "'");
    if (!term->allows_value(a.value))
      add("ILLEGAL_VALUE", {a.instance, a.attribute}, "'" + a.value + "' is not allowed for '" + a.attribute + "'");
  }

  // Each unordered pair of phrases (including a phrase with itself) is
  // reported at most once per exclusion rule.
  for (const RelationExclusion& ex : v.relation_exclusions) {
    for (std::size_t i = 0; i < fs.relations.size(); ++i) {
      for (std::size_t j = i; j < fs.relations.size(); ++j) {
        const auto& a = fs.relations[i];
        const auto& b = fs.relations[j];
        if (detail::excluded_pair(ex, a, b) || detail::excluded_pair(ex, b, a)) {
          std::vector<std::string> elements{detail::relation_element(i)};
          if (j != i) elements.push_back(detail::relation_element(j));
          add("MUTUAL_EXCLUSION", std::move(elements),
              "'" + ex.first + "' and '" + ex.second + "' phrases may not co-occur");
        }
      }
    }
  }
  for (const ValueExclusion& ex : v.value_exclusions) {
    for (const auto& inst : fs.instances) {
      const AttributeAssignment* a = fs.find_assignment(inst.id, ex.first_attribute);
      const AttributeAssignment* b = fs.find_assignment(inst.id, ex.second_attribute);
      if (a != nullptr && b != nullptr && a->value == ex.first_value && b->value == ex.second_value)
        add("MUTUAL_EXCLUSION", {inst.id, ex.first_attribute, ex.second_attribute},
            ex.first_attribute + "=" + ex.first_value + " excludes " + ex.second_attribute + "=" + ex.second_value);
    }
  }

  for (const auto& [name, term] : v.terms) {
    if (term.kind != TermKind::attribute || !term.required) continue;
    for (const auto& inst : fs.instances) {
      if (term.applies_to_entity(inst.term) && fs.find_assignment(inst.id, name) == nullptr)
        add("MISSING_REQUIRED_ATTRIBUTE", {inst.id, name}, "'" + inst.id + "' lacks required attribute '" + name + "'");
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Variation

struct VariationTarget {
  std::string instance;
  std::string attribute;
};

/// Cartesian product over the allowed values of the varied attributes, the
/// first target varying slowest. Inconsistent combinations are dropped.
/// Results are renamed `<id>-v<index>` where index counts the full product.
inline std::vector<FunctionalScenario> enumerate_variations(const FunctionalScenario& fs, const Vocabulary& v,
                                                            const std::vector<VariationTarget>& vary) {
  if (vary.empty()) return {fs};
  std::vector<std::size_t> slots;
  std::vector<const std::vector<std::string>*> domains;
  std::set<std::pair<std::string, std::string>> targeted;
  for (const auto& target : vary) {
    if (!targeted.emplace(target.instance, target.attribute).second)
      throw Error(ErrorCode::UnknownVariationTarget, "(" + target.instance + ", " + target.attribute + ") varied twice");
    auto it = std::find_if(fs.attributes.begin(), fs.attributes.end(), [&](const AttributeAssignment& a) {
      return a.instance == target.instance && a.attribute == target.attribute;
    });
    const Term* term = v.find(target.attribute, TermKind::attribute);
    if (it == fs.attributes.end() || term == nullptr)
      throw Error(ErrorCode::UnknownVariationTarget,
                  "(" + target.instance + ", " + target.attribute + ") is not assigned in scenario '" + fs.scenario_id + "'");
    slots.push_back(static_cast<std::size_t>(it - fs.attributes.begin()));
    domains.push_back(&term->allowed_values);
  }

  std::vector<FunctionalScenario> out;
  std::vector<std::size_t> digits(vary.size(), 0);
  for (std::size_t index = 0;; ++index) {
    FunctionalScenario variant = fs;
    variant.scenario_id = fs.scenario_id + "-v" + std::to_string(index);
    for (std::size_t k = 0; k < slots.size(); ++k) variant.attributes[slots[k]].value = (*domains[k])[digits[k]];
    if (check_consistency(variant, v).ok()) out.push_back(std::move(variant));

    std::size_t k = digits.size();
    while (k > 0) {
      --k;
      if (++digits[k] < domains[k]->size()) break;
      digits[k] = 0;
      if (k == 0) return out;
    }
  }
}

// ---------------------------------------------------------------------------
// Serialization

inline Json functional_to_json(const FunctionalScenario& fs) {
  Json doc = Json::object();
  doc["format"] = "functional/1";
  doc["scenario_id"] = fs.scenario_id;
  doc["vocabulary_ref"] = {{"domain_name", fs.vocabulary_ref.domain_name}, {"version", fs.vocabulary_ref.version}};
  Json instances = Json::array();
  for (const auto& i : fs.instances) instances.push_back({{"id", i.id}, {"term", i.term}});
  Json relations = Json::array();
  for (const auto& r : fs.relations) relations.push_back({{"relation", r.relation}, {"arguments", r.arguments}});
  Json attributes = Json::array();
  for (const auto& a : fs.attributes)
    attributes.push_back({{"instance", a.instance}, {"attribute", a.attribute}, {"value", a.value}});
  doc["instances"] = std::move(instances);
  doc["relations"] = std::move(relations);
  doc["attributes"] = std::move(attributes);
  return doc;
}

inline std::string serialize_functional(const FunctionalScenario& fs) { return canonical_dump(functional_to_json(fs)); }

inline FunctionalScenario functional_from_json(const Json& doc) {
  schema::expect_format(doc, "functional/1");
  FunctionalScenario fs;
  fs.scenario_id = schema::string_field(doc, "functional", "scenario_id");
  const Json& ref = schema::object_field(doc, "functional", "vocabulary_ref");
  fs.vocabulary_ref = {schema::string_field(ref, "vocabulary_ref", "domain_name"),
                       schema::string_field(ref, "vocabulary_ref", "version")};
  for (const Json& i : schema::array_field(doc, "functional", "instances"))
    fs.instances.push_back({schema::string_field(i, "instance", "id"), schema::string_field(i, "instance", "term")});
  for (const Json& r : schema::array_field(doc, "functional", "relations")) {
    RelationPhrase rp{schema::string_field(r, "relation", "relation"), {}};
    for (const Json& a : schema::array_field(r, "relation", "arguments")) rp.arguments.push_back(schema::string_of(a, "argument"));
    fs.relations.push_back(std::move(rp));
  }
  for (const Json& a : schema::array_field(doc, "functional", "attributes"))
    fs.attributes.push_back({schema::string_field(a, "attribute", "instance"),
                             schema::string_field(a, "attribute", "attribute"),
                             schema::string_field(a, "attribute", "value")});
  return fs;
}

inline FunctionalScenario deserialize_functional(std::string_view text) { return functional_from_json(parse_json(text)); }

inline std::string functional_hash(const FunctionalScenario& fs) { return sha256_hex(serialize_functional(fs)); }

}  // namespace scenario
