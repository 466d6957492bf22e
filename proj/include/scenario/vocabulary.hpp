#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "scenario/error.hpp"
#include "scenario/json_io.hpp"

namespace scenario {

enum class TermKind { entity, relation, attribute };

inline std::string_view to_string(TermKind kind) {
  switch (kind) {
    case TermKind::entity: return "entity";
    case TermKind::relation: return "relation";
    case TermKind::attribute: return "attribute";
  }
  return "entity";
}

struct Term {
  std::string name;
  TermKind kind = TermKind::entity;
  std::size_t arity = 0;                    // relations only
  std::vector<std::string> allowed_values;  // attributes only
  std::vector<std::string> applies_to;      // entity names; empty means any entity
  std::string description;
  bool required = false;                    // attributes only

  bool applies_to_entity(std::string_view entity) const {
    return applies_to.empty() || std::find(applies_to.begin(), applies_to.end(), entity) != applies_to.end();
  }
  bool allows_value(std::string_view value) const {
    return std::find(allowed_values.begin(), allowed_values.end(), value) != allowed_values.end();
  }

  bool operator==(const Term&) const = default;
};

/// Two relation phrases that may not co-occur. The second phrase matches when
/// its arguments are the first phrase's arguments permuted by `mapping`
/// (second.args[i] == first.args[mapping[i]]). `follows` with mapping [1, 0]
/// makes `follows` antisymmetric.
struct RelationExclusion {
  std::string first;
  std::string second;
  std::vector<std::size_t> mapping;

  auto operator<=>(const RelationExclusion&) const = default;
};

/// Two attribute values that may not be assigned to the same instance.
struct ValueExclusion {
  std::string first_attribute;
  std::string first_value;
  std::string second_attribute;
  std::string second_value;

  auto operator<=>(const ValueExclusion&) const = default;
};

struct VocabularyRef {
  std::string domain_name;
  std::string version;

  bool operator==(const VocabularyRef&) const = default;
};

/// Immutable term inventory. Terms are keyed by name, so the order they were
/// declared in has no effect on equality or serialization.
struct Vocabulary {
  std::string domain_name;
  std::string version;
  std::map<std::string, Term, std::less<>> terms;
  std::vector<RelationExclusion> relation_exclusions;  // sorted
  std::vector<ValueExclusion> value_exclusions;        // sorted

  VocabularyRef ref() const { return {domain_name, version}; }

  const Term* find(std::string_view name) const {
    auto it = terms.find(name);
    return it == terms.end() ? nullptr : &it->second;
  }
  const Term* find(std::string_view name, TermKind kind) const {
    const Term* t = find(name);
    return t != nullptr && t->kind == kind ? t : nullptr;
  }

  bool operator==(const Vocabulary&) const = default;
};

/// Exact, case-sensitive lookup. Absence is a normal result.
inline const Term* lookup_term(const Vocabulary& v, std::string_view name) { return v.find(name); }

/// Lowercases and joins whitespace runs with '-' ("Two-lane Motorway" -> "two-lane-motorway").
inline std::string normalize_name(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += '-';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

/// `[a-z][a-z0-9_-]*`
inline bool is_term_name(std::string_view s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

/// Categorical labels may also start with a digit ("3-lane").
inline bool is_value_label(std::string_view s) {
  if (s.empty() || !((s[0] >= 'a' && s[0] <= 'z') || (s[0] >= '0' && s[0] <= '9'))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
  });
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// Nearest term by edit distance (<= max_distance); ties resolve to the
/// lexicographically smallest name.
inline std::optional<std::string> nearest_term(const Vocabulary& v, std::string_view word,
                                               std::size_t max_distance = 2) {
  std::optional<std::string> best;
  std::size_t best_distance = max_distance + 1;
  for (const auto& [name, term] : v.terms) {
    const std::size_t d = edit_distance(word, name);
    if (d < best_distance) {
      best_distance = d;
      best = name;
    }
  }
  return best;
}

namespace detail {

inline std::string term_context(std::size_t index) { return "terms[" + std::to_string(index) + "]"; }

inline std::vector<std::string> name_list(const Json& j, const std::string& context, bool labels) {
  if (!j.is_array()) throw Error(ErrorCode::SchemaViolation, context + ": expected an array");
  std::vector<std::string> out;
  for (const Json& item : j) {
    std::string s = normalize_name(schema::string_of(item, context));
    if (labels ? !is_value_label(s) : !is_term_name(s))
      throw Error(ErrorCode::InvalidTerm, context + ": malformed name '" + s + "'");
    if (std::find(out.begin(), out.end(), s) != out.end())
      throw Error(ErrorCode::InvalidTerm, context + ": '" + s + "' listed twice");
    out.push_back(std::move(s));
  }
  return out;
}

inline Term parse_term(const Json& j, std::size_t index) {
  const std::string context = term_context(index);
  if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, context + ": expected an object");
  Term t;
  t.name = normalize_name(schema::string_field(j, context, "name"));
  if (t.name.empty()) throw Error(ErrorCode::InvalidTerm, context + ": empty term name");
  if (!is_term_name(t.name))
    throw Error(ErrorCode::InvalidTerm, context + ": term name '" + t.name + "' must match [a-z][a-z0-9_-]*");
  const std::string kind = schema::string_field(j, context, "kind");
  if (kind == "entity") {
    t.kind = TermKind::entity;
  } else if (kind == "relation") {
    t.kind = TermKind::relation;
  } else if (kind == "attribute") {
    t.kind = TermKind::attribute;
  } else {
    throw Error(ErrorCode::InvalidTerm, context + ": unknown kind '" + kind + "'");
  }
  if (const Json* d = schema::optional_field(j, "description")) t.description = schema::string_of(*d, context);

  const Json* arity = schema::optional_field(j, "arity");
  const Json* values = schema::optional_field(j, "allowed_values");
  const Json* applies = schema::optional_field(j, "applies_to");
  const Json* required = schema::optional_field(j, "required");

  auto reject = [&](bool present, const char* field) {
    if (present)
      throw Error(ErrorCode::InvalidTerm,
                  context + " ('" + t.name + "'): field '" + field + "' is not allowed on " + kind + " terms");
  };
  switch (t.kind) {
    case TermKind::entity:
      reject(arity != nullptr, "arity");
      reject(values != nullptr, "allowed_values");
      reject(applies != nullptr, "applies_to");
      reject(required != nullptr, "required");
      break;
    case TermKind::relation:
      reject(values != nullptr, "allowed_values");
      reject(required != nullptr, "required");
      if (arity == nullptr) throw Error(ErrorCode::InvalidTerm, context + " ('" + t.name + "'): relation needs an arity");
      if (!arity->is_number_integer() || arity->get<long long>() < 1)
        throw Error(ErrorCode::InvalidTerm, context + " ('" + t.name + "'): relation arity must be an integer >= 1");
      t.arity = static_cast<std::size_t>(arity->get<long long>());
      break;
    case TermKind::attribute:
      reject(arity != nullptr, "arity");
      if (values == nullptr)
        throw Error(ErrorCode::InvalidTerm, context + " ('" + t.name + "'): attribute needs allowed_values");
      t.allowed_values = name_list(*values, context + ".allowed_values", true);
      if (t.allowed_values.empty())
        throw Error(ErrorCode::InvalidTerm, context + " ('" + t.name + "'): attribute needs >= 1 allowed value");
      if (required != nullptr) {
        if (!required->is_boolean()) throw Error(ErrorCode::SchemaViolation, context + ".required: expected a boolean");
        t.required = required->get<bool>();
      }
      break;
  }
  if (applies != nullptr) t.applies_to = name_list(*applies, context + ".applies_to", false);
  return t;
}

inline Json term_to_json(const Term& t) {
  Json j = Json::object();
  j["name"] = t.name;
  j["kind"] = std::string(to_string(t.kind));
  j["description"] = t.description;
  switch (t.kind) {
    case TermKind::entity:
      break;
    case TermKind::relation:
      j["arity"] = t.arity;
      j["applies_to"] = t.applies_to;
      break;
    case TermKind::attribute:
      j["allowed_values"] = t.allowed_values;
      j["applies_to"] = t.applies_to;
      j["required"] = t.required;
      break;
  }
  return j;
}

inline void check_references(const Vocabulary& v) {
  for (const auto& [name, t] : v.terms) {
    for (const std::string& target : t.applies_to) {
      const Term* e = v.find(target);
      if (e == nullptr)
        throw Error(ErrorCode::DanglingReference, "term '" + name + "' applies_to unknown term '" + target + "'");
      if (e->kind != TermKind::entity)
        throw Error(ErrorCode::DanglingReference,
                    "term '" + name + "' applies_to '" + target + "', which is not an entity");
    }
  }
  for (const RelationExclusion& ex : v.relation_exclusions) {
    const Term* a = v.find(ex.first, TermKind::relation);
    const Term* b = v.find(ex.second, TermKind::relation);
    if (a == nullptr || b == nullptr)
      throw Error(ErrorCode::DanglingReference,
                  "exclusion references unknown relation '" + (a == nullptr ? ex.first : ex.second) + "'");
    if (ex.mapping.size() != b->arity)
      throw Error(ErrorCode::InvalidTerm, "exclusion mapping for '" + ex.second + "' must have " +
                                              std::to_string(b->arity) + " entries");
    for (std::size_t m : ex.mapping)
      if (m >= a->arity)
        throw Error(ErrorCode::InvalidTerm, "exclusion mapping index " + std::to_string(m) + " exceeds arity of '" +
                                                ex.first + "'");
  }
  for (const ValueExclusion& ex : v.value_exclusions) {
    for (auto [attr, value] : {std::pair{&ex.first_attribute, &ex.first_value},
                               std::pair{&ex.second_attribute, &ex.second_value}}) {
      const Term* t = v.find(*attr, TermKind::attribute);
      if (t == nullptr) throw Error(ErrorCode::DanglingReference, "exclusion references unknown attribute '" + *attr + "'");
      if (!t->allows_value(*value))
        throw Error(ErrorCode::DanglingReference,
                    "exclusion references value '" + *value + "' not allowed for '" + *attr + "'");
    }
  }
}

inline void parse_exclusions(const Json& list, Vocabulary& v) {
  if (!list.is_array()) throw Error(ErrorCode::SchemaViolation, "exclusions: expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string context = "exclusions[" + std::to_string(i) + "]";
    const Json& e = list[i];
    const std::string kind = schema::string_field(e, context, "kind");
    if (kind == "relation_pair") {
      RelationExclusion ex;
      ex.first = normalize_name(schema::string_field(e, context, "first"));
      ex.second = normalize_name(schema::string_field(e, context, "second"));
      for (const Json& m : schema::array_field(e, context, "mapping")) {
        if (!m.is_number_integer() || m.get<long long>() < 0)
          throw Error(ErrorCode::SchemaViolation, context + ".mapping: expected non-negative integers");
        ex.mapping.push_back(static_cast<std::size_t>(m.get<long long>()));
      }
      v.relation_exclusions.push_back(std::move(ex));
    } else if (kind == "value_pair") {
      const Json& a = schema::object_field(e, context, "first");
      const Json& b = schema::object_field(e, context, "second");
      ValueExclusion ex{normalize_name(schema::string_field(a, context + ".first", "attribute")),
                        normalize_name(schema::string_field(a, context + ".first", "value")),
                        normalize_name(schema::string_field(b, context + ".second", "attribute")),
                        normalize_name(schema::string_field(b, context + ".second", "value"))};
      v.value_exclusions.push_back(std::move(ex));
    } else {
      throw Error(ErrorCode::SchemaViolation, context + ": unknown exclusion kind '" + kind + "'");
    }
  }
  std::sort(v.relation_exclusions.begin(), v.relation_exclusions.end());
  v.relation_exclusions.erase(std::unique(v.relation_exclusions.begin(), v.relation_exclusions.end()),
                              v.relation_exclusions.end());
  std::sort(v.value_exclusions.begin(), v.value_exclusions.end());
  v.value_exclusions.erase(std::unique(v.value_exclusions.begin(), v.value_exclusions.end()),
                           v.value_exclusions.end());
}

}  // namespace detail

inline Vocabulary vocabulary_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::SchemaViolation, "vocabulary: expected a JSON object");
  Vocabulary v;
  v.domain_name = normalize_name(schema::string_field(doc, "vocabulary", "domain_name"));
  if (!is_term_name(v.domain_name))
    throw Error(ErrorCode::SchemaViolation, "vocabulary: domain_name '" + v.domain_name + "' is not an identifier");
  v.version = schema::string_field(doc, "vocabulary", "version");
  const Json& terms = schema::array_field(doc, "vocabulary", "terms");

  std::map<std::string, std::size_t, std::less<>> first_seen;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    Term t = detail::parse_term(terms[i], i);
    if (auto it = first_seen.find(t.name); it != first_seen.end())
      throw Error(ErrorCode::DuplicateTerm, "term '" + t.name + "' declared twice: " + detail::term_context(it->second) +
                                                " and " + detail::term_context(i));
    first_seen.emplace(t.name, i);
    v.terms.emplace(t.name, std::move(t));
  }
  if (const Json* ex = schema::optional_field(doc, "exclusions")) detail::parse_exclusions(*ex, v);
  detail::check_references(v);
  return v;
}

inline Vocabulary load_vocabulary(std::string_view source) { return vocabulary_from_json(parse_json(source)); }

inline Json vocabulary_to_json(const Vocabulary& v) {
  Json doc = Json::object();
  doc["domain_name"] = v.domain_name;
  doc["version"] = v.version;
  Json terms = Json::array();
  for (const auto& [name, t] : v.terms) terms.push_back(detail::term_to_json(t));
  doc["terms"] = std::move(terms);
  Json exclusions = Json::array();
  for (const RelationExclusion& ex : v.relation_exclusions)
    exclusions.push_back({{"kind", "relation_pair"}, {"first", ex.first}, {"second", ex.second}, {"mapping", ex.mapping}});
  for (const ValueExclusion& ex : v.value_exclusions)
    exclusions.push_back({{"kind", "value_pair"},
                          {"first", {{"attribute", ex.first_attribute}, {"value", ex.first_value}}},
                          {"second", {{"attribute", ex.second_attribute}, {"value", ex.second_value}}}});
  doc["exclusions"] = std::move(exclusions);
  return doc;
}

inline std::string serialize_vocabulary(const Vocabulary& v) { return canonical_dump(vocabulary_to_json(v)); }

}  // namespace scenario
