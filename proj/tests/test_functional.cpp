#include <gtest/gtest.h>

#include <set>

#include "scenario/functional.hpp"
#include "support.hpp"

using namespace scenario;
namespace ts = testing_support;

namespace {

ErrorCode parse_error(const std::string& dsl, const Vocabulary& v, std::size_t* line = nullptr, std::string* msg = nullptr) {
  try {
    parse_functional(dsl, v);
  } catch (const Error& e) {
    if (line) *line = e.line();
    if (msg) *msg = e.detail();
    return e.code();
  }
  ADD_FAILURE() << "accepted: " << dsl;
  return ErrorCode::IoError;
}

/// Oracle for the FunctionalScenario type invariants, written against the
/// vocabulary directly.
std::string invariant_violation(const FunctionalScenario& fs, const Vocabulary& v) {
  std::map<std::string, std::string> term_of;
  for (const auto& i : fs.instances) {
    if (!term_of.emplace(i.id, i.term).second) return "duplicate id " + i.id;
    auto t = v.terms.find(i.term);
    if (t == v.terms.end() || t->second.kind != TermKind::entity) return "bad entity " + i.term;
  }
  for (const auto& r : fs.relations) {
    auto t = v.terms.find(r.relation);
    if (t == v.terms.end() || t->second.kind != TermKind::relation) return "bad relation " + r.relation;
    if (r.arguments.size() != t->second.arity) return "arity " + r.relation;
    for (const auto& a : r.arguments) {
      if (!term_of.count(a)) return "unresolved " + a;
      const auto& ap = t->second.applies_to;
      if (!ap.empty() && std::find(ap.begin(), ap.end(), term_of[a]) == ap.end()) return "illegal application";
    }
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& a : fs.attributes) {
    auto t = v.terms.find(a.attribute);
    if (t == v.terms.end() || t->second.kind != TermKind::attribute) return "bad attribute";
    if (!term_of.count(a.instance)) return "unresolved " + a.instance;
    const auto& vals = t->second.allowed_values;
    if (std::find(vals.begin(), vals.end(), a.value) == vals.end()) return "bad value";
    if (!seen.insert({a.instance, a.attribute}).second) return "duplicate attribute";
    const auto& ap = t->second.applies_to;
    if (!ap.empty() && std::find(ap.begin(), ap.end(), term_of[a.instance]) == ap.end()) return "illegal attribute";
  }
  return "";
}

}  // namespace

TEST(ParseFunctional, CarFollowsTruckScenario) {
  const Vocabulary v = ts::highway_vocabulary();
  const FunctionalScenario fs =
      parse_functional("scenario s1 / road r1 is two-lane-motorway / r1 geometry curve / car c1 / truck t1 / c1 follows t1 / "
                       "c1 lane right / t1 lane right",
                       v);
  EXPECT_EQ(fs.scenario_id, "s1");
  ASSERT_EQ(fs.instances.size(), 3u);
  EXPECT_EQ(fs.instances[0], (EntityInstance{"r1", "road"}));
  ASSERT_EQ(fs.relations.size(), 1u);
  EXPECT_EQ(fs.relations[0], (RelationPhrase{"follows", {"c1", "t1"}}));
  ASSERT_EQ(fs.attributes.size(), 4u);
  EXPECT_EQ(fs.attributes[0], (AttributeAssignment{"r1", "layout", "two-lane-motorway"}));
  EXPECT_EQ(fs, parse_functional(ts::follow_text(), v));
}

TEST(ParseFunctional, EmptyScenario) {
  const FunctionalScenario fs = parse_functional("scenario s0", ts::highway_vocabulary());
  EXPECT_EQ(fs.scenario_id, "s0");
  EXPECT_TRUE(fs.instances.empty() && fs.relations.empty() && fs.attributes.empty());
}

TEST(ParseFunctional, UnknownRelationNamesWordAndLine) {
  std::size_t line = 0;
  std::string msg;
  EXPECT_EQ(parse_error("scenario s2\ncar c1\ntruck t1\nc1 overtakes t1\n", ts::highway_vocabulary(), &line, &msg),
            ErrorCode::UnknownTerm);
  EXPECT_EQ(line, 4u);
  EXPECT_NE(msg.find("overtakes"), std::string::npos);
}

TEST(ParseFunctional, ErrorPaths) {
  const Vocabulary v = ts::highway_vocabulary();
  EXPECT_EQ(parse_error("", v), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("car c1", v), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("scenario s1\nscenario s2", v), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("scenario s1\ncar c1\ntruck t1\nc1 follows", v), ErrorCode::ArityMismatch);
  EXPECT_EQ(parse_error("scenario s1\ncar c1\ntruck t1\nc1 follows t1 t1", v), ErrorCode::ArityMismatch);
  EXPECT_EQ(parse_error("scenario s1\ncar c1\ncar c1", v), ErrorCode::DuplicateInstance);
  EXPECT_EQ(parse_error("scenario s1\ncar c1\nc1 lane middle", v), ErrorCode::IllegalAttributeValue);
  EXPECT_EQ(parse_error("scenario s1\ncar c1\nc1 geometry curve", v), ErrorCode::IllegalApplication);
  EXPECT_EQ(parse_error("scenario s1\ncar c1\nroad r1\nc1 follows r1", v), ErrorCode::IllegalApplication);
  EXPECT_EQ(parse_error("scenario s1\ncar c1\nc1 lane left\nc1 lane right", v), ErrorCode::DuplicateAttribute);
  EXPECT_EQ(parse_error("scenario s1\ncar c1\nc1 follows t9", v), ErrorCode::UnknownTerm);
  EXPECT_EQ(parse_error("scenario s1\nbus b1", v), ErrorCode::UnknownTerm);
  EXPECT_EQ(parse_error("scenario s1\ncar truck", v), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("scenario s1\ncar 1c", v), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("scenario s1\nlane r1 is car", v), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("scenario s1\nroad r1 is autobahn", v), ErrorCode::UnknownTerm);
  EXPECT_EQ(parse_error("scenario s1\ncar c1 is two-lane-motorway", v), ErrorCode::UnknownTerm);
}

TEST(ParseFunctional, AliasForms) {
  const Vocabulary v = ts::highway_vocabulary();
  const auto a = parse_functional("scenario s1\nc1 is car\ntruck t1 is car", v);
  EXPECT_EQ(a.instances, (std::vector<EntityInstance>{{"c1", "car"}, {"t1", "car"}}));
  const auto b = parse_functional("scenario s1\nroad r1 is three-lane-motorway", v);
  EXPECT_EQ(b.attributes, (std::vector<AttributeAssignment>{{"r1", "layout", "three-lane-motorway"}}));
}

TEST(ParseFunctional, CommentsAndSeparators) {
  const Vocabulary v = ts::highway_vocabulary();
  const auto a = parse_functional("scenario s1 # header\n\n  car   c1 / truck t1   # two\n", v);
  const auto b = parse_functional("scenario s1\ncar c1\ntruck t1", v);
  EXPECT_EQ(a, b);
}

TEST(CheckConsistency, CarFollowsTruckHasNoFindings) {
  const Vocabulary v = ts::highway_vocabulary();
  EXPECT_TRUE(check_consistency(parse_functional(ts::follow_text(), v), v).ok());
}

TEST(CheckConsistency, MutualFollowsIsOneExclusion) {
  const Vocabulary v = ts::highway_vocabulary();
  const auto fs = parse_functional(
      "scenario s1\nroad r1 is two-lane-motorway\nr1 geometry straight\ncar c1\ntruck t1\nc1 follows t1\nt1 follows c1", v);
  const ConsistencyReport r = check_consistency(fs, v);
  ASSERT_EQ(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].code, "MUTUAL_EXCLUSION");
  EXPECT_EQ(r.findings[0].elements, (std::vector<std::string>{"relations[0]", "relations[1]"}));
}

TEST(CheckConsistency, MutualExclusionMatchesBruteForceOverExclusionTable) {
  const Vocabulary v = ts::highway_vocabulary();
  // Oracle: a pair (a, b) clashes iff some table row maps a's arguments onto b's.
  const std::vector<std::pair<std::string, std::string>> phrases = {{"c1", "t1"}, {"t1", "c1"}, {"c1", "c2"}, {"c2", "c1"}, {"t1", "c2"}};
  for (std::size_t mask = 0; mask < (1u << phrases.size()); ++mask) {
    std::string dsl = "scenario s1\nroad r1 is two-lane-motorway\nr1 geometry curve\ncar c1\ncar c2\ntruck t1\n";
    std::vector<std::pair<std::string, std::string>> chosen;
    for (std::size_t i = 0; i < phrases.size(); ++i)
      if (mask & (1u << i)) {
        chosen.push_back(phrases[i]);
        dsl += phrases[i].first + " follows " + phrases[i].second + "\n";
      }
    std::size_t expected = 0;
    for (std::size_t i = 0; i < chosen.size(); ++i)
      for (std::size_t j = i; j < chosen.size(); ++j)
        for (const auto& ex : v.relation_exclusions) {
          const std::vector<std::string> a = {chosen[i].first, chosen[i].second};
          const std::vector<std::string> b = {chosen[j].first, chosen[j].second};
          auto maps = [&](const auto& x, const auto& y) { return y[0] == x[ex.mapping[0]] && y[1] == x[ex.mapping[1]]; };
          if (maps(a, b) || maps(b, a)) {
            ++expected;
            break;
          }
        }
    const auto r = check_consistency(parse_functional(dsl, v), v);
    std::size_t got = 0;
    for (const auto& f : r.findings) got += f.code == "MUTUAL_EXCLUSION";
    EXPECT_EQ(got, expected) << dsl;
  }
}

TEST(CheckConsistency, MissingRequiredGeometry) {
  const Vocabulary v = ts::highway_vocabulary();
  const auto fs = parse_functional("scenario s1\nroad r1 is two-lane-motorway\ncar c1\ntruck t1\nc1 follows t1", v);
  const auto r = check_consistency(fs, v);
  ASSERT_EQ(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].code, "MISSING_REQUIRED_ATTRIBUTE");
  EXPECT_EQ(r.findings[0].elements, (std::vector<std::string>{"r1", "geometry"}));
}

TEST(CheckConsistency, StructuralFindingsOnHandBuiltScenarios) {
  const Vocabulary v = ts::highway_vocabulary();
  FunctionalScenario fs = parse_functional(ts::follow_text(), v);
  fs.instances.push_back({"c1", "car"});
  fs.relations.push_back({"follows", {"c1"}});
  fs.relations.push_back({"follows", {"c1", "zz"}});
  fs.attributes.push_back({"c1", "lane", "middle"});
  fs.attributes.push_back({"c1", "lane", "left"});
  fs.attributes.push_back({"r1", "lane", "left"});
  fs.instances.push_back({"b1", "bus"});
  const auto r = check_consistency(fs, v);
  for (const char* code : {"DUPLICATE_INSTANCE", "ARITY_MISMATCH", "UNRESOLVED_INSTANCE", "ILLEGAL_VALUE", "DUPLICATE_ATTRIBUTE",
                           "ILLEGAL_APPLICATION", "UNKNOWN_TERM"})
    EXPECT_TRUE(r.has(code)) << code;
  FunctionalScenario other = parse_functional(ts::follow_text(), v);
  other.vocabulary_ref.version = "9";
  EXPECT_TRUE(check_consistency(other, v).has("VOCABULARY_MISMATCH"));
}

TEST(EnumerateVariations, GeometryGivesTwo) {
  const Vocabulary v = ts::highway_vocabulary();
  const auto fs = parse_functional(ts::follow_text(), v);
  const auto out = enumerate_variations(fs, v, {{"r1", "geometry"}});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].find_assignment("r1", "geometry")->value, "straight");
  EXPECT_EQ(out[1].find_assignment("r1", "geometry")->value, "curve");
  EXPECT_EQ(out[0].scenario_id, "s1-v0");
}

TEST(EnumerateVariations, EmptyListIsIdentity) {
  const Vocabulary v = ts::highway_vocabulary();
  const auto fs = parse_functional(ts::follow_text(), v);
  EXPECT_EQ(enumerate_variations(fs, v, {}), std::vector<FunctionalScenario>{fs});
}

TEST(EnumerateVariations, TwoByThreeIsSix) {
  const Vocabulary v = load_vocabulary(R"({"domain_name": "d", "version": "1", "terms": [
    {"name": "car", "kind": "entity"},
    {"name": "colour", "kind": "attribute", "allowed_values": ["red", "blue"]},
    {"name": "size", "kind": "attribute", "allowed_values": ["s", "m", "l"]}]})");
  const auto fs = parse_functional("scenario x\ncar c\nc colour red\nc size s", v);
  const auto out = enumerate_variations(fs, v, {{"c", "colour"}, {"c", "size"}});
  ASSERT_EQ(out.size(), 6u);
  EXPECT_EQ(out[1].find_assignment("c", "size")->value, "m");  // last target varies fastest
  EXPECT_EQ(out[3].find_assignment("c", "colour")->value, "blue");
}

TEST(EnumerateVariations, UnknownTarget) {
  const Vocabulary v = ts::highway_vocabulary();
  const auto fs = parse_functional(ts::follow_text(), v);
  EXPECT_THROW(enumerate_variations(fs, v, {{"c1", "geometry"}}), Error);
  EXPECT_THROW(enumerate_variations(fs, v, {{"zz", "lane"}}), Error);
}

TEST(FunctionalProperties, VariationCountBound) {
  ts::Gen g(505);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    const Vocabulary v = ts::random_vocabulary(g);
    const FunctionalScenario fs = ts::random_functional(g, v);
    if (fs.attributes.empty()) continue;
    std::vector<VariationTarget> vary;
    std::size_t product = 1;
    for (const auto& a : fs.attributes)
      if (ts::coin(g)) {
        vary.push_back({a.instance, a.attribute});
        product *= v.find(a.attribute)->allowed_values.size();
      }
    const auto out = enumerate_variations(fs, v, vary);
    EXPECT_LE(out.size(), product);
    if (vary.empty()) {
      ASSERT_EQ(out.size(), 1u);
      EXPECT_EQ(out[0], fs);
      continue;
    }
    for (const auto& o : out) EXPECT_TRUE(check_consistency(o, v).ok());
    // brute force: count consistent members of the full product
    std::size_t consistent = 0;
    std::vector<std::size_t> digits(vary.size(), 0);
    while (true) {
      FunctionalScenario c = fs;
      for (std::size_t k = 0; k < vary.size(); ++k)
        for (auto& a : c.attributes)
          if (a.instance == vary[k].instance && a.attribute == vary[k].attribute)
            a.value = v.find(a.attribute)->allowed_values[digits[k]];
      consistent += check_consistency(c, v).ok();
      std::size_t k = digits.size();
      bool done = false;
      while (k > 0) {
        --k;
        if (++digits[k] < v.find(vary[k].attribute)->allowed_values.size()) break;
        digits[k] = 0;
        if (k == 0) done = true;
      }
      if (done) break;
    }
    EXPECT_EQ(out.size(), consistent);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(FunctionalProperties, PrettyPrintParseRoundTrip) {
  ts::Gen g(606);
  for (int i = 0; i < 500; ++i) {
    const Vocabulary v = ts::random_vocabulary(g);
    const FunctionalScenario fs = ts::random_functional(g, v);
    const std::string text = format_functional(fs);
    ASSERT_EQ(parse_functional(text, v), fs) << text;
  }
}

TEST(FunctionalProperties, SerializationRoundTrip) {
  ts::Gen g(707);
  for (int i = 0; i < 300; ++i) {
    const Vocabulary v = ts::random_vocabulary(g);
    const FunctionalScenario fs = ts::random_functional(g, v);
    const std::string text = serialize_functional(fs);
    ASSERT_EQ(deserialize_functional(text), fs);
    EXPECT_EQ(serialize_functional(deserialize_functional(text)), text);
  }
}

TEST(FunctionalProperties, FuzzedDslNeverYieldsInvalidScenario) {
  ts::Gen g(808);
  const Vocabulary v = ts::highway_vocabulary();
  const std::vector<std::string> words = {"car", "truck", "road", "two-lane-motorway", "follows", "lane", "geometry", "left",
                                          "right", "curve", "straight", "is", "c1", "t1", "r1", "x", "scenario", "/", "#", "\n"};
  std::size_t accepted = 0;
  for (int i = 0; i < 5000; ++i) {
    std::string text = "scenario f" + std::to_string(i) + "\n";
    for (std::size_t k = 0, n = ts::pick(g, 0, 25); k < n; ++k) text += ts::pick_one(g, words) + (ts::coin(g, 0.3) ? "\n" : " ");
    try {
      const FunctionalScenario fs = parse_functional(text, v);
      ++accepted;
      EXPECT_EQ(invariant_violation(fs, v), "") << text;
      EXPECT_EQ(parse_functional(format_functional(fs), v), fs);
    } catch (const Error& e) {
      EXPECT_NE(e.line(), 0u) << text;
    }
  }
  EXPECT_GT(accepted, 50u);
}
