#include <gtest/gtest.h>

#include <algorithm>

#include "scenario/vocabulary.hpp"
#include "support.hpp"

using namespace scenario;
namespace ts = testing_support;

namespace {

const char* kHighwayVocabulary = R"({
  "domain_name": "highway",
  "version": "1.0",
  "terms": [
    {"name": "car", "kind": "entity"},
    {"name": "truck", "kind": "entity"},
    {"name": "two-lane motorway", "kind": "entity"},
    {"name": "follows", "kind": "relation", "arity": 2, "applies_to": ["car", "truck"]},
    {"name": "geometry", "kind": "attribute", "allowed_values": ["straight", "curve"], "applies_to": ["two-lane motorway"]}
  ]
})";

ErrorCode code_of(const std::string& text) {
  try {
    load_vocabulary(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorCode::IoError;
}

std::string with_terms(const std::string& terms, const std::string& extra = "") {
  return R"({"domain_name": "d", "version": "1", "terms": [)" + terms + "]" + extra + "}";
}

}  // namespace

TEST(LoadVocabulary, HighwayVocabularyHasFiveTerms) {
  const Vocabulary v = load_vocabulary(kHighwayVocabulary);
  EXPECT_EQ(v.terms.size(), 5u);
  ASSERT_NE(v.find("two-lane-motorway"), nullptr);
  EXPECT_EQ(v.find("follows")->arity, 2u);
  EXPECT_EQ(v.find("geometry")->applies_to, std::vector<std::string>{"two-lane-motorway"});
}

TEST(LoadVocabulary, EmptyTermListIsValid) {
  const Vocabulary v = load_vocabulary(with_terms(""));
  EXPECT_TRUE(v.terms.empty());
}

TEST(LoadVocabulary, DuplicateTermNamesBothPositions) {
  try {
    load_vocabulary(with_terms(R"({"name": "car", "kind": "entity"}, {"name": "bus", "kind": "entity"}, {"name": "car", "kind": "entity"})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateTerm);
    EXPECT_NE(e.detail().find("terms[0]"), std::string::npos);
    EXPECT_NE(e.detail().find("terms[2]"), std::string::npos);
  }
}

TEST(LoadVocabulary, DuplicateAfterNormalization) {
  EXPECT_EQ(code_of(with_terms(R"({"name": "Two Lane", "kind": "entity"}, {"name": "two-lane", "kind": "entity"})")),
            ErrorCode::DuplicateTerm);
}

TEST(LoadVocabulary, DanglingAppliesTo) {
  EXPECT_EQ(code_of(with_terms(R"({"name": "lane", "kind": "attribute", "allowed_values": ["l"], "applies_to": ["bus"]})")),
            ErrorCode::DanglingReference);
  EXPECT_EQ(code_of(with_terms(R"({"name": "f", "kind": "relation", "arity": 1, "applies_to": ["g"]},
                                  {"name": "g", "kind": "relation", "arity": 1})")),
            ErrorCode::DanglingReference);
}

TEST(LoadVocabulary, KindSpecificFieldRules) {
  EXPECT_EQ(code_of(with_terms(R"({"name": "car", "kind": "entity", "arity": 2})")), ErrorCode::InvalidTerm);
  EXPECT_EQ(code_of(with_terms(R"({"name": "f", "kind": "relation"})")), ErrorCode::InvalidTerm);
  EXPECT_EQ(code_of(with_terms(R"({"name": "f", "kind": "relation", "arity": 0})")), ErrorCode::InvalidTerm);
  EXPECT_EQ(code_of(with_terms(R"({"name": "a", "kind": "attribute", "allowed_values": []})")), ErrorCode::InvalidTerm);
  EXPECT_EQ(code_of(with_terms(R"({"name": "a", "kind": "attribute", "arity": 1, "allowed_values": ["x"]})")), ErrorCode::InvalidTerm);
  EXPECT_EQ(code_of(with_terms(R"({"name": "a", "kind": "colour"})")), ErrorCode::InvalidTerm);
  EXPECT_EQ(code_of(with_terms(R"({"name": "9lives", "kind": "entity"})")), ErrorCode::InvalidTerm);
  EXPECT_EQ(code_of(with_terms(R"({"name": "", "kind": "entity"})")), ErrorCode::InvalidTerm);
}

TEST(LoadVocabulary, MalformedDocument) {
  EXPECT_EQ(code_of("{\"domain_name\": \"d\",\n \"terms\": [,]}"), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of(R"({"domain_name": "d", "version": "1"})"), ErrorCode::SchemaViolation);
  EXPECT_EQ(code_of(R"([1, 2])"), ErrorCode::SchemaViolation);
}

TEST(LoadVocabulary, ExclusionsAreChecked) {
  const std::string terms = R"({"name": "car", "kind": "entity"}, {"name": "f", "kind": "relation", "arity": 2})";
  EXPECT_EQ(load_vocabulary(with_terms(terms, R"(, "exclusions": [{"kind": "relation_pair", "first": "f", "second": "f", "mapping": [1, 0]}])"))
                .relation_exclusions.size(),
            1u);
  EXPECT_EQ(code_of(with_terms(terms, R"(, "exclusions": [{"kind": "relation_pair", "first": "f", "second": "g", "mapping": [1, 0]}])")),
            ErrorCode::DanglingReference);
  EXPECT_EQ(code_of(with_terms(terms, R"(, "exclusions": [{"kind": "relation_pair", "first": "f", "second": "f", "mapping": [2, 0]}])")),
            ErrorCode::InvalidTerm);
}

TEST(LookupTerm, ExactCaseSensitiveMatch) {
  const Vocabulary v = load_vocabulary(kHighwayVocabulary);
  ASSERT_NE(lookup_term(v, "truck"), nullptr);
  EXPECT_EQ(lookup_term(v, "truck")->kind, TermKind::entity);
  EXPECT_EQ(lookup_term(v, "bus"), nullptr);
  EXPECT_EQ(lookup_term(v, "Truck"), nullptr);
}

TEST(NearestTerm, SuggestsCloseNames) {
  const Vocabulary v = load_vocabulary(kHighwayVocabulary);
  EXPECT_EQ(nearest_term(v, "truk"), std::optional<std::string>("truck"));
  EXPECT_EQ(nearest_term(v, "overtakes"), std::nullopt);
  EXPECT_EQ(edit_distance("kitten", "sitting"), 3u);
}

TEST(NormalizeName, LowercaseWithHyphens) {
  EXPECT_EQ(normalize_name("Two-Lane  Motorway"), "two-lane-motorway");
  EXPECT_EQ(normalize_name("car"), "car");
}

TEST(VocabularyProperties, RoundTripOfGeneratedVocabularies) {
  ts::Gen g(101);
  for (int i = 0; i < 300; ++i) {
    const Vocabulary v = ts::random_vocabulary(g);
    const std::string text = serialize_vocabulary(v);
    const Vocabulary back = load_vocabulary(text);
    ASSERT_EQ(back, v) << text;
    EXPECT_EQ(serialize_vocabulary(back), text);
  }
}

TEST(VocabularyProperties, TermOrderDoesNotMatter) {
  ts::Gen g(202);
  for (int i = 0; i < 100; ++i) {
    const Vocabulary v = ts::random_vocabulary(g);
    Json doc = vocabulary_to_json(v);
    Json terms = doc["terms"];
    std::vector<Json> items(terms.begin(), terms.end());
    std::shuffle(items.begin(), items.end(), g);
    doc["terms"] = items;
    EXPECT_EQ(load_vocabulary(doc.dump()), v);
  }
}

TEST(VocabularyProperties, InvariantViolationsAreRejected) {
  ts::Gen g(303);
  for (int i = 0; i < 200; ++i) {
    const Vocabulary v = ts::random_vocabulary(g);
    Json doc = vocabulary_to_json(v);
    Json& terms = doc["terms"];
    const std::size_t victim = ts::pick(g, 0, terms.size() - 1);
    ErrorCode expected;
    switch (ts::pick(g, 0, 2)) {
      case 0:
        terms.push_back(terms[victim]);
        expected = ErrorCode::DuplicateTerm;
        break;
      case 1:
        if (terms[victim]["kind"] == "entity") {
          terms[victim]["arity"] = 1;
        } else if (terms[victim]["kind"] == "relation") {
          terms[victim]["arity"] = 0;
        } else {
          terms[victim]["allowed_values"] = Json::array();
        }
        expected = ErrorCode::InvalidTerm;
        break;
      default:
        if (terms[victim]["kind"] == "entity") {
          terms[victim]["name"] = "Bad Name!";
          expected = ErrorCode::InvalidTerm;
        } else {
          terms[victim]["applies_to"] = Json::array({"no-such-entity"});
          expected = ErrorCode::DanglingReference;
        }
        break;
    }
    EXPECT_EQ(code_of(doc.dump()), expected) << doc.dump();
  }
}
