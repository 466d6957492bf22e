#pragma once

// Concrete scenario -> test case. A test case carries the six items a test
// case specification needs: unique identification, work product reference,
// preconditions and configuration, environmental conditions, time-sequenced
// input data, and expected behavior with acceptable variations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "scenario/concretize.hpp"
#include "scenario/error.hpp"
#include "scenario/expression.hpp"
#include "scenario/json_io.hpp"
#include "scenario/logical.hpp"

namespace scenario {

/// Local names of the kinematic inputs of a vehicle instance.
inline constexpr std::string_view kPositionName = "s0";
inline constexpr std::string_view kSpeedName = "v0";

struct TimeSeries {
  std::string parameter;  // the concrete assignment the series starts from
  std::string signal;     // "position" | "speed" | "constant"
  std::string unit;
  double dt = 0.0;
  std::vector<double> samples;

  bool operator==(const TimeSeries&) const = default;
};

struct ExpectedCheck {
  std::string signal;
  Comparator comparator = Comparator::greater;
  double bound = 0.0;
  double tolerance = 0.0;

  bool operator==(const ExpectedCheck&) const = default;
};

struct ExpectedBehavior {
  std::string description;
  std::vector<ExpectedCheck> checks;

  bool operator==(const ExpectedBehavior&) const = default;
};

struct TestCaseMeta {
  std::string work_product_ref;
  std::string preconditions;
  std::string configuration;

  bool operator==(const TestCaseMeta&) const = default;
};

struct TestCase {
  std::string unique_id;
  std::string work_product_ref;
  std::string preconditions;
  std::string configuration;
  std::map<std::string, double, std::less<>> environmental_conditions;
  std::vector<TimeSeries> input_data;
  ExpectedBehavior expected;
  SourceRef source_ref;  // concrete scenario id + hash

  bool operator==(const TestCase&) const = default;
};

/// floor(duration / dt) + 1, tolerating the representation error of decimal
/// step sizes (0.3 / 0.1 evaluates to 2.9999999999999996).
inline std::size_t sample_count(double duration, double dt) {
  const double q = duration / dt;
  return static_cast<std::size_t>(std::floor(q * (1.0 + 1e-12))) + 1;
}

inline std::string instance_of(std::string_view qualified) {
  return std::string(qualified.substr(0, qualified.find('.')));
}

/// Constant-velocity kinematics: s(t) = s0 + v0·t for every vehicle (an
/// instance with scalar-initial parameters); every other parameter is held
/// constant. One series per parameter, in parameter order.
inline std::vector<TimeSeries> synthesize_traces(const LogicalScenario& ls, const ConcreteScenario& cs, double duration, double dt) {
  if (!(std::isfinite(duration) && std::isfinite(dt) && duration > 0.0 && dt > 0.0 && dt <= duration))
    throw Error(ErrorCode::BadTiming, "need 0 < dt <= duration, got dt=" + std::to_string(dt) + " duration=" + std::to_string(duration));
  if (auto violations = check_concrete(ls, cs); !violations.empty())
    throw Error(ErrorCode::InconsistentScenario, "concrete scenario '" + cs.scenario_id + "' fails its checks: " + violations.front().message);

  std::set<std::string> vehicles;
  for (const auto& p : ls.parameters)
    if (p.kind == ParameterKind::scalar_initial) vehicles.insert(instance_of(p.name));
  for (const auto& v : vehicles) {
    for (std::string_view local : {kPositionName, kSpeedName}) {
      if (ls.find_parameter(v + "." + std::string(local)) == nullptr)
        throw Error(ErrorCode::MissingKinematicInputs, "vehicle '" + v + "' has no '" + v + "." + std::string(local) + "' parameter");
    }
  }

  const std::size_t count = sample_count(duration, dt);
  std::vector<TimeSeries> out;
  for (const auto& p : ls.parameters) {
    const double x0 = cs.assignments.at(p.name);
    const std::string inst = instance_of(p.name);
    const std::string local = p.name.substr(inst.size() + 1);
    TimeSeries ts{p.name, "constant", p.unit, dt, std::vector<double>(count, x0)};
    if (vehicles.count(inst) != 0 && local == kPositionName) {
      const double v0 = cs.assignments.at(inst + "." + std::string(kSpeedName));
      ts.signal = "position";
      for (std::size_t k = 0; k < count; ++k) ts.samples[k] = x0 + v0 * (static_cast<double>(k) * dt);
    } else if (vehicles.count(inst) != 0 && local == kSpeedName) {
      ts.signal = "speed";
    }
    out.push_back(std::move(ts));
  }
  return out;
}

namespace detail {

inline Json expected_to_json(const ExpectedBehavior& e) {
  Json checks = Json::array();
  for (const auto& c : e.checks)
    checks.push_back({{"signal", c.signal},
                      {"comparator", std::string(to_string(c.comparator))},
                      {"bound", c.bound},
                      {"tolerance", c.tolerance}});
  return {{"description", e.description}, {"checks", std::move(checks)}};
}

inline ExpectedBehavior expected_from_json_impl(const Json& j) {
  ExpectedBehavior e;
  e.description = schema::string_field(j, "expected", "description");
  for (const Json& c : schema::array_field(j, "expected", "checks")) {
    ExpectedCheck check;
    check.signal = schema::string_field(c, "check", "signal");
    const std::string cmp = schema::string_field(c, "check", "comparator");
    if (!parse_comparator(cmp, check.comparator)) throw Error(ErrorCode::SchemaViolation, "check: unknown comparator '" + cmp + "'");
    check.bound = schema::number_field(c, "check", "bound");
    check.tolerance = schema::number_field(c, "check", "tolerance");
    e.checks.push_back(std::move(check));
  }
  return e;
}

}  // namespace detail

inline ExpectedBehavior expected_from_json(const Json& j) { return detail::expected_from_json_impl(j); }

/// Authored input for test-case assembly: expected behavior plus the
/// work-product reference, preconditions, and configuration.
struct TestSpecification {
  TestCaseMeta meta;
  ExpectedBehavior expected;
};

inline TestSpecification load_test_specification(std::string_view text) {
  const Json doc = parse_json(text);
  TestSpecification spec;
  spec.meta.work_product_ref = schema::string_field(doc, "test specification", "work_product_ref");
  spec.meta.preconditions = schema::string_field(doc, "test specification", "preconditions");
  spec.meta.configuration = schema::string_field(doc, "test specification", "configuration");
  spec.expected = expected_from_json(schema::object_field(doc, "test specification", "expected"));
  return spec;
}

inline TestCase assemble_test_case(const LogicalScenario& ls, const ConcreteScenario& cs, const std::vector<TimeSeries>& traces,
                                   const TestCaseMeta& meta, const ExpectedBehavior& expected) {
  auto require = [](bool present, const char* item) {
    if (!present) throw Error(ErrorCode::IncompleteField, std::string(item) + " is missing or empty");
  };
  require(!meta.work_product_ref.empty(), "work_product_ref");
  require(!meta.preconditions.empty(), "preconditions");
  require(!meta.configuration.empty(), "configuration");
  require(!traces.empty(), "input_data");
  require(!expected.description.empty(), "expected.description");
  require(!expected.checks.empty(), "expected.checks");
  for (const auto& c : expected.checks) {
    require(!c.signal.empty(), "expected.checks[].signal");
    if (!std::isfinite(c.bound) || !std::isfinite(c.tolerance) || c.tolerance < 0.0)
      throw Error(ErrorCode::InvalidField, "check on '" + c.signal + "' needs a finite bound and tolerance >= 0");
  }

  std::set<std::string> traced;
  for (const auto& t : traces) {
    auto it = cs.assignments.find(t.parameter);
    if (it == cs.assignments.end())
      throw Error(ErrorCode::TraceMismatch, "trace '" + t.parameter + "' has no assignment in '" + cs.scenario_id + "'");
    if (t.samples.empty() || t.samples.front() != it->second)
      throw Error(ErrorCode::TraceMismatch, "trace '" + t.parameter + "' does not start at its assigned value");
    if (t.dt != traces.front().dt || t.samples.size() != traces.front().samples.size())
      throw Error(ErrorCode::TraceMismatch, "traces must share dt and length");
    if (!traced.insert(t.parameter).second) throw Error(ErrorCode::TraceMismatch, "two traces for '" + t.parameter + "'");
  }
  for (const auto& [name, value] : cs.assignments)
    if (traced.count(name) == 0) throw Error(ErrorCode::TraceMismatch, "assignment '" + name + "' has no trace");

  TestCase tc;
  tc.work_product_ref = meta.work_product_ref;
  tc.preconditions = meta.preconditions;
  tc.configuration = meta.configuration;
  for (const auto& p : ls.parameters)
    if (p.kind == ParameterKind::scalar_static) tc.environmental_conditions.emplace(p.name, cs.assignments.at(p.name));
  require(!tc.environmental_conditions.empty(), "environmental_conditions");
  tc.input_data = traces;
  tc.expected = expected;
  tc.source_ref = {cs.scenario_id, concrete_hash(cs)};

  const Json identity = {{"concrete", tc.source_ref.hash},
                         {"work_product_ref", meta.work_product_ref},
                         {"preconditions", meta.preconditions},
                         {"configuration", meta.configuration},
                         {"expected", detail::expected_to_json(expected)}};
  tc.unique_id = "tc-" + sha256_hex(canonical_dump(identity)).substr(0, 16);
  return tc;
}

// ---------------------------------------------------------------------------
// Serialization

inline Json test_case_to_json(const TestCase& tc) {
  Json env = Json::object();
  for (const auto& [name, value] : tc.environmental_conditions) env[name] = value;
  Json inputs = Json::array();
  for (const auto& t : tc.input_data)
    inputs.push_back({{"parameter", t.parameter}, {"signal", t.signal}, {"unit", t.unit}, {"dt", t.dt}, {"samples", t.samples}});
  return {{"format", "testcase/1"},
          {"unique_id", tc.unique_id},
          {"work_product_ref", tc.work_product_ref},
          {"preconditions", {{"text", tc.preconditions}, {"configuration", tc.configuration}}},
          {"environmental_conditions", std::move(env)},
          {"input_data", std::move(inputs)},
          {"expected", detail::expected_to_json(tc.expected)},
          {"source_ref", {{"scenario_id", tc.source_ref.scenario_id}, {"hash", tc.source_ref.hash}}}};
}

inline std::string serialize_test_case(const TestCase& tc) { return canonical_dump(test_case_to_json(tc)); }

inline TestCase test_case_from_json(const Json& doc) {
  schema::expect_format(doc, "testcase/1");
  TestCase tc;
  tc.unique_id = schema::string_field(doc, "testcase", "unique_id");
  tc.work_product_ref = schema::string_field(doc, "testcase", "work_product_ref");
  const Json& pre = schema::object_field(doc, "testcase", "preconditions");
  tc.preconditions = schema::string_field(pre, "preconditions", "text");
  tc.configuration = schema::string_field(pre, "preconditions", "configuration");
  for (const auto& [name, value] : schema::object_field(doc, "testcase", "environmental_conditions").items())
    tc.environmental_conditions.emplace(name, schema::number_of(value, name));
  for (const Json& t : schema::array_field(doc, "testcase", "input_data")) {
    TimeSeries ts;
    ts.parameter = schema::string_field(t, "input_data", "parameter");
    ts.signal = schema::string_field(t, "input_data", "signal");
    ts.unit = schema::string_field(t, "input_data", "unit");
    ts.dt = schema::number_field(t, "input_data", "dt");
    for (const Json& s : schema::array_field(t, "input_data", "samples")) ts.samples.push_back(schema::number_of(s, "sample"));
    tc.input_data.push_back(std::move(ts));
  }
  tc.expected = expected_from_json(schema::object_field(doc, "testcase", "expected"));
  const Json& ref = schema::object_field(doc, "testcase", "source_ref");
  tc.source_ref = {schema::string_field(ref, "source_ref", "scenario_id"), schema::string_field(ref, "source_ref", "hash")};
  return tc;
}

inline TestCase deserialize_test_case(std::string_view text) { return test_case_from_json(parse_json(text)); }

/// Which of the six test-case items an exported document lacks or leaves
/// empty. An empty result means the document is complete.
inline std::vector<std::string> find_omissions(const Json& doc) {
  std::vector<std::string> missing;
  auto text = [&](const Json& obj, const char* key) {
    auto it = obj.find(key);
    return it != obj.end() && it->is_string() && !it->get<std::string>().empty();
  };
  if (!doc.is_object()) return {"document"};
  if (!text(doc, "unique_id")) missing.push_back("1 unique identification");
  if (!text(doc, "work_product_ref")) missing.push_back("2 work product reference");
  {
    auto it = doc.find("preconditions");
    if (it == doc.end() || !it->is_object() || !text(*it, "text") || !text(*it, "configuration"))
      missing.push_back("3 preconditions and configuration");
  }
  {
    auto it = doc.find("environmental_conditions");
    if (it == doc.end() || !it->is_object() || it->empty()) missing.push_back("4 environmental conditions");
  }
  {
    auto it = doc.find("input_data");
    bool ok = it != doc.end() && it->is_array() && !it->empty();
    if (ok)
      for (const Json& t : *it) {
        auto s = t.find("samples");
        auto dt = t.find("dt");
        ok = ok && t.is_object() && s != t.end() && s->is_array() && !s->empty() && dt != t.end() && dt->is_number() &&
             dt->get<double>() > 0.0;
      }
    if (!ok) missing.push_back("5 input data with time sequences");
  }
  {
    auto it = doc.find("expected");
    bool ok = it != doc.end() && it->is_object() && text(*it, "description");
    if (ok) {
      auto checks = it->find("checks");
      ok = checks != it->end() && checks->is_array() && !checks->empty();
      if (ok)
        for (const Json& c : *checks) {
          auto tol = c.find("tolerance");
          ok = ok && tol != c.end() && tol->is_number() && tol->get<double>() >= 0.0;
        }
    }
    if (!ok) missing.push_back("6 expected behavior with acceptable variations");
  }
  return missing;
}

// ---------------------------------------------------------------------------
// Export

struct ManifestEntry {
  std::string unique_id;
  std::string file;
  std::string hash;
};

struct Manifest {
  std::vector<ManifestEntry> entries;  // sorted by unique_id
  std::string suite_hash;
};

inline std::string manifest_text(const Manifest& m) {
  Json cases = Json::array();
  for (const auto& e : m.entries) cases.push_back({{"unique_id", e.unique_id}, {"file", e.file}, {"hash", e.hash}});
  return canonical_dump(
      {{"format", "manifest/1"}, {"case_count", m.entries.size()}, {"cases", std::move(cases)}, {"suite_hash", m.suite_hash}});
}

/// Writes `<unique_id>.json` per case plus `manifest.json` into `destination`.
/// Files go to a sibling staging directory first, which replaces the
/// destination only once everything is written.
inline Manifest export_suite(const std::vector<TestCase>& cases, const std::filesystem::path& destination) {
  std::set<std::string> ids;
  for (const auto& tc : cases)
    if (!ids.insert(tc.unique_id).second) throw Error(ErrorCode::DuplicateId, "test case id '" + tc.unique_id + "' occurs twice");

  Manifest manifest;
  std::map<std::string, std::string> documents;
  for (const auto& tc : cases) {
    std::string text = serialize_test_case(tc);
    manifest.entries.push_back({tc.unique_id, tc.unique_id + ".json", sha256_hex(text)});
    documents.emplace(tc.unique_id + ".json", std::move(text));
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.unique_id < b.unique_id; });
  std::vector<std::string> hashes;
  for (const auto& e : manifest.entries) hashes.push_back(e.hash);
  std::sort(hashes.begin(), hashes.end());
  std::string joined;
  for (const auto& h : hashes) joined += h + "\n";
  manifest.suite_hash = sha256_hex(joined);

  namespace fs = std::filesystem;
  fs::path target = destination.lexically_normal();
  if (!target.has_filename()) target = target.parent_path();  // "cases/" names the directory "cases"
  fs::path staging = target;
  staging += ".staging";
  std::error_code ec;
  fs::remove_all(staging, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot clear staging directory '" + staging.string() + "': " + ec.message());
  fs::create_directories(staging, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + staging.string() + "': " + ec.message());
  for (const auto& [file, text] : documents) write_file(staging / file, text);
  write_file(staging / "manifest.json", manifest_text(manifest));

  fs::remove_all(target, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot replace '" + target.string() + "': " + ec.message());
  fs::rename(staging, target, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot move staging directory into '" + target.string() + "': " + ec.message());
  return manifest;
}

}  // namespace scenario
