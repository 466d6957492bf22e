#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scenario/catalog.hpp"
#include "scenario/concretize.hpp"
#include "scenario/error.hpp"
#include "scenario/functional.hpp"
#include "scenario/json_io.hpp"
#include "scenario/logical.hpp"
#include "scenario/lowering.hpp"
#include "scenario/testcase.hpp"
#include "scenario/vocabulary.hpp"

namespace scenario::cli {

enum Exit : int { ok = 0, findings = 1, io = 2, syntax = 3, infeasible = 4, internal = 5 };

inline std::string_view module_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError:
    case ErrorCode::SchemaViolation:
    case ErrorCode::IoError: return "io";
    case ErrorCode::DuplicateTerm:
    case ErrorCode::DanglingReference:
    case ErrorCode::InvalidTerm: return "vocabulary";
    case ErrorCode::UnknownTerm:
    case ErrorCode::ArityMismatch:
    case ErrorCode::IllegalAttributeValue:
    case ErrorCode::IllegalApplication:
    case ErrorCode::DuplicateInstance:
    case ErrorCode::DuplicateAttribute:
    case ErrorCode::UnknownVariationTarget: return "functional";
    case ErrorCode::BadRange:
    case ErrorCode::BadDistribution:
    case ErrorCode::UnboundConstraintParameter:
    case ErrorCode::DuplicateParameter:
    case ErrorCode::MissingTemplate:
    case ErrorCode::VocabularyMismatch:
    case ErrorCode::ConstraintInstantiationError:
    case ErrorCode::OverrideWidensRange:
    case ErrorCode::InconsistentScenario: return "lowering";
    case ErrorCode::BadK:
    case ErrorCode::BadLevels:
    case ErrorCode::InfeasibleLevels:
    case ErrorCode::SamplingExhausted:
    case ErrorCode::SourceMismatch: return "concretize";
    case ErrorCode::BadTiming:
    case ErrorCode::MissingKinematicInputs:
    case ErrorCode::IncompleteField:
    case ErrorCode::InvalidField:
    case ErrorCode::TraceMismatch:
    case ErrorCode::DuplicateId: return "testcase";
  }
  return "internal";
}

inline int exit_code_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError: return io;
    case ErrorCode::SyntaxError:
    case ErrorCode::SchemaViolation:
    case ErrorCode::UnknownTerm:
    case ErrorCode::ArityMismatch:
    case ErrorCode::IllegalAttributeValue:
    case ErrorCode::IllegalApplication:
    case ErrorCode::DuplicateInstance:
    case ErrorCode::DuplicateAttribute:
    case ErrorCode::DuplicateTerm:
    case ErrorCode::DanglingReference:
    case ErrorCode::InvalidTerm: return syntax;
    case ErrorCode::InfeasibleLevels:
    case ErrorCode::SamplingExhausted: return infeasible;
    default: return findings;
  }
}

struct Options {
  std::string vocab;
  std::string catalog;
  std::string out;
  std::string method = "pairwise";
  std::size_t k = 3;
  std::size_t n = 100;
  std::uint64_t seed = 0;
  double duration = 10.0;
  double dt = 0.1;
  std::string expected;
  bool json = false;
  std::vector<std::string> inputs;
};

namespace detail {

/// Error raised while handling a named file; carries the path for diagnostics.
struct FileError {
  std::string path;
  Error error;
};

template <class F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw FileError{path, e};
  }
}

inline Json finding_json(const Finding& f) { return {{"code", f.code}, {"elements", f.elements}, {"message", f.message}}; }

inline void print_finding(std::ostream& out, const std::string& path, const Finding& f) {
  out << path << ": " << f.code;
  if (!f.elements.empty()) {
    out << " [";
    for (std::size_t i = 0; i < f.elements.size(); ++i) out << (i ? ", " : "") << f.elements[i];
    out << "]";
  }
  out << ": " << f.message << "\n";
}

inline Vocabulary load_vocab(const Options& o) {
  if (o.vocab.empty()) throw FileError{"", Error(ErrorCode::IoError, "--vocab is required")};
  return with_path(o.vocab, [&] { return load_vocabulary(read_file(o.vocab)); });
}

inline ParameterCatalog load_catalog(const Options& o, const Vocabulary& v) {
  if (o.catalog.empty()) throw FileError{"", Error(ErrorCode::IoError, "--catalog is required")};
  return with_path(o.catalog, [&] { return load_parameter_catalog(read_file(o.catalog), v); });
}

inline TestSpecification load_spec(const Options& o) {
  if (o.expected.empty()) throw FileError{"", Error(ErrorCode::IoError, "--expected is required")};
  return with_path(o.expected, [&] { return load_test_specification(read_file(o.expected)); });
}

inline bool looks_like_json(const std::string& text) {
  auto it = std::find_if(text.begin(), text.end(), [](char c) { return c != ' ' && c != '\n' && c != '\r' && c != '\t'; });
  return it != text.end() && *it == '{';
}

inline void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty())
    out << text;
  else
    write_file(o.out, text);
}

inline Levels levels_for(const LogicalScenario& ls, Method m, std::size_t k) {
  switch (m) {
    case Method::boundary: return boundary_levels(ls);
    case Method::equivalence: return equivalence_levels(ls, k);
    default: return combined_levels(ls, k);
  }
}

inline ConcreteSuite concretize_suite(const LogicalScenario& ls, const Options& o) {
  const Method m = parse_method(o.method);
  std::vector<ConcreteScenario> scenarios;
  switch (m) {
    case Method::boundary: scenarios = boundary_suite(ls); break;
    case Method::equivalence: scenarios = equivalence_suite(ls, o.k); break;
    case Method::pairwise: scenarios = pairwise_cover(ls, combined_levels(ls, o.k)); break;
    case Method::random: scenarios = sample_random(ls, o.n, o.seed); break;
  }
  ConcreteSuite suite;
  suite.logical_ref = source_ref_of(ls);
  suite.method = m;
  if (m == Method::random) suite.seed = o.seed;
  suite.coverage = coverage_metrics(ls, levels_for(ls, m, o.k), scenarios);
  suite.scenarios = std::move(scenarios);
  return suite;
}

/// Validation findings block the pipeline; an interval-infeasible constraint
/// maps to the infeasible exit code.
inline int check_logical(const LogicalScenario& ls, const std::string& path, std::ostream& err) {
  const ValidationReport report = validate_logical(ls);
  for (const auto& f : report.findings) print_finding(err, path, f);
  if (report.ok()) return ok;
  return report.has("INTERVAL_INFEASIBLE") ? infeasible : findings;
}

inline std::vector<TestCase> build_cases(const LogicalScenario& ls, const ConcreteSuite& suite, const TestSpecification& spec,
                                         const Options& o) {
  std::vector<TestCase> cases;
  for (const auto& cs : suite.scenarios)
    cases.push_back(assemble_test_case(ls, cs, synthesize_traces(ls, cs, o.duration, o.dt), spec.meta, spec.expected));
  return cases;
}

// --- subcommands -----------------------------------------------------------

inline int cmd_validate(const Options& o, std::ostream& out, std::ostream&) {
  std::optional<Vocabulary> vocab;
  Json files = Json::array();
  int status = ok;
  for (const auto& path : o.inputs) {
    const std::string text = with_path(path, [&] { return read_file(path); });
    Json entry = {{"path", path}};
    std::vector<Finding> found;
    if (looks_like_json(text)) {
      const LogicalScenario ls = with_path(path, [&] { return deserialize_logical(text); });
      entry["kind"] = "logical";
      entry["scenario_id"] = ls.scenario_id;
      found = validate_logical(ls).findings;
      if (!found.empty()) {
        const bool infeasible_found =
            std::any_of(found.begin(), found.end(), [](const Finding& f) { return f.code == "INTERVAL_INFEASIBLE"; });
        status = std::max(status, infeasible_found ? int(infeasible) : int(findings));
      }
    } else {
      if (!vocab) vocab = load_vocab(o);
      const FunctionalScenario fs = with_path(path, [&] { return parse_functional(text, *vocab); });
      entry["kind"] = "functional";
      entry["scenario_id"] = fs.scenario_id;
      found = check_consistency(fs, *vocab).findings;
      if (!found.empty()) status = std::max(status, int(findings));
    }
    Json list = Json::array();
    for (const auto& f : found) list.push_back(finding_json(f));
    entry["findings"] = std::move(list);
    files.push_back(std::move(entry));
    if (!o.json) {
      for (const auto& f : found) print_finding(out, path, f);
      out << path << ": " << (found.empty() ? "ok" : std::to_string(found.size()) + " finding(s)") << "\n";
    }
  }
  if (o.json) {
    std::size_t total = 0;
    for (const auto& f : files) total += f["findings"].size();
    out << canonical_dump({{"format", "validation-report/1"}, {"files", std::move(files)}, {"finding_count", total}});
  }
  return status;
}

inline int cmd_lower(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.inputs.size() != 1) throw FileError{"", Error(ErrorCode::IoError, "lower takes exactly one scenario file")};
  const Vocabulary v = load_vocab(o);
  const ParameterCatalog cat = load_catalog(o, v);
  const std::string& path = o.inputs.front();
  const std::string text = with_path(path, [&] { return read_file(path); });
  const FunctionalScenario fs = with_path(path, [&] { return parse_functional(text, v); });
  const ConsistencyReport report = check_consistency(fs, v);
  for (const auto& f : report.findings) print_finding(err, path, f);
  if (!report.ok()) return findings;
  const LogicalScenario ls = with_path(path, [&] { return lower_to_logical(fs, cat); });
  if (int s = check_logical(ls, path, err); s != ok) return s;
  emit(o, out, serialize_logical(ls));
  return ok;
}

inline int cmd_concretize(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.inputs.size() != 1) throw FileError{"", Error(ErrorCode::IoError, "concretize takes exactly one logical scenario file")};
  const std::string& path = o.inputs.front();
  const LogicalScenario ls = with_path(path, [&] { return deserialize_logical(read_file(path)); });
  if (int s = check_logical(ls, path, err); s != ok) return s;
  const ConcreteSuite suite = with_path(path, [&] { return concretize_suite(ls, o); });
  emit(o, out, serialize_suite(suite));
  return ok;
}

inline int cmd_export(const Options& o, std::ostream& out, std::ostream&) {
  if (o.inputs.size() != 2) throw FileError{"", Error(ErrorCode::IoError, "export takes a logical scenario file and a suite file")};
  if (o.out.empty()) throw FileError{"", Error(ErrorCode::IoError, "export needs --out <directory>")};
  const LogicalScenario ls = with_path(o.inputs[0], [&] { return deserialize_logical(read_file(o.inputs[0])); });
  const ConcreteSuite suite = with_path(o.inputs[1], [&] { return deserialize_suite(read_file(o.inputs[1])); });
  if (suite.logical_ref != source_ref_of(ls))
    throw FileError{o.inputs[1], Error(ErrorCode::SourceMismatch, "suite was not generated from '" + o.inputs[0] + "'")};
  const TestSpecification spec = load_spec(o);
  const Manifest m = with_path(o.inputs[1], [&] { return export_suite(build_cases(ls, suite, spec, o), o.out); });
  out << "exported " << m.entries.size() << " test case(s) to " << o.out << ", suite " << m.suite_hash << "\n";
  return ok;
}

inline int cmd_pipeline(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.inputs.empty()) throw FileError{"", Error(ErrorCode::IoError, "pipeline needs at least one scenario file")};
  if (o.out.empty()) throw FileError{"", Error(ErrorCode::IoError, "pipeline needs --out <directory>")};
  const Vocabulary v = load_vocab(o);
  const ParameterCatalog cat = load_catalog(o, v);
  const TestSpecification spec = load_spec(o);
  parse_method(o.method);

  Json summary = Json::array();
  for (const auto& path : o.inputs) {
    const std::string text = with_path(path, [&] { return read_file(path); });
    const FunctionalScenario fs = with_path(path, [&] { return parse_functional(text, v); });
    const ConsistencyReport report = check_consistency(fs, v);
    for (const auto& f : report.findings) print_finding(err, path, f);
    if (!report.ok()) return findings;
    const LogicalScenario ls = with_path(path, [&] { return lower_to_logical(fs, cat); });
    if (int s = check_logical(ls, path, err); s != ok) return s;
    const ConcreteSuite suite = with_path(path, [&] { return concretize_suite(ls, o); });
    const std::filesystem::path dir = std::filesystem::path(o.out) / fs.scenario_id;
    write_file(dir / "functional.json", serialize_functional(fs));
    write_file(dir / "logical.json", serialize_logical(ls));
    write_file(dir / "concrete.json", serialize_suite(suite));
    write_file(dir / "coverage.json", canonical_dump(coverage_to_json(suite.coverage)));
    const Manifest m = with_path(path, [&] { return export_suite(build_cases(ls, suite, spec, o), dir / "testcases"); });
    summary.push_back({{"scenario_id", fs.scenario_id},
                       {"parameters", ls.parameters.size()},
                       {"constraints", ls.constraints.size()},
                       {"scenarios", suite.scenarios.size()},
                       {"coverage", coverage_to_json(suite.coverage)},
                       {"suite_hash", m.suite_hash}});
    if (!o.json)
      out << fs.scenario_id << ": " << ls.parameters.size() << " parameters, " << ls.constraints.size() << " constraints, "
          << suite.scenarios.size() << " " << o.method << " scenarios, pair coverage " << format_number(suite.coverage.pair_coverage)
          << ", boundary coverage " << format_number(suite.coverage.boundary_coverage) << "\n";
  }
  if (o.json) out << canonical_dump({{"format", "pipeline-report/1"}, {"scenarios", std::move(summary)}});
  return ok;
}

}  // namespace detail

/// Entry point. `args` excludes the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scenario pipeline: functional -> logical -> concrete -> test cases"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--json", o.json, "Machine-readable output");
  };
  auto add_vocab = [&](CLI::App* sub) { sub->add_option("--vocab", o.vocab, "Vocabulary file"); };
  auto add_concretize = [&](CLI::App* sub) {
    sub->add_option("--method", o.method, "boundary | equivalence | pairwise | random")
        ->check(CLI::IsMember({"boundary", "equivalence", "pairwise", "random"}));
    sub->add_option("--k", o.k, "Equivalence classes per parameter")->check(CLI::PositiveNumber);
    sub->add_option("--n", o.n, "Random sample count")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Master seed");
  };
  auto add_export = [&](CLI::App* sub) {
    sub->add_option("--duration", o.duration, "Trace duration [s]");
    sub->add_option("--dt", o.dt, "Trace step [s]");
    sub->add_option("--expected", o.expected, "Test specification (expected behavior, work product, preconditions)");
  };

  CLI::App* validate = app.add_subcommand("validate", "Parse and check functional or logical scenario files");
  validate->add_option("files", o.inputs, "Scenario files")->required();
  add_vocab(validate);
  add_common(validate);

  CLI::App* lower = app.add_subcommand("lower", "Lower a functional scenario to a logical scenario");
  lower->add_option("file", o.inputs, "Scenario file")->required();
  add_vocab(lower);
  lower->add_option("--catalog", o.catalog, "Parameter catalog file");
  lower->add_option("--out", o.out, "Output file (default: standard output)");

  CLI::App* concretize = app.add_subcommand("concretize", "Generate concrete scenarios from a logical scenario");
  concretize->add_option("file", o.inputs, "Logical scenario file")->required();
  add_concretize(concretize);
  concretize->add_option("--out", o.out, "Output file (default: standard output)");

  CLI::App* exporter = app.add_subcommand("export", "Export test cases for a concrete suite");
  exporter->add_option("files", o.inputs, "Logical scenario file and suite file")->required();
  add_export(exporter);
  exporter->add_option("--out", o.out, "Output directory");

  CLI::App* pipeline = app.add_subcommand("pipeline", "Run every stage for each scenario file");
  pipeline->add_option("files", o.inputs, "Scenario files")->required();
  add_vocab(pipeline);
  pipeline->add_option("--catalog", o.catalog, "Parameter catalog file");
  pipeline->add_option("--out", o.out, "Output directory");
  add_concretize(pipeline);
  add_export(pipeline);
  add_common(pipeline);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error[cli/Usage]: " << e.what() << "\n";
    return syntax;
  }

  auto report = [&](const std::string& path, const Error& e) {
    if (!path.empty()) {
      err << path;
      if (e.line() != 0) err << ":" << e.line() << (e.column() != 0 ? ":" + std::to_string(e.column()) : "");
      err << ": ";
    }
    err << "error[" << module_of(e.code()) << "/" << to_string(e.code()) << "]: " << e.detail() << "\n";
    return exit_code_of(e.code());
  };
  try {
    if (validate->parsed()) return detail::cmd_validate(o, out, err);
    if (lower->parsed()) return detail::cmd_lower(o, out, err);
    if (concretize->parsed()) return detail::cmd_concretize(o, out, err);
    if (exporter->parsed()) return detail::cmd_export(o, out, err);
    return detail::cmd_pipeline(o, out, err);
  } catch (const detail::FileError& e) {
    return report(e.path, e.error);
  } catch (const Error& e) {
    return report("", e);
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << "\n";
    return internal;
  }
}

}  // namespace scenario::cli
