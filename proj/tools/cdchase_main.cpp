// cdchase: command-line front end for the chase engine.
//
// Exit codes:
//   0  success
//   1  reproduction check found a discrepancy
//   2  dependency set is not a set of conceptual dependencies
//   3  chase failed (inconsistent database)
//   4  budget exhausted before the requested result was available
//   5  input or usage error
//
// Diagnostics go to stderr as `error[<category>]: <message>`.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cdchase/cd_validator.hpp"
#include "cdchase/chase.hpp"
#include "cdchase/counterexample.hpp"
#include "cdchase/dsl.hpp"
#include "cdchase/query.hpp"
#include "cdchase/render.hpp"

namespace {

using namespace cdchase;

enum ExitCode : int {
    kOk = 0,
    kDiscrepancy = 1,
    kNotCd = 2,
    kChaseFailed = 3,
    kBudgetExhausted = 4,
    kInputError = 5,
};

struct RunConfig {
    std::string schema_path;
    std::string deps_path;
    std::string data_path;
    std::string query_path;
    std::string q1_path;
    std::string q2_path;
    std::optional<std::uint32_t> max_level;
    std::uint64_t max_steps = 10000;
    std::uint32_t level = 0;
    std::uint32_t n = 0;
    std::string format = "text";
    bool trace = false;
    bool json = false;
    bool dot = false;
};

int report(std::string_view category, const std::string& message, int code) {
    std::cerr << "error[" << category << "]: " << message << "\n";
    return code;
}

// Wraps InputError with the file it came from.
template <class F>
auto load(const std::string& path, F&& parse) {
    const std::string text = read_text_file(path);
    try {
        return parse(text);
    } catch (const InputError& e) {
        throw InputError(e.kind(), e.line(), e.column(), path + ":" + std::to_string(e.line()) + ":" +
                                                             std::to_string(e.column()) + ": " + e.message());
    }
}

Schema load_schema(const RunConfig& c) {
    return load(c.schema_path, [](std::string_view t) { return parse_schema(t); });
}

DependencySet load_deps(const RunConfig& c, const Schema& s) {
    return load(c.deps_path, [&](std::string_view t) { return parse_dependencies(t, s); });
}

Database load_data(const RunConfig& c, const Schema& s) {
    return load(c.data_path, [&](std::string_view t) { return parse_instance(t, s); });
}

ConjunctiveQuery load_query(const std::string& path, const Schema& s) {
    return load(path, [&](std::string_view t) { return parse_query(t, s); });
}

StepBudget budget_of(const RunConfig& c) { return StepBudget{c.max_steps, c.max_level}; }

int run_validate(const RunConfig& c) {
    const Schema schema = load_schema(c);
    const DependencySet deps = load_deps(c, schema);
    const CdValidation v = validate_cd_set(schema, deps);
    std::cout << (c.format == "json" ? validation_to_json(v) : validation_to_text(v));
    return std::holds_alternative<CdPartition>(v) ? kOk : kNotCd;
}

int run_chase_cmd(const RunConfig& c) {
    const Schema schema = load_schema(c);
    const DependencySet deps = load_deps(c, schema);
    const Database db = load_data(c, schema);
    const ChaseState state = run_chase(schema, db, deps, budget_of(c), c.trace);
    if (c.format == "json")
        std::cout << chase_to_json(state, c.trace);
    else if (c.format == "dot")
        std::cout << chase_to_dot(state);
    else
        std::cout << chase_to_text(state, c.trace);
    switch (state.status()) {
        case ChaseStatus::Completed: return kOk;
        case ChaseStatus::Failed: return report("chase_failed", "the chase does not exist: " + state.failure(), kChaseFailed);
        case ChaseStatus::Active:
            return report("budget_exhausted", "chase stopped after " + std::to_string(state.step_count()) +
                                                  " ID steps; output is a finite prefix",
                          kBudgetExhausted);
    }
    return kOk;
}

int run_query(const RunConfig& c) {
    const Schema schema = load_schema(c);
    const DependencySet deps = load_deps(c, schema);
    const Database db = load_data(c, schema);
    const ConjunctiveQuery q = load_query(c.query_path, schema);
    CertainAnswers a;
    try {
        a = certain_answers(schema, db, deps, q, c.level, budget_of(c));
    } catch (const PrefixNotMaterialized& e) {
        return report("budget_exhausted", e.what(), kBudgetExhausted);
    }
    std::cout << (c.format == "json" ? answers_to_json(q, a) : answers_to_text(q, a));
    if (a.inconsistent) return report("chase_failed", "inconsistent database", kChaseFailed);
    return kOk;
}

int run_contain(const RunConfig& c) {
    const Schema schema = load_schema(c);
    const DependencySet deps = load_deps(c, schema);
    const ConjunctiveQuery q1 = load_query(c.q1_path, schema);
    const ConjunctiveQuery q2 = load_query(c.q2_path, schema);
    const ContainmentResult r = check_containment(q1, q2, schema, deps, c.level, budget_of(c));
    std::cout << (c.format == "json" ? containment_to_json(r) : containment_to_text(r));
    return kOk;
}

int run_repro(const RunConfig& c) {
    if (c.n < 2) return report("usage", "--n must be at least 2", kInputError);
    if (c.dot) {
        const auto inst = build_counterexample(c.n);
        const auto state = run_chase(inst.schema, inst.db, inst.deps,
                                     StepBudget{std::nullopt, 2 * c.n - 2 + kRefutationLevelSlack});
        std::cout << chase_to_dot(state);
        return kOk;
    }
    const RefutationVerdict v = refute_constant_bounds(c.n);
    std::cout << (c.json ? refutation_to_json(v) : refutation_to_text(v));
    return v.holds() ? kOk : kDiscrepancy;
}

void add_chase_flags(CLI::App* cmd, RunConfig& c) {
    cmd->add_option("--schema", c.schema_path, "Schema file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--deps", c.deps_path, "Dependency file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--data", c.data_path, "Instance file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--max-level", c.max_level, "Do not materialize facts above this level");
    cmd->add_option("--max-steps", c.max_steps, "Maximum number of ID-rule applications")
        ->check(CLI::Range(std::uint64_t{1}, std::numeric_limits<std::uint64_t>::max()))
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic chase under conceptual dependencies"};
    app.require_subcommand(1);
    RunConfig c;

    auto* validate = app.add_subcommand("validate", "Check that a dependency set is a set of conceptual dependencies");
    validate->add_option("--schema", c.schema_path)->required()->check(CLI::ExistingFile);
    validate->add_option("--deps", c.deps_path)->required()->check(CLI::ExistingFile);
    validate->add_option("--format", c.format)->check(CLI::IsMember({"text", "json"}));

    auto* chase = app.add_subcommand("chase", "Chase a database and print the result");
    add_chase_flags(chase, c);
    chase->add_flag("--trace", c.trace, "Include every rule application");
    chase->add_option("--format", c.format)->check(CLI::IsMember({"text", "json", "dot"}));

    auto* query = app.add_subcommand("query", "Certain answers over a bounded chase prefix");
    add_chase_flags(query, c);
    query->add_option("--query", c.query_path, "Query file")->required()->check(CLI::ExistingFile);
    query->add_option("--level", c.level, "Use facts at levels below this bound")->required();
    query->add_option("--format", c.format)->check(CLI::IsMember({"text", "json"}));

    auto* contain = app.add_subcommand("contain", "Containment of q1 in q2 under the dependencies");
    contain->add_option("--schema", c.schema_path)->required()->check(CLI::ExistingFile);
    contain->add_option("--deps", c.deps_path)->required()->check(CLI::ExistingFile);
    contain->add_option("--q1", c.q1_path)->required()->check(CLI::ExistingFile);
    contain->add_option("--q2", c.q2_path)->required()->check(CLI::ExistingFile);
    contain->add_option("--level", c.level, "Search the frozen chase below this level")->required();
    contain->add_option("--max-steps", c.max_steps)
        ->check(CLI::Range(std::uint64_t{1}, std::numeric_limits<std::uint64_t>::max()))
        ->capture_default_str();
    contain->add_option("--format", c.format)->check(CLI::IsMember({"text", "json"}));

    auto* repro = app.add_subcommand("repro", "Reproduce the level-growth counterexample for a given n");
    repro->add_option("--n", c.n, "Database size parameter (>= 2)")->required();
    repro->add_flag("--json", c.json);
    repro->add_flag("--dot", c.dot);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report("usage", e.what(), kInputError);
    }

    try {
        if (*validate) return run_validate(c);
        if (*chase) return run_chase_cmd(c);
        if (*query) return run_query(c);
        if (*contain) return run_contain(c);
        if (*repro) return run_repro(c);
    } catch (const InputError& e) {
        return report(to_string(e.kind()), e.message(), kInputError);
    } catch (const ModelError& e) {
        return report("invalid_input", e.what(), kInputError);
    } catch (const std::exception& e) {
        return report("internal", e.what(), kInputError);
    }
    return kOk;
}
