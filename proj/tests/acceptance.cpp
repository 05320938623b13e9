// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

#include "cd_oracle.hpp"
#include "cdchase/cd_validator.hpp"
#include "cdchase/counterexample.hpp"
#include "cdchase/query.hpp"
#include "cdchase/render.hpp"
#include "test_support.hpp"

namespace {

using namespace cdchase;
using testing::d;
using Clock = std::chrono::steady_clock;

const std::vector<std::uint32_t> kGrowthSizes{2, 3, 5, 10, 15};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void fail(const std::string& why) {
        if (!pass) detail << "; ";
        pass = false;
        detail << why;
    }
    void require(bool cond, const std::string& why) {
        if (!cond) fail(why);
    }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_seconds(double s) {
    std::ostringstream o;
    o.precision(3);
    o << std::fixed << s << "s";
    return o.str();
}

ChaseState chase_family(std::uint32_t n) {
    const auto inst = build_counterexample(n);
    return run_chase(inst.schema, inst.db, inst.deps, StepBudget{std::nullopt, 2 * n - 2 + kRefutationLevelSlack});
}

// 1. Golden chase of the employee example.
std::string golden_chase(Outcome& o) {
    const auto t0 = Clock::now();
    testing::EmployeesFixture fx;
    const ChaseState s = run_chase(fx.schema, fx.data, fx.deps, StepBudget{1000, std::nullopt});
    const double elapsed = seconds_since(t0);
    std::set<FactKey> got;
    for (const auto& f : s.facts()) got.insert(fact_sort_key(f));
    const std::set<FactKey> expected{{"manager", {d("m")}}, {"works_in", {d("m"), d("d")}}, {"employee", {d("m")}},
                                     {"manages", {d("m"), d("d")}}, {"dept", {d("d")}}};
    o.require(s.status() == ChaseStatus::Completed, "status " + std::string(to_string(s.status())));
    o.require(got == expected, std::to_string(got.size()) + " facts differ from the expected 5");
    o.require(elapsed < 1.0, "took " + fmt_seconds(elapsed));
    if (o.pass) o.detail << "5 facts, completed in " << fmt_seconds(elapsed);
    return chase_to_json(s);
}

// 2. e(i) at level 2(i-1).
std::string level_growth(Outcome& o) {
    const auto t0 = Clock::now();
    std::string json;
    for (auto n : kGrowthSizes) {
        const ChaseState s = chase_family(n);
        const auto report = profile_levels(s, n);
        for (std::uint32_t i = 1; i <= n; ++i) {
            auto it = report.e_fact_level.find(i);
            if (it == report.e_fact_level.end())
                o.fail("n=" + std::to_string(n) + ": e(" + std::to_string(i) + ") missing");
            else if (it->second != 2 * (i - 1))
                o.fail("n=" + std::to_string(n) + ": e(" + std::to_string(i) + ") at " + std::to_string(it->second));
        }
        json += chase_to_json(s);
    }
    const double elapsed = seconds_since(t0);
    o.require(elapsed < 10.0, "took " + fmt_seconds(elapsed));
    if (o.pass) o.detail << "n in {2,3,5,10,15}, " << fmt_seconds(elapsed);
    return json;
}

// 3 and 4 share one refutation run per n.
std::vector<RefutationVerdict> refutations() {
    std::vector<RefutationVerdict> out;
    for (auto n : kGrowthSizes) out.push_back(refute_constant_bounds(n));
    return out;
}

std::string maxlevel_flip(Outcome& o, const std::vector<RefutationVerdict>& vs) {
    std::string json;
    for (const auto& v : vs) {
        o.require(v.excluded_below_probe, "n=" + std::to_string(v.n) + ": <n> present below 2n-2");
        o.require(v.included_below_probe_plus_one, "n=" + std::to_string(v.n) + ": <n> absent below 2n-1");
        json += refutation_to_json(v);
    }
    if (o.pass) o.detail << "answer flips between levels 2n-2 and 2n-1";
    return json;
}

std::string delta_gap(Outcome& o, const std::vector<RefutationVerdict>& vs) {
    std::string json;
    for (const auto& v : vs) {
        o.require(v.delta_witness.first == 0, "n=" + std::to_string(v.n) + ": first witness not at level 0");
        o.require(v.gap == 2 * v.n - 2,
                  "n=" + std::to_string(v.n) + ": gap " + std::to_string(v.gap) + " != " + std::to_string(2 * v.n - 2));
        json += std::to_string(v.n) + ":" + std::to_string(v.gap) + ";";
    }
    if (o.pass) {
        o.detail << "gaps";
        for (const auto& v : vs) o.detail << " " << v.gap;
    }
    return json;
}

// 5. Validator fixtures plus the exhaustive oracle.
void cd_fixtures(Outcome& o) {
    auto accepted = [](const Schema& s, const DependencySet& deps) {
        return std::holds_alternative<CdPartition>(validate_cd_set(s, deps));
    };
    struct Case {
        std::string name;
        Schema schema;
        DependencySet deps;
    };
    std::vector<Case> cases;

    testing::EmployeesFixture fx;
    o.require(accepted(fx.schema, fx.deps), "employee dependencies rejected");
    cases.push_back({"employees", fx.schema, fx.deps});

    const auto no_dept = parse_dependencies(testing::fixture("employees_no_dept.deps"), fx.schema);
    const auto v = validate_cd_set(fx.schema, no_dept);
    if (const auto* r = std::get_if<CdRejection>(&v)) {
        const bool has_e = std::any_of(r->violations.begin(), r->violations.end(), [](const CdViolation& x) {
            return x.condition == 'e' && x.detail.find("works_in position 2") != std::string::npos;
        });
        o.require(has_e, "rejection lacks condition (e) on works_in position 2");
    } else {
        o.fail("employee dependencies without works_in[2] <= dept[1] accepted");
    }
    cases.push_back({"employees_no_dept", fx.schema, no_dept});

    for (std::uint32_t n = 2; n <= 15; ++n) {
        const auto inst = build_counterexample(n);
        o.require(accepted(inst.schema, inst.deps), "counterexample n=" + std::to_string(n) + " rejected");
        if (n == 2) cases.push_back({"counterexample", inst.schema, inst.deps});
    }

    const Schema ks = parse_schema(testing::fixture("keyclash.schema"));
    cases.push_back({"keyclash", ks, parse_dependencies(testing::fixture("keyclash.deps"), ks)});

    for (const auto& c : cases) {
        if (c.schema.size() > 8) continue;
        const bool oracle = testing::oracle::count_witnesses(c.schema, c.deps) > 0;
        o.require(oracle == accepted(c.schema, c.deps), "oracle disagrees on " + c.name);
    }
    if (o.pass) o.detail << cases.size() << " fixtures agree with exhaustive enumeration";
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CDCHASE_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 6. Key clash on initial data.
void chase_failure(Outcome& o) {
    const Schema schema = parse_schema(testing::fixture("keyclash.schema"));
    const auto deps = parse_dependencies(testing::fixture("keyclash.deps"), schema);
    const auto db = parse_instance(testing::fixture("keyclash.data"), schema);
    const ChaseState s = run_chase(schema, db, deps);
    o.require(s.status() == ChaseStatus::Failed, "status " + std::string(to_string(s.status())));
    const int code = run_cli("chase --schema " + testing::fixture_path("keyclash.schema") + " --deps " +
                             testing::fixture_path("keyclash.deps") + " --data " + testing::fixture_path("keyclash.data"));
    o.require(code == 3, "CLI exit code " + std::to_string(code));
    if (o.pass) o.detail << "status failed, exit code 3";
}

// 7. Prefix evaluation against the brute-force evaluator.
void oracle_equivalence(Outcome& o) {
    testing::Gen gen(2024);
    const Schema schema = testing::Gen::small_schema();
    std::size_t cases = 0, mismatches = 0, with_fresh = 0;
    while (cases < 1200) {
        const Database db = gen.database(schema, 6);
        const auto q = gen.query(schema, 3, 4);
        const DependencySet deps = gen.coin(0.5) ? gen.dependencies(schema, 4, false, true) : DependencySet{};
        const ChaseState s = run_chase(schema, db, deps, StepBudget{80, 6});
        if (s.status() == ChaseStatus::Failed) continue;
        ++cases;
        const std::uint32_t bound = s.materialized_below().value_or(s.max_level() + 1);
        const auto prefix = s.facts_below(bound);
        if (std::any_of(prefix.begin(), prefix.end(), [](const Fact& f) {
                return std::any_of(f.args.begin(), f.args.end(), [](const Constant& c) { return c.is_fresh(); });
            }))
            ++with_fresh;
        if (evaluate_over_prefix(s, q, bound) != brute_force_evaluate(prefix, q)) {
            if (mismatches++ == 0) o.fail("first mismatch on " + q.to_string());
        }
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    if (o.pass) o.detail << cases << " cases (" << with_fresh << " with fresh constants), 0 mismatches";
}

// 9. Levels below 2n-2 survive 4n further ID steps.
void stability(Outcome& o) {
    for (std::uint32_t n : {3u, 5u, 10u}) {
        const auto r = check_lower_level_stability(n);
        o.require(r.extra_steps == 4ULL * n, "slack mismatch");
        o.require(r.stable(), "n=" + std::to_string(n) + ": lower levels changed");
    }
    if (o.pass) o.detail << "n in {3,5,10} stable after 4n extra steps";
}

bool report(int id, const std::string& name, const Outcome& o) {
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << "  " << name << "  (" << o.detail.str() << ")"
              << std::endl;
    return o.pass;
}

template <class F>
Outcome guarded(F&& f) {
    Outcome o;
    try {
        f(o);
    } catch (const std::exception& e) {
        o.fail(std::string("exception: ") + e.what());
    }
    return o;
}

}  // namespace

int main() {
    bool all = true;
    std::string first_run;

    {
        auto o = guarded([&](Outcome& x) { first_run += golden_chase(x); });
        all &= report(1, "golden chase", o);
    }
    {
        auto o = guarded([&](Outcome& x) { first_run += level_growth(x); });
        all &= report(2, "level growth", o);
    }
    std::vector<RefutationVerdict> vs;
    {
        auto o = guarded([&](Outcome& x) {
            vs = refutations();
            first_run += maxlevel_flip(x, vs);
        });
        all &= report(3, "maxlevel refutation", o);
    }
    {
        auto o = guarded([&](Outcome& x) { first_run += delta_gap(x, vs); });
        all &= report(4, "delta refutation", o);
    }
    all &= report(5, "cd validation fixtures", guarded(cd_fixtures));
    all &= report(6, "chase failure", guarded(chase_failure));
    all &= report(7, "oracle equivalence", guarded(oracle_equivalence));
    {
        auto o = guarded([&](Outcome& x) {
            Outcome scratch;
            std::string second = golden_chase(scratch);
            second += level_growth(scratch);
            const auto again = refutations();
            second += maxlevel_flip(scratch, again);
            second += delta_gap(scratch, again);
            x.require(second == first_run, "second run differs");
            if (x.pass) x.detail << first_run.size() << " bytes identical";
        });
        all &= report(8, "determinism", o);
    }
    all &= report(9, "lower-level stability", guarded(stability));

    std::cout << (all ? "all criteria passed" : "some criteria FAILED") << std::endl;
    return all ? 0 : 1;
}
