#include <gtest/gtest.h>

#include <json.hpp>

#include "cdchase/counterexample.hpp"
#include "cdchase/render.hpp"
#include "test_support.hpp"

namespace cdchase {
namespace {

using nlohmann::json;

TEST(ChaseJson, EmployeesRecords) {
    testing::EmployeesFixture fx;
    const auto doc = json::parse(chase_to_json(run_chase(fx.schema, fx.data, fx.deps)));
    EXPECT_EQ(doc["format_version"], 1);
    EXPECT_EQ(doc["status"], "completed");
    ASSERT_EQ(doc["facts"].size(), 5u);
    std::map<std::string, int> levels;
    for (const auto& f : doc["facts"]) {
        std::string label = f["predicate"].get<std::string>() + "(";
        for (std::size_t i = 0; i < f["args"].size(); ++i) label += (i ? "," : "") + f["args"][i].get<std::string>();
        levels[label + ")"] = f["level"];
    }
    EXPECT_EQ(levels, (std::map<std::string, int>{{"manager(m)", 0},
                                                  {"works_in(m,d)", 0},
                                                  {"dept(d)", 1},
                                                  {"employee(m)", 1},
                                                  {"manages(m,d)", 1}}));
    EXPECT_FALSE(doc.contains("materialized_below"));
}

TEST(ChaseJson, FreshRenderingAndBound) {
    const auto inst = build_counterexample(3);
    const auto doc = json::parse(
        chase_to_json(run_chase(inst.schema, inst.db, inst.deps, StepBudget{std::nullopt, 5}, true), true));
    EXPECT_EQ(doc["status"], "active");
    EXPECT_TRUE(doc.contains("materialized_below"));
    EXPECT_TRUE(doc["trace"].is_array());
    bool saw_fresh = false;
    for (const auto& f : doc["facts"])
        for (const auto& a : f["args"]) saw_fresh = saw_fresh || a.get<std::string>().rfind("_f", 0) == 0;
    EXPECT_TRUE(saw_fresh);
}

TEST(ChaseJson, ByteIdenticalAcrossRuns) {
    const auto inst = build_counterexample(6);
    const StepBudget b{std::nullopt, 14};
    EXPECT_EQ(chase_to_json(run_chase(inst.schema, inst.db, inst.deps, b, true), true),
              chase_to_json(run_chase(inst.schema, inst.db, inst.deps, b, true), true));
}

TEST(AnswersText, EmptySetIsExplicit) {
    const Schema schema({{"e", 1}});
    const ConjunctiveQuery q{"q", {"X"}, {Atom{"e", {Variable{"X"}}}}};
    const auto a = certain_answers(schema, Database{}, DependencySet{}, q, 3, {});
    const auto text = answers_to_text(q, a);
    EXPECT_NE(text.find("0 answers"), std::string::npos);
    EXPECT_NE(text.find("level bound: 3"), std::string::npos);
    EXPECT_EQ(json::parse(answers_to_json(q, a))["answers"].size(), 0u);
}

TEST(ChaseDot, RootsAreInitialFacts) {
    const auto inst = build_counterexample(3);
    const auto state = run_chase(inst.schema, inst.db, inst.deps, StepBudget{std::nullopt, 8});
    const auto records = state.records();
    std::size_t roots = 0;
    for (const auto& r : records) {
        if (r.parent) continue;
        ++roots;
        EXPECT_EQ(r.fact.level, 0u);
    }
    EXPECT_EQ(roots, 3u);

    const std::string dot = chase_to_dot(state);
    EXPECT_EQ(dot.rfind("digraph chase {", 0), 0u);
    EXPECT_NE(dot.find("rank=same; L0;"), std::string::npos);
    EXPECT_NE(dot.find("label=\"ID:e[1]<=r[1]\""), std::string::npos);
    std::size_t bold = 0;
    for (auto p = dot.find("style=bold"); p != std::string::npos; p = dot.find("style=bold", p + 1)) ++bold;
    EXPECT_EQ(bold, 3u);
}

TEST(ValidationJson, RejectionListsViolations) {
    const Schema schema = parse_schema(testing::fixture("employees.schema"));
    const auto deps = parse_dependencies(testing::fixture("employees_no_dept.deps"), schema);
    const auto doc = json::parse(validation_to_json(validate_cd_set(schema, deps)));
    EXPECT_EQ(doc["accepted"], false);
    EXPECT_FALSE(doc["violations"].empty());
    EXPECT_TRUE(doc.contains("closest_partition"));
}

TEST(RefutationJson, Fields) {
    const auto doc = json::parse(refutation_to_json(refute_constant_bounds(3)));
    EXPECT_EQ(doc["gap"], 4);
    EXPECT_EQ(doc["holds"], true);
    EXPECT_EQ(doc["e_fact_level"]["3"], 4);
    EXPECT_EQ(doc["delta_witness"], json::array({0, 4}));
}

}  // namespace
}  // namespace cdchase
