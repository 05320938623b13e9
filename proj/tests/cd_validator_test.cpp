#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "cdchase/cd_validator.hpp"
#include "cdchase/counterexample.hpp"
#include "cdchase/dsl.hpp"
#include "cd_oracle.hpp"
#include "test_support.hpp"

namespace cdchase {
namespace {


bool accepted(const CdValidation& v) { return std::holds_alternative<CdPartition>(v); }

// Random schema of up to 8 predicates with dependencies mostly in allowed
// shapes, so both outcomes occur.
std::pair<Schema, DependencySet> random_instance(testing::Gen& gen) {
    const std::size_t k = 2 + gen.below(7);
    std::vector<Predicate> preds;
    std::vector<int> cls;
    for (std::size_t i = 0; i < k; ++i) {
        const int c = static_cast<int>(gen.below(3));
        const std::size_t arity = c == 0 ? 1 : 2 + gen.below(2);
        preds.push_back({"p" + std::to_string(i), arity});
        cls.push_back(c);
    }
    Schema schema(preds);
    DependencySet deps;
    auto one = [](std::size_t i) { return std::vector<std::size_t>{i}; };
    auto pick = [&](int c) -> std::optional<std::size_t> {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < k; ++i)
            if (cls[i] == c) idx.push_back(i);
        if (idx.empty()) return std::nullopt;
        return idx[gen.below(idx.size())];
    };
    for (std::size_t i = 0; i < k; ++i) {
        const auto& p = preds[i];
        if (cls[i] == 1) {
            for (std::size_t pos = 1; pos <= p.arity; ++pos)
                if (auto e = pick(0); e && gen.coin(0.9)) {
                    deps.add(InclusionDependency{p.name, one(pos), preds[*e].name, {1}});
                    if (gen.coin(0.3)) deps.add(InclusionDependency{preds[*e].name, {1}, p.name, one(pos)});
                }
            if (gen.coin(0.4)) deps.add(KeyDependency{p.name, one(1 + gen.below(p.arity))});
        } else if (cls[i] == 2) {
            const std::size_t n = p.arity - 1;
            std::vector<std::size_t> owners;
            for (std::size_t j = 0; j < k; ++j)
                if (cls[j] != 2 && preds[j].arity == n) owners.push_back(j);
            if (!owners.empty() && gen.coin(0.9)) {
                const auto& o = preds[owners[gen.below(owners.size())]];
                std::vector<std::size_t> pre(n);
                std::iota(pre.begin(), pre.end(), 1);
                deps.add(InclusionDependency{p.name, pre, o.name, pre});
            }
            if (gen.coin(0.4)) {
                std::vector<std::size_t> pre(n);
                std::iota(pre.begin(), pre.end(), 1);
                deps.add(KeyDependency{p.name, pre});
            }
        } else if (gen.coin(0.3)) {
            if (auto e = pick(0); e && *e != i) deps.add(InclusionDependency{p.name, {1}, preds[*e].name, {1}});
        }
    }
    // Occasional noise in a random shape.
    if (gen.coin(0.3)) {
        const auto& l = preds[gen.below(k)];
        const auto& r = preds[gen.below(k)];
        const std::size_t w = 1 + gen.below(std::min(l.arity, r.arity));
        deps.add(InclusionDependency{l.name, gen.positions(l.arity, w), r.name, gen.positions(r.arity, w)});
    }
    return {schema, deps};
}

TEST(ValidateCdSet, EmployeesAccepted) {
    testing::EmployeesFixture fx;
    const auto v = validate_cd_set(fx.schema, fx.deps);
    ASSERT_TRUE(accepted(v));
    const auto& p = std::get<CdPartition>(v);
    EXPECT_EQ(p.entities, (std::set<std::string>{"dept", "employee", "manager"}));
    EXPECT_EQ(p.relationships, (std::set<std::string>{"manages", "works_in"}));
    EXPECT_EQ(p.attributes, (std::set<std::string>{"dept_name", "emp_name", "since"}));
}

TEST(ValidateCdSet, CounterexampleAccepted) {
    const auto inst = build_counterexample(4);
    const auto v = validate_cd_set(inst.schema, inst.deps);
    ASSERT_TRUE(accepted(v));
    const auto& p = std::get<CdPartition>(v);
    EXPECT_EQ(p.entities, (std::set<std::string>{"e", "e'"}));
    EXPECT_EQ(p.relationships, (std::set<std::string>{"r", "s"}));
    EXPECT_TRUE(p.attributes.empty());
}

TEST(ValidateCdSet, MissingDeptTargetRejected) {
    const Schema schema = parse_schema(testing::fixture("employees.schema"));
    const auto deps = parse_dependencies(testing::fixture("employees_no_dept.deps"), schema);
    const auto v = validate_cd_set(schema, deps);
    ASSERT_FALSE(accepted(v));
    const auto& r = std::get<CdRejection>(v);
    const bool has_e = std::any_of(r.violations.begin(), r.violations.end(), [](const CdViolation& x) {
        return x.condition == 'e' && x.detail.find("works_in position 2") != std::string::npos;
    });
    EXPECT_TRUE(has_e);
    EXPECT_EQ(testing::oracle::count_witnesses(schema, deps), 0u);
}

TEST(ValidateCdSet, Deterministic) {
    testing::Gen gen(5);
    for (int i = 0; i < 50; ++i) {
        const auto [schema, deps] = random_instance(gen);
        const auto a = validate_cd_set(schema, deps);
        const auto b = validate_cd_set(schema, deps);
        ASSERT_EQ(a.index(), b.index());
        if (accepted(a)) {
            EXPECT_EQ(std::get<CdPartition>(a), std::get<CdPartition>(b));
        } else {
            EXPECT_EQ(std::get<CdRejection>(a).violations, std::get<CdRejection>(b).violations);
        }
    }
}

TEST(CheckPartition, ReportsEachCondition) {
    const Schema schema({{"e", 1}, {"f", 1}, {"r", 2}, {"a", 2}});
    DependencySet deps;
    deps.add(InclusionDependency{"e", {1}, "r", {1}});  // no converse: (g), and r has no targets: (e)
    deps.add(KeyDependency{"r", {1, 2}});              // (c)
    const CdPartition p{{"e", "f"}, {"r"}, {"a"}};
    const auto v = check_partition(schema, deps, p);
    std::set<char> letters;
    for (const auto& x : v) letters.insert(x.condition);
    EXPECT_EQ(letters, (std::set<char>{'c', 'e', 'f', 'g'}));

    const CdPartition bad_roles{{"r"}, {"e", "a"}, {"f"}};
    std::set<char> more;
    for (const auto& x : check_partition(schema, DependencySet{}, bad_roles)) more.insert(x.condition);
    EXPECT_TRUE(more.contains('a'));
    EXPECT_TRUE(more.contains('b'));
}

TEST(CheckPartition, RejectsNonPartition) {
    const Schema schema({{"e", 1}, {"r", 2}});
    EXPECT_THROW(check_partition(schema, {}, CdPartition{{"e"}, {}, {}}), ModelError);
    EXPECT_THROW(check_partition(schema, {}, CdPartition{{"e"}, {"r"}, {"r"}}), ModelError);
    EXPECT_THROW(check_partition(schema, {}, CdPartition{{"e", "x"}, {"r"}, {}}), ModelError);
}

// Any partition the search returns passes the oracle and the fixed checker.
TEST(ValidateCdSet, SoundnessProperty) {
    testing::Gen gen(11);
    int accepted_count = 0;
    for (int i = 0; i < 300; ++i) {
        const auto [schema, deps] = random_instance(gen);
        const auto v = validate_cd_set(schema, deps);
        if (!accepted(v)) continue;
        ++accepted_count;
        const auto& p = std::get<CdPartition>(v);
        EXPECT_TRUE(check_partition(schema, deps, p).empty());
        testing::oracle::Assign a;
        for (const auto& n : p.entities) a[n] = testing::oracle::E;
        for (const auto& n : p.relationships) a[n] = testing::oracle::R;
        for (const auto& n : p.attributes) a[n] = testing::oracle::A;
        EXPECT_TRUE(testing::oracle::conditions_hold(schema, deps, a)) << serialize(deps);
    }
    EXPECT_GT(accepted_count, 20);
}

// Exhaustive 3-way enumeration agrees with the search on acceptance.
TEST(ValidateCdSet, CompletenessAgainstExhaustiveOracle) {
    testing::Gen gen(23);
    int accepts = 0, rejects = 0;
    for (int i = 0; i < 400; ++i) {
        const auto [schema, deps] = random_instance(gen);
        const bool expected = testing::oracle::count_witnesses(schema, deps) > 0;
        EXPECT_EQ(accepted(validate_cd_set(schema, deps)), expected) << serialize(schema) << serialize(deps);
        (expected ? accepts : rejects)++;
    }
    EXPECT_GT(accepts, 20);
    EXPECT_GT(rejects, 20);

    testing::EmployeesFixture fx;
    EXPECT_GT(testing::oracle::count_witnesses(fx.schema, fx.deps), 0u);
    const auto inst = build_counterexample(3);
    EXPECT_GT(testing::oracle::count_witnesses(inst.schema, inst.deps), 0u);
}

TEST(IsFullWidth, Examples) {
    testing::EmployeesFixture fx;
    EXPECT_TRUE(is_full_width(InclusionDependency{"manages", {1, 2}, "works_in", {1, 2}}, fx.schema));
    EXPECT_FALSE(is_full_width(InclusionDependency{"works_in", {1}, "employee", {1}}, fx.schema));
    EXPECT_FALSE(is_full_width(InclusionDependency{"since", {1, 2}, "works_in", {1, 2}}, fx.schema));
    EXPECT_TRUE(is_full_width(InclusionDependency{"manager", {1}, "employee", {1}}, fx.schema));
    const Schema rs({{"r", 2}, {"s", 2}});
    EXPECT_TRUE(is_full_width(InclusionDependency{"r", {2, 1}, "s", {1, 2}}, rs));
}

TEST(IsCyclic, Examples) {
    testing::EmployeesFixture fx;
    EXPECT_TRUE(is_cyclic(fx.deps.ids()));
    EXPECT_FALSE(is_cyclic({InclusionDependency{"a", {1}, "b", {1}}}));
    EXPECT_FALSE(is_cyclic({}));
    EXPECT_TRUE(is_cyclic({InclusionDependency{"a", {1}, "a", {2}}}));
    EXPECT_FALSE(is_cyclic({InclusionDependency{"a", {1}, "b", {1}}, InclusionDependency{"a", {1}, "c", {1}},
                            InclusionDependency{"b", {1}, "c", {1}}}));
    EXPECT_TRUE(is_cyclic(build_counterexample(2).deps.ids()));
}

}  // namespace
}  // namespace cdchase
