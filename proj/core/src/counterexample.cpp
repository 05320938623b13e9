#include "cdchase/counterexample.hpp"

#include <algorithm>
#include <stdexcept>

#include "cdchase/query.hpp"

namespace cdchase {

namespace {

std::string padded(std::uint32_t i, std::uint32_t n) {
    const std::size_t width = std::to_string(n).size();
    std::string s = std::to_string(i);
    return std::string(width - std::min(width, s.size()), '0') + s;
}

std::optional<std::uint32_t> number_of(const Constant& c, std::uint32_t n) {
    if (!c.is_domain()) return std::nullopt;
    const auto& s = c.name();
    if (s.empty() || s.size() != std::to_string(n).size() ||
        !std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch); }))
        return std::nullopt;
    const auto v = static_cast<std::uint32_t>(std::stoul(s));
    if (v < 1 || v > n) return std::nullopt;
    return v;
}

ConjunctiveQuery e_query() {
    return ConjunctiveQuery{"q", {"X"}, {Atom{"e", {Variable{"X"}}}}};
}

}  // namespace

Constant counterexample_constant(std::uint32_t i, std::uint32_t n) { return Constant::domain(padded(i, n)); }

CounterexampleInstance build_counterexample(std::uint32_t n) {
    if (n < 2) throw std::invalid_argument("counterexample needs n >= 2");

    CounterexampleInstance out;
    out.n = n;
    out.schema = Schema({{"e", 1}, {"e'", 1}, {"r", 2}, {"s", 2}});

    out.deps.add(KeyDependency{"s", {1}});
    out.deps.add(InclusionDependency{"r", {1}, "e", {1}});
    out.deps.add(InclusionDependency{"r", {2}, "e", {1}});
    out.deps.add(InclusionDependency{"r", {1, 2}, "s", {1, 2}});
    out.deps.add(InclusionDependency{"e", {1}, "r", {1}});
    out.deps.add(InclusionDependency{"s", {2}, "e'", {1}});
    out.deps.add(InclusionDependency{"s", {1}, "e'", {1}});

    out.db.insert(out.schema, "e", {counterexample_constant(1, n)});
    for (std::uint32_t k = 2; k <= n; ++k)
        out.db.insert(out.schema, "s", {counterexample_constant(k - 1, n), counterexample_constant(k, n)});
    return out;
}

GrowthReport profile_levels(const ChaseState& chase, std::uint32_t n) {
    if (n < 2) throw std::invalid_argument("profile_levels needs n >= 2");
    if (chase.status() == ChaseStatus::Failed) throw std::invalid_argument("chase failed");
    const std::uint32_t probe = 2 * n - 2;
    if (auto built = chase.materialized_below(); chase.status() == ChaseStatus::Active && (!built || *built <= probe))
        throw std::invalid_argument("chase prefix is shallower than level " + std::to_string(probe));

    GrowthReport report;
    report.n = n;
    report.probe_level = probe;
    for (const auto& f : chase.facts()) {
        for (const auto& c : f.args) {
            auto i = number_of(c, n);
            if (!i) continue;
            auto [hi, new_hi] = report.max_level_of_constant.try_emplace(*i, f.level);
            if (!new_hi) hi->second = std::max(hi->second, f.level);
            auto [lo, new_lo] = report.min_level_of_constant.try_emplace(*i, f.level);
            if (!new_lo) lo->second = std::min(lo->second, f.level);
        }
        if (f.predicate == "e")
            if (auto i = number_of(f.args[0], n)) report.e_fact_level[*i] = f.level;
    }

    const Constant last = counterexample_constant(n, n);
    const Constant before_last = counterexample_constant(n - 1, n);
    auto s_fact = chase.find(FactKey{"s", {before_last, last}});
    auto e_fact = chase.find(FactKey{"e", {last}});
    report.delta_witness = {s_fact ? s_fact->level : 0, e_fact ? e_fact->level : 0};
    return report;
}

RefutationVerdict refute_constant_bounds(std::uint32_t n) {
    if (n < 2) throw std::invalid_argument("refute_constant_bounds needs n >= 2");
    const auto inst = build_counterexample(n);
    const std::uint32_t probe = 2 * n - 2;
    const ChaseState chase =
        run_chase(inst.schema, inst.db, inst.deps, StepBudget{std::nullopt, probe + kRefutationLevelSlack});

    RefutationVerdict v;
    v.n = n;
    v.probe_level = probe;
    auto discrepancy = [&](std::string msg) { v.discrepancies.push_back(std::move(msg)); };

    if (chase.status() == ChaseStatus::Failed) {
        discrepancy("chase failed: " + chase.failure());
        return v;
    }

    v.report = profile_levels(chase, n);
    for (std::uint32_t i = 1; i <= n; ++i) {
        auto it = v.report.e_fact_level.find(i);
        if (it == v.report.e_fact_level.end())
            discrepancy("e(" + std::to_string(i) + ") missing");
        else if (it->second != 2 * (i - 1))
            discrepancy("e(" + std::to_string(i) + ") at level " + std::to_string(it->second) + ", expected " +
                        std::to_string(2 * (i - 1)));
    }

    const Tuple target{counterexample_constant(n, n)};
    const auto q = e_query();
    v.excluded_below_probe = !evaluate_over_prefix(chase, q, probe).contains(target);
    v.included_below_probe_plus_one = evaluate_over_prefix(chase, q, probe + 1).contains(target);
    if (!v.excluded_below_probe) discrepancy("<n> already answered below level " + std::to_string(probe));
    if (!v.included_below_probe_plus_one)
        discrepancy("<n> not answered below level " + std::to_string(probe + 1));

    v.delta_witness = v.report.delta_witness;
    v.gap = v.delta_witness.second - v.delta_witness.first;
    if (v.delta_witness.first != 0) discrepancy("s(n-1,n) is not at level 0");
    if (v.gap != probe) discrepancy("gap " + std::to_string(v.gap) + ", expected " + std::to_string(probe));
    return v;
}

bool StabilityReport::stable() const {
    return before.size() == after.size() &&
           std::equal(before.begin(), before.end(), after.begin(), [](const Fact& a, const Fact& b) {
               return fact_sort_key(a) == fact_sort_key(b) && a.level == b.level;
           });
}

StabilityReport check_lower_level_stability(std::uint32_t n, std::optional<std::uint64_t> extra_steps) {
    const auto inst = build_counterexample(n);
    const std::uint32_t probe = 2 * n - 2;
    const FactKey last_e{"e", {counterexample_constant(n, n)}};

    StabilityReport out;
    out.n = n;
    out.extra_steps = extra_steps.value_or(4ULL * n);

    ChaseState state(inst.schema, inst.db);
    // Generous cap: e(n) needs about 4n steps plus n closings of the s facts.
    const StepBudget cap{std::uint64_t{64} * n + 64, std::nullopt};
    while (!state.contains(last_e)) {
        if (chase_step(state, inst.deps, cap) != StepResult::Applied)
            throw std::runtime_error("chase stopped before e(n) appeared");
    }
    out.step_of_last_e = state.step_count();
    out.before = state.facts_below(probe);

    const StepBudget more{state.step_count() + out.extra_steps, std::nullopt};
    while (chase_step(state, inst.deps, more) == StepResult::Applied) {
    }
    // The last ID application may have left KD work pending.
    kd_saturate(state, inst.deps);
    out.after = state.facts_below(probe);
    return out;
}

}  // namespace cdchase
