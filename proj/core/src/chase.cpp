#include "cdchase/chase.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "cdchase/cd_validator.hpp"

namespace cdchase {

namespace {

Tuple project(const Tuple& args, const std::vector<std::size_t>& positions) {
    Tuple out;
    out.reserve(positions.size());
    for (std::size_t p : positions) out.push_back(args[p - 1]);
    return out;
}

bool agrees_on(const Tuple& a, const std::vector<std::size_t>& pa, const Tuple& b,
               const std::vector<std::size_t>& pb) {
    for (std::size_t i = 0; i < pa.size(); ++i)
        if (a[pa[i] - 1] != b[pb[i] - 1]) return false;
    return true;
}

const Constant& resolve_constant(const std::map<Constant, Constant>& subst, const Constant& c) {
    const Constant* cur = &c;
    for (auto it = subst.find(*cur); it != subst.end(); it = subst.find(*cur)) cur = &it->second;
    return *cur;
}

}  // namespace

std::string_view to_string(ChaseStatus s) noexcept {
    switch (s) {
        case ChaseStatus::Active: return "active";
        case ChaseStatus::Completed: return "completed";
        case ChaseStatus::Failed: return "failed";
    }
    return "unknown";
}

// --- ChaseState -------------------------------------------------------------

ChaseState::ChaseState(Schema schema, const Database& db, bool record_trace)
    : schema_(std::move(schema)), tracing_(record_trace) {
    for (const auto& f : db.facts()) {
        if (!schema_.contains(f.predicate))
            throw ModelError("database fact over predicate missing from schema: " + f.predicate);
        facts_.emplace(fact_sort_key(f), Record{next_id_++, 0, std::nullopt, {}});
    }
}

template <class F>
void ChaseState::for_each_over(const std::string& pred, F&& f) const {
    for (auto it = facts_.lower_bound(FactKey{pred, {}}); it != facts_.end() && it->first.predicate == pred; ++it)
        f(it->first, it->second);
}

std::vector<Fact> ChaseState::facts() const {
    std::vector<Fact> out;
    out.reserve(facts_.size());
    for (const auto& [k, r] : facts_) out.push_back(to_fact(k, r));
    return out;
}

std::vector<Fact> ChaseState::facts_below(std::uint32_t bound) const {
    std::vector<Fact> out;
    for (const auto& [k, r] : facts_)
        if (r.level < bound) out.push_back(to_fact(k, r));
    return out;
}

std::vector<ChaseFact> ChaseState::records() const {
    std::vector<ChaseFact> out;
    out.reserve(facts_.size());
    for (const auto& [k, r] : facts_) {
        std::optional<FactId> parent;
        if (r.parent) parent = resolve(*r.parent);
        out.push_back(ChaseFact{r.id, to_fact(k, r), parent, r.via});
    }
    return out;
}

std::optional<Fact> ChaseState::find(const FactKey& key) const {
    auto it = facts_.find(key);
    if (it == facts_.end()) return std::nullopt;
    return to_fact(it->first, it->second);
}

std::uint32_t ChaseState::max_level() const {
    std::uint32_t m = 0;
    for (const auto& [_, r] : facts_) m = std::max(m, r.level);
    return m;
}

FactId ChaseState::resolve(FactId id) const {
    for (auto it = merged_into_.find(id); it != merged_into_.end(); it = merged_into_.find(id)) id = it->second;
    return id;
}

bool ChaseState::same_result(const ChaseState& other) const {
    if (status_ != other.status_ || step_count_ != other.step_count_ || next_fresh_ != other.next_fresh_ ||
        facts_.size() != other.facts_.size())
        return false;
    return std::equal(facts_.begin(), facts_.end(), other.facts_.begin(), [](const auto& a, const auto& b) {
        return a.first == b.first && a.second.level == b.second.level;
    });
}

// --- rule primitives --------------------------------------------------------

bool id_applicable(const ChaseState& state, const Fact& fact, const InclusionDependency& id) {
    if (fact.predicate != id.lhs) return false;
    bool witnessed = false;
    state.for_each_over(id.rhs, [&](const FactKey& k, const ChaseState::Record&) {
        witnessed = witnessed || agrees_on(k.args, id.rhs_attrs, fact.args, id.lhs_attrs);
    });
    return !witnessed;
}

Fact apply_id_rule(ChaseState& state, const Fact& fact, const InclusionDependency& id) {
    auto it = state.facts_.find(fact_sort_key(fact));
    if (it == state.facts_.end()) throw ChaseContractError("ID rule on absent fact " + fact.to_string());
    if (state.status_ != ChaseStatus::Active) throw ChaseContractError("ID rule on a finished chase");
    if (!id_applicable(state, fact, id))
        throw ChaseContractError(dependency_sort_key(id) + " not applicable to " + fact.to_string());

    const auto& parent = it->second;
    const std::size_t arity = state.schema_.at(id.rhs).arity;
    std::vector<std::optional<Constant>> slots(arity);
    for (std::size_t i = 0; i < id.rhs_attrs.size(); ++i)
        slots[id.rhs_attrs[i] - 1] = fact.args[id.lhs_attrs[i] - 1];
    Tuple args;
    args.reserve(arity);
    for (auto& s : slots) args.push_back(s ? std::move(*s) : Constant::fresh(state.next_fresh_++));

    Fact produced{id.rhs, std::move(args), parent.level + 1};
    ChaseState::Record rec{state.next_id_++, produced.level, parent.id, dependency_sort_key(id)};
    state.facts_.emplace(fact_sort_key(produced), std::move(rec));
    ++state.step_count_;

    if (state.tracing_) {
        TraceStep step;
        step.rule = TraceStep::Rule::Id;
        step.dependency = dependency_sort_key(id);
        step.inputs.push_back(Fact{fact.predicate, fact.args, parent.level});
        step.output = produced;
        state.trace_.push_back(std::move(step));
    }
    return produced;
}

bool kd_applicable(const ChaseState&, const Fact& t1, const Fact& t2, const KeyDependency& kd) {
    if (t1.predicate != kd.pred || t2.predicate != kd.pred) return false;
    if (t1.args == t2.args) return false;
    return agrees_on(t1.args, kd.key_attrs, t2.args, kd.key_attrs);
}

void apply_kd_rule(ChaseState& state, const Fact& t1, const Fact& t2, const KeyDependency& kd) {
    auto i1 = state.facts_.find(fact_sort_key(t1));
    auto i2 = state.facts_.find(fact_sort_key(t2));
    if (i1 == state.facts_.end() || i2 == state.facts_.end())
        throw ChaseContractError("KD rule on absent fact");
    if (state.status_ != ChaseStatus::Active) throw ChaseContractError("KD rule on a finished chase");
    if (!kd_applicable(state, t1, t2, kd))
        throw ChaseContractError(dependency_sort_key(kd) + " not applicable to " + t1.to_string() + ", " +
                                 t2.to_string());

    TraceStep step;
    step.rule = TraceStep::Rule::Kd;
    step.dependency = dependency_sort_key(kd);
    {
        Fact a{t1.predicate, t1.args, i1->second.level};
        Fact b{t2.predicate, t2.args, i2->second.level};
        if (fact_sort_key(b) < fact_sort_key(a)) std::swap(a, b);
        step.inputs = {std::move(a), std::move(b)};
    }
    ++state.kd_step_count_;

    std::map<Constant, Constant> subst;
    const std::set<std::size_t> key(kd.key_attrs.begin(), kd.key_attrs.end());
    for (std::size_t pos = 1; pos <= t1.args.size(); ++pos) {
        if (key.contains(pos)) continue;
        const Constant a = resolve_constant(subst, t1.args[pos - 1]);
        const Constant b = resolve_constant(subst, t2.args[pos - 1]);
        if (a == b) continue;
        if (a.is_domain() && b.is_domain()) {
            state.status_ = ChaseStatus::Failed;
            state.failure_ = dependency_sort_key(kd) + " cannot merge " + a.to_string() + " and " + b.to_string() +
                             " in " + t1.to_string() + " / " + t2.to_string();
            step.failed = true;
            if (state.tracing_) state.trace_.push_back(std::move(step));
            return;
        }
        const bool a_wins = a.is_domain() || (b.is_fresh() && a < b);
        const Constant& survivor = a_wins ? a : b;
        const Constant& loser = a_wins ? b : a;
        subst.insert_or_assign(loser, survivor);
    }

    for (const auto& [from, _] : subst) step.substitution.emplace_back(from, resolve_constant(subst, from));

    std::map<FactKey, ChaseState::Record> rebuilt;
    for (auto& [k, rec] : state.facts_) {
        FactKey nk{k.predicate, {}};
        nk.args.reserve(k.args.size());
        for (const auto& c : k.args) nk.args.push_back(resolve_constant(subst, c));
        auto [it, inserted] = rebuilt.try_emplace(std::move(nk), rec);
        if (inserted) continue;
        auto& kept = it->second;
        const bool incoming_wins = rec.level < kept.level || (rec.level == kept.level && rec.id < kept.id);
        const FactId loser_id = incoming_wins ? kept.id : rec.id;
        if (incoming_wins) kept = rec;
        state.merged_into_[loser_id] = kept.id;
    }
    state.facts_ = std::move(rebuilt);

    if (state.tracing_) state.trace_.push_back(std::move(step));
}

// --- scheduling -------------------------------------------------------------

class Scheduler {
public:
    struct KdCandidate {
        std::uint32_t min_level;
        FactKey first;
        FactKey second;
        std::string encoding;
        const KeyDependency* kd;
    };

    static std::optional<KdCandidate> best_kd_pair(const ChaseState& state, const std::vector<KeyDependency>& kds) {
        std::optional<KdCandidate> best;
        auto better = [](const KdCandidate& a, const KdCandidate& b) {
            return std::tie(a.min_level, a.first, a.second, a.encoding) <
                   std::tie(b.min_level, b.first, b.second, b.encoding);
        };
        for (const auto& kd : kds) {
            std::map<Tuple, std::vector<std::pair<const FactKey*, std::uint32_t>>> groups;
            state.for_each_over(kd.pred, [&](const FactKey& k, const ChaseState::Record& r) {
                groups[project(k.args, kd.key_attrs)].emplace_back(&k, r.level);
            });
            for (const auto& [_, members] : groups) {
                // Members arrive in key order, so (i, j) with i < j is already
                // the normalized pair.
                for (std::size_t i = 0; i < members.size(); ++i)
                    for (std::size_t j = i + 1; j < members.size(); ++j) {
                        KdCandidate c{std::min(members[i].second, members[j].second), *members[i].first,
                                      *members[j].first, dependency_sort_key(kd), &kd};
                        if (!best || better(c, *best)) best = std::move(c);
                    }
            }
        }
        return best;
    }

    struct IdTarget {
        FactKey key;
        std::uint32_t level;
        const InclusionDependency* id;
    };

    struct Selection {
        std::optional<IdTarget> full_width;
        std::optional<IdTarget> any;
        std::optional<std::uint32_t> lowest_pending_level;
    };

    // One pass over the facts with a per-ID index of right-hand projections.
    static Selection select(const ChaseState& state, const std::vector<InclusionDependency>& ids,
                            const std::vector<bool>& full_width) {
        std::vector<std::set<Tuple>> present(ids.size());
        for (std::size_t d = 0; d < ids.size(); ++d)
            state.for_each_over(ids[d].rhs, [&](const FactKey& k, const ChaseState::Record&) {
                present[d].insert(project(k.args, ids[d].rhs_attrs));
            });

        Selection sel;
        for (const auto& [k, r] : state.facts_) {
            const InclusionDependency* first_fw = nullptr;
            const InclusionDependency* first_any = nullptr;
            for (std::size_t d = 0; d < ids.size(); ++d) {
                if (ids[d].lhs != k.predicate) continue;
                if (present[d].contains(project(k.args, ids[d].lhs_attrs))) continue;
                if (!first_any) first_any = &ids[d];
                if (full_width[d] && !first_fw) first_fw = &ids[d];
            }
            if (!first_any) continue;
            if (!sel.lowest_pending_level || r.level < *sel.lowest_pending_level) sel.lowest_pending_level = r.level;
            if (first_fw && (!sel.full_width || r.level < sel.full_width->level))
                sel.full_width = IdTarget{k, r.level, first_fw};
            if (!sel.any || r.level < sel.any->level) sel.any = IdTarget{k, r.level, first_any};
        }
        return sel;
    }

    static std::vector<bool> full_width_flags(const ChaseState& state, const std::vector<InclusionDependency>& ids) {
        std::vector<bool> out;
        out.reserve(ids.size());
        for (const auto& id : ids) out.push_back(is_full_width(id, state.schema_));
        return out;
    }

    static Fact fact_of(const ChaseState& state, const FactKey& key) { return *state.find(key); }
};

void kd_saturate(ChaseState& state, const DependencySet& deps) {
    const auto kds = deps.sorted_kds();
    while (state.status() == ChaseStatus::Active) {
        auto pair = Scheduler::best_kd_pair(state, kds);
        if (!pair) return;
        apply_kd_rule(state, Scheduler::fact_of(state, pair->first), Scheduler::fact_of(state, pair->second),
                      *pair->kd);
    }
}

StepResult chase_step(ChaseState& state, const DependencySet& deps, const StepBudget& budget) {
    if (state.status() == ChaseStatus::Failed) return StepResult::Failed;
    if (state.status() == ChaseStatus::Completed) return StepResult::Completed;

    kd_saturate(state, deps);
    if (state.status() == ChaseStatus::Failed) return StepResult::Failed;

    const auto ids = deps.sorted_ids();
    const auto sel = Scheduler::select(state, ids, Scheduler::full_width_flags(state, ids));
    const auto& target = sel.full_width ? sel.full_width : sel.any;
    if (!target) {
        finish_chase(state, deps);
        return StepResult::Completed;
    }
    if (budget.max_steps && state.step_count() >= *budget.max_steps) return StepResult::BudgetExhausted;
    if (budget.max_level && target->level + 1 > *budget.max_level) return StepResult::BudgetExhausted;

    apply_id_rule(state, Scheduler::fact_of(state, target->key), *target->id);
    return StepResult::Applied;
}

void finish_chase(ChaseState& state, const DependencySet& deps) {
    if (state.status_ == ChaseStatus::Failed) {
        state.materialized_below_ = 0;
        return;
    }
    if (Scheduler::best_kd_pair(state, deps.sorted_kds())) {
        state.status_ = ChaseStatus::Active;
        state.materialized_below_ = 0;
        return;
    }
    const auto ids = deps.sorted_ids();
    const auto sel = Scheduler::select(state, ids, Scheduler::full_width_flags(state, ids));
    if (!sel.lowest_pending_level) {
        state.status_ = ChaseStatus::Completed;
        state.materialized_below_.reset();
        return;
    }
    state.status_ = ChaseStatus::Active;
    state.materialized_below_ = *sel.lowest_pending_level + 1;
}

ChaseState run_chase(const Schema& schema, const Database& db, const DependencySet& deps, const StepBudget& budget,
                     bool record_trace) {
    deps.check_well_formed(schema);
    ChaseState state(schema, db, record_trace);
    while (chase_step(state, deps, budget) == StepResult::Applied) {
    }
    finish_chase(state, deps);
    return state;
}

ChaseState replay_trace(const Schema& schema, const Database& db, const DependencySet& deps,
                        const ChaseTrace& trace) {
    ChaseState state(schema, db, true);
    for (const auto& step : trace) {
        if (step.rule == TraceStep::Rule::Id) {
            auto it = std::find_if(deps.ids().begin(), deps.ids().end(),
                                   [&](const auto& id) { return dependency_sort_key(id) == step.dependency; });
            if (it == deps.ids().end()) throw ChaseContractError("trace names unknown " + step.dependency);
            if (step.inputs.size() != 1 || !step.output) throw ChaseContractError("malformed ID trace step");
            Fact out = apply_id_rule(state, step.inputs[0], *it);
            if (fact_sort_key(out) != fact_sort_key(*step.output) || out.level != step.output->level)
                throw ChaseContractError("replay produced " + out.to_string() + ", trace has " +
                                         step.output->to_string());
        } else {
            const KeyDependency* kd = nullptr;
            for (const auto& k : deps.kds())
                if (dependency_sort_key(k) == step.dependency) kd = &k;
            if (!kd) throw ChaseContractError("trace names unknown " + step.dependency);
            if (step.inputs.size() != 2) throw ChaseContractError("malformed KD trace step");
            apply_kd_rule(state, step.inputs[0], step.inputs[1], *kd);
        }
    }
    finish_chase(state, deps);
    return state;
}

}  // namespace cdchase
