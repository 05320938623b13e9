#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cdchase/model.hpp"

namespace cdchase {

enum class ChaseStatus { Active, Completed, Failed };

std::string_view to_string(ChaseStatus s) noexcept;

/// Finite-prefix controls. `max_steps` caps ID-rule applications; `max_level`
/// stops before an ID application whose new fact would sit above that level.
/// Unset fields are unbounded.
struct StepBudget {
    std::optional<std::uint64_t> max_steps;
    std::optional<std::uint32_t> max_level;
};

using FactId = std::uint64_t;

/// A fact in the chase together with its provenance.
struct ChaseFact {
    FactId id = 0;
    Fact fact;
    /// Fact the ID rule was applied to; empty for initial facts.
    std::optional<FactId> parent;
    /// Encoded ID that produced the fact; empty for initial facts.
    std::string via;
};

struct TraceStep {
    enum class Rule { Id, Kd };

    Rule rule = Rule::Id;
    std::string dependency;
    /// ID: the fact the rule fired on. KD: the merged pair, ordered by key.
    std::vector<Fact> inputs;
    /// ID only.
    std::optional<Fact> output;
    /// KD only: loser -> survivor.
    std::vector<std::pair<Constant, Constant>> substitution;
    /// KD only: the merge hit two distinct domain constants.
    bool failed = false;
};

using ChaseTrace = std::vector<TraceStep>;

/// Thrown when an engine primitive is called outside its precondition.
class ChaseContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// The mutable set of facts of one chase run. Single owner, sequential.
class ChaseState {
public:
    ChaseState(Schema schema, const Database& db, bool record_trace = false);

    ChaseStatus status() const noexcept { return status_; }
    /// Number of ID-rule applications performed.
    std::uint64_t step_count() const noexcept { return step_count_; }
    std::uint64_t kd_step_count() const noexcept { return kd_step_count_; }
    std::uint64_t next_fresh_index() const noexcept { return next_fresh_; }
    const std::string& failure() const noexcept { return failure_; }
    const Schema& schema() const noexcept { return schema_; }

    /// Facts in fact_sort_key order.
    std::vector<Fact> facts() const;
    /// Facts with level < bound, in fact_sort_key order.
    std::vector<Fact> facts_below(std::uint32_t bound) const;
    /// Facts with provenance, in fact_sort_key order.
    std::vector<ChaseFact> records() const;
    std::size_t size() const noexcept { return facts_.size(); }

    std::optional<Fact> find(const FactKey& key) const;
    bool contains(const FactKey& key) const { return facts_.contains(key); }
    std::uint32_t max_level() const;

    /// Follows merge redirects to the surviving fact id.
    FactId resolve(FactId id) const;

    /// Exclusive upper bound on the levels that are fully built: every fact at
    /// a level below it is present. Empty when the chase is complete (no bound).
    /// Only meaningful once run_chase has returned.
    std::optional<std::uint32_t> materialized_below() const noexcept { return materialized_below_; }

    bool tracing() const noexcept { return tracing_; }
    const ChaseTrace& trace() const noexcept { return trace_; }

    /// Same facts (with levels), fresh counter, status and step count.
    bool same_result(const ChaseState& other) const;

private:
    struct Record {
        FactId id = 0;
        std::uint32_t level = 0;
        std::optional<FactId> parent;
        std::string via;
    };

    friend bool id_applicable(const ChaseState&, const Fact&, const InclusionDependency&);
    friend Fact apply_id_rule(ChaseState&, const Fact&, const InclusionDependency&);
    friend void apply_kd_rule(ChaseState&, const Fact&, const Fact&, const KeyDependency&);
    friend class Scheduler;
    friend void finish_chase(ChaseState&, const DependencySet&);

    Fact to_fact(const FactKey& key, const Record& r) const { return Fact{key.predicate, key.args, r.level}; }
    template <class F>
    void for_each_over(const std::string& pred, F&& f) const;

    Schema schema_;
    std::map<FactKey, Record> facts_;
    std::map<FactId, FactId> merged_into_;
    FactId next_id_ = 1;
    std::uint64_t next_fresh_ = 1;
    std::uint64_t step_count_ = 0;
    std::uint64_t kd_step_count_ = 0;
    ChaseStatus status_ = ChaseStatus::Active;
    std::string failure_;
    std::optional<std::uint32_t> materialized_below_;
    bool tracing_ = false;
    ChaseTrace trace_;
};

/// True iff no fact over the ID's right-hand side agrees with `fact` on the
/// listed positions.
bool id_applicable(const ChaseState& state, const Fact& fact, const InclusionDependency& id);

/// Adds the fact required by `id` for `fact`: copied positions from `fact`,
/// fresh constants left to right elsewhere, level one above `fact`.
/// Throws ChaseContractError if the rule is not applicable.
Fact apply_id_rule(ChaseState& state, const Fact& fact, const InclusionDependency& id);

/// True iff the two facts differ and agree on the key positions.
bool kd_applicable(const ChaseState& state, const Fact& t1, const Fact& t2, const KeyDependency& kd);

/// Merges the non-key positions of t1 and t2 and substitutes the result into
/// every fact; facts made equal collapse to the lower level. Two distinct
/// domain constants fail the chase and leave the facts untouched.
void apply_kd_rule(ChaseState& state, const Fact& t1, const Fact& t2, const KeyDependency& kd);

/// Applies the KD rule until no pair is applicable or the chase fails.
/// Pairs are taken by lowest min level, then by the (ordered) pair of fact
/// keys, then by the KD's encoding.
void kd_saturate(ChaseState& state, const DependencySet& deps);

enum class StepResult { Applied, Completed, Failed, BudgetExhausted };

/// KD saturation followed by at most one ID application. Facts with an
/// applicable full-width ID are served first; among candidates the lowest
/// level wins, ties broken by fact key, and the first applicable ID in
/// encoding order is used.
StepResult chase_step(ChaseState& state, const DependencySet& deps, const StepBudget& budget = {});

/// Runs chase_step until completion, failure or budget exhaustion. The result
/// is deterministic for fixed inputs.
ChaseState run_chase(const Schema& schema, const Database& db, const DependencySet& deps,
                     const StepBudget& budget = {}, bool record_trace = false);

/// Rebuilds a chase by re-applying the recorded rule applications, without
/// any scheduling. Throws ChaseContractError when a step does not apply.
ChaseState replay_trace(const Schema& schema, const Database& db, const DependencySet& deps,
                        const ChaseTrace& trace);

/// Settles status and materialized bound after the last step. Called by
/// run_chase and replay_trace; exposed for callers driving chase_step.
void finish_chase(ChaseState& state, const DependencySet& deps);

}  // namespace cdchase
