#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cdchase/chase.hpp"
#include "cdchase/model.hpp"

namespace cdchase {

struct Variable {
    std::string name;

    friend auto operator<=>(const Variable&, const Variable&) = default;
};

using Term = std::variant<Variable, Constant>;

struct Atom {
    std::string predicate;
    std::vector<Term> terms;
};

/// `name(head...) :- body.` Head entries are variable names.
struct ConjunctiveQuery {
    std::string name = "q";
    std::vector<std::string> head;
    std::vector<Atom> body;

    /// Body variables in order of first occurrence.
    std::vector<std::string> variables() const;
    std::string to_string() const;
};

/// Checks non-empty body, head variables occurring in the body, and arities
/// against the schema. Throws ModelError.
void check_well_formed(const ConjunctiveQuery& q, const Schema& schema);

using Homomorphism = std::map<std::string, Constant>;
using AnswerSet = std::set<Tuple>;

/// All variable assignments that send every body atom onto some fact.
/// Backtracks over atoms ordered by ascending candidate count; the result is
/// sorted.
std::vector<Homomorphism> find_homomorphisms(const ConjunctiveQuery& q, std::span<const Fact> facts);

/// Head images of all homomorphisms, dropping tuples with fresh constants.
AnswerSet answers_over(const ConjunctiveQuery& q, std::span<const Fact> facts);

class PrefixNotMaterialized : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InconsistentChase : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Answers over the facts with level < level_bound.
///
/// Throws InconsistentChase on a failed chase and PrefixNotMaterialized when
/// the bound reaches past what a budget-cut chase has built.
AnswerSet evaluate_over_prefix(const ChaseState& chase, const ConjunctiveQuery& q, std::uint32_t level_bound);

/// Reference evaluator: tries every assignment of body variables to the
/// constants of the instance. Exponential; meant for cross-checking.
AnswerSet brute_force_evaluate(std::span<const Fact> instance, const ConjunctiveQuery& q);

struct FrozenQuery {
    Database facts;
    Tuple head;
    std::map<std::string, Constant> freeze;
};

/// Turns the body into facts, mapping each variable to a distinct `_frz<k>`
/// constant (numbered by first occurrence, head first).
FrozenQuery freeze_query(const ConjunctiveQuery& q, const Schema& schema);

/// Certain answers over a bounded chase prefix.
///
/// Answers are sound but only complete once `level_bound` is large enough,
/// and how large depends on the data. `level_bound` is always echoed back.
struct CertainAnswers {
    ChaseStatus chase_status = ChaseStatus::Active;
    /// The chase failed: no model exists and every tuple is trivially certain.
    bool inconsistent = false;
    std::uint32_t level_bound = 0;
    AnswerSet answers;
    std::uint64_t chase_steps = 0;
};

CertainAnswers certain_answers(const Schema& schema, const Database& db, const DependencySet& deps,
                               const ConjunctiveQuery& q, std::uint32_t level_bound, const StepBudget& budget);

enum class Containment { Contained, NotContainedUpToL };

struct ContainmentResult {
    Containment verdict = Containment::NotContainedUpToL;
    /// q1 is unsatisfiable under the dependencies (its frozen chase failed).
    bool vacuous = false;
    /// Level bound actually searched; may be lower than requested when the
    /// chase was cut by the budget.
    std::uint32_t level_bound = 0;
    ChaseStatus chase_status = ChaseStatus::Active;
};

/// Freeze-and-chase containment of q1 in q2 under deps, over the prefix of
/// the frozen chase below `level_bound`. A negative verdict only covers that
/// prefix.
ContainmentResult check_containment(const ConjunctiveQuery& q1, const ConjunctiveQuery& q2, const Schema& schema,
                                    const DependencySet& deps, std::uint32_t level_bound, const StepBudget& budget);

}  // namespace cdchase
