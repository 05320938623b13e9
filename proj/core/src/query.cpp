#include "cdchase/query.hpp"

#include <algorithm>
#include <numeric>

#include "cdchase/dsl.hpp"

namespace cdchase {

namespace {

using FactsByPredicate = std::map<std::string, std::vector<const Fact*>, std::less<>>;

FactsByPredicate index_by_predicate(std::span<const Fact> facts) {
    FactsByPredicate out;
    for (const auto& f : facts) out[f.predicate].push_back(&f);
    return out;
}

class Matcher {
public:
    Matcher(const ConjunctiveQuery& q, std::span<const Fact> facts) : q_(q), index_(index_by_predicate(facts)) {
        order_.resize(q.body.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t a, std::size_t b) { return candidates(a).size() < candidates(b).size(); });
    }

    std::vector<Homomorphism> run() {
        std::set<Homomorphism> found;
        search(0, found);
        return {found.begin(), found.end()};
    }

private:
    const std::vector<const Fact*>& candidates(std::size_t atom) const {
        static const std::vector<const Fact*> none;
        auto it = index_.find(q_.body[atom].predicate);
        return it == index_.end() ? none : it->second;
    }

    void search(std::size_t depth, std::set<Homomorphism>& found) {
        if (depth == order_.size()) {
            found.insert(binding_);
            return;
        }
        const Atom& atom = q_.body[order_[depth]];
        for (const Fact* f : candidates(order_[depth])) {
            if (f->args.size() != atom.terms.size()) continue;
            std::vector<std::string> bound_here;
            bool ok = true;
            for (std::size_t i = 0; ok && i < atom.terms.size(); ++i) {
                if (const auto* c = std::get_if<Constant>(&atom.terms[i])) {
                    ok = *c == f->args[i];
                    continue;
                }
                const auto& var = std::get<Variable>(atom.terms[i]).name;
                auto [it, inserted] = binding_.try_emplace(var, f->args[i]);
                if (inserted)
                    bound_here.push_back(var);
                else
                    ok = it->second == f->args[i];
            }
            if (ok) search(depth + 1, found);
            for (const auto& v : bound_here) binding_.erase(v);
        }
    }

    const ConjunctiveQuery& q_;
    FactsByPredicate index_;
    std::vector<std::size_t> order_;
    Homomorphism binding_;
};

std::optional<Tuple> head_image(const ConjunctiveQuery& q, const Homomorphism& h) {
    Tuple t;
    t.reserve(q.head.size());
    for (const auto& v : q.head) {
        const Constant& c = h.at(v);
        if (c.is_fresh()) return std::nullopt;
        t.push_back(c);
    }
    return t;
}

}  // namespace

std::vector<std::string> ConjunctiveQuery::variables() const {
    std::vector<std::string> out;
    for (const auto& a : body)
        for (const auto& t : a.terms)
            if (const auto* v = std::get_if<Variable>(&t))
                if (std::find(out.begin(), out.end(), v->name) == out.end()) out.push_back(v->name);
    return out;
}

std::string ConjunctiveQuery::to_string() const {
    std::string out = name + "(";
    for (std::size_t i = 0; i < head.size(); ++i) out += (i ? "," : "") + head[i];
    out += ") :- ";
    for (std::size_t a = 0; a < body.size(); ++a) {
        if (a) out += ", ";
        out += body[a].predicate + "(";
        for (std::size_t i = 0; i < body[a].terms.size(); ++i) {
            if (i) out += ',';
            const auto& t = body[a].terms[i];
            if (const auto* v = std::get_if<Variable>(&t))
                out += v->name;
            else
                out += constant_literal(std::get<Constant>(t));
        }
        out += ")";
    }
    return out + ".";
}

void check_well_formed(const ConjunctiveQuery& q, const Schema& schema) {
    if (q.body.empty()) throw ModelError("query " + q.name + " has an empty body");
    for (const auto& a : q.body) {
        auto arity = schema.arity(a.predicate);
        if (!arity) throw ModelError("query uses unknown predicate " + a.predicate);
        if (a.terms.size() != *arity)
            throw ModelError("query atom " + a.predicate + " has " + std::to_string(a.terms.size()) +
                             " terms, expected " + std::to_string(*arity));
        for (const auto& t : a.terms)
            if (const auto* c = std::get_if<Constant>(&t); c && c->is_fresh())
                throw ModelError("queries may not mention fresh constants");
    }
    const auto vars = q.variables();
    for (const auto& h : q.head)
        if (std::find(vars.begin(), vars.end(), h) == vars.end())
            throw ModelError("head variable " + h + " does not occur in the body");
}

std::vector<Homomorphism> find_homomorphisms(const ConjunctiveQuery& q, std::span<const Fact> facts) {
    return Matcher(q, facts).run();
}

AnswerSet answers_over(const ConjunctiveQuery& q, std::span<const Fact> facts) {
    AnswerSet out;
    for (const auto& h : find_homomorphisms(q, facts))
        if (auto t = head_image(q, h)) out.insert(std::move(*t));
    return out;
}

AnswerSet evaluate_over_prefix(const ChaseState& chase, const ConjunctiveQuery& q, std::uint32_t level_bound) {
    if (chase.status() == ChaseStatus::Failed) throw InconsistentChase("chase failed: " + chase.failure());
    if (auto built = chase.materialized_below(); chase.status() == ChaseStatus::Active && built && level_bound > *built)
        throw PrefixNotMaterialized("level bound " + std::to_string(level_bound) +
                                    " exceeds the materialized prefix (levels below " + std::to_string(*built) + ")");
    const auto prefix = chase.facts_below(level_bound);
    return answers_over(q, prefix);
}

AnswerSet brute_force_evaluate(std::span<const Fact> instance, const ConjunctiveQuery& q) {
    std::set<FactKey> present;
    std::set<Constant> constants;
    for (const auto& f : instance) {
        present.insert(fact_sort_key(f));
        constants.insert(f.args.begin(), f.args.end());
    }
    const std::vector<Constant> domain(constants.begin(), constants.end());
    const auto vars = q.variables();

    AnswerSet out;
    if (!vars.empty() && domain.empty()) return out;

    std::vector<std::size_t> odometer(vars.size(), 0);
    while (true) {
        Homomorphism h;
        for (std::size_t i = 0; i < vars.size(); ++i) h.emplace(vars[i], domain[odometer[i]]);

        const bool satisfied = std::all_of(q.body.begin(), q.body.end(), [&](const Atom& a) {
            FactKey k{a.predicate, {}};
            for (const auto& t : a.terms)
                k.args.push_back(std::holds_alternative<Constant>(t) ? std::get<Constant>(t)
                                                                     : h.at(std::get<Variable>(t).name));
            return present.contains(k);
        });
        if (satisfied) {
            Tuple t;
            bool has_fresh = false;
            for (const auto& v : q.head) {
                t.push_back(h.at(v));
                has_fresh = has_fresh || t.back().is_fresh();
            }
            if (!has_fresh) out.insert(std::move(t));
        }

        std::size_t i = 0;
        while (i < odometer.size() && ++odometer[i] == domain.size()) odometer[i++] = 0;
        if (i == odometer.size()) break;
    }
    return out;
}

FrozenQuery freeze_query(const ConjunctiveQuery& q, const Schema& schema) {
    FrozenQuery out;
    auto frozen = [&](const std::string& var) -> const Constant& {
        auto it = out.freeze.find(var);
        if (it == out.freeze.end())
            it = out.freeze.emplace(var, Constant::domain("_frz" + std::to_string(out.freeze.size() + 1))).first;
        return it->second;
    };
    for (const auto& v : q.head) frozen(v);
    for (const auto& a : q.body) {
        Tuple args;
        for (const auto& t : a.terms)
            args.push_back(std::holds_alternative<Constant>(t) ? std::get<Constant>(t)
                                                               : frozen(std::get<Variable>(t).name));
        out.facts.insert(schema, a.predicate, std::move(args));
    }
    for (const auto& v : q.head) out.head.push_back(out.freeze.at(v));
    return out;
}

CertainAnswers certain_answers(const Schema& schema, const Database& db, const DependencySet& deps,
                               const ConjunctiveQuery& q, std::uint32_t level_bound, const StepBudget& budget) {
    check_well_formed(q, schema);
    StepBudget effective = budget;
    if (!effective.max_level) effective.max_level = level_bound;

    const ChaseState chase = run_chase(schema, db, deps, effective);
    CertainAnswers out;
    out.chase_status = chase.status();
    out.level_bound = level_bound;
    out.chase_steps = chase.step_count();
    if (chase.status() == ChaseStatus::Failed) {
        out.inconsistent = true;
        return out;
    }
    out.answers = evaluate_over_prefix(chase, q, level_bound);
    return out;
}

ContainmentResult check_containment(const ConjunctiveQuery& q1, const ConjunctiveQuery& q2, const Schema& schema,
                                    const DependencySet& deps, std::uint32_t level_bound, const StepBudget& budget) {
    check_well_formed(q1, schema);
    check_well_formed(q2, schema);
    if (q1.head.size() != q2.head.size()) throw ModelError("containment needs heads of equal length");

    const FrozenQuery frozen = freeze_query(q1, schema);
    StepBudget effective = budget;
    if (!effective.max_level) effective.max_level = level_bound;
    const ChaseState chase = run_chase(schema, frozen.facts, deps, effective);

    ContainmentResult out;
    out.chase_status = chase.status();
    out.level_bound = level_bound;
    if (chase.status() == ChaseStatus::Failed) {
        out.verdict = Containment::Contained;
        out.vacuous = true;
        return out;
    }
    if (auto built = chase.materialized_below(); chase.status() == ChaseStatus::Active && built)
        out.level_bound = std::min(level_bound, *built);

    // Pin q2's head onto the frozen head of q1, then look for any match.
    std::map<std::string, Constant> pinned;
    for (std::size_t i = 0; i < q2.head.size(); ++i) {
        auto [it, inserted] = pinned.try_emplace(q2.head[i], frozen.head[i]);
        if (!inserted && it->second != frozen.head[i]) return out;
    }
    ConjunctiveQuery pinned_q2 = q2;
    pinned_q2.head.clear();
    for (auto& a : pinned_q2.body)
        for (auto& t : a.terms)
            if (const auto* v = std::get_if<Variable>(&t))
                if (auto it = pinned.find(v->name); it != pinned.end()) t = it->second;

    const auto prefix = chase.facts_below(out.level_bound);
    if (!find_homomorphisms(pinned_q2, prefix).empty()) out.verdict = Containment::Contained;
    return out;
}

}  // namespace cdchase
