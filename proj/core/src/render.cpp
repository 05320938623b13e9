#include "cdchase/render.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cdchase/dsl.hpp"

namespace cdchase {

namespace {

using nlohmann::json;

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json args_json(const Tuple& args) {
    json a = json::array();
    for (const auto& c : args) a.push_back(c.to_string());
    return a;
}

json fact_json(const Fact& f) { return json{{"predicate", f.predicate}, {"args", args_json(f.args)}, {"level", f.level}}; }

json trace_json(const ChaseTrace& trace) {
    json out = json::array();
    for (const auto& s : trace) {
        json step{{"rule", s.rule == TraceStep::Rule::Id ? "ID" : "KD"}, {"dependency", s.dependency}};
        json inputs = json::array();
        for (const auto& f : s.inputs) inputs.push_back(fact_json(f));
        step["inputs"] = std::move(inputs);
        if (s.output) step["output"] = fact_json(*s.output);
        if (s.rule == TraceStep::Rule::Kd) {
            json subst = json::array();
            for (const auto& [from, to] : s.substitution) subst.push_back({{"from", from.to_string()}, {"to", to.to_string()}});
            step["substitution"] = std::move(subst);
            step["failed"] = s.failed;
        }
        out.push_back(std::move(step));
    }
    return out;
}

std::string trace_line(const TraceStep& s) {
    std::string out = s.rule == TraceStep::Rule::Id ? "ID " : "KD ";
    out += s.dependency + " on ";
    for (std::size_t i = 0; i < s.inputs.size(); ++i) out += (i ? ", " : "") + s.inputs[i].to_string();
    if (s.output) out += " -> " + s.output->to_string() + " @" + std::to_string(s.output->level);
    for (const auto& [from, to] : s.substitution) out += " [" + from.to_string() + " := " + to.to_string() + "]";
    if (s.failed) out += " FAILED";
    return out;
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

json partition_json(const CdPartition& p) {
    return json{{"entities", p.entities}, {"relationships", p.relationships}, {"attributes", p.attributes}};
}

std::string join(const std::set<std::string>& names) {
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
    return out.empty() ? "-" : out;
}

std::string tuple_text(const Tuple& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) out += (i ? ", " : "") + constant_literal(t[i]);
    return out + ")";
}

}  // namespace

std::vector<Fact> facts_by_level(const ChaseState& chase) {
    auto facts = chase.facts();
    std::stable_sort(facts.begin(), facts.end(), [](const Fact& a, const Fact& b) { return a.level < b.level; });
    return facts;
}

std::string chase_to_json(const ChaseState& chase, bool include_trace) {
    json facts = json::array();
    for (const auto& f : facts_by_level(chase)) facts.push_back(fact_json(f));
    json doc{{"format_version", kJsonFormatVersion},
             {"status", std::string(to_string(chase.status()))},
             {"step_count", chase.step_count()},
             {"kd_step_count", chase.kd_step_count()},
             {"facts", std::move(facts)}};
    if (auto b = chase.materialized_below(); b && chase.status() == ChaseStatus::Active)
        doc["materialized_below"] = *b;
    if (chase.status() == ChaseStatus::Failed) doc["failure"] = chase.failure();
    if (include_trace) doc["trace"] = trace_json(chase.trace());
    return dump(doc);
}

std::string chase_to_text(const ChaseState& chase, bool include_trace) {
    std::ostringstream out;
    out << "status: " << to_string(chase.status()) << "\n";
    if (chase.status() == ChaseStatus::Failed) out << "failure: " << chase.failure() << "\n";
    if (auto b = chase.materialized_below(); b && chase.status() == ChaseStatus::Active)
        out << "materialized below level: " << *b << "\n";
    out << "id steps: " << chase.step_count() << "\n";
    out << "kd steps: " << chase.kd_step_count() << "\n";
    out << "facts: " << chase.size() << "\n";
    out << "level  fact\n";
    for (const auto& f : facts_by_level(chase)) {
        std::string lvl = std::to_string(f.level);
        out << lvl << std::string(lvl.size() < 7 ? 7 - lvl.size() : 1, ' ') << f.to_string() << "\n";
    }
    if (include_trace) {
        out << "trace:\n";
        for (std::size_t i = 0; i < chase.trace().size(); ++i) out << "  " << i + 1 << ". " << trace_line(chase.trace()[i]) << "\n";
    }
    return out.str();
}

std::string chase_to_dot(const ChaseState& chase) {
    const auto records = chase.records();
    std::map<std::uint32_t, std::vector<const ChaseFact*>> by_level;
    for (const auto& r : records) by_level[r.fact.level].push_back(&r);

    std::ostringstream out;
    out << "digraph chase {\n";
    out << "  rankdir=TB;\n";
    out << "  node [shape=box, fontname=\"Helvetica\"];\n";
    out << "  edge [fontname=\"Helvetica\", fontsize=9];\n";
    out << "  // level bands\n";
    out << "  node [shape=plaintext, fontcolor=gray40];\n";
    std::uint32_t prev = 0;
    bool first = true;
    for (const auto& [level, _] : by_level) {
        out << "  L" << level << " [label=\"level " << level << "\"];\n";
        if (!first) out << "  L" << prev << " -> L" << level << " [style=invis];\n";
        prev = level;
        first = false;
    }
    out << "  node [shape=box, fontcolor=black];\n";
    for (const auto& [level, facts] : by_level) {
        out << "  { rank=same; L" << level << ";";
        for (const auto* r : facts) out << " f" << r->id << ";";
        out << " }\n";
    }
    for (const auto& r : records) {
        out << "  f" << r.id << " [label=\"" << dot_escape(r.fact.to_string()) << "\"";
        if (r.fact.level == 0) out << ", style=bold";
        out << "];\n";
    }
    for (const auto& r : records) {
        if (!r.parent || *r.parent == r.id) continue;
        out << "  f" << *r.parent << " -> f" << r.id << " [label=\"" << dot_escape(r.via) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::string validation_to_json(const CdValidation& v) {
    json doc{{"format_version", kJsonFormatVersion}};
    if (const auto* p = std::get_if<CdPartition>(&v)) {
        doc["accepted"] = true;
        doc["partition"] = partition_json(*p);
    } else {
        const auto& r = std::get<CdRejection>(v);
        doc["accepted"] = false;
        doc["closest_partition"] = partition_json(r.closest);
        json viol = json::array();
        for (const auto& x : r.violations) viol.push_back({{"condition", std::string(1, x.condition)}, {"detail", x.detail}});
        doc["violations"] = std::move(viol);
    }
    return dump(doc);
}

std::string validation_to_text(const CdValidation& v) {
    std::ostringstream out;
    if (const auto* p = std::get_if<CdPartition>(&v)) {
        out << "accepted: conceptual dependencies\n";
        out << "entities:      " << join(p->entities) << "\n";
        out << "relationships: " << join(p->relationships) << "\n";
        out << "attributes:    " << join(p->attributes) << "\n";
    } else {
        const auto& r = std::get<CdRejection>(v);
        out << "rejected: " << r.violations.size() << " violation(s) in the closest partition\n";
        out << "entities:      " << join(r.closest.entities) << "\n";
        out << "relationships: " << join(r.closest.relationships) << "\n";
        out << "attributes:    " << join(r.closest.attributes) << "\n";
        for (const auto& x : r.violations) out << "(" << x.condition << ") " << x.detail << "\n";
    }
    return out.str();
}

std::string answers_to_json(const ConjunctiveQuery& q, const CertainAnswers& a) {
    json doc{{"format_version", kJsonFormatVersion},
             {"query", q.to_string()},
             {"level_bound", a.level_bound},
             {"chase_status", std::string(to_string(a.chase_status))},
             {"chase_steps", a.chase_steps},
             {"inconsistent", a.inconsistent}};
    if (a.inconsistent) {
        doc["every_tuple_certain"] = true;
    } else {
        json answers = json::array();
        for (const auto& t : a.answers) answers.push_back(args_json(t));
        doc["answers"] = std::move(answers);
    }
    return dump(doc);
}

std::string answers_to_text(const ConjunctiveQuery& q, const CertainAnswers& a) {
    std::ostringstream out;
    out << q.to_string() << "\n";
    out << "level bound: " << a.level_bound << " (facts at levels < " << a.level_bound << ")\n";
    if (a.inconsistent) {
        out << "inconsistent database: the chase does not exist; every tuple is a certain answer\n";
        return out.str();
    }
    out << a.answers.size() << (a.answers.size() == 1 ? " answer\n" : " answers\n");
    for (const auto& t : a.answers) out << tuple_text(t) << "\n";
    return out.str();
}

std::string containment_to_json(const ContainmentResult& r) {
    json doc{{"format_version", kJsonFormatVersion},
             {"verdict", r.verdict == Containment::Contained ? "contained" : "not_contained_up_to_level"},
             {"vacuous", r.vacuous},
             {"level_bound", r.level_bound},
             {"chase_status", std::string(to_string(r.chase_status))}};
    return dump(doc);
}

std::string containment_to_text(const ContainmentResult& r) {
    std::ostringstream out;
    if (r.verdict == Containment::Contained) {
        out << "contained";
        if (r.vacuous) out << " (vacuously: q1 is unsatisfiable under the dependencies)";
        out << "\n";
    } else {
        out << "not contained within levels < " << r.level_bound << "\n";
    }
    out << "level bound: " << r.level_bound << "\n";
    return out.str();
}

std::string refutation_to_json(const RefutationVerdict& v) {
    json e_levels = json::object();
    for (const auto& [i, l] : v.report.e_fact_level) e_levels[std::to_string(i)] = l;
    json max_levels = json::object();
    for (const auto& [i, l] : v.report.max_level_of_constant) max_levels[std::to_string(i)] = l;
    json doc{{"format_version", kJsonFormatVersion},
             {"n", v.n},
             {"probe_level", v.probe_level},
             {"e_fact_level", std::move(e_levels)},
             {"max_level_of_constant", std::move(max_levels)},
             {"excluded_below_probe", v.excluded_below_probe},
             {"included_below_probe_plus_one", v.included_below_probe_plus_one},
             {"delta_witness", {v.delta_witness.first, v.delta_witness.second}},
             {"gap", v.gap},
             {"holds", v.holds()},
             {"discrepancies", v.discrepancies}};
    return dump(doc);
}

std::string refutation_to_text(const RefutationVerdict& v) {
    std::ostringstream out;
    out << "n = " << v.n << ", probe level 2n-2 = " << v.probe_level << "\n";
    out << "level of e(i):";
    for (const auto& [i, l] : v.report.e_fact_level) out << " " << i << ":" << l;
    out << "\n";
    out << "q(X) :- e(X) below level " << v.probe_level << ": <" << v.n << "> "
        << (v.excluded_below_probe ? "absent" : "PRESENT") << "\n";
    out << "q(X) :- e(X) below level " << v.probe_level + 1 << ": <" << v.n << "> "
        << (v.included_below_probe_plus_one ? "present" : "ABSENT") << "\n";
    out << "constant " << v.n << " occurs at levels " << v.delta_witness.first << " and " << v.delta_witness.second
        << " (gap " << v.gap << ")\n";
    out << (v.holds() ? "verdict: no data-independent level bound" : "verdict: DISCREPANCY") << "\n";
    for (const auto& d : v.discrepancies) out << "  " << d << "\n";
    return out.str();
}

}  // namespace cdchase
