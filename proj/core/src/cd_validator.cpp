#include "cdchase/cd_validator.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>

namespace cdchase {

namespace {

enum class Role { Entity, Relationship, Attribute };

using RoleMap = std::map<std::string, Role, std::less<>>;

bool is_prefix_run(const std::vector<std::size_t>& attrs, std::size_t n) {
    if (attrs.size() != n) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (attrs[i] != i + 1) return false;
    return true;
}

bool is_permutation_of_run(const std::vector<std::size_t>& attrs, std::size_t n) {
    if (attrs.size() != n) return false;
    auto sorted = attrs;
    std::sort(sorted.begin(), sorted.end());
    return is_prefix_run(sorted, n);
}

bool is_single(const std::vector<std::size_t>& attrs) { return attrs.size() == 1; }
bool is_first(const std::vector<std::size_t>& attrs) { return attrs.size() == 1 && attrs[0] == 1; }

// Allowed shapes for a key dependency given the role of its predicate.
bool kd_has_allowed_shape(const KeyDependency& kd, Role role, std::size_t arity) {
    if (role == Role::Relationship) return kd.key_attrs.size() == 1;
    if (role == Role::Attribute) {
        auto sorted = kd.key_attrs;
        std::sort(sorted.begin(), sorted.end());
        return is_prefix_run(sorted, arity - 1);
    }
    return false;
}

// Allowed shapes (1)-(8) for an inclusion dependency given both roles.
bool id_has_allowed_shape(const InclusionDependency& id, Role lr, Role rr, std::size_t la,
                          std::size_t ra) {
    using enum Role;
    const auto& x = id.lhs_attrs;
    const auto& y = id.rhs_attrs;
    if (lr == Entity && rr == Entity) return is_first(x) && is_first(y);
    if (lr == Entity && rr == Relationship) return is_first(x) && is_single(y);
    if (lr == Relationship && rr == Entity) return is_single(x) && is_first(y);
    if (lr == Relationship && rr == Relationship)
        return la == ra && is_prefix_run(x, la) && is_permutation_of_run(y, la);
    if (lr == Attribute && rr == Entity) return is_first(x) && is_first(y);
    if (lr == Attribute && rr == Relationship)
        return ra + 1 == la && is_prefix_run(x, ra) && is_prefix_run(y, ra);
    if (lr == Entity && rr == Attribute) return is_first(x) && is_first(y);
    if (lr == Relationship && rr == Attribute)
        return la + 1 == ra && is_prefix_run(x, la) && is_prefix_run(y, la);
    return false;
}

bool has_id(const DependencySet& deps, std::string_view lhs, const std::vector<std::size_t>& x,
            std::string_view rhs, const std::vector<std::size_t>& y) {
    return std::any_of(deps.ids().begin(), deps.ids().end(), [&](const InclusionDependency& id) {
        return id.lhs == lhs && id.rhs == rhs && id.lhs_attrs == x && id.rhs_attrs == y;
    });
}

std::vector<std::size_t> run(std::size_t n) {
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i + 1;
    return out;
}

RoleMap roles_of(const Schema& schema, const CdPartition& p) {
    RoleMap roles;
    auto assign = [&](const std::set<std::string>& names, Role role) {
        for (const auto& n : names) {
            if (!schema.contains(n)) throw ModelError("partition names unknown predicate " + n);
            if (!roles.emplace(n, role).second)
                throw ModelError("predicate " + n + " assigned to more than one class");
        }
    };
    assign(p.entities, Role::Entity);
    assign(p.relationships, Role::Relationship);
    assign(p.attributes, Role::Attribute);
    for (const auto& pred : schema.predicates())
        if (!roles.contains(pred.name)) throw ModelError("partition omits predicate " + pred.name);
    return roles;
}

CdPartition partition_of(const RoleMap& roles) {
    CdPartition p;
    for (const auto& [name, role] : roles) {
        switch (role) {
            case Role::Entity: p.entities.insert(name); break;
            case Role::Relationship: p.relationships.insert(name); break;
            case Role::Attribute: p.attributes.insert(name); break;
        }
    }
    return p;
}

std::string pos_str(std::size_t i) { return std::to_string(i); }

}  // namespace

std::vector<CdViolation> check_partition(const Schema& schema, const DependencySet& deps,
                                         const CdPartition& partition) {
    using enum Role;
    const RoleMap roles = roles_of(schema, partition);
    auto role = [&](const std::string& n) { return roles.find(n)->second; };
    auto arity = [&](const std::string& n) { return schema.at(n).arity; };

    std::vector<CdViolation> out;

    for (const auto& [name, r] : roles) {
        if (r == Entity && arity(name) != 1)
            out.push_back({'a', "entity " + name + " is not unary"});
        if (r != Entity && arity(name) < 2)
            out.push_back({'b', (r == Relationship ? "relationship " : "attribute ") + name +
                                    " has arity < 2"});
    }

    for (const auto& kd : deps.kds())
        if (!kd_has_allowed_shape(kd, role(kd.pred), arity(kd.pred)))
            out.push_back({'c', to_string(kd) + " has no allowed key shape"});

    for (const auto& id : deps.ids())
        if (!id_has_allowed_shape(id, role(id.lhs), role(id.rhs), arity(id.lhs), arity(id.rhs)))
            out.push_back({'d', to_string(id) + " has no allowed inclusion shape"});

    // (e) every relationship position points to exactly one entity.
    for (const auto& [name, r] : roles) {
        if (r != Relationship) continue;
        for (std::size_t i = 1; i <= arity(name); ++i) {
            std::set<std::string> targets;
            for (const auto& id : deps.ids())
                if (id.lhs == name && id.lhs_attrs == std::vector<std::size_t>{i} &&
                    is_first(id.rhs_attrs) && role(id.rhs) == Entity)
                    targets.insert(id.rhs);
            if (targets.size() != 1)
                out.push_back({'e', name + " position " + pos_str(i) + " has " +
                                        std::to_string(targets.size()) +
                                        " entity targets, expected exactly 1"});
        }
    }

    // (f) every attribute hangs off exactly one entity or relationship.
    for (const auto& [name, r] : roles) {
        if (r != Attribute) continue;
        const std::size_t n = arity(name) - 1;
        const auto prefix = run(n);
        std::set<std::string> targets;
        for (const auto& id : deps.ids())
            if (id.lhs == name && role(id.rhs) != Attribute && arity(id.rhs) == n &&
                id.lhs_attrs == prefix && id.rhs_attrs == prefix)
                targets.insert(id.rhs);
        if (targets.size() != 1)
            out.push_back({'f', "attribute " + name + " has " + std::to_string(targets.size()) +
                                    " owners, expected exactly 1"});
    }

    for (const auto& id : deps.ids()) {
        const Role lr = role(id.lhs);
        const Role rr = role(id.rhs);
        // (g)
        if (lr == Entity && rr == Relationship && is_first(id.lhs_attrs) && is_single(id.rhs_attrs) &&
            !has_id(deps, id.rhs, id.rhs_attrs, id.lhs, {1}))
            out.push_back({'g', to_string(id) + " lacks converse " + id.rhs + "[" +
                                    pos_str(id.rhs_attrs[0]) + "] <= " + id.lhs + "[1]"});
        // (h)
        if (lr == Relationship && rr == Attribute && arity(id.lhs) + 1 == arity(id.rhs) &&
            is_prefix_run(id.lhs_attrs, arity(id.lhs)) && is_prefix_run(id.rhs_attrs, arity(id.lhs)) &&
            !has_id(deps, id.rhs, id.rhs_attrs, id.lhs, id.lhs_attrs))
            out.push_back({'h', to_string(id) + " lacks its converse"});
        // (i)
        if (lr == Entity && rr == Attribute && arity(id.rhs) == 2 && is_first(id.lhs_attrs) &&
            is_first(id.rhs_attrs) && !has_id(deps, id.rhs, {1}, id.lhs, {1}))
            out.push_back({'i', to_string(id) + " lacks converse " + id.rhs + "[1] <= " + id.lhs + "[1]"});
    }

    return out;
}

CdValidation validate_cd_set(const Schema& schema, const DependencySet& deps) {
    deps.check_well_formed(schema);

    RoleMap roles;
    std::vector<std::string> open;  // non-unary predicates, name order
    for (const auto& p : schema.predicates()) {
        if (p.arity == 1)
            roles.emplace(p.name, Role::Entity);
        else
            open.push_back(p.name);
    }

    // Dependencies become checkable once every predicate they mention is
    // assigned; index them by the position (in `open`) that completes them.
    std::map<std::string, std::size_t, std::less<>> rank;
    for (std::size_t i = 0; i < open.size(); ++i) rank.emplace(open[i], i + 1);
    auto rank_of = [&](const std::string& n) {
        auto it = rank.find(n);
        return it == rank.end() ? std::size_t{0} : it->second;
    };
    std::vector<std::vector<const InclusionDependency*>> ids_at(open.size() + 1);
    std::vector<std::vector<const KeyDependency*>> kds_at(open.size() + 1);
    for (const auto& id : deps.ids()) ids_at[std::max(rank_of(id.lhs), rank_of(id.rhs))].push_back(&id);
    for (const auto& kd : deps.kds()) kds_at[rank_of(kd.pred)].push_back(&kd);

    auto locally_ok = [&](std::size_t stage) {
        for (const auto* kd : kds_at[stage])
            if (!kd_has_allowed_shape(*kd, roles.at(kd->pred), schema.at(kd->pred).arity)) return false;
        for (const auto* id : ids_at[stage])
            if (!id_has_allowed_shape(*id, roles.at(id->lhs), roles.at(id->rhs),
                                      schema.at(id->lhs).arity, schema.at(id->rhs).arity))
                return false;
        return true;
    };

    std::optional<CdPartition> found;
    std::function<bool(std::size_t)> search = [&](std::size_t depth) -> bool {
        if (depth == open.size()) {
            auto candidate = partition_of(roles);
            if (!check_partition(schema, deps, candidate).empty()) return false;
            found = std::move(candidate);
            return true;
        }
        for (Role r : {Role::Relationship, Role::Attribute}) {
            roles[open[depth]] = r;
            if (locally_ok(depth + 1) && search(depth + 1)) return true;
        }
        roles.erase(open[depth]);
        return false;
    };

    if (locally_ok(0) && search(0)) return *found;

    // Rejected: report the closest candidate in enumeration order.
    CdRejection best;
    std::optional<std::size_t> best_count;
    const std::size_t total = std::size_t{1} << open.size();
    for (std::size_t mask = 0; mask < total; ++mask) {
        for (std::size_t i = 0; i < open.size(); ++i) {
            bool attribute = (mask >> (open.size() - 1 - i)) & 1U;
            roles[open[i]] = attribute ? Role::Attribute : Role::Relationship;
        }
        auto candidate = partition_of(roles);
        auto violations = check_partition(schema, deps, candidate);
        if (!best_count || violations.size() < *best_count) {
            best_count = violations.size();
            best.closest = std::move(candidate);
            best.violations = std::move(violations);
        }
    }
    return best;
}

bool is_full_width(const InclusionDependency& id, const Schema& schema) {
    return is_permutation_of_run(id.lhs_attrs, schema.at(id.lhs).arity) &&
           is_permutation_of_run(id.rhs_attrs, schema.at(id.rhs).arity);
}

bool is_cyclic(const std::vector<InclusionDependency>& ids) {
    std::map<std::string, std::set<std::string>> edges;
    for (const auto& id : ids) {
        edges[id.lhs].insert(id.rhs);
        edges.try_emplace(id.rhs);
    }
    enum class Mark { White, Grey, Black };
    std::map<std::string, Mark> mark;
    for (const auto& [n, _] : edges) mark[n] = Mark::White;

    std::function<bool(const std::string&)> visit = [&](const std::string& n) {
        mark[n] = Mark::Grey;
        for (const auto& m : edges[n]) {
            if (mark[m] == Mark::Grey) return true;
            if (mark[m] == Mark::White && visit(m)) return true;
        }
        mark[n] = Mark::Black;
        return false;
    };
    for (const auto& [n, _] : edges)
        if (mark[n] == Mark::White && visit(n)) return true;
    return false;
}

}  // namespace cdchase
