#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cdchase/model.hpp"

namespace cdchase {

/// Assignment of every schema predicate to entities, relationships or
/// attributes.
struct CdPartition {
    std::set<std::string> entities;
    std::set<std::string> relationships;
    std::set<std::string> attributes;

    friend bool operator==(const CdPartition&, const CdPartition&) = default;
};

/// One failed condition of the conceptual-dependency characterization.
/// `condition` is the item letter 'a'..'i'.
struct CdViolation {
    char condition = 'a';
    std::string detail;

    friend bool operator==(const CdViolation&, const CdViolation&) = default;
};

struct CdRejection {
    /// Partition candidate with the fewest violations.
    CdPartition closest;
    std::vector<CdViolation> violations;
};

using CdValidation = std::variant<CdPartition, CdRejection>;

/// Lists every condition violated by `partition`. An empty result means the
/// partition witnesses that `deps` is a set of conceptual dependencies.
///
/// This is a direct, partition-at-a-time checker; the search in
/// validate_cd_set only uses it to confirm complete candidates.
std::vector<CdViolation> check_partition(const Schema& schema, const DependencySet& deps,
                                         const CdPartition& partition);

/// Searches for a partition satisfying every condition.
///
/// Unary predicates are forced into the entities. Every other predicate, in
/// byte-wise name order, is tried as a relationship and then as an attribute;
/// the search backtracks as soon as a dependency whose predicates are all
/// assigned fits none of the allowed shapes. Exponential in the number of
/// non-unary predicates in the worst case. On rejection, returns the violations
/// of the candidate (in the same enumeration order) with the fewest of them.
CdValidation validate_cd_set(const Schema& schema, const DependencySet& deps);

/// True iff every attribute of both predicates is listed exactly once.
bool is_full_width(const InclusionDependency& id, const Schema& schema);

/// True iff the predicate graph with an edge lhs -> rhs per ID has a cycle.
bool is_cyclic(const std::vector<InclusionDependency>& ids);

}  // namespace cdchase
