#pragma once

#include <string>
#include <vector>

#include "cdchase/cd_validator.hpp"
#include "cdchase/chase.hpp"
#include "cdchase/counterexample.hpp"
#include "cdchase/query.hpp"

namespace cdchase {

/// Version stamped into every JSON document as `format_version`.
inline constexpr int kJsonFormatVersion = 1;

/// Facts ordered by level, then by fact key.
std::vector<Fact> facts_by_level(const ChaseState& chase);

// JSON documents are canonical: object keys sorted, facts ordered by
// (level, fact key), two-space indentation, trailing newline.

std::string chase_to_json(const ChaseState& chase, bool include_trace = false);
std::string chase_to_text(const ChaseState& chase, bool include_trace = false);
/// Derivation forest: one node per fact, ID-rule edges from parent to child,
/// one rank per level with a level label.
std::string chase_to_dot(const ChaseState& chase);

std::string validation_to_json(const CdValidation& v);
std::string validation_to_text(const CdValidation& v);

std::string answers_to_json(const ConjunctiveQuery& q, const CertainAnswers& a);
std::string answers_to_text(const ConjunctiveQuery& q, const CertainAnswers& a);

std::string containment_to_json(const ContainmentResult& r);
std::string containment_to_text(const ContainmentResult& r);

std::string refutation_to_json(const RefutationVerdict& v);
std::string refutation_to_text(const RefutationVerdict& v);

}  // namespace cdchase
