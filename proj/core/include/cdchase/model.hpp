#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cdchase {

/// Thrown when a value violates a structural invariant of the model
/// (bad arity, out-of-range attribute position, duplicate key, ...).
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

/// A database constant or a labeled null created by the chase.
///
/// All domain constants precede all fresh constants. Domain constants compare
/// byte-wise by name, fresh constants by creation index.
class Constant {
public:
    enum class Kind : std::uint8_t { Domain = 0, Fresh = 1 };

    static Constant domain(std::string name);
    static Constant fresh(std::uint64_t index);

    Kind kind() const noexcept { return kind_; }
    bool is_domain() const noexcept { return kind_ == Kind::Domain; }
    bool is_fresh() const noexcept { return kind_ == Kind::Fresh; }

    /// Name of a domain constant; empty for fresh constants.
    const std::string& name() const noexcept { return name_; }
    /// Creation index of a fresh constant; 0 for domain constants.
    std::uint64_t index() const noexcept { return index_; }

    /// External rendering: the name, or `_f<k>` for fresh constants.
    std::string to_string() const;

    friend std::strong_ordering operator<=>(const Constant& a, const Constant& b) noexcept;
    friend bool operator==(const Constant& a, const Constant& b) noexcept = default;

private:
    Constant() = default;

    Kind kind_ = Kind::Domain;
    std::string name_;
    std::uint64_t index_ = 0;
};

std::strong_ordering compare_constants(const Constant& a, const Constant& b) noexcept;

/// True for names reserved for engine-generated symbols (`_f<k>`, `_frz<k>`).
bool is_reserved_constant_name(std::string_view name) noexcept;

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

struct Predicate {
    std::string name;
    std::size_t arity = 0;

    friend bool operator==(const Predicate&, const Predicate&) = default;
};

class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<Predicate> predicates);

    /// Adds a predicate; throws ModelError on duplicate names or arity 0.
    void add(Predicate p);

    bool contains(std::string_view name) const;
    const Predicate& at(std::string_view name) const;
    std::optional<std::size_t> arity(std::string_view name) const;

    /// Predicates in byte-wise name order.
    std::vector<Predicate> predicates() const;
    std::size_t size() const noexcept { return by_name_.size(); }

    friend bool operator==(const Schema&, const Schema&) = default;

private:
    std::map<std::string, Predicate, std::less<>> by_name_;
};

// ---------------------------------------------------------------------------
// Facts
// ---------------------------------------------------------------------------

using Tuple = std::vector<Constant>;

struct Fact {
    std::string predicate;
    Tuple args;
    std::uint32_t level = 0;

    std::string to_string() const;
    /// Compares predicate, arguments and level.
    friend bool operator==(const Fact&, const Fact&) = default;
};

/// Sortable identity of a fact: predicate name, then arguments element-wise.
/// The level does not take part.
struct FactKey {
    std::string predicate;
    Tuple args;

    friend std::strong_ordering operator<=>(const FactKey& a, const FactKey& b);
    friend bool operator==(const FactKey&, const FactKey&) = default;
};

FactKey fact_sort_key(const Fact& f);

// ---------------------------------------------------------------------------
// Dependencies
// ---------------------------------------------------------------------------

/// `lhs[lhs_attrs] <= rhs[rhs_attrs]`, 1-based positions.
struct InclusionDependency {
    std::string lhs;
    std::vector<std::size_t> lhs_attrs;
    std::string rhs;
    std::vector<std::size_t> rhs_attrs;

    friend bool operator==(const InclusionDependency&, const InclusionDependency&) = default;
};

/// `key(pred) = key_attrs`, 1-based positions, stored sorted.
struct KeyDependency {
    std::string pred;
    std::vector<std::size_t> key_attrs;

    friend bool operator==(const KeyDependency&, const KeyDependency&) = default;
};

using Dependency = std::variant<InclusionDependency, KeyDependency>;

/// Encodings used for ordering dependencies:
///   `ID:lhs[1,2]<=rhs[2,1]` and `KD:pred{1,3}`; compared byte-wise.
std::string dependency_sort_key(const InclusionDependency& d);
std::string dependency_sort_key(const KeyDependency& d);
std::string dependency_sort_key(const Dependency& d);

/// Human-readable rendering in the dependency-file syntax.
std::string to_string(const InclusionDependency& d);
std::string to_string(const KeyDependency& d);

/// Checks positions against the schema; throws ModelError on violations.
void check_well_formed(const InclusionDependency& d, const Schema& schema);
void check_well_formed(const KeyDependency& d, const Schema& schema);

class DependencySet {
public:
    DependencySet() = default;

    /// Adds an ID. Duplicates are ignored.
    void add(InclusionDependency id);
    /// Adds a KD (positions are normalized to sorted order). Throws ModelError
    /// when the predicate already has a key.
    void add(KeyDependency kd);

    const std::vector<InclusionDependency>& ids() const noexcept { return ids_; }
    const std::vector<KeyDependency>& kds() const noexcept { return kds_; }
    std::size_t size() const noexcept { return ids_.size() + kds_.size(); }

    const KeyDependency* key_of(std::string_view pred) const;

    /// Validates every dependency against the schema.
    void check_well_formed(const Schema& schema) const;

    /// IDs sorted by dependency_sort_key.
    std::vector<InclusionDependency> sorted_ids() const;
    std::vector<KeyDependency> sorted_kds() const;

    friend bool operator==(const DependencySet&, const DependencySet&) = default;

private:
    std::vector<InclusionDependency> ids_;
    std::vector<KeyDependency> kds_;
};

// ---------------------------------------------------------------------------
// Database
// ---------------------------------------------------------------------------

/// A finite, duplicate-free set of level-0 facts over domain constants.
class Database {
public:
    Database() = default;

    /// Inserts a fact, enforcing arity and the absence of fresh constants.
    /// Returns false when the fact was already present.
    bool insert(const Schema& schema, std::string predicate, Tuple args);

    /// Facts in fact_sort_key order.
    std::vector<Fact> facts() const;
    std::size_t size() const noexcept { return facts_.size(); }
    bool empty() const noexcept { return facts_.empty(); }
    bool contains(const FactKey& key) const { return facts_.contains(key); }

    friend bool operator==(const Database&, const Database&) = default;

private:
    std::set<FactKey> facts_;
};

}  // namespace cdchase
