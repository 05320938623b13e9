#include "cdchase/model.hpp"

#include <algorithm>
#include <cctype>

namespace cdchase {

namespace {

std::string join_positions(const std::vector<std::size_t>& positions) {
    std::string out;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(positions[i]);
    }
    return out;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

void check_positions(const std::vector<std::size_t>& positions, std::size_t arity,
                     const std::string& pred, const std::string& what) {
    if (positions.empty()) throw ModelError(what + " on " + pred + ": empty attribute list");
    std::vector<bool> seen(arity + 1, false);
    for (std::size_t p : positions) {
        if (p < 1 || p > arity)
            throw ModelError(what + " on " + pred + ": position " + std::to_string(p) +
                             " out of range 1.." + std::to_string(arity));
        if (seen[p])
            throw ModelError(what + " on " + pred + ": repeated position " + std::to_string(p));
        seen[p] = true;
    }
}

}  // namespace

// --- Constant ---------------------------------------------------------------

Constant Constant::domain(std::string name) {
    Constant c;
    c.kind_ = Kind::Domain;
    c.name_ = std::move(name);
    return c;
}

Constant Constant::fresh(std::uint64_t index) {
    if (index == 0) throw ModelError("fresh constant indices start at 1");
    Constant c;
    c.kind_ = Kind::Fresh;
    c.index_ = index;
    return c;
}

std::string Constant::to_string() const {
    return is_domain() ? name_ : "_f" + std::to_string(index_);
}

std::strong_ordering operator<=>(const Constant& a, const Constant& b) noexcept {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    if (a.is_fresh()) return a.index_ <=> b.index_;
    // std::string compares via char_traits<char>::compare, which is
    // unsigned byte-wise.
    int c = a.name_.compare(b.name_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::strong_ordering compare_constants(const Constant& a, const Constant& b) noexcept {
    return a <=> b;
}

bool is_reserved_constant_name(std::string_view name) noexcept {
    if (name.starts_with("_frz")) return all_digits(name.substr(4));
    if (name.starts_with("_f")) return all_digits(name.substr(2));
    return false;
}

// --- Schema -----------------------------------------------------------------

Schema::Schema(std::vector<Predicate> predicates) {
    for (auto& p : predicates) add(std::move(p));
}

void Schema::add(Predicate p) {
    if (p.name.empty()) throw ModelError("predicate name must not be empty");
    if (p.arity == 0) throw ModelError("predicate " + p.name + " must have arity >= 1");
    if (by_name_.contains(p.name)) throw ModelError("duplicate predicate " + p.name);
    auto name = p.name;
    by_name_.emplace(std::move(name), std::move(p));
}

bool Schema::contains(std::string_view name) const { return by_name_.find(name) != by_name_.end(); }

const Predicate& Schema::at(std::string_view name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw ModelError("unknown predicate " + std::string(name));
    return it->second;
}

std::optional<std::size_t> Schema::arity(std::string_view name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second.arity;
}

std::vector<Predicate> Schema::predicates() const {
    std::vector<Predicate> out;
    out.reserve(by_name_.size());
    for (const auto& [_, p] : by_name_) out.push_back(p);
    return out;
}

// --- Fact -------------------------------------------------------------------

std::string Fact::to_string() const {
    std::string out = predicate + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ',';
        out += args[i].to_string();
    }
    return out + ")";
}

std::strong_ordering operator<=>(const FactKey& a, const FactKey& b) {
    if (auto c = a.predicate.compare(b.predicate); c != 0)
        return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(),
                                                  b.args.end());
}

FactKey fact_sort_key(const Fact& f) { return FactKey{f.predicate, f.args}; }

// --- Dependencies -----------------------------------------------------------

std::string dependency_sort_key(const InclusionDependency& d) {
    return "ID:" + d.lhs + "[" + join_positions(d.lhs_attrs) + "]<=" + d.rhs + "[" +
           join_positions(d.rhs_attrs) + "]";
}

std::string dependency_sort_key(const KeyDependency& d) {
    auto sorted = d.key_attrs;
    std::sort(sorted.begin(), sorted.end());
    return "KD:" + d.pred + "{" + join_positions(sorted) + "}";
}

std::string dependency_sort_key(const Dependency& d) {
    return std::visit([](const auto& x) { return dependency_sort_key(x); }, d);
}

std::string to_string(const InclusionDependency& d) {
    return "inclusion " + d.lhs + "[" + join_positions(d.lhs_attrs) + "] <= " + d.rhs + "[" +
           join_positions(d.rhs_attrs) + "]";
}

std::string to_string(const KeyDependency& d) {
    return "key " + d.pred + " {" + join_positions(d.key_attrs) + "}";
}

void check_well_formed(const InclusionDependency& d, const Schema& schema) {
    auto la = schema.arity(d.lhs);
    auto ra = schema.arity(d.rhs);
    if (!la) throw ModelError("inclusion dependency uses unknown predicate " + d.lhs);
    if (!ra) throw ModelError("inclusion dependency uses unknown predicate " + d.rhs);
    if (d.lhs_attrs.size() != d.rhs_attrs.size())
        throw ModelError("inclusion dependency " + to_string(d) + ": attribute lists differ in length");
    check_positions(d.lhs_attrs, *la, d.lhs, "inclusion dependency");
    check_positions(d.rhs_attrs, *ra, d.rhs, "inclusion dependency");
}

void check_well_formed(const KeyDependency& d, const Schema& schema) {
    auto a = schema.arity(d.pred);
    if (!a) throw ModelError("key dependency uses unknown predicate " + d.pred);
    if (*a < 2) throw ModelError("key dependency on " + d.pred + " requires arity >= 2");
    check_positions(d.key_attrs, *a, d.pred, "key dependency");
}

void DependencySet::add(InclusionDependency id) {
    if (std::find(ids_.begin(), ids_.end(), id) != ids_.end()) return;
    ids_.push_back(std::move(id));
}

void DependencySet::add(KeyDependency kd) {
    if (key_of(kd.pred)) throw ModelError("predicate " + kd.pred + " already has a key");
    std::sort(kd.key_attrs.begin(), kd.key_attrs.end());
    kds_.push_back(std::move(kd));
}

const KeyDependency* DependencySet::key_of(std::string_view pred) const {
    for (const auto& kd : kds_)
        if (kd.pred == pred) return &kd;
    return nullptr;
}

void DependencySet::check_well_formed(const Schema& schema) const {
    for (const auto& id : ids_) cdchase::check_well_formed(id, schema);
    for (const auto& kd : kds_) cdchase::check_well_formed(kd, schema);
}

std::vector<InclusionDependency> DependencySet::sorted_ids() const {
    auto out = ids_;
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return dependency_sort_key(a) < dependency_sort_key(b);
    });
    return out;
}

std::vector<KeyDependency> DependencySet::sorted_kds() const {
    auto out = kds_;
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return dependency_sort_key(a) < dependency_sort_key(b);
    });
    return out;
}

// --- Database ---------------------------------------------------------------

bool Database::insert(const Schema& schema, std::string predicate, Tuple args) {
    auto arity = schema.arity(predicate);
    if (!arity) throw ModelError("fact over unknown predicate " + predicate);
    if (args.size() != *arity)
        throw ModelError("fact " + predicate + " has " + std::to_string(args.size()) +
                         " arguments, expected " + std::to_string(*arity));
    for (const auto& c : args)
        if (c.is_fresh()) throw ModelError("database facts may not contain fresh constants");
    return facts_.insert(FactKey{std::move(predicate), std::move(args)}).second;
}

std::vector<Fact> Database::facts() const {
    std::vector<Fact> out;
    out.reserve(facts_.size());
    for (const auto& k : facts_) out.push_back(Fact{k.predicate, k.args, 0});
    return out;
}

}  // namespace cdchase
