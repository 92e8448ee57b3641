#pragma once

#include "softqos/semiring.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace softqos {

/// A domain element: a small integer or a symbol.
using DomainValue = std::variant<std::int64_t, std::string>;

std::string domain_value_to_string(const DomainValue& v);
bool domain_value_equal(const DomainValue& a, const DomainValue& b);

struct VariableDecl {
    std::string name;
    std::vector<DomainValue> domain;
    bool fresh = false; // member of the fresh pool used by hiding / calls
};

class ConstraintSpace;
using SpacePtr = std::shared_ptr<const ConstraintSpace>;

/// Ordered finite variables with finite domains, plus the semiring the
/// constraints over them evaluate into.
class ConstraintSpace {
public:
    static SpacePtr create(SpecPtr spec, std::vector<VariableDecl> variables);

    const SpecPtr& spec() const { return spec_; }
    const std::vector<VariableDecl>& variables() const { return vars_; }
    std::size_t variable_count() const { return vars_.size(); }

    int index_of(const std::string& name) const; // throws on unknown name
    std::optional<int> find(const std::string& name) const;
    const VariableDecl& variable(int idx) const { return vars_[static_cast<std::size_t>(idx)]; }
    /// Position of `value` in variable idx's domain; throws if absent.
    std::size_t domain_index(int var, const DomainValue& value) const;

    /// Fresh-pool variable indices in declaration order.
    const std::vector<int>& fresh_pool() const { return fresh_pool_; }

    bool operator==(const ConstraintSpace& other) const;

private:
    ConstraintSpace() = default;

    SpecPtr spec_;
    std::vector<VariableDecl> vars_;
    std::map<std::string, int> by_name_;
    std::vector<int> fresh_pool_;
};

bool same_space(const SpacePtr& a, const SpacePtr& b);

/// A (partial) assignment of domain values to named variables.
class Assignment {
public:
    Assignment() = default;
    void bind(const std::string& name, DomainValue value);
    std::optional<DomainValue> get(const std::string& name) const;
    const std::map<std::string, DomainValue>& bindings() const { return bindings_; }
    std::string to_string() const; // "x=3, y=a" in name order

private:
    std::map<std::string, DomainValue> bindings_;
};

/// A soft constraint: a finite support within a space and a dense table of
/// semiring values, one entry per support tuple. Tables are indexed
/// mixed-radix over the support in space order, last variable fastest, so
/// tuple enumeration order is lexicographic and deterministic.
class Constraint {
public:
    Constraint(SpacePtr space, std::vector<int> support, std::vector<SemiringValue> table);

    /// Constant constraint with empty support.
    static Constraint constant(SpacePtr space, SemiringValue value);
    /// Diagonal (equality) constraint over two variables with equal domains:
    /// one on equal pairs, zero otherwise.
    static Constraint diagonal(SpacePtr space, const std::string& x, const std::string& y);
    /// Builds a table by calling `row` on every support tuple in order.
    static Constraint build(SpacePtr space, const std::vector<std::string>& support,
                            const std::function<SemiringValue(const std::vector<DomainValue>&)>& row);

    const SpacePtr& space() const { return space_; }
    const std::vector<int>& support() const { return support_; }
    std::vector<std::string> support_names() const;
    bool has_in_support(int var) const;

    std::size_t table_size() const { return table_.size(); }
    const SemiringValue& value_at(std::size_t idx) const { return table_[idx]; }
    std::vector<DomainValue> tuple_at(std::size_t idx) const;

    /// Evaluates on an assignment binding at least the support.
    SemiringValue eval(const Assignment& eta) const;

    /// Relabels support variables; `renames` maps old names to new names and
    /// is applied simultaneously. Targets must exist, have equal domains and
    /// not collide.
    Constraint rename(const std::map<std::string, std::string>& renames) const;

private:
    SpacePtr space_;
    std::vector<int> support_;
    std::vector<SemiringValue> table_;
};

/// Pointwise x over the union support.
Constraint combine(const Constraint& a, const Constraint& b);
/// Pointwise residual over the union support.
Constraint divide(const Constraint& a, const Constraint& b);
/// Folds combine over a list; the empty list yields the one-constant.
Constraint combine_all(const SpacePtr& space, const std::vector<Constraint>& cs);

/// Eliminates support variables outside `keep` by plus-folding their domain
/// extensions. Unknown names in `keep` are an error.
Constraint project(const Constraint& c, const std::vector<std::string>& keep);
/// Same as projecting onto all variables except x.
Constraint hide(const Constraint& c, const std::string& x);

/// The constraint order: pointwise leq over all tuples of the union support.
bool leq_constraint(const Constraint& a, const Constraint& b);
/// Strict order: leq and not pointwise-equal.
bool lt_constraint(const Constraint& a, const Constraint& b);
/// Same space, same support set, pointwise-equal tables.
bool equal_constraint(const Constraint& a, const Constraint& b);
/// Entailment: combine-fold of C is below c in the constraint order.
bool entails(const std::vector<Constraint>& cs, const Constraint& c);

/// Extracts the single value of an empty-support constraint.
SemiringValue scalar(const Constraint& c);
/// scalar(project(c, {})) — the constraint's best level.
SemiringValue blevel_of(const Constraint& c);

/// Renders the table ("(a,b) -> 7" per line) for reports.
std::string table_to_string(const Constraint& c);

} // namespace softqos
