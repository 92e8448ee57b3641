#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace softqos {

/// Error type shared by the whole library. Messages are meant for humans;
/// callers that need to distinguish failures should test preconditions first.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SemiringKind { Weighted, Fuzzy, Probabilistic, Classical, SetBased, Product };

class SemiringSpec;
using SpecPtr = std::shared_ptr<const SemiringSpec>;

/// Descriptor of one absorptive-semiring instance. Immutable; values keep a
/// pointer to the spec that produced them and operations reject mixed specs.
class SemiringSpec {
public:
    static SpecPtr weighted();
    static SpecPtr fuzzy();
    static SpecPtr probabilistic();
    static SpecPtr classical();
    /// Universe symbols are stored sorted lexicographically; duplicates and
    /// empty universes are rejected.
    static SpecPtr set_based(std::vector<std::string> universe);
    /// Cartesian product of two or more component semirings (componentwise
    /// operations, componentwise partial order).
    static SpecPtr product(std::vector<SpecPtr> components);

    SemiringKind kind() const { return kind_; }
    const std::vector<std::string>& universe() const { return universe_; }
    const std::vector<SpecPtr>& components() const { return components_; }

    bool operator==(const SemiringSpec& other) const;
    bool operator!=(const SemiringSpec& other) const { return !(*this == other); }

    /// Literal syntax: `weighted`, `fuzzy`, `probabilistic`, `classical`,
    /// `set{p,q,r}`, `product(weighted, fuzzy)`.
    std::string to_string() const;

private:
    SemiringSpec(SemiringKind kind, std::vector<std::string> universe, std::vector<SpecPtr> components)
        : kind_(kind), universe_(std::move(universe)), components_(std::move(components)) {}

    SemiringKind kind_;
    std::vector<std::string> universe_;
    std::vector<SpecPtr> components_;
};

bool same_spec(const SpecPtr& a, const SpecPtr& b);

/// One element of a semiring instance. Payload by kind:
///   weighted        non-negative real or infinity
///   fuzzy, prob.    real in [0,1]
///   classical       boolean
///   set-based       subset of the universe (bitmask over sorted symbols)
///   product         tuple of component values
class SemiringValue {
public:
    static SemiringValue number(SpecPtr spec, double v);
    static SemiringValue boolean(SpecPtr spec, bool v);
    static SemiringValue symbols(SpecPtr spec, const std::vector<std::string>& syms);
    static SemiringValue tuple(SpecPtr spec, std::vector<SemiringValue> parts);

    const SpecPtr& spec() const { return spec_; }
    SemiringKind kind() const;

    double num() const;
    bool truth() const;
    const std::vector<bool>& mask() const;
    std::vector<std::string> symbol_list() const;
    const std::vector<SemiringValue>& parts() const;

    /// Round-trippable literal: `3`, `inf`, `0.5`, `true`, `{p,q}`, `(3, 0.5)`.
    std::string to_literal() const;
    /// Report rendering; same as the literal except probabilistic values are
    /// printed with six decimals.
    std::string display() const;

private:
    SemiringValue(SpecPtr spec, std::variant<double, bool, std::vector<bool>, std::vector<SemiringValue>> payload)
        : spec_(std::move(spec)), payload_(std::move(payload)) {}

    SpecPtr spec_;
    std::variant<double, bool, std::vector<bool>, std::vector<SemiringValue>> payload_;
};

/// Bottom (worst) and top (best) elements of the instance.
SemiringValue zero(const SpecPtr& spec);
SemiringValue one(const SpecPtr& spec);

/// Additive operation; equals the least upper bound in the induced order.
SemiringValue plus(const SemiringValue& a, const SemiringValue& b);
/// Multiplicative (combination) operation.
SemiringValue times(const SemiringValue& a, const SemiringValue& b);
/// Division by residuation: the order-maximum x with times(b, x) <= a.
SemiringValue residual(const SemiringValue& a, const SemiringValue& b);

/// Equality; probabilistic payloads compare with absolute tolerance 1e-9.
bool equal(const SemiringValue& a, const SemiringValue& b);
/// Induced order: a <= b iff plus(a, b) == b ("b is better than a").
bool leq(const SemiringValue& a, const SemiringValue& b);
/// Strict order: leq and not equal.
bool lt(const SemiringValue& a, const SemiringValue& b);

SpecPtr parse_spec_literal(std::string_view text);
SemiringValue parse_value_literal(const SpecPtr& spec, std::string_view text);

/// Tolerance used when comparing probabilistic payloads.
inline constexpr double kProbTolerance = 1e-9;

} // namespace softqos
