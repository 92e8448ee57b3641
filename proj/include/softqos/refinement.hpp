#pragma once

#include "softqos/constraint.hpp"

#include <optional>

namespace softqos {

/// Does the composed implementation refine the requirement through the
/// interface variables? Holds iff project(combine S, V) is below
/// project(R, V) in the constraint order.
struct RefinementQuery {
    std::vector<Constraint> implementation;
    Constraint requirement;
    std::vector<std::string> interface;
};

struct Margin {
    Assignment tuple;
    SemiringValue impl_value;
    SemiringValue req_value;
};

struct RefinementReport {
    bool holds = false;
    /// First interface tuple violating the pointwise order; present iff
    /// holds is false.
    std::optional<Assignment> witness;
    /// Per-interface-tuple (implementation value, requirement value) pairs.
    std::vector<Margin> margins;
    /// Best level of the composed implementation; set by reliability checks.
    std::optional<SemiringValue> impl_blevel;
};

RefinementReport locally_refines(const RefinementQuery& q);

/// Quantitative orientation: the requirement must be below the composed
/// implementation (compared on the union of their supports), and the report
/// carries the implementation's best level.
RefinementReport reliability_margin(const std::vector<Constraint>& impl, const Constraint& requirement);

} // namespace softqos
