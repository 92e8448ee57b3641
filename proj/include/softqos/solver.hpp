#pragma once

#include "softqos/constraint.hpp"

namespace softqos {

/// A soft constraint satisfaction problem: constraints plus the variables of
/// interest the solution is projected onto.
struct Scsp {
    SpacePtr space;
    std::vector<Constraint> constraints;
    std::vector<std::string> con; // variables of interest
};

struct SolutionReport {
    Constraint solution;   // (combine-fold C) projected onto con
    SemiringValue blevel;  // solution projected to the empty set
    /// Assignments over con whose solution value is order-maximal (the full
    /// non-dominated set under partial orders), in lexicographic tuple order.
    std::vector<Assignment> best;
};

SolutionReport solve(const Scsp& p);
/// blevel(p) equals alpha.
bool alpha_consistent(const Scsp& p, const SemiringValue& alpha);
/// blevel(p) is strictly above the semiring zero.
bool consistent(const Scsp& p);

} // namespace softqos
