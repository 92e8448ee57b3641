#include "softqos/refinement.hpp"

#include <algorithm>

namespace softqos {

namespace {

// Enumerates tuples over `vars` (space order, last fastest) and fills margins
// from lhs/rhs evaluations; `holds` fails on the first lhs > rhs tuple.
// `lhs_is_impl` says which side the margin's implementation column reads.
RefinementReport compare_pointwise(const SpacePtr& space, const Constraint& lhs, const Constraint& rhs,
                                   std::vector<int> vars, bool lhs_is_impl) {
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());

    std::vector<std::size_t> strides(vars.size(), 1);
    std::size_t total = 1;
    for (std::size_t i = vars.size(); i-- > 0;) {
        strides[i] = total;
        total *= space->variable(vars[i]).domain.size();
    }

    RefinementReport report;
    report.holds = true;
    for (std::size_t idx = 0; idx < total; ++idx) {
        Assignment eta;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            const auto& var = space->variable(vars[i]);
            eta.bind(var.name, var.domain[(idx / strides[i]) % var.domain.size()]);
        }
        SemiringValue lv = lhs.eval(eta);
        SemiringValue rv = rhs.eval(eta);
        if (!leq(lv, rv) && report.holds) {
            report.holds = false;
            report.witness = eta;
        }
        if (lhs_is_impl)
            report.margins.push_back(Margin{std::move(eta), std::move(lv), std::move(rv)});
        else
            report.margins.push_back(Margin{std::move(eta), std::move(rv), std::move(lv)});
    }
    return report;
}

} // namespace

RefinementReport locally_refines(const RefinementQuery& q) {
    const SpacePtr& space = q.requirement.space();
    for (const auto& c : q.implementation)
        if (!same_space(c.space(), space)) throw Error("refinement constraints come from different spaces");

    std::vector<int> vars;
    for (const auto& name : q.interface) vars.push_back(space->index_of(name));

    Constraint implProj = project(combine_all(space, q.implementation), q.interface);
    Constraint reqProj = project(q.requirement, q.interface);
    return compare_pointwise(space, implProj, reqProj, std::move(vars), true);
}

RefinementReport reliability_margin(const std::vector<Constraint>& impl, const Constraint& requirement) {
    const SpacePtr& space = requirement.space();
    SemiringKind kind = space->spec()->kind();
    if (kind != SemiringKind::Probabilistic && kind != SemiringKind::Fuzzy)
        throw Error("reliability checks need a probabilistic or fuzzy semiring");
    for (const auto& c : impl)
        if (!same_space(c.space(), space)) throw Error("refinement constraints come from different spaces");

    Constraint composed = combine_all(space, impl);
    std::vector<int> vars = composed.support();
    vars.insert(vars.end(), requirement.support().begin(), requirement.support().end());

    RefinementReport report = compare_pointwise(space, requirement, composed, std::move(vars), false);
    report.impl_blevel = blevel_of(composed);
    return report;
}

} // namespace softqos
