#include "softqos/solver.hpp"

#include <algorithm>

namespace softqos {

SolutionReport solve(const Scsp& p) {
    for (const auto& c : p.constraints)
        if (!same_space(c.space(), p.space)) throw Error("SCSP constraint from a different space");

    Constraint solution = project(combine_all(p.space, p.constraints), p.con);
    SemiringValue level = blevel_of(solution);

    // Enumerate all tuples over the full con set (solution support may be a
    // subset when some con variable is unconstrained).
    std::vector<int> conIdx;
    for (const auto& name : p.con) conIdx.push_back(p.space->index_of(name));
    std::sort(conIdx.begin(), conIdx.end());
    conIdx.erase(std::unique(conIdx.begin(), conIdx.end()), conIdx.end());

    std::vector<std::size_t> strides(conIdx.size(), 1);
    std::size_t total = 1;
    for (std::size_t i = conIdx.size(); i-- > 0;) {
        strides[i] = total;
        total *= p.space->variable(conIdx[i]).domain.size();
    }

    std::vector<Assignment> tuples;
    std::vector<SemiringValue> values;
    for (std::size_t idx = 0; idx < total; ++idx) {
        Assignment eta;
        for (std::size_t i = 0; i < conIdx.size(); ++i) {
            const auto& var = p.space->variable(conIdx[i]);
            eta.bind(var.name, var.domain[(idx / strides[i]) % var.domain.size()]);
        }
        values.push_back(solution.eval(eta));
        tuples.push_back(std::move(eta));
    }

    std::vector<Assignment> best;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < tuples.size() && !dominated; ++j)
            if (j != i && lt(values[i], values[j])) dominated = true;
        if (!dominated) best.push_back(tuples[i]);
    }

    return SolutionReport{std::move(solution), std::move(level), std::move(best)};
}

bool alpha_consistent(const Scsp& p, const SemiringValue& alpha) {
    if (!same_spec(alpha.spec(), p.space->spec()))
        throw Error("alpha has spec " + alpha.spec()->to_string() + "; problem uses " +
                    p.space->spec()->to_string());
    return equal(solve(p).blevel, alpha);
}

bool consistent(const Scsp& p) { return lt(zero(p.space->spec()), solve(p).blevel); }

} // namespace softqos
