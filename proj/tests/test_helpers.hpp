#pragma once

#include "softqos/ast.hpp"
#include "softqos/constraint.hpp"
#include "softqos/semiring.hpp"

#include <map>
#include <random>
#include <string>
#include <vector>

// Shared grids, random generators and independent oracles. Oracles here are
// deliberately written from the definitions, not by calling the operators
// they are used to check.
namespace testutil {

using namespace softqos;

inline std::vector<SpecPtr> all_specs() {
    return {
        SemiringSpec::weighted(),
        SemiringSpec::fuzzy(),
        SemiringSpec::probabilistic(),
        SemiringSpec::classical(),
        SemiringSpec::set_based({"p", "q", "r"}),
        SemiringSpec::product({SemiringSpec::weighted(), SemiringSpec::fuzzy()}),
    };
}

// Sampling grids: weighted integers 0..20 plus infinity; fuzzy and
// probabilistic multiples of 0.05; classical both values; set-based all
// subsets of the 3-symbol universe; products combine coarser sub-grids.
inline std::vector<SemiringValue> grid_values(const SpecPtr& spec) {
    std::vector<SemiringValue> out;
    switch (spec->kind()) {
    case SemiringKind::Weighted: {
        for (int i = 0; i <= 20; ++i) out.push_back(SemiringValue::number(spec, i));
        out.push_back(zero(spec)); // infinity
        return out;
    }
    case SemiringKind::Fuzzy:
    case SemiringKind::Probabilistic: {
        for (int i = 0; i <= 20; ++i) out.push_back(SemiringValue::number(spec, i * 0.05));
        return out;
    }
    case SemiringKind::Classical:
        return {SemiringValue::boolean(spec, false), SemiringValue::boolean(spec, true)};
    case SemiringKind::SetBased: {
        const auto& uni = spec->universe();
        for (std::size_t mask = 0; mask < (std::size_t{1} << uni.size()); ++mask) {
            std::vector<std::string> syms;
            for (std::size_t i = 0; i < uni.size(); ++i)
                if (mask & (std::size_t{1} << i)) syms.push_back(uni[i]);
            out.push_back(SemiringValue::symbols(spec, syms));
        }
        return out;
    }
    case SemiringKind::Product: {
        std::vector<std::vector<SemiringValue>> subs;
        for (const auto& comp : spec->components()) {
            auto g = grid_values(comp);
            // thin out the component grids so pair enumeration stays small
            std::vector<SemiringValue> kept;
            for (std::size_t i = 0; i < g.size(); i += (g.size() > 8 ? 4 : 1)) kept.push_back(g[i]);
            kept.push_back(zero(comp));
            kept.push_back(one(comp));
            subs.push_back(std::move(kept));
        }
        std::vector<std::vector<SemiringValue>> tuples = {{}};
        for (const auto& sub : subs) {
            std::vector<std::vector<SemiringValue>> next;
            for (const auto& t : tuples)
                for (const auto& v : sub) {
                    auto copy = t;
                    copy.push_back(v);
                    next.push_back(std::move(copy));
                }
            tuples = std::move(next);
        }
        for (auto& t : tuples) out.push_back(SemiringValue::tuple(spec, std::move(t)));
        return out;
    }
    }
    return out;
}

/// Candidate x values for the residuation oracle; probabilistic uses the
/// finer 0.01 step so quotients are bracketed tightly.
inline std::vector<SemiringValue> residual_candidates(const SpecPtr& spec) {
    if (spec->kind() == SemiringKind::Probabilistic) {
        std::vector<SemiringValue> out;
        for (int i = 0; i <= 100; ++i) out.push_back(SemiringValue::number(spec, i * 0.01));
        return out;
    }
    return grid_values(spec);
}

inline SemiringValue random_value(const SpecPtr& spec, std::mt19937& rng) {
    auto grid = grid_values(spec);
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    return grid[pick(rng)];
}

/// Small integer-domain space: variables v0..v{n-1} with domains {0..d-1}.
inline SpacePtr small_space(const SpecPtr& spec, int nvars, int domsize) {
    std::vector<VariableDecl> vars;
    for (int i = 0; i < nvars; ++i) {
        std::vector<DomainValue> dom;
        for (int d = 0; d < domsize; ++d) dom.push_back(static_cast<std::int64_t>(d));
        vars.push_back(VariableDecl{"v" + std::to_string(i), std::move(dom), false});
    }
    return ConstraintSpace::create(spec, std::move(vars));
}

inline Constraint random_constraint(const SpacePtr& space, std::mt19937& rng, int max_support = 3) {
    std::uniform_int_distribution<int> supportSize(0, std::min<int>(max_support, static_cast<int>(space->variable_count())));
    int k = supportSize(rng);
    std::vector<int> all(space->variable_count());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<std::string> support;
    for (int i = 0; i < k; ++i) support.push_back(space->variable(all[i]).name);
    return Constraint::build(space, support, [&](const std::vector<DomainValue>&) {
        return random_value(space->spec(), rng);
    });
}

/// Independent oracle: evaluates the times-fold of `cs` on a full assignment
/// without going through combine().
inline SemiringValue eval_fold(const std::vector<Constraint>& cs, const SpacePtr& space,
                               const Assignment& eta) {
    SemiringValue acc = one(space->spec());
    for (const auto& c : cs) acc = times(acc, c.eval(eta));
    return acc;
}

/// Enumerates every full assignment over all space variables.
inline std::vector<Assignment> all_assignments(const SpacePtr& space) {
    std::vector<Assignment> out;
    std::size_t total = 1;
    for (const auto& v : space->variables()) total *= v.domain.size();
    std::vector<std::size_t> strides(space->variable_count(), 1);
    std::size_t acc = 1;
    for (std::size_t i = space->variable_count(); i-- > 0;) {
        strides[i] = acc;
        acc *= space->variable(static_cast<int>(i)).domain.size();
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
        Assignment eta;
        for (std::size_t i = 0; i < space->variable_count(); ++i) {
            const auto& var = space->variable(static_cast<int>(i));
            eta.bind(var.name, var.domain[(idx / strides[i]) % var.domain.size()]);
        }
        out.push_back(std::move(eta));
    }
    return out;
}

struct BruteSolution {
    SemiringValue blevel;
    std::map<std::string, SemiringValue> solution; // con-assignment text -> value
    std::vector<std::string> best;                 // con-assignment texts, lexicographic
};

/// Full-enumeration SCSP oracle: groups the times-fold over full assignments
/// by their con projection, plus-folding each group, then takes the
/// non-dominated set.
inline BruteSolution brute_solve(const SpacePtr& space, const std::vector<Constraint>& cs,
                                 const std::vector<std::string>& con) {
    std::map<std::string, SemiringValue> groups;
    std::optional<SemiringValue> level;
    for (const auto& eta : all_assignments(space)) {
        SemiringValue v = eval_fold(cs, space, eta);
        Assignment proj;
        for (const auto& name : con) proj.bind(name, *eta.get(name));
        std::string key = proj.to_string();
        auto it = groups.find(key);
        if (it == groups.end())
            groups.emplace(key, v);
        else
            it->second = plus(it->second, v);
        level = level ? plus(*level, v) : v;
    }
    BruteSolution out{*level, groups, {}};
    for (const auto& [key, v] : groups) {
        bool dominated = false;
        for (const auto& [k2, v2] : groups)
            if (k2 != key && lt(v, v2)) dominated = true;
        if (!dominated) out.best.push_back(key);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random agent generator for round-trip properties.

struct AgentGenConfig {
    std::vector<std::string> constraint_names = {"c1", "c2", "c3"};
    std::vector<std::string> variables = {"x", "y", "z"};
    std::vector<std::string> procedures = {"p", "q"};
};

inline Threshold random_threshold(const SpecPtr& spec, std::mt19937& rng, const AgentGenConfig& cfg,
                                  bool lower) {
    std::uniform_int_distribution<int> pick(0, 3);
    switch (pick(rng)) {
    case 0: return lower ? Threshold(zero(spec)) : Threshold(one(spec));
    case 1: {
        std::uniform_int_distribution<std::size_t> n(0, cfg.constraint_names.size() - 1);
        return Threshold(ConstraintRef::named(cfg.constraint_names[n(rng)]));
    }
    default: return Threshold(random_value(spec, rng));
    }
}

inline Arrow random_arrow(const SpecPtr& spec, std::mt19937& rng, const AgentGenConfig& cfg) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Arrow a{random_threshold(spec, rng, cfg, true), random_threshold(spec, rng, cfg, false)};
        if (std::holds_alternative<SemiringValue>(a.lower) && std::holds_alternative<SemiringValue>(a.upper)) {
            if (lt(std::get<SemiringValue>(a.upper), std::get<SemiringValue>(a.lower))) continue;
        }
        return a;
    }
    return Arrow{Threshold(zero(spec)), Threshold(one(spec))};
}

inline AgentPtr random_agent(const SpecPtr& spec, std::mt19937& rng, const AgentGenConfig& cfg,
                             int depth) {
    std::uniform_int_distribution<int> kindPick(0, depth <= 0 ? 1 : 9);
    auto name = [&](const std::vector<std::string>& pool) {
        std::uniform_int_distribution<std::size_t> n(0, pool.size() - 1);
        return pool[n(rng)];
    };
    auto guard = [&]() {
        ConstraintRef ref = ConstraintRef::named(name(cfg.constraint_names));
        Arrow arrow = random_arrow(spec, rng, cfg);
        AgentPtr cont = random_agent(spec, rng, cfg, depth - 1);
        return std::uniform_int_distribution<int>(0, 1)(rng)
                   ? Agent::ask(std::move(ref), std::move(arrow), std::move(cont))
                   : Agent::nask(std::move(ref), std::move(arrow), std::move(cont));
    };

    switch (kindPick(rng)) {
    case 0:
    case 1: return Agent::success();
    case 2:
        return Agent::tell(ConstraintRef::named(name(cfg.constraint_names)), random_arrow(spec, rng, cfg),
                           random_agent(spec, rng, cfg, depth - 1));
    case 3:
        return Agent::retract(ConstraintRef::named(name(cfg.constraint_names)), random_arrow(spec, rng, cfg),
                              random_agent(spec, rng, cfg, depth - 1));
    case 4: {
        std::vector<std::string> vars = {name(cfg.variables)};
        return Agent::update(std::move(vars), ConstraintRef::named(name(cfg.constraint_names)),
                             random_arrow(spec, rng, cfg), random_agent(spec, rng, cfg, depth - 1));
    }
    case 5: return guard();
    case 6: {
        std::uniform_int_distribution<int> n(2, 3);
        std::vector<AgentPtr> guards;
        int count = n(rng);
        for (int i = 0; i < count; ++i) guards.push_back(guard());
        return Agent::sum(std::move(guards));
    }
    case 7:
        return Agent::parallel(random_agent(spec, rng, cfg, depth - 1),
                               random_agent(spec, rng, cfg, depth - 1));
    case 8: return Agent::exists(name(cfg.variables), random_agent(spec, rng, cfg, depth - 1));
    default: {
        std::uniform_int_distribution<int> arity(0, 2);
        std::vector<std::string> actuals;
        int count = arity(rng);
        for (int i = 0; i < count; ++i) actuals.push_back(name(cfg.variables));
        return Agent::call(name(cfg.procedures), std::move(actuals));
    }
    }
}

} // namespace testutil
