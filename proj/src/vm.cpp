#include "softqos/vm.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace softqos {

const Constraint& VmEnv::named(const std::string& name) const {
    auto it = constraints->find(name);
    if (it == constraints->end()) throw Error("unknown constraint '" + name + "'");
    return it->second;
}

const ProcDecl& VmEnv::procedure(const std::string& name) const {
    if (procedures)
        for (const auto& d : *procedures)
            if (d.name == name) return d;
    throw Error("unknown procedure '" + name + "'");
}

Constraint resolve_ref(const ConstraintRef& ref, const VmEnv& env) {
    if (ref.kind == ConstraintRef::Kind::Diagonal)
        return Constraint::diagonal(env.space, ref.renamed(ref.var_a), ref.renamed(ref.var_b));
    const Constraint& base = env.named(ref.name);
    std::map<std::string, std::string> renames;
    for (const auto& name : base.support_names()) {
        std::string target = ref.renamed(name);
        if (target != name) renames[name] = target;
    }
    if (renames.empty()) return base;
    return base.rename(renames);
}

bool same_configuration(const Configuration& a, const Configuration& b) {
    return a.fresh_counter == b.fresh_counter && equal_constraint(a.store.current, b.store.current) &&
           same_agent(a.agent, b.agent);
}

// ---------------------------------------------------------------------------
// check

namespace {

[[noreturn]] void ill_formed(const Arrow& arrow, const std::string& why) {
    throw Error("ill-formed arrow " + arrow.to_string() + ": " + why);
}

} // namespace

bool check(const Store& store, const Arrow& arrow, const VmEnv& env) {
    const bool scalarLower = std::holds_alternative<SemiringValue>(arrow.lower);
    const bool scalarUpper = std::holds_alternative<SemiringValue>(arrow.upper);
    SemiringValue level = store.blevel();

    if (scalarLower && scalarUpper) {
        // C1: the store's best level lies in [lower, upper]
        const auto& lo = std::get<SemiringValue>(arrow.lower);
        const auto& up = std::get<SemiringValue>(arrow.upper);
        if (lt(up, lo)) ill_formed(arrow, "lower threshold is strictly better than the upper");
        return !lt(up, level) && !lt(level, lo);
    }
    if (scalarLower && !scalarUpper) {
        // C2: store not strictly above the upper constraint, level not below the lower value
        const auto& lo = std::get<SemiringValue>(arrow.lower);
        Constraint up = resolve_ref(std::get<ConstraintRef>(arrow.upper), env);
        if (lt(blevel_of(up), lo)) ill_formed(arrow, "lower threshold is strictly better than the upper");
        return !lt_constraint(up, store.current) && !lt(level, lo);
    }
    if (!scalarLower && scalarUpper) {
        // C3: level not above the upper value, store not strictly below the lower constraint
        Constraint lo = resolve_ref(std::get<ConstraintRef>(arrow.lower), env);
        const auto& up = std::get<SemiringValue>(arrow.upper);
        if (lt(up, blevel_of(lo))) ill_formed(arrow, "lower threshold is strictly better than the upper");
        return !lt(up, level) && !lt_constraint(store.current, lo);
    }
    // C4: both thresholds are constraints
    Constraint lo = resolve_ref(std::get<ConstraintRef>(arrow.lower), env);
    Constraint up = resolve_ref(std::get<ConstraintRef>(arrow.upper), env);
    if (lt_constraint(up, lo)) ill_formed(arrow, "lower threshold is strictly better than the upper");
    return !lt_constraint(up, store.current) && !lt_constraint(store.current, lo);
}

// ---------------------------------------------------------------------------
// enabled

namespace {

// Next pool variable whose name is absent from the store's support.
std::pair<std::string, int> allocate_fresh(const Configuration& conf, const VmEnv& env) {
    const auto& pool = env.space->fresh_pool();
    int counter = conf.fresh_counter;
    while (counter < static_cast<int>(pool.size())) {
        int var = pool[static_cast<std::size_t>(counter)];
        ++counter;
        if (!conf.store.current.has_in_support(var))
            return {env.space->variable(var).name, counter};
    }
    throw Error("fresh-variable pool exhausted (declare more with 'fresh')");
}

Arrow default_arrow(const SpecPtr& spec) { return Arrow{zero(spec), one(spec)}; }

std::string ref_text(const ConstraintRef& ref) { return "(" + ref.to_string() + ")"; }

} // namespace

AgentPtr expand_call(const ProcDecl& decl, const std::vector<std::string>& actuals, const VmEnv& env) {
    if (decl.formals.size() != actuals.size())
        throw Error("procedure '" + decl.name + "' takes " + std::to_string(decl.formals.size()) +
                    " arguments, called with " + std::to_string(actuals.size()));
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        int actual = env.space->index_of(actuals[i]);
        int formal = env.space->index_of(decl.formals[i]);
        if (env.space->variable(actual).domain != env.space->variable(formal).domain)
            throw Error("actual '" + actuals[i] + "' and formal '" + decl.formals[i] +
                        "' of '" + decl.name + "' have different domains");
    }

    // Each formal is renamed apart, then linked to its actual through a
    // hidden diagonal tell; the hiding step maps the primed name onto a real
    // pool variable before the tell ever reaches the store.
    AgentPtr body = decl.body;
    std::set<std::string> taken(actuals.begin(), actuals.end());
    for (const auto& f : decl.formals) taken.insert(f);
    std::vector<std::string> primed;
    for (const auto& f : decl.formals) {
        std::string p = f + "'";
        while (taken.count(p)) p += "'";
        taken.insert(p);
        primed.push_back(p);
        body = rename_agent(body, f, p);
    }
    for (std::size_t i = decl.formals.size(); i-- > 0;) {
        AgentPtr inner = Agent::tell(ConstraintRef::diagonal(primed[i], actuals[i]),
                                     default_arrow(env.space->spec()), body);
        body = Agent::exists(primed[i], inner);
    }
    return body;
}

std::vector<Step> enabled(const Configuration& conf, const VmEnv& env) {
    std::vector<Step> steps;
    const Agent& a = *conf.agent;

    switch (a.kind) {
    case Agent::Kind::Success:
        break;

    case Agent::Kind::Tell: {
        Constraint c = resolve_ref(a.cref, env);
        Store next{combine(conf.store.current, c)};
        if (check(next, a.arrow, env))
            steps.push_back({"R1 Tell", ref_text(a.cref), Configuration{a.cont, next, conf.fresh_counter}});
        break;
    }
    case Agent::Kind::Ask: {
        Constraint c = resolve_ref(a.cref, env);
        if (leq_constraint(conf.store.current, c) && check(conf.store, a.arrow, env))
            steps.push_back({"R2 Ask", ref_text(a.cref), Configuration{a.cont, conf.store, conf.fresh_counter}});
        break;
    }
    case Agent::Kind::Nask: {
        Constraint c = resolve_ref(a.cref, env);
        if (!leq_constraint(conf.store.current, c) && check(conf.store, a.arrow, env))
            steps.push_back({"R6 Nask", ref_text(a.cref), Configuration{a.cont, conf.store, conf.fresh_counter}});
        break;
    }
    case Agent::Kind::Retract: {
        Constraint c = resolve_ref(a.cref, env);
        if (leq_constraint(conf.store.current, c)) {
            Store next{divide(conf.store.current, c)};
            if (check(next, a.arrow, env))
                steps.push_back(
                    {"R7 Retract", ref_text(a.cref), Configuration{a.cont, next, conf.fresh_counter}});
        }
        break;
    }
    case Agent::Kind::Update: {
        Constraint c = resolve_ref(a.cref, env);
        std::set<std::string> removed;
        for (const auto& v : a.update_vars) {
            env.space->index_of(v); // validate
            removed.insert(v);
        }
        std::vector<std::string> keep;
        for (const auto& v : env.space->variables())
            if (!removed.count(v.name)) keep.push_back(v.name);
        Store next{combine(project(conf.store.current, keep), c)};
        if (check(next, a.arrow, env)) {
            std::string detail = "{";
            for (std::size_t i = 0; i < a.update_vars.size(); ++i) {
                if (i) detail += ",";
                detail += a.update_vars[i];
            }
            detail += "}" + ref_text(a.cref);
            steps.push_back({"R8 Update", detail, Configuration{a.cont, next, conf.fresh_counter}});
        }
        break;
    }
    case Agent::Kind::Sum: {
        // R5: one successor per enabled guard
        for (const auto& guard : a.members) {
            auto sub = enabled(Configuration{guard, conf.store, conf.fresh_counter}, env);
            steps.insert(steps.end(), sub.begin(), sub.end());
        }
        break;
    }
    case Agent::Kind::Parallel: {
        // R3 interleaving / R4 folding a finished branch away
        auto fold = [&](const AgentPtr& stepped, const AgentPtr& other, bool steppedLeft) {
            if (stepped->kind == Agent::Kind::Success) return other;
            return steppedLeft ? Agent::parallel(stepped, other) : Agent::parallel(other, stepped);
        };
        for (const auto& s : enabled(Configuration{a.left, conf.store, conf.fresh_counter}, env))
            steps.push_back(
                {s.rule, s.action,
                 Configuration{fold(s.next.agent, a.right, true), s.next.store, s.next.fresh_counter}});
        for (const auto& s : enabled(Configuration{a.right, conf.store, conf.fresh_counter}, env))
            steps.push_back(
                {s.rule, s.action,
                 Configuration{fold(s.next.agent, a.left, false), s.next.store, s.next.fresh_counter}});
        break;
    }
    case Agent::Kind::Exists: {
        // R9: open the binder with a pool variable, then step the body
        auto [fresh, counter] = allocate_fresh(conf, env);
        AgentPtr opened = rename_agent(a.body, a.binder, fresh);
        return enabled(Configuration{opened, conf.store, counter}, env);
    }
    case Agent::Kind::Call: {
        // R10: step the instantiated body
        const ProcDecl& decl = env.procedure(a.callee);
        AgentPtr opened = expand_call(decl, a.actuals, env);
        return enabled(Configuration{opened, conf.store, conf.fresh_counter}, env);
    }
    }
    return steps;
}

// ---------------------------------------------------------------------------
// run

namespace {

RunResult run_seeded(const Configuration& initial, const RunPolicy& policy, const VmEnv& env) {
    RunResult result{RunResult::Outcome::Success, initial, {}};
    Configuration conf = initial;
    std::mt19937_64 rng(policy.seed);
    for (int step = 0; step < policy.max_steps; ++step) {
        if (conf.terminal()) {
            result.outcome = RunResult::Outcome::Success;
            result.final_config = conf;
            return result;
        }
        auto steps = enabled(conf, env);
        if (steps.empty()) {
            result.outcome = RunResult::Outcome::Stuck;
            result.final_config = conf;
            return result;
        }
        std::uniform_int_distribution<std::size_t> pick(0, steps.size() - 1);
        Step& chosen = steps[pick(rng)];
        result.trace.push_back({chosen.rule, chosen.action, chosen.next.store.current});
        conf = chosen.next;
    }
    if (conf.terminal()) {
        result.outcome = RunResult::Outcome::Success;
        result.final_config = conf;
        return result;
    }
    result.outcome = RunResult::Outcome::BoundExceeded;
    result.final_config = conf;
    return result;
}

struct ExhaustiveState {
    std::vector<std::pair<Configuration, int>> visited; // config, shallowest depth seen
    bool truncated = false;
    std::optional<Configuration> success;
    std::vector<TraceEntry> success_path;
    std::optional<Configuration> deepest_stuck;
    std::vector<TraceEntry> deepest_stuck_path;
    int deepest_stuck_depth = -1;

    // True when the configuration was already explored at this depth or
    // shallower; otherwise records the new depth (a shallower revisit must
    // be re-expanded or paths cut by the bound could hide a terminal).
    bool seen_at(const Configuration& c, int depth) {
        for (auto& [v, d] : visited)
            if (same_configuration(v, c)) {
                if (d <= depth) return true;
                d = depth;
                return false;
            }
        visited.emplace_back(c, depth);
        return false;
    }
};

// Depth-first, successor order = enabled() order; the first terminal in
// preorder wins, so results are deterministic.
void explore(const Configuration& conf, int depth, int bound, const VmEnv& env, ExhaustiveState& st,
             std::vector<TraceEntry>& path) {
    if (st.success) return;
    if (conf.terminal()) {
        st.success = conf;
        st.success_path = path;
        return;
    }
    auto steps = enabled(conf, env);
    if (steps.empty()) {
        if (depth > st.deepest_stuck_depth) {
            st.deepest_stuck_depth = depth;
            st.deepest_stuck = conf;
            st.deepest_stuck_path = path;
        }
        return;
    }
    if (depth >= bound) {
        st.truncated = true;
        return;
    }
    for (const auto& s : steps) {
        if (st.success) return;
        if (st.seen_at(s.next, depth + 1)) continue;
        path.push_back({s.rule, s.action, s.next.store.current});
        explore(s.next, depth + 1, bound, env, st, path);
        path.pop_back();
    }
}

RunResult run_exhaustive(const Configuration& initial, const RunPolicy& policy, const VmEnv& env) {
    ExhaustiveState st;
    st.visited.emplace_back(initial, 0);
    std::vector<TraceEntry> path;
    explore(initial, 0, policy.depth_bound, env, st, path);

    RunResult result{RunResult::Outcome::Success, initial, {}};
    if (st.success) {
        result.outcome = RunResult::Outcome::Success;
        result.final_config = *st.success;
        result.trace = std::move(st.success_path);
    } else if (!st.truncated && st.deepest_stuck) {
        result.outcome = RunResult::Outcome::Stuck;
        result.final_config = *st.deepest_stuck;
        result.trace = std::move(st.deepest_stuck_path);
    } else if (!st.truncated) {
        // no terminal, no stuck leaf: every path cycles inside the bound
        result.outcome = RunResult::Outcome::Stuck;
        result.final_config = initial;
    } else {
        result.outcome = RunResult::Outcome::BoundExceeded;
        if (st.deepest_stuck) {
            result.final_config = *st.deepest_stuck;
            result.trace = std::move(st.deepest_stuck_path);
        }
    }
    return result;
}

} // namespace

RunResult run(const Program& program, const Store& initial, const RunPolicy& policy, const VmEnv& env) {
    Configuration conf{program.main, initial, 0};
    if (policy.mode == RunPolicy::Mode::Seeded) return run_seeded(conf, policy, env);
    return run_exhaustive(conf, policy, env);
}

ReachabilityResult reachable_success(const Program& program, const Store& initial, int depth_bound,
                                     const VmEnv& env) {
    if (depth_bound < 0) throw Error("depth bound must be non-negative");
    RunResult r = run(program, initial, RunPolicy::exhaustive(depth_bound), env);
    switch (r.outcome) {
    case RunResult::Outcome::Success: return {true, true};
    case RunResult::Outcome::Stuck: return {false, true};
    case RunResult::Outcome::BoundExceeded: return {false, false};
    }
    return {false, false};
}

} // namespace softqos
