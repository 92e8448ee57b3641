#pragma once

#include "softqos/ast.hpp"
#include "softqos/constraint.hpp"

#include <cstdint>
#include <map>
#include <optional>

namespace softqos {

/// The shared store: a single composed constraint. Starts as the
/// one-constant (the best, empty store).
struct Store {
    Constraint current;

    static Store initial(const SpacePtr& space) {
        return Store{Constraint::constant(space, one(space->spec()))};
    }
    SemiringValue blevel() const { return blevel_of(current); }
};

/// Name resolution and the fresh-variable pool for one program run.
struct VmEnv {
    SpacePtr space;
    const std::map<std::string, Constraint>* constraints = nullptr;
    const std::vector<ProcDecl>* procedures = nullptr;

    const Constraint& named(const std::string& name) const;
    const ProcDecl& procedure(const std::string& name) const;
};

/// Resolves a constraint reference (named or diagonal) against the space,
/// applying any pending renamings to the table.
Constraint resolve_ref(const ConstraintRef& ref, const VmEnv& env);

struct Configuration {
    AgentPtr agent;
    Store store;
    int fresh_counter = 0;

    bool terminal() const { return agent->kind == Agent::Kind::Success; }
};

bool same_configuration(const Configuration& a, const Configuration& b);

/// The interval guard on checked transitions. Thresholds may be semiring
/// values or constraint references; the four shapes compare the store's
/// best level (scalar bounds) or the store itself (constraint bounds)
/// against the interval. An interval whose lower bound is strictly better
/// than its upper bound is ill-formed and raises an error.
bool check(const Store& store, const Arrow& arrow, const VmEnv& env);

struct Step {
    std::string rule;   // e.g. "R1 Tell"
    std::string action; // e.g. "(c4)"
    Configuration next;
};

/// All one-step successors, in deterministic order (left branch first,
/// guards in syntactic order). Hiding and procedure calls are congruences:
/// their successors are the successors of the opened body.
std::vector<Step> enabled(const Configuration& conf, const VmEnv& env);

/// Instantiates a procedure body: each formal is linked to its actual by a
/// hidden diagonal tell, so the opened body reads parameters through the
/// store.
AgentPtr expand_call(const ProcDecl& decl, const std::vector<std::string>& actuals, const VmEnv& env);

struct RunPolicy {
    enum class Mode { Seeded, Exhaustive } mode = Mode::Seeded;
    std::uint64_t seed = 0;
    int depth_bound = 64;   // exhaustive
    int max_steps = 10000;  // seeded

    static RunPolicy seeded(std::uint64_t seed, int max_steps = 10000) {
        return RunPolicy{Mode::Seeded, seed, 64, max_steps};
    }
    static RunPolicy exhaustive(int depth_bound) {
        return RunPolicy{Mode::Exhaustive, 0, depth_bound, 0};
    }
};

struct TraceEntry {
    std::string rule;
    std::string action;
    Constraint store_after;
};

struct RunResult {
    enum class Outcome { Success, Stuck, BoundExceeded } outcome;
    /// Success: the terminal store. Stuck: the blocked configuration (its
    /// enabled set is empty). BoundExceeded: the last configuration seen.
    Configuration final_config;
    std::vector<TraceEntry> trace;
};

/// Seeded mode walks one uniformly-chosen enabled successor per step until
/// terminal, stuck or max_steps. Exhaustive mode explores the whole
/// interleaving graph to the depth bound: Success if any interleaving
/// terminates (trace = its path), Stuck if the graph is exhausted without a
/// terminal (reporting the deepest blocked configuration), BoundExceeded if
/// the bound cut unexplored branches first.
RunResult run(const Program& program, const Store& initial, const RunPolicy& policy, const VmEnv& env);

struct ReachabilityResult {
    bool reachable = false;
    /// True when the full graph fit inside the bound, so a negative answer
    /// is definitive rather than "unknown at bound".
    bool exhausted = false;
};

ReachabilityResult reachable_success(const Program& program, const Store& initial, int depth_bound,
                                     const VmEnv& env);

} // namespace softqos
