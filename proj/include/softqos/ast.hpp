#pragma once

#include "softqos/lexer.hpp"
#include "softqos/semiring.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace softqos {

/// Reference to a constraint from agent text. Either a name declared in the
/// problem header or a diagonal pair built during call expansion. Pending
/// variable renamings (from hiding and parameter passing) are kept lazily
/// and applied when the reference is resolved against the store's space.
struct ConstraintRef {
    enum class Kind { Named, Diagonal } kind = Kind::Named;
    std::string name;          // Named
    std::string var_a, var_b;  // Diagonal
    std::vector<std::pair<std::string, std::string>> renames;

    static ConstraintRef named(std::string n) {
        ConstraintRef r;
        r.name = std::move(n);
        return r;
    }
    static ConstraintRef diagonal(std::string a, std::string b) {
        ConstraintRef r;
        r.kind = Kind::Diagonal;
        r.var_a = std::move(a);
        r.var_b = std::move(b);
        return r;
    }

    /// Follows the rename chain for one variable name.
    std::string renamed(const std::string& v) const;
    std::string to_string() const;
    bool operator==(const ConstraintRef&) const = default;
};

/// One checked-transition threshold: a semiring value or a constraint
/// reference. `-[_,_]->` defaults materialize to the semiring zero (lower)
/// and one (upper). The reference alternative comes first so agents default
/// to an inert placeholder arrow.
using Threshold = std::variant<ConstraintRef, SemiringValue>;

struct Arrow {
    Threshold lower;
    Threshold upper;
    std::string to_string() const;
};

struct Agent;
using AgentPtr = std::shared_ptr<const Agent>;

/// nmsccp agents. Sum members are always Ask or Nask guards.
struct Agent {
    enum class Kind { Success, Tell, Retract, Update, Ask, Nask, Sum, Parallel, Exists, Call };

    Kind kind = Kind::Success;
    ConstraintRef cref;                    // Tell / Retract / Update / Ask / Nask
    std::vector<std::string> update_vars;  // Update
    Arrow arrow;                           // prefix actions
    AgentPtr cont;                         // prefix actions
    std::vector<AgentPtr> members;         // Sum (n-ary, flattened)
    AgentPtr left, right;                  // Parallel
    std::string binder;                    // Exists
    AgentPtr body;                         // Exists
    std::string callee;                    // Call
    std::vector<std::string> actuals;      // Call

    static AgentPtr success();
    static AgentPtr tell(ConstraintRef c, Arrow a, AgentPtr cont);
    static AgentPtr retract(ConstraintRef c, Arrow a, AgentPtr cont);
    static AgentPtr update(std::vector<std::string> vars, ConstraintRef c, Arrow a, AgentPtr cont);
    static AgentPtr ask(ConstraintRef c, Arrow a, AgentPtr cont);
    static AgentPtr nask(ConstraintRef c, Arrow a, AgentPtr cont);
    static AgentPtr sum(std::vector<AgentPtr> guards);
    static AgentPtr parallel(AgentPtr l, AgentPtr r);
    static AgentPtr exists(std::string binder, AgentPtr body);
    static AgentPtr call(std::string callee, std::vector<std::string> actuals);
};

struct ProcDecl {
    std::string name;
    std::vector<std::string> formals;
    AgentPtr body;
};

struct Program {
    std::vector<ProcDecl> declarations;
    AgentPtr main;
};

/// Parses `proc` declarations followed by `agent <agent>` from a bare text.
/// Scalar thresholds are parsed as literals of `spec`; the scalar/scalar
/// interval condition (lower may not be strictly better than the upper) is
/// enforced here, constraint-threshold conditions at evaluation time.
Program parse_program_text(const std::string& text, const SpecPtr& spec);
/// Same, continuing from an existing token stream (used by the problem-file
/// reader once it reaches the proc/agent sections).
Program parse_program_tokens(TokenStream& ts, const SpecPtr& spec);
/// Parses a single agent expression (no declarations).
AgentPtr parse_agent_text(const std::string& text, const SpecPtr& spec);

/// Canonical rendering; parse_agent_text(pretty(a)) reproduces a for any
/// agent free of pending renamings.
std::string pretty(const AgentPtr& agent);
std::string pretty(const Program& program);

bool same_agent(const AgentPtr& a, const AgentPtr& b);

/// Capture-aware substitution [from/to] over free variable occurrences:
/// constraint references accumulate the renaming, update sets / call
/// arguments rename directly, inner binders shadow.
AgentPtr rename_agent(const AgentPtr& agent, const std::string& from, const std::string& to);

} // namespace softqos
