#pragma once

#include "softqos/problem.hpp"
#include "softqos/vm.hpp"

#include <string>
#include <vector>

namespace softqos {

/// Interactive store session: tell / retract / update / ask / nask against a
/// live store, with undo and replayable history. Commands may carry an
/// optional `-[lower,upper]->` interval; omitted intervals always pass.
class ReplSession {
public:
    explicit ReplSession(ProblemFile problem);

    struct Outcome {
        bool ok = true;        // the command parsed and was accepted
        bool quit = false;
        std::string message;   // one line per command
    };

    /// Executes one command: tell NAME, retract NAME, update {X} NAME,
    /// ask NAME, nask NAME (each with the optional interval), blevel, show,
    /// undo, history, help, quit. Rejected commands leave the store intact.
    Outcome execute(const std::string& command);

    const Store& store() const { return store_; }
    const std::vector<std::string>& history() const { return history_; }
    const ProblemFile& problem() const { return problem_; }

    /// Replays a history from the initial store; used to validate the
    /// invariant that history always reproduces the current store.
    static Store replay(const ProblemFile& problem, const std::vector<std::string>& history);

private:
    Outcome apply(const std::string& command);

    ProblemFile problem_;
    VmEnv env_;
    Store store_;
    std::vector<std::string> history_;
    std::vector<Store> undo_;
};

} // namespace softqos
