#include "softqos/problem.hpp"
#include "softqos/refinement.hpp"
#include "softqos/repl.hpp"
#include "softqos/solver.hpp"
#include "softqos/vm.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

using namespace softqos;
using nlohmann::json;

namespace {

// exit codes: 0 ok/holds/success, 1 usage or load error, 2 refinement fails
// or run stuck, 3 run bound exceeded
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;
constexpr int kExitBound = 3;

json assignment_json(const Assignment& eta) {
    json j = json::object();
    for (const auto& [name, value] : eta.bindings()) j[name] = domain_value_to_string(value);
    return j;
}

int cmd_solve(const std::string& path, const std::string& format) {
    ProblemFile p = load_problem(path);
    if (!p.con) {
        std::cerr << "error: " << path << " has no `con` section\n";
        return kExitError;
    }
    Scsp problem{p.space, {}, *p.con};
    for (const auto& decl : p.declarations) problem.constraints.push_back(p.constraint(decl.name));
    SolutionReport report = solve(problem);

    if (format == "json") {
        json j;
        j["blevel"] = report.blevel.display();
        j["solution"] = json::array();
        for (std::size_t i = 0; i < report.solution.table_size(); ++i) {
            auto tuple = report.solution.tuple_at(i);
            json row;
            row["value"] = report.solution.value_at(i).display();
            json t = json::object();
            auto names = report.solution.support_names();
            for (std::size_t k = 0; k < names.size(); ++k) t[names[k]] = domain_value_to_string(tuple[k]);
            row["tuple"] = t;
            j["solution"].push_back(row);
        }
        j["best"] = json::array();
        for (const auto& eta : report.best) j["best"].push_back(assignment_json(eta));
        std::cout << j.dump() << "\n";
        return kExitOk;
    }

    std::cout << "solution over {";
    auto names = report.solution.support_names();
    for (std::size_t i = 0; i < names.size(); ++i) std::cout << (i ? ", " : "") << names[i];
    std::cout << "}:\n" << table_to_string(report.solution);
    std::cout << "blevel = " << report.blevel.display() << "\n";
    std::cout << "best:\n";
    for (const auto& eta : report.best) std::cout << "  " << eta.to_string() << "\n";
    return kExitOk;
}

int cmd_refine(const std::string& path, const std::string& format) {
    ProblemFile p = load_problem(path);
    if (!p.refinement || p.refinement->implement.empty() || p.refinement->require.empty()) {
        std::cerr << "error: " << path << " needs implement/require/interface sections\n";
        return kExitError;
    }
    if (!p.refinement->orientation) {
        std::cerr << "error: " << path
                  << " must state `orientation impl_refines_req;` or `orientation req_refines_impl;`\n";
        return kExitError;
    }

    std::vector<Constraint> impl;
    for (const auto& name : p.refinement->implement) impl.push_back(p.constraint(name));
    const Constraint& req = p.constraint(p.refinement->require);

    RefinementReport report;
    if (*p.refinement->orientation == RefinementOrientation::ImplRefinesReq) {
        report = locally_refines(RefinementQuery{impl, req, p.refinement->interface});
    } else {
        report = reliability_margin(impl, req);
    }

    if (format == "json") {
        json j;
        j["holds"] = report.holds;
        if (report.witness) j["witness"] = assignment_json(*report.witness);
        if (report.impl_blevel) j["impl_blevel"] = report.impl_blevel->display();
        j["margins"] = json::array();
        for (const auto& m : report.margins) {
            json row;
            row["tuple"] = assignment_json(m.tuple);
            row["impl"] = m.impl_value.display();
            row["req"] = m.req_value.display();
            j["margins"].push_back(row);
        }
        std::cout << j.dump() << "\n";
        return report.holds ? kExitOk : kExitNegative;
    }

    std::cout << (report.holds ? "HOLDS" : "DOES NOT HOLD") << "\n";
    if (report.witness) std::cout << "witness: " << report.witness->to_string() << "\n";
    if (report.impl_blevel) std::cout << "implementation blevel = " << report.impl_blevel->display() << "\n";
    std::cout << "margins (implementation vs requirement):\n";
    for (const auto& m : report.margins)
        std::cout << "  " << m.tuple.to_string() << " : " << m.impl_value.display() << " vs "
                  << m.req_value.display() << "\n";
    return report.holds ? kExitOk : kExitNegative;
}

void print_store(const Constraint& store) {
    auto names = store.support_names();
    std::cout << "final store support: {";
    for (std::size_t i = 0; i < names.size(); ++i) std::cout << (i ? ", " : "") << names[i];
    std::cout << "}\n";
    if (store.table_size() <= 32 && !names.empty()) std::cout << table_to_string(store);
}

int cmd_run(const std::string& path, bool exhaustive, std::uint64_t seed, int depth, int maxSteps,
            bool trace, const std::string& format) {
    ProblemFile p = load_problem(path);
    if (!p.program) {
        std::cerr << "error: " << path << " has no agent section\n";
        return kExitError;
    }
    VmEnv env{p.space, &p.constraints, &p.program->declarations};
    RunPolicy policy = exhaustive ? RunPolicy::exhaustive(depth) : RunPolicy::seeded(seed, maxSteps);
    RunResult result = run(*p.program, Store::initial(p.space), policy, env);

    const Constraint& store = result.final_config.store.current;
    std::string level = result.final_config.store.blevel().display();

    if (format == "json") {
        json j;
        switch (result.outcome) {
        case RunResult::Outcome::Success: j["outcome"] = "success"; break;
        case RunResult::Outcome::Stuck: j["outcome"] = "stuck"; break;
        case RunResult::Outcome::BoundExceeded: j["outcome"] = "bound_exceeded"; break;
        }
        j["blevel"] = level;
        j["steps"] = result.trace.size();
        if (trace) {
            j["trace"] = json::array();
            for (const auto& t : result.trace) {
                json row;
                row["rule"] = t.rule;
                row["action"] = t.action;
                row["blevel"] = blevel_of(t.store_after).display();
                j["trace"].push_back(row);
            }
        }
        std::cout << j.dump() << "\n";
    } else {
        if (trace) {
            int k = 0;
            for (const auto& t : result.trace)
                std::cout << "step " << ++k << ": " << t.rule << t.action << " ; store⇓∅ = "
                          << blevel_of(t.store_after).display() << "\n";
        }
        switch (result.outcome) {
        case RunResult::Outcome::Success:
            std::cout << "SUCCESS store⇓∅ = " << level << "\n";
            print_store(store);
            break;
        case RunResult::Outcome::Stuck:
            if (exhaustive)
                std::cout << "STUCK (no interleaving succeeds) store⇓∅ = " << level << "\n";
            else
                std::cout << "STUCK store⇓∅ = " << level << "\n";
            std::cout << "blocked agent: " << pretty(result.final_config.agent) << "\n";
            break;
        case RunResult::Outcome::BoundExceeded:
            std::cout << "BOUND EXCEEDED\n";
            break;
        }
    }
    switch (result.outcome) {
    case RunResult::Outcome::Success: return kExitOk;
    case RunResult::Outcome::Stuck: return kExitNegative;
    case RunResult::Outcome::BoundExceeded: return kExitBound;
    }
    return kExitError;
}

int cmd_repl(const std::string& path) {
    ProblemFile p = load_problem(path);
    ReplSession session(std::move(p));
    std::cout << "softqos repl over " << session.problem().space->spec()->to_string()
              << " ; store⇓∅ = " << session.store().blevel().display() << "\n";
    std::string line;
    while (std::cout << "σ> " << std::flush, std::getline(std::cin, line)) {
        // several commands may share a line, separated by ';'
        std::size_t start = 0;
        bool quit = false;
        while (start <= line.size()) {
            std::size_t semi = line.find(';', start);
            std::string cmd = line.substr(start, semi == std::string::npos ? semi : semi - start);
            if (!cmd.empty() && cmd.find_first_not_of(" \t") != std::string::npos) {
                auto out = session.execute(cmd);
                if (!out.message.empty()) std::cout << out.message << "\n";
                if (out.quit) {
                    quit = true;
                    break;
                }
            }
            if (semi == std::string::npos) break;
            start = semi + 1;
        }
        if (quit) break;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"semiring-parametric soft-constraint engine and nmsccp interpreter"};
    app.require_subcommand(1);

    std::string file;
    std::string format = "text";
    bool trace = false;
    bool exhaustive = false;
    std::uint64_t seed = 0;
    int depth = 64;
    int maxSteps = 10000;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("file", file, "problem file")->required();
        sub->add_option("--format", format, "text|json")->check(CLI::IsMember({"text", "json"}));
    };

    CLI::App* solveCmd = app.add_subcommand("solve", "solve the SCSP and print blevel/best");
    add_common(solveCmd);
    CLI::App* refineCmd = app.add_subcommand("refine", "check the refinement section");
    add_common(refineCmd);
    CLI::App* runCmd = app.add_subcommand("run", "execute the agent section");
    add_common(runCmd);
    runCmd->add_flag("--trace", trace, "print one line per applied rule");
    runCmd->add_flag("--exhaustive", exhaustive, "explore all interleavings");
    runCmd->add_option("--seed", seed, "seeded-run RNG seed");
    runCmd->add_option("--depth", depth, "exhaustive depth bound");
    runCmd->add_option("--max-steps", maxSteps, "seeded-run step bound");
    CLI::App* replCmd = app.add_subcommand("repl", "interactive store session");
    replCmd->add_option("file", file, "problem file (header sections)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (solveCmd->parsed()) return cmd_solve(file, format);
        if (refineCmd->parsed()) return cmd_refine(file, format);
        if (runCmd->parsed()) return cmd_run(file, exhaustive, seed, depth, maxSteps, trace, format);
        if (replCmd->parsed()) return cmd_repl(file);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
