#include "softqos/repl.hpp"

#include <sstream>

namespace softqos {

ReplSession::ReplSession(ProblemFile problem)
    : problem_(std::move(problem)), store_(Store::initial(problem_.space)) {
    env_.space = problem_.space;
    env_.constraints = &problem_.constraints;
    env_.procedures = nullptr;
}

Store ReplSession::replay(const ProblemFile& problem, const std::vector<std::string>& history) {
    ReplSession session(problem);
    for (const auto& cmd : history) session.execute(cmd);
    return session.store_;
}

ReplSession::Outcome ReplSession::execute(const std::string& command) {
    Outcome out = apply(command);
    if (out.ok) {
        // store-changing commands replay; queries do not need to but are
        // harmless and keep the transcript complete
        std::istringstream head(command);
        std::string word;
        head >> word;
        if (word == "tell" || word == "retract" || word == "update" || word == "undo")
            history_.push_back(command);
    }
    return out;
}

ReplSession::Outcome ReplSession::apply(const std::string& command) {
    TokenStream ts(tokenize(command));
    if (ts.at(Tok::End)) return {true, false, ""};
    std::string word = ts.expect_ident("command");

    auto level = [&]() { return store_.blevel().display(); };

    try {
        if (word == "quit" || word == "exit") return {true, true, "bye"};
        if (word == "help")
            return {true, false,
                    "commands: tell C | retract C | update {X} C | ask C | nask C "
                    "[each takes an optional -[lo,up]-> interval] | blevel | show | undo | history | quit"};
        if (word == "blevel") return {true, false, "store⇓∅ = " + level()};
        if (word == "show") {
            std::string msg = "store support: {";
            auto names = store_.current.support_names();
            for (std::size_t i = 0; i < names.size(); ++i) {
                if (i) msg += ", ";
                msg += names[i];
            }
            msg += "} ; store⇓∅ = " + level();
            if (store_.current.table_size() <= 32 && !names.empty())
                msg += "\n" + table_to_string(store_.current);
            return {true, false, msg};
        }
        if (word == "history") {
            std::string msg;
            for (const auto& h : history_) msg += (msg.empty() ? "" : "\n") + h;
            return {true, false, msg.empty() ? "(empty)" : msg};
        }
        if (word == "undo") {
            if (undo_.empty()) return {false, false, "nothing to undo"};
            store_ = undo_.back();
            undo_.pop_back();
            return {true, false, "undone ; store⇓∅ = " + level()};
        }

        if (word != "tell" && word != "retract" && word != "update" && word != "ask" && word != "nask")
            return {false, false, "unknown command '" + word + "' (try help)"};

        std::vector<std::string> update_vars;
        if (word == "update") {
            ts.expect(Tok::LBrace, "'{'");
            update_vars.push_back(ts.expect_ident("variable"));
            while (ts.accept(Tok::Comma)) update_vars.push_back(ts.expect_ident("variable"));
            ts.expect(Tok::RBrace, "'}'");
        }
        std::string name = ts.expect_ident("constraint name");

        // optional interval; default intervals always pass
        std::string arrowText = "-[_,_]->";
        if (ts.at(Tok::Minus)) {
            std::string rest;
            while (!ts.at(Tok::End)) rest += ts.next().text;
            arrowText = rest;
        } else if (!ts.at(Tok::End)) {
            ts.fail("trailing input after command");
        }

        std::string agentText;
        if (word == "update") {
            agentText = "update{";
            for (std::size_t i = 0; i < update_vars.size(); ++i) {
                if (i) agentText += ",";
                agentText += update_vars[i];
            }
            agentText += "}(" + name + ") " + arrowText + " success";
        } else {
            agentText = word + "(" + name + ") " + arrowText + " success";
        }
        AgentPtr agent = parse_agent_text(agentText, problem_.space->spec());
        problem_.constraint(name); // resolve early for a clean message

        Configuration conf{agent, store_, 0};
        auto steps = enabled(conf, env_);
        if (steps.empty()) {
            std::string why;
            if (word == "ask")
                why = leq_constraint(store_.current, problem_.constraint(name))
                          ? "interval check fails on the current store"
                          : "store does not entail " + name;
            else if (word == "nask")
                why = !leq_constraint(store_.current, problem_.constraint(name))
                          ? "interval check fails on the current store"
                          : "store entails " + name;
            else if (word == "retract")
                why = leq_constraint(store_.current, problem_.constraint(name))
                          ? "interval check fails on the result store"
                          : "retract precondition fails (store does not entail " + name + ")";
            else
                why = "interval check fails on the result store";
            return {false, false, "rejected: " + why};
        }
        const Step& step = steps.front();
        if (word == "ask" || word == "nask")
            return {true, false, step.rule + step.action + " passes ; store unchanged ; store⇓∅ = " + level()};
        undo_.push_back(store_);
        store_ = step.next.store;
        return {true, false, step.rule + step.action + " applied ; store⇓∅ = " + level()};
    } catch (const Error& e) {
        return {false, false, std::string("error: ") + e.what()};
    }
}

} // namespace softqos
