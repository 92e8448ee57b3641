#include "softqos/ast.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace softqos {

std::string ConstraintRef::renamed(const std::string& v) const {
    std::string cur = v;
    for (const auto& [from, to] : renames)
        if (cur == from) cur = to;
    return cur;
}

std::string ConstraintRef::to_string() const {
    if (kind == Kind::Diagonal) return "diag(" + renamed(var_a) + "," + renamed(var_b) + ")";
    std::string out = name;
    for (const auto& [from, to] : renames)
        if (from != to) out += "[" + from + "/" + to + "]";
    return out;
}

std::string Arrow::to_string() const {
    auto thr = [](const Threshold& t) {
        if (std::holds_alternative<SemiringValue>(t)) return std::get<SemiringValue>(t).to_literal();
        return std::get<ConstraintRef>(t).to_string();
    };
    return "-[" + thr(lower) + "," + thr(upper) + "]->";
}

namespace {

AgentPtr node(Agent a) { return std::make_shared<Agent>(std::move(a)); }

} // namespace

AgentPtr Agent::success() {
    Agent a;
    a.kind = Kind::Success;
    return node(std::move(a));
}

static AgentPtr prefix_action(Agent::Kind kind, ConstraintRef c, Arrow ar, AgentPtr cont) {
    Agent a;
    a.kind = kind;
    a.cref = std::move(c);
    a.arrow = std::move(ar);
    a.cont = std::move(cont);
    return node(std::move(a));
}

AgentPtr Agent::tell(ConstraintRef c, Arrow a, AgentPtr cont) {
    return prefix_action(Kind::Tell, std::move(c), std::move(a), std::move(cont));
}
AgentPtr Agent::retract(ConstraintRef c, Arrow a, AgentPtr cont) {
    return prefix_action(Kind::Retract, std::move(c), std::move(a), std::move(cont));
}
AgentPtr Agent::ask(ConstraintRef c, Arrow a, AgentPtr cont) {
    return prefix_action(Kind::Ask, std::move(c), std::move(a), std::move(cont));
}
AgentPtr Agent::nask(ConstraintRef c, Arrow a, AgentPtr cont) {
    return prefix_action(Kind::Nask, std::move(c), std::move(a), std::move(cont));
}

AgentPtr Agent::update(std::vector<std::string> vars, ConstraintRef c, Arrow a, AgentPtr cont) {
    Agent n;
    n.kind = Kind::Update;
    n.update_vars = std::move(vars);
    n.cref = std::move(c);
    n.arrow = std::move(a);
    n.cont = std::move(cont);
    return node(std::move(n));
}

AgentPtr Agent::sum(std::vector<AgentPtr> guards) {
    if (guards.empty()) throw Error("sum needs at least one guard");
    if (guards.size() == 1) return guards[0];
    for (const auto& g : guards)
        if (g->kind != Kind::Ask && g->kind != Kind::Nask)
            throw Error("sum members must be ask/nask guards");
    Agent a;
    a.kind = Kind::Sum;
    a.members = std::move(guards);
    return node(std::move(a));
}

AgentPtr Agent::parallel(AgentPtr l, AgentPtr r) {
    Agent a;
    a.kind = Kind::Parallel;
    a.left = std::move(l);
    a.right = std::move(r);
    return node(std::move(a));
}

AgentPtr Agent::exists(std::string binder, AgentPtr body) {
    Agent a;
    a.kind = Kind::Exists;
    a.binder = std::move(binder);
    a.body = std::move(body);
    return node(std::move(a));
}

AgentPtr Agent::call(std::string callee, std::vector<std::string> actuals) {
    Agent a;
    a.kind = Kind::Call;
    a.callee = std::move(callee);
    a.actuals = std::move(actuals);
    return node(std::move(a));
}

// ---------------------------------------------------------------------------
// Parser. Precedence: prefix chains bind tightest, then `+`, then `||`.

namespace {

const std::set<std::string> kReserved = {
    "success", "tell", "ask", "nask", "retract", "update", "exists", "proc",
    "agent",   "diag", "true", "false", "inf",    "in",     "table",  "cases", "else",
};

struct AgentParser {
    TokenStream& ts;
    const SpecPtr& spec;

    Threshold parse_threshold(bool lower) {
        if (ts.accept(Tok::Underscore))
            return lower ? Threshold(zero(spec)) : Threshold(one(spec));
        // value literals start with a digit, '{', '(' or one of the literal
        // keywords; anything else is a named constraint
        if (ts.at(Tok::Ident) && !ts.at_ident("inf") && !ts.at_ident("true") && !ts.at_ident("false"))
            return Threshold(ConstraintRef::named(ts.next().text));
        return Threshold(parse_value_tokens());
    }

    // Collects a balanced literal token span and defers to the shared value
    // parser, so the literal grammar lives in one place.
    SemiringValue parse_value_tokens() {
        std::string text;
        int depth = 0;
        while (true) {
            const Token& t = ts.peek();
            if (t.kind == Tok::End) ts.fail("unterminated value literal");
            if (depth == 0 && (t.kind == Tok::Comma || t.kind == Tok::RBracket)) break;
            if (t.kind == Tok::LParen || t.kind == Tok::LBrace) ++depth;
            if (t.kind == Tok::RParen || t.kind == Tok::RBrace) {
                if (depth == 0) break;
                --depth;
            }
            text += ts.next().text;
            if (depth == 0 && (ts.at(Tok::Comma) || ts.at(Tok::RBracket))) break;
        }
        return parse_value_literal(spec, text);
    }

    Arrow parse_arrow() {
        ts.expect(Tok::Minus, "'-['");
        ts.expect(Tok::LBracket, "'['");
        Threshold lower = parse_threshold(true);
        ts.expect(Tok::Comma, "','");
        Threshold upper = parse_threshold(false);
        ts.expect(Tok::RBracket, "']'");
        ts.expect(Tok::Minus, "'->'");
        ts.expect(Tok::Gt, "'->'");
        if (std::holds_alternative<SemiringValue>(lower) && std::holds_alternative<SemiringValue>(upper)) {
            const auto& lo = std::get<SemiringValue>(lower);
            const auto& up = std::get<SemiringValue>(upper);
            if (lt(up, lo))
                ts.fail("ill-formed arrow: lower threshold " + lo.to_literal() +
                        " is strictly better than upper " + up.to_literal());
        }
        return Arrow{std::move(lower), std::move(upper)};
    }

    ConstraintRef parse_cref() {
        ts.expect(Tok::LParen, "'('");
        ConstraintRef ref;
        if (ts.at_ident("diag")) {
            ts.next();
            ts.expect(Tok::LParen, "'('");
            std::string a = ts.expect_ident("variable");
            ts.expect(Tok::Comma, "','");
            std::string b = ts.expect_ident("variable");
            ts.expect(Tok::RParen, "')'");
            ref = ConstraintRef::diagonal(std::move(a), std::move(b));
        } else {
            ref = ConstraintRef::named(ts.expect_ident("constraint name"));
        }
        ts.expect(Tok::RParen, "')'");
        return ref;
    }

    std::vector<std::string> parse_idlist_braced() {
        ts.expect(Tok::LBrace, "'{'");
        std::vector<std::string> out;
        if (!ts.at(Tok::RBrace)) {
            out.push_back(ts.expect_ident("variable"));
            while (ts.accept(Tok::Comma)) out.push_back(ts.expect_ident("variable"));
        }
        ts.expect(Tok::RBrace, "'}'");
        return out;
    }

    AgentPtr parse_prefix() {
        if (ts.accept_ident("success")) return Agent::success();
        if (ts.at(Tok::LParen)) {
            ts.next();
            AgentPtr inner = parse_parallel();
            ts.expect(Tok::RParen, "')'");
            return inner;
        }
        if (ts.at_ident("tell") || ts.at_ident("retract") || ts.at_ident("ask") || ts.at_ident("nask")) {
            std::string word = ts.next().text;
            ConstraintRef ref = parse_cref();
            Arrow arrow = parse_arrow();
            AgentPtr cont = parse_prefix();
            if (word == "tell") return Agent::tell(std::move(ref), std::move(arrow), std::move(cont));
            if (word == "retract") return Agent::retract(std::move(ref), std::move(arrow), std::move(cont));
            if (word == "ask") return Agent::ask(std::move(ref), std::move(arrow), std::move(cont));
            return Agent::nask(std::move(ref), std::move(arrow), std::move(cont));
        }
        if (ts.accept_ident("update")) {
            std::vector<std::string> vars = parse_idlist_braced();
            ConstraintRef ref = parse_cref();
            Arrow arrow = parse_arrow();
            AgentPtr cont = parse_prefix();
            return Agent::update(std::move(vars), std::move(ref), std::move(arrow), std::move(cont));
        }
        if (ts.accept_ident("exists")) {
            std::string binder = ts.expect_ident("variable");
            ts.expect(Tok::Dot, "'.'");
            return Agent::exists(std::move(binder), parse_prefix());
        }
        if (ts.at(Tok::Ident)) {
            if (kReserved.count(ts.peek().text)) ts.fail("unexpected keyword in agent");
            std::string callee = ts.next().text;
            ts.expect(Tok::LParen, "'('");
            std::vector<std::string> actuals;
            if (!ts.at(Tok::RParen)) {
                actuals.push_back(ts.expect_ident("variable"));
                while (ts.accept(Tok::Comma)) actuals.push_back(ts.expect_ident("variable"));
            }
            ts.expect(Tok::RParen, "')'");
            return Agent::call(std::move(callee), std::move(actuals));
        }
        ts.fail("expected agent");
    }

    AgentPtr parse_sum() {
        AgentPtr first = parse_prefix();
        if (!ts.at(Tok::Plus)) return first;
        std::vector<AgentPtr> guards;
        guards.push_back(std::move(first));
        while (ts.accept(Tok::Plus)) guards.push_back(parse_prefix());
        for (const auto& g : guards)
            if (g->kind != Agent::Kind::Ask && g->kind != Agent::Kind::Nask)
                ts.fail("sum members must be ask/nask guards");
        return Agent::sum(std::move(guards));
    }

    AgentPtr parse_parallel() {
        AgentPtr lhs = parse_sum();
        while (ts.accept(Tok::Bar2)) lhs = Agent::parallel(std::move(lhs), parse_sum());
        return lhs;
    }
};

void collect_calls(const AgentPtr& a, std::vector<const Agent*>& calls) {
    if (!a) return;
    if (a->kind == Agent::Kind::Call) calls.push_back(a.get());
    collect_calls(a->cont, calls);
    for (const auto& m : a->members) collect_calls(m, calls);
    collect_calls(a->left, calls);
    collect_calls(a->right, calls);
    collect_calls(a->body, calls);
}

void validate_calls(const Program& p) {
    std::vector<const Agent*> calls;
    collect_calls(p.main, calls);
    for (const auto& d : p.declarations) collect_calls(d.body, calls);
    for (const Agent* c : calls) {
        auto it = std::find_if(p.declarations.begin(), p.declarations.end(),
                               [&](const ProcDecl& d) { return d.name == c->callee; });
        if (it == p.declarations.end())
            throw Error("call to undeclared procedure '" + c->callee + "'");
        if (it->formals.size() != c->actuals.size())
            throw Error("procedure '" + c->callee + "' takes " + std::to_string(it->formals.size()) +
                        " arguments, called with " + std::to_string(c->actuals.size()));
    }
}

} // namespace

Program parse_program_tokens(TokenStream& ts, const SpecPtr& spec) {
    AgentParser parser{ts, spec};
    Program program;
    while (ts.accept_ident("proc")) {
        ProcDecl decl;
        decl.name = ts.expect_ident("procedure name");
        if (kReserved.count(decl.name)) ts.fail("procedure name '" + decl.name + "' is reserved");
        ts.expect(Tok::LParen, "'('");
        if (!ts.at(Tok::RParen)) {
            decl.formals.push_back(ts.expect_ident("formal parameter"));
            while (ts.accept(Tok::Comma)) decl.formals.push_back(ts.expect_ident("formal parameter"));
        }
        ts.expect(Tok::RParen, "')'");
        std::set<std::string> seen(decl.formals.begin(), decl.formals.end());
        if (seen.size() != decl.formals.size())
            ts.fail("procedure '" + decl.name + "' has duplicate formals");
        ts.expect(Tok::ColonColon, "'::'");
        decl.body = parser.parse_parallel();
        ts.expect(Tok::Semi, "';'");
        for (const auto& d : program.declarations)
            if (d.name == decl.name) throw Error("duplicate procedure '" + decl.name + "'");
        program.declarations.push_back(std::move(decl));
    }
    ts.expect_word("agent");
    program.main = parser.parse_parallel();
    ts.accept(Tok::Semi);
    validate_calls(program);
    return program;
}

Program parse_program_text(const std::string& text, const SpecPtr& spec) {
    TokenStream ts(tokenize(text));
    Program p = parse_program_tokens(ts, spec);
    if (!ts.at(Tok::End)) ts.fail("trailing tokens after agent");
    return p;
}

AgentPtr parse_agent_text(const std::string& text, const SpecPtr& spec) {
    TokenStream ts(tokenize(text));
    AgentParser parser{ts, spec};
    AgentPtr a = parser.parse_parallel();
    if (!ts.at(Tok::End)) ts.fail("trailing tokens after agent");
    return a;
}

// ---------------------------------------------------------------------------
// Pretty-printer. Levels: 0 parallel, 1 sum, 2 prefix/atom.

namespace {

void render_agent(const Agent& a, std::ostringstream& out, int level);

void render_continuation(const AgentPtr& cont, std::ostringstream& out) {
    if (cont->kind == Agent::Kind::Sum || cont->kind == Agent::Kind::Parallel) {
        out << "(";
        render_agent(*cont, out, 0);
        out << ")";
    } else {
        render_agent(*cont, out, 2);
    }
}

void render_agent(const Agent& a, std::ostringstream& out, int level) {
    switch (a.kind) {
    case Agent::Kind::Success:
        out << "success";
        return;
    case Agent::Kind::Tell:
    case Agent::Kind::Retract:
    case Agent::Kind::Ask:
    case Agent::Kind::Nask: {
        const char* word = a.kind == Agent::Kind::Tell      ? "tell"
                           : a.kind == Agent::Kind::Retract ? "retract"
                           : a.kind == Agent::Kind::Ask     ? "ask"
                                                            : "nask";
        out << word << "(" << a.cref.to_string() << ") " << a.arrow.to_string() << " ";
        render_continuation(a.cont, out);
        return;
    }
    case Agent::Kind::Update: {
        out << "update{";
        for (std::size_t i = 0; i < a.update_vars.size(); ++i) {
            if (i) out << ", ";
            out << a.update_vars[i];
        }
        out << "}(" << a.cref.to_string() << ") " << a.arrow.to_string() << " ";
        render_continuation(a.cont, out);
        return;
    }
    case Agent::Kind::Sum: {
        bool wrap = level > 1;
        if (wrap) out << "(";
        for (std::size_t i = 0; i < a.members.size(); ++i) {
            if (i) out << " + ";
            render_agent(*a.members[i], out, 2);
        }
        if (wrap) out << ")";
        return;
    }
    case Agent::Kind::Parallel: {
        bool wrap = level > 0;
        if (wrap) out << "(";
        render_agent(*a.left, out, a.left->kind == Agent::Kind::Parallel ? 0 : 1);
        out << " || ";
        render_agent(*a.right, out, 1); // right-nested parallels keep parens
        if (wrap) out << ")";
        return;
    }
    case Agent::Kind::Exists:
        out << "exists " << a.binder << ". ";
        render_continuation(a.body, out);
        return;
    case Agent::Kind::Call: {
        out << a.callee << "(";
        for (std::size_t i = 0; i < a.actuals.size(); ++i) {
            if (i) out << ", ";
            out << a.actuals[i];
        }
        out << ")";
        return;
    }
    }
}

} // namespace

std::string pretty(const AgentPtr& agent) {
    std::ostringstream out;
    render_agent(*agent, out, 0);
    return out.str();
}

std::string pretty(const Program& program) {
    std::ostringstream out;
    for (const auto& d : program.declarations) {
        out << "proc " << d.name << "(";
        for (std::size_t i = 0; i < d.formals.size(); ++i) {
            if (i) out << ", ";
            out << d.formals[i];
        }
        out << ") :: " << pretty(d.body) << ";\n";
    }
    out << "agent " << pretty(program.main);
    return out.str();
}

bool same_agent(const AgentPtr& a, const AgentPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case Agent::Kind::Success:
        return true;
    case Agent::Kind::Tell:
    case Agent::Kind::Retract:
    case Agent::Kind::Ask:
    case Agent::Kind::Nask:
    case Agent::Kind::Update: {
        if (a->update_vars != b->update_vars) return false;
        if (!(a->cref == b->cref)) return false;
        auto same_thr = [](const Threshold& x, const Threshold& y) {
            if (x.index() != y.index()) return false;
            if (std::holds_alternative<SemiringValue>(x))
                return equal(std::get<SemiringValue>(x), std::get<SemiringValue>(y));
            return std::get<ConstraintRef>(x) == std::get<ConstraintRef>(y);
        };
        return same_thr(a->arrow.lower, b->arrow.lower) && same_thr(a->arrow.upper, b->arrow.upper) &&
               same_agent(a->cont, b->cont);
    }
    case Agent::Kind::Sum: {
        if (a->members.size() != b->members.size()) return false;
        for (std::size_t i = 0; i < a->members.size(); ++i)
            if (!same_agent(a->members[i], b->members[i])) return false;
        return true;
    }
    case Agent::Kind::Parallel:
        return same_agent(a->left, b->left) && same_agent(a->right, b->right);
    case Agent::Kind::Exists:
        return a->binder == b->binder && same_agent(a->body, b->body);
    case Agent::Kind::Call:
        return a->callee == b->callee && a->actuals == b->actuals;
    }
    return false;
}

AgentPtr rename_agent(const AgentPtr& agent, const std::string& from, const std::string& to) {
    if (!agent || from == to) return agent;
    Agent a = *agent;
    auto rename_ref = [&](ConstraintRef& ref) {
        if (ref.kind == ConstraintRef::Kind::Diagonal) {
            // diagonal vars stay plain names; apply the chain eagerly
            std::string ra = ref.renamed(ref.var_a);
            std::string rb = ref.renamed(ref.var_b);
            ref.var_a = ra == from ? to : ra;
            ref.var_b = rb == from ? to : rb;
            ref.renames.clear();
        } else {
            ref.renames.emplace_back(from, to);
        }
    };
    switch (a.kind) {
    case Agent::Kind::Success:
        return agent;
    case Agent::Kind::Tell:
    case Agent::Kind::Retract:
    case Agent::Kind::Ask:
    case Agent::Kind::Nask:
    case Agent::Kind::Update: {
        rename_ref(a.cref);
        for (auto& v : a.update_vars)
            if (v == from) v = to;
        for (Threshold* t : {&a.arrow.lower, &a.arrow.upper})
            if (std::holds_alternative<ConstraintRef>(*t)) rename_ref(std::get<ConstraintRef>(*t));
        a.cont = rename_agent(a.cont, from, to);
        return std::make_shared<Agent>(std::move(a));
    }
    case Agent::Kind::Sum: {
        for (auto& m : a.members) m = rename_agent(m, from, to);
        return std::make_shared<Agent>(std::move(a));
    }
    case Agent::Kind::Parallel:
        a.left = rename_agent(a.left, from, to);
        a.right = rename_agent(a.right, from, to);
        return std::make_shared<Agent>(std::move(a));
    case Agent::Kind::Exists:
        if (a.binder == from) return agent; // shadowed
        if (a.binder == to)
            throw Error("variable capture renaming '" + from + "' to '" + to + "'");
        a.body = rename_agent(a.body, from, to);
        return std::make_shared<Agent>(std::move(a));
    case Agent::Kind::Call:
        for (auto& v : a.actuals)
            if (v == from) v = to;
        return std::make_shared<Agent>(std::move(a));
    }
    return agent;
}

} // namespace softqos
