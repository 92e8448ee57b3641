#include "softqos/problem.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace softqos {

namespace {

const std::set<std::string> kReservedNames = {
    "semiring", "var",    "fresh",     "constraint", "con",   "implement", "require",
    "interface", "orientation", "proc", "agent",     "success", "tell",    "ask",
    "nask",     "retract", "update",   "exists",     "table", "cases",     "else",
    "true",     "false",  "inf",       "in",         "diag",  "and",       "or",
    "not",
};

void check_name(const std::string& name, const char* what) {
    if (kReservedNames.count(name)) throw Error(std::string(what) + " name '" + name + "' is reserved");
}

// Collects a balanced token span up to a top-level ';' (or one of the listed
// stops) and parses it with the shared literal parser.
SemiringValue read_value(TokenStream& ts, const SpecPtr& spec) {
    std::string text;
    int depth = 0;
    while (true) {
        const Token& t = ts.peek();
        if (t.kind == Tok::End) ts.fail("unterminated value literal");
        if (depth == 0 &&
            (t.kind == Tok::Semi || t.kind == Tok::Comma || t.kind == Tok::RBrace || t.kind == Tok::RParen))
            break;
        if (t.kind == Tok::LParen || t.kind == Tok::LBrace) ++depth;
        if (t.kind == Tok::RParen || t.kind == Tok::RBrace) --depth;
        text += ts.next().text;
        if (depth == 0 && (ts.at(Tok::Semi) || ts.at(Tok::Comma) || ts.at(Tok::RBrace))) break;
    }
    return parse_value_literal(spec, text);
}

DomainValue read_domain_value(TokenStream& ts) {
    if (ts.at(Tok::Int)) return static_cast<std::int64_t>(std::stoll(ts.next().text));
    if (ts.at(Tok::Ident)) return ts.next().text;
    ts.fail("expected a domain value (integer or symbol)");
}

std::vector<DomainValue> read_domain(TokenStream& ts) {
    std::vector<DomainValue> domain;
    if (ts.at(Tok::Int) && ts.peek(1).kind == Tok::DotDot) {
        std::int64_t lo = std::stoll(ts.next().text);
        ts.next(); // ..
        if (!ts.at(Tok::Int)) ts.fail("expected range upper bound");
        std::int64_t hi = std::stoll(ts.next().text);
        if (hi < lo) ts.fail("empty range");
        for (std::int64_t v = lo; v <= hi; ++v) domain.push_back(v);
        return domain;
    }
    ts.expect(Tok::LBrace, "'{' or integer range");
    domain.push_back(read_domain_value(ts));
    while (ts.accept(Tok::Comma)) domain.push_back(read_domain_value(ts));
    ts.expect(Tok::RBrace, "'}'");
    return domain;
}

std::vector<std::string> read_name_set(TokenStream& ts) {
    ts.expect(Tok::LBrace, "'{'");
    std::vector<std::string> names;
    if (!ts.at(Tok::RBrace)) {
        names.push_back(ts.expect_ident("name"));
        while (ts.accept(Tok::Comma)) names.push_back(ts.expect_ident("name"));
    }
    ts.expect(Tok::RBrace, "'}'");
    return names;
}

} // namespace

const Constraint& ProblemFile::constraint(const std::string& name) const {
    auto it = constraints.find(name);
    if (it == constraints.end()) throw Error("unknown constraint '" + name + "'");
    return it->second;
}

ProblemFile parse_problem(const std::string& text) {
    TokenStream ts(tokenize(text));

    std::optional<SpecPtr> spec;
    std::vector<VariableDecl> vars;
    std::vector<ConstraintDecl> decls;
    std::optional<std::vector<std::string>> con;
    std::optional<RefinementSection> refinement;
    std::optional<Program> program;

    auto refine_section = [&]() -> RefinementSection& {
        if (!refinement) refinement = RefinementSection{};
        return *refinement;
    };

    while (!ts.at(Tok::End)) {
        if (ts.accept_ident("semiring")) {
            if (spec) ts.fail("duplicate semiring section");
            // the spec literal runs until ';'
            std::string lit;
            int depth = 0;
            while (!(depth == 0 && ts.at(Tok::Semi))) {
                if (ts.at(Tok::End)) ts.fail("unterminated semiring declaration");
                if (ts.at(Tok::LParen) || ts.at(Tok::LBrace)) ++depth;
                if (ts.at(Tok::RParen) || ts.at(Tok::RBrace)) --depth;
                lit += ts.next().text;
                // keep a separator between adjacent identifiers
                if (ts.at(Tok::Ident) && !lit.empty() &&
                    (std::isalnum(static_cast<unsigned char>(lit.back())) || lit.back() == '_'))
                    lit += ' ';
            }
            ts.expect(Tok::Semi, "';'");
            spec = parse_spec_literal(lit);
            continue;
        }
        if (ts.at_ident("var") || ts.at_ident("fresh")) {
            bool fresh = ts.next().text == "fresh";
            std::string name = ts.expect_ident("variable name");
            check_name(name, "variable");
            ts.expect_word("in");
            std::vector<DomainValue> domain = read_domain(ts);
            ts.expect(Tok::Semi, "';'");
            vars.push_back(VariableDecl{std::move(name), std::move(domain), fresh});
            continue;
        }
        if (ts.accept_ident("constraint")) {
            if (!spec) ts.fail("declare the semiring before constraints");
            ConstraintDecl decl;
            decl.name = ts.expect_ident("constraint name");
            check_name(decl.name, "constraint");
            ts.expect(Tok::LParen, "'('");
            if (!ts.at(Tok::RParen)) {
                decl.params.push_back(ts.expect_ident("parameter"));
                while (ts.accept(Tok::Comma)) decl.params.push_back(ts.expect_ident("parameter"));
            }
            ts.expect(Tok::RParen, "')'");
            ts.expect(Tok::Eq, "'='");
            if (ts.accept_ident("table")) {
                decl.is_table = true;
                ts.expect(Tok::LBrace, "'{'");
                while (!ts.at(Tok::RBrace)) {
                    std::vector<DomainValue> key;
                    ts.expect(Tok::LParen, "'('");
                    if (!ts.at(Tok::RParen)) {
                        key.push_back(read_domain_value(ts));
                        while (ts.accept(Tok::Comma)) key.push_back(read_domain_value(ts));
                    }
                    ts.expect(Tok::RParen, "')'");
                    ts.expect(Tok::Colon, "':'");
                    SemiringValue v = read_value(ts, *spec);
                    decl.rows.emplace_back(std::move(key), std::move(v));
                    if (!ts.accept(Tok::Comma)) break;
                }
                ts.expect(Tok::RBrace, "'}'");
            } else {
                decl.expr = parse_expression(ts);
            }
            ts.expect(Tok::Semi, "';'");
            decls.push_back(std::move(decl));
            continue;
        }
        if (ts.accept_ident("con")) {
            if (con) ts.fail("duplicate con section");
            ts.expect(Tok::Eq, "'='");
            con = read_name_set(ts);
            ts.expect(Tok::Semi, "';'");
            continue;
        }
        if (ts.accept_ident("implement")) {
            auto& r = refine_section();
            if (!r.implement.empty()) ts.fail("duplicate implement section");
            r.implement = read_name_set(ts);
            ts.expect(Tok::Semi, "';'");
            continue;
        }
        if (ts.accept_ident("require")) {
            auto& r = refine_section();
            if (!r.require.empty()) ts.fail("duplicate require section");
            r.require = ts.expect_ident("constraint name");
            ts.expect(Tok::Semi, "';'");
            continue;
        }
        if (ts.accept_ident("interface")) {
            auto& r = refine_section();
            if (!r.interface.empty()) ts.fail("duplicate interface section");
            r.interface = read_name_set(ts);
            ts.expect(Tok::Semi, "';'");
            continue;
        }
        if (ts.accept_ident("orientation")) {
            auto& r = refine_section();
            if (r.orientation) ts.fail("duplicate orientation section");
            std::string o = ts.expect_ident("orientation");
            if (o == "impl_refines_req")
                r.orientation = RefinementOrientation::ImplRefinesReq;
            else if (o == "req_refines_impl")
                r.orientation = RefinementOrientation::ReqRefinesImpl;
            else
                ts.fail("orientation must be impl_refines_req or req_refines_impl");
            ts.expect(Tok::Semi, "';'");
            continue;
        }
        if (ts.at_ident("proc") || ts.at_ident("agent")) {
            if (!spec) ts.fail("declare the semiring before the agent section");
            if (program) ts.fail("duplicate agent section");
            program = parse_program_tokens(ts, *spec);
            continue;
        }
        ts.fail("expected a section keyword");
    }

    if (!spec) throw Error("problem file has no semiring declaration");

    ProblemFile p;
    p.space = ConstraintSpace::create(*spec, std::move(vars));
    p.declarations = std::move(decls);
    p.con = std::move(con);
    p.refinement = std::move(refinement);
    p.program = std::move(program);

    for (const auto& decl : p.declarations) {
        if (p.constraints.count(decl.name)) throw Error("duplicate constraint '" + decl.name + "'");
        for (const auto& param : decl.params) p.space->index_of(param); // validate
        if (decl.is_table) {
            std::map<std::vector<std::size_t>, SemiringValue> byIndex;
            // params in declared order; table storage uses space order
            std::vector<int> idxs;
            for (const auto& param : decl.params) idxs.push_back(p.space->index_of(param));
            for (const auto& [key, value] : decl.rows) {
                if (key.size() != decl.params.size())
                    throw Error("table row arity mismatch in '" + decl.name + "'");
                std::vector<std::size_t> pos(key.size());
                for (std::size_t i = 0; i < key.size(); ++i)
                    pos[i] = p.space->domain_index(idxs[i], key[i]);
                if (!byIndex.emplace(pos, value).second)
                    throw Error("duplicate table row in '" + decl.name + "'");
            }
            Constraint c = Constraint::build(
                p.space, decl.params, [&](const std::vector<DomainValue>& args) -> SemiringValue {
                    std::vector<std::size_t> pos(args.size());
                    for (std::size_t i = 0; i < args.size(); ++i)
                        pos[i] = p.space->domain_index(idxs[i], args[i]);
                    auto it = byIndex.find(pos);
                    if (it == byIndex.end()) {
                        std::string tuple;
                        for (const auto& a : args) tuple += (tuple.empty() ? "" : ",") + domain_value_to_string(a);
                        throw Error("table '" + decl.name + "' is missing row (" + tuple + ")");
                    }
                    return it->second;
                });
            p.constraints.emplace(decl.name, std::move(c));
        } else {
            p.constraints.emplace(decl.name, compile_expression(decl.expr, decl.params, p.space));
        }
    }

    // Resolve names across sections.
    if (p.con)
        for (const auto& v : *p.con) p.space->index_of(v);
    if (p.refinement) {
        for (const auto& c : p.refinement->implement) p.constraint(c);
        if (!p.refinement->require.empty()) p.constraint(p.refinement->require);
        for (const auto& v : p.refinement->interface) p.space->index_of(v);
    }
    if (p.program) {
        // named constraint references and scalar-threshold names must resolve
        std::vector<AgentPtr> stack = {p.program->main};
        for (const auto& d : p.program->declarations) stack.push_back(d.body);
        while (!stack.empty()) {
            AgentPtr a = stack.back();
            stack.pop_back();
            if (!a) continue;
            bool checked = a->kind == Agent::Kind::Tell || a->kind == Agent::Kind::Retract ||
                           a->kind == Agent::Kind::Update || a->kind == Agent::Kind::Ask ||
                           a->kind == Agent::Kind::Nask;
            if (checked) {
                if (a->cref.kind == ConstraintRef::Kind::Named) p.constraint(a->cref.name);
                for (const Threshold* t : {&a->arrow.lower, &a->arrow.upper})
                    if (std::holds_alternative<ConstraintRef>(*t))
                        p.constraint(std::get<ConstraintRef>(*t).name);
            }
            for (const auto& v : a->update_vars) p.space->index_of(v);
            if (a->kind == Agent::Kind::Call)
                for (const auto& v : a->actuals) p.space->index_of(v);
            stack.push_back(a->cont);
            stack.push_back(a->left);
            stack.push_back(a->right);
            stack.push_back(a->body);
            for (const auto& m : a->members) stack.push_back(m);
        }
    }
    return p;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_problem(buf.str());
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

std::string problem_to_string(const ProblemFile& p) {
    std::ostringstream out;
    out << "semiring " << p.space->spec()->to_string() << ";\n";

    for (const auto& v : p.space->variables()) {
        out << (v.fresh ? "fresh " : "var ") << v.name << " in ";
        // contiguous integer ranges print as lo..hi
        bool range = v.domain.size() > 1 && std::holds_alternative<std::int64_t>(v.domain[0]);
        if (range) {
            std::int64_t lo = std::get<std::int64_t>(v.domain[0]);
            for (std::size_t i = 0; i < v.domain.size() && range; ++i)
                range = std::holds_alternative<std::int64_t>(v.domain[i]) &&
                        std::get<std::int64_t>(v.domain[i]) == lo + static_cast<std::int64_t>(i);
        }
        if (range) {
            out << std::get<std::int64_t>(v.domain.front()) << ".."
                << std::get<std::int64_t>(v.domain.back());
        } else {
            out << "{";
            for (std::size_t i = 0; i < v.domain.size(); ++i) {
                if (i) out << ", ";
                out << domain_value_to_string(v.domain[i]);
            }
            out << "}";
        }
        out << ";\n";
    }

    for (const auto& decl : p.declarations) {
        out << "constraint " << decl.name << "(";
        for (std::size_t i = 0; i < decl.params.size(); ++i) {
            if (i) out << ", ";
            out << decl.params[i];
        }
        out << ") = ";
        if (decl.is_table) {
            out << "table { ";
            for (std::size_t r = 0; r < decl.rows.size(); ++r) {
                if (r) out << ", ";
                out << "(";
                const auto& key = decl.rows[r].first;
                for (std::size_t i = 0; i < key.size(); ++i) {
                    if (i) out << ",";
                    out << domain_value_to_string(key[i]);
                }
                out << "): " << decl.rows[r].second.to_literal();
            }
            out << " }";
        } else {
            out << expr_to_string(decl.expr);
        }
        out << ";\n";
    }

    if (p.con) {
        out << "con = {";
        for (std::size_t i = 0; i < p.con->size(); ++i) {
            if (i) out << ", ";
            out << (*p.con)[i];
        }
        out << "};\n";
    }
    if (p.refinement) {
        const auto& r = *p.refinement;
        if (!r.implement.empty()) {
            out << "implement {";
            for (std::size_t i = 0; i < r.implement.size(); ++i) {
                if (i) out << ", ";
                out << r.implement[i];
            }
            out << "};\n";
        }
        if (!r.require.empty()) out << "require " << r.require << ";\n";
        if (!r.interface.empty()) {
            out << "interface {";
            for (std::size_t i = 0; i < r.interface.size(); ++i) {
                if (i) out << ", ";
                out << r.interface[i];
            }
            out << "};\n";
        }
        if (r.orientation)
            out << "orientation "
                << (*r.orientation == RefinementOrientation::ImplRefinesReq ? "impl_refines_req"
                                                                            : "req_refines_impl")
                << ";\n";
    }
    if (p.program) out << pretty(*p.program) << "\n";
    return out.str();
}

} // namespace softqos
