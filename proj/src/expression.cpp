#include "softqos/expression.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace softqos {

namespace {

ExprPtr make(Expr e) { return std::make_shared<Expr>(std::move(e)); }

ExprPtr mk_num(double v) {
    Expr e;
    e.op = Expr::Op::Number;
    e.number = v;
    return make(std::move(e));
}

ExprPtr mk_binary(Expr::Op op, ExprPtr a, ExprPtr b) {
    Expr e;
    e.op = op;
    e.kids = {std::move(a), std::move(b)};
    return make(std::move(e));
}

// precedence: or < and < not < comparison < add/sub < mul/div < primary
ExprPtr parse_or(TokenStream& ts);

ExprPtr parse_primary(TokenStream& ts) {
    if (ts.at(Tok::Int) || ts.at(Tok::Float)) {
        double v = std::stod(ts.next().text);
        return mk_num(v);
    }
    if (ts.at(Tok::LParen)) {
        ts.next();
        std::vector<ExprPtr> elems;
        elems.push_back(parse_or(ts));
        while (ts.accept(Tok::Comma)) elems.push_back(parse_or(ts));
        ts.expect(Tok::RParen, "')'");
        if (elems.size() == 1) return elems[0];
        Expr e;
        e.op = Expr::Op::TupleLit;
        e.kids = std::move(elems);
        return make(std::move(e));
    }
    if (ts.at(Tok::LBrace)) {
        ts.next();
        Expr e;
        e.op = Expr::Op::SetLit;
        if (!ts.at(Tok::RBrace)) {
            e.set_symbols.push_back(ts.expect_ident("symbol"));
            while (ts.accept(Tok::Comma)) e.set_symbols.push_back(ts.expect_ident("symbol"));
        }
        ts.expect(Tok::RBrace, "'}'");
        return make(std::move(e));
    }
    if (ts.at(Tok::Ident)) {
        const std::string& word = ts.peek().text;
        if (word == "inf") {
            ts.next();
            return mk_num(std::numeric_limits<double>::infinity());
        }
        if (word == "true" || word == "false") {
            Expr e;
            e.op = Expr::Op::Bool;
            e.flag = word == "true";
            ts.next();
            return make(std::move(e));
        }
        if (word == "not") {
            ts.next();
            Expr e;
            e.op = Expr::Op::Not;
            e.kids = {parse_primary(ts)};
            return make(std::move(e));
        }
        if (word == "cases") {
            ts.next();
            ts.expect(Tok::LBrace, "'{'");
            Expr e;
            e.op = Expr::Op::Cases;
            while (true) {
                if (ts.accept_ident("else")) {
                    ts.expect(Tok::Colon, "':'");
                    e.otherwise = parse_or(ts);
                    ts.accept(Tok::Semi);
                    break;
                }
                ExprPtr cond = parse_or(ts);
                ts.expect(Tok::Colon, "':'");
                ExprPtr result = parse_or(ts);
                e.branches.emplace_back(std::move(cond), std::move(result));
                if (!ts.accept(Tok::Semi)) break;
                if (ts.at(Tok::RBrace)) break;
            }
            ts.expect(Tok::RBrace, "'}'");
            return make(std::move(e));
        }
        Expr e;
        e.op = Expr::Op::Name;
        e.name = ts.next().text;
        return make(std::move(e));
    }
    ts.fail("expected expression");
}

ExprPtr parse_mul(TokenStream& ts) {
    ExprPtr lhs = parse_primary(ts);
    while (ts.at(Tok::Star) || ts.at(Tok::Slash)) {
        Expr::Op op = ts.next().kind == Tok::Star ? Expr::Op::Mul : Expr::Op::Div;
        lhs = mk_binary(op, std::move(lhs), parse_primary(ts));
    }
    return lhs;
}

ExprPtr parse_add(TokenStream& ts) {
    ExprPtr lhs = parse_mul(ts);
    while (ts.at(Tok::Plus) || ts.at(Tok::Minus)) {
        Expr::Op op = ts.next().kind == Tok::Plus ? Expr::Op::Add : Expr::Op::Sub;
        lhs = mk_binary(op, std::move(lhs), parse_mul(ts));
    }
    return lhs;
}

ExprPtr parse_cmp(TokenStream& ts) {
    ExprPtr lhs = parse_add(ts);
    Expr::Op op;
    switch (ts.peek().kind) {
    case Tok::Le: op = Expr::Op::Le; break;
    case Tok::Lt: op = Expr::Op::Lt; break;
    case Tok::Ge: op = Expr::Op::Ge; break;
    case Tok::Gt: op = Expr::Op::Gt; break;
    case Tok::EqEq: op = Expr::Op::EqCmp; break;
    case Tok::Neq: op = Expr::Op::NeCmp; break;
    default: return lhs;
    }
    ts.next();
    return mk_binary(op, std::move(lhs), parse_add(ts));
}

ExprPtr parse_and(TokenStream& ts) {
    ExprPtr lhs = parse_cmp(ts);
    while (ts.accept_ident("and")) lhs = mk_binary(Expr::Op::And, std::move(lhs), parse_cmp(ts));
    return lhs;
}

ExprPtr parse_or(TokenStream& ts) {
    ExprPtr lhs = parse_and(ts);
    while (true) {
        if (ts.accept(Tok::Bar2) || ts.accept_ident("or"))
            lhs = mk_binary(Expr::Op::Or, std::move(lhs), parse_and(ts));
        else
            return lhs;
    }
}

// ---------------------------------------------------------------------------
// Evaluation

struct EvalValue {
    enum class Kind { Num, Bool, Symbol, Set, Tuple } kind;
    double num = 0;
    bool flag = false;
    std::string symbol;
    std::vector<std::string> set;
    std::vector<EvalValue> tuple;
};

[[noreturn]] void eval_fail(const std::string& msg) { throw Error("expression error: " + msg); }

EvalValue evaluate(const Expr& e, const std::map<std::string, DomainValue>& bindings) {
    auto num_of = [&](const ExprPtr& k) {
        EvalValue v = evaluate(*k, bindings);
        if (v.kind != EvalValue::Kind::Num)
            eval_fail("arithmetic on a non-numeric operand");
        return v.num;
    };
    auto bool_of = [&](const ExprPtr& k) {
        EvalValue v = evaluate(*k, bindings);
        if (v.kind != EvalValue::Kind::Bool)
            eval_fail("logical operator on a non-boolean operand");
        return v.flag;
    };

    switch (e.op) {
    case Expr::Op::Number: return {EvalValue::Kind::Num, e.number, false, {}, {}, {}};
    case Expr::Op::Bool: return {EvalValue::Kind::Bool, 0, e.flag, {}, {}, {}};
    case Expr::Op::Name: {
        auto it = bindings.find(e.name);
        if (it != bindings.end()) {
            if (std::holds_alternative<std::int64_t>(it->second))
                return {EvalValue::Kind::Num, static_cast<double>(std::get<std::int64_t>(it->second)),
                        false, {}, {}, {}};
            return {EvalValue::Kind::Symbol, 0, false, std::get<std::string>(it->second), {}, {}};
        }
        return {EvalValue::Kind::Symbol, 0, false, e.name, {}, {}};
    }
    case Expr::Op::SetLit: return {EvalValue::Kind::Set, 0, false, {}, e.set_symbols, {}};
    case Expr::Op::TupleLit: {
        EvalValue v{EvalValue::Kind::Tuple, 0, false, {}, {}, {}};
        for (const auto& k : e.kids) v.tuple.push_back(evaluate(*k, bindings));
        return v;
    }
    case Expr::Op::Add: return {EvalValue::Kind::Num, num_of(e.kids[0]) + num_of(e.kids[1]), false, {}, {}, {}};
    case Expr::Op::Sub: return {EvalValue::Kind::Num, num_of(e.kids[0]) - num_of(e.kids[1]), false, {}, {}, {}};
    case Expr::Op::Mul: return {EvalValue::Kind::Num, num_of(e.kids[0]) * num_of(e.kids[1]), false, {}, {}, {}};
    case Expr::Op::Div: {
        double d = num_of(e.kids[1]);
        if (d == 0) eval_fail("division by zero");
        return {EvalValue::Kind::Num, num_of(e.kids[0]) / d, false, {}, {}, {}};
    }
    case Expr::Op::Le:
    case Expr::Op::Lt:
    case Expr::Op::Ge:
    case Expr::Op::Gt:
    case Expr::Op::EqCmp:
    case Expr::Op::NeCmp: {
        EvalValue a = evaluate(*e.kids[0], bindings);
        EvalValue b = evaluate(*e.kids[1], bindings);
        if (a.kind == EvalValue::Kind::Symbol || b.kind == EvalValue::Kind::Symbol) {
            if (a.kind != EvalValue::Kind::Symbol || b.kind != EvalValue::Kind::Symbol)
                eval_fail("symbol compared against a number");
            if (e.op != Expr::Op::EqCmp && e.op != Expr::Op::NeCmp)
                eval_fail("symbols admit only == and !=");
            bool eq = a.symbol == b.symbol;
            return {EvalValue::Kind::Bool, 0, e.op == Expr::Op::EqCmp ? eq : !eq, {}, {}, {}};
        }
        if (a.kind != EvalValue::Kind::Num || b.kind != EvalValue::Kind::Num)
            eval_fail("comparison on non-numeric operands");
        bool r = false;
        switch (e.op) {
        case Expr::Op::Le: r = a.num <= b.num; break;
        case Expr::Op::Lt: r = a.num < b.num; break;
        case Expr::Op::Ge: r = a.num >= b.num; break;
        case Expr::Op::Gt: r = a.num > b.num; break;
        case Expr::Op::EqCmp: r = a.num == b.num; break;
        case Expr::Op::NeCmp: r = a.num != b.num; break;
        default: break;
        }
        return {EvalValue::Kind::Bool, 0, r, {}, {}, {}};
    }
    case Expr::Op::And: return {EvalValue::Kind::Bool, 0, bool_of(e.kids[0]) && bool_of(e.kids[1]), {}, {}, {}};
    case Expr::Op::Or: return {EvalValue::Kind::Bool, 0, bool_of(e.kids[0]) || bool_of(e.kids[1]), {}, {}, {}};
    case Expr::Op::Not: return {EvalValue::Kind::Bool, 0, !bool_of(e.kids[0]), {}, {}, {}};
    case Expr::Op::Cases: {
        for (const auto& [cond, result] : e.branches)
            if (bool_of(cond)) return evaluate(*result, bindings);
        if (!e.otherwise) eval_fail("no case matched and there is no else branch");
        return evaluate(*e.otherwise, bindings);
    }
    }
    eval_fail("unreachable");
}

SemiringValue to_semiring(const EvalValue& v, const SpecPtr& spec) {
    if (v.kind == EvalValue::Kind::Bool) return v.flag ? one(spec) : zero(spec);
    switch (spec->kind()) {
    case SemiringKind::Weighted:
    case SemiringKind::Fuzzy:
    case SemiringKind::Probabilistic: {
        if (v.kind != EvalValue::Kind::Num)
            eval_fail("expected a numeric result for " + spec->to_string());
        double d = v.num;
        if (spec->kind() != SemiringKind::Weighted) {
            if (d < -1e-12 || d > 1.0 + 1e-12)
                eval_fail("result " + std::to_string(d) + " outside [0,1]");
            d = std::clamp(d, 0.0, 1.0);
        }
        return SemiringValue::number(spec, d);
    }
    case SemiringKind::Classical: {
        if (v.kind == EvalValue::Kind::Num && (v.num == 0.0 || v.num == 1.0))
            return SemiringValue::boolean(spec, v.num == 1.0);
        eval_fail("expected a boolean result for classical");
    }
    case SemiringKind::SetBased: {
        if (v.kind != EvalValue::Kind::Set) eval_fail("expected a set literal result");
        return SemiringValue::symbols(spec, v.set);
    }
    case SemiringKind::Product: {
        if (v.kind != EvalValue::Kind::Tuple) eval_fail("expected a tuple result for a product semiring");
        const auto& comps = spec->components();
        if (v.tuple.size() != comps.size()) eval_fail("tuple result arity mismatch");
        std::vector<SemiringValue> parts;
        for (std::size_t i = 0; i < comps.size(); ++i) parts.push_back(to_semiring(v.tuple[i], comps[i]));
        return SemiringValue::tuple(spec, std::move(parts));
    }
    }
    eval_fail("unreachable");
}

// Static sanity pass: every Name must be a declared variable, or a symbol
// appearing as an (in)equality operand against a variable whose domain
// contains it.
void check_names(const Expr& e, const ConstraintSpace& space, bool symbolOk) {
    if (e.op == Expr::Op::Name) {
        if (space.find(e.name)) return;
        if (!symbolOk) throw Error("unknown identifier '" + e.name + "' in constraint expression");
        return;
    }
    bool cmp = e.op == Expr::Op::EqCmp || e.op == Expr::Op::NeCmp;
    for (const auto& k : e.kids) check_names(*k, space, cmp);
    for (const auto& [cond, result] : e.branches) {
        check_names(*cond, space, false);
        check_names(*result, space, false);
    }
    if (e.otherwise) check_names(*e.otherwise, space, false);
}

int precedence(Expr::Op op) {
    switch (op) {
    case Expr::Op::Or: return 1;
    case Expr::Op::And: return 2;
    case Expr::Op::Le:
    case Expr::Op::Lt:
    case Expr::Op::Ge:
    case Expr::Op::Gt:
    case Expr::Op::EqCmp:
    case Expr::Op::NeCmp: return 3;
    case Expr::Op::Add:
    case Expr::Op::Sub: return 4;
    case Expr::Op::Mul:
    case Expr::Op::Div: return 5;
    default: return 6;
    }
}

void render(const Expr& e, std::ostringstream& out, int parent) {
    int prec = precedence(e.op);
    auto wrap = prec < parent;

    auto binary = [&](const char* sym) {
        if (wrap) out << "(";
        render(*e.kids[0], out, prec);
        out << " " << sym << " ";
        render(*e.kids[1], out, prec + 1); // left-associative
        if (wrap) out << ")";
    };

    switch (e.op) {
    case Expr::Op::Number: {
        if (std::isinf(e.number)) {
            out << "inf";
        } else if (e.number == std::floor(e.number) && std::abs(e.number) < 1e15) {
            out << static_cast<long long>(e.number);
        } else {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << e.number;
            out << tmp.str();
        }
        return;
    }
    case Expr::Op::Bool: out << (e.flag ? "true" : "false"); return;
    case Expr::Op::Name: out << e.name; return;
    case Expr::Op::SetLit: {
        out << "{";
        for (std::size_t i = 0; i < e.set_symbols.size(); ++i) {
            if (i) out << ", ";
            out << e.set_symbols[i];
        }
        out << "}";
        return;
    }
    case Expr::Op::TupleLit: {
        out << "(";
        for (std::size_t i = 0; i < e.kids.size(); ++i) {
            if (i) out << ", ";
            render(*e.kids[i], out, 0);
        }
        out << ")";
        return;
    }
    case Expr::Op::Add: binary("+"); return;
    case Expr::Op::Sub: binary("-"); return;
    case Expr::Op::Mul: binary("*"); return;
    case Expr::Op::Div: binary("/"); return;
    case Expr::Op::Le: binary("<="); return;
    case Expr::Op::Lt: binary("<"); return;
    case Expr::Op::Ge: binary(">="); return;
    case Expr::Op::Gt: binary(">"); return;
    case Expr::Op::EqCmp: binary("=="); return;
    case Expr::Op::NeCmp: binary("!="); return;
    case Expr::Op::And: binary("and"); return;
    case Expr::Op::Or: binary("||"); return;
    case Expr::Op::Not:
        out << "not ";
        render(*e.kids[0], out, 6);
        return;
    case Expr::Op::Cases: {
        out << "cases { ";
        for (const auto& [cond, result] : e.branches) {
            render(*cond, out, 0);
            out << " : ";
            render(*result, out, 0);
            out << "; ";
        }
        if (e.otherwise) {
            out << "else : ";
            render(*e.otherwise, out, 0);
            out << " ";
        }
        out << "}";
        return;
    }
    }
}

} // namespace

ExprPtr parse_expression(TokenStream& ts) { return parse_or(ts); }

ExprPtr parse_expression(const std::string& text) {
    TokenStream ts(tokenize(text));
    ExprPtr e = parse_or(ts);
    if (!ts.at(Tok::End)) ts.fail("trailing tokens after expression");
    return e;
}

std::string expr_to_string(const ExprPtr& e) {
    std::ostringstream out;
    render(*e, out, 0);
    return out.str();
}

Constraint compile_expression(const ExprPtr& e, const std::vector<std::string>& support,
                              const SpacePtr& space) {
    check_names(*e, *space, false);
    return Constraint::build(space, support, [&](const std::vector<DomainValue>& args) {
        std::map<std::string, DomainValue> bindings;
        for (std::size_t i = 0; i < support.size(); ++i) bindings[support[i]] = args[i];
        return to_semiring(evaluate(*e, bindings), space->spec());
    });
}

} // namespace softqos
