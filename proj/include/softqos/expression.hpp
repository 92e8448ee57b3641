#pragma once

#include "softqos/constraint.hpp"
#include "softqos/lexer.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace softqos {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Intensional constraint body. Numeric arithmetic over variables, boolean
/// comparisons and connectives, piecewise `cases`, plus set/tuple literals
/// so results can land in every semiring carrier. Identifiers that are not
/// space variables denote domain symbols and may only be compared for
/// (in)equality against a variable.
struct Expr {
    enum class Op {
        Number,   // numeric literal (also `inf`)
        Bool,     // true / false
        Name,     // variable reference or domain symbol
        SetLit,   // {p, q}
        TupleLit, // (e1, e2, ...)
        Add, Sub, Mul, Div,
        Le, Lt, Ge, Gt, EqCmp, NeCmp,
        And, Or, Not,
        Cases,
    };

    Op op;
    double number = 0;
    bool flag = false;
    std::string name;
    std::vector<std::string> set_symbols;
    std::vector<ExprPtr> kids;
    std::vector<std::pair<ExprPtr, ExprPtr>> branches; // Cases: (condition, result)
    ExprPtr otherwise;                                 // Cases: optional else result
};

ExprPtr parse_expression(const std::string& text);
/// Parses from an existing stream, stopping at the first token that cannot
/// extend the expression.
ExprPtr parse_expression(TokenStream& ts);

/// Canonical rendering; parses back to the same tree shape modulo
/// parenthesization.
std::string expr_to_string(const ExprPtr& e);

/// Tabulates the expression over every tuple of the named support variables
/// and maps results into the space's semiring. Boolean results map to one /
/// zero; numeric results must lie in the instance carrier.
Constraint compile_expression(const ExprPtr& e, const std::vector<std::string>& support,
                              const SpacePtr& space);

} // namespace softqos
