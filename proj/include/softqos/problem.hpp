#pragma once

#include "softqos/ast.hpp"
#include "softqos/constraint.hpp"
#include "softqos/expression.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace softqos {

/// How a constraint was written, kept for canonical printing.
struct ConstraintDecl {
    std::string name;
    std::vector<std::string> params;
    ExprPtr expr;                           // intensional / piecewise body, or
    bool is_table = false;                  // extensional rows
    std::vector<std::pair<std::vector<DomainValue>, SemiringValue>> rows;
};

enum class RefinementOrientation { ImplRefinesReq, ReqRefinesImpl };

struct RefinementSection {
    std::vector<std::string> implement;
    std::string require;
    std::vector<std::string> interface;
    std::optional<RefinementOrientation> orientation;
};

/// One parsed problem file: semiring header, variable and fresh-pool
/// declarations, named constraints, and the optional con / refinement /
/// agent sections. Each subcommand uses the sections it needs.
struct ProblemFile {
    SpacePtr space;
    std::vector<ConstraintDecl> declarations;        // in file order
    std::map<std::string, Constraint> constraints;   // compiled tables
    std::optional<std::vector<std::string>> con;
    std::optional<RefinementSection> refinement;
    std::optional<Program> program;

    const Constraint& constraint(const std::string& name) const;
};

ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::string& path);

/// Canonical file text; parses back to an equivalent problem.
std::string problem_to_string(const ProblemFile& p);

} // namespace softqos
