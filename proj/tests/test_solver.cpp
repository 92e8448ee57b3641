#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "softqos/problem.hpp"
#include "softqos/solver.hpp"
#include "test_helpers.hpp"

using namespace softqos;

namespace {

Scsp corpus_scsp(const ProblemFile& p) {
    Scsp problem{p.space, {}, p.con.value()};
    for (const auto& decl : p.declarations) problem.constraints.push_back(p.constraint(decl.name));
    return problem;
}

std::vector<std::string> best_keys(const SolutionReport& r) {
    std::vector<std::string> out;
    for (const auto& eta : r.best) out.push_back(eta.to_string());
    return out;
}

} // namespace

TEST_CASE("the worked weighted problem solves to blevel 7, best X=a") {
    ProblemFile p = load_problem(std::string(SOFTQOS_CORPUS_DIR) + "/fig1.sq");
    SolutionReport report = solve(corpus_scsp(p));
    CHECK(report.blevel.num() == 7);
    Assignment xa, xb;
    xa.bind("X", std::string("a"));
    xb.bind("X", std::string("b"));
    CHECK(report.solution.eval(xa).num() == 7);
    CHECK(report.solution.eval(xb).num() == 16);
    CHECK(best_keys(report) == std::vector<std::string>{"X=a"});

    CHECK(alpha_consistent(corpus_scsp(p), SemiringValue::number(p.space->spec(), 7)));
    CHECK_FALSE(alpha_consistent(corpus_scsp(p), SemiringValue::number(p.space->spec(), 6)));
    CHECK(consistent(corpus_scsp(p)));
}

TEST_CASE("empty constraint set solves to the one-constant") {
    for (const auto& spec : testutil::all_specs()) {
        auto space = testutil::small_space(spec, 1, 3);
        SolutionReport report = solve(Scsp{space, {}, {"v0"}});
        CHECK(equal(report.blevel, one(spec)));
        CHECK(report.best.size() == 3); // every tuple achieves the top
    }
}

TEST_CASE("a zero-constant constraint makes the problem inconsistent") {
    auto space = testutil::small_space(SemiringSpec::classical(), 2, 2);
    Scsp p{space, {Constraint::constant(space, zero(space->spec()))}, {"v0"}};
    CHECK_FALSE(consistent(p));
    CHECK(alpha_consistent(p, zero(space->spec())));

    // contradictory crisp tables: v0 = 0 and v0 = 1
    auto eqConst = [&](std::int64_t want) {
        return Constraint::build(space, {"v0"}, [&](const std::vector<DomainValue>& t) {
            return SemiringValue::boolean(space->spec(), std::get<std::int64_t>(t[0]) == want);
        });
    };
    CHECK_FALSE(consistent(Scsp{space, {eqConst(0), eqConst(1)}, {"v0"}}));
}

TEST_CASE("blevel does not depend on con, and constraints only lower it") {
    std::mt19937 rng(99);
    for (const auto& spec : testutil::all_specs()) {
        auto space = testutil::small_space(spec, 3, 2);
        for (int i = 0; i < 15; ++i) {
            std::vector<Constraint> cs;
            for (int k = 0; k < 3; ++k) cs.push_back(testutil::random_constraint(space, rng));
            SolutionReport narrow = solve(Scsp{space, cs, {"v0"}});
            SolutionReport wide = solve(Scsp{space, cs, {"v0", "v1", "v2"}});
            SolutionReport empty = solve(Scsp{space, cs, {}});
            CHECK(equal(narrow.blevel, wide.blevel));
            CHECK(equal(narrow.blevel, empty.blevel));

            std::vector<Constraint> more = cs;
            more.push_back(testutil::random_constraint(space, rng));
            CHECK(leq(solve(Scsp{space, more, {"v0"}}).blevel, narrow.blevel));
        }
    }
}

TEST_CASE("solve matches the brute-force oracle on random problems") {
    std::mt19937 rng(20260810);
    std::uniform_int_distribution<int> nvars(1, 4), domsize(2, 4), ncons(0, 5);
    for (const auto& spec : testutil::all_specs()) {
        for (int trial = 0; trial < 50; ++trial) {
            auto space = testutil::small_space(spec, nvars(rng), domsize(rng));
            std::vector<Constraint> cs;
            int n = ncons(rng);
            for (int k = 0; k < n; ++k) cs.push_back(testutil::random_constraint(space, rng));
            std::vector<std::string> con;
            std::uniform_int_distribution<int> coin(0, 1);
            for (const auto& v : space->variables())
                if (coin(rng)) con.push_back(v.name);

            SolutionReport got = solve(Scsp{space, cs, con});
            testutil::BruteSolution want = testutil::brute_solve(space, cs, con);

            CHECK(equal(got.blevel, want.blevel));
            CHECK(best_keys(got) == want.best);
            for (const auto& eta : testutil::all_assignments(space)) {
                Assignment proj;
                for (const auto& name : con) proj.bind(name, *eta.get(name));
                CHECK(equal(got.solution.eval(proj), want.solution.at(proj.to_string())));
            }
        }
    }
}

TEST_CASE("product-semiring problems report the full non-dominated set") {
    ProblemFile p = load_problem(std::string(SOFTQOS_CORPUS_DIR) + "/multicriteria.sq");
    SolutionReport report = solve(corpus_scsp(p));
    CHECK(best_keys(report) == std::vector<std::string>{"s=a", "s=b"});
    CHECK(report.blevel.to_literal() == "(3, 0.9)");
}
