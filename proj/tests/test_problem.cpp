#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "softqos/problem.hpp"
#include "softqos/repl.hpp"

#include <filesystem>

using namespace softqos;

namespace {

std::string corpus(const char* name) { return std::string(SOFTQOS_CORPUS_DIR) + "/" + name; }

std::vector<std::string> corpus_files() {
    std::vector<std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(SOFTQOS_CORPUS_DIR))
        if (entry.path().extension() == ".sq") out.push_back(entry.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

bool same_problem(const ProblemFile& a, const ProblemFile& b) {
    if (!(*a.space == *b.space)) return false;
    if (a.constraints.size() != b.constraints.size()) return false;
    for (const auto& [name, c] : a.constraints) {
        auto it = b.constraints.find(name);
        if (it == b.constraints.end() || !equal_constraint(c, it->second)) return false;
    }
    if (a.con != b.con) return false;
    if (a.refinement.has_value() != b.refinement.has_value()) return false;
    if (a.refinement) {
        if (a.refinement->implement != b.refinement->implement) return false;
        if (a.refinement->require != b.refinement->require) return false;
        if (a.refinement->interface != b.refinement->interface) return false;
        if (a.refinement->orientation != b.refinement->orientation) return false;
    }
    if (a.program.has_value() != b.program.has_value()) return false;
    if (a.program) {
        if (!same_agent(a.program->main, b.program->main)) return false;
        if (a.program->declarations.size() != b.program->declarations.size()) return false;
        for (std::size_t i = 0; i < a.program->declarations.size(); ++i) {
            if (a.program->declarations[i].name != b.program->declarations[i].name) return false;
            if (a.program->declarations[i].formals != b.program->declarations[i].formals) return false;
            if (!same_agent(a.program->declarations[i].body, b.program->declarations[i].body)) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("every shipped corpus file parses, prints and re-parses identically") {
    auto files = corpus_files();
    REQUIRE(files.size() >= 8);
    for (const auto& path : files) {
        CAPTURE(path);
        ProblemFile p = load_problem(path);
        std::string text = problem_to_string(p);
        ProblemFile reparsed = parse_problem(text);
        CHECK(same_problem(p, reparsed));
        CHECK(problem_to_string(reparsed) == text); // fixpoint
    }
}

TEST_CASE("header parsing details") {
    ProblemFile p = parse_problem("semiring product(weighted, fuzzy);\n"
                                  "var s in {a, b};\n"
                                  "constraint q(s) = table { (a): (3, 0.5), (b): (inf, 1) };\n");
    CHECK(p.space->spec()->kind() == SemiringKind::Product);
    Assignment eta;
    eta.bind("s", std::string("b"));
    CHECK(p.constraint("q").eval(eta).to_literal() == "(inf, 1)");

    ProblemFile ranges = parse_problem("semiring weighted;\nvar x in 3..5;\nfresh f in 3..5;\n");
    CHECK(ranges.space->variable(0).domain.size() == 3);
    CHECK(ranges.space->fresh_pool().size() == 1);

    ProblemFile sets = parse_problem("semiring set{p,q};\nvar x in {0, 1};\nconstraint c(x) = {p};\n");
    Assignment x0;
    x0.bind("x", std::int64_t{0});
    CHECK(sets.constraint("c").eval(x0).symbol_list() == std::vector<std::string>{"p"});
}

TEST_CASE("malformed files are rejected with positions") {
    CHECK_THROWS_AS(parse_problem("var x in 0..3;\n"), Error);                        // no semiring
    CHECK_THROWS_AS(parse_problem("semiring weighted;\nsemiring fuzzy;\n"), Error);   // duplicate
    CHECK_THROWS_AS(parse_problem("semiring weighted;\nvar x in 0..3;\nvar x in 0..3;\n"), Error);
    CHECK_THROWS_AS(parse_problem("semiring weighted;\nconstraint c() = 1\n"), Error); // missing ';'
    CHECK_THROWS_AS(parse_problem("semiring weighted;\nvar x in 5..3;\n"), Error);     // empty range
    CHECK_THROWS_AS(parse_problem("semiring weighted;\nconstraint c(y) = 1;\n"), Error); // unknown var
    CHECK_THROWS_AS(parse_problem("semiring weighted;\ncon = {x};\n"), Error);           // unknown con var
    CHECK_THROWS_AS(parse_problem("semiring weighted;\nvar x in 0..1;\nagent tell(c9) -[_,_]-> success\n"),
                    Error); // unresolved constraint in the agent
    CHECK_THROWS_AS(parse_problem("semiring classical;\nvar x in 0..1;\n"
                                  "constraint c(x) = table { (0): true };\n"),
                    Error); // missing table row
    CHECK_THROWS_AS(parse_problem("semiring classical;\nvar x in 0..1;\n"
                                  "constraint c(x) = table { (0): true, (0): false, (1): true };\n"),
                    Error); // duplicate table row

    try {
        parse_problem("semiring weighted;\nvar x in 0..1;\nconstraint ? = 1;\n");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("repl: the interactive negotiation console") {
    ProblemFile p = parse_problem("semiring weighted;\n"
                                  "var x in 0..100;\n"
                                  "constraint c1(x) = x + 3;\n"
                                  "constraint c3(x) = 2*x;\n"
                                  "constraint c4(x) = x + 5;\n");
    ReplSession session(p);
    CHECK(session.store().blevel().num() == 0);

    CHECK(session.execute("tell c4").ok);
    CHECK(session.execute("tell c3").ok);
    CHECK(session.store().blevel().num() == 5);

    auto retract = session.execute("retract c1");
    CHECK(retract.ok);
    CHECK(session.store().blevel().num() == 2);

    // rejected commands leave the store unchanged and explain the failure
    auto bad = session.execute("retract c4");
    CHECK_FALSE(bad.ok);
    CHECK(bad.message.find("rejected") != std::string::npos);
    CHECK(session.store().blevel().num() == 2);

    auto unknown = session.execute("tell nope");
    CHECK_FALSE(unknown.ok);

    // ask reports without changing the store; c3 = 2x is entailed by 2x+2,
    // c1 = x+3 no longer is (retraction only promises a weak inverse)
    CHECK(session.execute("ask c3").ok);
    CHECK_FALSE(session.execute("ask c1").ok);
    CHECK(session.store().blevel().num() == 2);

    // undo restores the prior store
    CHECK(session.execute("undo").ok);
    CHECK(session.store().blevel().num() == 5);

    // an interval can reject a tell
    auto rejected = session.execute("tell c4 -[4,1]->");
    CHECK_FALSE(rejected.ok);
    CHECK(session.store().blevel().num() == 5);

    // replaying the history reproduces the live store exactly
    Store replayed = ReplSession::replay(p, session.history());
    CHECK(equal_constraint(replayed.current, session.store().current));
}

TEST_CASE("repl: update command") {
    ProblemFile p = parse_problem("semiring weighted;\n"
                                  "var x in 0..100;\nvar y in 0..100;\n"
                                  "constraint c1(x) = x + 3;\n"
                                  "constraint c2(y) = y + 1;\n");
    ReplSession session(p);
    CHECK(session.execute("tell c1").ok);
    CHECK(session.execute("update {x} c2").ok);
    CHECK(session.store().blevel().num() == 4);
    CHECK(session.store().current.support_names() == std::vector<std::string>{"y"});
    Store replayed = ReplSession::replay(p, session.history());
    CHECK(equal_constraint(replayed.current, session.store().current));
}

TEST_CASE("unused sections are ignored by consumers that do not need them") {
    // a file with every section parses; solve-style use reads con, the
    // refinement block stays available untouched
    ProblemFile p = load_problem(corpus("integrity_imp1.sq"));
    CHECK(p.refinement.has_value());
    CHECK_FALSE(p.con.has_value());
    CHECK_FALSE(p.program.has_value());
}
