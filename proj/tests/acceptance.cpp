// Acceptance suite: end-to-end checks over the shipped corpus plus the
// property batteries, one printed line per criterion. Exits non-zero if any
// criterion fails its stated tolerance or time budget.

#include "softqos/problem.hpp"
#include "softqos/refinement.hpp"
#include "softqos/solver.hpp"
#include "softqos/vm.hpp"
#include "test_helpers.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace softqos;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void criterion(int number, const char* title, double budget_seconds,
               const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    auto start = Clock::now();
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    if (budget_seconds > 0 && elapsed > budget_seconds) {
        ok = false;
        detail += (detail.empty() ? "" : " ; ") + std::string("over time budget");
    }
    std::printf("[%s] %d. %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", number, title, elapsed,
                detail.empty() ? "" : " — ", detail.c_str());
    if (!ok) ++g_failures;
}

std::string corpus(const char* name) { return std::string(SOFTQOS_CORPUS_DIR) + "/" + name; }

struct Loaded {
    ProblemFile problem;
    VmEnv env;
    explicit Loaded(const std::string& path) : problem(load_problem(path)) {
        env.space = problem.space;
        env.constraints = &problem.constraints;
        env.procedures = problem.program ? &problem.program->declarations : nullptr;
    }
    Store initial() const { return Store::initial(problem.space); }
};

bool expect(bool cond, const char* what, std::string& detail) {
    if (!cond && detail.empty()) detail = what;
    return cond;
}

Constraint weighted_poly(const SpacePtr& space, const std::string& var, double scale, double offset) {
    return Constraint::build(space, {var}, [&](const std::vector<DomainValue>& t) {
        return SemiringValue::number(space->spec(),
                                     scale * static_cast<double>(std::get<std::int64_t>(t[0])) + offset);
    });
}

} // namespace

int main() {
    criterion(1, "worked weighted problem: 11/7/16/16, solution 7/16, blevel 7, best X=a", 1.0,
              [](std::string& detail) {
                  Loaded l(corpus("fig1.sq"));
                  Constraint all = combine_all(
                      l.problem.space, {l.problem.constraint("c1"), l.problem.constraint("c2"),
                                        l.problem.constraint("c3")});
                  auto at = [&](const char* x, const char* y) {
                      Assignment eta;
                      eta.bind("X", std::string(x));
                      eta.bind("Y", std::string(y));
                      return all.eval(eta).num();
                  };
                  bool ok = expect(at("a", "a") == 11, "tuple (a,a) != 11", detail) &&
                            expect(at("a", "b") == 7, "tuple (a,b) != 7", detail) &&
                            expect(at("b", "a") == 16, "tuple (b,a) != 16", detail) &&
                            expect(at("b", "b") == 16, "tuple (b,b) != 16", detail);
                  Scsp p{l.problem.space,
                         {l.problem.constraint("c1"), l.problem.constraint("c2"), l.problem.constraint("c3")},
                         *l.problem.con};
                  SolutionReport r = solve(p);
                  Assignment xa, xb;
                  xa.bind("X", std::string("a"));
                  xb.bind("X", std::string("b"));
                  ok = ok && expect(r.solution.eval(xa).num() == 7, "solution X=a != 7", detail) &&
                       expect(r.solution.eval(xb).num() == 16, "solution X=b != 16", detail) &&
                       expect(r.blevel.num() == 7, "blevel != 7", detail) &&
                       expect(r.best.size() == 1 && r.best[0].to_string() == "X=a", "best != [X=a]", detail);
                  return ok;
              });

    criterion(2, "first negotiation: no reachable success; final branch at 5, interval [4,1] rejects", 5.0,
              [](std::string& detail) {
                  Loaded l(corpus("ex1.sq"));
                  RunResult r = run(*l.problem.program, l.initial(), RunPolicy::exhaustive(32), l.env);
                  bool ok = expect(r.outcome == RunResult::Outcome::Stuck, "exploration not stuck", detail);
                  ok = ok && expect(r.final_config.store.blevel().num() == 5, "stuck store level != 5", detail);
                  Arrow p2{Threshold(SemiringValue::number(l.problem.space->spec(), 4)),
                           Threshold(SemiringValue::number(l.problem.space->spec(), 1))};
                  ok = ok && expect(!check(r.final_config.store, p2, l.env), "check(4,1) passed", detail);
                  auto reach = reachable_success(*l.problem.program, l.initial(), 32, l.env);
                  return ok && expect(!reach.reachable && reach.exhausted, "reachability disagrees", detail);
              });

    criterion(3, "second negotiation: seeded and exhaustive success, store 2x+2, level 2", 5.0,
              [](std::string& detail) {
                  Loaded l(corpus("ex2.sq"));
                  Constraint expected = weighted_poly(l.problem.space, "x", 2, 2);
                  RunResult ex = run(*l.problem.program, l.initial(), RunPolicy::exhaustive(32), l.env);
                  bool ok =
                      expect(ex.outcome == RunResult::Outcome::Success, "exhaustive run failed", detail) &&
                      expect(ex.final_config.store.blevel().num() == 2, "exhaustive level != 2", detail) &&
                      expect(equal_constraint(project(ex.final_config.store.current, {"x"}), expected),
                             "exhaustive store != 2x+2 over x", detail);
                  for (std::uint64_t seed : {1ull, 2026ull}) {
                      RunResult sr = run(*l.problem.program, l.initial(), RunPolicy::seeded(seed), l.env);
                      ok = ok && expect(sr.outcome == RunResult::Outcome::Success, "seeded run failed", detail) &&
                           expect(sr.final_config.store.blevel().num() == 2, "seeded level != 2", detail) &&
                           expect(equal_constraint(project(sr.final_config.store.current, {"x"}), expected),
                                  "seeded store != 2x+2 over x", detail);
                  }
                  return ok;
              });

    criterion(4, "policy update: success with store y+4, level 4", 1.0, [](std::string& detail) {
        Loaded l(corpus("ex3.sq"));
        RunResult r = run(*l.problem.program, l.initial(), RunPolicy::seeded(1), l.env);
        Constraint expected = weighted_poly(l.problem.space, "y", 1, 4);
        return expect(r.outcome == RunResult::Outcome::Success, "run failed", detail) &&
               expect(equal_constraint(r.final_config.store.current, expected), "store != y+4", detail) &&
               expect(r.final_config.store.blevel().num() == 4, "level != 4", detail);
    });

    criterion(5, "integrity: pipeline refines memory, unreliable variant fails, spot value 0.96", 2.0,
              [](std::string& detail) {
                  Loaded imp1(corpus("integrity_imp1.sq"));
                  RefinementQuery q1{{}, imp1.problem.constraint(imp1.problem.refinement->require),
                                     imp1.problem.refinement->interface};
                  for (const auto& n : imp1.problem.refinement->implement)
                      q1.implementation.push_back(imp1.problem.constraint(n));
                  bool ok = expect(locally_refines(q1).holds, "first implementation does not hold", detail);

                  Loaded imp2(corpus("integrity_imp2.sq"));
                  RefinementQuery q2{{}, imp2.problem.constraint(imp2.problem.refinement->require),
                                     imp2.problem.refinement->interface};
                  for (const auto& n : imp2.problem.refinement->implement)
                      q2.implementation.push_back(imp2.problem.constraint(n));
                  RefinementReport r2 = locally_refines(q2);
                  ok = ok && expect(!r2.holds, "second implementation holds", detail) &&
                       expect(r2.witness.has_value(), "no witness", detail);

                  Loaded rel(corpus("reliability.sq"));
                  Assignment spot;
                  spot.bind("outcomp", std::int64_t{4096});
                  spot.bind("bwbyte", std::int64_t{1024});
                  double got = rel.problem.constraint("c1").eval(spot).num();
                  return ok && expect(std::abs(got - 0.96) <= 1e-9, "c1(4096,1024) != 0.96", detail);
              });

    criterion(6, "residuation: every grid pair satisfies the defining maximum", 10.0,
              [](std::string& detail) {
                  for (const auto& spec : testutil::all_specs()) {
                      auto grid = testutil::grid_values(spec);
                      auto candidates = testutil::residual_candidates(spec);
                      for (const auto& a : grid)
                          for (const auto& b : grid) {
                              SemiringValue r = residual(a, b);
                              if (!leq(times(b, r), a)) {
                                  detail = spec->to_string() + ": times(b, a/b) above a at a=" +
                                           a.to_literal() + " b=" + b.to_literal();
                                  return false;
                              }
                              for (const auto& x : candidates)
                                  if (leq(times(b, x), a) && !leq(x, r)) {
                                      detail = spec->to_string() + ": " + x.to_literal() +
                                               " beats a/b at a=" + a.to_literal() + " b=" + b.to_literal();
                                      return false;
                                  }
                          }
                  }
                  return true;
              });

    criterion(7, "constraint algebra: 200 random instances per semiring, zero failures", 30.0,
              [](std::string& detail) {
                  std::mt19937 rng(20260810);
                  for (const auto& spec : testutil::all_specs()) {
                      auto space = testutil::small_space(spec, 3, 2);
                      Constraint onec = Constraint::constant(space, one(spec));
                      Constraint zeroc = Constraint::constant(space, zero(spec));
                      for (int i = 0; i < 200; ++i) {
                          Constraint a = testutil::random_constraint(space, rng);
                          Constraint b = testutil::random_constraint(space, rng);
                          Constraint c = testutil::random_constraint(space, rng);
                          bool ok =
                              equal_constraint(combine(a, b), combine(b, a)) &&
                              equal_constraint(combine(combine(a, b), c), combine(a, combine(b, c))) &&
                              equal_constraint(combine(a, onec), a) &&
                              equal_constraint(project(project(a, {"v0", "v1"}), {"v0"}), project(a, {"v0"})) &&
                              leq_constraint(combine(a, b), a) && leq_constraint(combine(a, b), b) &&
                              leq_constraint(combine(b, divide(a, b)), a);
                          Constraint absorbed = combine(a, zeroc);
                          for (std::size_t t = 0; ok && t < absorbed.table_size(); ++t)
                              ok = equal(absorbed.value_at(t), zero(spec));
                          Constraint pEmpty = project(a, {});
                          for (const auto& eta : testutil::all_assignments(space)) {
                              if (!ok) break;
                              ok = leq(a.eval(eta), project(a, {"v0", "v1"}).eval(eta)) &&
                                   leq(a.eval(eta), pEmpty.eval(eta));
                          }
                          if (!ok) {
                              detail = spec->to_string() + ": instance " + std::to_string(i);
                              return false;
                          }
                      }
                  }
                  return true;
              });

    criterion(8, "solver equals brute-force enumeration on 50 random problems per semiring", 30.0,
              [](std::string& detail) {
                  std::mt19937 rng(424242);
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
                          std::vector<std::string> gotBest;
                          for (const auto& eta : got.best) gotBest.push_back(eta.to_string());
                          if (!equal(got.blevel, want.blevel) || gotBest != want.best) {
                              detail = spec->to_string() + ": trial " + std::to_string(trial);
                              return false;
                          }
                      }
                  }
                  return true;
              });

    criterion(9, "round-trip on 500 generated agents and the corpus; 10x seeded determinism", 20.0,
              [](std::string& detail) {
                  testutil::AgentGenConfig cfg;
                  std::mt19937 rng(123456);
                  auto specs = testutil::all_specs();
                  for (int i = 0; i < 500; ++i) {
                      const auto& spec = specs[static_cast<std::size_t>(i) % specs.size()];
                      AgentPtr agent = testutil::random_agent(spec, rng, cfg, 4);
                      AgentPtr reparsed = parse_agent_text(pretty(agent), spec);
                      if (!same_agent(agent, reparsed) || pretty(reparsed) != pretty(agent)) {
                          detail = "agent round-trip failed: " + pretty(agent);
                          return false;
                      }
                  }
                  for (const char* file :
                       {"fig1.sq", "ex1.sq", "ex2.sq", "ex3.sq", "integrity_imp1.sq", "integrity_imp2.sq",
                        "reliability.sq", "proc_call.sq", "multicriteria.sq"}) {
                      ProblemFile p = load_problem(corpus(file));
                      ProblemFile reparsed = parse_problem(problem_to_string(p));
                      if (problem_to_string(reparsed) != problem_to_string(p)) {
                          detail = std::string(file) + " does not round-trip";
                          return false;
                      }
                  }
                  for (const char* file : {"ex1.sq", "ex2.sq", "ex3.sq", "proc_call.sq"}) {
                      Loaded l(corpus(file));
                      RunResult first = run(*l.problem.program, l.initial(), RunPolicy::seeded(99), l.env);
                      for (int i = 0; i < 9; ++i) {
                          RunResult again = run(*l.problem.program, l.initial(), RunPolicy::seeded(99), l.env);
                          bool same = first.outcome == again.outcome &&
                                      first.trace.size() == again.trace.size();
                          for (std::size_t k = 0; same && k < first.trace.size(); ++k)
                              same = first.trace[k].rule == again.trace[k].rule &&
                                     first.trace[k].action == again.trace[k].action &&
                                     equal_constraint(first.trace[k].store_after, again.trace[k].store_after);
                          if (!same) {
                              detail = std::string(file) + ": seeded runs diverged";
                              return false;
                          }
                      }
                  }
                  return true;
              });

    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
