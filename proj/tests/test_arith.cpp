#include <doctest.h>

#include <random>

#include "chainfree/arith.hpp"

using namespace chainfree;
using lia::Expr;
using lia::Node;
using lia::Problem;
using lia::Result;
using lia::Status;
using lia::Var;

namespace {

Expr expr(std::initializer_list<std::pair<Var, long long>> terms, long long k) {
    Expr e;
    e.k = k;
    for (auto& [v, c] : terms) e.add(v, c);
    return e;
}

// Exhaustive check over a small box, the independent ground truth for the
// solver tests.
bool box_sat(const Problem& p, long long lo, long long hi) {
    std::vector<long long> val(p.vars.size(), lo);
    for (;;) {
        if (lia::check_model(p, val)) return true;
        size_t i = 0;
        while (i < val.size() && val[i] == hi) val[i++] = lo;
        if (i == val.size()) return false;
        val[i]++;
    }
}

}  // namespace

TEST_CASE("solve: simple sums") {
    Problem p;
    Var x = p.add_var("x", false), y = p.add_var("y", false);
    p.formula = Node::conj({lia::atom_eq(expr({{x, 1}, {y, 1}}, -3)),
                            lia::atom_le(expr({{x, -1}}, 1)),
                            lia::atom_le(expr({{y, -1}}, 1))});
    Result r = lia::solve(p);
    REQUIRE(r.status == Status::Sat);
    CHECK(r.model[x] + r.model[y] == 3);
    CHECK(r.model[x] >= 1);
    CHECK(r.model[y] >= 1);
}

TEST_CASE("solve: integrality cuts off the half point") {
    Problem p;
    Var x = p.add_var("x", false);
    p.formula = lia::atom_eq(expr({{x, 2}}, -1));  // 2x = 1
    CHECK(lia::solve(p).status == Status::Unsat);
}

TEST_CASE("solve: parity via equality elimination") {
    Problem p;
    Var x = p.add_var("x", true), y = p.add_var("y", true);
    // 2x = 2y + 1 has no integer solution but a rational one everywhere
    p.formula = lia::atom_eq(expr({{x, 2}, {y, -2}}, -1));
    CHECK(lia::solve(p).status == Status::Unsat);
}

TEST_CASE("solve: two-state flow of a letter-alternating loop") {
    // counts of an automaton alternating a and b between two states, with
    // flow balance and #a = 2
    Problem p;
    Var ya = p.add_var("ya", true);  // q0 -a-> q1
    Var yb = p.add_var("yb", true);  // q1 -b-> q0
    // start and end at q0: inflow(q0) - outflow(q0) = 0, same for q1
    p.formula = Node::conj({lia::atom_eq(expr({{yb, 1}, {ya, -1}}, 0)),
                            lia::atom_eq(expr({{ya, 1}, {yb, -1}}, 0)),
                            lia::atom_eq(expr({{ya, 1}}, -2))});
    Result r = lia::solve(p);
    REQUIRE(r.status == Status::Sat);
    CHECK(r.model[ya] == 2);
    CHECK(r.model[yb] == 2);
}

TEST_CASE("solve: disjunctions") {
    Problem p;
    Var x = p.add_var("x", true);
    p.formula = Node::conj({Node::disj({lia::atom_eq(expr({{x, 1}}, -1)),
                                        lia::atom_eq(expr({{x, 1}}, -5))}),
                            lia::atom_le(expr({{x, -1}}, 3))});  // x >= 3
    Result r = lia::solve(p);
    REQUIRE(r.status == Status::Sat);
    CHECK(r.model[x] == 5);

    Problem q;
    Var z = q.add_var("z", true);
    q.formula = Node::conj({lia::atom_ne(expr({{z, 1}}, 0)), lia::atom_le(expr({{z, 1}}, -1)),
                            lia::atom_le(expr({{z, -1}}, 1))});
    // z != 0 and 0 <= z <= 1 forces z = 1
    Result r2 = lia::solve(q);
    REQUIRE(r2.status == Status::Sat);
    CHECK(r2.model[z] == 1);
}

TEST_CASE("solve agrees with box enumeration on random conjunctions") {
    std::mt19937 rng(41);
    int checked = 0;
    for (int round = 0; round < 200; ++round) {
        Problem p;
        int nv = 2 + static_cast<int>(rng() % 3);
        for (int i = 0; i < nv; ++i) p.add_var("v" + std::to_string(i), true);
        std::vector<Node> cons;
        int na = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < na; ++i) {
            Expr e;
            e.k = static_cast<long long>(rng() % 7) - 3;
            for (int v = 0; v < nv; ++v) e.add(v, static_cast<long long>(rng() % 7) - 3);
            int op = static_cast<int>(rng() % 3);
            cons.push_back(op == 0 ? lia::atom_le(e) : op == 1 ? lia::atom_eq(e) : lia::atom_lt(e));
        }
        p.formula = Node::conj(std::move(cons));
        lia::Limits lim;
        lim.max_nodes = 20000;
        Result r = lia::solve(p, lim);
        bool box = box_sat(p, 0, 6);
        if (r.status == Status::Sat) {
            CHECK(lia::check_model(p, r.model));
            checked++;
        } else if (r.status == Status::Unsat) {
            // never unsat when the bounded enumerator finds a point
            CHECK(!box);
            checked++;
        }
    }
    // unknowns from the node limit must stay rare
    CHECK(checked >= 190);
}

TEST_CASE("smt2 round trip") {
    Problem p;
    Var x = p.add_var("len x", true);  // name needs sanitizing
    Var y = p.add_var("#(a,b)", true);
    p.formula = Node::conj({lia::atom_le(expr({{x, 2}, {y, -3}}, -1)),
                            Node::disj({lia::atom_eq(expr({{x, 1}}, -4)),
                                        lia::atom_eq(expr({{y, 1}}, 0))})});
    std::string text = lia::emit_smt2(p);
    CHECK(text.find("(set-logic QF_LIA)") == 0);
    CHECK(text.find("(check-sat)") != std::string::npos);
    Problem back = lia::parse_smt2(text);
    Result a = lia::solve(p), b = lia::solve(back);
    REQUIRE(a.status == b.status);
    REQUIRE(a.status == Status::Sat);
}

TEST_CASE("format_reply emits model values") {
    Problem p;
    Var x = p.add_var("x", false);
    p.formula = lia::atom_eq(expr({{x, 1}}, 7));  // x = -7
    Result r = lia::solve(p);
    REQUIRE(r.status == Status::Sat);
    CHECK(r.model[x] == -7);
    std::string reply = lia::format_reply(p, r);
    CHECK(reply.find("sat") == 0);
    CHECK(reply.find("(- 7)") != std::string::npos);
}
