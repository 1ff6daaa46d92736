#include <doctest.h>

#include "chainfree/oracle.hpp"
#include "chainfree/parser.hpp"
#include "test_helpers.hpp"

using namespace chainfree;

TEST_CASE("oracle: commuting equation has the empty witness") {
    Script s = parse("(declare-alphabet a)\n(declare-str x)\n(declare-str y)\n"
                     "(assert (= (concat x y) (concat y x)))\n");
    Bound b;
    b.max_len = 1;
    auto w = bounded_sat(s.ctx, s.formula, b);
    REQUIRE(w.has_value());
    CHECK(w->assignment.begin()->second.empty());
    CHECK(evaluate(s.formula, *w));
}

TEST_CASE("oracle: disjoint memberships have no witness") {
    Script s = parse("(declare-alphabet a b)\n(declare-str x)\n"
                     "(define-aut AP :tapes 1 :states (q0 q1) :init (q0) :final (q1)"
                     " :trans ((q0 (a) q1) (q1 (a) q1)))\n"
                     "(define-aut BP :tapes 1 :states (q0 q1) :init (q0) :final (q1)"
                     " :trans ((q0 (b) q1) (q1 (b) q1)))\n"
                     "(assert (and (in x AP) (in x BP)))\n");
    Bound b;
    b.max_len = 4;
    CHECK(!bounded_sat(s.ctx, s.formula, b).has_value());
}

TEST_CASE("oracle: xy = zz with unit z") {
    Script s = parse("(declare-alphabet a b)\n(declare-str x)\n(declare-str y)\n(declare-str z)\n"
                     "(assert (= (concat x y) (concat z z)))\n"
                     "(assert (=len (len z) 1))\n");
    Bound b;
    b.max_len = 2;
    auto w = bounded_sat(s.ctx, s.formula, b);
    REQUIRE(w.has_value());
    CHECK(evaluate(s.formula, *w));
    VarId z = *s.ctx.vars.find("z");
    CHECK(w->assignment.at(z).size() == 1);
}

TEST_CASE("oracle: witnesses are monotone in the bound") {
    Script s = parse("(declare-alphabet a b)\n(declare-str x)\n(declare-str y)\n"
                     "(assert (and (= x y) (<= 2 (len x))))\n");
    Bound b2{2, {}};
    Bound b4{4, {}};
    auto w2 = bounded_sat(s.ctx, s.formula, b2);
    auto w4 = bounded_sat(s.ctx, s.formula, b4);
    REQUIRE(w2.has_value());
    REQUIRE(w4.has_value());
    CHECK(evaluate(s.formula, *w2));
    // the first witness in length-lexicographic order is stable
    CHECK(w2->assignment == w4->assignment);
}
