#include <doctest.h>

#include <functional>
#include <random>

#include "chainfree/oracle.hpp"
#include "chainfree/parser.hpp"
#include "test_helpers.hpp"

using namespace chainfree;
using chainfree::testing::AB;

namespace {

Formula clause_formula(const Clause& c) {
    std::vector<Formula> kids;
    for (const Atom& a : c.atoms) kids.push_back(Formula::leaf(a));
    return Formula::make(Formula::Kind::And, std::move(kids));
}

const char* header = R"((declare-alphabet a b)
(declare-str x)
(declare-str y)
(declare-str z)
)";

}  // namespace

TEST_CASE("parse: plain equation") {
    Script s = parse(std::string(header) + "(assert (= (concat x y) (concat z z)))\n");
    REQUIRE(s.formula.kind == Formula::Kind::Leaf);
    const auto& r = std::get<RelationalAtom>(*s.formula.atom);
    CHECK(r.is_equality);
    REQUIRE(r.lhs.size() == 2);
    REQUIRE(r.rhs.size() == 2);
    CHECK(s.ctx.vars.name(r.lhs.vars[0]) == "x");
    CHECK(s.ctx.vars.name(r.lhs.vars[1]) == "y");
    CHECK(r.rhs.vars[0] == r.rhs.vars[1]);
}

TEST_CASE("parse: literals become pinned fresh variables") {
    Script s = parse(std::string(header) + "(assert (= x \"a\"))\n");
    REQUIRE(s.formula.kind == Formula::Kind::And);
    REQUIRE(s.formula.kids.size() == 2);
    const auto& eq = std::get<RelationalAtom>(*s.formula.kids[0].atom);
    CHECK(eq.is_equality);
    REQUIRE(eq.rhs.size() == 1);
    VarId lit = eq.rhs.vars[0];
    CHECK(s.ctx.vars.name(lit).rfind("_lit", 0) == 0);
    const auto& mem = std::get<MembershipAtom>(*s.formula.kids[1].atom);
    REQUIRE(mem.term.size() == 1);
    CHECK(mem.term.vars[0] == lit);
    SymbolId a = *s.ctx.alphabet.find_base("a");
    CHECK(accepts(*mem.aut, {Word{a}}));
    CHECK(!accepts(*mem.aut, {Word{}}));
}

TEST_CASE("parse: negated non-invertible relation is rejected") {
    std::string text = std::string(header) +
                       "(define-aut T :tapes 2 :states (q0) :init (q0) :final (q0)"
                       " :trans ((q0 (a _) q0)) :length-preserving false)\n"
                       "(assert (not (rel T x y)))\n";
    CHECK_THROWS_AS(parse(text), ParseError);
    // positively it is fine
    std::string pos = std::string(header) +
                      "(define-aut T :tapes 2 :states (q0) :init (q0) :final (q0)"
                      " :trans ((q0 (a _) q0)) :length-preserving false)\n"
                      "(assert (rel T x y))\n";
    CHECK_NOTHROW(parse(pos));
}

TEST_CASE("parse: errors carry positions") {
    try {
        parse("(declare-alphabet a)\n(assert (= q q))\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("undeclared variable") != std::string::npos);
    }
    CHECK_THROWS_AS(parse("(declare-str x"), ParseError);
    CHECK_THROWS_AS(parse("(declare-alphabet a)(assert (in x NOPE))"), ParseError);
}

TEST_CASE("to_dnf: distribution") {
    Script s = parse(std::string(header) +
                     "(assert (and (= x y) (or (= y z) (= x z))))\n");
    auto clauses = to_dnf(s.ctx, s.formula);
    REQUIRE(clauses.size() == 2);
    CHECK(clauses[0].atoms.size() == 2);
    CHECK(clauses[1].atoms.size() == 2);
}

TEST_CASE("to_dnf: negated membership becomes the complement") {
    AB t;
    std::vector<SymbolId> sigma{t.a, t.b};
    auto astar = std::make_shared<NTapeAutomaton>(1, 1, std::vector<uint32_t>{0},
                                                  std::vector<uint32_t>{0},
                                                  std::vector<Transition>{{0, {t.a}, 0}}, true);
    VarId x = t.ctx.vars.intern("x");
    Formula f = Formula::make(Formula::Kind::Not,
                              {Formula::leaf(MembershipAtom{StrTerm{{x}}, astar})});
    auto clauses = to_dnf(t.ctx, f);
    REQUIRE(clauses.size() == 1);
    const auto& m = std::get<MembershipAtom>(clauses[0].atoms[0]);
    // complement language is Sigma* b Sigma* on words up to length 3
    for (const auto& tup : enumerate(*aut_universal(1, sigma), 3)) {
        bool has_b = false;
        for (SymbolId s : tup[0]) has_b |= s == t.b;
        CHECK(accepts(*m.aut, {tup[0]}) == has_b);
    }
}

TEST_CASE("to_dnf: disequality splits into length mismatch or aligned difference") {
    AB t;
    VarId x = t.ctx.vars.intern("x");
    VarId y = t.ctx.vars.intern("y");
    Formula f = Formula::make(
        Formula::Kind::Not,
        {Formula::leaf(RelationalAtom{StrTerm{{x}}, StrTerm{{y}}, nullptr, true, true})});
    auto clauses = to_dnf(t.ctx, f);
    REQUIRE(clauses.size() == 3);
    // against enumeration of word pairs up to length 2
    std::vector<Word> words;
    for (const auto& tup : enumerate(*aut_universal(1, {t.a, t.b}), 2)) words.push_back(tup[0]);
    for (const Word& wx : words) {
        for (const Word& wy : words) {
            Interpretation eta;
            eta.assignment[x] = wx;
            eta.assignment[y] = wy;
            bool any = false;
            for (const Clause& c : clauses) any |= evaluate(c, eta);
            CHECK(any == (wx != wy));
        }
    }
}

TEST_CASE("to_left_sided") {
    Script s = parse(std::string(header) +
                     "(define-aut R :tapes 2 :states (q0) :init (q0) :final (q0)"
                     " :trans ((q0 (a a) q0)))\n"
                     "(assert (and (rel R x (concat y z)) (= (concat x y) (concat z z))))\n");
    auto clauses = to_dnf(s.ctx, s.formula);
    REQUIRE(clauses.size() == 1);
    Clause ls = to_left_sided(s.ctx, clauses[0]);
    REQUIRE(ls.atoms.size() == 3);
    // rel R x (concat y z) is untouched
    const auto& r0 = std::get<RelationalAtom>(ls.atoms[0]);
    CHECK(!r0.is_equality);
    CHECK(r0.lhs.size() == 1);
    // the equation got a fresh left side: f = z z and f = x y
    const auto& r1 = std::get<RelationalAtom>(ls.atoms[1]);
    const auto& r2 = std::get<RelationalAtom>(ls.atoms[2]);
    CHECK(r1.lhs.size() == 1);
    CHECK(r2.lhs.size() == 1);
    CHECK(r1.lhs.vars[0] == r2.lhs.vars[0]);
    CHECK(s.ctx.vars.name(r1.lhs.vars[0]).rfind("_f", 0) == 0);
    REQUIRE(r1.rhs.size() == 2);
    CHECK(r1.rhs.vars[0] == r1.rhs.vars[1]);  // z z
    REQUIRE(r2.rhs.size() == 2);
    CHECK(r2.rhs.vars[0] != r2.rhs.vars[1]);  // x y
}

TEST_CASE("evaluate basics") {
    AB t;
    VarId x = t.ctx.vars.intern("x");
    VarId y = t.ctx.vars.intern("y");
    Interpretation eta;
    eta.assignment[x] = t.word("ab");
    eta.assignment[y] = t.word("ab");
    CHECK(eval_atom(RelationalAtom{StrTerm{{x}}, StrTerm{{y}}, nullptr, true, true}, eta));

    auto lab = aut_word(t.word("ab"));
    eta.assignment[x] = t.word("a");
    eta.assignment[y] = t.word("b");
    CHECK(eval_atom(MembershipAtom{StrTerm{{x, y}}, lab}, eta));

    eta.assignment[x] = t.word("abc" /* c falls back to b */);
    ArithTerm len;
    len.add_coeff(x, 1);
    CHECK(!eval_atom(ArithAtom{len, ArithTerm::constant(2), CmpOp::Le}, eta));

    Interpretation missing;
    CHECK_THROWS_AS(eval_atom(RelationalAtom{StrTerm{{x}}, StrTerm{{y}}, nullptr, true, true},
                              missing),
                    InternalError);
}

TEST_CASE("dnf preserves semantics on random formulas") {
    std::mt19937 rng(3);
    for (int round = 0; round < 40; ++round) {
        AB t;
        std::vector<SymbolId> sigma{t.a, t.b};
        std::vector<VarId> vars;
        for (int i = 0; i < 3; ++i) vars.push_back(t.ctx.vars.intern("v" + std::to_string(i)));
        // random boolean structure over equalities, memberships and lengths
        std::function<Formula(int)> gen = [&](int depth) -> Formula {
            int pick = static_cast<int>(rng() % (depth > 0 ? 6 : 3));
            auto var = [&] { return vars[rng() % vars.size()]; };
            switch (pick) {
                case 0:
                    return Formula::leaf(RelationalAtom{StrTerm{{var()}}, StrTerm{{var()}},
                                                        nullptr, true, true});
                case 1: {
                    AutPtr a = chainfree::testing::random_automaton(rng, 1, 3, sigma, false);
                    return Formula::leaf(MembershipAtom{StrTerm{{var()}}, a});
                }
                case 2: {
                    ArithTerm l;
                    l.add_coeff(var(), 1);
                    return Formula::leaf(
                        ArithAtom{l, ArithTerm::constant(static_cast<long long>(rng() % 3)),
                                  static_cast<CmpOp>(rng() % 3)});
                }
                case 3: {
                    std::vector<Formula> one;
                    one.push_back(gen(depth - 1));
                    return Formula::make(Formula::Kind::Not, std::move(one));
                }
                default: {
                    std::vector<Formula> kids;
                    kids.push_back(gen(depth - 1));
                    kids.push_back(gen(depth - 1));
                    return Formula::make(pick == 4 ? Formula::Kind::And : Formula::Kind::Or,
                                         std::move(kids));
                }
            }
        };
        Formula f = gen(2);
        auto clauses = to_dnf(t.ctx, f);
        // compare on every interpretation with words <= 2
        std::vector<Word> words;
        for (const auto& tup : enumerate(*aut_universal(1, sigma), 2)) words.push_back(tup[0]);
        for (const Word& w0 : words)
            for (const Word& w1 : words)
                for (const Word& w2 : words) {
                    Interpretation eta;
                    eta.assignment[vars[0]] = w0;
                    eta.assignment[vars[1]] = w1;
                    eta.assignment[vars[2]] = w2;
                    bool direct = evaluate(f, eta);
                    bool via_dnf = false;
                    for (const Clause& c : clauses) via_dnf |= evaluate(c, eta);
                    REQUIRE(direct == via_dnf);
                }
    }
}

TEST_CASE("to_left_sided preserves satisfiability against the oracle") {
    std::mt19937 rng(17);
    for (int round = 0; round < 15; ++round) {
        AB t;
        std::vector<SymbolId> sigma{t.a, t.b};
        std::vector<VarId> vars;
        for (int i = 0; i < 3; ++i) vars.push_back(t.ctx.vars.intern("v" + std::to_string(i)));
        auto term = [&](size_t n) {
            StrTerm s;
            for (size_t i = 0; i < n; ++i) s.vars.push_back(vars[rng() % vars.size()]);
            return s;
        };
        std::vector<Formula> kids;
        int atoms = 1 + static_cast<int>(rng() % 2);
        for (int i = 0; i < atoms; ++i) {
            if (rng() % 2) {
                kids.push_back(Formula::leaf(RelationalAtom{term(1 + rng() % 2), term(1 + rng() % 2),
                                                            nullptr, true, true}));
            } else {
                AutPtr a = chainfree::testing::random_automaton(rng, 1, 3, sigma, false);
                kids.push_back(Formula::leaf(MembershipAtom{term(1), a}));
            }
        }
        Formula f = Formula::make(Formula::Kind::And, std::move(kids));
        Bound b;
        b.max_len = 3;
        b.letters = sigma;
        bool orig = bounded_sat(t.ctx, f, b).has_value();
        bool via = false;
        for (Clause& c : to_dnf(t.ctx, f)) {
            Clause ls = to_left_sided(t.ctx, std::move(c));
            if (bounded_sat(t.ctx, clause_formula(ls), b)) via = true;
        }
        // fresh variables only alias existing terms, so the bound carries over
        CHECK(orig == via);
    }
}

TEST_CASE("print/parse round trip") {
    std::string text = std::string(header) +
                       "(define-aut T :tapes 2 :states (q0 q1) :init (q0) :final (q1)"
                       " :trans ((q0 (a b) q1) (q1 (_ a) q1)) :length-preserving false)\n"
                       "(define-aut A :tapes 1 :states (s) :init (s) :final (s)"
                       " :trans ((s (a) s)))\n"
                       "(assert (or (and (rel T x y) (in (concat x z) A))"
                       " (not (= (concat x y) z))))\n"
                       "(assert (<= (+ (len x) (* 2 (len y)) 1) 5))\n";
    Script s = parse(text);
    std::string printed = print_script(s);
    Script back = parse(printed);
    CHECK(formula_equal(s.formula, back.formula));
    // printing is a fixed point
    CHECK(print_script(back) == printed);
}
