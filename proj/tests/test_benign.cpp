#include <doctest.h>

#include "chainfree/benign.hpp"
#include "chainfree/oracle.hpp"
#include "test_helpers.hpp"

using namespace chainfree;
using chainfree::testing::AB;

namespace {

Formula clause_formula(const Clause& c) {
    std::vector<Formula> kids;
    for (const Atom& a : c.atoms) kids.push_back(Formula::leaf(a));
    return Formula::make(Formula::Kind::And, std::move(kids));
}

bool oracle_sat_clause(const Context& ctx, const Clause& c, size_t bound) {
    Bound b;
    b.max_len = bound;
    return bounded_sat(ctx, clause_formula(c), b).has_value();
}

}  // namespace

TEST_CASE("eliminate the two-equation family") {
    AB t;
    VarId x = t.ctx.vars.intern("x"), y = t.ctx.vars.intern("y"), z = t.ctx.vars.intern("z");
    VarId u = t.ctx.vars.intern("u"), v = t.ctx.vars.intern("v");
    Clause c;
    c.atoms.push_back(RelationalAtom{StrTerm{{x}}, StrTerm{{z, y}}, nullptr, true, true});
    c.atoms.push_back(RelationalAtom{StrTerm{{y}}, StrTerm{{x, u, v}}, nullptr, true, true});

    bool before_sat = oracle_sat_clause(t.ctx, c, 2);
    CHECK(before_sat);  // everything empty works

    ClauseClass cc = classify_clause(c);
    REQUIRE(cc.kind == FragmentKind::WeaklyChaining);
    EliminationStep step;
    Clause out = eliminate_one_chain_family(t.ctx, c, cc.chains[0], &step);

    CHECK(!step.degenerate);
    REQUIRE(step.distinct_vars.size() == 2);
    CHECK(step.distinct_vars[0] == x);
    CHECK(step.distinct_vars[1] == y);

    // shape: one tuple membership, two projections, two zero-length atoms
    int memberships = 0, projections = 0, zero_lens = 0;
    const RelationalAtom* pi1 = nullptr;
    for (const Atom& a : out.atoms) {
        if (std::holds_alternative<MembershipAtom>(a)) memberships++;
        if (const auto* r = std::get_if<RelationalAtom>(&a)) {
            projections++;
            CHECK(r->length_preserving);
            if (r->lhs.vars[0] == x) pi1 = r;
        }
        if (const auto* ar = std::get_if<ArithAtom>(&a)) {
            CHECK(ar->op == CmpOp::Eq);
            CHECK(ar->rhs == ArithTerm::constant(0));
            zero_lens++;
        }
    }
    CHECK(memberships == 1);
    CHECK(projections == 2);
    CHECK(zero_lens == 2);  // |z| = 0 and |u v| = 0

    // projections are length preserving on enumerations
    REQUIRE(pi1);
    for (const auto& tup : enumerate(*pi1->rel, 3)) CHECK(tup[0].size() == tup[1].size());

    // equisatisfiable within the bound
    CHECK(oracle_sat_clause(t.ctx, out, 2) == before_sat);
    CHECK(classify_clause(out).kind == FragmentKind::ChainFree);
}

TEST_CASE("eliminate a length-preserving self-relation via the diagonal") {
    AB t;
    VarId x = t.ctx.vars.intern("x");
    Clause c;
    c.atoms.push_back(RelationalAtom{StrTerm{{x}}, StrTerm{{x}},
                                     aut_identity({t.a}), false, true});
    ClauseClass cc = classify_clause(c);
    REQUIRE(cc.kind == FragmentKind::WeaklyChaining);
    EliminationStep step;
    Clause out = eliminate_one_chain_family(t.ctx, c, cc.chains[0], &step);
    REQUIRE(step.distinct_vars.size() == 1);

    const MembershipAtom* mem = nullptr;
    for (const Atom& a : out.atoms)
        if (const auto* m = std::get_if<MembershipAtom>(&a)) mem = m;
    REQUIRE(mem);
    // diagonal of Id over {a} is a*
    CHECK(accepts(*mem->aut, {t.word("")}));
    CHECK(accepts(*mem->aut, {t.word("aaa")}));

    CHECK(oracle_sat_clause(t.ctx, c, 3) == oracle_sat_clause(t.ctx, out, 3));
}

TEST_CASE("degenerate branch pins the chain variables to eps") {
    AB t;
    VarId x = t.ctx.vars.intern("x"), y = t.ctx.vars.intern("y");
    Clause c;
    c.atoms.push_back(RelationalAtom{StrTerm{{x}}, StrTerm{{y, y}}, nullptr, true, true});
    c.atoms.push_back(RelationalAtom{StrTerm{{y}}, StrTerm{{x}}, nullptr, true, true});
    ClauseClass cc = classify_clause(c);
    REQUIRE(cc.kind == FragmentKind::WeaklyChaining);
    EliminationStep step;
    Clause out = eliminate_one_chain_family(t.ctx, c, cc.chains[0], &step);
    CHECK(step.degenerate);
    int zeros = 0;
    for (const Atom& a : out.atoms) {
        const auto* ar = std::get_if<ArithAtom>(&a);
        REQUIRE(ar);
        CHECK(ar->rhs == ArithTerm::constant(0));
        zeros++;
    }
    CHECK(zeros == 2);  // |x| = 0 and |y| = 0
    CHECK(oracle_sat_clause(t.ctx, c, 2));
    CHECK(oracle_sat_clause(t.ctx, out, 2));
}

TEST_CASE("degenerate branch keeps an eps-rejecting relation unsatisfiable") {
    AB t;
    VarId x = t.ctx.vars.intern("x"), y = t.ctx.vars.intern("y");
    // R relates only nonempty words: (a,a)+ as a length-preserving relation
    auto aplus = std::make_shared<NTapeAutomaton>(
        2, 2, std::vector<uint32_t>{0}, std::vector<uint32_t>{1},
        std::vector<Transition>{{0, {t.a, t.a}, 1}, {1, {t.a, t.a}, 1}}, true);
    Clause c;
    c.atoms.push_back(RelationalAtom{StrTerm{{x}}, StrTerm{{y, y}}, aplus, false, true});
    c.atoms.push_back(RelationalAtom{StrTerm{{y}}, StrTerm{{x}}, nullptr, true, true});
    ClauseClass cc = classify_clause(c);
    REQUIRE(cc.kind == FragmentKind::WeaklyChaining);
    Clause out = eliminate_one_chain_family(t.ctx, c, cc.chains[0]);
    CHECK(!oracle_sat_clause(t.ctx, c, 3));
    CHECK(!oracle_sat_clause(t.ctx, out, 3));
}

TEST_CASE("to_chain_free: base case and counting") {
    AB t;
    VarId x = t.ctx.vars.intern("x"), y = t.ctx.vars.intern("y");
    Clause free;
    free.atoms.push_back(RelationalAtom{StrTerm{{x}}, StrTerm{{y}},
                                        aut_identity({t.a, t.b}), false, true});
    ChainFreeResult r = to_chain_free(t.ctx, free);
    CHECK(r.eliminations == 0);
    CHECK(r.initial_b == 0);
    CHECK(r.clause.atoms.size() == 1);

    // two disjoint two-equation families need two eliminations
    Context ctx;
    Clause two;
    auto family = [&](const char* p) {
        VarId fx = ctx.vars.intern(std::string(p) + "x");
        VarId fy = ctx.vars.intern(std::string(p) + "y");
        VarId fz = ctx.vars.intern(std::string(p) + "z");
        two.atoms.push_back(RelationalAtom{StrTerm{{fx}}, StrTerm{{fz, fy}}, nullptr, true, true});
        two.atoms.push_back(RelationalAtom{StrTerm{{fy}}, StrTerm{{fx}}, nullptr, true, true});
    };
    family("p_");
    family("q_");
    ctx.alphabet.intern_base("a");
    ChainFreeResult r2 = to_chain_free(ctx, two);
    CHECK(r2.initial_b == 4);
    CHECK(r2.eliminations == 2);
    CHECK(classify_clause(r2.clause).kind == FragmentKind::ChainFree);
}

TEST_CASE("to_chain_free rejects chaining input") {
    AB t;
    VarId x = t.ctx.vars.intern("x");
    auto general = std::make_shared<NTapeAutomaton>(
        2, 1, std::vector<uint32_t>{0}, std::vector<uint32_t>{0},
        std::vector<Transition>{{0, {t.a, eps_sym}, 0}}, false);
    Clause c;
    c.atoms.push_back(RelationalAtom{StrTerm{{x}}, StrTerm{{x}}, general, false, false});
    CHECK_THROWS_AS(to_chain_free(t.ctx, c), InputError);
}

TEST_CASE("elimination is equisatisfiable on small random families") {
    std::mt19937 rng(77);
    for (int round = 0; round < 10; ++round) {
        AB t;
        std::vector<SymbolId> sigma{t.a, t.b};
        VarId x = t.ctx.vars.intern("x"), y = t.ctx.vars.intern("y"), z = t.ctx.vars.intern("z");
        AutPtr r1 = chainfree::testing::random_automaton(rng, 2, 2, sigma, true);
        AutPtr r2 = chainfree::testing::random_automaton(rng, 2, 2, sigma, true);
        Clause c;
        c.atoms.push_back(RelationalAtom{StrTerm{{x}}, StrTerm{{y}}, r1, false, true});
        c.atoms.push_back(RelationalAtom{StrTerm{{y}}, StrTerm{{x, z}}, r2, false, true});
        ClauseClass cc = classify_clause(c);
        if (cc.kind != FragmentKind::WeaklyChaining) continue;
        Clause out = eliminate_one_chain_family(t.ctx, c, cc.chains[0]);
        CHECK(oracle_sat_clause(t.ctx, c, 2) == oracle_sat_clause(t.ctx, out, 2));
    }
}
