#include <doctest.h>

#include <functional>
#include <map>
#include <random>

#include "chainfree/parikh.hpp"
#include "test_helpers.hpp"

using namespace chainfree;
using chainfree::testing::AB;
using chainfree::testing::random_automaton;

namespace {

ArithAtom len_cmp(VarId x, CmpOp op, long long k) {
    ArithTerm l;
    l.add_coeff(x, 1);
    return ArithAtom{l, ArithTerm::constant(k), op};
}

ArithAtom len_cmp2(VarId x, CmpOp op, VarId y) {
    ArithTerm l, r;
    l.add_coeff(x, 1);
    r.add_coeff(y, 1);
    return ArithAtom{l, r, op};
}

AutPtr star(const AB& t, SymbolId s) {
    return std::make_shared<NTapeAutomaton>(1, 1, std::vector<uint32_t>{0},
                                            std::vector<uint32_t>{0},
                                            std::vector<Transition>{{0, {s}, 0}}, true);
}

AutPtr plus(const AB& t, SymbolId s) {
    return std::make_shared<NTapeAutomaton>(
        1, 2, std::vector<uint32_t>{0}, std::vector<uint32_t>{1},
        std::vector<Transition>{{0, {s}, 1}, {1, {s}, 1}}, true);
}

// All solutions of the Parikh formula with total length <= cap, projected to
// label-count vectors: every candidate vector in the simplex is screened by
// the conjunctive rational relaxation (formula without its disjunctions) and
// survivors are decided exactly with the counts pinned.
std::set<std::vector<long long>> formula_count_vectors(const Context& ctx,
                                                       const NTapeAutomaton& a, long long cap) {
    std::set<std::vector<long long>> out;
    lia::Problem base;
    std::vector<lia::Node> conj;
    ParikhVars pv = parikh_formula(ctx, a, base, conj);
    std::vector<lia::Node> atoms_only;
    for (const lia::Node& n : conj)
        if (n.kind != lia::Node::Kind::Or) atoms_only.push_back(n);

    std::vector<long long> candidate(pv.label_count.size(), 0);
    std::function<void(size_t, long long)> visit = [&](size_t i, long long left) {
        if (i == candidate.size()) {
            std::vector<lia::Node> pins;
            for (size_t k = 0; k < candidate.size(); ++k) {
                lia::Expr e;
                e.add(pv.label_count[k], 1);
                e.k = -candidate[k];
                pins.push_back(lia::atom_eq(std::move(e)));
            }
            // conjunctive screen first
            {
                lia::Problem p = base;
                std::vector<lia::Node> all = atoms_only;
                all.insert(all.end(), pins.begin(), pins.end());
                p.formula = lia::Node::conj(std::move(all));
                if (lia::solve(p).status == lia::Status::Unsat) return;
            }
            lia::Problem p = base;
            std::vector<lia::Node> all = conj;
            all.insert(all.end(), pins.begin(), pins.end());
            p.formula = lia::Node::conj(std::move(all));
            lia::Result r = lia::solve(p);
            REQUIRE(r.status != lia::Status::Unknown);
            if (r.status == lia::Status::Sat) out.insert(candidate);
            return;
        }
        for (long long v = 0; v <= left; ++v) {
            candidate[i] = v;
            visit(i + 1, left - v);
        }
        candidate[i] = 0;
    };
    if (!candidate.empty()) visit(0, cap);
    else if (!is_empty(a)) out.insert({});  // only the empty path can exist
    return out;
}

std::set<std::vector<long long>> path_count_vectors(const Context& ctx, const NTapeAutomaton& a,
                                                    size_t cap) {
    // distinct labels in the same order parikh_formula discovers them
    std::vector<std::vector<SymbolId>> labels;
    std::map<std::vector<SymbolId>, size_t> ix;
    for (const Transition& t : a.transitions()) {
        if (ix.count(t.label)) continue;
        ix[t.label] = labels.size();
        labels.push_back(t.label);
    }
    (void)ctx;
    std::set<std::vector<long long>> out;
    for (const auto& word : enumerate_label_words(a, cap)) {
        std::vector<long long> counts(labels.size(), 0);
        for (const auto& l : word) counts[ix.at(l)]++;
        out.insert(counts);
    }
    return out;
}

}  // namespace

TEST_CASE("synchronize: membership joined with identity") {
    AB t;
    VarId x = t.ctx.vars.intern("x"), y = t.ctx.vars.intern("y");
    Clause c;
    c.atoms.push_back(MembershipAtom{StrTerm{{x}}, star(t, t.a)});
    c.atoms.push_back(RelationalAtom{StrTerm{{x}}, StrTerm{{y}},
                                     aut_identity({t.a, t.b}), false, true});
    auto sc = synchronize(t.ctx, c);
    REQUIRE(sc.has_value());
    REQUIRE(sc->aut);
    CHECK(sc->tape_vars.size() == 2);
    for (const auto& tup : enumerate(*sc->aut, 3)) {
        CHECK(tup[0] == tup[1]);
        for (SymbolId s : tup[0]) CHECK(s == t.a);
    }
    CHECK(enumerate(*sc->aut, 3).size() == 4);  // eps, a, aa, aaa
}

TEST_CASE("synchronize: single membership and disjoint pair") {
    AB t;
    VarId x = t.ctx.vars.intern("x");
    Clause c;
    c.atoms.push_back(MembershipAtom{StrTerm{{x}}, star(t, t.a)});
    auto sc = synchronize(t.ctx, c);
    REQUIRE(sc.has_value());
    CHECK(sc->aut->tapes() == 1);
    CHECK(enumerate(*sc->aut, 2) == enumerate(*star(t, t.a), 2));

    Clause c2;
    c2.atoms.push_back(MembershipAtom{StrTerm{{x}}, plus(t, t.a)});
    c2.atoms.push_back(MembershipAtom{StrTerm{{x}}, plus(t, t.b)});
    auto sc2 = synchronize(t.ctx, c2);
    REQUIRE(sc2.has_value());
    CHECK(is_empty(*sc2->aut));
}

TEST_CASE("parikh formula of (ab)*") {
    AB t;
    auto abstar = std::make_shared<NTapeAutomaton>(
        1, 2, std::vector<uint32_t>{0}, std::vector<uint32_t>{0},
        std::vector<Transition>{{0, {t.a}, 1}, {1, {t.b}, 0}}, true);
    auto sols = formula_count_vectors(t.ctx, *abstar, 6);
    auto paths = path_count_vectors(t.ctx, *abstar, 6);
    CHECK(sols == paths);
    for (const auto& v : sols) CHECK(v[0] == v[1]);  // #a = #b
}

TEST_CASE("parikh formula of the empty and the trivial loop") {
    AB t;
    {
        lia::Problem p;
        std::vector<lia::Node> conj;
        parikh_formula(t.ctx, *aut_empty(1), p, conj);
        p.formula = lia::Node::conj(std::move(conj));
        CHECK(lia::solve(p).status == lia::Status::Unsat);
    }
    {
        auto loop = star(t, t.a);
        auto sols = formula_count_vectors(t.ctx, *loop, 5);
        std::set<std::vector<long long>> expect;
        for (long long k = 0; k <= 5; ++k) expect.insert({k});
        CHECK(sols == expect);
    }
}

TEST_CASE("parikh matches path enumeration on random automata") {
    AB t;
    std::vector<SymbolId> sigma{t.a, t.b};
    std::mt19937 rng(59);
    for (int round = 0; round < 12; ++round) {
        int tapes = 1 + static_cast<int>(rng() % 2);
        AutPtr a = random_automaton(rng, tapes, 3, sigma, false);
        CHECK(formula_count_vectors(t.ctx, *a, 4) == path_count_vectors(t.ctx, *a, 4));
    }
}

TEST_CASE("length link ties tape lengths to label counts") {
    AB t;
    VarId x = t.ctx.vars.intern("x"), y = t.ctx.vars.intern("y");
    // Id over {a,b} forces |x| = |y|
    Clause c;
    c.atoms.push_back(RelationalAtom{StrTerm{{x}}, StrTerm{{y}},
                                     aut_identity({t.a, t.b}), false, true});
    c.atoms.push_back(len_cmp2(x, CmpOp::Lt, y));
    CHECK(decide_clause(t.ctx, c).kind == ClauseVerdict::Kind::Unsat);

    // asynchronous labels still link lengths per tape
    auto async_rel = std::make_shared<NTapeAutomaton>(
        2, 1, std::vector<uint32_t>{0}, std::vector<uint32_t>{0},
        std::vector<Transition>{{0, {t.a, eps_sym}, 0}, {0, {eps_sym, t.b}, 0}}, false);
    Clause c2;
    c2.atoms.push_back(RelationalAtom{StrTerm{{x}}, StrTerm{{y}}, async_rel, false, false});
    c2.atoms.push_back(len_cmp(x, CmpOp::Eq, 2));
    c2.atoms.push_back(len_cmp(y, CmpOp::Eq, 3));
    DecideOptions opts;
    opts.want_model = true;
    ClauseVerdict v = decide_clause(t.ctx, c2, opts);
    REQUIRE(v.kind == ClauseVerdict::Kind::Sat);
    REQUIRE(v.model);
    CHECK(v.model->assignment.at(x) == t.word("aa"));
    CHECK(v.model->assignment.at(y) == t.word("bbb"));
}

TEST_CASE("decide_clause golden examples") {
    AB t;
    VarId x = t.ctx.vars.intern("x"), y = t.ctx.vars.intern("y");
    {
        Clause c;
        c.atoms.push_back(RelationalAtom{StrTerm{{x}}, StrTerm{{y}},
                                         aut_identity({t.a, t.b}), false, true});
        c.atoms.push_back(MembershipAtom{StrTerm{{x}}, star(t, t.a)});
        ArithTerm one = ArithTerm::constant(1), lenx;
        lenx.add_coeff(x, 1);
        c.atoms.push_back(ArithAtom{one, lenx, CmpOp::Le});
        DecideOptions opts;
        opts.want_model = true;
        ClauseVerdict v = decide_clause(t.ctx, c, opts);
        REQUIRE(v.kind == ClauseVerdict::Kind::Sat);
        REQUIRE(v.model);
        CHECK(v.model->assignment.at(x) == v.model->assignment.at(y));
        CHECK(v.model->assignment.at(x).size() >= 1);
        for (const Atom& a : c.atoms) CHECK(eval_atom(a, *v.model));
    }
    {
        Clause c;
        c.atoms.push_back(RelationalAtom{StrTerm{{x}}, StrTerm{{y}},
                                         aut_identity({t.a, t.b}), false, true});
        c.atoms.push_back(len_cmp2(x, CmpOp::Lt, y));
        CHECK(decide_clause(t.ctx, c).kind == ClauseVerdict::Kind::Unsat);
    }
    {
        auto aa_star = std::make_shared<NTapeAutomaton>(
            1, 2, std::vector<uint32_t>{0}, std::vector<uint32_t>{0},
            std::vector<Transition>{{0, {t.a}, 1}, {1, {t.a}, 0}}, true);
        Clause c;
        c.atoms.push_back(MembershipAtom{StrTerm{{x}}, aa_star});
        c.atoms.push_back(len_cmp(x, CmpOp::Eq, 3));
        CHECK(decide_clause(t.ctx, c).kind == ClauseVerdict::Kind::Unsat);
    }
}

TEST_CASE("decide_clause handles eps-sided and arith-only clauses") {
    AB t;
    VarId x = t.ctx.vars.intern("x");
    {
        // x = eps
        Clause c;
        c.atoms.push_back(RelationalAtom{StrTerm{{x}}, StrTerm{}, nullptr, true, true});
        DecideOptions opts;
        opts.want_model = true;
        ClauseVerdict v = decide_clause(t.ctx, c, opts);
        REQUIRE(v.kind == ClauseVerdict::Kind::Sat);
        CHECK(v.model->assignment.at(x).empty());
    }
    {
        // arithmetic only
        Clause c;
        c.atoms.push_back(len_cmp(x, CmpOp::Eq, 2));
        DecideOptions opts;
        opts.want_model = true;
        ClauseVerdict v = decide_clause(t.ctx, c, opts);
        REQUIRE(v.kind == ClauseVerdict::Kind::Sat);
        CHECK(v.model->assignment.at(x).size() == 2);
    }
    {
        // eps membership failure
        Clause c;
        c.atoms.push_back(MembershipAtom{StrTerm{}, plus(t, t.a)});
        CHECK(decide_clause(t.ctx, c).kind == ClauseVerdict::Kind::Unsat);
    }
}
