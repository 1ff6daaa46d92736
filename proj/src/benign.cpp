#include "chainfree/benign.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace chainfree {

namespace {

// Lift a 2-tape length-preserving relation to k tapes: tape ix carries the
// first component, tape iy the second, every other tape ranges over fill.
// With ix == iy the result is the diagonal {w | (w,w) in Rel}.
AutPtr lift_pair(const NTapeAutomaton& rel, int k, int ix, int iy,
                 const std::vector<SymbolId>& fill) {
    std::vector<int> free_slots;
    for (int s = 0; s < k; ++s)
        if (s != ix && s != iy) free_slots.push_back(s);
    size_t combos = 1;
    for (size_t i = 0; i < free_slots.size(); ++i) combos *= fill.size();

    std::vector<Transition> trans;
    for (const Transition& t : rel.transitions()) {
        SymbolId a = t.label[0], b = t.label[1];
        if (ix == iy && a != b) continue;
        for (size_t v = 0; v < combos; ++v) {
            std::vector<SymbolId> label(k, eps_sym);
            label[ix] = a;
            label[iy] = b;
            size_t rest = v;
            for (int s : free_slots) {
                label[s] = fill[rest % fill.size()];
                rest /= fill.size();
            }
            trans.push_back({t.from, std::move(label), t.to});
        }
    }
    NTapeAutomaton lifted(k, rel.num_states(), rel.init(), rel.final(), std::move(trans), true);
    return trim(lifted);
}

ArithAtom zero_length(const StrTerm& t) {
    return ArithAtom{ArithTerm::len_of(t), ArithTerm::constant(0), CmpOp::Eq};
}

ArithAtom false_atom() {
    return ArithAtom{ArithTerm::constant(1), ArithTerm::constant(0), CmpOp::Le};
}

}  // namespace

Clause eliminate_one_chain_family(Context& ctx, Clause c, const ChainWitness& w,
                                  EliminationStep* step) {
    if (!w.benign) throw InternalError("asked to eliminate a non-benign chain");
    SplittingGraph g = build_graph(c);

    // involved constraints = constraints owning positions of the closure set
    std::set<uint32_t> atom_set;
    for (uint32_t nd : w.scc) atom_set.insert(g.rel_atom_index[g.positions[nd].con]);
    std::vector<uint32_t> involved(atom_set.begin(), atom_set.end());

    std::vector<VarId> xs;            // left-side variable per involved constraint
    std::vector<const RelationalAtom*> rels;
    for (uint32_t ai : involved) {
        const auto& r = std::get<RelationalAtom>(c.atoms[ai]);
        if (r.lhs.size() != 1 || !r.length_preserving)
            throw InternalError("benign chain over a non-left-sided or non-lp constraint");
        xs.push_back(r.lhs.vars[0]);
        rels.push_back(&r);
    }
    std::set<VarId> chain_vars(xs.begin(), xs.end());

    if (step) {
        for (uint32_t nd : w.scc) step->closure.push_back(g.positions[nd]);
    }

    // count chain-variable occurrences in each right side
    bool degenerate = false;
    std::vector<VarId> ys(involved.size());
    std::vector<StrTerm> rests(involved.size());
    for (size_t i = 0; i < involved.size(); ++i) {
        int count = 0;
        for (VarId v : rels[i]->rhs.vars)
            if (chain_vars.count(v)) count++;
        if (count != 1) {
            degenerate = true;
            break;
        }
        bool removed = false;
        for (VarId v : rels[i]->rhs.vars) {
            if (!removed && chain_vars.count(v)) {
                ys[i] = v;
                removed = true;
                continue;
            }
            rests[i].vars.push_back(v);
        }
    }

    if (degenerate) {
        // every chain-term variable is pinned to eps; the constraints reduce
        // to their acceptance of the all-eps tuple
        if (step) step->degenerate = true;
        std::set<VarId> eps_vars = chain_vars;
        for (size_t i = 0; i < involved.size(); ++i)
            for (VarId v : rels[i]->rhs.vars) eps_vars.insert(v);
        bool eps_ok = true;
        for (size_t i = 0; i < involved.size(); ++i) {
            if (rels[i]->is_equality) continue;
            if (!accepts(*rels[i]->rel, {Word{}, Word{}})) eps_ok = false;
        }
        std::vector<Atom> atoms;
        std::set<uint32_t> drop(involved.begin(), involved.end());
        for (uint32_t i = 0; i < c.atoms.size(); ++i) {
            if (drop.count(i)) continue;
            Atom a = c.atoms[i];
            for (VarId v : eps_vars) a = substitute(a, v, {});
            atoms.push_back(std::move(a));
        }
        for (VarId v : eps_vars) atoms.push_back(zero_length(StrTerm{{v}}));
        if (!eps_ok) atoms.push_back(false_atom());
        if (step) step->added_atoms = static_cast<uint32_t>(eps_vars.size() + !eps_ok);
        c.atoms = std::move(atoms);
        return c;
    }

    // maximal subsequence of pairwise distinct chain variables
    std::vector<VarId> distinct;
    for (VarId x : xs)
        if (std::find(distinct.begin(), distinct.end(), x) == distinct.end()) distinct.push_back(x);
    const int k = static_cast<int>(distinct.size());
    auto index_of = [&](VarId v) {
        return static_cast<int>(std::find(distinct.begin(), distinct.end(), v) - distinct.begin());
    };
    if (step) step->distinct_vars = distinct;

    std::vector<SymbolId> fill = ctx.alphabet.all_letters();
    AutPtr big;
    for (size_t i = 0; i < involved.size(); ++i) {
        AutPtr rel2 = rels[i]->is_equality ? aut_identity(fill) : rels[i]->rel;
        AutPtr lifted = lift_pair(*rel2, k, index_of(xs[i]), index_of(ys[i]), fill);
        big = big ? intersect_lp(*big, *lifted) : lifted;
    }
    if (step) step->automaton_states = big->num_states();

    // read the k-tape automaton as a 1-tape language over tuple letters; only
    // tuples that actually label a transition are interned
    AutPtr tuple_aut;
    std::vector<AutPtr> projections(k);
    if (k == 1) {
        tuple_aut = big;
        projections[0] = aut_identity(fill);
    } else {
        std::vector<Transition> trans;
        std::set<std::vector<SymbolId>> used;
        for (const Transition& t : big->transitions()) {
            used.insert(t.label);
            trans.push_back({t.from, {ctx.alphabet.intern_tuple(t.label)}, t.to});
        }
        tuple_aut = std::make_shared<NTapeAutomaton>(1, big->num_states(), big->init(),
                                                     big->final(), std::move(trans), true);
        for (int j = 0; j < k; ++j) {
            std::vector<Transition> pj;
            for (const auto& label : used)
                pj.push_back({0, {label[j], ctx.alphabet.intern_tuple(label)}, 0});
            projections[j] = std::make_shared<NTapeAutomaton>(
                2, 1, std::vector<uint32_t>{0}, std::vector<uint32_t>{0}, std::move(pj), true,
                "pi_" + std::to_string(j + 1));
        }
    }

    VarId xf = fresh_var(ctx, c);
    std::vector<Atom> atoms;
    std::set<uint32_t> drop(involved.begin(), involved.end());
    for (uint32_t i = 0; i < c.atoms.size(); ++i)
        if (!drop.count(i)) atoms.push_back(c.atoms[i]);
    uint32_t added = 0;
    atoms.push_back(MembershipAtom{StrTerm{{xf}}, tuple_aut});
    added++;
    for (int j = 0; j < k; ++j) {
        atoms.push_back(RelationalAtom{StrTerm{{distinct[j]}}, StrTerm{{xf}}, projections[j],
                                       false, true});
        added++;
    }
    for (size_t i = 0; i < involved.size(); ++i) {
        if (rests[i].empty()) continue;
        atoms.push_back(zero_length(rests[i]));
        added++;
    }
    if (step) step->added_atoms = added;
    c.atoms = std::move(atoms);
    return c;
}

uint32_t count_benign_chain_constraints(const Clause& c) {
    SplittingGraph g = build_graph(c);
    std::vector<ChainWitness> chains = find_chains(g);
    std::set<uint32_t> atoms;
    for (ChainWitness& w : chains) {
        if (!classify_chain(w, g, c)) continue;
        for (uint32_t nd : w.scc) atoms.insert(g.rel_atom_index[g.positions[nd].con]);
    }
    return static_cast<uint32_t>(atoms.size());
}

ChainFreeResult to_chain_free(Context& ctx, Clause c) {
    ChainFreeResult out;
    ClauseClass cc = classify_clause(c);
    if (cc.kind == FragmentKind::Chaining)
        throw InputError("clause is chaining; benign elimination does not apply");
    out.initial_b = count_benign_chain_constraints(c);
    while (cc.kind == FragmentKind::WeaklyChaining) {
        EliminationStep step;
        c = eliminate_one_chain_family(ctx, std::move(c), cc.chains[0], &step);
        out.steps.push_back(std::move(step));
        out.eliminations++;
        if (out.eliminations > out.initial_b)
            throw InternalError("benign elimination exceeded its loop bound");
        cc = classify_clause(c);
        if (cc.kind == FragmentKind::Chaining)
            throw InternalError("benign elimination introduced a non-benign chain");
    }
    out.clause = std::move(c);
    return out;
}

}  // namespace chainfree
