#include "chainfree/parikh.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

namespace chainfree {

namespace {

// Project a 2-tape relation to the words paired with eps on the other tape.
AutPtr project_to_tape(const NTapeAutomaton& rel, int keep) {
    std::vector<Transition> trans;
    for (const Transition& t : rel.transitions()) {
        if (t.label[1 - keep] != eps_sym) continue;
        trans.push_back({t.from, {t.label[keep]}, t.to});
    }
    NTapeAutomaton proj(1, rel.num_states(), rel.init(), rel.final(), std::move(trans), false);
    return trim(proj);
}

// Normal form of a concat-free clause's string atoms: unary memberships and
// binary relations over distinct variables.
struct StringAtoms {
    std::vector<std::pair<VarId, AutPtr>> memberships;
    std::vector<std::tuple<VarId, VarId, AutPtr>> relations;
    bool trivially_false = false;
};

StringAtoms collect_string_atoms(Context& ctx, const Clause& c) {
    StringAtoms out;
    for (const Atom& a : c.atoms) {
        if (const auto* m = std::get_if<MembershipAtom>(&a)) {
            if (m->term.size() > 1) throw InternalError("membership atom not concatenation-free");
            if (m->term.empty()) {
                if (!accepts(*m->aut, {Word{}})) out.trivially_false = true;
                continue;
            }
            out.memberships.emplace_back(m->term.vars[0], m->aut);
            continue;
        }
        const auto* r = std::get_if<RelationalAtom>(&a);
        if (!r) continue;
        if (r->lhs.size() > 1 || r->rhs.size() > 1)
            throw InternalError("relational atom not concatenation-free");
        AutPtr rel = r->rel;
        if (r->is_equality) rel = aut_identity(ctx.alphabet.all_letters());
        if (r->lhs.empty() && r->rhs.empty()) {
            if (!accepts(*rel, {Word{}, Word{}})) out.trivially_false = true;
            continue;
        }
        if (r->lhs.empty() || r->rhs.empty()) {
            int keep = r->lhs.empty() ? 1 : 0;
            VarId v = keep == 0 ? r->lhs.vars[0] : r->rhs.vars[0];
            out.memberships.emplace_back(v, project_to_tape(*rel, keep));
            continue;
        }
        if (r->lhs.vars[0] == r->rhs.vars[0]) {
            if (r->is_equality) continue;  // x = x
            throw InternalError("relational atom with one variable on both sides survived");
        }
        out.relations.emplace_back(r->lhs.vars[0], r->rhs.vars[0], std::move(rel));
    }
    return out;
}

}  // namespace

std::optional<SyncConstraint> synchronize(Context& ctx, const Clause& c) {
    StringAtoms atoms = collect_string_atoms(ctx, c);
    if (atoms.trivially_false) return std::nullopt;

    std::vector<SyncConstraint> parts;
    for (auto& [v, aut] : atoms.memberships) parts.push_back({aut, {v}});
    for (auto& [x, y, rel] : atoms.relations) parts.push_back({rel, {x, y}});
    if (parts.empty()) return SyncConstraint{nullptr, {}};

    while (parts.size() > 1) {
        // first pair (lowest indices) sharing a variable
        size_t pi = parts.size(), pj = parts.size();
        int ti = -1, tj = -1;
        for (size_t i = 0; i < parts.size() && pi == parts.size(); ++i) {
            for (size_t j = i + 1; j < parts.size() && pi == parts.size(); ++j) {
                int shared = 0;
                for (size_t a = 0; a < parts[i].tape_vars.size(); ++a)
                    for (size_t b = 0; b < parts[j].tape_vars.size(); ++b)
                        if (parts[i].tape_vars[a] == parts[j].tape_vars[b]) {
                            shared++;
                            ti = static_cast<int>(a);
                            tj = static_cast<int>(b);
                        }
                if (shared > 1)
                    throw InternalError("two synchronized constraints share several variables");
                if (shared == 1) {
                    pi = i;
                    pj = j;
                }
            }
        }
        SyncConstraint merged;
        if (pi == parts.size()) {
            // no shared variable anywhere: loose product of the first two
            merged.aut = loose_product(*parts[0].aut, *parts[1].aut);
            merged.tape_vars = parts[0].tape_vars;
            merged.tape_vars.insert(merged.tape_vars.end(), parts[1].tape_vars.begin(),
                                    parts[1].tape_vars.end());
            parts.erase(parts.begin() + 1);
            parts.erase(parts.begin());
        } else {
            merged.aut = join(*parts[pi].aut, ti, *parts[pj].aut, tj);
            merged.tape_vars = parts[pi].tape_vars;
            for (size_t b = 0; b < parts[pj].tape_vars.size(); ++b)
                if (static_cast<int>(b) != tj) merged.tape_vars.push_back(parts[pj].tape_vars[b]);
            parts.erase(parts.begin() + pj);
            parts.erase(parts.begin() + pi);
        }
        parts.push_back(std::move(merged));
    }
    return parts[0];
}

ParikhVars parikh_formula(const Context& ctx, const NTapeAutomaton& a, lia::Problem& p,
                          std::vector<lia::Node>& conjuncts) {
    using lia::Expr;
    using lia::Node;
    ParikhVars pv;
    const auto& trans = a.transitions();

    for (size_t t = 0; t < trans.size(); ++t)
        pv.trans_count.push_back(p.add_var("t" + std::to_string(t), true));

    // distinct labels
    std::map<std::vector<SymbolId>, size_t> label_ix;
    for (const Transition& t : trans) {
        if (label_ix.count(t.label)) continue;
        size_t ix = pv.labels.size();
        label_ix[t.label] = ix;
        pv.labels.push_back(t.label);
        std::string nm = "#(";
        for (size_t i = 0; i < t.label.size(); ++i) {
            if (i) nm += ",";
            nm += t.label[i] == eps_sym ? "_" : ctx.alphabet.name(t.label[i]);
        }
        nm += ")";
        pv.label_count.push_back(p.add_var(nm, true));
    }
    // #label = sum of counts of transitions with that label
    for (size_t lx = 0; lx < pv.labels.size(); ++lx) {
        Expr e = Expr::var(pv.label_count[lx]);
        for (size_t t = 0; t < trans.size(); ++t)
            if (trans[t].label == pv.labels[lx]) e.add(pv.trans_count[t], -1);
        conjuncts.push_back(lia::atom_eq(std::move(e)));
    }

    // initial / final selectors, exactly one each
    for (size_t i = 0; i < a.init().size(); ++i)
        pv.init_sel.push_back(p.add_var("s" + std::to_string(a.init()[i]), true));
    for (size_t i = 0; i < a.final().size(); ++i)
        pv.final_sel.push_back(p.add_var("f" + std::to_string(a.final()[i]), true));
    {
        Expr sum = Expr::constant(-1);
        for (lia::Var v : pv.init_sel) sum.add(v, 1);
        conjuncts.push_back(lia::atom_eq(sum));
        Expr fsum = Expr::constant(-1);
        for (lia::Var v : pv.final_sel) fsum.add(v, 1);
        conjuncts.push_back(lia::atom_eq(fsum));
        for (lia::Var v : pv.init_sel) {
            Expr e = Expr::var(v);
            e.k = -1;  // v <= 1
            conjuncts.push_back(lia::atom_le(e));
        }
        for (lia::Var v : pv.final_sel) {
            Expr e = Expr::var(v);
            e.k = -1;
            conjuncts.push_back(lia::atom_le(e));
        }
    }

    // flow balance: inflow - outflow = final indicator - initial indicator,
    // i.e. inflow - outflow + s_q - f_q = 0
    for (uint32_t q = 0; q < a.num_states(); ++q) {
        Expr e;
        for (size_t t = 0; t < trans.size(); ++t) {
            if (trans[t].to == q) e.add(pv.trans_count[t], 1);
            if (trans[t].from == q) e.add(pv.trans_count[t], -1);
        }
        for (size_t i = 0; i < a.init().size(); ++i)
            if (a.init()[i] == q) e.add(pv.init_sel[i], 1);
        for (size_t i = 0; i < a.final().size(); ++i)
            if (a.final()[i] == q) e.add(pv.final_sel[i], -1);
        conjuncts.push_back(lia::atom_eq(std::move(e)));
    }

    // connectivity: distances from the chosen initial state along used edges
    for (uint32_t q = 0; q < a.num_states(); ++q)
        pv.dist.push_back(p.add_var("z" + std::to_string(q), true));
    for (uint32_t q = 0; q < a.num_states(); ++q) {
        std::vector<Node> alts;
        // unused: all incident counts zero and distance zero
        {
            std::vector<Node> zero;
            for (size_t t = 0; t < trans.size(); ++t)
                if (trans[t].from == q || trans[t].to == q)
                    zero.push_back(lia::atom_eq(Expr::var(pv.trans_count[t])));
            zero.push_back(lia::atom_eq(Expr::var(pv.dist[q])));
            alts.push_back(zero.empty() ? Node::truth(true) : Node::conj(std::move(zero)));
        }
        // chosen initial: distance one
        for (size_t i = 0; i < a.init().size(); ++i) {
            if (a.init()[i] != q) continue;
            Expr sel = Expr::var(pv.init_sel[i]);
            sel.k = -1;  // s - 1 <= 0 and 1 - s <= 0 -> s = 1
            Expr d = Expr::var(pv.dist[q]);
            d.k = -1;
            alts.push_back(Node::conj({lia::atom_eq(std::move(sel)), lia::atom_eq(std::move(d))}));
        }
        // reached: some used in-edge from a state one step closer
        for (size_t t = 0; t < trans.size(); ++t) {
            if (trans[t].to != q || trans[t].from == q) continue;
            Expr used;  // -y_t + 1 <= 0, i.e. y_t >= 1
            used.add(pv.trans_count[t], -1);
            used.k = 1;
            Expr step = Expr::var(pv.dist[q]);  // z_q - z_src - 1 = 0
            step.add(pv.dist[trans[t].from], -1);
            step.k = -1;
            Expr src_pos;  // z_src >= 1
            src_pos.add(pv.dist[trans[t].from], -1);
            src_pos.k = 1;
            alts.push_back(Node::conj({lia::atom_le(std::move(used)),
                                       lia::atom_eq(std::move(step)),
                                       lia::atom_le(std::move(src_pos))}));
        }
        conjuncts.push_back(Node::disj(std::move(alts)));
    }
    return pv;
}

void length_link(const Context& ctx, const NTapeAutomaton& a, const std::vector<lia::Var>& len_vars,
                 const ParikhVars& pv, lia::Problem& p, std::vector<lia::Node>& conjuncts) {
    using lia::Expr;
    for (int tape = 0; tape < a.tapes(); ++tape) {
        // letters occurring at this slot
        std::set<SymbolId> letters;
        for (const auto& label : pv.labels)
            if (label[tape] != eps_sym) letters.insert(label[tape]);
        Expr len = Expr::var(len_vars[tape]);
        for (SymbolId s : letters) {
            lia::Var aux = p.add_var("#" + ctx.alphabet.name(s) + "@" + std::to_string(tape + 1), true);
            len.add(aux, -1);
            Expr def = Expr::var(aux);
            for (size_t lx = 0; lx < pv.labels.size(); ++lx)
                if (pv.labels[lx][tape] == s) def.add(pv.label_count[lx], -1);
            conjuncts.push_back(lia::atom_eq(std::move(def)));
        }
        conjuncts.push_back(lia::atom_eq(std::move(len)));
    }
}

namespace {

lia::Node arith_atom_to_lia(const ArithAtom& a, const std::map<VarId, lia::Var>& len_vars) {
    lia::Expr e;  // lhs - rhs
    e.k = a.lhs.k - a.rhs.k;
    for (auto& [v, c] : a.lhs.coeffs) e.add(len_vars.at(v), c);
    for (auto& [v, c] : a.rhs.coeffs) e.add(len_vars.at(v), -c);
    switch (a.op) {
        case CmpOp::Le: return lia::atom_le(std::move(e));
        case CmpOp::Lt: return lia::atom_lt(std::move(e));
        case CmpOp::Eq: return lia::atom_eq(std::move(e));
    }
    throw InternalError("unreachable");
}

}  // namespace

LoweredClause lower_clause(Context& ctx, const Clause& c) {
    LoweredClause out;
    std::vector<lia::Node> conjuncts;

    out.sync = synchronize(ctx, c);
    if (!out.sync) {
        out.problem.formula = lia::Node::truth(false);
        return out;
    }

    // one length variable per string variable of the clause
    for (VarId v : free_vars(c)) out.len_vars[v] = out.problem.add_var("len_" + ctx.vars.name(v), true);

    const SyncConstraint& sc = *out.sync;
    if (sc.aut) {
        std::vector<lia::Var> tape_lens;
        for (VarId v : sc.tape_vars) tape_lens.push_back(out.len_vars.at(v));
        out.parikh = parikh_formula(ctx, *sc.aut, out.problem, conjuncts);
        length_link(ctx, *sc.aut, tape_lens, *out.parikh, out.problem, conjuncts);
    }
    // variables with no string atom are unconstrained words; with an empty
    // alphabet only eps exists
    if (ctx.alphabet.size() == 0) {
        std::set<VarId> on_tape(sc.tape_vars.begin(), sc.tape_vars.end());
        for (auto& [v, lv] : out.len_vars)
            if (!on_tape.count(v)) conjuncts.push_back(lia::atom_eq(lia::Expr::var(lv)));
    }
    for (const Atom& a : c.atoms)
        if (const auto* ar = std::get_if<ArithAtom>(&a))
            conjuncts.push_back(arith_atom_to_lia(*ar, out.len_vars));

    out.problem.formula = lia::Node::conj(std::move(conjuncts));
    return out;
}

namespace {

// Eulerian walk over the transitions with the solved multiplicities, starting
// at the chosen initial state. Returns the label sequence.
std::vector<std::vector<SymbolId>> euler_walk(const NTapeAutomaton& a,
                                              const std::vector<long long>& counts, uint32_t start) {
    const auto& trans = a.transitions();
    std::vector<long long> remaining = counts;
    // per-state out-transition indices
    std::vector<std::vector<size_t>> out(a.num_states());
    for (size_t t = 0; t < trans.size(); ++t) out[trans[t].from].push_back(t);
    std::vector<size_t> cursor(a.num_states(), 0);

    struct Frame {
        uint32_t state;
        size_t via;  // transition index, or SIZE_MAX for the start
    };
    std::vector<Frame> stack{{start, SIZE_MAX}};
    std::vector<size_t> circuit;
    while (!stack.empty()) {
        uint32_t v = stack.back().state;
        size_t& cur = cursor[v];
        while (cur < out[v].size() && remaining[out[v][cur]] == 0) cur++;
        if (cur < out[v].size()) {
            size_t t = out[v][cur];
            remaining[t]--;
            stack.push_back({trans[t].to, t});
        } else {
            if (stack.back().via != SIZE_MAX) circuit.push_back(stack.back().via);
            stack.pop_back();
        }
    }
    for (long long r : remaining)
        if (r != 0) throw InternalError("euler walk left unused transitions");
    std::reverse(circuit.begin(), circuit.end());
    std::vector<std::vector<SymbolId>> labels;
    for (size_t t : circuit) labels.push_back(trans[t].label);
    return labels;
}

}  // namespace

ClauseVerdict decide_clause(Context& ctx, const Clause& c, const DecideOptions& opts) {
    ClauseVerdict out;
    LoweredClause low = lower_clause(ctx, c);
    const lia::Problem& p = low.problem;

    if (!opts.emit_lia_path.empty()) {
        std::ofstream f(opts.emit_lia_path);
        f << lia::emit_smt2(p);
    }

    lia::Result r = opts.backend.external ? lia::solve_external(p, opts.backend.command)
                                          : lia::solve(p);
    switch (r.status) {
        case lia::Status::Unsat: out.kind = ClauseVerdict::Kind::Unsat; return out;
        case lia::Status::Unknown:
            out.kind = ClauseVerdict::Kind::Unknown;
            out.diag = r.diag;
            return out;
        case lia::Status::Sat: break;
    }
    out.kind = ClauseVerdict::Kind::Sat;
    if (!opts.want_model) return out;

    // reconstruct a word assignment from the integer model
    Interpretation eta;
    if (low.sync && low.sync->aut) {
        const NTapeAutomaton& a = *low.sync->aut;
        const ParikhVars& pv = *low.parikh;
        uint32_t start = a.init().empty() ? 0 : a.init()[0];
        for (size_t i = 0; i < pv.init_sel.size(); ++i)
            if (r.model[pv.init_sel[i]] == 1) start = a.init()[i];
        std::vector<long long> counts;
        for (lia::Var v : pv.trans_count) counts.push_back(r.model[v]);
        auto labels = euler_walk(a, counts, start);
        for (size_t tape = 0; tape < low.sync->tape_vars.size(); ++tape) {
            Word w;
            for (const auto& label : labels)
                if (label[tape] != eps_sym) w.push_back(label[tape]);
            eta.assignment[low.sync->tape_vars[tape]] = std::move(w);
        }
    }
    // remaining variables: any word of the solved length
    for (auto& [v, lv] : low.len_vars) {
        if (eta.assignment.count(v)) continue;
        long long len = r.model[lv];
        Word w;
        if (len > 0) {
            if (ctx.alphabet.base_letters().empty())
                throw InternalError("positive length but empty alphabet");
            w.assign(static_cast<size_t>(len), ctx.alphabet.base_letters()[0]);
        }
        eta.assignment[v] = std::move(w);
    }
    // the reconstruction must satisfy every atom
    for (const Atom& a : c.atoms)
        if (!eval_atom(a, eta)) throw InternalError("clause model fails an atom");
    out.model = std::move(eta);
    return out;
}

}  // namespace chainfree
