#include "chainfree/formula.hpp"

#include <algorithm>
#include <set>

namespace chainfree {

bool atom_equal(const Atom& a, const Atom& b) {
    if (a.index() != b.index()) return false;
    if (std::holds_alternative<MembershipAtom>(a)) {
        const auto& x = std::get<MembershipAtom>(a);
        const auto& y = std::get<MembershipAtom>(b);
        return x.term == y.term && x.aut->structurally_equal(*y.aut);
    }
    if (std::holds_alternative<RelationalAtom>(a)) {
        const auto& x = std::get<RelationalAtom>(a);
        const auto& y = std::get<RelationalAtom>(b);
        if (x.is_equality != y.is_equality || x.length_preserving != y.length_preserving)
            return false;
        if (!(x.lhs == y.lhs && x.rhs == y.rhs)) return false;
        if (x.is_equality) return true;
        return x.rel->structurally_equal(*y.rel);
    }
    const auto& x = std::get<ArithAtom>(a);
    const auto& y = std::get<ArithAtom>(b);
    return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
}

bool formula_equal(const Formula& a, const Formula& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Formula::Kind::Leaf) return atom_equal(*a.atom, *b.atom);
    if (a.kids.size() != b.kids.size()) return false;
    for (size_t i = 0; i < a.kids.size(); ++i)
        if (!formula_equal(a.kids[i], b.kids[i])) return false;
    return true;
}

// --- semantics ---------------------------------------------------------------

Word eval_term(const StrTerm& t, const Interpretation& eta) {
    Word w;
    for (VarId v : t.vars) {
        const Word& part = eta.word_of(v);
        w.insert(w.end(), part.begin(), part.end());
    }
    return w;
}

long long eval_arith(const ArithTerm& t, const Interpretation& eta) {
    long long sum = t.k;
    for (auto& [v, c] : t.coeffs) sum += c * static_cast<long long>(eta.word_of(v).size());
    return sum;
}

bool eval_atom(const Atom& a, const Interpretation& eta) {
    if (const auto* m = std::get_if<MembershipAtom>(&a)) {
        Word w = eval_term(m->term, eta);
        return accepts(*m->aut, {w});
    }
    if (const auto* r = std::get_if<RelationalAtom>(&a)) {
        Word l = eval_term(r->lhs, eta);
        Word rr = eval_term(r->rhs, eta);
        if (r->is_equality) return l == rr;
        return accepts(*r->rel, {l, rr});
    }
    const auto& c = std::get<ArithAtom>(a);
    long long l = eval_arith(c.lhs, eta), r = eval_arith(c.rhs, eta);
    switch (c.op) {
        case CmpOp::Le: return l <= r;
        case CmpOp::Lt: return l < r;
        case CmpOp::Eq: return l == r;
    }
    return false;
}

bool evaluate(const Formula& f, const Interpretation& eta) {
    switch (f.kind) {
        case Formula::Kind::Leaf: return eval_atom(*f.atom, eta);
        case Formula::Kind::Not: return !evaluate(f.kids[0], eta);
        case Formula::Kind::And:
            for (const Formula& k : f.kids)
                if (!evaluate(k, eta)) return false;
            return true;
        case Formula::Kind::Or:
            for (const Formula& k : f.kids)
                if (evaluate(k, eta)) return true;
            return false;
    }
    return false;
}

bool evaluate(const Clause& c, const Interpretation& eta) {
    for (const Atom& a : c.atoms)
        if (!eval_atom(a, eta)) return false;
    return true;
}

namespace {

void collect_vars(const Atom& a, std::set<VarId>& out) {
    if (const auto* m = std::get_if<MembershipAtom>(&a)) {
        out.insert(m->term.vars.begin(), m->term.vars.end());
    } else if (const auto* r = std::get_if<RelationalAtom>(&a)) {
        out.insert(r->lhs.vars.begin(), r->lhs.vars.end());
        out.insert(r->rhs.vars.begin(), r->rhs.vars.end());
    } else {
        const auto& c = std::get<ArithAtom>(a);
        for (auto& [v, coef] : c.lhs.coeffs) out.insert(v);
        for (auto& [v, coef] : c.rhs.coeffs) out.insert(v);
    }
}

void collect_vars(const Formula& f, std::set<VarId>& out) {
    if (f.kind == Formula::Kind::Leaf) collect_vars(*f.atom, out);
    for (const Formula& k : f.kids) collect_vars(k, out);
}

}  // namespace

std::vector<VarId> free_vars(const Formula& f) {
    std::set<VarId> s;
    collect_vars(f, s);
    return {s.begin(), s.end()};
}

std::vector<VarId> free_vars(const Clause& c) {
    std::set<VarId> s;
    for (const Atom& a : c.atoms) collect_vars(a, s);
    return {s.begin(), s.end()};
}

// --- DNF ----------------------------------------------------------------------

namespace {

ArithTerm term_len(const StrTerm& t) { return ArithTerm::len_of(t); }

// Negation of a single positive atom as a disjunction of positive atoms.
std::vector<Atom> negate_atom(Context& ctx, const Atom& a) {
    if (const auto* m = std::get_if<MembershipAtom>(&a)) {
        return {MembershipAtom{m->term, complement1(*m->aut, ctx.alphabet.all_letters())}};
    }
    if (const auto* r = std::get_if<RelationalAtom>(&a)) {
        if (!r->length_preserving)
            throw InputError("cannot negate a non-invertible relational constraint");
        // |l| < |r|  or  |r| < |l|  or  equal lengths but related by the
        // complement within equal-length pairs
        ArithAtom lt{term_len(r->lhs), term_len(r->rhs), CmpOp::Lt};
        ArithAtom gt{term_len(r->rhs), term_len(r->lhs), CmpOp::Lt};
        AutPtr base = r->is_equality ? aut_identity(ctx.alphabet.all_letters()) : r->rel;
        AutPtr diff = complement_lp(*base, ctx.alphabet.all_letters());
        RelationalAtom d{r->lhs, r->rhs, diff, false, true};
        return {Atom{lt}, Atom{gt}, Atom{d}};
    }
    const auto& c = std::get<ArithAtom>(a);
    switch (c.op) {
        case CmpOp::Le: return {ArithAtom{c.rhs, c.lhs, CmpOp::Lt}};
        case CmpOp::Lt: return {ArithAtom{c.rhs, c.lhs, CmpOp::Le}};
        case CmpOp::Eq: {
            return {Atom{ArithAtom{c.lhs, c.rhs, CmpOp::Lt}}, Atom{ArithAtom{c.rhs, c.lhs, CmpOp::Lt}}};
        }
    }
    throw InternalError("unreachable");
}

std::vector<Clause> dnf(Context& ctx, const Formula& f, bool neg) {
    switch (f.kind) {
        case Formula::Kind::Leaf: {
            if (!neg) return {Clause{{*f.atom}, 0}};
            std::vector<Clause> out;
            for (Atom& alt : negate_atom(ctx, *f.atom)) out.push_back(Clause{{std::move(alt)}, 0});
            return out;
        }
        case Formula::Kind::Not: return dnf(ctx, f.kids[0], !neg);
        case Formula::Kind::And:
        case Formula::Kind::Or: {
            bool conj = (f.kind == Formula::Kind::And) != neg;
            std::vector<std::vector<Clause>> kid_dnfs;
            for (const Formula& k : f.kids) kid_dnfs.push_back(dnf(ctx, k, neg));
            if (!conj) {
                std::vector<Clause> out;
                for (auto& kd : kid_dnfs)
                    for (Clause& c : kd) out.push_back(std::move(c));
                return out;
            }
            // cartesian product of clause lists
            std::vector<Clause> acc{Clause{}};
            for (auto& kd : kid_dnfs) {
                std::vector<Clause> next;
                for (const Clause& base : acc) {
                    for (const Clause& add : kd) {
                        Clause merged = base;
                        merged.atoms.insert(merged.atoms.end(), add.atoms.begin(), add.atoms.end());
                        next.push_back(std::move(merged));
                    }
                }
                acc = std::move(next);
            }
            return acc;
        }
    }
    throw InternalError("unreachable");
}

}  // namespace

std::vector<Clause> to_dnf(Context& ctx, const Formula& f) { return dnf(ctx, f, false); }

// --- left-sided form ----------------------------------------------------------

VarId fresh_var(Context& ctx, uint32_t& counter, const char* stem) {
    for (;;) {
        std::string name = stem + std::to_string(counter++);
        auto existing = ctx.vars.find(name);
        if (!existing) return ctx.vars.intern(name);
    }
}

VarId fresh_var(Context& ctx, Clause& c, const char* stem) { return fresh_var(ctx, c.fresh_counter, stem); }

Clause to_left_sided(Context& ctx, Clause c) {
    std::vector<Atom> out;
    for (Atom& a : c.atoms) {
        auto* r = std::get_if<RelationalAtom>(&a);
        if (!r || r->lhs.size() == 1) {
            out.push_back(std::move(a));
            continue;
        }
        VarId f = fresh_var(ctx, c);
        StrTerm fv{{f}};
        out.push_back(RelationalAtom{fv, r->rhs, r->rel, r->is_equality, r->length_preserving});
        out.push_back(RelationalAtom{fv, r->lhs, nullptr, true, true});
    }
    c.atoms = std::move(out);
    return c;
}

// --- substitution ---------------------------------------------------------------

namespace {

StrTerm subst_term(const StrTerm& t, VarId var, const std::vector<VarId>& repl) {
    StrTerm out;
    for (VarId v : t.vars) {
        if (v == var) out.vars.insert(out.vars.end(), repl.begin(), repl.end());
        else out.vars.push_back(v);
    }
    return out;
}

ArithTerm subst_arith(const ArithTerm& t, VarId var, const std::vector<VarId>& repl) {
    auto it = t.coeffs.find(var);
    if (it == t.coeffs.end()) return t;
    ArithTerm out = t;
    long long c = it->second;
    out.coeffs.erase(var);
    for (VarId v : repl) out.add_coeff(v, c);
    return out;
}

}  // namespace

Atom substitute(const Atom& a, VarId var, const std::vector<VarId>& repl) {
    if (const auto* m = std::get_if<MembershipAtom>(&a))
        return MembershipAtom{subst_term(m->term, var, repl), m->aut};
    if (const auto* r = std::get_if<RelationalAtom>(&a))
        return RelationalAtom{subst_term(r->lhs, var, repl), subst_term(r->rhs, var, repl), r->rel,
                              r->is_equality, r->length_preserving};
    const auto& c = std::get<ArithAtom>(a);
    return ArithAtom{subst_arith(c.lhs, var, repl), subst_arith(c.rhs, var, repl), c.op};
}

bool is_concat_free(const Atom& a) {
    if (const auto* m = std::get_if<MembershipAtom>(&a)) return m->term.size() <= 1;
    if (const auto* r = std::get_if<RelationalAtom>(&a))
        return r->lhs.size() <= 1 && r->rhs.size() <= 1;
    return true;
}

bool is_concat_free(const Clause& c) {
    for (const Atom& a : c.atoms)
        if (!is_concat_free(a)) return false;
    return true;
}

}  // namespace chainfree
