#include "chainfree/oracle.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace chainfree {

namespace {

enum class Tri { False, True, Unknown };

// Three-valued evaluation under a partial assignment: an atom whose variables
// are all assigned evaluates normally, anything else is Unknown. Lets the
// enumeration cut a branch as soon as the formula is already false.
class PartialEval {
public:
    PartialEval(const Formula& f, const std::vector<VarId>& order) : f_(f) {
        assigned_.resize(order.empty() ? 0 : *std::max_element(order.begin(), order.end()) + 1,
                         false);
    }

    void assign(VarId v, Word w) {
        if (v >= assigned_.size()) assigned_.resize(v + 1, false);
        assigned_[v] = true;
        eta_.assignment[v] = std::move(w);
    }

    void unassign(VarId v) {
        assigned_[v] = false;
        eta_.assignment.erase(v);
    }

    bool definitely_false() const { return eval(f_, false) == Tri::False; }
    bool satisfied() const { return eval(f_, false) == Tri::True; }
    const Interpretation& eta() const { return eta_; }

private:
    bool atom_ready(const Atom& a) const {
        std::vector<VarId> vars;
        if (const auto* m = std::get_if<MembershipAtom>(&a)) {
            vars = m->term.vars;
        } else if (const auto* r = std::get_if<RelationalAtom>(&a)) {
            vars = r->lhs.vars;
            vars.insert(vars.end(), r->rhs.vars.begin(), r->rhs.vars.end());
        } else {
            const auto& c = std::get<ArithAtom>(a);
            for (auto& [v, coef] : c.lhs.coeffs) vars.push_back(v);
            for (auto& [v, coef] : c.rhs.coeffs) vars.push_back(v);
        }
        for (VarId v : vars)
            if (v >= assigned_.size() || !assigned_[v]) return false;
        return true;
    }

    Tri eval(const Formula& f, bool neg) const {
        switch (f.kind) {
            case Formula::Kind::Leaf: {
                if (!atom_ready(*f.atom)) return Tri::Unknown;
                bool v = eval_atom(*f.atom, eta_);
                if (neg) v = !v;
                return v ? Tri::True : Tri::False;
            }
            case Formula::Kind::Not: return eval(f.kids[0], !neg);
            case Formula::Kind::And:
            case Formula::Kind::Or: {
                bool conj = (f.kind == Formula::Kind::And) != neg;
                bool unknown = false;
                for (const Formula& k : f.kids) {
                    Tri t = eval(k, neg);
                    if (conj && t == Tri::False) return Tri::False;
                    if (!conj && t == Tri::True) return Tri::True;
                    if (t == Tri::Unknown) unknown = true;
                }
                if (unknown) return Tri::Unknown;
                return conj ? Tri::True : Tri::False;
            }
        }
        return Tri::Unknown;
    }

    const Formula& f_;
    Interpretation eta_;
    std::vector<bool> assigned_;
};

// Words over the letters, lengths 0..max_len, in length-then-lexicographic
// order (letters ordered by id).
std::vector<Word> words_up_to(const std::vector<SymbolId>& letters, size_t max_len) {
    std::vector<Word> out{Word{}};
    std::vector<Word> layer{Word{}};
    for (size_t l = 1; l <= max_len; ++l) {
        std::vector<Word> next;
        for (const Word& w : layer) {
            for (SymbolId s : letters) {
                Word n = w;
                n.push_back(s);
                next.push_back(std::move(n));
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
        if (layer.empty()) break;
    }
    return out;
}

}  // namespace

std::optional<Interpretation> bounded_sat(const Context& ctx, const Formula& f, const Bound& b) {
    std::vector<VarId> order = free_vars(f);
    std::sort(order.begin(), order.end());  // declaration order = id order
    std::vector<SymbolId> letters = b.letters.empty() ? ctx.alphabet.all_letters() : b.letters;
    std::sort(letters.begin(), letters.end());
    std::vector<Word> candidates = words_up_to(letters, b.max_len);

    PartialEval pe(f, order);
    std::optional<Interpretation> found;
    std::function<bool(size_t)> go = [&](size_t idx) -> bool {
        if (pe.definitely_false()) return false;
        if (idx == order.size()) {
            if (pe.satisfied()) {
                found = pe.eta();
                return true;
            }
            return false;
        }
        for (const Word& w : candidates) {
            pe.assign(order[idx], w);
            if (go(idx + 1)) return true;
            pe.unassign(order[idx]);
        }
        return false;
    };
    go(0);
    return found;
}

}  // namespace chainfree
