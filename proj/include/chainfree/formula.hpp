#ifndef CHAINFREE_FORMULA_HPP
#define CHAINFREE_FORMULA_HPP

#include <map>
#include <memory>
#include <variant>
#include <vector>

#include "chainfree/automata.hpp"
#include "chainfree/context.hpp"

namespace chainfree {

// Concatenation of string variables; the empty list is eps. Literal letters
// are eliminated at parse time, so terms never carry letters.
struct StrTerm {
    std::vector<VarId> vars;

    bool empty() const { return vars.empty(); }
    size_t size() const { return vars.size(); }
    friend bool operator==(const StrTerm&, const StrTerm&) = default;
};

// Linear function over variable lengths plus an integer constant, kept
// canonical: no zero coefficients.
struct ArithTerm {
    long long k = 0;
    std::map<VarId, long long> coeffs;

    static ArithTerm constant(long long c) { return ArithTerm{c, {}}; }
    static ArithTerm len_of(const StrTerm& t) {
        ArithTerm a;
        for (VarId v : t.vars) a.add_coeff(v, 1);
        return a;
    }
    void add_coeff(VarId v, long long c) {
        auto [it, fresh] = coeffs.emplace(v, 0);
        it->second += c;
        if (it->second == 0) coeffs.erase(it);
    }
    ArithTerm& operator+=(const ArithTerm& o) {
        k += o.k;
        for (auto& [v, c] : o.coeffs) add_coeff(v, c);
        return *this;
    }
    ArithTerm& operator-=(const ArithTerm& o) {
        k -= o.k;
        for (auto& [v, c] : o.coeffs) add_coeff(v, -c);
        return *this;
    }
    void scale(long long f) {
        k *= f;
        for (auto it = coeffs.begin(); it != coeffs.end();) {
            it->second *= f;
            it = it->second == 0 ? coeffs.erase(it) : std::next(it);
        }
    }
    friend bool operator==(const ArithTerm&, const ArithTerm&) = default;
};

enum class CmpOp { Le, Lt, Eq };

struct MembershipAtom {
    StrTerm term;
    AutPtr aut;  // one tape
};

// Relational constraint over a rational relation. Equality is a distinguished
// length-preserving relation: is_equality atoms carry no automaton and are
// interpreted as word equality.
struct RelationalAtom {
    StrTerm lhs;
    StrTerm rhs;
    AutPtr rel;  // two tapes; null iff is_equality
    bool is_equality = false;
    bool length_preserving = false;
};

struct ArithAtom {
    ArithTerm lhs;
    ArithTerm rhs;
    CmpOp op;
};

using Atom = std::variant<MembershipAtom, RelationalAtom, ArithAtom>;

bool atom_equal(const Atom& a, const Atom& b);

// Boolean tree over atoms. Negation is a node; the parser enforces that
// negation only reaches invertible atoms.
struct Formula {
    enum class Kind { Leaf, And, Or, Not };
    Kind kind = Kind::Leaf;
    std::shared_ptr<Atom> atom;    // Leaf
    std::vector<Formula> kids;     // And/Or (>=1), Not (exactly 1)

    static Formula leaf(Atom a) {
        Formula f;
        f.kind = Kind::Leaf;
        f.atom = std::make_shared<Atom>(std::move(a));
        return f;
    }
    static Formula make(Kind k, std::vector<Formula> kids) {
        Formula f;
        f.kind = k;
        f.kids = std::move(kids);
        return f;
    }
};

bool formula_equal(const Formula& a, const Formula& b);

// Conjunction of positive atoms. fresh_counter feeds deterministic _fN names
// introduced by left-siding and splitting within this clause.
struct Clause {
    std::vector<Atom> atoms;
    uint32_t fresh_counter = 0;
};

// Total assignment of words to string variables.
struct Interpretation {
    std::map<VarId, Word> assignment;

    const Word& word_of(VarId v) const {
        auto it = assignment.find(v);
        if (it == assignment.end()) throw InternalError("interpretation misses a variable");
        return it->second;
    }
};

// --- semantics ---------------------------------------------------------------

Word eval_term(const StrTerm& t, const Interpretation& eta);
long long eval_arith(const ArithTerm& t, const Interpretation& eta);
bool eval_atom(const Atom& a, const Interpretation& eta);
bool evaluate(const Formula& f, const Interpretation& eta);
bool evaluate(const Clause& c, const Interpretation& eta);

std::vector<VarId> free_vars(const Formula& f);
std::vector<VarId> free_vars(const Clause& c);

// --- normalizations ----------------------------------------------------------

// Disjunctive normal form with atom-wise negation elimination: membership by
// 1-tape complement, length-preserving relations by length mismatch or the
// complement-within-equal-lengths transducer, arithmetic by integer negation.
std::vector<Clause> to_dnf(Context& ctx, const Formula& f);

// Rewrites every relational atom to a single-variable left side, introducing
// fresh _fN variables bound by equalities.
Clause to_left_sided(Context& ctx, Clause c);

VarId fresh_var(Context& ctx, uint32_t& counter, const char* stem = "_f");
VarId fresh_var(Context& ctx, Clause& c, const char* stem = "_f");

// Substitutes var by the given (possibly empty) variable sequence in all
// atoms; occurrences of |var| in arithmetic atoms become the sum of the
// replacement lengths.
Atom substitute(const Atom& a, VarId var, const std::vector<VarId>& repl);

bool is_concat_free(const Atom& a);
bool is_concat_free(const Clause& c);

}  // namespace chainfree

#endif
