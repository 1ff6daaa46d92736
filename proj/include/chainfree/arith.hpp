#ifndef CHAINFREE_ARITH_HPP
#define CHAINFREE_ARITH_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chainfree/context.hpp"

namespace chainfree::lia {

using Var = uint32_t;

// Linear expression sum(c_v * v) + k.
struct Expr {
    long long k = 0;
    std::map<Var, long long> c;

    void add(Var v, long long coeff) {
        auto [it, fresh] = c.emplace(v, 0);
        it->second += coeff;
        if (it->second == 0) c.erase(it);
    }
    Expr& operator+=(const Expr& o) {
        k += o.k;
        for (auto& [v, cf] : o.c) add(v, cf);
        return *this;
    }
    static Expr var(Var v) {
        Expr e;
        e.add(v, 1);
        return e;
    }
    static Expr constant(long long k) { return Expr{k, {}}; }
};

enum class Rel { Le, Eq };  // e <= 0 | e = 0

struct Constraint {
    Expr e;
    Rel rel;
};

// Quantifier-free boolean structure over linear atoms; negation is resolved
// when formulas are built (atoms are closed under negation over the integers).
struct Node {
    enum class Kind { Atom, And, Or, True, False };
    Kind kind = Kind::True;
    Constraint atom;
    std::vector<Node> kids;

    static Node truth(bool b) {
        Node n;
        n.kind = b ? Kind::True : Kind::False;
        return n;
    }
    static Node leaf(Constraint c) {
        Node n;
        n.kind = Kind::Atom;
        n.atom = std::move(c);
        return n;
    }
    static Node conj(std::vector<Node> kids) {
        Node n;
        n.kind = Kind::And;
        n.kids = std::move(kids);
        return n;
    }
    static Node disj(std::vector<Node> kids) {
        Node n;
        n.kind = Kind::Or;
        n.kids = std::move(kids);
        return n;
    }
};

// e <= 0, e = 0, e < 0 (strict folds to <= -1), and negations.
Node atom_le(Expr e);
Node atom_lt(Expr e);
Node atom_eq(Expr e);
Node atom_ne(Expr e);

struct Problem {
    struct VarInfo {
        std::string name;
        bool nonneg = false;
    };
    std::vector<VarInfo> vars;
    Node formula = Node::truth(true);

    Var add_var(std::string name, bool nonneg) {
        vars.push_back({std::move(name), nonneg});
        return static_cast<Var>(vars.size() - 1);
    }
};

struct Limits {
    uint64_t max_nodes = 1000000;
};

enum class Status { Sat, Unsat, Unknown };

struct Result {
    Status status = Status::Unknown;
    std::vector<long long> model;  // by Var, valid when Sat
    std::string diag;
    uint64_t nodes = 0;
};

// Internal decision procedure: boolean structure explored as a lazy DNF with
// rational-relaxation pruning; conjunctions go through exact integer equality
// elimination and then branch-and-bound over an exact rational simplex.
Result solve(const Problem& p, const Limits& lim = {});

// Subprocess backend speaking SMT-LIB2 on stdin/stdout.
Result solve_external(const Problem& p, const std::string& command);

// QF_LIA text: (set-logic QF_LIA), declarations, one assert per top-level
// conjunct, (check-sat).
std::string emit_smt2(const Problem& p);

// Reader for the same fragment, for the --solve-lia self-backend mode.
Problem parse_smt2(const std::string& text);

// z3-style textual reply for a result.
std::string format_reply(const Problem& p, const Result& r);

bool check_model(const Problem& p, const std::vector<long long>& model);

}  // namespace chainfree::lia

#endif
