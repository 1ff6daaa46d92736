#include "chainfree/arith.hpp"

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

namespace chainfree::lia {

namespace {

struct Overflow {};

using I128 = __int128;

I128 add_ck(I128 a, I128 b) {
    I128 r;
    if (__builtin_add_overflow(a, b, &r)) throw Overflow{};
    return r;
}
I128 sub_ck(I128 a, I128 b) {
    I128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw Overflow{};
    return r;
}
I128 mul_ck(I128 a, I128 b) {
    I128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
    return r;
}

I128 gcd128(I128 a, I128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        I128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Exact rational on checked 128-bit integers; kept normalized with a positive
// denominator.
struct Rat {
    I128 n = 0, d = 1;

    Rat() = default;
    Rat(I128 num) : n(num), d(1) {}
    Rat(I128 num, I128 den) : n(num), d(den) { norm(); }

    void norm() {
        if (d == 0) throw Overflow{};
        if (d < 0) {
            n = -n;
            d = -d;
        }
        I128 g = gcd128(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
    }
    bool is_zero() const { return n == 0; }
    bool is_int() const { return d == 1; }
    friend Rat operator+(const Rat& a, const Rat& b) {
        return Rat(add_ck(mul_ck(a.n, b.d), mul_ck(b.n, a.d)), mul_ck(a.d, b.d));
    }
    friend Rat operator-(const Rat& a, const Rat& b) {
        return Rat(sub_ck(mul_ck(a.n, b.d), mul_ck(b.n, a.d)), mul_ck(a.d, b.d));
    }
    friend Rat operator*(const Rat& a, const Rat& b) { return Rat(mul_ck(a.n, b.n), mul_ck(a.d, b.d)); }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.n == 0) throw Overflow{};
        return Rat(mul_ck(a.n, b.d), mul_ck(a.d, b.n));
    }
    Rat operator-() const { return Rat(-n, d); }
    friend bool operator==(const Rat& a, const Rat& b) { return a.n == b.n && a.d == b.d; }
    friend bool operator<(const Rat& a, const Rat& b) {
        return mul_ck(a.n, b.d) < mul_ck(b.n, a.d);
    }
    friend bool operator<=(const Rat& a, const Rat& b) { return a == b || a < b; }

    I128 floor() const {
        I128 q = n / d;
        if (n % d != 0 && n < 0) q -= 1;
        return q;
    }
    I128 ceil() const {
        I128 q = n / d;
        if (n % d != 0 && n > 0) q += 1;
        return q;
    }
    // nearest integer, half away from zero
    I128 round() const {
        I128 two_n = mul_ck(n, 2);
        if (n >= 0) return add_ck(two_n, d) / mul_ck(d, 2);
        return sub_ck(two_n, d) / mul_ck(d, 2);
    }
};

// ---------- exact LP feasibility (phase-1 simplex, Bland's rule) -------------

// Constraints over structural variables x >= 0: rows of (coeffs, rel, rhs).
struct LpRow {
    std::vector<Rat> a;
    Rel rel;
    Rat b;
};

struct LpResult {
    bool feasible = false;
    std::vector<Rat> point;
};

LpResult lp_feasible(std::vector<LpRow> rows, size_t nvars) {
    // Normalize each row so its rhs is nonnegative, then classify:
    //   LE rows get a basic slack, GE rows a surplus plus a basic artificial,
    //   EQ rows a basic artificial. Columns: structural, slacks, artificials.
    enum class Shape { LeSlack, GeSurplus, EqArt };
    std::vector<Shape> shapes;
    size_t nslack = 0, nart = 0;
    for (LpRow& r : rows) {
        bool neg = r.b < Rat(0);
        if (neg) {
            for (Rat& c : r.a) c = -c;
            r.b = -r.b;
        }
        if (r.rel == Rel::Eq) {
            shapes.push_back(Shape::EqArt);
            nart++;
        } else if (!neg) {
            shapes.push_back(Shape::LeSlack);
            nslack++;
        } else {
            shapes.push_back(Shape::GeSurplus);  // a x >= b after negation
            nslack++;
            nart++;
        }
    }
    size_t ncols = nvars + nslack + nart;
    std::vector<std::vector<Rat>> A;
    std::vector<Rat> rhs;
    std::vector<size_t> basis;
    std::vector<bool> is_art(ncols, false);
    size_t slack_at = nvars, art_at = nvars + nslack;

    for (size_t i = 0; i < rows.size(); ++i) {
        std::vector<Rat> row(ncols, Rat(0));
        rows[i].a.resize(nvars, Rat(0));
        for (size_t j = 0; j < nvars; ++j) row[j] = rows[i].a[j];
        switch (shapes[i]) {
            case Shape::LeSlack:
                row[slack_at] = Rat(1);
                basis.push_back(slack_at++);
                break;
            case Shape::GeSurplus:
                row[slack_at++] = Rat(-1);
                row[art_at] = Rat(1);
                is_art[art_at] = true;
                basis.push_back(art_at++);
                break;
            case Shape::EqArt:
                row[art_at] = Rat(1);
                is_art[art_at] = true;
                basis.push_back(art_at++);
                break;
        }
        A.push_back(std::move(row));
        rhs.push_back(rows[i].b);
    }

    const size_t m = A.size();
    // objective: minimize sum of artificials; reduced costs via z-row
    std::vector<Rat> z(ncols, Rat(0));
    Rat zval(0);
    for (size_t j = 0; j < ncols; ++j)
        if (is_art[j]) z[j] = Rat(1);
    // price out basic artificials
    for (size_t i = 0; i < m; ++i) {
        if (is_art[basis[i]]) {
            for (size_t j = 0; j < ncols; ++j) z[j] = z[j] - A[i][j];
            zval = zval - rhs[i];
        }
    }

    auto pivot = [&](size_t pr, size_t pc) {
        Rat p = A[pr][pc];
        for (size_t j = 0; j < ncols; ++j) A[pr][j] = A[pr][j] / p;
        rhs[pr] = rhs[pr] / p;
        for (size_t i = 0; i < m; ++i) {
            if (i == pr || A[i][pc].is_zero()) continue;
            Rat f = A[i][pc];
            for (size_t j = 0; j < ncols; ++j) A[i][j] = A[i][j] - f * A[pr][j];
            rhs[i] = rhs[i] - f * rhs[pr];
        }
        if (!z[pc].is_zero()) {
            Rat f = z[pc];
            for (size_t j = 0; j < ncols; ++j) z[j] = z[j] - f * A[pr][j];
            zval = zval - f * rhs[pr];
        }
        basis[pr] = pc;
    };

    for (;;) {
        // Bland: entering = lowest-index column with negative reduced cost
        size_t enter = ncols;
        for (size_t j = 0; j < ncols; ++j)
            if (z[j] < Rat(0)) {
                enter = j;
                break;
            }
        if (enter == ncols) break;
        size_t leave = m;
        Rat best(0);
        for (size_t i = 0; i < m; ++i) {
            if (!(Rat(0) < A[i][enter])) continue;
            Rat ratio = rhs[i] / A[i][enter];
            if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m) break;  // unbounded below: cannot happen for phase 1, guard anyway
        pivot(leave, enter);
    }

    LpResult out;
    if (Rat(0) < -zval) {  // zval < 0 never happens; feasible iff optimum == 0
        out.feasible = false;
        return out;
    }
    if (Rat(0) < zval) {
        out.feasible = false;
        return out;
    }
    out.feasible = true;
    out.point.assign(nvars, Rat(0));
    for (size_t i = 0; i < m; ++i)
        if (basis[i] < nvars) out.point[basis[i]] = rhs[i];
    return out;
}

// ---------- conjunction solving ----------------------------------------------

// Working form of a conjunction: constraints over an extended variable space
// (problem vars + fresh change-of-basis vars), with a back-substitution list
// for model reconstruction.
struct ConjState {
    std::vector<Constraint> cons;
    size_t nvars;                                   // extended var count
    std::vector<std::pair<Var, Expr>> subs;         // eliminated var -> expr over later space
    std::vector<bool> free_var;                     // extended var is sign-free
};

std::optional<I128> eval_expr_int(const Expr& e, const std::vector<I128>& val) {
    I128 sum = e.k;
    for (auto& [v, c] : e.c) sum = add_ck(sum, mul_ck(c, val[v]));
    return sum;
}

bool holds_int(const Constraint& c, const std::vector<I128>& val) {
    I128 x = *eval_expr_int(c.e, val);
    return c.rel == Rel::Eq ? x == 0 : x <= 0;
}

void substitute_var(std::vector<Constraint>& cons, Var v, const Expr& repl) {
    for (Constraint& c : cons) {
        auto it = c.e.c.find(v);
        if (it == c.e.c.end()) continue;
        long long f = it->second;
        c.e.c.erase(it);
        I128 nk = add_ck(c.e.k, mul_ck(static_cast<I128>(f), repl.k));
        if (nk > INT64_MAX || nk < INT64_MIN) throw Overflow{};
        c.e.k = static_cast<long long>(nk);
        for (auto& [w, cf] : repl.c) {
            I128 add = mul_ck(static_cast<I128>(f), cf);
            I128 cur = c.e.c.count(w) ? c.e.c[w] : 0;
            I128 nc = add_ck(cur, add);
            if (nc > INT64_MAX || nc < INT64_MIN) throw Overflow{};
            if (nc == 0) c.e.c.erase(w);
            else c.e.c[w] = static_cast<long long>(nc);
        }
    }
}

// Integer-only strengthening: divide every constraint by the gcd of its
// coefficients, rounding inequality constants inward, and merge opposed
// inequality pairs into equalities. Makes rational-only bands visible to the
// relaxation. Returns false on an immediate contradiction.
bool preprocess(std::vector<Constraint>& cons) {
    std::map<std::map<Var, long long>, long long> tightest;  // var part -> best k (max)
    for (Constraint& c : cons) {
        if (c.e.c.empty()) {
            if (c.rel == Rel::Eq ? c.e.k != 0 : c.e.k > 0) return false;
            continue;
        }
        I128 g = 0;
        for (auto& [v, cf] : c.e.c) g = gcd128(g, cf);
        long long gl = static_cast<long long>(g);
        if (gl > 1) {
            if (c.rel == Rel::Eq) {
                if (c.e.k % gl != 0) return false;
                c.e.k /= gl;
            } else {
                // sum(a) x + k <= 0  ->  sum(a/g) x <= floor(-k/g)
                I128 q = -c.e.k;
                I128 fl = q / gl;
                if (q % gl != 0 && q < 0) fl -= 1;
                c.e.k = -static_cast<long long>(fl);
            }
            for (auto& [v, cf] : c.e.c) cf /= gl;
        }
        if (c.rel == Rel::Le) {
            auto [it, fresh] = tightest.emplace(c.e.c, c.e.k);
            if (!fresh) it->second = std::max(it->second, c.e.k);
        }
    }
    // e + k <= 0 and -e + k' <= 0 with k + k' >= 0 pin e to a point
    for (Constraint& c : cons) {
        if (c.rel != Rel::Le || c.e.c.empty()) continue;
        std::map<Var, long long> neg;
        for (auto& [v, cf] : c.e.c) neg[v] = -cf;
        auto it = tightest.find(neg);
        if (it == tightest.end()) continue;
        if (c.e.k + it->second == 0) c.rel = Rel::Eq;  // e = -k on both sides
        if (c.e.k + it->second > 0) return false;
    }
    return true;
}

// Eliminate all equalities exactly over the integers. Returns false if the
// system is integrally infeasible already.
bool eliminate_equalities(ConjState& st) {
    for (;;) {
        size_t eq_idx = st.cons.size();
        for (size_t i = 0; i < st.cons.size(); ++i)
            if (st.cons[i].rel == Rel::Eq) {
                eq_idx = i;
                break;
            }
        if (eq_idx == st.cons.size()) return true;
        Constraint eq = st.cons[eq_idx];
        st.cons.erase(st.cons.begin() + eq_idx);

        if (eq.e.c.empty()) {
            if (eq.e.k != 0) return false;
            continue;
        }
        // gcd reduction
        I128 g = 0;
        for (auto& [v, c] : eq.e.c) g = gcd128(g, c);
        if (g > 1) {
            if (eq.e.k % static_cast<long long>(g) != 0) return false;
            eq.e.k /= static_cast<long long>(g);
            for (auto& [v, c] : eq.e.c) c /= static_cast<long long>(g);
        }
        // Euclidean change of basis until some coefficient hits +-1
        for (;;) {
            auto min_it = eq.e.c.begin();
            for (auto it = eq.e.c.begin(); it != eq.e.c.end(); ++it)
                if (std::llabs(it->second) < std::llabs(min_it->second)) min_it = it;
            if (std::llabs(min_it->second) == 1) break;
            // some coefficient is not divisible by the minimum (gcd is 1)
            Var xk = min_it->first;
            long long ak = min_it->second;
            Var xj = xk;
            long long aj = 0;
            for (auto& [v, c] : eq.e.c) {
                if (v != xk && c % ak != 0) {
                    xj = v;
                    aj = c;
                    break;
                }
            }
            if (xj == xk) throw InternalError("equality gcd reduction stuck");
            long long q = aj / ak;  // truncation keeps |aj - q*ak| < |ak|
            // unimodular change of basis y := xk + q*xj, so xk = y - q*xj
            Var y = static_cast<Var>(st.nvars++);
            st.free_var.push_back(true);
            Expr repl = Expr::var(y);
            repl.add(xj, -q);
            substitute_var(st.cons, xk, repl);
            {
                std::vector<Constraint> one{Constraint{eq.e, Rel::Eq}};
                substitute_var(one, xk, repl);
                eq.e = one[0].e;
            }
            st.subs.emplace_back(xk, repl);
        }
        // solve for the unit-coefficient variable
        auto unit_it = eq.e.c.begin();
        for (auto it = eq.e.c.begin(); it != eq.e.c.end(); ++it)
            if (std::llabs(it->second) == 1) {
                unit_it = it;
                break;
            }
        Var x = unit_it->first;
        long long a = unit_it->second;
        Expr repl;  // x = -(rest)/a with |a| = 1
        repl.k = -eq.e.k * a;
        for (auto& [v, c] : eq.e.c)
            if (v != x) repl.add(v, -c * a);
        substitute_var(st.cons, x, repl);
        st.subs.emplace_back(x, repl);
    }
}

// Column layout for an LP over problem variables: nonnegative variables get
// one structural column, free variables a positive and a negative part.
struct LpCols {
    std::vector<size_t> pos, neg;  // neg[v] == SIZE_MAX for nonneg vars
    size_t ncols = 0;

    explicit LpCols(const std::vector<bool>& free_var) {
        pos.resize(free_var.size());
        neg.assign(free_var.size(), SIZE_MAX);
        for (size_t v = 0; v < free_var.size(); ++v) {
            pos[v] = ncols++;
            if (free_var[v]) neg[v] = ncols++;
        }
    }
    LpRow row(const Constraint& c) const {
        LpRow r;
        r.a.assign(ncols, Rat(0));
        for (auto& [v, cf] : c.e.c) {
            r.a[pos[v]] = Rat(cf);
            if (neg[v] != SIZE_MAX) r.a[neg[v]] = Rat(-cf);
        }
        r.rel = c.rel;
        r.b = Rat(-c.e.k);
        return r;
    }
    std::vector<Rat> values(const LpResult& lp, size_t nvars) const {
        std::vector<Rat> x(nvars, Rat(0));
        for (size_t v = 0; v < nvars; ++v) {
            x[v] = lp.point[pos[v]];
            if (neg[v] != SIZE_MAX) x[v] = x[v] - lp.point[neg[v]];
        }
        return x;
    }
};

struct BnB {
    const Limits& lim;
    uint64_t nodes = 0;
    bool hit_limit = false;

    // model over the extended var space, or nothing
    std::optional<std::vector<I128>> run(const ConjState& st) {
        std::vector<Constraint> cons = st.cons;
        return go(st, cons, 0);
    }

    std::optional<std::vector<I128>> go(const ConjState& st, std::vector<Constraint>& cons,
                                        int depth) {
        if (++nodes > lim.max_nodes) {
            hit_limit = true;
            return std::nullopt;
        }
        // gcd-tightened copy of the node's constraints
        std::vector<Constraint> local = cons;
        if (!preprocess(local)) return std::nullopt;
        size_t n = st.nvars;
        LpCols cols(st.free_var);
        std::vector<LpRow> rows;
        for (const Constraint& c : local) rows.push_back(cols.row(c));
        LpResult lp = lp_feasible(std::move(rows), cols.ncols);
        if (!lp.feasible) return std::nullopt;
        std::vector<Rat> x = cols.values(lp, n);

        // integral vertex
        size_t frac = n;
        Rat best_dist(1);
        for (size_t v = 0; v < n; ++v) {
            if (x[v].is_int()) continue;
            Rat fr = x[v] - Rat(x[v].floor());
            Rat dist = fr < Rat(1, 2) ? Rat(1, 2) - fr : fr - Rat(1, 2);
            if (frac == n || dist < best_dist) {
                frac = v;
                best_dist = dist;
            }
        }
        if (frac == n) {
            std::vector<I128> model(n);
            for (size_t v = 0; v < n; ++v) model[v] = x[v].n;
            return model;
        }
        // rounding probe
        {
            std::vector<I128> probe(n);
            for (size_t v = 0; v < n; ++v) probe[v] = x[v].round();
            bool ok = true;
            for (const Constraint& c : cons)
                if (!holds_int(c, probe)) {
                    ok = false;
                    break;
                }
            if (ok) return probe;
        }
        // branch floor / ceil on the most fractional variable
        I128 fl = x[frac].floor();
        {
            Constraint c;  // v <= fl
            c.rel = Rel::Le;
            c.e.add(static_cast<Var>(frac), 1);
            if (fl > INT64_MAX || fl < INT64_MIN) throw Overflow{};
            c.e.k = -static_cast<long long>(fl);
            cons.push_back(c);
            auto r = go(st, cons, depth + 1);
            cons.pop_back();
            if (r) return r;
            if (hit_limit) return std::nullopt;
        }
        {
            Constraint c;  // v >= fl + 1
            c.rel = Rel::Le;
            c.e.add(static_cast<Var>(frac), -1);
            I128 b = add_ck(fl, 1);
            if (b > INT64_MAX || b < INT64_MIN) throw Overflow{};
            c.e.k = static_cast<long long>(b);
            cons.push_back(c);
            auto r = go(st, cons, depth + 1);
            cons.pop_back();
            return r;
        }
    }
};

// Solve one conjunction of constraints over the problem variables.
struct ConjOutcome {
    Status status;
    std::vector<long long> model;
    uint64_t nodes = 0;
};

ConjOutcome solve_conjunction(const Problem& p, std::vector<Constraint> cons, const Limits& lim) {
    ConjOutcome out;
    std::vector<Constraint> original = cons;

    ConjState st;
    st.nvars = p.vars.size();
    st.free_var.assign(p.vars.size(), false);
    for (Var v = 0; v < p.vars.size(); ++v) {
        st.free_var[v] = !p.vars[v].nonneg;
        if (p.vars[v].nonneg) {
            Constraint c;  // -v <= 0
            c.rel = Rel::Le;
            c.e.add(v, -1);
            cons.push_back(c);
        }
    }
    st.cons = std::move(cons);

    // tighten and eliminate until no equalities remain; merged inequality
    // pairs can surface new equalities, each elimination removes a variable
    for (;;) {
        if (!preprocess(st.cons)) {
            out.status = Status::Unsat;
            return out;
        }
        bool has_eq = false;
        for (const Constraint& c : st.cons)
            if (c.rel == Rel::Eq && !c.e.c.empty()) has_eq = true;
        if (!has_eq) break;
        if (!eliminate_equalities(st)) {
            out.status = Status::Unsat;
            return out;
        }
    }
    BnB bnb{lim};
    auto model_ext = bnb.run(st);
    out.nodes = bnb.nodes;
    if (!model_ext) {
        out.status = bnb.hit_limit ? Status::Unknown : Status::Unsat;
        return out;
    }
    // back-substitute eliminated variables, most recent first
    std::vector<I128> val = *model_ext;
    val.resize(st.nvars, 0);
    for (auto it = st.subs.rbegin(); it != st.subs.rend(); ++it) {
        I128 x = it->second.k;
        for (auto& [v, c] : it->second.c) x = add_ck(x, mul_ck(c, val[v]));
        if (it->first >= val.size()) val.resize(it->first + 1, 0);
        val[it->first] = x;
    }
    out.model.resize(p.vars.size());
    for (Var v = 0; v < p.vars.size(); ++v) {
        if (val[v] > INT64_MAX || val[v] < INT64_MIN) throw Overflow{};
        out.model[v] = static_cast<long long>(val[v]);
    }
    // exact re-check of the conjunction
    std::vector<I128> chk(val.begin(), val.begin() + p.vars.size());
    for (const Constraint& c : original)
        if (!holds_int(c, chk)) throw InternalError("lia model fails a constraint");
    out.status = Status::Sat;
    return out;
}

// quick rational prune of a partial conjunction
bool lp_prune_feasible(const Problem& p, const std::vector<Constraint>& cons) {
    std::vector<bool> free_var(p.vars.size());
    for (Var v = 0; v < p.vars.size(); ++v) free_var[v] = !p.vars[v].nonneg;
    LpCols cols(free_var);
    std::vector<LpRow> rows;
    for (const Constraint& c : cons) rows.push_back(cols.row(c));
    return lp_feasible(std::move(rows), cols.ncols).feasible;
}

}  // namespace

Node atom_le(Expr e) { return Node::leaf({std::move(e), Rel::Le}); }
Node atom_lt(Expr e) {
    e.k += 1;
    return Node::leaf({std::move(e), Rel::Le});
}
Node atom_eq(Expr e) { return Node::leaf({std::move(e), Rel::Eq}); }
Node atom_ne(Expr e) {
    Expr lt = e;
    lt.k += 1;  // e + 1 <= 0
    Expr gt;    // -e + 1 <= 0
    gt.k = -e.k + 1;
    for (auto& [v, c] : e.c) gt.add(v, -c);
    return Node::disj({atom_le(std::move(lt)), atom_le(std::move(gt))});
}

Result solve(const Problem& p, const Limits& lim) {
    Result res;
    try {
        bool any_unknown = false;
        uint64_t nodes = 0;
        std::vector<Constraint> trail;
        // Collects the atoms a node contributes when it has no disjunction
        // inside; used for disjunct lookahead.
        std::function<bool(const Node*, std::vector<Constraint>&)> flat_atoms =
            [&](const Node* n, std::vector<Constraint>& out) -> bool {
            switch (n->kind) {
                case Node::Kind::True: return true;
                case Node::Kind::False: return false;
                case Node::Kind::Atom: out.push_back(n->atom); return true;
                case Node::Kind::And:
                    for (const Node& k : n->kids)
                        if (!flat_atoms(&k, out)) return false;
                    return true;
                case Node::Kind::Or: out.clear(); return true;  // opaque, treat as free
            }
            return true;
        };
        // Depth-first over disjunction choices. Conjunctive content is
        // flattened onto the trail first; every level prunes with the rational
        // relaxation of the full trail, commits disjunctions with a single
        // surviving alternative, and branches on the narrowest one.
        std::function<bool(std::vector<const Node*>)> dfs =
            [&](std::vector<const Node*> pending) -> bool {
            size_t mark = trail.size();
            bool viable = true;
            std::vector<const Node*> ors;
            for (size_t i = 0; i < pending.size() && viable; ++i) {
                const Node* n = pending[i];
                switch (n->kind) {
                    case Node::Kind::True: break;
                    case Node::Kind::False: viable = false; break;
                    case Node::Kind::Atom: trail.push_back(n->atom); break;
                    case Node::Kind::And:
                        for (const Node& k : n->kids) pending.push_back(&k);
                        break;
                    case Node::Kind::Or: ors.push_back(n); break;
                }
            }
            bool found = false;
            if (viable && (trail.empty() || lp_prune_feasible(p, trail))) {
                if (ors.empty()) {
                    ConjOutcome o = solve_conjunction(p, trail, lim);
                    nodes += o.nodes;
                    if (o.status == Status::Sat) {
                        res.model = std::move(o.model);
                        found = true;
                    } else if (o.status == Status::Unknown) {
                        any_unknown = true;
                    }
                } else {
                    // lookahead: per disjunction, which alternatives survive
                    // the relaxation on their own
                    size_t best = ors.size();
                    std::vector<const Node*> best_kids;
                    bool dead = false;
                    for (size_t oi = 0; oi < ors.size() && !dead; ++oi) {
                        std::vector<const Node*> kids;
                        for (const Node& kid : ors[oi]->kids) {
                            std::vector<Constraint> extra;
                            if (flat_atoms(&kid, extra) && !extra.empty()) {
                                size_t m2 = trail.size();
                                trail.insert(trail.end(), extra.begin(), extra.end());
                                bool ok = lp_prune_feasible(p, trail);
                                trail.resize(m2);
                                if (!ok) continue;
                            } else if (kid.kind == Node::Kind::False) {
                                continue;
                            }
                            kids.push_back(&kid);
                        }
                        if (kids.empty()) {
                            dead = true;
                            break;
                        }
                        if (best == ors.size() || kids.size() < best_kids.size()) {
                            best = oi;
                            best_kids = std::move(kids);
                            if (best_kids.size() == 1) break;  // unit: commit now
                        }
                    }
                    if (!dead) {
                        std::vector<const Node*> rest;
                        for (size_t oi = 0; oi < ors.size(); ++oi)
                            if (oi != best) rest.push_back(ors[oi]);
                        for (const Node* kid : best_kids) {
                            std::vector<const Node*> next = rest;
                            next.push_back(kid);
                            if (dfs(std::move(next))) {
                                found = true;
                                break;
                            }
                        }
                    }
                }
            }
            if (!found) trail.resize(mark);
            return found;
        };
        bool sat = dfs({&p.formula});
        res.nodes = nodes;
        if (sat) {
            res.status = Status::Sat;
            if (!check_model(p, res.model)) throw InternalError("lia model fails the formula");
        } else {
            res.status = any_unknown ? Status::Unknown : Status::Unsat;
            if (any_unknown) res.diag = "node limit exhausted";
        }
    } catch (const Overflow&) {
        res.status = Status::Unknown;
        res.diag = "arithmetic overflow in exact solver";
    }
    return res;
}

bool check_model(const Problem& p, const std::vector<long long>& model) {
    std::vector<I128> val(model.begin(), model.end());
    std::function<bool(const Node&)> ev = [&](const Node& n) -> bool {
        switch (n.kind) {
            case Node::Kind::True: return true;
            case Node::Kind::False: return false;
            case Node::Kind::Atom: return holds_int(n.atom, val);
            case Node::Kind::And:
                for (const Node& k : n.kids)
                    if (!ev(k)) return false;
                return true;
            case Node::Kind::Or:
                for (const Node& k : n.kids)
                    if (ev(k)) return true;
                return false;
        }
        return false;
    };
    for (Var v = 0; v < p.vars.size(); ++v)
        if (p.vars[v].nonneg && model[v] < 0) return false;
    return ev(p.formula);
}

// ---------- SMT-LIB2 ----------------------------------------------------------

namespace {

std::string smt_name(const Problem& p, Var v, std::vector<std::string>& cache) {
    if (cache.empty()) {
        std::set<std::string> used;
        for (const auto& vi : p.vars) {
            std::string s;
            for (char c : vi.name)
                s += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
                      c == '-')
                         ? c
                         : '_';
            if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '-')
                s = "v" + s;
            std::string base = s;
            int suffix = 1;
            while (used.count(s)) s = base + "." + std::to_string(suffix++);
            used.insert(s);
            cache.push_back(s);
        }
    }
    return cache[v];
}

std::string smt_expr(const Problem& p, const Expr& e, std::vector<std::string>& names) {
    std::vector<std::string> parts;
    for (auto& [v, c] : e.c) {
        std::string vn = smt_name(p, v, names);
        if (c == 1) parts.push_back(vn);
        else if (c < 0) parts.push_back("(* (- " + std::to_string(-c) + ") " + vn + ")");
        else parts.push_back("(* " + std::to_string(c) + " " + vn + ")");
    }
    if (e.k != 0 || parts.empty())
        parts.push_back(e.k < 0 ? "(- " + std::to_string(-e.k) + ")" : std::to_string(e.k));
    if (parts.size() == 1) return parts[0];
    std::string out = "(+";
    for (const std::string& s : parts) out += " " + s;
    return out + ")";
}

std::string smt_node(const Problem& p, const Node& n, std::vector<std::string>& names) {
    switch (n.kind) {
        case Node::Kind::True: return "true";
        case Node::Kind::False: return "false";
        case Node::Kind::Atom: {
            std::string e = smt_expr(p, n.atom.e, names);
            return n.atom.rel == Rel::Eq ? "(= " + e + " 0)" : "(<= " + e + " 0)";
        }
        case Node::Kind::And:
        case Node::Kind::Or: {
            std::string out = n.kind == Node::Kind::And ? "(and" : "(or";
            for (const Node& k : n.kids) out += " " + smt_node(p, k, names);
            return out + ")";
        }
    }
    return "false";
}

}  // namespace

std::string emit_smt2(const Problem& p) {
    std::ostringstream out;
    std::vector<std::string> names;
    out << "(set-logic QF_LIA)\n";
    for (Var v = 0; v < p.vars.size(); ++v)
        out << "(declare-const " << smt_name(p, v, names) << " Int)\n";
    // top-level conjuncts become individual asserts
    std::vector<const Node*> conjuncts;
    if (p.formula.kind == Node::Kind::And)
        for (const Node& k : p.formula.kids) conjuncts.push_back(&k);
    else
        conjuncts.push_back(&p.formula);
    for (Var v = 0; v < p.vars.size(); ++v) {
        if (!p.vars[v].nonneg) continue;
        out << "(assert (<= (* (- 1) " << smt_name(p, v, names) << ") 0))\n";
    }
    for (const Node* n : conjuncts) out << "(assert " << smt_node(p, *n, names) << ")\n";
    out << "(check-sat)\n";
    return out.str();
}

std::string format_reply(const Problem& p, const Result& r) {
    std::ostringstream out;
    std::vector<std::string> names;
    switch (r.status) {
        case Status::Sat: {
            out << "sat\n(\n";
            for (Var v = 0; v < p.vars.size(); ++v) {
                long long x = r.model[v];
                out << "  (define-fun " << smt_name(p, v, names) << " () Int "
                    << (x < 0 ? "(- " + std::to_string(-x) + ")" : std::to_string(x)) << ")\n";
            }
            out << ")\n";
            break;
        }
        case Status::Unsat: out << "unsat\n"; break;
        case Status::Unknown: out << "unknown\n"; break;
    }
    return out.str();
}

// --- SMT-LIB2 reading (the QF_LIA subset emitted above, plus >=, >, not) ------

namespace {

struct Tok {
    enum class K { LP, RP, Sym, Int } k;
    std::string s;
    long long n = 0;
};

std::vector<Tok> lex_smt(const std::string& text) {
    std::vector<Tok> out;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == ';') {
            while (i < text.size() && text[i] != '\n') i++;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            i++;
        } else if (c == '(') {
            out.push_back({Tok::K::LP, "(", 0});
            i++;
        } else if (c == ')') {
            out.push_back({Tok::K::RP, ")", 0});
            i++;
        } else {
            std::string t;
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
                   text[i] != '(' && text[i] != ')' && text[i] != ';')
                t += text[i++];
            bool num = !t.empty() && std::isdigit(static_cast<unsigned char>(t[0]));
            for (char ch : t)
                if (!std::isdigit(static_cast<unsigned char>(ch))) num = num && false;
            if (num) out.push_back({Tok::K::Int, t, std::stoll(t)});
            else out.push_back({Tok::K::Sym, t, 0});
        }
    }
    return out;
}

struct SNode {
    bool atom = false;
    Tok tok;
    std::vector<SNode> kids;
};

SNode parse_snode(const std::vector<Tok>& toks, size_t& i) {
    if (i >= toks.size()) throw InputError("smt2: unexpected end of input");
    if (toks[i].k == Tok::K::LP) {
        SNode n;
        i++;
        while (i < toks.size() && toks[i].k != Tok::K::RP) n.kids.push_back(parse_snode(toks, i));
        if (i >= toks.size()) throw InputError("smt2: missing ')'");
        i++;
        return n;
    }
    SNode n;
    n.atom = true;
    n.tok = toks[i++];
    return n;
}

class SmtReader {
public:
    Problem run(const std::string& text) {
        std::vector<Tok> toks = lex_smt(text);
        size_t i = 0;
        std::vector<Node> asserts;
        while (i < toks.size()) {
            SNode form = parse_snode(toks, i);
            if (form.atom || form.kids.empty() || !form.kids[0].atom) continue;
            const std::string& head = form.kids[0].tok.s;
            if (head == "declare-const") {
                if (form.kids.size() != 3 || !form.kids[1].atom)
                    throw InputError("smt2: bad declare-const");
                var_of(form.kids[1].tok.s);
            } else if (head == "declare-fun") {
                if (form.kids.size() != 4 || !form.kids[1].atom)
                    throw InputError("smt2: bad declare-fun");
                var_of(form.kids[1].tok.s);
            } else if (head == "assert") {
                if (form.kids.size() != 2) throw InputError("smt2: bad assert");
                asserts.push_back(node_of(form.kids[1], false));
            }
            // set-logic / check-sat / get-model / exit are ignored
        }
        p_.formula = asserts.size() == 1 ? std::move(asserts[0]) : Node::conj(std::move(asserts));
        return std::move(p_);
    }

private:
    Var var_of(const std::string& name) {
        auto it = by_name_.find(name);
        if (it != by_name_.end()) return it->second;
        Var v = p_.add_var(name, false);
        by_name_.emplace(name, v);
        return v;
    }

    Expr expr_of(const SNode& n) {
        if (n.atom) {
            if (n.tok.k == Tok::K::Int) return Expr::constant(n.tok.n);
            auto it = by_name_.find(n.tok.s);
            if (it == by_name_.end()) throw InputError("smt2: unknown symbol " + n.tok.s);
            return Expr::var(it->second);
        }
        if (n.kids.empty() || !n.kids[0].atom) throw InputError("smt2: bad term");
        const std::string& head = n.kids[0].tok.s;
        if (head == "+") {
            Expr e;
            for (size_t i = 1; i < n.kids.size(); ++i) e += expr_of(n.kids[i]);
            return e;
        }
        if (head == "-") {
            if (n.kids.size() == 2) {
                Expr e = expr_of(n.kids[1]);
                Expr neg;
                neg.k = -e.k;
                for (auto& [v, c] : e.c) neg.add(v, -c);
                return neg;
            }
            Expr e = expr_of(n.kids[1]);
            for (size_t i = 2; i < n.kids.size(); ++i) {
                Expr o = expr_of(n.kids[i]);
                e.k -= o.k;
                for (auto& [v, c] : o.c) e.add(v, -c);
            }
            return e;
        }
        if (head == "*") {
            // one side must be constant
            Expr acc = Expr::constant(1);
            bool first = true;
            for (size_t i = 1; i < n.kids.size(); ++i) {
                Expr e = expr_of(n.kids[i]);
                if (first) {
                    acc = e;
                    first = false;
                    continue;
                }
                if (acc.c.empty()) {
                    long long f = acc.k;
                    acc = e;
                    acc.k *= f;
                    for (auto& [v, c] : acc.c) c *= f;
                } else if (e.c.empty()) {
                    acc.k *= e.k;
                    for (auto it2 = acc.c.begin(); it2 != acc.c.end();) {
                        it2->second *= e.k;
                        it2 = it2->second == 0 ? acc.c.erase(it2) : std::next(it2);
                    }
                } else {
                    throw InputError("smt2: nonlinear product");
                }
            }
            return acc;
        }
        throw InputError("smt2: unsupported term head " + head);
    }

    Node node_of(const SNode& n, bool neg) {
        if (n.atom) {
            if (n.tok.s == "true") return Node::truth(!neg);
            if (n.tok.s == "false") return Node::truth(neg);
            throw InputError("smt2: unsupported formula atom " + n.tok.s);
        }
        if (n.kids.empty() || !n.kids[0].atom) throw InputError("smt2: bad formula");
        const std::string& head = n.kids[0].tok.s;
        if (head == "and" || head == "or") {
            std::vector<Node> kids;
            for (size_t i = 1; i < n.kids.size(); ++i) kids.push_back(node_of(n.kids[i], neg));
            bool conj = (head == "and") != neg;
            return conj ? Node::conj(std::move(kids)) : Node::disj(std::move(kids));
        }
        if (head == "not") {
            if (n.kids.size() != 2) throw InputError("smt2: bad not");
            return node_of(n.kids[1], !neg);
        }
        if (head == "<=" || head == "<" || head == ">=" || head == ">" || head == "=") {
            if (n.kids.size() != 3) throw InputError("smt2: comparison needs two terms");
            Expr l = expr_of(n.kids[1]);
            Expr r = expr_of(n.kids[2]);
            Expr d = l;  // l - r
            d.k -= r.k;
            for (auto& [v, c] : r.c) d.add(v, -c);
            auto flip = [&](Expr e) {
                Expr o;
                o.k = -e.k;
                for (auto& [v, c] : e.c) o.add(v, -c);
                return o;
            };
            std::string op = head;
            if (neg) {
                if (op == "<=") { op = ">"; }
                else if (op == "<") { op = ">="; }
                else if (op == ">=") { op = "<"; }
                else if (op == ">") { op = "<="; }
                else return atom_ne(std::move(d));
            }
            if (op == "<=") return atom_le(std::move(d));
            if (op == "<") return atom_lt(std::move(d));
            if (op == ">=") return atom_le(flip(d));
            if (op == ">") return atom_lt(flip(d));
            return atom_eq(std::move(d));
        }
        throw InputError("smt2: unsupported formula head " + head);
    }

    Problem p_;
    std::map<std::string, Var> by_name_;
};

}  // namespace

Problem parse_smt2(const std::string& text) { return SmtReader().run(text); }

// ---------- external backend --------------------------------------------------

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& stem) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "/tmp/%s.XXXXXX", stem.c_str());
        int fd = mkstemp(buf);
        if (fd < 0) throw InputError("cannot create temporary file");
        close(fd);
        path = buf;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

Result solve_external(const Problem& p, const std::string& command) {
    Result res;
    try {
        TempFile in("chainfree_lia_in"), out("chainfree_lia_out"), err("chainfree_lia_err");
        {
            std::ofstream f(in.path);
            f << emit_smt2(p);
            f << "(get-model)\n";
        }
        std::string cmd = command + " < " + in.path + " > " + out.path + " 2> " + err.path;
        int rc = std::system(cmd.c_str());
        std::ifstream f(out.path);
        std::stringstream buf;
        buf << f.rdbuf();
        std::string reply = buf.str();

        // first standalone verdict token
        std::istringstream words(reply);
        std::string tok;
        std::string verdict;
        while (words >> tok) {
            if (tok == "sat" || tok == "unsat" || tok == "unknown") {
                verdict = tok;
                break;
            }
        }
        if (verdict.empty()) {
            res.status = Status::Unknown;
            res.diag = "external solver gave no verdict (exit " + std::to_string(rc) + ")";
            return res;
        }
        if (verdict == "unsat") {
            res.status = Status::Unsat;
            return res;
        }
        if (verdict == "unknown") {
            res.status = Status::Unknown;
            res.diag = "external solver returned unknown";
            return res;
        }
        // model values
        std::vector<std::string> names;
        for (Var v = 0; v < p.vars.size(); ++v) smt_name(p, v, names);
        res.model.assign(p.vars.size(), 0);
        std::vector<Tok> toks = lex_smt(reply);
        for (size_t i = 0; i + 4 < toks.size(); ++i) {
            if (toks[i].k != Tok::K::Sym || toks[i].s != "define-fun") continue;
            std::string nm = toks[i + 1].s;
            // pattern: define-fun NAME ( ) Int VALUE  with VALUE = k or (- k)
            size_t j = i + 2;
            if (j < toks.size() && toks[j].k == Tok::K::LP) j += 2;  // ( )
            if (j < toks.size() && toks[j].k == Tok::K::Sym && toks[j].s == "Int") j++;
            long long value = 0;
            bool got = false;
            if (j < toks.size() && toks[j].k == Tok::K::Int) {
                value = toks[j].n;
                got = true;
            } else if (j + 2 < toks.size() && toks[j].k == Tok::K::LP && toks[j + 1].s == "-" &&
                       toks[j + 2].k == Tok::K::Int) {
                value = -toks[j + 2].n;
                got = true;
            }
            if (!got) continue;
            for (Var v = 0; v < p.vars.size(); ++v)
                if (names[v] == nm) res.model[v] = value;
        }
        if (!check_model(p, res.model)) {
            res.status = Status::Unknown;
            res.diag = "external model failed validation";
            return res;
        }
        res.status = Status::Sat;
    } catch (const std::exception& e) {
        res.status = Status::Unknown;
        res.diag = std::string("external backend failure: ") + e.what();
    }
    return res;
}

}  // namespace chainfree::lia
