#ifndef CHAINFREE_SPLIT_HPP
#define CHAINFREE_SPLIT_HPP

#include <functional>
#include <string>
#include <vector>

#include "chainfree/formula.hpp"

namespace chainfree {

inline constexpr VarId no_var = std::numeric_limits<VarId>::max();

// One disjunct of a constraint split: the replacement atoms (already carrying
// the substitution) plus the substitution itself, to be applied to the rest
// of the clause. Splits of eps-sided constraints substitute nothing.
struct SplitDisjunct {
    std::vector<RelationalAtom> pieces;
    VarId sub_var = no_var;
    std::vector<VarId> repl;
};

bool can_split_left(const RelationalAtom& r);
bool can_split_right(const RelationalAtom& r);

// The left or right split: equalities produce one disjunct, transducer
// constraints one disjunct per state via prefix/suffix automata.
std::vector<SplitDisjunct> split_constraint(Context& ctx, uint32_t& fresh_counter,
                                            const RelationalAtom& r, bool left);

// Split of a constraint with an eps side and a concatenation on the other:
// state decomposition without any substitution.
std::vector<SplitDisjunct> split_eps_side(const RelationalAtom& r);

// Lexicographic measures asserted to decrease at every splitting step.
struct Measure1 {
    long long l = 0, o = 0, i = 0;
    bool operator<(const Measure1& m) const {
        if (l != m.l) return l < m.l;
        if (o != m.o) return o < m.o;
        return i < m.i;
    }
};

// Per-level inner-side length vector; the highest level is the most
// significant component.
struct Measure2 {
    std::vector<long long> iota;
    bool operator<(const Measure2& m) const {
        size_t n = std::max(iota.size(), m.iota.size());
        for (size_t k = n; k-- > 0;) {
            long long a = k < iota.size() ? iota[k] : 0;
            long long b = k < m.iota.size() ? m.iota[k] : 0;
            if (a != b) return a < b;
        }
        return false;
    }
};

struct SplitObserver {
    virtual ~SplitObserver() = default;
    virtual void on_phase1_step(const Measure1&, const Measure1&) {}
    virtual void on_phase2_step(const Measure2&, const Measure2&) {}
    virtual void on_intermediate(const Clause&) {}
    virtual void on_trace(const std::string&) {}
};

class ResourceLimit : public std::runtime_error {
public:
    explicit ResourceLimit(const std::string& msg) : std::runtime_error(msg) {}
};

struct SplitOptions {
    size_t live_cap = 100000;
    SplitObserver* observer = nullptr;
};

// A concatenation-free leaf with the variable expansions performed on the way
// (latest last); composing them backwards turns a leaf model into a model of
// the input clause.
struct SplitLeaf {
    Clause clause;
    std::vector<std::pair<VarId, std::vector<VarId>>> subst;
};

// Depth-first splitting per the two-phase regimen. Calls fn on every
// concatenation-free leaf; a true return stops the exploration early.
bool explore_concat_free(Context& ctx, const Clause& c, const SplitOptions& opts,
                         const std::function<bool(const SplitLeaf&)>& fn);

// All leaves of the splitting algorithm.
std::vector<Clause> to_concat_free(Context& ctx, const Clause& c, const SplitOptions& opts = {});

}  // namespace chainfree

#endif
