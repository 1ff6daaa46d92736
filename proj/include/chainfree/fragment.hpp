#ifndef CHAINFREE_FRAGMENT_HPP
#define CHAINFREE_FRAGMENT_HPP

#include <string>
#include <vector>

#include "chainfree/formula.hpp"

namespace chainfree {

// A variable occurrence in a relational constraint: constraint index over the
// clause's relational atoms, side, and slot within that side's term.
struct Position {
    uint32_t con;  // 0-based over the clause's relational atoms
    bool right;
    uint32_t slot;  // 0-based within the side's term

    friend bool operator==(const Position&, const Position&) = default;
    friend auto operator<=>(const Position&, const Position&) = default;
};

// Splitting graph of a clause. Nodes are positions; there is an edge (p, p')
// whenever some position p'' opposing p, different from p', carries the same
// variable as p'. Membership and arithmetic atoms contribute no positions.
struct SplittingGraph {
    std::vector<Position> positions;
    std::vector<VarId> var;                   // label per node
    std::vector<std::vector<uint32_t>> succ;  // adjacency, node -> nodes
    std::vector<uint32_t> rel_atom_index;     // constraint index -> index into clause.atoms

    uint32_t node_of(const Position& p) const;
    bool has_edge(uint32_t p, uint32_t q) const;
};

// A cycle of positions in the graph plus its benignity analysis. The nodes of
// the whole strongly-connected component the cycle lives in are kept; benign
// elimination consumes them as the closure set.
struct ChainWitness {
    std::vector<uint32_t> cycle;  // nodes p0 ... pn; edges close back to p0
    std::vector<uint32_t> scc;    // all nodes of the cycle's component
    bool benign = false;
    std::string reason;  // for non-benign witnesses: which condition failed
};

enum class FragmentKind { ChainFree, WeaklyChaining, Chaining };

struct ClauseClass {
    FragmentKind kind = FragmentKind::ChainFree;
    std::vector<ChainWitness> chains;
};

struct FragmentClass {
    FragmentKind kind = FragmentKind::ChainFree;
    std::vector<ClauseClass> clauses;
};

SplittingGraph build_graph(const Clause& c);

// One witness per strongly-connected component that contains a cycle.
std::vector<ChainWitness> find_chains(const SplittingGraph& g);

// Benign iff all constraints on the chain are left-sided and length
// preserving and the positions are all left or all right.
bool classify_chain(ChainWitness& w, const SplittingGraph& g, const Clause& c);

ClauseClass classify_clause(const Clause& c);

// Classification of a whole formula: DNF, left-siding, then per-clause graphs.
FragmentClass classify(Context& ctx, const Formula& f);

const char* fragment_kind_name(FragmentKind k);
std::string describe_witness(const Context& ctx, const Clause& c, const ChainWitness& w);

}  // namespace chainfree

#endif
