#ifndef CHAINFREE_BENIGN_HPP
#define CHAINFREE_BENIGN_HPP

#include "chainfree/fragment.hpp"

namespace chainfree {

// One benign-chain family elimination, for traces and tests.
struct EliminationStep {
    std::vector<Position> closure;       // the set S
    std::vector<VarId> distinct_vars;    // x_{i1} ... x_{ik}
    uint32_t automaton_states = 0;       // states of the intersected k-tape automaton
    uint32_t added_atoms = 0;
    bool degenerate = false;
};

// Removes the benign chain family around the witness: the involved
// length-preserving left-sided constraints collapse to a single k-tape
// automaton over tuple letters, read back through per-tape projection
// transducers, plus zero-length side conditions on the removed term parts.
// On the degenerate branch (several chain variables in one right side) all
// chain-term variables are pinned to eps instead.
Clause eliminate_one_chain_family(Context& ctx, Clause c, const ChainWitness& w,
                                  EliminationStep* step = nullptr);

struct ChainFreeResult {
    Clause clause;
    uint32_t initial_b = 0;      // constraints labelling benign chains at entry
    uint32_t eliminations = 0;
    std::vector<EliminationStep> steps;
};

// Repeated elimination until the clause is chain-free. The number of rounds
// never exceeds the initial count of constraints labelling benign chains.
ChainFreeResult to_chain_free(Context& ctx, Clause c);

// Constraints labelling the benign chains of the clause's graph.
uint32_t count_benign_chain_constraints(const Clause& c);

}  // namespace chainfree

#endif
