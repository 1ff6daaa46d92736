#ifndef CHAINFREE_ORACLE_HPP
#define CHAINFREE_ORACLE_HPP

#include <optional>

#include "chainfree/formula.hpp"

namespace chainfree {

// Enumeration bound for the brute-force checker. If letters is empty the
// context's full alphabet is used.
struct Bound {
    size_t max_len = 3;
    std::vector<SymbolId> letters;
};

// Exhaustive bounded satisfiability: assigns words of length <= bound to the
// free variables in declaration order, words in length-then-lexicographic
// order, and returns the first satisfying interpretation. Built on the plain
// formula semantics only; the decision pipeline never calls it.
std::optional<Interpretation> bounded_sat(const Context& ctx, const Formula& f, const Bound& b);

}  // namespace chainfree

#endif
