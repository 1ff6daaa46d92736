#ifndef CHAINFREE_SOLVER_HPP
#define CHAINFREE_SOLVER_HPP

#include <optional>
#include <string>
#include <vector>

#include "chainfree/benign.hpp"
#include "chainfree/fragment.hpp"
#include "chainfree/parikh.hpp"
#include "chainfree/parser.hpp"
#include "chainfree/split.hpp"

namespace chainfree {

enum class Verdict { Sat, Unsat, Unknown, OutOfFragment };

const char* verdict_name(Verdict v);

struct SolveOptions {
    BackendSpec backend;
    bool want_model = false;
    bool trace = false;
    size_t live_cap = 100000;
    std::string emit_lia_path;
    SplitObserver* observer = nullptr;
};

struct ClauseReport {
    FragmentKind kind = FragmentKind::ChainFree;
    std::vector<std::string> witnesses;
    uint32_t eliminations = 0;
    uint32_t initial_b = 0;
};

struct SolveResult {
    Verdict verdict = Verdict::Unknown;
    std::vector<ClauseReport> clauses;
    std::optional<Interpretation> model;  // covers the formula's free variables
    std::vector<std::string> trace;
    std::string diag;
};

// The full decision pipeline: DNF, left-siding, classification, benign-chain
// elimination, splitting to concatenation-free clauses, and the Parikh/LIA
// decision per leaf. The formula is satisfiable iff some clause is; a
// chaining clause only surfaces as out-of-fragment when no other clause is
// satisfiable.
SolveResult decide(Context& ctx, const Formula& f, const SolveOptions& opts = {});

}  // namespace chainfree

#endif
