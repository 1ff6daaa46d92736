#ifndef CHAINFREE_PARIKH_HPP
#define CHAINFREE_PARIKH_HPP

#include <optional>
#include <string>

#include "chainfree/arith.hpp"
#include "chainfree/formula.hpp"

namespace chainfree {

// The single multi-tape constraint a chain- and concatenation-free clause
// synchronizes into: one automaton plus the variable carried by each tape.
struct SyncConstraint {
    AutPtr aut;  // null when the clause has no string atoms
    std::vector<VarId> tape_vars;
};

// Folds the clause's membership and relational atoms into one constraint by
// joining on shared variables and taking loose products otherwise. Requires
// single-variable sides; any two atoms may share at most one variable.
// Atoms with an eps side are projected to the other side first. Returns
// nothing when an atom is unsatisfiable outright (the clause is unsat).
std::optional<SyncConstraint> synchronize(Context& ctx, const Clause& c);

// Existential Presburger formula over the given problem describing the Parikh
// image of the automaton: per-transition counts, flow balance against chosen
// initial/final states, distance-based connectivity, and one #label variable
// per distinct label.
struct ParikhVars {
    std::vector<lia::Var> trans_count;                    // per transition
    std::vector<std::vector<SymbolId>> labels;            // distinct labels
    std::vector<lia::Var> label_count;                    // per distinct label
    std::vector<lia::Var> init_sel, final_sel;            // per init/final state
    std::vector<lia::Var> dist;                           // per state
};

ParikhVars parikh_formula(const Context& ctx, const NTapeAutomaton& a, lia::Problem& p,
                          std::vector<lia::Node>& conjuncts);

// The length-linking formula: |x_i| equals the sum of per-letter occurrence
// counts on tape i, which in turn sum the counts of labels carrying that
// letter at slot i.
void length_link(const Context& ctx, const NTapeAutomaton& a, const std::vector<lia::Var>& len_vars,
                 const ParikhVars& pv, lia::Problem& p, std::vector<lia::Node>& conjuncts);

struct ClauseVerdict {
    enum class Kind { Sat, Unsat, Unknown } kind = Kind::Unknown;
    std::optional<Interpretation> model;
    std::string diag;
};

struct BackendSpec {
    bool external = false;
    std::string command;
};

struct DecideOptions {
    BackendSpec backend;
    bool want_model = false;
    std::string emit_lia_path;  // empty: no emission
};

// A clause lowered to linear integer arithmetic.
struct LoweredClause {
    lia::Problem problem;
    std::optional<SyncConstraint> sync;
    std::map<VarId, lia::Var> len_vars;
    std::optional<ParikhVars> parikh;
};

LoweredClause lower_clause(Context& ctx, const Clause& c);

// Full decision of a chain- and concatenation-free clause per the reduction
// to linear integer arithmetic.
ClauseVerdict decide_clause(Context& ctx, const Clause& c, const DecideOptions& opts = {});

}  // namespace chainfree

#endif
