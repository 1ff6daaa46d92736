#ifndef CHAINFREE_AUTOMATA_HPP
#define CHAINFREE_AUTOMATA_HPP

#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "chainfree/context.hpp"

namespace chainfree {

// One transition of an n-tape automaton. Each label slot holds a letter or
// eps_sym.
struct Transition {
    uint32_t from;
    std::vector<SymbolId> label;
    uint32_t to;

    friend bool operator==(const Transition&, const Transition&) = default;
    friend auto operator<=>(const Transition&, const Transition&) = default;
};

// Nondeterministic n-tape automaton over (Sigma u {eps})^n. Immutable after
// construction; transitions are kept sorted and deduplicated so structural
// equality is meaningful. If length_preserving is set, no label slot is eps
// (checked at construction).
class NTapeAutomaton {
public:
    NTapeAutomaton(int tapes, uint32_t num_states, std::vector<uint32_t> init,
                   std::vector<uint32_t> final, std::vector<Transition> trans,
                   bool length_preserving, std::string name = "");

    int tapes() const { return tapes_; }
    uint32_t num_states() const { return num_states_; }
    const std::vector<uint32_t>& init() const { return init_; }
    const std::vector<uint32_t>& final() const { return final_; }
    const std::vector<Transition>& transitions() const { return trans_; }
    bool length_preserving() const { return length_preserving_; }
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    bool structurally_equal(const NTapeAutomaton& o) const {
        return tapes_ == o.tapes_ && num_states_ == o.num_states_ && init_ == o.init_ &&
               final_ == o.final_ && trans_ == o.trans_ && length_preserving_ == o.length_preserving_;
    }

private:
    int tapes_;
    uint32_t num_states_;
    std::vector<uint32_t> init_;
    std::vector<uint32_t> final_;
    std::vector<Transition> trans_;
    bool length_preserving_;
    std::string name_;
};

using AutPtr = std::shared_ptr<const NTapeAutomaton>;

// --- constructions ---------------------------------------------------------

// Singleton language {w} as a 1-tape automaton.
AutPtr aut_word(const Word& w, std::string name = "");
// Sigma^* x ... x Sigma^* over the given letters.
AutPtr aut_universal(int tapes, const std::vector<SymbolId>& letters);
// Empty relation with the given arity.
AutPtr aut_empty(int tapes);
// Identity transducer {(w, w) | w over letters}.
AutPtr aut_identity(const std::vector<SymbolId>& letters);

// --- operations ------------------------------------------------------------

// Membership of a word tuple in the recognized relation.
bool accepts(const NTapeAutomaton& a, std::span<const Word> tuple);
bool accepts(const NTapeAutomaton& a, std::initializer_list<Word> tuple);

// Synchronous product of two length-preserving automata of equal arity.
AutPtr intersect_lp(const NTapeAutomaton& a, const NTapeAutomaton& b);

// Complement of a 1-tape automaton against sigma^*.
AutPtr complement1(const NTapeAutomaton& a, const std::vector<SymbolId>& sigma);

// Complement of a length-preserving n-tape automaton within the set of
// equal-length tuples over sigma: determinization over the product alphabet
// sigma^n, completion, final flip. Result is length preserving.
AutPtr complement_lp(const NTapeAutomaton& a, const std::vector<SymbolId>& sigma);

// Composition T ^(i,j) T': (n+m-1)-tape automaton whose tapes are a's tapes
// followed by b's tapes without tape j; accepts (w, u-minus-j) iff w in Rel(a)
// and u with u_j := w_i in Rel(b). Indices are 0-based. The shared tape is
// letter-synchronous; either side may move alone on an eps of its shared slot.
AutPtr join(const NTapeAutomaton& a, int i, const NTapeAutomaton& b, int j);

// Cartesian product Rel(a) x Rel(b) on disjoint tapes.
AutPtr loose_product(const NTapeAutomaton& a, const NTapeAutomaton& b);

// Tape permutation: result tape k carries input tape perm[k].
AutPtr permute(const NTapeAutomaton& a, const std::vector<int>& perm);

// Extend to k >= n tapes; new tapes range over new_letters. With
// allow_epsilon the new tapes are fully unconstrained words (labels may carry
// eps and consume-only steps are added); without it the construction is the
// length-preserving one (new slots take letters only, no extra steps).
AutPtr cylindrify(const NTapeAutomaton& a, int k, const std::vector<SymbolId>& new_letters,
                  bool allow_epsilon = true);

// Componentwise relation concatenation Rel(a) . Rel(b).
AutPtr concat_rel(const NTapeAutomaton& a, const NTapeAutomaton& b);

// For each state q the pair (T_q, qT): T with finals replaced by {q} and T
// with inits replaced by {q}.
std::vector<std::pair<AutPtr, AutPtr>> split_at_states(const NTapeAutomaton& a);

// No final state reachable from an initial one.
bool is_empty(const NTapeAutomaton& a);

// All accepted tuples with every component of length <= max_len, sorted.
std::set<std::vector<Word>> enumerate(const NTapeAutomaton& a, size_t max_len);

// All accepted label sequences (runs) of length <= max_len, as sorted vectors
// of transition labels. Feeds the Parikh-image tests.
std::set<std::vector<std::vector<SymbolId>>> enumerate_label_words(const NTapeAutomaton& a,
                                                                   size_t max_len);

// Restriction to states both reachable and co-reachable.
AutPtr trim(const NTapeAutomaton& a);

}  // namespace chainfree

#endif
