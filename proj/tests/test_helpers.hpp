#ifndef CHAINFREE_TEST_HELPERS_HPP
#define CHAINFREE_TEST_HELPERS_HPP

#include <random>
#include <vector>

#include "chainfree/automata.hpp"
#include "chainfree/context.hpp"

namespace chainfree::testing {

// A two-letter context shared by most tests.
struct AB {
    Context ctx;
    SymbolId a, b;
    AB() {
        a = ctx.alphabet.intern_base("a");
        b = ctx.alphabet.intern_base("b");
    }
    Word word(const std::string& s) const {
        Word w;
        for (char c : s) w.push_back(c == 'a' ? a : b);
        return w;
    }
};

// Random n-tape automaton over the given letters. Labels draw from
// (letters u eps)^n unless lp, in which case from letters^n only.
inline AutPtr random_automaton(std::mt19937& rng, int tapes, uint32_t max_states,
                               const std::vector<SymbolId>& letters, bool lp,
                               double trans_per_state = 2.5) {
    std::uniform_int_distribution<uint32_t> nstates(1, max_states);
    uint32_t n = nstates(rng);
    std::uniform_int_distribution<uint32_t> state(0, n - 1);
    std::uniform_int_distribution<size_t> letter(0, letters.size() - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<Transition> trans;
    size_t count = static_cast<size_t>(trans_per_state * n) + 1;
    for (size_t i = 0; i < count; ++i) {
        std::vector<SymbolId> label(tapes);
        bool all_eps = true;
        for (int t = 0; t < tapes; ++t) {
            if (!lp && coin(rng) < 0.25) {
                label[t] = eps_sym;
            } else {
                label[t] = letters[letter(rng)];
                all_eps = false;
            }
        }
        if (lp) all_eps = false;
        if (all_eps && coin(rng) < 0.5) label[0] = letters[letter(rng)];
        trans.push_back({state(rng), std::move(label), state(rng)});
    }
    std::vector<uint32_t> init{state(rng)};
    std::vector<uint32_t> final{state(rng)};
    if (coin(rng) < 0.3) final.push_back(state(rng));
    return std::make_shared<NTapeAutomaton>(tapes, n, std::move(init), std::move(final),
                                            std::move(trans), lp);
}

}  // namespace chainfree::testing

#endif
