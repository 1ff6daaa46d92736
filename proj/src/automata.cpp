#include "chainfree/automata.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_set>

namespace chainfree {

namespace {

std::vector<uint32_t> sorted_unique(std::vector<uint32_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

bool label_all_letters(const std::vector<SymbolId>& label) {
    for (SymbolId s : label)
        if (s == eps_sym) return false;
    return true;
}

}  // namespace

NTapeAutomaton::NTapeAutomaton(int tapes, uint32_t num_states, std::vector<uint32_t> init,
                               std::vector<uint32_t> final, std::vector<Transition> trans,
                               bool length_preserving, std::string name)
    : tapes_(tapes),
      num_states_(num_states),
      init_(sorted_unique(std::move(init))),
      final_(sorted_unique(std::move(final))),
      trans_(std::move(trans)),
      length_preserving_(length_preserving),
      name_(std::move(name)) {
    if (tapes_ < 1) throw InternalError("automaton needs at least one tape");
    for (uint32_t q : init_)
        if (q >= num_states_) throw InternalError("initial state out of range");
    for (uint32_t q : final_)
        if (q >= num_states_) throw InternalError("final state out of range");
    for (const Transition& t : trans_) {
        if (t.from >= num_states_ || t.to >= num_states_)
            throw InternalError("transition state out of range");
        if (t.label.size() != static_cast<size_t>(tapes_))
            throw InternalError("label arity mismatch");
        if (length_preserving_ && !label_all_letters(t.label))
            throw InternalError("length-preserving automaton with eps label component");
    }
    std::sort(trans_.begin(), trans_.end());
    trans_.erase(std::unique(trans_.begin(), trans_.end()), trans_.end());
}

// --- constructions ---------------------------------------------------------

AutPtr aut_word(const Word& w, std::string name) {
    std::vector<Transition> trans;
    for (size_t i = 0; i < w.size(); ++i)
        trans.push_back({static_cast<uint32_t>(i), {w[i]}, static_cast<uint32_t>(i + 1)});
    return std::make_shared<NTapeAutomaton>(1, static_cast<uint32_t>(w.size() + 1),
                                            std::vector<uint32_t>{0},
                                            std::vector<uint32_t>{static_cast<uint32_t>(w.size())},
                                            std::move(trans), true, std::move(name));
}

AutPtr aut_universal(int tapes, const std::vector<SymbolId>& letters) {
    std::vector<Transition> trans;
    for (int i = 0; i < tapes; ++i) {
        for (SymbolId s : letters) {
            std::vector<SymbolId> label(tapes, eps_sym);
            label[i] = s;
            trans.push_back({0, std::move(label), 0});
        }
    }
    return std::make_shared<NTapeAutomaton>(tapes, 1, std::vector<uint32_t>{0},
                                            std::vector<uint32_t>{0}, std::move(trans), false);
}

AutPtr aut_empty(int tapes) {
    return std::make_shared<NTapeAutomaton>(tapes, 1, std::vector<uint32_t>{0},
                                            std::vector<uint32_t>{}, std::vector<Transition>{},
                                            true);
}

AutPtr aut_identity(const std::vector<SymbolId>& letters) {
    std::vector<Transition> trans;
    for (SymbolId s : letters) trans.push_back({0, {s, s}, 0});
    return std::make_shared<NTapeAutomaton>(2, 1, std::vector<uint32_t>{0},
                                            std::vector<uint32_t>{0}, std::move(trans), true, "Id");
}

// --- acceptance ------------------------------------------------------------

bool accepts(const NTapeAutomaton& a, std::span<const Word> tuple) {
    if (tuple.size() != static_cast<size_t>(a.tapes())) throw InternalError("accepts: arity mismatch");
    const int n = a.tapes();
    // Configuration: state plus consumed prefix length per tape.
    struct Conf {
        uint32_t state;
        std::vector<size_t> pos;
        bool operator<(const Conf& o) const {
            if (state != o.state) return state < o.state;
            return pos < o.pos;
        }
    };
    std::set<Conf> seen;
    std::deque<Conf> work;
    for (uint32_t q : a.init()) {
        Conf c{q, std::vector<size_t>(n, 0)};
        if (seen.insert(c).second) work.push_back(c);
    }
    std::vector<size_t> lens(n);
    for (int i = 0; i < n; ++i) lens[i] = tuple[i].size();
    while (!work.empty()) {
        Conf c = work.front();
        work.pop_front();
        bool at_end = true;
        for (int i = 0; i < n; ++i)
            if (c.pos[i] != lens[i]) at_end = false;
        if (at_end && std::binary_search(a.final().begin(), a.final().end(), c.state)) return true;
        for (const Transition& t : a.transitions()) {
            if (t.from != c.state) continue;
            Conf nxt{t.to, c.pos};
            bool ok = true;
            for (int i = 0; i < n && ok; ++i) {
                if (t.label[i] == eps_sym) continue;
                if (nxt.pos[i] >= lens[i] || tuple[i][nxt.pos[i]] != t.label[i]) ok = false;
                else nxt.pos[i]++;
            }
            if (ok && seen.insert(nxt).second) work.push_back(nxt);
        }
    }
    return false;
}

bool accepts(const NTapeAutomaton& a, std::initializer_list<Word> tuple) {
    std::vector<Word> v(tuple);
    return accepts(a, std::span<const Word>(v));
}

// --- products --------------------------------------------------------------

namespace {

// Dense pair-state indexing for products.
struct PairIndex {
    uint32_t nb;
    uint32_t id(uint32_t qa, uint32_t qb) const { return qa * nb + qb; }
};

}  // namespace

AutPtr intersect_lp(const NTapeAutomaton& a, const NTapeAutomaton& b) {
    if (a.tapes() != b.tapes()) throw InternalError("intersect_lp: arity mismatch");
    if (!a.length_preserving() || !b.length_preserving())
        throw InternalError("intersect_lp: operands must be length preserving");
    PairIndex ix{b.num_states()};
    std::vector<Transition> trans;
    for (const Transition& ta : a.transitions())
        for (const Transition& tb : b.transitions())
            if (ta.label == tb.label)
                trans.push_back({ix.id(ta.from, tb.from), ta.label, ix.id(ta.to, tb.to)});
    std::vector<uint32_t> init, final;
    for (uint32_t qa : a.init())
        for (uint32_t qb : b.init()) init.push_back(ix.id(qa, qb));
    for (uint32_t qa : a.final())
        for (uint32_t qb : b.final()) final.push_back(ix.id(qa, qb));
    NTapeAutomaton prod(a.tapes(), a.num_states() * b.num_states(), std::move(init),
                        std::move(final), std::move(trans), true);
    return trim(prod);
}

namespace {

// Subset construction over an explicit letter universe; labels are compared
// as whole vectors, so this serves both the 1-tape and the length-preserving
// n-tape complement.
AutPtr complement_over(const NTapeAutomaton& a, const std::vector<std::vector<SymbolId>>& universe,
                       bool lp_result) {
    // eps-closure is only needed for the 1-tape case; an LP automaton has no
    // eps labels at all.
    const uint32_t n = a.num_states();
    std::vector<std::vector<uint32_t>> eps_adj(n);
    for (const Transition& t : a.transitions()) {
        bool all_eps = true;
        for (SymbolId s : t.label)
            if (s != eps_sym) all_eps = false;
        if (all_eps) eps_adj[t.from].push_back(t.to);
    }
    auto closure = [&](std::vector<bool>& set) {
        std::deque<uint32_t> work;
        for (uint32_t q = 0; q < n; ++q)
            if (set[q]) work.push_back(q);
        while (!work.empty()) {
            uint32_t q = work.front();
            work.pop_front();
            for (uint32_t r : eps_adj[q])
                if (!set[r]) {
                    set[r] = true;
                    work.push_back(r);
                }
        }
    };

    std::map<std::vector<bool>, uint32_t> subset_id;
    std::vector<std::vector<bool>> subsets;
    auto get_id = [&](std::vector<bool> s) {
        auto it = subset_id.find(s);
        if (it != subset_id.end()) return it->second;
        uint32_t id = static_cast<uint32_t>(subsets.size());
        subset_id.emplace(s, id);
        subsets.push_back(std::move(s));
        return id;
    };

    std::vector<bool> start(n, false);
    for (uint32_t q : a.init()) start[q] = true;
    closure(start);
    uint32_t start_id = get_id(start);

    std::vector<Transition> trans;
    std::deque<uint32_t> work{start_id};
    std::unordered_set<uint32_t> expanded;
    while (!work.empty()) {
        uint32_t sid = work.front();
        work.pop_front();
        if (!expanded.insert(sid).second) continue;
        std::vector<bool> cur = subsets[sid];
        for (const auto& letter : universe) {
            std::vector<bool> nxt(n, false);
            for (const Transition& t : a.transitions()) {
                if (t.label != letter || !cur[t.from]) continue;
                nxt[t.to] = true;
            }
            closure(nxt);
            uint32_t nid = get_id(nxt);
            trans.push_back({sid, letter, nid});
            if (!expanded.count(nid)) work.push_back(nid);
        }
    }

    std::vector<uint32_t> finals;
    for (uint32_t sid = 0; sid < subsets.size(); ++sid) {
        bool has_final = false;
        for (uint32_t q : a.final())
            if (subsets[sid][q]) has_final = true;
        if (!has_final) finals.push_back(sid);
    }
    NTapeAutomaton comp(a.tapes(), static_cast<uint32_t>(subsets.size()),
                        std::vector<uint32_t>{start_id}, std::move(finals), std::move(trans),
                        lp_result);
    return trim(comp);
}

}  // namespace

AutPtr complement1(const NTapeAutomaton& a, const std::vector<SymbolId>& sigma) {
    if (a.tapes() != 1) throw InternalError("complement1: automaton must have one tape");
    std::vector<std::vector<SymbolId>> universe;
    for (SymbolId s : sigma) universe.push_back({s});
    return complement_over(a, universe, false);
}

AutPtr complement_lp(const NTapeAutomaton& a, const std::vector<SymbolId>& sigma) {
    if (!a.length_preserving()) throw InternalError("complement_lp: operand not length preserving");
    std::vector<std::vector<SymbolId>> universe;
    std::vector<SymbolId> cur(a.tapes(), 0);
    // all sigma^n vectors
    size_t total = 1;
    for (int i = 0; i < a.tapes(); ++i) total *= sigma.size();
    for (size_t v = 0; v < total; ++v) {
        size_t rest = v;
        std::vector<SymbolId> label(a.tapes());
        for (int i = 0; i < a.tapes(); ++i) {
            label[i] = sigma[rest % sigma.size()];
            rest /= sigma.size();
        }
        universe.push_back(std::move(label));
    }
    return complement_over(a, universe, true);
}

AutPtr join(const NTapeAutomaton& a, int i, const NTapeAutomaton& b, int j) {
    if (i < 0 || i >= a.tapes() || j < 0 || j >= b.tapes())
        throw InternalError("join: tape index out of range");
    const int n = a.tapes(), m = b.tapes();
    const int out_tapes = n + m - 1;
    PairIndex ix{b.num_states()};

    auto out_label = [&](const std::vector<SymbolId>* la, const std::vector<SymbolId>* lb) {
        std::vector<SymbolId> label(out_tapes, eps_sym);
        if (la)
            for (int t = 0; t < n; ++t) label[t] = (*la)[t];
        if (lb) {
            int k = n;
            for (int t = 0; t < m; ++t) {
                if (t == j) continue;
                label[k++] = (*lb)[t];
            }
        }
        return label;
    };

    std::vector<Transition> trans;
    // a moves alone (its shared slot is eps)
    for (const Transition& ta : a.transitions()) {
        if (ta.label[i] != eps_sym) continue;
        for (uint32_t qb = 0; qb < b.num_states(); ++qb)
            trans.push_back({ix.id(ta.from, qb), out_label(&ta.label, nullptr), ix.id(ta.to, qb)});
    }
    // b moves alone
    for (const Transition& tb : b.transitions()) {
        if (tb.label[j] != eps_sym) continue;
        for (uint32_t qa = 0; qa < a.num_states(); ++qa)
            trans.push_back({ix.id(qa, tb.from), out_label(nullptr, &tb.label), ix.id(qa, tb.to)});
    }
    // synchronized move on the shared letter
    for (const Transition& ta : a.transitions()) {
        if (ta.label[i] == eps_sym) continue;
        for (const Transition& tb : b.transitions()) {
            if (tb.label[j] != ta.label[i]) continue;
            trans.push_back({ix.id(ta.from, tb.from), out_label(&ta.label, &tb.label),
                             ix.id(ta.to, tb.to)});
        }
    }

    std::vector<uint32_t> init, final;
    for (uint32_t qa : a.init())
        for (uint32_t qb : b.init()) init.push_back(ix.id(qa, qb));
    for (uint32_t qa : a.final())
        for (uint32_t qb : b.final()) final.push_back(ix.id(qa, qb));
    NTapeAutomaton prod(out_tapes, a.num_states() * b.num_states(), std::move(init),
                        std::move(final), std::move(trans),
                        a.length_preserving() && b.length_preserving());
    return trim(prod);
}

AutPtr loose_product(const NTapeAutomaton& a, const NTapeAutomaton& b) {
    const int n = a.tapes(), m = b.tapes();
    PairIndex ix{b.num_states()};
    std::vector<Transition> trans;
    for (const Transition& ta : a.transitions()) {
        for (uint32_t qb = 0; qb < b.num_states(); ++qb) {
            std::vector<SymbolId> label(n + m, eps_sym);
            for (int t = 0; t < n; ++t) label[t] = ta.label[t];
            trans.push_back({ix.id(ta.from, qb), std::move(label), ix.id(ta.to, qb)});
        }
    }
    for (const Transition& tb : b.transitions()) {
        for (uint32_t qa = 0; qa < a.num_states(); ++qa) {
            std::vector<SymbolId> label(n + m, eps_sym);
            for (int t = 0; t < m; ++t) label[n + t] = tb.label[t];
            trans.push_back({ix.id(qa, tb.from), std::move(label), ix.id(qa, tb.to)});
        }
    }
    std::vector<uint32_t> init, final;
    for (uint32_t qa : a.init())
        for (uint32_t qb : b.init()) init.push_back(ix.id(qa, qb));
    for (uint32_t qa : a.final())
        for (uint32_t qb : b.final()) final.push_back(ix.id(qa, qb));
    NTapeAutomaton prod(n + m, a.num_states() * b.num_states(), std::move(init), std::move(final),
                        std::move(trans), false);
    return trim(prod);
}

AutPtr permute(const NTapeAutomaton& a, const std::vector<int>& perm) {
    if (perm.size() != static_cast<size_t>(a.tapes())) throw InternalError("permute: arity mismatch");
    std::vector<bool> hit(a.tapes(), false);
    for (int p : perm) {
        if (p < 0 || p >= a.tapes() || hit[p]) throw InternalError("permute: not a permutation");
        hit[p] = true;
    }
    std::vector<Transition> trans;
    for (const Transition& t : a.transitions()) {
        std::vector<SymbolId> label(a.tapes());
        for (int k = 0; k < a.tapes(); ++k) label[k] = t.label[perm[k]];
        trans.push_back({t.from, std::move(label), t.to});
    }
    return std::make_shared<NTapeAutomaton>(a.tapes(), a.num_states(), a.init(), a.final(),
                                            std::move(trans), a.length_preserving());
}

AutPtr cylindrify(const NTapeAutomaton& a, int k, const std::vector<SymbolId>& new_letters,
                  bool allow_epsilon) {
    if (k < a.tapes()) throw InternalError("cylindrify: target arity below current");
    const int n = a.tapes();
    const int extra = k - n;
    if (extra == 0)
        return std::make_shared<NTapeAutomaton>(a.tapes(), a.num_states(), a.init(), a.final(),
                                                a.transitions(), a.length_preserving());

    std::vector<std::vector<SymbolId>> fillings;  // all choices for the new slots
    std::vector<SymbolId> choices = new_letters;
    if (allow_epsilon) choices.push_back(eps_sym);
    size_t total = 1;
    for (int e = 0; e < extra; ++e) total *= choices.size();
    for (size_t v = 0; v < total; ++v) {
        size_t rest = v;
        std::vector<SymbolId> fill(extra);
        for (int e = 0; e < extra; ++e) {
            fill[e] = choices[rest % choices.size()];
            rest /= choices.size();
        }
        fillings.push_back(std::move(fill));
    }

    std::vector<Transition> trans;
    for (const Transition& t : a.transitions()) {
        for (const auto& fill : fillings) {
            std::vector<SymbolId> label = t.label;
            label.insert(label.end(), fill.begin(), fill.end());
            trans.push_back({t.from, std::move(label), t.to});
        }
    }
    if (allow_epsilon) {
        // consume-only steps so the new tapes are not bounded by the run length
        for (uint32_t q = 0; q < a.num_states(); ++q) {
            for (const auto& fill : fillings) {
                bool all_eps = true;
                for (SymbolId s : fill)
                    if (s != eps_sym) all_eps = false;
                if (all_eps) continue;
                std::vector<SymbolId> label(n, eps_sym);
                label.insert(label.end(), fill.begin(), fill.end());
                trans.push_back({q, std::move(label), q});
            }
        }
    }
    return std::make_shared<NTapeAutomaton>(k, a.num_states(), a.init(), a.final(),
                                            std::move(trans),
                                            a.length_preserving() && !allow_epsilon);
}

AutPtr concat_rel(const NTapeAutomaton& a, const NTapeAutomaton& b) {
    if (a.tapes() != b.tapes()) throw InternalError("concat_rel: arity mismatch");
    const uint32_t off = a.num_states();
    std::vector<Transition> trans = a.transitions();
    for (const Transition& t : b.transitions())
        trans.push_back({t.from + off, t.label, t.to + off});
    std::vector<SymbolId> eps_label(a.tapes(), eps_sym);
    for (uint32_t f : a.final())
        for (uint32_t i : b.init()) trans.push_back({f, eps_label, i + off});
    std::vector<uint32_t> init = a.init();
    std::vector<uint32_t> final;
    for (uint32_t f : b.final()) final.push_back(f + off);
    return std::make_shared<NTapeAutomaton>(a.tapes(), a.num_states() + b.num_states(),
                                            std::move(init), std::move(final), std::move(trans),
                                            false);
}

std::vector<std::pair<AutPtr, AutPtr>> split_at_states(const NTapeAutomaton& a) {
    std::vector<std::pair<AutPtr, AutPtr>> out;
    for (uint32_t q = 0; q < a.num_states(); ++q) {
        auto prefix = std::make_shared<NTapeAutomaton>(a.tapes(), a.num_states(), a.init(),
                                                       std::vector<uint32_t>{q}, a.transitions(),
                                                       a.length_preserving());
        auto suffix = std::make_shared<NTapeAutomaton>(a.tapes(), a.num_states(),
                                                       std::vector<uint32_t>{q}, a.final(),
                                                       a.transitions(), a.length_preserving());
        out.emplace_back(std::move(prefix), std::move(suffix));
    }
    return out;
}

bool is_empty(const NTapeAutomaton& a) {
    std::vector<bool> reach(a.num_states(), false);
    std::deque<uint32_t> work;
    for (uint32_t q : a.init()) {
        reach[q] = true;
        work.push_back(q);
    }
    while (!work.empty()) {
        uint32_t q = work.front();
        work.pop_front();
        for (const Transition& t : a.transitions())
            if (t.from == q && !reach[t.to]) {
                reach[t.to] = true;
                work.push_back(t.to);
            }
    }
    for (uint32_t q : a.final())
        if (reach[q]) return false;
    return true;
}

std::set<std::vector<Word>> enumerate(const NTapeAutomaton& a, size_t max_len) {
    struct Conf {
        uint32_t state;
        std::vector<Word> words;
        bool operator<(const Conf& o) const {
            if (state != o.state) return state < o.state;
            return words < o.words;
        }
    };
    std::set<Conf> seen;
    std::deque<Conf> work;
    for (uint32_t q : a.init()) {
        Conf c{q, std::vector<Word>(a.tapes())};
        if (seen.insert(c).second) work.push_back(c);
    }
    std::set<std::vector<Word>> out;
    while (!work.empty()) {
        Conf c = work.front();
        work.pop_front();
        if (std::binary_search(a.final().begin(), a.final().end(), c.state)) out.insert(c.words);
        for (const Transition& t : a.transitions()) {
            if (t.from != c.state) continue;
            Conf nxt{t.to, c.words};
            bool ok = true;
            for (int i = 0; i < a.tapes() && ok; ++i) {
                if (t.label[i] == eps_sym) continue;
                if (nxt.words[i].size() >= max_len) ok = false;
                else nxt.words[i].push_back(t.label[i]);
            }
            if (ok && seen.insert(nxt).second) work.push_back(nxt);
        }
    }
    return out;
}

std::set<std::vector<std::vector<SymbolId>>> enumerate_label_words(const NTapeAutomaton& a,
                                                                   size_t max_len) {
    std::set<std::vector<std::vector<SymbolId>>> out;
    struct Conf {
        uint32_t state;
        std::vector<std::vector<SymbolId>> labels;
        bool operator<(const Conf& o) const {
            if (state != o.state) return state < o.state;
            return labels < o.labels;
        }
    };
    std::set<Conf> seen;
    std::deque<Conf> work;
    for (uint32_t q : a.init()) {
        Conf c{q, {}};
        if (seen.insert(c).second) work.push_back(c);
    }
    while (!work.empty()) {
        Conf c = work.front();
        work.pop_front();
        if (std::binary_search(a.final().begin(), a.final().end(), c.state)) out.insert(c.labels);
        if (c.labels.size() == max_len) continue;
        for (const Transition& t : a.transitions()) {
            if (t.from != c.state) continue;
            Conf nxt{t.to, c.labels};
            nxt.labels.push_back(t.label);
            if (seen.insert(nxt).second) work.push_back(std::move(nxt));
        }
    }
    return out;
}

AutPtr trim(const NTapeAutomaton& a) {
    const uint32_t n = a.num_states();
    std::vector<bool> fwd(n, false), bwd(n, false);
    std::deque<uint32_t> work;
    for (uint32_t q : a.init()) {
        fwd[q] = true;
        work.push_back(q);
    }
    while (!work.empty()) {
        uint32_t q = work.front();
        work.pop_front();
        for (const Transition& t : a.transitions())
            if (t.from == q && !fwd[t.to]) {
                fwd[t.to] = true;
                work.push_back(t.to);
            }
    }
    for (uint32_t q : a.final()) {
        bwd[q] = true;
        work.push_back(q);
    }
    while (!work.empty()) {
        uint32_t q = work.front();
        work.pop_front();
        for (const Transition& t : a.transitions())
            if (t.to == q && !bwd[t.from]) {
                bwd[t.from] = true;
                work.push_back(t.from);
            }
    }
    std::vector<uint32_t> remap(n, UINT32_MAX);
    uint32_t next = 0;
    for (uint32_t q = 0; q < n; ++q)
        if (fwd[q] && bwd[q]) remap[q] = next++;
    if (next == 0) return aut_empty(a.tapes());
    std::vector<Transition> trans;
    for (const Transition& t : a.transitions())
        if (remap[t.from] != UINT32_MAX && remap[t.to] != UINT32_MAX)
            trans.push_back({remap[t.from], t.label, remap[t.to]});
    std::vector<uint32_t> init, final;
    for (uint32_t q : a.init())
        if (remap[q] != UINT32_MAX) init.push_back(remap[q]);
    for (uint32_t q : a.final())
        if (remap[q] != UINT32_MAX) final.push_back(remap[q]);
    return std::make_shared<NTapeAutomaton>(a.tapes(), next, std::move(init), std::move(final),
                                            std::move(trans), a.length_preserving(), a.name());
}

}  // namespace chainfree
