#include "chainfree/fragment.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace chainfree {

uint32_t SplittingGraph::node_of(const Position& p) const {
    for (uint32_t i = 0; i < positions.size(); ++i)
        if (positions[i] == p) return i;
    throw InternalError("position not in graph");
}

bool SplittingGraph::has_edge(uint32_t p, uint32_t q) const {
    return std::find(succ[p].begin(), succ[p].end(), q) != succ[p].end();
}

SplittingGraph build_graph(const Clause& c) {
    SplittingGraph g;
    for (uint32_t i = 0; i < c.atoms.size(); ++i) {
        const auto* r = std::get_if<RelationalAtom>(&c.atoms[i]);
        if (!r) continue;
        uint32_t con = static_cast<uint32_t>(g.rel_atom_index.size());
        g.rel_atom_index.push_back(i);
        for (uint32_t s = 0; s < r->lhs.size(); ++s) {
            g.positions.push_back({con, false, s});
            g.var.push_back(r->lhs.vars[s]);
        }
        for (uint32_t s = 0; s < r->rhs.size(); ++s) {
            g.positions.push_back({con, true, s});
            g.var.push_back(r->rhs.vars[s]);
        }
    }
    const uint32_t n = static_cast<uint32_t>(g.positions.size());
    g.succ.assign(n, {});
    // (p, p') is an edge iff some p'' opposing p, p'' != p', has var(p'') = var(p')
    for (uint32_t p = 0; p < n; ++p) {
        for (uint32_t pp = 0; pp < n; ++pp) {
            bool found = false;
            for (uint32_t mid = 0; mid < n && !found; ++mid) {
                if (g.positions[mid].con != g.positions[p].con) continue;
                if (g.positions[mid].right == g.positions[p].right) continue;
                if (mid == pp) continue;
                if (g.var[mid] == g.var[pp]) found = true;
            }
            if (found) g.succ[p].push_back(pp);
        }
    }
    return g;
}

namespace {

// Tarjan SCC; components returned in some deterministic order.
std::vector<std::vector<uint32_t>> sccs(const SplittingGraph& g) {
    const uint32_t n = static_cast<uint32_t>(g.positions.size());
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<uint32_t> stack;
    std::vector<std::vector<uint32_t>> comps;
    int next = 0;
    std::function<void(uint32_t)> strongconnect = [&](uint32_t v) {
        index[v] = low[v] = next++;
        stack.push_back(v);
        on_stack[v] = true;
        for (uint32_t w : g.succ[v]) {
            if (index[w] < 0) {
                strongconnect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<uint32_t> comp;
            for (;;) {
                uint32_t w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(w);
                if (w == v) break;
            }
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
    };
    for (uint32_t v = 0; v < n; ++v)
        if (index[v] < 0) strongconnect(v);
    return comps;
}

// Some cycle inside a cyclic component, as a node sequence.
std::vector<uint32_t> cycle_in_scc(const SplittingGraph& g, const std::vector<uint32_t>& comp) {
    auto in_comp = [&](uint32_t v) {
        return std::binary_search(comp.begin(), comp.end(), v);
    };
    uint32_t start = comp[0];
    if (g.has_edge(start, start)) return {start};
    // DFS within the component back to start
    std::vector<uint32_t> path{start};
    std::vector<bool> visited(g.positions.size(), false);
    visited[start] = true;
    std::function<bool(uint32_t)> dfs = [&](uint32_t v) -> bool {
        for (uint32_t w : g.succ[v]) {
            if (!in_comp(w)) continue;
            if (w == start) return true;
            if (visited[w]) continue;
            visited[w] = true;
            path.push_back(w);
            if (dfs(w)) return true;
            path.pop_back();
        }
        return false;
    };
    if (!dfs(start)) throw InternalError("cyclic component without a cycle");
    return path;
}

bool scc_cyclic(const SplittingGraph& g, const std::vector<uint32_t>& comp) {
    if (comp.size() > 1) return true;
    return g.has_edge(comp[0], comp[0]);
}

}  // namespace

std::vector<ChainWitness> find_chains(const SplittingGraph& g) {
    std::vector<ChainWitness> out;
    for (const auto& comp : sccs(g)) {
        if (!scc_cyclic(g, comp)) continue;
        ChainWitness w;
        w.scc = comp;
        w.cycle = cycle_in_scc(g, comp);
        out.push_back(std::move(w));
    }
    // deterministic order: by smallest position in the component
    std::sort(out.begin(), out.end(), [&](const ChainWitness& a, const ChainWitness& b) {
        return g.positions[a.scc[0]] < g.positions[b.scc[0]];
    });
    return out;
}

bool classify_chain(ChainWitness& w, const SplittingGraph& g, const Clause& c) {
    // Benignity is decided over the whole component: any cycle in it uses the
    // same constraints and sides.
    bool side = g.positions[w.scc[0]].right;
    for (uint32_t nd : w.scc) {
        if (g.positions[nd].right != side) {
            w.benign = false;
            w.reason = "chain mixes left and right positions";
            return false;
        }
    }
    for (uint32_t nd : w.scc) {
        const auto& r = std::get<RelationalAtom>(c.atoms[g.rel_atom_index[g.positions[nd].con]]);
        if (r.lhs.size() != 1) {
            w.benign = false;
            w.reason = "chain constraint is not left-sided";
            return false;
        }
        if (!r.length_preserving) {
            w.benign = false;
            w.reason = "chain constraint is not length preserving";
            return false;
        }
    }
    w.benign = true;
    return true;
}

ClauseClass classify_clause(const Clause& c) {
    SplittingGraph g = build_graph(c);
    ClauseClass out;
    out.chains = find_chains(g);
    if (out.chains.empty()) {
        out.kind = FragmentKind::ChainFree;
        return out;
    }
    out.kind = FragmentKind::WeaklyChaining;
    for (ChainWitness& w : out.chains)
        if (!classify_chain(w, g, c)) out.kind = FragmentKind::Chaining;
    return out;
}

FragmentClass classify(Context& ctx, const Formula& f) {
    FragmentClass out;
    std::vector<Clause> clauses = to_dnf(ctx, f);
    bool any_chain = false, any_bad = false;
    for (Clause& c : clauses) {
        Clause ls = to_left_sided(ctx, std::move(c));
        ClauseClass cc = classify_clause(ls);
        if (cc.kind != FragmentKind::ChainFree) any_chain = true;
        if (cc.kind == FragmentKind::Chaining) any_bad = true;
        out.clauses.push_back(std::move(cc));
    }
    out.kind = any_bad      ? FragmentKind::Chaining
               : any_chain  ? FragmentKind::WeaklyChaining
                            : FragmentKind::ChainFree;
    return out;
}

const char* fragment_kind_name(FragmentKind k) {
    switch (k) {
        case FragmentKind::ChainFree: return "chain-free";
        case FragmentKind::WeaklyChaining: return "weakly-chaining";
        case FragmentKind::Chaining: return "chaining";
    }
    return "?";
}

std::string describe_witness(const Context& ctx, const Clause& c, const ChainWitness& w) {
    SplittingGraph g = build_graph(c);
    std::ostringstream out;
    out << "chain:";
    for (uint32_t nd : w.cycle) {
        const Position& p = g.positions[nd];
        out << " (c" << p.con + 1 << (p.right ? ",R," : ",L,") << p.slot + 1 << ":"
            << ctx.vars.name(g.var[nd]) << ")";
    }
    out << (w.benign ? " [benign]" : " [non-benign: " + w.reason + "]");
    return out.str();
}

}  // namespace chainfree
