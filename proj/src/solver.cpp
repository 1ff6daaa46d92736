#include "chainfree/solver.hpp"

#include <algorithm>
#include <sstream>

namespace chainfree {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Sat: return "sat";
        case Verdict::Unsat: return "unsat";
        case Verdict::Unknown: return "unknown";
        case Verdict::OutOfFragment: return "out-of-fragment";
    }
    return "?";
}

namespace {

Interpretation rebuild_model(const Interpretation& leaf_model,
                             const std::vector<std::pair<VarId, std::vector<VarId>>>& subst) {
    Interpretation eta = leaf_model;
    for (auto it = subst.rbegin(); it != subst.rend(); ++it) {
        Word w;
        for (VarId part : it->second) {
            const Word& pw = eta.word_of(part);
            w.insert(w.end(), pw.begin(), pw.end());
        }
        eta.assignment[it->first] = std::move(w);
    }
    return eta;
}

}  // namespace

SolveResult decide(Context& ctx, const Formula& f, const SolveOptions& opts) {
    SolveResult res;
    std::vector<Clause> clauses = to_dnf(ctx, f);
    std::vector<Clause> left_sided;
    for (Clause& c : clauses) left_sided.push_back(to_left_sided(ctx, std::move(c)));

    for (const Clause& c : left_sided) {
        ClauseReport rep;
        ClauseClass cc = classify_clause(c);
        rep.kind = cc.kind;
        for (const ChainWitness& w : cc.chains) rep.witnesses.push_back(describe_witness(ctx, c, w));
        res.clauses.push_back(std::move(rep));
    }

    bool any_chaining = false, any_unknown = false;
    std::string unknown_diag;
    uint32_t emit_count = 0;

    for (size_t ci = 0; ci < left_sided.size(); ++ci) {
        ClauseReport& rep = res.clauses[ci];
        if (opts.trace)
            res.trace.push_back("clause " + std::to_string(ci) + ": " + fragment_kind_name(rep.kind));
        if (rep.kind == FragmentKind::Chaining) {
            any_chaining = true;
            continue;
        }
        ChainFreeResult cf;
        try {
            cf = to_chain_free(ctx, left_sided[ci]);
        } catch (const InputError& e) {
            any_chaining = true;
            continue;
        }
        rep.eliminations = cf.eliminations;
        rep.initial_b = cf.initial_b;
        if (opts.trace) {
            for (const EliminationStep& st : cf.steps) {
                std::ostringstream line;
                line << "clause " << ci << ": eliminate benign family |S|=" << st.closure.size();
                if (st.degenerate) {
                    line << " (degenerate: chain variables pinned to eps)";
                } else {
                    line << " vars=[";
                    for (size_t j = 0; j < st.distinct_vars.size(); ++j)
                        line << (j ? " " : "") << ctx.vars.name(st.distinct_vars[j]);
                    line << "] automaton states=" << st.automaton_states;
                }
                line << " added atoms=" << st.added_atoms;
                res.trace.push_back(line.str());
            }
        }

        struct TraceCollector : SplitObserver {
            SolveResult* res;
            const SolveOptions* opts;
            SplitObserver* chained;
            void on_phase1_step(const Measure1& b, const Measure1& a) override {
                if (chained) chained->on_phase1_step(b, a);
            }
            void on_phase2_step(const Measure2& b, const Measure2& a) override {
                if (chained) chained->on_phase2_step(b, a);
            }
            void on_intermediate(const Clause& c) override {
                if (chained) chained->on_intermediate(c);
            }
            void on_trace(const std::string& s) override {
                if (opts->trace) res->trace.push_back(s);
                if (chained) chained->on_trace(s);
            }
        } collector;
        collector.res = &res;
        collector.opts = &opts;
        collector.chained = opts.observer;

        SplitOptions sopts;
        sopts.live_cap = opts.live_cap;
        sopts.observer = &collector;

        bool found_sat = false;
        try {
            explore_concat_free(ctx, cf.clause, sopts, [&](const SplitLeaf& leaf) {
                DecideOptions dopts;
                dopts.backend = opts.backend;
                dopts.want_model = opts.want_model;
                if (!opts.emit_lia_path.empty()) {
                    dopts.emit_lia_path =
                        emit_count == 0 ? opts.emit_lia_path
                                        : opts.emit_lia_path + "." + std::to_string(emit_count + 1);
                    emit_count++;
                }
                ClauseVerdict v = decide_clause(ctx, leaf.clause, dopts);
                if (v.kind == ClauseVerdict::Kind::Unknown) {
                    any_unknown = true;
                    unknown_diag = v.diag;
                    return false;
                }
                if (v.kind == ClauseVerdict::Kind::Unsat) return false;
                found_sat = true;
                if (opts.want_model && v.model) {
                    Interpretation eta = rebuild_model(*v.model, leaf.subst);
                    for (VarId fv : free_vars(f))
                        if (!eta.assignment.count(fv)) eta.assignment[fv] = Word{};
                    Interpretation trimmed;
                    for (VarId fv : free_vars(f)) trimmed.assignment[fv] = eta.assignment[fv];
                    if (!evaluate(f, trimmed)) throw InternalError("model fails the input formula");
                    res.model = std::move(trimmed);
                }
                return true;
            });
        } catch (const ResourceLimit& e) {
            any_unknown = true;
            unknown_diag = e.what();
        }
        if (found_sat) {
            res.verdict = Verdict::Sat;
            return res;
        }
    }

    if (any_chaining) {
        res.verdict = Verdict::OutOfFragment;
        for (size_t ci = 0; ci < res.clauses.size(); ++ci)
            if (res.clauses[ci].kind == FragmentKind::Chaining)
                for (const std::string& w : res.clauses[ci].witnesses) res.diag += w + "\n";
        return res;
    }
    if (any_unknown) {
        res.verdict = Verdict::Unknown;
        res.diag = unknown_diag;
        return res;
    }
    res.verdict = Verdict::Unsat;
    return res;
}

}  // namespace chainfree
