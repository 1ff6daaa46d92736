#include "chainfree/split.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "chainfree/fragment.hpp"

namespace chainfree {

bool can_split_left(const RelationalAtom& r) {
    // the left split exists when the right side keeps a rest after its head
    return !r.lhs.empty() && r.rhs.size() >= 2;
}

bool can_split_right(const RelationalAtom& r) {
    return !r.rhs.empty() && r.lhs.size() >= 2;
}

namespace {

RelationalAtom subst_rel(const RelationalAtom& r, VarId v, const std::vector<VarId>& repl) {
    Atom a = substitute(Atom{r}, v, repl);
    return std::get<RelationalAtom>(a);
}

StrTerm rest_of(const StrTerm& t) {
    StrTerm out;
    out.vars.assign(t.vars.begin() + 1, t.vars.end());
    return out;
}

}  // namespace

std::vector<SplitDisjunct> split_constraint(Context& ctx, uint32_t& fresh_counter,
                                            const RelationalAtom& r, bool left) {
    if (left && !can_split_left(r)) throw InternalError("left split does not exist");
    if (!left && !can_split_right(r)) throw InternalError("right split does not exist");

    VarId head = left ? r.lhs.vars[0] : r.rhs.vars[0];
    VarId part1 = fresh_var(ctx, fresh_counter);
    VarId part2 = fresh_var(ctx, fresh_counter);
    std::vector<VarId> repl{part1, part2};

    std::vector<SplitDisjunct> out;
    auto push = [&](RelationalAtom first, RelationalAtom second) {
        SplitDisjunct d;
        d.sub_var = head;
        d.repl = repl;
        d.pieces.push_back(subst_rel(first, head, repl));
        d.pieces.push_back(subst_rel(second, head, repl));
        out.push_back(std::move(d));
    };

    if (left) {
        StrTerm x1{{part1}};
        StrTerm x2_t{{part2}};
        StrTerm t = rest_of(r.lhs);
        x2_t.vars.insert(x2_t.vars.end(), t.vars.begin(), t.vars.end());
        StrTerm y{{r.rhs.vars[0]}};
        StrTerm t2 = rest_of(r.rhs);
        if (r.is_equality) {
            push(RelationalAtom{x1, y, nullptr, true, true},
                 RelationalAtom{x2_t, t2, nullptr, true, true});
        } else {
            for (auto& [prefix, suffix] : split_at_states(*r.rel)) {
                push(RelationalAtom{x1, y, prefix, false, r.length_preserving},
                     RelationalAtom{x2_t, t2, suffix, false, r.length_preserving});
            }
        }
    } else {
        StrTerm x{{r.lhs.vars[0]}};
        StrTerm t = rest_of(r.lhs);
        StrTerm y1{{part1}};
        StrTerm y2_t2{{part2}};
        StrTerm t2 = rest_of(r.rhs);
        y2_t2.vars.insert(y2_t2.vars.end(), t2.vars.begin(), t2.vars.end());
        if (r.is_equality) {
            push(RelationalAtom{x, y1, nullptr, true, true},
                 RelationalAtom{t, y2_t2, nullptr, true, true});
        } else {
            for (auto& [prefix, suffix] : split_at_states(*r.rel)) {
                push(RelationalAtom{x, y1, prefix, false, r.length_preserving},
                     RelationalAtom{t, y2_t2, suffix, false, r.length_preserving});
            }
        }
    }
    return out;
}

std::vector<SplitDisjunct> split_eps_side(const RelationalAtom& r) {
    bool lhs_eps = r.lhs.empty();
    const StrTerm& side = lhs_eps ? r.rhs : r.lhs;
    if ((!r.lhs.empty() && !r.rhs.empty()) || side.size() < 2)
        throw InternalError("eps-side split does not apply");
    StrTerm head{{side.vars[0]}};
    StrTerm tail = rest_of(side);
    StrTerm eps;

    std::vector<SplitDisjunct> out;
    if (r.is_equality) {
        SplitDisjunct d;
        d.pieces.push_back(lhs_eps ? RelationalAtom{eps, head, nullptr, true, true}
                                   : RelationalAtom{head, eps, nullptr, true, true});
        d.pieces.push_back(lhs_eps ? RelationalAtom{eps, tail, nullptr, true, true}
                                   : RelationalAtom{tail, eps, nullptr, true, true});
        out.push_back(std::move(d));
        return out;
    }
    for (auto& [prefix, suffix] : split_at_states(*r.rel)) {
        SplitDisjunct d;
        d.pieces.push_back(lhs_eps ? RelationalAtom{eps, head, prefix, false, r.length_preserving}
                                   : RelationalAtom{head, eps, prefix, false, r.length_preserving});
        d.pieces.push_back(lhs_eps ? RelationalAtom{eps, tail, suffix, false, r.length_preserving}
                                   : RelationalAtom{tail, eps, suffix, false, r.length_preserving});
        out.push_back(std::move(d));
    }
    return out;
}

// --- the two-phase regimen ----------------------------------------------------

namespace {

struct TrackedAtom {
    Atom atom;
    bool relational = false;
    bool in_reminder = false;
    bool was_root = false;
    int outer_side = -1;  // 0 left, 1 right; designated when first a root
    int level = -1;       // drop level
};

struct WorkClause {
    std::vector<TrackedAtom> atoms;
    uint32_t fresh_counter = 0;
    std::vector<std::pair<VarId, std::vector<VarId>>> subst;
    int steps = 0;        // phase-1 splitting steps taken
    long long gains = 0;  // non-root -> root transitions
    long long n0 = 0;     // original relational atom count
    bool phase2 = false;

    Clause to_clause() const {
        Clause c;
        for (const TrackedAtom& t : atoms) c.atoms.push_back(t.atom);
        c.fresh_counter = fresh_counter;
        return c;
    }
};

const RelationalAtom& rel_of(const TrackedAtom& t) { return std::get<RelationalAtom>(t.atom); }

bool has_concat(const RelationalAtom& r) { return r.lhs.size() >= 2 || r.rhs.size() >= 2; }

// Reminder-graph root analysis over the reminder subset of a work clause.
struct ReminderInfo {
    std::vector<size_t> atom_ix;       // graph constraint -> atom index
    std::vector<std::array<bool, 2>> side_all_root;  // per constraint, [left, right]
    std::vector<bool> is_root;         // per constraint
};

ReminderInfo analyze_reminder(const WorkClause& wc) {
    Clause sub;
    ReminderInfo info;
    for (size_t i = 0; i < wc.atoms.size(); ++i) {
        if (!wc.atoms[i].in_reminder) continue;
        sub.atoms.push_back(wc.atoms[i].atom);
        info.atom_ix.push_back(i);
    }
    SplittingGraph g = build_graph(sub);
    std::vector<bool> node_root(g.positions.size(), true);
    for (const auto& succs : g.succ)
        for (uint32_t q : succs) node_root[q] = false;
    info.side_all_root.assign(info.atom_ix.size(), {true, true});
    for (uint32_t nd = 0; nd < g.positions.size(); ++nd) {
        if (node_root[nd]) continue;
        const Position& p = g.positions[nd];
        info.side_all_root[p.con][p.right ? 1 : 0] = false;
    }
    info.is_root.assign(info.atom_ix.size(), false);
    for (size_t c = 0; c < info.atom_ix.size(); ++c)
        info.is_root[c] = info.side_all_root[c][0] || info.side_all_root[c][1];
    return info;
}

// Root designation, gain counting, and fixpoint removal of concatenation-free
// root constraints. Drops record the current step as their level.
void refresh_reminder(WorkClause& wc, bool count_gains) {
    for (;;) {
        ReminderInfo info = analyze_reminder(wc);
        bool dropped = false;
        for (size_t c = 0; c < info.atom_ix.size(); ++c) {
            if (!info.is_root[c]) continue;
            TrackedAtom& ta = wc.atoms[info.atom_ix[c]];
            if (!ta.was_root) {
                ta.was_root = true;
                if (count_gains) wc.gains++;
            }
            if (ta.outer_side < 0) ta.outer_side = info.side_all_root[c][0] ? 0 : 1;
            if (is_concat_free(ta.atom)) {
                ta.in_reminder = false;
                ta.level = wc.steps;
                dropped = true;
            }
        }
        if (!dropped) return;
    }
}

Measure1 measure1(const WorkClause& wc) {
    Measure1 m;
    m.l = wc.n0 - wc.gains;
    ReminderInfo info = analyze_reminder(wc);
    for (size_t c = 0; c < info.atom_ix.size(); ++c) {
        if (!info.is_root[c]) continue;
        const TrackedAtom& ta = wc.atoms[info.atom_ix[c]];
        const RelationalAtom& r = rel_of(ta);
        int outer = ta.outer_side >= 0 ? ta.outer_side : (info.side_all_root[c][0] ? 0 : 1);
        long long llen = static_cast<long long>(r.lhs.size());
        long long rlen = static_cast<long long>(r.rhs.size());
        m.o += outer == 0 ? llen : rlen;
        m.i += outer == 0 ? rlen : llen;
    }
    return m;
}

Measure2 measure2(const WorkClause& wc) {
    Measure2 m;
    for (const TrackedAtom& ta : wc.atoms) {
        if (!ta.relational || is_concat_free(ta.atom)) continue;
        const RelationalAtom& r = rel_of(ta);
        int level = std::max(ta.level, 0);
        if (m.iota.size() <= static_cast<size_t>(level)) m.iota.resize(level + 1, 0);
        long long inner =
            ta.outer_side == 1 ? static_cast<long long>(r.lhs.size()) : static_cast<long long>(r.rhs.size());
        m.iota[level] += inner;
    }
    return m;
}

ArithAtom split_length_atom(VarId whole, VarId p1, VarId p2) {
    ArithTerm lhs;
    lhs.add_coeff(whole, 1);
    ArithTerm rhs;
    rhs.add_coeff(p1, 1);
    rhs.add_coeff(p2, 1);
    return ArithAtom{std::move(lhs), std::move(rhs), CmpOp::Eq};
}

class Explorer {
public:
    Explorer(Context& ctx, const SplitOptions& opts, const std::function<bool(const SplitLeaf&)>& fn)
        : ctx_(ctx), opts_(opts), fn_(fn) {}

    bool run(const Clause& c) {
        WorkClause wc;
        wc.fresh_counter = c.fresh_counter;
        for (const Atom& a : c.atoms) {
            TrackedAtom ta;
            ta.atom = a;
            ta.relational = std::holds_alternative<RelationalAtom>(a);
            ta.in_reminder = ta.relational;
            wc.atoms.push_back(std::move(ta));
        }
        wc.n0 = static_cast<long long>(
            std::count_if(wc.atoms.begin(), wc.atoms.end(), [](auto& t) { return t.relational; }));
        refresh_reminder(wc, false);
        return explore(std::move(wc));
    }

private:
    Context& ctx_;
    const SplitOptions& opts_;
    const std::function<bool(const SplitLeaf&)>& fn_;
    size_t created_ = 0;

    void note_child() {
        if (++created_ > opts_.live_cap)
            throw ResourceLimit("splitting exceeded the clause cap of " +
                                std::to_string(opts_.live_cap));
    }

    void trace(const std::string& s) {
        if (opts_.observer) opts_.observer->on_trace(s);
    }

    // One child work clause: the split atom replaced by the disjunct's pieces
    // and the substitution applied everywhere else.
    WorkClause make_child(const WorkClause& parent, size_t split_ix, const SplitDisjunct& d,
                          uint32_t fresh_after, bool add_length) {
        WorkClause child;
        child.fresh_counter = fresh_after;
        child.subst = parent.subst;
        child.steps = parent.steps;
        child.gains = parent.gains;
        child.n0 = parent.n0;
        child.phase2 = parent.phase2;
        const TrackedAtom& sp = parent.atoms[split_ix];
        for (size_t i = 0; i < parent.atoms.size(); ++i) {
            if (i == split_ix) {
                for (const RelationalAtom& piece : d.pieces) {
                    TrackedAtom ta;
                    ta.atom = piece;
                    ta.relational = true;
                    ta.in_reminder = sp.in_reminder;
                    ta.was_root = sp.was_root;
                    ta.outer_side = sp.outer_side;
                    ta.level = sp.level;
                    child.atoms.push_back(std::move(ta));
                }
                continue;
            }
            TrackedAtom ta = parent.atoms[i];
            if (d.sub_var != no_var) ta.atom = substitute(ta.atom, d.sub_var, d.repl);
            child.atoms.push_back(std::move(ta));
        }
        if (add_length && d.sub_var != no_var) {
            TrackedAtom ta;
            ta.atom = split_length_atom(d.sub_var, d.repl[0], d.repl[1]);
            child.atoms.push_back(std::move(ta));
            child.subst.emplace_back(d.sub_var, d.repl);
        }
        return child;
    }

    // Memberships over concatenations decompose by the same state-splitting
    // device; these steps touch no relational atom and no measure.
    bool decompose_membership(WorkClause& wc) {
        for (size_t i = 0; i < wc.atoms.size(); ++i) {
            const auto* m = std::get_if<MembershipAtom>(&wc.atoms[i].atom);
            if (!m || m->term.size() < 2) continue;
            VarId head = m->term.vars[0];
            StrTerm tail;
            tail.vars.assign(m->term.vars.begin() + 1, m->term.vars.end());
            auto splits = split_at_states(*m->aut);
            for (auto& [prefix, suffix] : splits) {
                WorkClause child = wc;
                child.atoms[i].atom = MembershipAtom{StrTerm{{head}}, prefix};
                TrackedAtom ta;
                ta.atom = MembershipAtom{tail, suffix};
                child.atoms.insert(child.atoms.begin() + i + 1, std::move(ta));
                note_child();
                if (explore(std::move(child))) return true;
            }
            return false;  // children fully explored
        }
        throw InternalError("no membership to decompose");
    }

    bool has_wide_membership(const WorkClause& wc) const {
        for (const TrackedAtom& ta : wc.atoms)
            if (const auto* m = std::get_if<MembershipAtom>(&ta.atom))
                if (m->term.size() >= 2) return true;
        return false;
    }

    bool explore(WorkClause wc) {
        if (has_wide_membership(wc)) return decompose_membership(wc);
        if (!wc.phase2) return phase1(std::move(wc));
        return phase2(std::move(wc));
    }

    bool phase1(WorkClause wc) {
        // stop: the reminder holds no concatenation
        bool reminder_concat = false;
        for (const TrackedAtom& ta : wc.atoms)
            if (ta.in_reminder && has_concat(rel_of(ta))) reminder_concat = true;
        if (!reminder_concat) {
            for (TrackedAtom& ta : wc.atoms) {
                if (!ta.relational) continue;
                if (ta.level < 0) ta.level = wc.steps + 1;
                if (ta.outer_side < 0) ta.outer_side = 0;
            }
            wc.phase2 = true;
            return explore(std::move(wc));
        }

        ReminderInfo info = analyze_reminder(wc);
        size_t pick = wc.atoms.size();
        for (size_t c = 0; c < info.atom_ix.size(); ++c) {
            if (!info.is_root[c]) continue;
            if (!has_concat(rel_of(wc.atoms[info.atom_ix[c]]))) continue;
            pick = info.atom_ix[c];
            break;
        }
        if (pick == wc.atoms.size())
            throw InternalError("non-empty reminder without a splittable root constraint");

        Measure1 before = measure1(wc);
        return branch_on(wc, pick, true, &before, nullptr);
    }

    bool phase2(WorkClause wc) {
        size_t pick = wc.atoms.size();
        for (size_t i = 0; i < wc.atoms.size(); ++i) {
            if (!wc.atoms[i].relational || is_concat_free(wc.atoms[i].atom)) continue;
            pick = i;
            break;
        }
        if (pick == wc.atoms.size()) {
            SplitLeaf leaf{wc.to_clause(), wc.subst};
            return fn_(leaf);
        }
        Measure2 before = measure2(wc);
        return branch_on(wc, pick, false, nullptr, &before);
    }

    bool branch_on(const WorkClause& wc, size_t pick, bool phase_one, const Measure1* m1_before,
                   const Measure2* m2_before) {
        const RelationalAtom& r = rel_of(wc.atoms[pick]);
        std::vector<std::pair<SplitDisjunct, uint32_t>> disjuncts;  // with child counter
        uint32_t counter = wc.fresh_counter;
        if (r.lhs.empty() || r.rhs.empty()) {
            for (SplitDisjunct& d : split_eps_side(r)) disjuncts.emplace_back(std::move(d), counter);
        } else {
            if (can_split_left(r)) {
                uint32_t c2 = counter;
                for (SplitDisjunct& d : split_constraint(ctx_, c2, r, true))
                    disjuncts.emplace_back(std::move(d), c2);
                counter = c2;
            }
            if (can_split_right(r)) {
                uint32_t c2 = counter;
                for (SplitDisjunct& d : split_constraint(ctx_, c2, r, false))
                    disjuncts.emplace_back(std::move(d), c2);
                counter = c2;
            }
        }
        if (disjuncts.empty()) throw InternalError("selected constraint has no split");

        for (auto& [d, child_counter] : disjuncts) {
            WorkClause child = make_child(wc, pick, d, child_counter, true);
            note_child();
            if (phase_one) {
                child.steps++;
                refresh_reminder(child, true);
                Measure1 after = measure1(child);
                if (!(after < *m1_before))
                    throw InternalError("phase 1 measure did not decrease");
                if (opts_.observer) {
                    opts_.observer->on_phase1_step(*m1_before, after);
                    opts_.observer->on_intermediate(child.to_clause());
                }
                trace(step_line(wc, pick, d, true));
            } else {
                Measure2 after = measure2(child);
                if (!(after < *m2_before))
                    throw InternalError("phase 2 measure did not decrease");
                if (opts_.observer) {
                    opts_.observer->on_phase2_step(*m2_before, after);
                    opts_.observer->on_intermediate(child.to_clause());
                }
                trace(step_line(wc, pick, d, false));
            }
            if (explore(std::move(child))) return true;
        }
        return false;
    }

    std::string step_line(const WorkClause& wc, size_t pick, const SplitDisjunct& d, bool p1) {
        std::ostringstream out;
        out << (p1 ? "phase1 split atom " : "phase2 split atom ") << pick;
        if (d.sub_var != no_var)
            out << " [" << ctx_.vars.name(d.sub_var) << "/" << ctx_.vars.name(d.repl[0]) << "."
                << ctx_.vars.name(d.repl[1]) << "]";
        else
            out << " [eps side]";
        (void)wc;
        return out.str();
    }
};

}  // namespace

bool explore_concat_free(Context& ctx, const Clause& c, const SplitOptions& opts,
                         const std::function<bool(const SplitLeaf&)>& fn) {
    Explorer e(ctx, opts, fn);
    return e.run(c);
}

std::vector<Clause> to_concat_free(Context& ctx, const Clause& c, const SplitOptions& opts) {
    std::vector<Clause> out;
    explore_concat_free(ctx, c, opts, [&](const SplitLeaf& leaf) {
        out.push_back(leaf.clause);
        return false;
    });
    return out;
}

}  // namespace chainfree
