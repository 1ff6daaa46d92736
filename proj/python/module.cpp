#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chainfree/oracle.hpp"
#include "chainfree/solver.hpp"

namespace py = pybind11;
using namespace chainfree;

namespace {

py::dict interpretation_to_dict(const Context& ctx, const Interpretation& eta) {
    py::dict out;
    for (auto& [v, w] : eta.assignment) out[py::str(ctx.vars.name(v))] = ctx.word_str(w);
    return out;
}

py::dict decide_text(const std::string& text, const std::string& backend, bool model,
                     size_t live_cap) {
    Script s = parse(text);
    SolveOptions opts;
    if (backend.rfind("external:", 0) == 0) {
        opts.backend.external = true;
        opts.backend.command = backend.substr(9);
    } else if (backend != "internal" && !backend.empty()) {
        throw InputError("backend must be 'internal' or 'external:<command>'");
    }
    opts.want_model = model;
    opts.live_cap = live_cap;
    SolveResult r = decide(s.ctx, s.formula, opts);
    py::dict out;
    out["verdict"] = verdict_name(r.verdict);
    py::list clauses;
    for (const ClauseReport& c : r.clauses) clauses.append(fragment_kind_name(c.kind));
    out["clauses"] = clauses;
    if (r.model) out["model"] = interpretation_to_dict(s.ctx, *r.model);
    if (!r.diag.empty()) out["diag"] = r.diag;
    return out;
}

py::dict classify_text(const std::string& text) {
    Script s = parse(text);
    FragmentClass fc = classify(s.ctx, s.formula);
    py::dict out;
    out["class"] = fragment_kind_name(fc.kind);
    py::list clauses;
    for (const ClauseClass& c : fc.clauses) clauses.append(fragment_kind_name(c.kind));
    out["clauses"] = clauses;
    return out;
}

py::object oracle_text(const std::string& text, size_t bound) {
    Script s = parse(text);
    Bound b;
    b.max_len = bound;
    auto witness = bounded_sat(s.ctx, s.formula, b);
    if (!witness) return py::none();
    return interpretation_to_dict(s.ctx, *witness);
}

py::dict solve_lia_text(const std::string& smt2) {
    lia::Problem p = lia::parse_smt2(smt2);
    lia::Result r = lia::solve(p);
    py::dict out;
    out["status"] = r.status == lia::Status::Sat     ? "sat"
                    : r.status == lia::Status::Unsat ? "unsat"
                                                     : "unknown";
    if (r.status == lia::Status::Sat) {
        py::dict model;
        for (lia::Var v = 0; v < p.vars.size(); ++v)
            model[py::str(p.vars[v].name)] = r.model[v];
        out["model"] = model;
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "decision procedure for string constraints with transducers, word "
              "equations and length constraints";

    m.def("decide", &decide_text, py::arg("text"), py::arg("backend") = "internal",
          py::arg("model") = false, py::arg("live_cap") = 100000,
          "Decide a constraint script; returns a dict with verdict, per-clause "
          "fragment classes and optionally a model.");
    m.def("classify", &classify_text, py::arg("text"),
          "Fragment classification only: chain-free, weakly-chaining or chaining.");
    m.def("oracle_sat", &oracle_text, py::arg("text"), py::arg("bound") = 3,
          "Bounded brute-force search; returns the first witness or None.");
    m.def("solve_lia", &solve_lia_text, py::arg("smt2"),
          "Solve a quantifier-free linear integer arithmetic problem in SMT-LIB2 text.");
}
