#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "chainfree/oracle.hpp"
#include "chainfree/solver.hpp"

namespace {

using namespace chainfree;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::stringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream f(path);
    if (!f) throw InputError("cannot open input file '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

BackendSpec parse_backend(const std::string& spec) {
    BackendSpec b;
    if (spec.empty() || spec == "internal") return b;
    if (spec.rfind("external:", 0) == 0) {
        b.external = true;
        b.command = spec.substr(9);
        if (b.command.empty()) throw InputError("empty external backend command");
        return b;
    }
    throw InputError("backend must be 'internal' or 'external:<command>'");
}

void print_model(const Context& ctx, const Interpretation& eta) {
    for (auto& [v, w] : eta.assignment)
        std::cout << "model: " << ctx.vars.name(v) << " = \"" << ctx.word_str(w) << "\"\n";
}

int run_decide(const std::string& text, const std::string& backend_spec, bool want_model,
               bool trace, size_t live_cap, const std::string& emit_lia) {
    Script s = parse(text);
    SolveOptions opts;
    opts.backend = parse_backend(backend_spec);
    opts.want_model = want_model;
    opts.trace = trace;
    opts.live_cap = live_cap;
    opts.emit_lia_path = emit_lia;
    SolveResult r = decide(s.ctx, s.formula, opts);
    for (size_t i = 0; i < r.clauses.size(); ++i)
        std::cout << "clause " << i << ": " << fragment_kind_name(r.clauses[i].kind) << "\n";
    for (const std::string& line : r.trace) std::cout << "trace: " << line << "\n";
    std::cout << "verdict: " << verdict_name(r.verdict) << "\n";
    if (r.verdict == Verdict::OutOfFragment) {
        std::istringstream diag(r.diag);
        std::string line;
        while (std::getline(diag, line))
            if (!line.empty()) std::cout << "witness: " << line << "\n";
    } else if (!r.diag.empty()) {
        std::cout << "note: " << r.diag << "\n";
    }
    if (r.model) print_model(s.ctx, *r.model);
    switch (r.verdict) {
        case Verdict::Sat: return 0;
        case Verdict::Unsat: return 1;
        default: return 2;
    }
}

int run_classify(const std::string& text) {
    Script s = parse(text);
    FragmentClass fc = classify(s.ctx, s.formula);
    // report the per-clause classes with their witnesses
    std::vector<Clause> clauses = to_dnf(s.ctx, s.formula);
    for (size_t i = 0; i < fc.clauses.size(); ++i) {
        std::cout << "clause " << i << ": " << fragment_kind_name(fc.clauses[i].kind) << "\n";
        Clause ls = to_left_sided(s.ctx, std::move(clauses[i]));
        for (const ChainWitness& w : fc.clauses[i].chains)
            std::cout << "  " << describe_witness(s.ctx, ls, w) << "\n";
    }
    std::cout << "verdict: " << fragment_kind_name(fc.kind) << "\n";
    return fc.kind == FragmentKind::Chaining ? 2 : 0;
}

int run_oracle(const std::string& text, size_t bound) {
    Script s = parse(text);
    Bound b;
    b.max_len = bound;
    auto witness = bounded_sat(s.ctx, s.formula, b);
    if (!witness) {
        std::cout << "verdict: no-witness-within-bound " << bound << "\n";
        return 1;
    }
    std::cout << "verdict: witness\n";
    print_model(s.ctx, *witness);
    return 0;
}

int run_solve_lia(const std::string& text) {
    lia::Problem p = lia::parse_smt2(text);
    lia::Result r = lia::solve(p);
    std::cout << lia::format_reply(p, r);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decision procedure for weakly chaining string constraints"};
    app.get_formatter()->column_width(30);

    std::string input;
    app.add_option("input", input, "input file ('-' for stdin)")->required();

    bool classify_only = false, oracle_mode = false, solve_lia = false;
    app.add_flag("--classify-only", classify_only, "report the fragment classification and stop");
    app.add_flag("--oracle", oracle_mode, "bounded brute-force search instead of the pipeline");
    app.add_flag("--solve-lia", solve_lia, "treat the input as SMT-LIB2 QF_LIA and solve it");

    size_t bound = 3;
    app.add_option("--bound", bound, "word-length bound for --oracle");

    std::string backend = "internal";
    if (const char* env = std::getenv("CHAINFREE_BACKEND")) backend = env;
    app.add_option("--backend", backend,
                   "arithmetic backend: internal | external:<command> (default from "
                   "CHAINFREE_BACKEND)");

    bool model = false, trace = false;
    app.add_flag("--model", model, "print a satisfying assignment when sat");
    app.add_flag("--trace", trace, "log eliminations and splitting steps");

    size_t live_cap = 100000;
    app.add_option("--live-cap", live_cap, "maximum number of clauses the splitting may create");

    std::string emit_lia;
    app.add_option("--emit-lia", emit_lia, "write the final QF_LIA problem(s) to this path");

    CLI11_PARSE(app, argc, argv);

    if (classify_only + oracle_mode + solve_lia > 1) {
        std::cerr << "error: --classify-only, --oracle and --solve-lia are mutually exclusive\n";
        return 3;
    }

    try {
        std::string text = read_input(input);
        if (solve_lia) return run_solve_lia(text);
        if (classify_only) return run_classify(text);
        if (oracle_mode) return run_oracle(text, bound);
        return run_decide(text, backend, model, trace, live_cap, emit_lia);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
