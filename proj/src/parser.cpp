#include "chainfree/parser.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace chainfree {

namespace {

struct SExpr {
    enum class Kind { Sym, Str, Int, List };
    Kind kind;
    std::string text;       // Sym, Str
    long long num = 0;      // Int
    std::vector<SExpr> items;
    int line = 0, col = 0;

    bool is_sym(const char* s) const { return kind == Kind::Sym && text == s; }
};

class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    std::vector<SExpr> read_all() {
        std::vector<SExpr> out;
        skip_ws();
        while (pos_ < text_.size()) {
            out.push_back(read());
            skip_ws();
        }
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(line_, col_, msg); }

    void advance() {
        if (text_[pos_] == '\n') {
            line_++;
            col_ = 1;
        } else {
            col_++;
        }
        pos_++;
    }

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    SExpr read() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        int l = line_, c = col_;
        char ch = text_[pos_];
        if (ch == '(') {
            advance();
            SExpr e{SExpr::Kind::List, "", 0, {}, l, c};
            for (;;) {
                skip_ws();
                if (pos_ >= text_.size()) fail("missing ')'");
                if (text_[pos_] == ')') {
                    advance();
                    return e;
                }
                e.items.push_back(read());
            }
        }
        if (ch == ')') fail("unexpected ')'");
        if (ch == '"') {
            advance();
            std::string s;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                s += text_[pos_];
                advance();
            }
            if (pos_ >= text_.size()) fail("unterminated string literal");
            advance();
            return SExpr{SExpr::Kind::Str, s, 0, {}, l, c};
        }
        std::string tok;
        while (pos_ < text_.size()) {
            char t = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(t)) || t == '(' || t == ')' || t == ';' ||
                t == '"')
                break;
            tok += t;
            advance();
        }
        bool numeric = !tok.empty() && (std::isdigit(static_cast<unsigned char>(tok[0])) ||
                                        (tok[0] == '-' && tok.size() > 1));
        if (numeric) {
            for (size_t i = (tok[0] == '-' ? 1 : 0); i < tok.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(tok[i]))) numeric = false;
        }
        if (numeric) return SExpr{SExpr::Kind::Int, tok, std::stoll(tok), {}, l, c};
        return SExpr{SExpr::Kind::Sym, tok, 0, {}, l, c};
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

class ScriptBuilder {
public:
    Script run(const std::string& text) {
        std::vector<SExpr> forms = Reader(text).read_all();
        for (const SExpr& f : forms) handle_form(f);
        if (asserts_.empty()) throw ParseError(1, 1, "input has no (assert ...) form");
        check_polarity();
        std::vector<Formula> parts = asserts_;
        for (Formula& m : lit_atoms_) parts.push_back(std::move(m));
        if (parts.size() == 1) script_.formula = std::move(parts[0]);
        else script_.formula = Formula::make(Formula::Kind::And, std::move(parts));
        return std::move(script_);
    }

private:
    [[noreturn]] void fail(const SExpr& at, const std::string& msg) {
        throw ParseError(at.line, at.col, msg);
    }

    void expect_sym(const SExpr& e, const char* what) {
        if (e.kind != SExpr::Kind::Sym) fail(e, std::string("expected ") + what);
    }

    void handle_form(const SExpr& f) {
        if (f.kind != SExpr::Kind::List || f.items.empty() || f.items[0].kind != SExpr::Kind::Sym)
            fail(f, "expected a top-level form");
        const std::string& head = f.items[0].text;
        if (head == "declare-alphabet") {
            for (size_t i = 1; i < f.items.size(); ++i) {
                expect_sym(f.items[i], "a letter");
                if (script_.ctx.alphabet.find_base(f.items[i].text))
                    fail(f.items[i], "duplicate letter '" + f.items[i].text + "'");
                script_.ctx.alphabet.intern_base(f.items[i].text);
            }
        } else if (head == "declare-str") {
            if (f.items.size() != 2) fail(f, "declare-str expects one variable name");
            expect_sym(f.items[1], "a variable name");
            if (script_.ctx.vars.find(f.items[1].text))
                fail(f.items[1], "duplicate variable '" + f.items[1].text + "'");
            script_.ctx.vars.intern(f.items[1].text);
        } else if (head == "define-aut") {
            define_aut(f);
        } else if (head == "assert") {
            if (f.items.size() != 2) fail(f, "assert expects one formula");
            asserts_.push_back(parse_formula(f.items[1]));
        } else {
            fail(f, "unknown form '" + head + "'");
        }
    }

    void define_aut(const SExpr& f) {
        if (f.items.size() < 2 || f.items[1].kind != SExpr::Kind::Sym)
            fail(f, "define-aut expects a name");
        const std::string name = f.items[1].text;
        if (auts_.count(name)) fail(f.items[1], "duplicate automaton '" + name + "'");
        std::map<std::string, const SExpr*> kw;
        for (size_t i = 2; i + 1 < f.items.size(); i += 2) {
            if (f.items[i].kind != SExpr::Kind::Sym || f.items[i].text.empty() ||
                f.items[i].text[0] != ':')
                fail(f.items[i], "expected a :keyword");
            kw[f.items[i].text] = &f.items[i + 1];
        }
        if ((f.items.size() - 2) % 2 != 0) fail(f, "define-aut has a dangling keyword");
        auto need = [&](const char* k) -> const SExpr& {
            auto it = kw.find(k);
            if (it == kw.end()) fail(f, std::string("define-aut misses ") + k);
            return *it->second;
        };
        const SExpr& tapes_e = need(":tapes");
        if (tapes_e.kind != SExpr::Kind::Int || tapes_e.num < 1) fail(tapes_e, ":tapes must be a positive integer");
        int tapes = static_cast<int>(tapes_e.num);

        const SExpr& states_e = need(":states");
        if (states_e.kind != SExpr::Kind::List) fail(states_e, ":states must be a list");
        std::map<std::string, uint32_t> state_id;
        for (const SExpr& s : states_e.items) {
            expect_sym(s, "a state name");
            if (state_id.count(s.text)) fail(s, "duplicate state '" + s.text + "'");
            uint32_t id = static_cast<uint32_t>(state_id.size());
            state_id[s.text] = id;
        }
        auto state_ref = [&](const SExpr& s) {
            expect_sym(s, "a state name");
            auto it = state_id.find(s.text);
            if (it == state_id.end()) fail(s, "undeclared state '" + s.text + "'");
            return it->second;
        };
        auto state_list = [&](const SExpr& e) {
            if (e.kind != SExpr::Kind::List) fail(e, "expected a state list");
            std::vector<uint32_t> out;
            for (const SExpr& s : e.items) out.push_back(state_ref(s));
            return out;
        };
        std::vector<uint32_t> init = state_list(need(":init"));
        std::vector<uint32_t> final = state_list(need(":final"));

        const SExpr& trans_e = need(":trans");
        if (trans_e.kind != SExpr::Kind::List) fail(trans_e, ":trans must be a list");
        std::vector<Transition> trans;
        bool saw_eps = false;
        for (const SExpr& t : trans_e.items) {
            if (t.kind != SExpr::Kind::List || t.items.size() != 3)
                fail(t, "transition must be (state (label...) state)");
            uint32_t from = state_ref(t.items[0]);
            const SExpr& lab = t.items[1];
            if (lab.kind != SExpr::Kind::List || lab.items.size() != static_cast<size_t>(tapes))
                fail(lab, "label must list one entry per tape");
            std::vector<SymbolId> label;
            for (const SExpr& le : lab.items) {
                expect_sym(le, "a letter or _");
                if (le.text == "_") {
                    label.push_back(eps_sym);
                    saw_eps = true;
                } else {
                    auto sym = script_.ctx.alphabet.find_base(le.text);
                    if (!sym) fail(le, "undeclared letter '" + le.text + "'");
                    label.push_back(*sym);
                }
            }
            uint32_t to = state_ref(t.items[2]);
            trans.push_back({from, std::move(label), to});
        }

        bool lp;
        auto lp_it = kw.find(":length-preserving");
        if (lp_it == kw.end()) {
            lp = !saw_eps;
        } else {
            const SExpr& v = *lp_it->second;
            if (v.is_sym("true")) lp = true;
            else if (v.is_sym("false")) lp = false;
            else fail(v, ":length-preserving must be true or false");
            if (lp && saw_eps) fail(v, "length-preserving automaton has an eps label slot");
        }

        auto aut = std::make_shared<NTapeAutomaton>(tapes, static_cast<uint32_t>(state_id.size()),
                                                    std::move(init), std::move(final),
                                                    std::move(trans), lp, name);
        auts_[name] = aut;
        script_.automata.emplace_back(name, std::move(aut));
    }

    // --- terms and formulas ---

    StrTerm parse_term(const SExpr& e) {
        StrTerm t;
        append_term(e, t);
        return t;
    }

    void append_term(const SExpr& e, StrTerm& t) {
        if (e.kind == SExpr::Kind::Sym) {
            auto v = script_.ctx.vars.find(e.text);
            if (!v) fail(e, "undeclared variable '" + e.text + "'");
            t.vars.push_back(*v);
            return;
        }
        if (e.kind == SExpr::Kind::Str) {
            for (char ch : e.text) {
                std::string letter(1, ch);
                auto sym = script_.ctx.alphabet.find_base(letter);
                if (!sym) fail(e, "letter '" + letter + "' in literal is not declared");
                t.vars.push_back(literal_var(*sym));
            }
            return;
        }
        if (e.kind == SExpr::Kind::List && !e.items.empty() && e.items[0].is_sym("concat")) {
            for (size_t i = 1; i < e.items.size(); ++i) append_term(e.items[i], t);
            return;
        }
        fail(e, "expected a string term");
    }

    // A fresh variable pinned to one letter; one per literal occurrence so
    // literals never link relational constraints in the splitting graph.
    VarId literal_var(SymbolId letter) {
        std::string name;
        do {
            name = "_lit" + std::to_string(lit_counter_++);
        } while (script_.ctx.vars.find(name));
        VarId v = script_.ctx.vars.intern(name);
        AutPtr aut = aut_word({letter});
        lit_atoms_.push_back(Formula::leaf(MembershipAtom{StrTerm{{v}}, std::move(aut)}));
        return v;
    }

    ArithTerm parse_arith(const SExpr& e) {
        if (e.kind == SExpr::Kind::Int) return ArithTerm::constant(e.num);
        if (e.kind == SExpr::Kind::List && !e.items.empty() && e.items[0].kind == SExpr::Kind::Sym) {
            const std::string& head = e.items[0].text;
            if (head == "len") {
                if (e.items.size() != 2) fail(e, "len expects one term");
                return ArithTerm::len_of(parse_term(e.items[1]));
            }
            if (head == "+") {
                if (e.items.size() < 3) fail(e, "+ expects at least two arguments");
                ArithTerm acc = parse_arith(e.items[1]);
                for (size_t i = 2; i < e.items.size(); ++i) acc += parse_arith(e.items[i]);
                return acc;
            }
            if (head == "*") {
                if (e.items.size() != 3 || e.items[1].kind != SExpr::Kind::Int)
                    fail(e, "* expects an integer and an arithmetic term");
                ArithTerm t = parse_arith(e.items[2]);
                t.scale(e.items[1].num);
                return t;
            }
        }
        fail(e, "expected an arithmetic term");
    }

    AutPtr aut_ref(const SExpr& e, int want_tapes) {
        expect_sym(e, "an automaton name");
        auto it = auts_.find(e.text);
        if (it == auts_.end()) fail(e, "undeclared automaton '" + e.text + "'");
        if (it->second->tapes() != want_tapes)
            fail(e, "automaton '" + e.text + "' has " + std::to_string(it->second->tapes()) +
                        " tapes, expected " + std::to_string(want_tapes));
        return it->second;
    }

    Formula parse_formula(const SExpr& e) {
        if (e.kind != SExpr::Kind::List || e.items.empty() || e.items[0].kind != SExpr::Kind::Sym)
            fail(e, "expected a formula");
        const std::string& head = e.items[0].text;
        auto nary = [&](Formula::Kind k) {
            if (e.items.size() < 2) fail(e, head + " expects at least one formula");
            std::vector<Formula> kids;
            for (size_t i = 1; i < e.items.size(); ++i) kids.push_back(parse_formula(e.items[i]));
            if (kids.size() == 1) return std::move(kids[0]);
            return Formula::make(k, std::move(kids));
        };
        if (head == "and") return nary(Formula::Kind::And);
        if (head == "or") return nary(Formula::Kind::Or);
        if (head == "not") {
            if (e.items.size() != 2) fail(e, "not expects one formula");
            std::vector<Formula> kid;
            kid.push_back(parse_formula(e.items[1]));
            return Formula::make(Formula::Kind::Not, std::move(kid));
        }
        if (head == "=") {
            if (e.items.size() != 3) fail(e, "= expects two terms");
            return Formula::leaf(RelationalAtom{parse_term(e.items[1]), parse_term(e.items[2]),
                                                nullptr, true, true});
        }
        if (head == "in") {
            if (e.items.size() != 3) fail(e, "in expects a term and an automaton");
            return Formula::leaf(MembershipAtom{parse_term(e.items[1]), aut_ref(e.items[2], 1)});
        }
        if (head == "rel") {
            if (e.items.size() != 4) fail(e, "rel expects an automaton and two terms");
            AutPtr rel = aut_ref(e.items[1], 2);
            bool lp = rel->length_preserving();
            return Formula::leaf(RelationalAtom{parse_term(e.items[2]), parse_term(e.items[3]),
                                                std::move(rel), false, lp});
        }
        if (head == "<=" || head == "<" || head == "=len") {
            if (e.items.size() != 3) fail(e, head + " expects two arithmetic terms");
            CmpOp op = head == "<=" ? CmpOp::Le : head == "<" ? CmpOp::Lt : CmpOp::Eq;
            return Formula::leaf(ArithAtom{parse_arith(e.items[1]), parse_arith(e.items[2]), op});
        }
        fail(e, "unknown formula head '" + head + "'");
    }

    void check_polarity() {
        for (const Formula& f : asserts_) check_polarity(f, false);
    }

    void check_polarity(const Formula& f, bool neg) {
        if (f.kind == Formula::Kind::Not) {
            check_polarity(f.kids[0], !neg);
            return;
        }
        if (f.kind != Formula::Kind::Leaf) {
            for (const Formula& k : f.kids) check_polarity(k, neg);
            return;
        }
        if (!neg) return;
        if (const auto* r = std::get_if<RelationalAtom>(f.atom.get()))
            if (!r->length_preserving)
                throw ParseError(1, 1, "negated non-invertible constraint (relation '" +
                                           (r->rel ? r->rel->name() : std::string("?")) +
                                           "' is not length preserving)");
    }

    Script script_;
    std::vector<Formula> asserts_;
    std::vector<Formula> lit_atoms_;
    std::map<std::string, AutPtr> auts_;
    int lit_counter_ = 0;
};

}  // namespace

Script parse(const std::string& text) { return ScriptBuilder().run(text); }

// --- printing -----------------------------------------------------------------

namespace {

class Printer {
public:
    explicit Printer(const Script& s) : s_(s) {}

    std::string run() {
        collect(s_.formula);
        std::ostringstream out;
        const auto& base = s_.ctx.alphabet.base_letters();
        if (!base.empty()) {
            out << "(declare-alphabet";
            for (SymbolId b : base) out << " " << s_.ctx.alphabet.name(b);
            out << ")\n";
        }
        for (VarId v = 0; v < s_.ctx.vars.size(); ++v)
            out << "(declare-str " << s_.ctx.vars.name(v) << ")\n";
        for (const auto& [aut, name] : aut_names_) out << print_aut(*aut, name);
        out << "(assert " << print_formula(s_.formula) << ")\n";
        return out.str();
    }

private:
    void collect(const Formula& f) {
        if (f.kind == Formula::Kind::Leaf) {
            if (const auto* m = std::get_if<MembershipAtom>(f.atom.get())) note(m->aut);
            if (const auto* r = std::get_if<RelationalAtom>(f.atom.get()))
                if (r->rel) note(r->rel);
        }
        for (const Formula& k : f.kids) collect(k);
    }

    void note(const AutPtr& a) {
        for (auto& [aut, name] : aut_names_)
            if (aut.get() == a.get()) return;
        std::string name = a->name();
        if (name.empty() || used_names_.count(name)) {
            do {
                name = "_aut" + std::to_string(aut_counter_++);
            } while (used_names_.count(name));
        }
        used_names_.insert(name);
        aut_names_.emplace_back(a, name);
    }

    std::string name_of(const AutPtr& a) const {
        for (auto& [aut, name] : aut_names_)
            if (aut.get() == a.get()) return name;
        throw InternalError("printer: automaton not collected");
    }

    std::string print_aut(const NTapeAutomaton& a, const std::string& name) const {
        std::ostringstream out;
        out << "(define-aut " << name << " :tapes " << a.tapes() << " :states (";
        for (uint32_t q = 0; q < a.num_states(); ++q) out << (q ? " " : "") << "s" << q;
        out << ") :init (";
        for (size_t i = 0; i < a.init().size(); ++i) out << (i ? " " : "") << "s" << a.init()[i];
        out << ") :final (";
        for (size_t i = 0; i < a.final().size(); ++i) out << (i ? " " : "") << "s" << a.final()[i];
        out << ") :trans (";
        bool first = true;
        for (const Transition& t : a.transitions()) {
            if (!first) out << " ";
            first = false;
            out << "(s" << t.from << " (";
            for (size_t i = 0; i < t.label.size(); ++i) {
                if (i) out << " ";
                out << (t.label[i] == eps_sym ? "_" : s_.ctx.alphabet.name(t.label[i]));
            }
            out << ") s" << t.to << ")";
        }
        out << ") :length-preserving " << (a.length_preserving() ? "true" : "false") << ")\n";
        return out.str();
    }

    std::string print_term(const StrTerm& t) const {
        if (t.vars.empty()) return "(concat)";
        if (t.vars.size() == 1) return s_.ctx.vars.name(t.vars[0]);
        std::string out = "(concat";
        for (VarId v : t.vars) out += " " + s_.ctx.vars.name(v);
        return out + ")";
    }

    std::string print_arith(const ArithTerm& t) const {
        std::vector<std::string> parts;
        for (auto& [v, c] : t.coeffs) {
            std::string len = "(len " + s_.ctx.vars.name(v) + ")";
            parts.push_back(c == 1 ? len : "(* " + std::to_string(c) + " " + len + ")");
        }
        if (t.k != 0 || parts.empty()) parts.push_back(std::to_string(t.k));
        if (parts.size() == 1) return parts[0];
        std::string out = "(+";
        for (const std::string& p : parts) out += " " + p;
        return out + ")";
    }

    std::string print_atom(const Atom& a) const {
        if (const auto* m = std::get_if<MembershipAtom>(&a))
            return "(in " + print_term(m->term) + " " + name_of(m->aut) + ")";
        if (const auto* r = std::get_if<RelationalAtom>(&a)) {
            if (r->is_equality) return "(= " + print_term(r->lhs) + " " + print_term(r->rhs) + ")";
            return "(rel " + name_of(r->rel) + " " + print_term(r->lhs) + " " + print_term(r->rhs) +
                   ")";
        }
        const auto& c = std::get<ArithAtom>(a);
        const char* op = c.op == CmpOp::Le ? "<=" : c.op == CmpOp::Lt ? "<" : "=len";
        return "(" + std::string(op) + " " + print_arith(c.lhs) + " " + print_arith(c.rhs) + ")";
    }

    std::string print_formula(const Formula& f) const {
        switch (f.kind) {
            case Formula::Kind::Leaf: return print_atom(*f.atom);
            case Formula::Kind::Not: return "(not " + print_formula(f.kids[0]) + ")";
            case Formula::Kind::And:
            case Formula::Kind::Or: {
                std::string out = f.kind == Formula::Kind::And ? "(and" : "(or";
                for (const Formula& k : f.kids) out += " " + print_formula(k);
                return out + ")";
            }
        }
        throw InternalError("unreachable");
    }

    const Script& s_;
    std::vector<std::pair<AutPtr, std::string>> aut_names_;
    std::set<std::string> used_names_;
    int aut_counter_ = 0;
};

}  // namespace

std::string print_script(const Script& s) { return Printer(s).run(); }

}  // namespace chainfree
