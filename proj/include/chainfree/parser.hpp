#ifndef CHAINFREE_PARSER_HPP
#define CHAINFREE_PARSER_HPP

#include <string>
#include <utility>
#include <vector>

#include "chainfree/formula.hpp"

namespace chainfree {

class ParseError : public InputError {
public:
    ParseError(int line, int col, const std::string& msg)
        : InputError("input:" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line(line),
          col(col) {}
    int line;
    int col;
};

// A parsed problem: symbol context, the asserted formula (conjunction of all
// assertions plus the membership atoms pinning literal letters), and the
// automata defined by the input, in definition order.
struct Script {
    Context ctx;
    Formula formula;
    std::vector<std::pair<std::string, AutPtr>> automata;
};

Script parse(const std::string& text);

// Canonical concrete syntax for a script; parse(print_script(s)) yields a
// structurally equal formula.
std::string print_script(const Script& s);

}  // namespace chainfree

#endif
