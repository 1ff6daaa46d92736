#ifndef CHAINFREE_CONTEXT_HPP
#define CHAINFREE_CONTEXT_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace chainfree {

using SymbolId = uint32_t;
using VarId = uint32_t;

// Epsilon is not a symbol; it appears only as a label component.
inline constexpr SymbolId eps_sym = std::numeric_limits<SymbolId>::max();

// A word is a sequence of interned letters.
using Word = std::vector<SymbolId>;

class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error("internal error: " + msg) {}
};

class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Interns letters. Base letters come from the input declarations; tuple
// letters are built from k ordered component letters during benign-chain
// elimination and compare equal iff their component lists are equal.
class Alphabet {
public:
    SymbolId intern_base(const std::string& name) {
        auto it = by_name_.find(name);
        if (it != by_name_.end()) return it->second;
        SymbolId id = static_cast<SymbolId>(entries_.size());
        entries_.push_back(Entry{name, {}});
        by_name_.emplace(name, id);
        base_.push_back(id);
        return id;
    }

    SymbolId intern_tuple(const std::vector<SymbolId>& parts) {
        if (parts.size() < 2) throw InternalError("tuple letter needs at least 2 parts");
        std::string key = "<";
        for (size_t i = 0; i < parts.size(); ++i) {
            if (i) key += ",";
            key += name(parts[i]);
        }
        key += ">";
        auto it = by_name_.find(key);
        if (it != by_name_.end()) return it->second;
        SymbolId id = static_cast<SymbolId>(entries_.size());
        entries_.push_back(Entry{key, parts});
        by_name_.emplace(key, id);
        return id;
    }

    std::optional<SymbolId> find_base(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end() || !entries_[it->second].parts.empty()) return std::nullopt;
        return it->second;
    }

    bool is_tuple(SymbolId s) const { return !entries_.at(s).parts.empty(); }
    const std::vector<SymbolId>& parts(SymbolId s) const { return entries_.at(s).parts; }
    const std::string& name(SymbolId s) const { return entries_.at(s).name; }
    size_t size() const { return entries_.size(); }

    const std::vector<SymbolId>& base_letters() const { return base_; }

    std::vector<SymbolId> all_letters() const {
        std::vector<SymbolId> out(entries_.size());
        for (SymbolId i = 0; i < entries_.size(); ++i) out[i] = i;
        return out;
    }

private:
    struct Entry {
        std::string name;
        std::vector<SymbolId> parts;  // empty for base letters
    };
    std::vector<Entry> entries_;
    std::unordered_map<std::string, SymbolId> by_name_;
    std::vector<SymbolId> base_;
};

// Interns string-variable names in declaration order.
class VarPool {
public:
    VarId intern(const std::string& name) {
        auto it = by_name_.find(name);
        if (it != by_name_.end()) return it->second;
        VarId id = static_cast<VarId>(names_.size());
        names_.push_back(name);
        by_name_.emplace(name, id);
        return id;
    }

    std::optional<VarId> find(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& name(VarId v) const { return names_.at(v); }
    size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, VarId> by_name_;
};

// Shared symbol state for one problem: the (growable) alphabet and the
// variable pool. Passed by reference through the pipeline; automata and
// formulas store plain ids into it.
struct Context {
    Alphabet alphabet;
    VarPool vars;

    std::string word_str(const Word& w) const {
        bool long_names = false;
        for (SymbolId s : w)
            if (alphabet.name(s).size() > 1) long_names = true;
        std::string out;
        for (size_t i = 0; i < w.size(); ++i) {
            if (long_names && i) out += " ";
            out += alphabet.name(w[i]);
        }
        return out;
    }
};

}  // namespace chainfree

#endif
