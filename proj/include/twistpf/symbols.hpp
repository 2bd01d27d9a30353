#pragma once

// Session-wide registry of parameter symbols (masses, kinematic invariants,
// the deformation variable t, and the reserved regulators eps and kap).
// A Symbol is just an index into the registry; the index order (declaration
// order) is also the variable order used by the monomial order, so canonical
// forms are deterministic for a fixed sequence of intern() calls.

#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace twistpf {

struct Symbol {
    std::uint32_t id = 0;
    friend bool operator==(Symbol a, Symbol b) { return a.id == b.id; }
    friend bool operator!=(Symbol a, Symbol b) { return a.id != b.id; }
    friend bool operator<(Symbol a, Symbol b) { return a.id < b.id; }
};

class SymbolTable {
  public:
    static SymbolTable& instance() {
        static SymbolTable table;
        return table;
    }

    Symbol intern(const std::string& name) {
        if (name.empty()) throw std::invalid_argument("empty symbol name");
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = ids_.find(name);
        if (it != ids_.end()) return Symbol{it->second};
        std::uint32_t id = static_cast<std::uint32_t>(names_.size());
        names_.push_back(name);
        ids_.emplace(name, id);
        return Symbol{id};
    }

    std::optional<Symbol> lookup(const std::string& name) const {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = ids_.find(name);
        if (it == ids_.end()) return std::nullopt;
        return Symbol{it->second};
    }

    std::string name(Symbol s) const {
        std::lock_guard<std::mutex> lock(mutex_);
        if (s.id >= names_.size()) throw std::out_of_range("unknown symbol id");
        return names_[s.id];
    }

    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return names_.size();
    }

  private:
    SymbolTable() {
        // Regulators are always present and occupy the first two slots.
        names_.push_back("eps");
        ids_.emplace("eps", 0);
        names_.push_back("kap");
        ids_.emplace("kap", 1);
    }

    mutable std::mutex mutex_;
    std::deque<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> ids_;
};

inline Symbol sym(const std::string& name) { return SymbolTable::instance().intern(name); }
inline std::string sym_name(Symbol s) { return SymbolTable::instance().name(s); }
inline Symbol sym_eps() { return Symbol{0}; }
inline Symbol sym_kap() { return Symbol{1}; }

}  // namespace twistpf
