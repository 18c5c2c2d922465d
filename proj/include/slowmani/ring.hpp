#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "slowmani/error.hpp"

namespace slowmani {

// An ordered list of symbol names.  Every polynomial carries a pointer to its
// ring; the declared order fixes the graded-lex monomial order and hence the
// canonical printed form.
class Ring {
public:
    // Symbols in [0, guard_start) are parameters: they do not count toward
    // the runaway degree guard, which watches the dynamical variables.
    explicit Ring(std::vector<std::string> names, size_t guard_start = 0)
        : names_(std::move(names)), guard_start_(guard_start) {
        for (size_t i = 0; i < names_.size(); ++i) {
            auto [it, fresh] = index_.emplace(names_[i], i);
            if (!fresh) throw SpecError("DuplicateSymbol", "symbol '" + names_[i] + "' declared twice");
        }
    }

    size_t size() const { return names_.size(); }
    size_t guard_start() const { return guard_start_; }
    const std::string& name(size_t i) const { return names_[i]; }
    const std::vector<std::string>& names() const { return names_; }

    bool has(const std::string& n) const { return index_.count(n) > 0; }
    size_t index_of(const std::string& n) const {
        auto it = index_.find(n);
        if (it == index_.end()) throw SpecError("UnknownSymbol", "undeclared symbol '" + n + "'");
        return it->second;
    }

    bool same_names(const Ring& o) const { return names_ == o.names_; }

private:
    std::vector<std::string> names_;
    size_t guard_start_ = 0;
    std::map<std::string, size_t> index_;
};

using RingPtr = std::shared_ptr<const Ring>;

inline RingPtr make_ring(std::vector<std::string> names, size_t guard_start = 0) {
    return std::make_shared<const Ring>(std::move(names), guard_start);
}

inline bool same_ring(const RingPtr& a, const RingPtr& b) {
    return a == b || (a && b && a->same_names(*b));
}

} // namespace slowmani
