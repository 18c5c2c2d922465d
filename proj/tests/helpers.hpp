#pragma once

#include <random>
#include <string>

#include "slowmani/expansion.hpp"
#include "slowmani/expr.hpp"
#include "slowmani/problem.hpp"

namespace slowmani::test {

inline std::string problem_path(const std::string& name) {
    return std::string(SLOWMANI_PROBLEMS_DIR) + "/" + name;
}

inline ProblemSpec load(const std::string& name) { return load_problem_file(problem_path(name)); }

// Parse + lower a single expression into the ring.
inline RatFunc rf(const RingPtr& ring, const std::string& src) {
    return lower_to_ratfunc(parse_expression(src), ring);
}

inline RatMat col(const RingPtr& ring, const std::vector<std::string>& entries) {
    RatMat m(ring, entries.size(), 1);
    for (size_t i = 0; i < entries.size(); ++i) m.at(i, 0) = rf(ring, entries[i]);
    return m;
}

inline RatMat mat(const RingPtr& ring, const std::vector<std::vector<std::string>>& rows) {
    RatMat m(ring, rows.size(), rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = rf(ring, rows[i][j]);
    return m;
}

// Small random polynomials/rational functions for property tests.
struct RandomAlgebra {
    std::mt19937 gen;
    RingPtr ring;

    RandomAlgebra(unsigned seed, RingPtr r) : gen(seed), ring(std::move(r)) {}

    Rat rat() {
        std::uniform_int_distribution<long> num(-9, 9);
        std::uniform_int_distribution<long> den(1, 5);
        return Rat(num(gen), den(gen));
    }

    MultiPoly poly(unsigned max_deg, unsigned terms) {
        MultiPoly p(ring);
        std::uniform_int_distribution<unsigned> e(0, max_deg);
        for (unsigned t = 0; t < terms; ++t) {
            Monomial m(ring->size(), 0);
            unsigned budget = max_deg;
            for (size_t v = 0; v < ring->size(); ++v) {
                unsigned ev = std::min(e(gen), budget);
                m[v] = ev;
                budget -= ev;
            }
            p.add_term(m, rat());
        }
        return p;
    }

    MultiPoly nonzero_poly(unsigned max_deg, unsigned terms) {
        for (;;) {
            MultiPoly p = poly(max_deg, terms);
            if (!p.is_zero()) return p;
        }
    }

    RatFunc ratfunc(unsigned max_deg = 2, unsigned terms = 3) {
        return RatFunc(poly(max_deg, terms), nonzero_poly(max_deg, terms));
    }

    RatFunc nonzero_ratfunc(unsigned max_deg = 2, unsigned terms = 3) {
        for (;;) {
            RatFunc f = ratfunc(max_deg, terms);
            if (!f.is_zero()) return f;
        }
    }
};

} // namespace slowmani::test
