#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slowmani/rational.hpp"
#include "slowmani/ring.hpp"

namespace slowmani {

// Exponent vector; one entry per ring variable.
using Monomial = std::vector<unsigned>;

inline unsigned monomial_degree(const Monomial& m) {
    unsigned d = 0;
    for (unsigned e : m) d += e;
    return d;
}

// Ascending graded-lex order: lower total degree first, ties broken
// lexicographically on the exponent vector.  Map iteration order is therefore
// the canonical printing order, and rbegin() is the leading term.
struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        unsigned da = monomial_degree(a), db = monomial_degree(b);
        if (da != db) return da < db;
        return a < b;
    }
};

// Cap on the degree of any canonical rational-function value the engine
// materializes; a runaway guard for user inputs.  Transient products inside
// gcd, elimination and normalization legitimately overshoot and are exempt.
unsigned degree_limit();
void set_degree_limit(unsigned limit);

struct DegreeGuardSuspend {
    DegreeGuardSuspend();
    ~DegreeGuardSuspend();
};

class MultiPoly {
public:
    using TermMap = std::map<Monomial, Rat, GrlexLess>;

    MultiPoly() = default;
    explicit MultiPoly(RingPtr ring) : ring_(std::move(ring)) {}

    static MultiPoly constant(RingPtr ring, const Rat& c);
    static MultiPoly variable(RingPtr ring, size_t var);
    static MultiPoly monomial(RingPtr ring, const Monomial& m, const Rat& c);

    const RingPtr& ring() const { return ring_; }
    const TermMap& terms() const { return terms_; }
    size_t term_count() const { return terms_.size(); }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && monomial_degree(terms_.begin()->first) == 0); }
    Rat constant_value() const;
    bool is_one() const { return is_constant() && constant_value().is_one(); }

    unsigned total_degree() const;
    unsigned degree_in(size_t var) const;
    bool depends_on(size_t var) const { return degree_in(var) > 0; }

    // Accumulates c on monomial m, dropping the term if the sum vanishes.
    void add_term(const Monomial& m, const Rat& c);

    // In-place *this -= b * (c * x^m); the workhorse of exact division.
    void sub_mul_monomial(const MultiPoly& b, const Monomial& m, const Rat& c);

    std::pair<Monomial, Rat> leading() const;

    MultiPoly operator-() const;
    friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    friend bool operator==(const MultiPoly& a, const MultiPoly& b);
    friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

    MultiPoly mul_scalar(const Rat& c) const;
    MultiPoly mul_monomial(const Monomial& m, const Rat& c) const;
    MultiPoly pow(unsigned e) const;

    MultiPoly diff(size_t var) const;

    // Positive rational c such that (*this)/c has coprime integer
    // coefficients; zero for the zero polynomial.
    Rat content() const;
    MultiPoly divide_scalar(const Rat& c) const;

    // Per-variable minimum exponent across all terms.
    Monomial monomial_content() const;
    MultiPoly divide_monomial(const Monomial& m) const;

    Rat eval_rat(const std::vector<Rat>& point) const;
    double eval_double(const std::vector<double>& point) const;

    std::string str() const;

private:
    RingPtr ring_;
    TermMap terms_;
};

// Throws DegreeLimitExceeded when the guard is active and p is over the cap.
void check_degree_guard(const MultiPoly& p);

// Quotient when b divides a exactly; nullopt otherwise.
std::optional<MultiPoly> divide_exact(const MultiPoly& a, const MultiPoly& b);

// Primitive (integer content 1) gcd with positive leading coefficient.
// poly_gcd(0, 0) = 0.  Primitive subresultant PRS on a recursive univariate
// view, with a monomial-content pre-pass.
MultiPoly poly_gcd(const MultiPoly& a, const MultiPoly& b);

// Cheap call statistics for performance work.
struct PolyStats {
    unsigned long gcd_calls;
    unsigned long prs_iterations;
    unsigned long mul_calls;
    unsigned long mul_term_products;
};
PolyStats poly_stats();
void reset_poly_stats();

} // namespace slowmani
