#pragma once

#include <string>
#include <vector>

#include "slowmani/poly.hpp"

namespace slowmani {

// Rational function in canonical form: gcd(num, den) = 1, den a primitive
// integer polynomial with positive leading coefficient under graded-lex,
// zero is 0/1.  Two values are equal iff they agree field-by-field.
class RatFunc {
public:
    RatFunc() = default;
    RatFunc(MultiPoly num, MultiPoly den) { normalize(std::move(num), std::move(den)); }

    static RatFunc from_poly(MultiPoly p);
    static RatFunc constant(RingPtr ring, const Rat& c);
    static RatFunc variable(RingPtr ring, size_t var);
    static RatFunc zero(RingPtr ring) { return constant(std::move(ring), Rat(0)); }
    static RatFunc one(RingPtr ring) { return constant(std::move(ring), Rat(1)); }

    const MultiPoly& num() const { return num_; }
    const MultiPoly& den() const { return den_; }
    const RingPtr& ring() const { return num_.ring(); }

    bool is_zero() const { return num_.is_zero(); }
    bool is_poly() const { return den_.is_one(); }
    bool is_constant() const { return num_.is_constant() && den_.is_one(); }
    Rat constant_value() const { return num_.constant_value(); }

    RatFunc operator-() const;
    friend RatFunc operator+(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b);
    friend bool operator==(const RatFunc& a, const RatFunc& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

    RatFunc inverse() const;
    RatFunc pow(long e) const;
    RatFunc mul_scalar(const Rat& c) const;

    RatFunc diff(size_t var) const;

    Rat eval_rat(const std::vector<Rat>& point) const;

    std::string str() const;

private:
    struct reduced_tag {};
    RatFunc(MultiPoly num, MultiPoly den, reduced_tag) : num_(std::move(num)), den_(std::move(den)) {
        scale_normalize();
    }
    void normalize(MultiPoly num, MultiPoly den);
    void scale_normalize();

    MultiPoly num_, den_;
};

// Substitutes images[i] for source-ring variable i everywhere in f; the
// result lives in the images' ring.
RatFunc subst(const RatFunc& f, const std::vector<RatFunc>& images);

} // namespace slowmani
