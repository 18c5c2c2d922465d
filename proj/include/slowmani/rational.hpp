#pragma once

#include <gmpxx.h>

#include <string>

#include "slowmani/error.hpp"

namespace slowmani {

// Exact rational number.  Thin wrapper over GMP's mpq_class that keeps the
// value canonical (gcd(|num|, den) = 1, den > 0, zero is 0/1) at all times;
// mpq_class itself only canonicalizes on demand.
class Rat {
public:
    Rat() : v_(0) {}
    Rat(long n) : v_(n) {}
    Rat(long n, long d) : v_(n, d) { canon(d == 0); }
    Rat(const mpz_class& n, const mpz_class& d) : v_(n, d) { canon(d == 0); }
    explicit Rat(const mpq_class& q, bool needs_canon = false) : v_(q) {
        if (needs_canon) canon(q.get_den() == 0);
    }
    // Accepts "123" or "p/q".
    explicit Rat(const std::string& s) : v_(s) { canon(v_.get_den() == 0); }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_one() const { return v_ == 1; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    const mpq_class& value() const { return v_; }
    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }

    Rat operator-() const { return Rat(mpq_class(-v_)); }
    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
    Rat& operator/=(const Rat& o) {
        if (o.is_zero()) throw MathError("DivisionByZero", "rational division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
    friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }

    Rat abs() const { return Rat(mpq_class(::abs(v_))); }

    Rat pow(unsigned e) const {
        mpq_class r(1), base(v_);
        unsigned k = e;
        while (k) {
            if (k & 1) r *= base;
            base *= base;
            k >>= 1;
        }
        return Rat(r);
    }

    double to_double() const { return v_.get_d(); }

    std::string str() const {
        if (is_integer()) return v_.get_num().get_str();
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

private:
    void canon(bool den_zero) {
        if (den_zero) throw MathError("DivisionByZero", "zero denominator in rational");
        v_.canonicalize();
    }
    mpq_class v_;
};

// gcd(a/b, c/d) = gcd(a,c)/lcm(b,d): the largest rational dividing both with
// integer quotients.  Result is non-negative.
inline Rat rat_gcd(const Rat& a, const Rat& b) {
    if (a.is_zero()) return b.abs();
    if (b.is_zero()) return a.abs();
    mpz_class gn, lm;
    mpz_gcd(gn.get_mpz_t(), a.num().get_mpz_t(), b.num().get_mpz_t());
    mpz_lcm(lm.get_mpz_t(), a.den().get_mpz_t(), b.den().get_mpz_t());
    return Rat(gn, lm);
}

} // namespace slowmani
