#include "slowmani/ratfunc.hpp"

#include <map>

namespace slowmani {

RatFunc RatFunc::from_poly(MultiPoly p) {
    RatFunc f;
    f.num_ = std::move(p);
    f.den_ = MultiPoly::constant(f.num_.ring(), Rat(1));
    return f;
}

RatFunc RatFunc::constant(RingPtr ring, const Rat& c) {
    return from_poly(MultiPoly::constant(std::move(ring), c));
}

RatFunc RatFunc::variable(RingPtr ring, size_t var) {
    return from_poly(MultiPoly::variable(std::move(ring), var));
}

void RatFunc::normalize(MultiPoly num, MultiPoly den) {
    if (den.is_zero()) throw MathError("DivisionByZero", "zero denominator in rational function");
    if (num.is_zero()) {
        num_ = MultiPoly(num.ring());
        den_ = MultiPoly::constant(num.ring(), Rat(1));
        return;
    }
    if (!den.is_constant()) {
        MultiPoly g = poly_gcd(num, den);
        if (!g.is_constant()) {
            auto qn = divide_exact(num, g);
            auto qd = divide_exact(den, g);
            if (!qn || !qd) throw MathError("InternalInconsistency", "gcd does not divide operands");
            num = std::move(*qn);
            den = std::move(*qd);
        }
    }
    num_ = std::move(num);
    den_ = std::move(den);
    scale_normalize();
}

// Make den a primitive integer polynomial with positive leading coefficient.
void RatFunc::scale_normalize() {
    Rat c = den_.content();
    if (den_.leading().second.sign() < 0) c = -c;
    if (!c.is_one()) {
        den_ = den_.divide_scalar(c);
        num_ = num_.divide_scalar(c);
    }
    check_degree_guard(num_);
    check_degree_guard(den_);
}

RatFunc RatFunc::operator-() const {
    RatFunc r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_ == b.den_) return RatFunc(a.num_ + b.num_, a.den_);
    // gcd(n, d) = gcd(n, e) for n = n1*(d2/e) + n2*(d1/e), d = d1*(d2/e),
    // e = gcd(d1, d2), when both operands are reduced.
    MultiPoly e = poly_gcd(a.den_, b.den_);
    if (e.is_constant()) {
        return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_, RatFunc::reduced_tag{});
    }
    MultiPoly d2e = *divide_exact(b.den_, e);
    MultiPoly d1e = *divide_exact(a.den_, e);
    MultiPoly n = a.num_ * d2e + b.num_ * d1e;
    MultiPoly d = a.den_ * d2e;
    MultiPoly g = poly_gcd(n, e);
    if (!g.is_constant()) {
        n = *divide_exact(n, g);
        d = *divide_exact(d, g);
    }
    return RatFunc(std::move(n), std::move(d), RatFunc::reduced_tag{});
}

RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }

RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    if (a.is_zero() || b.is_zero()) return RatFunc::zero(a.ring());
    // Cross-cancel first; the factors that survive are pairwise coprime.
    MultiPoly n1 = a.num_, d1 = a.den_, n2 = b.num_, d2 = b.den_;
    MultiPoly g1 = poly_gcd(n1, d2);
    if (!g1.is_constant()) {
        n1 = *divide_exact(n1, g1);
        d2 = *divide_exact(d2, g1);
    }
    MultiPoly g2 = poly_gcd(n2, d1);
    if (!g2.is_constant()) {
        n2 = *divide_exact(n2, g2);
        d1 = *divide_exact(d1, g2);
    }
    return RatFunc(n1 * n2, d1 * d2, RatFunc::reduced_tag{});
}

RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) throw MathError("DivisionByZero", "division by zero rational function");
    return a * b.inverse();
}

RatFunc RatFunc::inverse() const {
    if (is_zero()) throw MathError("DivisionByZero", "inverse of zero");
    return RatFunc(den_, num_, reduced_tag{});
}

RatFunc RatFunc::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    RatFunc r = RatFunc::one(ring());
    RatFunc base = *this;
    unsigned long k = (unsigned long)e;
    while (k) {
        if (k & 1) r = r * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return r;
}

RatFunc RatFunc::mul_scalar(const Rat& c) const {
    if (c.is_zero()) return RatFunc::zero(ring());
    RatFunc r;
    r.num_ = num_.mul_scalar(c);
    r.den_ = den_;
    return r;
}

RatFunc RatFunc::diff(size_t var) const {
    if (!ring() || var >= ring()->size())
        throw SpecError("UnknownSymbol", "differentiation variable out of range");
    if (den_.is_one()) return RatFunc(num_.diff(var), den_);
    MultiPoly w = num_.diff(var) * den_ - num_ * den_.diff(var);
    return RatFunc(std::move(w), den_ * den_);
}

Rat RatFunc::eval_rat(const std::vector<Rat>& point) const {
    Rat d = den_.eval_rat(point);
    if (d.is_zero()) throw MathError("DivisionByZero", "denominator vanishes at evaluation point");
    return num_.eval_rat(point) / d;
}

namespace {

RatFunc subst_poly(const MultiPoly& p, const std::vector<RatFunc>& images, const RingPtr& target) {
    RatFunc acc = RatFunc::zero(target);
    std::map<std::pair<size_t, unsigned>, RatFunc> cache;
    auto power = [&](size_t v, unsigned e) -> const RatFunc& {
        auto key = std::make_pair(v, e);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        RatFunc val = images[v].pow(e);
        return cache.emplace(key, std::move(val)).first->second;
    };
    for (const auto& [m, c] : p.terms()) {
        RatFunc t = RatFunc::constant(target, c);
        for (size_t v = 0; v < m.size(); ++v)
            if (m[v]) t = t * power(v, m[v]);
        acc = acc + t;
    }
    return acc;
}

} // namespace

RatFunc subst(const RatFunc& f, const std::vector<RatFunc>& images) {
    if (images.size() != f.ring()->size())
        throw MathError("ShapeMismatch", "substitution image count does not match ring size");
    RingPtr target = images.empty() ? f.ring() : images.front().ring();
    RatFunc n = subst_poly(f.num(), images, target);
    if (f.is_poly()) return n;
    RatFunc d = subst_poly(f.den(), images, target);
    if (d.is_zero()) throw MathError("DivisionByZero", "denominator vanishes identically under substitution");
    return n / d;
}

std::string RatFunc::str() const {
    if (den_.is_one()) return num_.str();
    std::string ns = num_.str();
    if (num_.term_count() > 1) ns = "(" + ns + ")";
    std::string ds = den_.str();
    bool needs_paren = den_.term_count() > 1;
    if (!needs_paren) {
        const auto& [m, c] = *den_.terms().begin();
        size_t nvars = 0;
        for (unsigned e : m)
            if (e) ++nvars;
        needs_paren = !c.is_one() || nvars != 1;
    }
    if (needs_paren) ds = "(" + ds + ")";
    return ns + " / " + ds;
}

} // namespace slowmani
