#include "slowmani/poly.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>

namespace slowmani {

namespace {
std::atomic<unsigned> g_degree_limit{64};
thread_local int g_guard_suspended = 0;
std::atomic<unsigned long> g_gcd_calls{0}, g_prs_iters{0}, g_mul_calls{0}, g_mul_terms{0};

void check_ring(const MultiPoly& a, const MultiPoly& b) {
    if (!same_ring(a.ring(), b.ring()))
        throw MathError("RingMismatch", "operands belong to different rings");
}
} // namespace

unsigned degree_limit() { return g_degree_limit.load(); }
void set_degree_limit(unsigned limit) { g_degree_limit.store(limit); }
DegreeGuardSuspend::DegreeGuardSuspend() { ++g_guard_suspended; }
DegreeGuardSuspend::~DegreeGuardSuspend() { --g_guard_suspended; }

void check_degree_guard(const MultiPoly& p) {
    if (g_guard_suspended != 0 || p.is_zero()) return;
    const size_t from = p.ring()->guard_start();
    unsigned d = 0;
    for (const auto& [m, c] : p.terms()) {
        unsigned t = 0;
        for (size_t i = from; i < m.size(); ++i) t += m[i];
        d = std::max(d, t);
    }
    if (d > g_degree_limit.load())
        throw MathError("DegreeLimitExceeded",
                        "variable degree " + std::to_string(d) + " exceeds limit " +
                            std::to_string(g_degree_limit.load()) + " (SLOWMANI_MAX_DEGREE)");
}

MultiPoly MultiPoly::constant(RingPtr ring, const Rat& c) {
    MultiPoly p(std::move(ring));
    if (!c.is_zero()) p.terms_.emplace(Monomial(p.ring_->size(), 0), c);
    return p;
}

MultiPoly MultiPoly::variable(RingPtr ring, size_t var) {
    MultiPoly p(std::move(ring));
    Monomial m(p.ring_->size(), 0);
    m.at(var) = 1;
    p.terms_.emplace(std::move(m), Rat(1));
    return p;
}

MultiPoly MultiPoly::monomial(RingPtr ring, const Monomial& m, const Rat& c) {
    MultiPoly p(std::move(ring));
    if (!c.is_zero()) p.terms_.emplace(m, c);
    return p;
}

Rat MultiPoly::constant_value() const {
    if (terms_.empty()) return Rat(0);
    return terms_.begin()->second;
}

unsigned MultiPoly::total_degree() const {
    if (terms_.empty()) return 0;
    return monomial_degree(terms_.rbegin()->first);
}

unsigned MultiPoly::degree_in(size_t var) const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
    return d;
}

void MultiPoly::add_term(const Monomial& m, const Rat& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void MultiPoly::sub_mul_monomial(const MultiPoly& b, const Monomial& m, const Rat& c) {
    const size_t nv = ring_->size();
    Monomial t(nv);
    for (const auto& [mb, cb] : b.terms_) {
        for (size_t i = 0; i < nv; ++i) t[i] = mb[i] + m[i];
        add_term(t, -(cb * c));
    }
}

std::pair<Monomial, Rat> MultiPoly::leading() const {
    if (terms_.empty()) throw MathError("InternalInconsistency", "leading term of zero polynomial");
    return *terms_.rbegin();
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly r(ring_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
    check_ring(a, b);
    MultiPoly r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
    check_ring(a, b);
    MultiPoly r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    check_ring(a, b);
    if (a.is_zero() || b.is_zero()) return MultiPoly(a.ring_);
    g_mul_calls.fetch_add(1, std::memory_order_relaxed);
    g_mul_terms.fetch_add(a.term_count() * b.term_count(), std::memory_order_relaxed);
    MultiPoly r(a.ring_);
    const size_t nv = a.ring_->size();
    Monomial m(nv, 0);
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            for (size_t i = 0; i < nv; ++i) m[i] = ma[i] + mb[i];
            r.add_term(m, ca * cb);
        }
    }
    return r;
}

bool operator==(const MultiPoly& a, const MultiPoly& b) {
    if (!same_ring(a.ring(), b.ring())) return false;
    return a.terms_ == b.terms_;
}

MultiPoly MultiPoly::mul_scalar(const Rat& c) const {
    MultiPoly r(ring_);
    if (c.is_zero()) return r;
    for (const auto& [m, v] : terms_) r.terms_.emplace(m, v * c);
    return r;
}

MultiPoly MultiPoly::mul_monomial(const Monomial& mm, const Rat& c) const {
    MultiPoly r(ring_);
    if (c.is_zero()) return r;
    const size_t nv = ring_->size();
    for (const auto& [m, v] : terms_) {
        Monomial t(nv);
        for (size_t i = 0; i < nv; ++i) t[i] = m[i] + mm[i];
        r.terms_.emplace(std::move(t), v * c);
    }
    return r;
}

MultiPoly MultiPoly::pow(unsigned e) const {
    MultiPoly r = MultiPoly::constant(ring_, Rat(1));
    MultiPoly base = *this;
    while (e) {
        if (e & 1) r = r * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return r;
}

MultiPoly MultiPoly::diff(size_t var) const {
    if (var >= ring_->size()) throw SpecError("UnknownSymbol", "differentiation variable out of range");
    MultiPoly r(ring_);
    for (const auto& [m, c] : terms_) {
        if (m[var] == 0) continue;
        Monomial t = m;
        t[var] -= 1;
        r.add_term(t, c * Rat(long(m[var])));
    }
    return r;
}

Rat MultiPoly::content() const {
    if (terms_.empty()) return Rat(0);
    // gcd of the coefficient numerators over the lcm of their denominators;
    // the gcd can stabilize at 1 but the lcm must fold over every term.
    mpz_class g = 0, l = 1;
    for (const auto& [m, c] : terms_) {
        if (g != 1) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.num().get_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.den().get_mpz_t());
    }
    return Rat(g, l);
}

MultiPoly MultiPoly::divide_scalar(const Rat& c) const {
    if (c.is_zero()) throw MathError("DivisionByZero", "scalar division by zero");
    MultiPoly r(ring_);
    for (const auto& [m, v] : terms_) r.terms_.emplace(m, v / c);
    return r;
}

Monomial MultiPoly::monomial_content() const {
    const size_t nv = ring_->size();
    if (terms_.empty()) return Monomial(nv, 0);
    Monomial mc = terms_.begin()->first;
    for (const auto& [m, c] : terms_)
        for (size_t i = 0; i < nv; ++i) mc[i] = std::min(mc[i], m[i]);
    return mc;
}

MultiPoly MultiPoly::divide_monomial(const Monomial& mm) const {
    MultiPoly r(ring_);
    const size_t nv = ring_->size();
    for (const auto& [m, c] : terms_) {
        Monomial t(nv);
        for (size_t i = 0; i < nv; ++i) {
            if (m[i] < mm[i]) throw MathError("InternalInconsistency", "monomial does not divide polynomial");
            t[i] = m[i] - mm[i];
        }
        r.terms_.emplace(std::move(t), c);
    }
    return r;
}

Rat MultiPoly::eval_rat(const std::vector<Rat>& point) const {
    Rat acc(0);
    for (const auto& [m, c] : terms_) {
        Rat t = c;
        for (size_t i = 0; i < m.size(); ++i)
            if (m[i]) t *= point[i].pow(m[i]);
        acc += t;
    }
    return acc;
}

double MultiPoly::eval_double(const std::vector<double>& point) const {
    double acc = 0.0;
    for (const auto& [m, c] : terms_) {
        double t = c.to_double();
        for (size_t i = 0; i < m.size(); ++i) {
            double b = point[i];
            unsigned e = m[i];
            while (e) {
                if (e & 1) t *= b;
                b *= b;
                e >>= 1;
            }
        }
        acc += t;
    }
    return acc;
}

std::string MultiPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        const bool neg = c.sign() < 0;
        Rat mag = neg ? -c : c;
        if (first) {
            if (neg) out << "-";
            first = false;
        } else {
            out << (neg ? " - " : " + ");
        }
        std::string mono;
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += ring_->name(i);
            if (m[i] > 1) mono += "^" + std::to_string(m[i]);
        }
        if (mono.empty()) {
            out << mag.str();
        } else if (mag.is_one()) {
            out << mono;
        } else {
            out << mag.str() << "*" << mono;
        }
    }
    return out.str();
}

std::optional<MultiPoly> divide_exact(const MultiPoly& a, const MultiPoly& b) {
    check_ring(a, b);
    if (b.is_zero()) throw MathError("DivisionByZero", "polynomial division by zero");
    MultiPoly q(a.ring());
    MultiPoly r = a;
    const auto [lmb, lcb] = b.leading();
    const size_t nv = a.ring()->size();
    GrlexLess less;
    while (!r.is_zero()) {
        const auto [lmr, lcr] = r.leading();
        Monomial t(nv);
        for (size_t i = 0; i < nv; ++i) {
            if (lmr[i] < lmb[i]) return std::nullopt;
            t[i] = lmr[i] - lmb[i];
        }
        Rat tc = lcr / lcb;
        q.add_term(t, tc);
        r.sub_mul_monomial(b, t, tc);
        if (!r.is_zero() && !less(r.leading().first, lmr))
            throw MathError("InternalInconsistency", "division loop failed to reduce");
    }
    return q;
}

namespace {

// --- gcd machinery: recursive univariate view with subresultant PRS ---

MultiPoly must_divide(const MultiPoly& a, const MultiPoly& b) {
    auto q = divide_exact(a, b);
    if (!q) throw MathError("InternalInconsistency", "expected exact polynomial division");
    return *q;
}

// Primitive integer coefficients, positive leading coefficient.
MultiPoly make_canonical(const MultiPoly& p) {
    if (p.is_zero()) return p;
    MultiPoly q = p.divide_scalar(p.content());
    if (q.leading().second.sign() < 0) q = -q;
    return q;
}

// View of p as a univariate polynomial in variable v; coefficient polys keep
// the full ring with v-exponent zero.
std::vector<MultiPoly> coeffs_in(const MultiPoly& p, size_t v) {
    std::vector<MultiPoly> out(p.degree_in(v) + 1, MultiPoly(p.ring()));
    for (const auto& [m, c] : p.terms()) {
        Monomial t = m;
        unsigned e = t[v];
        t[v] = 0;
        out[e].add_term(t, c);
    }
    return out;
}

unsigned deg_in(const MultiPoly& p, size_t v) { return p.degree_in(v); }

MultiPoly lead_coeff_in(const MultiPoly& p, size_t v) {
    unsigned d = p.degree_in(v);
    MultiPoly out(p.ring());
    for (const auto& [m, c] : p.terms()) {
        if (m[v] != d) continue;
        Monomial t = m;
        t[v] = 0;
        out.add_term(t, c);
    }
    return out;
}

MultiPoly var_power(const RingPtr& ring, size_t v, unsigned e) {
    Monomial m(ring->size(), 0);
    m[v] = e;
    return MultiPoly::monomial(ring, m, Rat(1));
}

// prem(A, B, v) = lc_v(B)^(deg A - deg B + 1) * A  mod  B, in v.
MultiPoly pseudo_rem(const MultiPoly& A, const MultiPoly& B, size_t v) {
    MultiPoly R = A;
    const MultiPoly lcB = lead_coeff_in(B, v);
    const unsigned dB = deg_in(B, v);
    int e = int(deg_in(A, v)) - int(dB) + 1;
    while (!R.is_zero() && deg_in(R, v) >= dB) {
        MultiPoly lcR = lead_coeff_in(R, v);
        unsigned s = deg_in(R, v) - dB;
        R = lcB * R - lcR * var_power(R.ring(), v, s) * B;
        --e;
    }
    for (; e > 0; --e) R = lcB * R;
    return R;
}

// Content of p with respect to v: gcd of its v-coefficients.
MultiPoly content_in(const MultiPoly& p, size_t v) {
    MultiPoly g(p.ring());
    for (auto& c : coeffs_in(p, v)) {
        if (c.is_zero()) continue;
        g = poly_gcd(g, c);
        if (g.is_constant()) break;
    }
    return g;
}

// --- heuristic gcd (evaluate / reconstruct / verify) ---
//
// Integer-coefficient primitive inputs.  Evaluates one variable at a large
// integer point, recurses, and lifts the integer/lower-variate gcd back via
// balanced base-xi digits; a candidate is accepted only after exact division
// into both inputs.  Variables are eliminated lowest degree first to keep the
// evaluated coefficients small.  Returns nullopt when the retries or the size
// budget are exhausted; the subresultant PRS below is the fallback.

mpz_class eval_floor_div(const mpz_class& a, const mpz_class& b) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

MultiPoly eval_var_at(const MultiPoly& p, size_t v, const mpz_class& xi) {
    std::vector<mpz_class> pow_cache{1};
    auto xi_pow = [&](unsigned e) -> const mpz_class& {
        while (pow_cache.size() <= e) pow_cache.push_back(pow_cache.back() * xi);
        return pow_cache[e];
    };
    MultiPoly out(p.ring());
    for (const auto& [m, c] : p.terms()) {
        Monomial t = m;
        unsigned e = t[v];
        t[v] = 0;
        out.add_term(t, c * Rat(mpz_class(xi_pow(e)), mpz_class(1)));
    }
    return out;
}

// Balanced residue in (-xi/2, xi/2].
mpz_class balanced_mod(const mpz_class& c, const mpz_class& xi) {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), c.get_mpz_t(), xi.get_mpz_t()); // in [0, xi)
    if (r * 2 > xi) r -= xi;
    return r;
}

mpz_class max_abs_coeff(const MultiPoly& p) {
    mpz_class m = 0;
    for (const auto& [mon, c] : p.terms()) {
        mpz_class a = abs(c.num());
        if (a > m) m = a;
    }
    return m;
}

std::optional<MultiPoly> heugcd(const MultiPoly& a, const MultiPoly& b, int depth) {
    if (depth > 16) return std::nullopt;
    // Variable of smallest positive degree across the pair.
    const size_t nv = a.ring()->size();
    size_t v = nv;
    unsigned best = ~0u;
    for (size_t i = 0; i < nv; ++i) {
        unsigned d = std::max(a.degree_in(i), b.degree_in(i));
        if (d == 0) continue;
        if (d < best) {
            best = d;
            v = i;
        }
    }
    if (v == nv) {
        // Both constant integers.
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), a.constant_value().num().get_mpz_t(), b.constant_value().num().get_mpz_t());
        return MultiPoly::constant(a.ring(), Rat(g, mpz_class(1)));
    }

    mpz_class na = max_abs_coeff(a), nb = max_abs_coeff(b);
    mpz_class xi = 2 * (na < nb ? na : nb) + 2;
    const unsigned deg_bound = std::min(a.degree_in(v), b.degree_in(v));
    for (int tries = 0; tries < 6; ++tries) {
        // Size budget: the evaluated coefficients reach roughly
        // deg * bits(xi); give up before they become unmanageable.
        if (mpz_sizeinbase(xi.get_mpz_t(), 2) * (std::max(a.degree_in(v), b.degree_in(v)) + 1) > 4000000)
            return std::nullopt;
        MultiPoly ea = eval_var_at(a, v, xi);
        MultiPoly eb = eval_var_at(b, v, xi);
        if (!ea.is_zero() && !eb.is_zero()) {
            auto sub = heugcd(ea, eb, depth + 1);
            if (sub) {
                // Lift: balanced base-xi digits of every coefficient.
                MultiPoly g = *sub;
                MultiPoly cand(a.ring());
                bool ok = true;
                for (unsigned i = 0; !g.is_zero(); ++i) {
                    if (i > deg_bound) {
                        ok = false;
                        break;
                    }
                    MultiPoly digit(a.ring());
                    for (const auto& [m, c] : g.terms()) {
                        mpz_class d = balanced_mod(c.num(), xi);
                        if (d != 0) {
                            Monomial t = m;
                            digit.add_term(t, Rat(d, mpz_class(1)));
                        }
                    }
                    if (!digit.is_zero()) {
                        MultiPoly shifted(a.ring());
                        for (const auto& [m, c] : digit.terms()) {
                            Monomial t = m;
                            t[v] += i;
                            shifted.add_term(t, c);
                        }
                        cand = cand + shifted;
                    }
                    MultiPoly next(a.ring());
                    for (const auto& [m, c] : g.terms()) {
                        mpz_class d = balanced_mod(c.num(), xi);
                        mpz_class q = (c.num() - d) / xi;
                        if (q != 0) next.add_term(m, Rat(q, mpz_class(1)));
                    }
                    g = std::move(next);
                }
                if (ok && !cand.is_zero()) {
                    cand = cand.divide_scalar(cand.content());
                    if (divide_exact(a, cand) && divide_exact(b, cand)) return cand;
                }
            }
        }
        xi = eval_floor_div(xi * 73794, mpz_class(27011));
    }
    return std::nullopt;
}

MultiPoly gcd_impl(MultiPoly a, MultiPoly b) {
    const RingPtr ring = a.ring();
    if (a.is_zero()) return make_canonical(b);
    if (b.is_zero()) return make_canonical(a);

    // Monomial-content pre-pass.
    Monomial ma = a.monomial_content();
    Monomial mb = b.monomial_content();
    const size_t nv = ring->size();
    Monomial common(nv);
    for (size_t i = 0; i < nv; ++i) common[i] = std::min(ma[i], mb[i]);
    a = a.divide_monomial(ma);
    b = b.divide_monomial(mb);
    MultiPoly common_poly = MultiPoly::monomial(ring, common, Rat(1));

    if (a.is_constant() || b.is_constant()) return common_poly;
    if (a == b || a == -b) return make_canonical(a) * common_poly;

    // Cheap divisibility shortcuts.
    if (a.term_count() >= b.term_count()) {
        if (divide_exact(a, b)) return make_canonical(b) * common_poly;
    } else {
        if (divide_exact(b, a)) return make_canonical(a) * common_poly;
    }

    // Heuristic gcd on the integer-primitive parts; almost always succeeds.
    {
        MultiPoly pa = a.divide_scalar(a.content());
        MultiPoly pb = b.divide_scalar(b.content());
        auto h = heugcd(pa, pb, 0);
        if (h) return make_canonical(*h) * common_poly;
    }

    // Pick the main variable: one present in both, with the smallest
    // min-degree to keep the remainder sequence short.
    size_t v = nv;
    unsigned best = ~0u;
    for (size_t i = 0; i < nv; ++i) {
        unsigned da = a.degree_in(i), db = b.degree_in(i);
        if (da == 0 || db == 0) continue;
        unsigned key = std::min(da, db);
        if (key < best) {
            best = key;
            v = i;
        }
    }
    if (v == nv) {
        // No shared variable: contents in disjoint variables, gcd over Q is 1.
        return common_poly;
    }

    MultiPoly contA = content_in(a, v);
    MultiPoly contB = content_in(b, v);
    MultiPoly ppA = must_divide(a, contA);
    MultiPoly ppB = must_divide(b, contB);
    MultiPoly contG = poly_gcd(contA, contB);

    if (deg_in(ppA, v) < deg_in(ppB, v)) std::swap(ppA, ppB);

    // Subresultant PRS.
    MultiPoly A = ppA, B = ppB;
    MultiPoly g = MultiPoly::constant(ring, Rat(1));
    MultiPoly h = g;
    MultiPoly result_v(ring);
    while (true) {
        g_prs_iters.fetch_add(1, std::memory_order_relaxed);
        unsigned delta = deg_in(A, v) - deg_in(B, v);
        MultiPoly R = pseudo_rem(A, B, v);
        if (R.is_zero()) {
            result_v = must_divide(B, content_in(B, v));
            break;
        }
        if (deg_in(R, v) == 0) {
            result_v = MultiPoly::constant(ring, Rat(1));
            break;
        }
        A = B;
        B = must_divide(R, g * h.pow(delta));
        g = lead_coeff_in(A, v);
        h = (delta == 0) ? h : must_divide(g.pow(delta), h.pow(delta - 1));
    }

    return make_canonical(contG * result_v) * common_poly;
}

} // namespace

MultiPoly poly_gcd(const MultiPoly& a, const MultiPoly& b) {
    check_ring(a, b);
    g_gcd_calls.fetch_add(1, std::memory_order_relaxed);
    DegreeGuardSuspend suspend;
    return gcd_impl(a, b);
}

PolyStats poly_stats() {
    return PolyStats{g_gcd_calls.load(), g_prs_iters.load(), g_mul_calls.load(), g_mul_terms.load()};
}

void reset_poly_stats() {
    g_gcd_calls = 0;
    g_prs_iters = 0;
    g_mul_calls = 0;
    g_mul_terms = 0;
}

} // namespace slowmani
