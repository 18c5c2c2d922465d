#include "slowmani/series.hpp"

#include <map>

namespace slowmani {

EpsSeries::EpsSeries(std::vector<RatMat> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw MathError("ShapeMismatch", "series needs at least the eps^0 coefficient");
    for (const auto& m : c_)
        if (m.rows() != c_.front().rows() || m.cols() != c_.front().cols())
            throw MathError("ShapeMismatch", "series coefficients have mixed shapes");
}

EpsSeries EpsSeries::zero(RingPtr ring, size_t rows, size_t cols, unsigned order) {
    return EpsSeries(std::vector<RatMat>(order + 1, RatMat(std::move(ring), rows, cols)));
}

EpsSeries EpsSeries::from_constant(const RatMat& m, unsigned order) {
    std::vector<RatMat> c(order + 1, RatMat(m.ring(), m.rows(), m.cols()));
    c[0] = m;
    return EpsSeries(std::move(c));
}

void EpsSeries::append(RatMat m) {
    if (m.rows() != rows() || m.cols() != cols())
        throw MathError("ShapeMismatch", "appended coefficient has a different shape");
    c_.push_back(std::move(m));
}

EpsSeries EpsSeries::pad(unsigned order) const {
    std::vector<RatMat> c = c_;
    while (c.size() < order + 1) c.emplace_back(ring(), rows(), cols());
    return EpsSeries(std::move(c));
}

EpsSeries EpsSeries::truncate(unsigned order) const {
    std::vector<RatMat> c(c_.begin(), c_.begin() + std::min<size_t>(order + 1, c_.size()));
    while (c.size() < order + 1) c.emplace_back(ring(), rows(), cols());
    return EpsSeries(std::move(c));
}

EpsSeries EpsSeries::operator-() const {
    std::vector<RatMat> c;
    c.reserve(c_.size());
    for (const auto& m : c_) c.push_back(-m);
    return EpsSeries(std::move(c));
}

EpsSeries operator+(const EpsSeries& a, const EpsSeries& b) {
    unsigned m = std::min(a.order(), b.order());
    std::vector<RatMat> c;
    c.reserve(m + 1);
    for (unsigned i = 0; i <= m; ++i) c.push_back(a.coeff(i) + b.coeff(i));
    return EpsSeries(std::move(c));
}

EpsSeries operator-(const EpsSeries& a, const EpsSeries& b) {
    unsigned m = std::min(a.order(), b.order());
    std::vector<RatMat> c;
    c.reserve(m + 1);
    for (unsigned i = 0; i <= m; ++i) c.push_back(a.coeff(i) - b.coeff(i));
    return EpsSeries(std::move(c));
}

EpsSeries operator*(const EpsSeries& a, const EpsSeries& b) {
    if (a.cols() != b.rows())
        throw MathError("ShapeMismatch", "series product shapes are incompatible");
    unsigned m = std::min(a.order(), b.order());
    std::vector<RatMat> c;
    c.reserve(m + 1);
    for (unsigned i = 0; i <= m; ++i) {
        RatMat acc(a.ring(), a.rows(), b.cols());
        for (unsigned j = 0; j <= i; ++j) acc = acc + a.coeff(j) * b.coeff(i - j);
        c.push_back(std::move(acc));
    }
    return EpsSeries(std::move(c));
}

bool operator==(const EpsSeries& a, const EpsSeries& b) { return a.c_ == b.c_; }

EpsSeries EpsSeries::shift_up(unsigned j) const {
    std::vector<RatMat> c(j, RatMat(ring(), rows(), cols()));
    c.insert(c.end(), c_.begin(), c_.end());
    return EpsSeries(std::move(c));
}

EpsSeries EpsSeries::shift_down(unsigned j) const {
    for (unsigned i = 0; i < j && i < c_.size(); ++i)
        if (!c_[i].is_zero())
            throw MathError("InternalInconsistency", "shift_down would discard a nonzero coefficient");
    if (j >= c_.size()) throw MathError("ShapeMismatch", "shift exceeds series order");
    return EpsSeries(std::vector<RatMat>(c_.begin() + j, c_.end()));
}

EpsSeries EpsSeries::reciprocal() const {
    if (rows() != 1 || cols() != 1)
        throw MathError("ShapeMismatch", "series reciprocal is defined for scalar series");
    const RatFunc& b0 = c_[0].at(0, 0);
    if (b0.is_zero())
        throw MathError("SeriesDivisionByZero", "leading series coefficient is identically zero");
    RatFunc inv0 = b0.inverse();
    std::vector<RatFunc> out{inv0};
    for (unsigned i = 1; i <= order(); ++i) {
        RatFunc acc = RatFunc::zero(ring());
        for (unsigned j = 0; j < i; ++j) acc = acc + out[j] * c_[i - j].at(0, 0);
        out.push_back(-(acc * inv0));
    }
    std::vector<RatMat> c;
    for (auto& f : out) {
        RatMat m(ring(), 1, 1);
        m.at(0, 0) = std::move(f);
        c.push_back(std::move(m));
    }
    return EpsSeries(std::move(c));
}

bool EpsSeries::is_zero() const {
    for (const auto& m : c_)
        if (!m.is_zero()) return false;
    return true;
}

unsigned EpsSeries::first_nonzero() const {
    for (unsigned i = 0; i < c_.size(); ++i)
        if (!c_[i].is_zero()) return i;
    return order() + 1;
}

EpsSeries EpsSeries::diff(size_t var) const {
    std::vector<RatMat> c;
    c.reserve(c_.size());
    for (const auto& m : c_) c.push_back(m.diff(var));
    return EpsSeries(std::move(c));
}

namespace {

EpsSeries scalar_const(const RingPtr& ring, const Rat& v, unsigned order) {
    RatMat m(ring, 1, 1);
    m.at(0, 0) = RatFunc::constant(ring, v);
    return EpsSeries::from_constant(m, order);
}

EpsSeries compose_poly(const MultiPoly& p, const std::vector<EpsSeries>& images, const RingPtr& target,
                       unsigned order) {
    std::map<std::pair<size_t, unsigned>, EpsSeries> cache;
    std::function<const EpsSeries&(size_t, unsigned)> power = [&](size_t v, unsigned e) -> const EpsSeries& {
        auto key = std::make_pair(v, e);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        EpsSeries val = (e == 1) ? images[v].pad(order).truncate(order)
                                 : power(v, e - 1) * images[v].pad(order).truncate(order);
        return cache.emplace(key, std::move(val)).first->second;
    };
    EpsSeries acc = EpsSeries::zero(target, 1, 1, order);
    for (const auto& [m, coeff] : p.terms()) {
        EpsSeries t = scalar_const(target, coeff, order);
        for (size_t v = 0; v < m.size(); ++v)
            if (m[v]) t = t * power(v, m[v]);
        acc = acc + t;
    }
    return acc;
}

} // namespace

EpsSeries compose_series(const RatFunc& f, const std::vector<EpsSeries>& images, unsigned order) {
    if (images.size() != f.ring()->size())
        throw MathError("ShapeMismatch", "composition image count does not match ring size");
    for (const auto& s : images)
        if (s.rows() != 1 || s.cols() != 1)
            throw MathError("ShapeMismatch", "composition images must be scalar series");
    RingPtr target = images.empty() ? f.ring() : images.front().ring();
    EpsSeries n = compose_poly(f.num(), images, target, order);
    if (f.is_poly()) return n;
    EpsSeries d = compose_poly(f.den(), images, target, order);
    return n * d.reciprocal();
}

EpsSeries directional_derivative(const EpsSeries& m, const EpsSeries& r,
                                 const std::vector<size_t>& chart_vars) {
    if (r.cols() != 1 || r.rows() != chart_vars.size())
        throw MathError("ShapeMismatch", "directional derivative needs one direction entry per chart variable");
    unsigned ord = std::min(m.order(), r.order());
    std::vector<RatMat> out;
    out.reserve(ord + 1);
    for (unsigned i = 0; i <= ord; ++i) {
        RatMat acc(m.ring(), m.rows(), m.cols());
        for (unsigned a = 0; a <= i; ++a) {
            const unsigned b = i - a;
            for (size_t j = 0; j < chart_vars.size(); ++j)
                acc = acc + m.coeff(a).diff(chart_vars[j]).mul_scalar(r.coeff(b).at(j, 0));
        }
        out.push_back(std::move(acc));
    }
    return EpsSeries(std::move(out));
}

} // namespace slowmani
