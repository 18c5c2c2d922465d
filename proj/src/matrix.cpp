#include "slowmani/matrix.hpp"

#include <sstream>

namespace slowmani {

namespace {
void check_same_shape(const RatMat& a, const RatMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw MathError("ShapeMismatch", "matrix shapes differ: " + std::to_string(a.rows()) + "x" +
                                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                             "x" + std::to_string(b.cols()));
}
} // namespace

RatMat RatMat::identity(RingPtr ring, size_t n) {
    RatMat m(std::move(ring), n, n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = RatFunc::one(m.ring());
    return m;
}

RatMat RatMat::column(std::vector<RatFunc> entries) {
    RatMat m(entries.front().ring(), entries.size(), 1);
    for (size_t i = 0; i < entries.size(); ++i) m.at(i, 0) = std::move(entries[i]);
    return m;
}

bool RatMat::is_zero() const {
    for (const auto& x : e_)
        if (!x.is_zero()) return false;
    return true;
}

RatMat RatMat::operator-() const {
    RatMat r = *this;
    for (auto& x : r.e_) x = -x;
    return r;
}

RatMat operator+(const RatMat& a, const RatMat& b) {
    check_same_shape(a, b);
    RatMat r = a;
    for (size_t i = 0; i < r.e_.size(); ++i) r.e_[i] = r.e_[i] + b.e_[i];
    return r;
}

RatMat operator-(const RatMat& a, const RatMat& b) {
    check_same_shape(a, b);
    RatMat r = a;
    for (size_t i = 0; i < r.e_.size(); ++i) r.e_[i] = r.e_[i] - b.e_[i];
    return r;
}

RatMat operator*(const RatMat& a, const RatMat& b) {
    if (a.cols() != b.rows())
        throw MathError("ShapeMismatch", "matrix product " + std::to_string(a.rows()) + "x" +
                                             std::to_string(a.cols()) + " * " + std::to_string(b.rows()) +
                                             "x" + std::to_string(b.cols()));
    RatMat r(a.ring(), a.rows(), b.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < b.cols(); ++j) {
            RatFunc acc = RatFunc::zero(a.ring());
            for (size_t k = 0; k < a.cols(); ++k) acc = acc + a.at(i, k) * b.at(k, j);
            r.at(i, j) = std::move(acc);
        }
    return r;
}

bool operator==(const RatMat& a, const RatMat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
}

RatMat RatMat::mul_scalar(const RatFunc& s) const {
    RatMat r = *this;
    for (auto& x : r.e_) x = x * s;
    return r;
}

RatMat RatMat::transpose() const {
    RatMat r(ring_, cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

RatMat RatMat::diff(size_t var) const {
    RatMat r(ring_, rows_, cols_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j).diff(var);
    return r;
}

std::string RatMat::str() const {
    std::ostringstream out;
    out << "[";
    for (size_t i = 0; i < rows_; ++i) {
        if (i) out << ", ";
        out << "[";
        for (size_t j = 0; j < cols_; ++j) {
            if (j) out << ", ";
            out << at(i, j).str();
        }
        out << "]";
    }
    out << "]";
    return out.str();
}

RatFunc determinant(const RatMat& a) {
    if (a.rows() != a.cols()) throw MathError("ShapeMismatch", "determinant of non-square matrix");
    const size_t n = a.rows();
    const RingPtr& ring = a.ring();
    if (n == 0) return RatFunc::one(ring);
    if (n == 1) return a.at(0, 0);
    if (n == 2) return a.at(0, 0) * a.at(1, 1) - a.at(0, 1) * a.at(1, 0);
    if (n == 3)
        return a.at(0, 0) * (a.at(1, 1) * a.at(2, 2) - a.at(1, 2) * a.at(2, 1)) -
               a.at(0, 1) * (a.at(1, 0) * a.at(2, 2) - a.at(1, 2) * a.at(2, 0)) +
               a.at(0, 2) * (a.at(1, 0) * a.at(2, 1) - a.at(1, 1) * a.at(2, 0));
    // Fraction-free Bareiss on the denominator-cleared matrix.
    std::vector<std::vector<MultiPoly>> b(n, std::vector<MultiPoly>(n));
    RatFunc scale = RatFunc::one(ring);
    for (size_t i = 0; i < n; ++i) {
        MultiPoly d = MultiPoly::constant(ring, Rat(1));
        for (size_t j = 0; j < n; ++j) d = d * a.at(i, j).den();
        for (size_t j = 0; j < n; ++j) b[i][j] = a.at(i, j).num() * (*divide_exact(d, a.at(i, j).den()));
        scale = scale * RatFunc(MultiPoly::constant(ring, Rat(1)), d);
    }
    DegreeGuardSuspend suspend;
    int sign = 1;
    MultiPoly prev = MultiPoly::constant(ring, Rat(1));
    for (size_t k = 0; k + 1 < n; ++k) {
        if (b[k][k].is_zero()) {
            size_t p = k + 1;
            while (p < n && b[p][k].is_zero()) ++p;
            if (p == n) return RatFunc::zero(ring);
            std::swap(b[k], b[p]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j) {
                MultiPoly t = b[k][k] * b[i][j] - b[i][k] * b[k][j];
                auto q = divide_exact(t, prev);
                if (!q) throw MathError("InternalInconsistency", "Bareiss division failed");
                b[i][j] = std::move(*q);
            }
            b[i][k] = MultiPoly(ring);
        }
        prev = b[k][k];
    }
    RatFunc det = RatFunc::from_poly(b[n - 1][n - 1]) * scale;
    return sign < 0 ? -det : det;
}

namespace {

RatMat inverse_small(const RatMat& a) {
    const size_t n = a.rows();
    const RingPtr& ring = a.ring();
    RatFunc det = determinant(a);
    if (det.is_zero()) throw MathError("SingularMatrix", "matrix determinant is identically zero");
    RatFunc idet = det.inverse();
    RatMat r(ring, n, n);
    if (n == 1) {
        r.at(0, 0) = idet;
        return r;
    }
    if (n == 2) {
        r.at(0, 0) = a.at(1, 1) * idet;
        r.at(0, 1) = -a.at(0, 1) * idet;
        r.at(1, 0) = -a.at(1, 0) * idet;
        r.at(1, 1) = a.at(0, 0) * idet;
        return r;
    }
    // adjugate via 2x2 cofactors
    for (size_t i = 0; i < 3; ++i)
        for (size_t j = 0; j < 3; ++j) {
            size_t r0 = (i + 1) % 3, r1 = (i + 2) % 3;
            size_t c0 = (j + 1) % 3, c1 = (j + 2) % 3;
            // cofactor C_ij placed transposed
            r.at(j, i) = (a.at(r0, c0) * a.at(r1, c1) - a.at(r0, c1) * a.at(r1, c0)) * idet;
        }
    return r;
}

// Fraction-free Bareiss forward elimination on [B | D], then field
// back-substitution.  A = D^{-1} B with D the per-row common denominators.
RatMat inverse_bareiss(const RatMat& a) {
    const size_t n = a.rows();
    const RingPtr& ring = a.ring();
    std::vector<std::vector<MultiPoly>> m(n, std::vector<MultiPoly>(2 * n, MultiPoly(ring)));
    for (size_t i = 0; i < n; ++i) {
        MultiPoly d = MultiPoly::constant(ring, Rat(1));
        for (size_t j = 0; j < n; ++j) d = d * a.at(i, j).den();
        for (size_t j = 0; j < n; ++j) m[i][j] = a.at(i, j).num() * (*divide_exact(d, a.at(i, j).den()));
        m[i][n + i] = d;
    }
    DegreeGuardSuspend suspend;
    MultiPoly prev = MultiPoly::constant(ring, Rat(1));
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k].is_zero()) {
            size_t p = k + 1;
            while (p < n && m[p][k].is_zero()) ++p;
            if (p == n) throw MathError("SingularMatrix", "matrix is singular");
            std::swap(m[k], m[p]);
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < 2 * n; ++j) {
                MultiPoly t = m[k][k] * m[i][j] - m[i][k] * m[k][j];
                auto q = divide_exact(t, prev);
                if (!q) throw MathError("InternalInconsistency", "Bareiss division failed");
                m[i][j] = std::move(*q);
            }
            m[i][k] = MultiPoly(ring);
        }
        prev = m[k][k];
    }
    if (m[n - 1][n - 1].is_zero()) throw MathError("SingularMatrix", "matrix is singular");
    // back-substitution over the field
    RatMat x(ring, n, n);
    for (size_t col = 0; col < n; ++col) {
        for (size_t ii = n; ii-- > 0;) {
            RatFunc acc = RatFunc::from_poly(m[ii][n + col]);
            for (size_t j = ii + 1; j < n; ++j) acc = acc - RatFunc::from_poly(m[ii][j]) * x.at(j, col);
            x.at(ii, col) = acc / RatFunc::from_poly(m[ii][ii]);
        }
    }
    return x;
}

} // namespace

RatMat mat_inverse(const RatMat& a) {
    if (a.rows() != a.cols()) throw MathError("ShapeMismatch", "inverse of non-square matrix");
    if (a.rows() <= 3) return inverse_small(a);
    return inverse_bareiss(a);
}

RatMat left_pseudo_inverse(const RatMat& a) {
    RatMat at = a.transpose();
    RatMat gram = at * a;
    RatMat ginv;
    try {
        ginv = mat_inverse(gram);
    } catch (const MathError& e) {
        if (e.kind() == "SingularMatrix")
            throw MathError("SingularMatrix", "matrix does not have full column rank");
        throw;
    }
    return ginv * at;
}

RatMat jacobian(const RatMat& column_vec, const std::vector<size_t>& vars) {
    if (column_vec.cols() != 1) throw MathError("ShapeMismatch", "jacobian expects a column vector");
    RatMat j(column_vec.ring(), column_vec.rows(), vars.size());
    for (size_t i = 0; i < column_vec.rows(); ++i)
        for (size_t v = 0; v < vars.size(); ++v) j.at(i, v) = column_vec.at(i, 0).diff(vars[v]);
    return j;
}

RatMat subst(const RatMat& m, const std::vector<RatFunc>& images) {
    RingPtr target = images.empty() ? m.ring() : images.front().ring();
    RatMat r(target, m.rows(), m.cols());
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) r.at(i, j) = subst(m.at(i, j), images);
    return r;
}

} // namespace slowmani
