#pragma once

#include <vector>

#include "slowmani/ratfunc.hpp"

namespace slowmani {

// Dense matrix of rational functions, row-major.
class RatMat {
public:
    RatMat() = default;
    RatMat(RingPtr ring, size_t rows, size_t cols)
        : ring_(std::move(ring)), rows_(rows), cols_(cols), e_(rows * cols, RatFunc::zero(ring_)) {}

    static RatMat identity(RingPtr ring, size_t n);
    static RatMat column(std::vector<RatFunc> entries);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    const RingPtr& ring() const { return ring_; }

    RatFunc& at(size_t i, size_t j) { return e_[i * cols_ + j]; }
    const RatFunc& at(size_t i, size_t j) const { return e_[i * cols_ + j]; }

    bool is_zero() const;

    RatMat operator-() const;
    friend RatMat operator+(const RatMat& a, const RatMat& b);
    friend RatMat operator-(const RatMat& a, const RatMat& b);
    friend RatMat operator*(const RatMat& a, const RatMat& b);
    friend bool operator==(const RatMat& a, const RatMat& b);
    friend bool operator!=(const RatMat& a, const RatMat& b) { return !(a == b); }

    RatMat mul_scalar(const RatFunc& s) const;
    RatMat transpose() const;

    // Entry-wise derivative.
    RatMat diff(size_t var) const;

    std::string str() const;

private:
    RingPtr ring_;
    size_t rows_ = 0, cols_ = 0;
    std::vector<RatFunc> e_;
};

RatFunc determinant(const RatMat& a);

// Exact inverse over the rational-function field: adjugate for n <= 3,
// fraction-free Bareiss elimination with field back-substitution above.
// Identically singular input raises SingularMatrix.
RatMat mat_inverse(const RatMat& a);

// (A^T A)^{-1} A^T; requires full column rank.
RatMat left_pseudo_inverse(const RatMat& a);

// Jacobian of a column vector with respect to the given ring variables.
RatMat jacobian(const RatMat& column_vec, const std::vector<size_t>& vars);

// Substitutes images (per ring variable of m's ring) into every entry.
RatMat subst(const RatMat& m, const std::vector<RatFunc>& images);

} // namespace slowmani
