#pragma once

#include "slowmani/matrix.hpp"

namespace slowmani {

// Truncated power series in eps with matrix coefficients, all of one shape.
// coeff(i) is the coefficient of eps^i; order() is the truncation degree.
class EpsSeries {
public:
    EpsSeries() = default;
    explicit EpsSeries(std::vector<RatMat> coeffs);

    static EpsSeries zero(RingPtr ring, size_t rows, size_t cols, unsigned order);
    // m + 0*eps + ... + 0*eps^order
    static EpsSeries from_constant(const RatMat& m, unsigned order);

    unsigned order() const { return unsigned(c_.size()) - 1; }
    size_t rows() const { return c_.front().rows(); }
    size_t cols() const { return c_.front().cols(); }
    const RingPtr& ring() const { return c_.front().ring(); }

    const RatMat& coeff(unsigned i) const { return c_.at(i); }
    const std::vector<RatMat>& coeffs() const { return c_; }

    void append(RatMat m);

    EpsSeries pad(unsigned order) const;      // extend with zeros
    EpsSeries truncate(unsigned order) const; // drop high coefficients

    EpsSeries operator-() const;
    friend EpsSeries operator+(const EpsSeries& a, const EpsSeries& b);
    friend EpsSeries operator-(const EpsSeries& a, const EpsSeries& b);
    // Cauchy product with matrix-valued coefficients; truncates to the
    // smaller operand order.
    friend EpsSeries operator*(const EpsSeries& a, const EpsSeries& b);
    friend bool operator==(const EpsSeries& a, const EpsSeries& b);
    friend bool operator!=(const EpsSeries& a, const EpsSeries& b) { return !(a == b); }

    // Multiply by eps^j: coefficients move up, order grows by j.
    EpsSeries shift_up(unsigned j) const;
    // Divide by eps^j; the dropped low coefficients must be zero.
    EpsSeries shift_down(unsigned j) const;

    // Reciprocal of a scalar (1x1) series; leading coefficient must not be
    // the zero rational function.
    EpsSeries reciprocal() const;

    bool is_zero() const;
    // Smallest i with nonzero coeff(i); order()+1 when the series is zero.
    unsigned first_nonzero() const;

    // Entry-wise derivative of every coefficient.
    EpsSeries diff(size_t var) const;

private:
    std::vector<RatMat> c_;
};

// Truncated series of f(phi_1(eps), ..., phi_m(eps)) where images[v] is a
// scalar series substituted for ring variable v of f.  Numerator and
// denominator are composed separately and divided as series.
EpsSeries compose_series(const RatFunc& f, const std::vector<EpsSeries>& images, unsigned order);

// Directional derivative sum_j dM/dxi_j * r_j as a series; M is a matrix
// series over the chart ring, r a column series with one row per chart var.
EpsSeries directional_derivative(const EpsSeries& m, const EpsSeries& r, const std::vector<size_t>& chart_vars);

} // namespace slowmani
