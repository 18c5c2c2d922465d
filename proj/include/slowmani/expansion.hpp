#pragma once

#include "slowmani/frame.hpp"

namespace slowmani {

// Truncated eps-series of F(phi(xi,eps), eps) over the chart ring.
EpsSeries f_series(const LevelProblem& lp, const EpsSeries& phi, unsigned order);

// Truncated eps-series of the Jacobian DF(phi(xi,eps), eps), an n x n series.
EpsSeries df_series(const LevelProblem& lp, const EpsSeries& phi, unsigned order);

// D phi(xi,eps) * r(xi,eps) - F(phi(xi,eps), eps) to the given order.
EpsSeries conjugacy_residual_series(const LevelProblem& lp, const EpsSeries& phi, const EpsSeries& r,
                                    unsigned order);

// N n + dN.r - DF(phi,eps) N to the given order.
EpsSeries variational_residual_series(const LevelProblem& lp, const EpsSeries& phi, const EpsSeries& r,
                                      const EpsSeries& n_frame, const EpsSeries& n_dyn, unsigned order);

struct ConjugacySolution {
    RatMat r_i;   // k x 1
    RatMat y_i;   // (n-k) x 1
    RatMat x_i;   // k x 1
    RatMat phi_i; // n x 1
};

// Solves  Dphi0 r_i - DF0(phi0) phi_i = G_i  under phi_i = Dphi0 X_i + N0 Y_i.
ConjugacySolution solve_conjugacy_order(const Frame& fr, const RatMat& g_i, Ansatz ansatz,
                                        const std::vector<size_t>& graph_indices);

struct VariationalSolution {
    RatMat l_i;      // k x (n-k)
    RatMat n_i;      // (n-k) x (n-k)
    RatMat nframe_i; // n x (n-k)
};

// Solves  N_i n0 + N0 n_i - DF0(phi0) N_i = H_i  under N_i = N0 M_i + Dphi0 L_i.
VariationalSolution solve_variational_order(const Frame& fr, const RatMat& h_i, const RatMat& m_i);

struct SlowExpansion {
    unsigned order = 0;
    Frame frame;
    EpsSeries phi; // n x 1, eps^0 = phi0
    EpsSeries r;   // k x 1, eps^0 = 0
    EpsSeries y;   // (n-k) x 1, eps^0 = 0
    EpsSeries x;   // k x 1, eps^0 = 0
    std::vector<RatMat> g; // inhomogeneities; g[0] is unused (zero)
};

// Order-by-order solution of the conjugacy equation.  G_i is recovered as the
// eps^i coefficient of F(phi_(i-1), eps) - Dphi_(i-1) r_(i-1); the final
// residual is asserted to vanish through the requested order.
SlowExpansion expand_slow_manifold(const LevelProblem& lp, unsigned order);

struct FibreExpansion {
    unsigned order = 0;
    EpsSeries n_frame;  // n x (n-k), eps^0 = N0
    EpsSeries n_dyn;    // (n-k) x (n-k), eps^0 = n0
    EpsSeries l;        // k x (n-k), eps^0 = 0
    EpsSeries m_choice; // (n-k) x (n-k), all zero (M_i = 0)
    std::vector<RatMat> h; // inhomogeneities; h[0] unused
};

// Companion expansion of the linear fast fibre bundle along the computed slow
// manifold; requires slow.order >= order.
FibreExpansion expand_fibre_bundle(const LevelProblem& lp, const SlowExpansion& slow, unsigned order);

} // namespace slowmani
