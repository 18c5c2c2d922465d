#pragma once

#include "slowmani/problem.hpp"
#include "slowmani/series.hpp"

namespace slowmani {

// A single level of the parametrisation method, decoupled from the problem
// file: the top-level problem and every reframed cascade level take this
// shape.  The F terms live over state_ring; phi0, N0 and all computed series
// live over chart_ring.  Parameter indices are aligned across the two rings.
struct LevelProblem {
    RingPtr state_ring;
    RingPtr chart_ring;
    std::vector<size_t> state_idx;
    std::vector<size_t> chart_idx;
    std::vector<size_t> param_state_idx;
    std::vector<size_t> param_chart_idx;
    std::vector<RatMat> f_terms;
    RatMat phi0;
    RatMat n0_frame;
    Ansatz ansatz = Ansatz::ZeroX;
    std::vector<size_t> graph_indices;

    size_t n() const { return state_idx.size(); }
    size_t k() const { return chart_idx.size(); }
};

LevelProblem level0_problem(const ProblemSpec& spec);

// Substitution images realizing x = phi0(xi): state variables map to the
// embedding components, parameters map to themselves in the chart ring.
std::vector<RatFunc> embedding_images(const LevelProblem& lp);

// Orthogonal projection onto ker N^T:  1 - N (N^T N)^{-1} N^T.
RatMat projector_pi(const RatMat& n);

// Projection onto im M along im N:  M (M^T pi(N) M)^{-1} M^T pi(N).
RatMat projector_oblique(const RatMat& m, const RatMat& n);

// The frozen zeroth-order data of one level: embedding tangent frame, fibre
// frame, oblique projector, fibre dynamics and the two left inverses.
struct Frame {
    RatMat dphi0;          // n x k
    RatMat n0_frame;       // n x (n-k)
    RatMat p0;             // n x n
    RatMat n0_dyn;         // (n-k) x (n-k)
    RatMat n0_dyn_inv;     // (n-k) x (n-k)
    RatMat left_inv_dphi0; // k x n
    RatMat left_inv_n0;    // (n-k) x n
    RatMat df0_phi0;       // n x n

    size_t n() const { return dphi0.rows(); }
    size_t k() const { return dphi0.cols(); }
};

// Builds the frame and certifies it symbolically: F0 vanishes along the
// embedding (else NotCriticalManifold) and DF0(phi0) N0 = N0 n0 (else
// FrameNotInvariant).  Rank failures surface as SingularMatrix.
Frame compute_frame(const LevelProblem& lp);

} // namespace slowmani
