#include "slowmani/frame.hpp"

namespace slowmani {

LevelProblem level0_problem(const ProblemSpec& spec) {
    LevelProblem lp;
    lp.state_ring = spec.state_ring;
    lp.chart_ring = spec.chart_ring;
    lp.state_idx = spec.state_var_indices();
    lp.chart_idx = spec.chart_var_indices();
    lp.param_state_idx = spec.param_indices();
    for (const auto& p : spec.params) lp.param_chart_idx.push_back(spec.chart_ring->index_of(p));
    lp.f_terms = spec.f_terms;
    lp.phi0 = spec.phi0;
    lp.n0_frame = spec.n0_frame;
    lp.ansatz = spec.ansatz;
    lp.graph_indices = spec.graph_indices;
    return lp;
}

std::vector<RatFunc> embedding_images(const LevelProblem& lp) {
    std::vector<RatFunc> images(lp.state_ring->size(), RatFunc::zero(lp.chart_ring));
    for (size_t j = 0; j < lp.param_state_idx.size(); ++j)
        images[lp.param_state_idx[j]] = RatFunc::variable(lp.chart_ring, lp.param_chart_idx[j]);
    for (size_t j = 0; j < lp.state_idx.size(); ++j) images[lp.state_idx[j]] = lp.phi0.at(j, 0);
    return images;
}

RatMat projector_pi(const RatMat& n) {
    RatMat nt = n.transpose();
    RatMat gram_inv;
    try {
        gram_inv = mat_inverse(nt * n);
    } catch (const MathError& e) {
        if (e.kind() == "SingularMatrix")
            throw MathError("SingularMatrix", "frame does not have full column rank");
        throw;
    }
    return RatMat::identity(n.ring(), n.rows()) - n * gram_inv * nt;
}

RatMat projector_oblique(const RatMat& m, const RatMat& n) {
    if (m.rows() != n.rows()) throw MathError("ShapeMismatch", "projector factors have different heights");
    RatMat pi = projector_pi(n);
    RatMat mt = m.transpose();
    RatMat core;
    try {
        core = mat_inverse(mt * pi * m);
    } catch (const MathError& e) {
        if (e.kind() == "SingularMatrix")
            throw MathError("SingularMatrix", "images of the tangent and fibre frames are not transverse");
        throw;
    }
    return m * core * mt * pi;
}

Frame compute_frame(const LevelProblem& lp) {
    const size_t n = lp.n(), k = lp.k();
    if (lp.f_terms.empty() || lp.f_terms[0].rows() != n)
        throw MathError("ShapeMismatch", "leading vector field term has the wrong dimension");

    Frame fr;
    fr.dphi0 = jacobian(lp.phi0, lp.chart_idx);
    fr.n0_frame = lp.n0_frame;

    const auto images = embedding_images(lp);
    RatMat f0_on_manifold = subst(lp.f_terms[0], images);
    if (!f0_on_manifold.is_zero())
        throw MathError("NotCriticalManifold",
                        "F0 does not vanish along the embedding: F0(phi0) = " + f0_on_manifold.str());

    RatMat df0 = RatMat(lp.state_ring, n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) df0.at(i, j) = lp.f_terms[0].at(i, 0).diff(lp.state_idx[j]);
    fr.df0_phi0 = subst(df0, images);

    if (!(fr.df0_phi0 * fr.dphi0).is_zero())
        throw MathError("NotCriticalManifold", "DF0(phi0) does not annihilate the tangent frame");

    fr.left_inv_n0 = left_pseudo_inverse(fr.n0_frame);
    fr.n0_dyn = fr.left_inv_n0 * fr.df0_phi0 * fr.n0_frame;
    if (fr.df0_phi0 * fr.n0_frame != fr.n0_frame * fr.n0_dyn)
        throw MathError("FrameNotInvariant",
                        "DF0(phi0) N0 != N0 n0: the fibre frame does not span an invariant family");
    try {
        fr.n0_dyn_inv = mat_inverse(fr.n0_dyn);
    } catch (const MathError& e) {
        if (e.kind() == "SingularMatrix")
            throw MathError("SingularMatrix", "n0 is singular: the critical manifold is normally degenerate");
        throw;
    }

    fr.p0 = projector_oblique(fr.dphi0, fr.n0_frame);
    fr.left_inv_dphi0 = left_pseudo_inverse(fr.dphi0);
    (void)k;
    return fr;
}

} // namespace slowmani
