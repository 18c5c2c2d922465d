#include "slowmani/expansion.hpp"

namespace slowmani {

namespace {

// Scalar substitution series per state-ring variable: embedding components
// for the dynamical variables, constant series for the parameters.
std::vector<EpsSeries> composition_images(const LevelProblem& lp, const EpsSeries& phi, unsigned order) {
    std::vector<EpsSeries> images(lp.state_ring->size(),
                                  EpsSeries::zero(lp.chart_ring, 1, 1, order));
    for (size_t j = 0; j < lp.param_state_idx.size(); ++j) {
        RatMat m(lp.chart_ring, 1, 1);
        m.at(0, 0) = RatFunc::variable(lp.chart_ring, lp.param_chart_idx[j]);
        images[lp.param_state_idx[j]] = EpsSeries::from_constant(m, order);
    }
    const EpsSeries phi_p = phi.pad(order);
    for (size_t j = 0; j < lp.state_idx.size(); ++j) {
        std::vector<RatMat> comp;
        for (unsigned i = 0; i <= order; ++i) {
            RatMat m(lp.chart_ring, 1, 1);
            m.at(0, 0) = phi_p.coeff(i).at(j, 0);
            comp.push_back(std::move(m));
        }
        images[lp.state_idx[j]] = EpsSeries(std::move(comp));
    }
    return images;
}

EpsSeries compose_matrix(const RatMat& m, const std::vector<EpsSeries>& images, unsigned order) {
    const RingPtr target = images.front().ring();
    std::vector<RatMat> out(order + 1, RatMat(target, m.rows(), m.cols()));
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) {
            EpsSeries e = compose_series(m.at(i, j), images, order);
            for (unsigned o = 0; o <= order; ++o) out[o].at(i, j) = e.coeff(o).at(0, 0);
        }
    return EpsSeries(std::move(out));
}

} // namespace

EpsSeries f_series(const LevelProblem& lp, const EpsSeries& phi, unsigned order) {
    const auto images = composition_images(lp, phi, order);
    EpsSeries acc = EpsSeries::zero(lp.chart_ring, lp.n(), 1, order);
    for (size_t l = 0; l < lp.f_terms.size() && l <= order; ++l) {
        EpsSeries composed = compose_matrix(lp.f_terms[l], images, order - unsigned(l));
        acc = acc + composed.shift_up(unsigned(l)).truncate(order);
    }
    return acc;
}

EpsSeries df_series(const LevelProblem& lp, const EpsSeries& phi, unsigned order) {
    const auto images = composition_images(lp, phi, order);
    const size_t n = lp.n();
    EpsSeries acc = EpsSeries::zero(lp.chart_ring, n, n, order);
    for (size_t l = 0; l < lp.f_terms.size() && l <= order; ++l) {
        RatMat jac_l(lp.state_ring, n, n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) jac_l.at(i, j) = lp.f_terms[l].at(i, 0).diff(lp.state_idx[j]);
        EpsSeries composed = compose_matrix(jac_l, images, order - unsigned(l));
        acc = acc + composed.shift_up(unsigned(l)).truncate(order);
    }
    return acc;
}

EpsSeries conjugacy_residual_series(const LevelProblem& lp, const EpsSeries& phi, const EpsSeries& r,
                                    unsigned order) {
    const EpsSeries phi_p = phi.truncate(order);
    const EpsSeries r_p = r.truncate(order);
    std::vector<RatMat> dphi;
    for (unsigned i = 0; i <= order; ++i) dphi.push_back(jacobian(phi_p.coeff(i), lp.chart_idx));
    return EpsSeries(std::move(dphi)) * r_p - f_series(lp, phi_p, order);
}

EpsSeries variational_residual_series(const LevelProblem& lp, const EpsSeries& phi, const EpsSeries& r,
                                      const EpsSeries& n_frame, const EpsSeries& n_dyn, unsigned order) {
    const EpsSeries nf = n_frame.truncate(order);
    const EpsSeries nd = n_dyn.truncate(order);
    const EpsSeries r_p = r.truncate(order);
    return nf * nd + directional_derivative(nf, r_p, lp.chart_idx) -
           df_series(lp, phi.truncate(order), order) * nf;
}

ConjugacySolution solve_conjugacy_order(const Frame& fr, const RatMat& g_i, Ansatz ansatz,
                                        const std::vector<size_t>& graph_indices) {
    const size_t n = fr.n(), k = fr.k();
    if (g_i.rows() != n || g_i.cols() != 1)
        throw MathError("ShapeMismatch", "inhomogeneity must be an n-vector");
    ConjugacySolution sol;
    sol.r_i = fr.left_inv_dphi0 * (fr.p0 * g_i);
    RatMat complement = g_i - fr.p0 * g_i;
    sol.y_i = -(fr.n0_dyn_inv * (fr.left_inv_n0 * complement));
    RatMat ny = fr.n0_frame * sol.y_i;
    sol.x_i = RatMat(g_i.ring(), k, 1);
    if (ansatz == Ansatz::Graph) {
        for (size_t j = 0; j < k; ++j) sol.x_i.at(j, 0) = -ny.at(graph_indices[j], 0);
    }
    sol.phi_i = fr.dphi0 * sol.x_i + ny;
    return sol;
}

VariationalSolution solve_variational_order(const Frame& fr, const RatMat& h_i, const RatMat& m_i) {
    const size_t n = fr.n(), k = fr.k();
    if (h_i.rows() != n || h_i.cols() != n - k)
        throw MathError("ShapeMismatch", "variational inhomogeneity must be n x (n-k)");
    VariationalSolution sol;
    sol.l_i = fr.left_inv_dphi0 * (fr.p0 * h_i) * fr.n0_dyn_inv;
    RatMat commutator = m_i * fr.n0_dyn - fr.n0_dyn * m_i;
    RatMat complement = h_i - fr.p0 * h_i - fr.n0_frame * commutator;
    sol.n_i = fr.left_inv_n0 * complement;
    sol.nframe_i = fr.n0_frame * m_i + fr.dphi0 * sol.l_i;
    return sol;
}

SlowExpansion expand_slow_manifold(const LevelProblem& lp, unsigned order) {
    SlowExpansion out;
    out.order = order;
    out.frame = compute_frame(lp);
    const size_t n = lp.n(), k = lp.k();

    out.phi = EpsSeries(std::vector<RatMat>{lp.phi0});
    out.r = EpsSeries::zero(lp.chart_ring, k, 1, 0);
    out.y = EpsSeries::zero(lp.chart_ring, n - k, 1, 0);
    out.x = EpsSeries::zero(lp.chart_ring, k, 1, 0);
    out.g.push_back(RatMat(lp.chart_ring, n, 1));

    for (unsigned i = 1; i <= order; ++i) {
        EpsSeries resid = conjugacy_residual_series(lp, out.phi, out.r, i);
        RatMat g_i = -resid.coeff(i);
        ConjugacySolution sol = solve_conjugacy_order(out.frame, g_i, lp.ansatz, lp.graph_indices);
        out.phi.append(sol.phi_i);
        out.r.append(sol.r_i);
        out.y.append(sol.y_i);
        out.x.append(sol.x_i);
        out.g.push_back(std::move(g_i));
    }

    if (order > 0) {
        EpsSeries final_resid = conjugacy_residual_series(lp, out.phi, out.r, order);
        if (!final_resid.is_zero())
            throw MathError("InternalInconsistency",
                            "conjugacy residual did not vanish through order " + std::to_string(order));
    }
    return out;
}

FibreExpansion expand_fibre_bundle(const LevelProblem& lp, const SlowExpansion& slow, unsigned order) {
    if (slow.order < order)
        throw MathError("ShapeMismatch", "slow expansion order " + std::to_string(slow.order) +
                                             " is below the requested fibre order " + std::to_string(order));
    const size_t n = lp.n(), k = lp.k();
    FibreExpansion out;
    out.order = order;
    out.n_frame = EpsSeries(std::vector<RatMat>{slow.frame.n0_frame});
    out.n_dyn = EpsSeries(std::vector<RatMat>{slow.frame.n0_dyn});
    out.l = EpsSeries::zero(lp.chart_ring, k, n - k, 0);
    out.m_choice = EpsSeries::zero(lp.chart_ring, n - k, n - k, order);
    out.h.push_back(RatMat(lp.chart_ring, n, n - k));

    const RatMat m_zero(lp.chart_ring, n - k, n - k);
    for (unsigned i = 1; i <= order; ++i) {
        EpsSeries resid = variational_residual_series(lp, slow.phi, slow.r, out.n_frame, out.n_dyn, i);
        RatMat h_i = -resid.coeff(i);
        VariationalSolution sol = solve_variational_order(slow.frame, h_i, m_zero);
        out.n_frame.append(sol.nframe_i);
        out.n_dyn.append(sol.n_i);
        out.l.append(sol.l_i);
        out.h.push_back(std::move(h_i));
    }

    if (order > 0) {
        EpsSeries final_resid =
            variational_residual_series(lp, slow.phi, slow.r, out.n_frame, out.n_dyn, order);
        if (!final_resid.is_zero())
            throw MathError("InternalInconsistency",
                            "variational residual did not vanish through order " + std::to_string(order));
    }
    return out;
}

} // namespace slowmani
