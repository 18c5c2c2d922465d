#include "slowmani/cascade.hpp"

namespace slowmani {

namespace {

// Verifies D phi . r_child = r_parent o phi through the given order, where
// r_child carries its eps^shift prefactor and both sides live on the child
// chart.  Exact symbolic identity.
bool level_conjugacy_holds(const EpsSeries& parent_r, const LevelProblem& child,
                           const SlowExpansion& child_exp, unsigned shift) {
    const unsigned check_order = std::min(parent_r.order(), child_exp.order + shift);
    std::vector<RatMat> dphi;
    const EpsSeries phi_p = child_exp.phi.pad(check_order);
    for (unsigned i = 0; i <= check_order; ++i) dphi.push_back(jacobian(phi_p.coeff(i), child.chart_idx));
    EpsSeries lhs = EpsSeries(std::move(dphi)) * child_exp.r.shift_up(shift).truncate(check_order);

    // r_parent o phi: the parent coefficients are rational functions of the
    // parent chart variables, composed with the child embedding series.
    EpsSeries rhs = EpsSeries::zero(child.chart_ring, parent_r.rows(), 1, check_order);
    LevelProblem composer = child;
    for (unsigned l = 0; l <= check_order; ++l) {
        if (l > parent_r.order()) break;
        if (parent_r.coeff(l).is_zero()) continue;
        composer.f_terms = {parent_r.coeff(l)};
        EpsSeries composed = f_series(composer, child_exp.phi, check_order - l);
        rhs = rhs + composed.shift_up(l).truncate(check_order);
    }
    return (lhs - rhs).is_zero();
}

std::optional<std::vector<Rat>> factor_constant_column(const RatMat& f) {
    size_t pivot = f.rows();
    for (size_t i = 0; i < f.rows(); ++i)
        if (!f.at(i, 0).is_zero()) {
            pivot = i;
            break;
        }
    if (pivot == f.rows()) return std::nullopt; // zero field carries no frame
    std::vector<Rat> c(f.rows(), Rat(0));
    c[pivot] = Rat(1);
    for (size_t i = 0; i < f.rows(); ++i) {
        if (i == pivot) continue;
        RatFunc ratio = f.at(i, 0) / f.at(pivot, 0);
        if (!ratio.is_constant()) return std::nullopt;
        c[i] = ratio.constant_value();
    }
    return c;
}

} // namespace

ReframeResult shift_and_reframe(const EpsSeries& r_series, const LevelSection& next,
                                const LevelProblem& parent) {
    if (!r_series.coeff(0).is_zero())
        throw MathError("DegenerateLevel", "reduced field has a nonzero eps^0 term; nothing to reframe");
    const unsigned j = r_series.first_nonzero();
    if (j > r_series.order())
        throw MathError("DegenerateLevel", "reduced field vanishes identically through the computed order");

    ReframeResult out;
    out.shift = j;
    LevelProblem& lp = out.problem;
    lp.state_ring = parent.chart_ring;
    lp.state_idx = parent.chart_idx;
    lp.param_state_idx = parent.param_chart_idx;
    lp.chart_ring = next.ring;
    for (const auto& name : next.chart_vars) lp.chart_idx.push_back(next.ring->index_of(name));
    for (size_t i = 0; i < parent.param_chart_idx.size(); ++i)
        lp.param_chart_idx.push_back(i); // parameters sit first in every ring
    EpsSeries shifted = r_series.shift_down(j);
    for (unsigned l = 0; l <= shifted.order(); ++l) lp.f_terms.push_back(shifted.coeff(l));
    lp.phi0 = next.phi0;
    lp.n0_frame = next.n0_frame;
    lp.ansatz = next.ansatz;
    lp.graph_indices = next.graph_indices;

    RatMat on_curve = subst(lp.f_terms[0], embedding_images(lp));
    if (!on_curve.is_zero())
        throw MathError("NotCriticalSubmanifold",
                        "the new leading term does not vanish along the level embedding: " + on_curve.str());
    return out;
}

RatMat aux_projector(const Frame& fr) { return fr.left_inv_dphi0 * fr.p0; }

RatMat infra_slow_leading(const Frame& top_frame, const RatMat& g2, const LevelProblem& level1,
                          const Frame& level1_frame) {
    RatMat projected = aux_projector(top_frame) * g2;           // k-vector on the parent chart
    RatMat on_curve = subst(projected, embedding_images(level1)); // restricted to the level-1 manifold
    return aux_projector(level1_frame) * on_curve;
}

CascadeResult run_cascade(const ProblemSpec& spec, const std::vector<unsigned>& orders) {
    if (orders.size() != spec.levels.size() + 1)
        throw SpecError("DimensionMismatch", "need one expansion order per level, including level 0");

    CascadeResult out;
    out.top_problem = level0_problem(spec);
    try {
        out.top = expand_slow_manifold(out.top_problem, orders[0]);
    } catch (const MathError& e) {
        throw MathError(e.kind(), "level 0: " + std::string(e.what()));
    }
    out.j_sequence.push_back(0);
    out.dim_sequence.push_back(spec.n());
    const unsigned top_first = out.top.r.first_nonzero();
    if (top_first <= out.top.order) out.j_sequence.push_back(top_first);
    out.dim_sequence.push_back(spec.k());
    out.conjugacy_ok = true;

    const LevelProblem* parent_problem = &out.top_problem;
    const SlowExpansion* parent_exp = &out.top;
    unsigned j_cum = 0;

    for (size_t li = 0; li < spec.levels.size(); ++li) {
        const LevelSection& section = spec.levels[li];
        CascadeLevel lvl;
        lvl.level_index = section.index;
        lvl.dim = section.chart_vars.size();
        try {
            ReframeResult reframed = shift_and_reframe(parent_exp->r, section, *parent_problem);
            j_cum += reframed.shift;
            lvl.problem = std::move(reframed.problem);
            const unsigned avail = parent_exp->order - reframed.shift;
            if (orders[li + 1] > avail)
                throw SpecError("DimensionMismatch",
                                "level " + std::to_string(section.index) + " order " +
                                    std::to_string(orders[li + 1]) + " exceeds the " +
                                    std::to_string(avail) + " coefficients the parent expansion provides");
            lvl.expansion = expand_slow_manifold(lvl.problem, orders[li + 1]);
            lvl.trivial = lvl.expansion.r.is_zero();
            if (lvl.trivial) {
                lvl.leading_order = 0;
                lvl.reduced_field = lvl.expansion.r;
            } else {
                const unsigned own_first = lvl.expansion.r.first_nonzero();
                lvl.leading_order = j_cum + own_first;
                lvl.reduced_field = lvl.expansion.r.shift_down(own_first);
            }
            if (!level_conjugacy_holds(parent_exp->r, lvl.problem, lvl.expansion, reframed.shift))
                out.conjugacy_ok = false;
        } catch (const MathError& e) {
            throw MathError(e.kind(), "level " + std::to_string(section.index) + ": " + std::string(e.what()));
        }
        if (!lvl.trivial) out.j_sequence.push_back(lvl.leading_order);
        out.dim_sequence.push_back(lvl.dim);
        out.levels.push_back(std::move(lvl));
        parent_problem = &out.levels.back().problem;
        parent_exp = &out.levels.back().expansion;
    }

    // Cross-check the direct infra-slow formula against the recursion for the
    // first nested level; needs G2 of the top expansion.
    if (!out.levels.empty() && out.top.order >= 2) {
        const CascadeLevel& l1 = out.levels.front();
        TwoPathCheck tp;
        tp.direct = infra_slow_leading(out.top.frame, out.top.g[2], l1.problem, l1.expansion.frame);
        tp.recursion = l1.expansion.order >= 1 ? l1.expansion.r.coeff(1)
                                               : RatMat(l1.problem.chart_ring, l1.dim, 1);
        tp.equal = tp.direct == tp.recursion;
        if (!tp.equal) out.conjugacy_ok = false;
        out.two_path = std::move(tp);
    }
    return out;
}

std::string infra_slow_class_str(InfraSlowClass c) {
    switch (c) {
        case InfraSlowClass::EquilibriumCurve: return "EquilibriumCurve";
        case InfraSlowClass::TrivialS1: return "TrivialS1";
        case InfraSlowClass::NotApplicable: return "NotApplicable";
    }
    return "NotApplicable";
}

InfraSlowClass check_no_infra_slow(const ProblemSpec& spec) {
    if (spec.f_terms.size() < 2) return InfraSlowClass::NotApplicable;
    for (size_t l = 2; l < spec.f_terms.size(); ++l)
        if (!spec.f_terms[l].is_zero()) return InfraSlowClass::NotApplicable;
    auto c0 = factor_constant_column(spec.f_terms[0]);
    auto c1 = factor_constant_column(spec.f_terms[1]);
    if (!c0 || !c1) return InfraSlowClass::NotApplicable;
    // im(N1) subset of im(N0) iff the two columns are proportional.
    bool proportional = true;
    for (size_t i = 0; i < c0->size() && proportional; ++i)
        for (size_t j = i + 1; j < c0->size() && proportional; ++j)
            if ((*c1)[i] * (*c0)[j] != (*c1)[j] * (*c0)[i]) proportional = false;
    return proportional ? InfraSlowClass::TrivialS1 : InfraSlowClass::EquilibriumCurve;
}

} // namespace slowmani
