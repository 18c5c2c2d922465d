#pragma once

#include <optional>

#include "slowmani/expansion.hpp"

namespace slowmani {

// One nested level of the multiple-timescale structure.  leading_order is the
// cumulative power j of eps governing the level's timescale; reduced_field is
// the level's vector field with eps^j divided out, over the level's chart.
struct CascadeLevel {
    int level_index = 0;
    size_t dim = 0;
    unsigned leading_order = 0;
    bool trivial = false; // reduced field identically zero through the computed order
    LevelProblem problem;
    EpsSeries reduced_field;
    SlowExpansion expansion; // embedding into the parent chart and the level's series
};

struct TwoPathCheck {
    RatMat direct;    // leading infra-slow term from the projection formula
    RatMat recursion; // same term from the order-by-order cascade recursion
    bool equal = false;
};

struct CascadeResult {
    LevelProblem top_problem;
    SlowExpansion top;
    std::vector<CascadeLevel> levels;
    std::vector<unsigned> j_sequence;   // starts at 0 for the ambient field
    std::vector<size_t> dim_sequence;   // starts at n
    bool conjugacy_ok = false;          // every adjacent level conjugacy held exactly
    std::optional<TwoPathCheck> two_path;
};

struct ReframeResult {
    LevelProblem problem;
    unsigned shift = 0; // power of eps divided out
};

// Turns the reduced field of a level into the next level's singular
// perturbation problem.  The series must vanish at order zero and have some
// nonzero coefficient (else DegenerateLevel); the new leading term must
// vanish along the supplied embedding (else NotCriticalSubmanifold).
ReframeResult shift_and_reframe(const EpsSeries& r_series, const LevelSection& next,
                                const LevelProblem& parent);

// (Dphi0^T Dphi0)^{-1} Dphi0^T P0: maps ambient inhomogeneities to chart
// vector fields.
RatMat aux_projector(const Frame& fr);

// Leading infra-slow term by the direct projection formula:
// r(eta) = Ptilde1(eta) * [Ptilde0 * G2](phi0_level1(eta)).
RatMat infra_slow_leading(const Frame& top_frame, const RatMat& g2, const LevelProblem& level1,
                          const Frame& level1_frame);

// Top-down cascade: expand level 0, then reframe and expand each declared
// level.  orders[i] is the expansion order of level i; each must leave enough
// computed coefficients for the next reframing.
CascadeResult run_cascade(const ProblemSpec& spec, const std::vector<unsigned>& orders);

enum class InfraSlowClass { EquilibriumCurve, TrivialS1, NotApplicable };

std::string infra_slow_class_str(InfraSlowClass c);

// Classification for fields of the form N0 f0 + eps N1 f1 with constant
// columns N0, N1: image containment decides between a trivial S1 and a curve
// of true equilibria; anything else is NotApplicable.
InfraSlowClass check_no_infra_slow(const ProblemSpec& spec);

} // namespace slowmani
