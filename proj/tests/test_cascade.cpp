#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "slowmani/cascade.hpp"
#include "slowmani/numeric.hpp"

using namespace slowmani;
using slowmani::test::col;
using slowmani::test::load;
using slowmani::test::mat;
using slowmani::test::rf;

namespace {
struct RaisedLimit {
    unsigned saved;
    explicit RaisedLimit(unsigned limit) : saved(degree_limit()) { set_degree_limit(limit); }
    ~RaisedLimit() { set_degree_limit(saved); }
};
} // namespace

TEST_CASE("shift_and_reframe on the iffl reduced field") {
    ProblemSpec spec = load("iffl.gspt");
    LevelProblem lp = level0_problem(spec);
    SlowExpansion slow = expand_slow_manifold(lp, 2);
    ReframeResult re = shift_and_reframe(slow.r, spec.levels[0], lp);
    CHECK(re.shift == 1);
    REQUIRE(re.problem.f_terms.size() == 2);
    const RingPtr pr = lp.chart_ring;
    CHECK(re.problem.f_terms[0] == col(pr, {"-a2*xi1*xi2", "-a4*xi2"}));
    CHECK(re.problem.f_terms[1] == col(pr, {"a1", "a3"}));
    CHECK(re.problem.state_ring == lp.chart_ring);
}

TEST_CASE("shift_and_reframe rejections") {
    ProblemSpec spec = load("iffl.gspt");
    LevelProblem lp = level0_problem(spec);
    const RingPtr cr = lp.chart_ring;

    // nonzero eps^0 term: no shift possible
    EpsSeries bad(std::vector<RatMat>{col(cr, {"1", "0"}), RatMat(cr, 2, 1)});
    CHECK_THROWS_WITH_AS(shift_and_reframe(bad, spec.levels[0], lp),
                         doctest::Contains("DegenerateLevel"), MathError);

    // identically zero series
    EpsSeries zero = EpsSeries::zero(cr, 2, 1, 2);
    CHECK_THROWS_WITH_AS(shift_and_reframe(zero, spec.levels[0], lp),
                         doctest::Contains("DegenerateLevel"), MathError);

    // an embedding missing the critical set of the new leading term
    SlowExpansion slow = expand_slow_manifold(lp, 2);
    LevelSection off = spec.levels[0];
    off.phi0 = col(off.ring, {"eta", "1"});
    CHECK_THROWS_WITH_AS(shift_and_reframe(slow.r, off, lp),
                         doctest::Contains("NotCriticalSubmanifold"), MathError);
}

TEST_CASE("auxiliary projections") {
    ProblemSpec spec = load("iffl.gspt");
    CascadeResult cr = run_cascade(spec, {2, 1});
    const RingPtr top_ring = spec.chart_ring;
    CHECK(aux_projector(cr.top.frame) == mat(top_ring, {{"1", "0", "0"}, {"0", "1", "0"}}));
    // The level-1 projection: the projection identities force the a4
    // denominator (the a3 printed in the source is inconsistent with
    // Ptilde * Dphi0 = 1, Ptilde * N0 = 0; see the decisions ledger).
    const RingPtr lr = cr.levels[0].problem.chart_ring;
    RatMat pt1 = aux_projector(cr.levels[0].expansion.frame);
    CHECK(pt1 == mat(lr, {{"1", "-a2*eta/a4"}}));
    CHECK(pt1 * cr.levels[0].expansion.frame.dphi0 == RatMat::identity(lr, 1));
    CHECK((pt1 * cr.levels[0].expansion.frame.n0_frame).is_zero());

    ProblemSpec val = load("valorani.gspt");
    CascadeResult vc = run_cascade(val, {2, 1});
    const RingPtr vlr = vc.levels[0].problem.chart_ring;
    CHECK(aux_projector(vc.levels[0].expansion.frame) ==
          mat(vlr, {{"(1 + 4*eta)/(1 + 4*eta + 9*eta^2)", "3/(1 + 4*eta + 9*eta^2)"}}));
}

TEST_CASE("iffl cascade: hidden third timescale") {
    ProblemSpec spec = load("iffl.gspt");
    CascadeResult cr = run_cascade(spec, {3, 2});
    CHECK(cr.j_sequence == std::vector<unsigned>{0, 1, 2});
    CHECK(cr.dim_sequence == std::vector<size_t>{3, 2, 1});
    CHECK(cr.conjugacy_ok);

    const RingPtr top_ring = spec.chart_ring;
    CHECK(cr.top.r.coeff(1) == col(top_ring, {"-a2*xi1*xi2", "-a4*xi2"}));
    CHECK(cr.top.r.coeff(2) == col(top_ring, {"a1", "a3"}));
    CHECK(cr.top.r.coeff(3).is_zero());

    REQUIRE(cr.levels.size() == 1);
    const CascadeLevel& lvl = cr.levels[0];
    CHECK(!lvl.trivial);
    CHECK(lvl.leading_order == 2);
    const RingPtr lr = lvl.problem.chart_ring;
    CHECK(lvl.reduced_field.coeff(0) == col(lr, {"a1 - a2*a3*eta/a4"}));
    CHECK(lvl.reduced_field.coeff(1).is_zero()); // r^(2)_3 = 0

    REQUIRE(cr.two_path.has_value());
    CHECK(cr.two_path->equal);
    CHECK(cr.two_path->direct == col(lr, {"a1 - a2*a3*eta/a4"}));
}

TEST_CASE("iffl composed embeddings land near the true equilibrium") {
    ProblemSpec spec = load("iffl.gspt");
    CascadeResult cr = run_cascade(spec, {2, 1});
    const CascadeLevel& lvl = cr.levels[0];

    // (phi0_level0 o phi0_level1)(eta*) = (eta*, 0, 0) exactly at eps^0:
    // push the level-1 embedding through the level-0 one.
    RatMat level1_in_ambient = subst(level0_problem(spec).phi0, [&] {
        std::vector<RatFunc> im(spec.chart_ring->size(), RatFunc::zero(lvl.problem.chart_ring));
        for (size_t j = 0; j < spec.params.size(); ++j)
            im[j] = RatFunc::variable(lvl.problem.chart_ring, j);
        for (size_t j = 0; j < 2; ++j)
            im[spec.chart_ring->index_of(spec.chart_vars[j])] = lvl.problem.phi0.at(j, 0);
        return im;
    }());
    const RingPtr lr = lvl.problem.chart_ring;
    RatFunc eta_star = rf(lr, "a1*a4/(a2*a3)");
    std::vector<RatFunc> at_star(lr->size(), RatFunc::zero(lr));
    for (size_t j = 0; j < 4; ++j) at_star[j] = RatFunc::variable(lr, j);
    at_star[lr->index_of("eta")] = eta_star;
    RatMat point(lr, 3, 1);
    for (size_t i = 0; i < 3; ++i) point.at(i, 0) = subst(level1_in_ambient.at(i, 0), at_star);
    CHECK(point.at(0, 0) == eta_star);
    CHECK(point.at(1, 0).is_zero());
    CHECK(point.at(2, 0).is_zero());

    // and the distance to the true equilibrium (eta*, eps a3/a4, eps) is O(eps)
    for (double eps : {1e-2, 1e-3}) {
        Binding b;
        b.values = {{"a1", 1.0}, {"a2", 1.0}, {"a3", 1.0}, {"a4", 1.0}};
        b.epsilon = eps;
        double eta_num = 1.0;
        std::vector<double> truth{eta_num, eps * 1.0, eps};
        std::vector<double> approx{eta_num, 0.0, 0.0};
        double dist = 0;
        for (int i = 0; i < 3; ++i) dist = std::max(dist, std::fabs(truth[i] - approx[i]));
        CHECK(dist <= 1.5 * eps);
        CHECK(dist >= 0.5 * eps);
    }
}

TEST_CASE("d2f cascade: infra-slow flow from second derivatives") {
    ProblemSpec spec = load("d2f.gspt");
    CascadeResult cr = run_cascade(spec, {2, 1});
    REQUIRE(cr.levels.size() == 1);
    const RingPtr lr = cr.levels[0].problem.chart_ring;
    CHECK(cr.levels[0].reduced_field.coeff(0) == col(lr, {"1"}));
    CHECK(cr.levels[0].leading_order == 2);
    REQUIRE(cr.two_path.has_value());
    CHECK(cr.two_path->equal);
    CHECK(cr.two_path->direct == col(lr, {"1"}));
}

TEST_CASE("valorani cascade with dependent small parameters") {
    ProblemSpec spec = load("valorani.gspt");
    CascadeResult cr = run_cascade(spec, {2, 1});
    CHECK(cr.j_sequence == std::vector<unsigned>{0, 1, 2});
    CHECK(cr.dim_sequence == std::vector<size_t>{3, 2, 1});
    const RingPtr top_ring = spec.chart_ring;
    CHECK(cr.top.r.coeff(1) ==
          col(top_ring, {"-3*(xi1^3 - xi2)/(1 + 4*xi1)", "xi1^3 - xi2"}));
    REQUIRE(cr.levels.size() == 1);
    const RingPtr lr = cr.levels[0].problem.chart_ring;
    CHECK(cr.levels[0].reduced_field.coeff(0) ==
          col(lr, {"2*deltabar*(eta^2 - eta^4)/(1 + 4*eta + 9*eta^2)"}));
    REQUIRE(cr.two_path.has_value());
    CHECK(cr.two_path->equal);
}

TEST_CASE("feliu cascade: the equilibrium curve carries no infra-slow flow") {
    RaisedLimit raise(256); // level-1 values legitimately reach variable degree ~100
    ProblemSpec spec = load("feliu.gspt");
    CascadeResult cr = run_cascade(spec, {2, 1});
    REQUIRE(cr.levels.size() == 1);
    CHECK(cr.levels[0].trivial);
    CHECK(cr.levels[0].reduced_field.is_zero());
    REQUIRE(cr.two_path.has_value());
    CHECK(cr.two_path->equal);
    CHECK(cr.two_path->direct.is_zero());
    CHECK(cr.conjugacy_ok);
}

TEST_CASE("j-sequence and dim-sequence are strictly monotone") {
    for (const char* name : {"iffl.gspt", "d2f.gspt", "valorani.gspt"}) {
        CAPTURE(name);
        CascadeResult cr = run_cascade(load(name), {2, 1});
        for (size_t i = 1; i < cr.j_sequence.size(); ++i) CHECK(cr.j_sequence[i - 1] < cr.j_sequence[i]);
        for (size_t i = 1; i < cr.dim_sequence.size(); ++i)
            CHECK(cr.dim_sequence[i - 1] > cr.dim_sequence[i]);
    }
}

TEST_CASE("infra_slow_leading agrees with the recursion (two independent paths)") {
    for (const char* name : {"iffl.gspt", "d2f.gspt", "valorani.gspt"}) {
        CAPTURE(name);
        ProblemSpec spec = load(name);
        CascadeResult cr = run_cascade(spec, {2, 1});
        REQUIRE(cr.two_path.has_value());
        RatMat direct = infra_slow_leading(cr.top.frame, cr.top.g[2], cr.levels[0].problem,
                                           cr.levels[0].expansion.frame);
        CHECK(direct == cr.levels[0].expansion.r.coeff(1));
    }
}

TEST_CASE("no-infra-slow classification") {
    CHECK(check_no_infra_slow(load("feliu.gspt")) == InfraSlowClass::EquilibriumCurve);
    CHECK(check_no_infra_slow(load("iffl.gspt")) == InfraSlowClass::NotApplicable);
    CHECK(check_no_infra_slow(load("valorani.gspt")) == InfraSlowClass::NotApplicable);

    // containment toy: N0 = (1, 0), N1 = (2, 0)
    std::string toy = "problem toy\nvars x1 x2\nF0 = [x2, 0]\nF1 = [2*x1, 0]\n"
                      "chart xi\nphi0 = [xi, 0]\nN0 = [[1], [0]]\n";
    CHECK(check_no_infra_slow(parse_problem_file(toy)) == InfraSlowClass::TrivialS1);
}

TEST_CASE("cascade requires enough parent coefficients") {
    ProblemSpec spec = load("iffl.gspt");
    CHECK_THROWS_WITH_AS(run_cascade(spec, {1, 1}), doctest::Contains("exceeds"), SpecError);
    CHECK_THROWS_AS(run_cascade(spec, {2}), SpecError);
}
