// Acceptance suite: one entry per criterion, each printing a PASS/FAIL line.
// Run all criteria with no arguments or a single one with --criterion N.
//
// Criteria 2 and 5 pin fibre-correction values exactly as printed in the
// source material.  Two of those printed values are inconsistent with the
// variational conjugacy equation itself (the engine's residual certification
// fails for them under every ansatz and M1 choice, while the engine's own
// values satisfy it exactly); those sub-checks are implemented faithfully and
// reported as the honest failures they are.  See the decisions ledger for the
// full analysis.

#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "slowmani/cascade.hpp"
#include "slowmani/numeric.hpp"

using namespace slowmani;
using slowmani::test::col;
using slowmani::test::load;
using slowmani::test::mat;
using slowmani::test::rf;

namespace {

struct Check {
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back("failed: " + what);
        }
    }
    void expect_eq(const RatMat& got, const RatMat& want, const std::string& what) {
        if (got != want) {
            ok = false;
            notes.push_back("failed: " + what + "\n      expected " + want.str() + "\n      computed " +
                            got.str());
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

// ---------------------------------------------------------------- criterion 1
void c1_parabola_slow(Check& c) {
    ProblemSpec spec = load("parabola.gspt");
    LevelProblem lp = level0_problem(spec);
    SlowExpansion slow = expand_slow_manifold(lp, 2);
    const RingPtr r = spec.chart_ring;
    c.expect_eq(slow.r.coeff(1), col(r, {"2/(1 + 3*xi^2)"}), "r1 = 2/Delta");
    c.expect_eq(slow.phi.coeff(1), col(r, {"0", "3*xi/(1 + 3*xi^2)"}), "phi1 = (0, 3 xi/Delta)");
    c.expect_eq(slow.phi.coeff(2), col(r, {"0", "-3*(9*xi^4 - 3*xi^2 + 2)/(1 + 3*xi^2)^4"}),
                "phi2 = (0, -3(9 xi^4 - 3 xi^2 + 2)/Delta^4)");
    // r2 is pinned to the variant 6 xi (9 xi^4 - 3 xi^2 + 2)/Delta^4: the
    // engine's residual assertion certifies it (the alternative printed
    // variant with 9 xi^2 + 9 xi^4 - 2 leaves a nonzero order-2 residual).
    c.expect_eq(slow.r.coeff(2), col(r, {"6*xi*(9*xi^4 - 3*xi^2 + 2)/(1 + 3*xi^2)^4"}),
                "r2 certified by the order-2 residual");
    c.expect(conjugacy_residual_series(lp, slow.phi, slow.r, 2).is_zero(),
             "conjugacy residual vanishes through order 2");
}

// ---------------------------------------------------------------- criterion 2
void c2_parabola_fibres(Check& c) {
    ProblemSpec spec = load("parabola.gspt");
    LevelProblem lp = level0_problem(spec);
    SlowExpansion slow = expand_slow_manifold(lp, 1);
    FibreExpansion fib = expand_fibre_bundle(lp, slow, 1);
    const RingPtr r = spec.chart_ring;
    c.expect_eq(fib.n_dyn.coeff(0), mat(r, {{"-(1 + 3*xi^2)"}}), "n0 = -Delta");

    RatMat l1_published = mat(
        r, {{"(5 - 2*xi + 5*xi^2 - 4*xi^3 - 17*xi^4 + 6*xi^5 + 3*xi^6)/(1 + 3*xi^2)^3"}});
    RatMat n1_published =
        mat(r, {{"(-1 - 9*xi - 2*xi^2 - 19*xi^3 + 3*xi^4 + 6*xi^5)/(1 + 3*xi^2)^2"}});
    c.expect_eq(fib.l.coeff(1), l1_published, "L1 exactly as published");
    c.expect_eq(fib.n_dyn.coeff(1), n1_published, "n1 exactly as published");

    bool resid_ok =
        variational_residual_series(lp, slow.phi, slow.r, fib.n_frame, fib.n_dyn, 1).is_zero();
    c.note(std::string("engine (L1, n1) satisfy the variational conjugacy exactly: ") +
           (resid_ok ? "yes" : "NO"));
    c.note("the published pair fails that equation under every ansatz and M1 choice;"
           " see the decisions ledger");
}

// ---------------------------------------------------------------- criterion 3
void c3_iffl_cascade(Check& c) {
    ProblemSpec spec = load("iffl.gspt");
    CascadeResult cr = run_cascade(spec, {3, 2});
    const RingPtr r = spec.chart_ring;
    c.expect_eq(cr.top.r.coeff(1), col(r, {"-a2*xi1*xi2", "-a4*xi2"}), "r1 = (-a2 xi1 xi2, -a4 xi2)");
    c.expect_eq(cr.top.r.coeff(2), col(r, {"a1", "a3"}), "r2 = (a1, a3)");
    c.expect(cr.top.r.coeff(3).is_zero(), "r3 = 0");
    const RingPtr lr = cr.levels[0].problem.chart_ring;
    c.expect_eq(cr.levels[0].reduced_field.coeff(0), col(lr, {"a1 - a2*a3*eta/a4"}),
                "r2^(2) = a1 - a2 a3 eta/a4");
    c.expect(cr.levels[0].leading_order == 2, "the infra-slow timescale is eps^2");
    c.expect(cr.levels[0].reduced_field.coeff(1).is_zero(), "r3^(2) = 0 at the computed order");
    c.expect(cr.conjugacy_ok, "level conjugacies hold exactly");
}

// ---------------------------------------------------------------- criterion 4
void c4_d2f_cascade(Check& c) {
    ProblemSpec spec = load("d2f.gspt");
    CascadeResult cr = run_cascade(spec, {2, 1});
    const RingPtr lr = cr.levels[0].problem.chart_ring;
    c.expect_eq(cr.levels[0].reduced_field.coeff(0), col(lr, {"1"}), "r2^(2) = 1");
    c.expect(cr.levels[0].leading_order == 2, "the infra-slow timescale is eps^2");
}

// ---------------------------------------------------------------- criterion 5
void c5_feliu(Check& c) {
    ProblemSpec spec = load("feliu.gspt");
    LevelProblem lp = level0_problem(spec);
    SlowExpansion slow = expand_slow_manifold(lp, 2);
    const RingPtr r = spec.chart_ring;
    const std::string D = "(9*xi1*xi2 + 4*kappa*(xi1^3 + xi2^3))";

    RatMat r1 = col(r, {"(kappa*k2*xi1^5 - km2*xi2^4)*(-(xi2^2/xi1)*(4*kappa*xi1^2 + 5*xi2))/" + D,
                        "(kappa*k2*xi1^5 - km2*xi2^4)*4*xi2*(xi1 + kappa*xi2^2)/" + D});
    c.expect_eq(slow.r.coeff(1), r1, "r1 matches the published reduced field");

    const std::string y1 = "kappa*(km2*xi2^4 - kappa*k2*xi1^5)*(3*xi1*xi2 + kappa*(4*xi1^3 - "
                           "2*xi2^3))/(k1*xi1^3*xi2*" + D + "^2)";
    RatMat phi1 = col(r, {"-2*(" + y1 + ")", "-2*(" + y1 + ")", "3*(" + y1 + ")"});
    c.expect_eq(slow.phi.coeff(1), phi1, "phi1 matches the published first correction");

    const std::string rt2 = "((-4*km2*xi2^3 + k2*xi1^2*(-3*xi1 + 2*kappa*xi2^2))*(3*xi1*xi2 + "
                            "kappa*(4*xi1^3 - 2*xi2^3)))";
    const std::string pref = "(kappa*(kappa*k2*xi1^5 - km2*xi2^4)*" + rt2 + "/(k1*xi1^3*xi2*" + D + "^3))";
    RatMat r2 = col(r, {pref + "*(-(4*kappa*xi1^2 + 5*xi2)/xi1)", pref + "*4*(xi1 + kappa*xi2^2)/xi2"});
    c.expect_eq(slow.r.coeff(2), r2, "r2 matches the published second-order field (with r~2)");

    FibreExpansion fib = expand_fibre_bundle(lp, slow, 1);
    const std::string core = "(kappa*(-4*km2*xi2^3 + k2*xi1^2*(-3*xi1 + 2*kappa*xi2^2))/"
                             "(k1*xi1^3*xi2^3*" + D + "^2))";
    RatMat l1_published = col(r, {core + "*(4*kappa*xi1^2 + 5*xi2)/xi1",
                                  "-" + core + "*4*(xi1 + kappa*xi2^2)/xi2"});
    c.expect_eq(fib.l.coeff(1), l1_published, "L1 exactly as published");
    bool sign_flipped = fib.l.coeff(1) == -l1_published;
    c.note(std::string("computed L1 equals the negative of the published L1: ") +
           (sign_flipped ? "yes" : "no") +
           "; the engine value satisfies the variational conjugacy exactly (see ledger)");
}

// ---------------------------------------------------------------- criterion 6
void c6_valorani(Check& c) {
    ProblemSpec spec = load("valorani.gspt");
    CascadeResult cr = run_cascade(spec, {2, 1});
    const RingPtr r = spec.chart_ring;
    c.expect_eq(cr.top.r.coeff(1), col(r, {"-3*(xi1^3 - xi2)/(1 + 4*xi1)", "xi1^3 - xi2"}),
                "r1^(1) = (-3/(1+4 xi1), 1)(xi1^3 - xi2)");
    c.expect_eq(cr.top.phi.coeff(1),
                col(r, {"(xi1^3 - xi2)*(2*xi1 - 1)/(1 + 4*xi1)^2",
                        "-2*(xi1^3 - xi2)*(2*xi1 - 1)/(1 + 4*xi1)^2", "0"}),
                "phi1^(0) as published");

    LevelProblem lp = level0_problem(spec);
    FibreExpansion fib = expand_fibre_bundle(lp, cr.top, 1);
    c.expect_eq(fib.l.coeff(1),
                col(r, {"-3*xi1*(1 - 2*xi1)/(1 + 4*xi1)^2", "xi1*(1 - 2*xi1)/(1 + 4*xi1)"}),
                "L1 as published");

    const RingPtr lr = cr.levels[0].problem.chart_ring;
    c.expect_eq(aux_projector(cr.levels[0].expansion.frame),
                mat(lr, {{"(1 + 4*eta)/(1 + 4*eta + 9*eta^2)", "3/(1 + 4*eta + 9*eta^2)"}}),
                "Ptilde^(1) = (1 + 4 eta, 3)/(1 + 4 eta + 9 eta^2)");
    c.expect_eq(cr.levels[0].reduced_field.coeff(0),
                col(lr, {"2*deltabar*(eta^2 - eta^4)/(1 + 4*eta + 9*eta^2)"}),
                "r2^(2) = 2 deltabar (eta^2 - eta^4)/(1 + 4 eta + 9 eta^2)");
}

// ---------------------------------------------------------------- criterion 7
void c7_residual_order(Check& c) {
    const std::vector<double> eps{std::pow(10, -1.5), 1e-2, std::pow(10, -2.5), 1e-3};
    {
        ProblemSpec spec = load("parabola.gspt");
        LevelProblem lp = level0_problem(spec);
        Binding params;
        for (unsigned m : {1u, 2u}) {
            SlowExpansion slow = expand_slow_manifold(lp, m);
            ResidualReport rep =
                residual_order_fit(lp, slow, make_grid(spec.box), eps, params, double(m + 1) - 0.25);
            c.expect(rep.pass, "parabola m=" + std::to_string(m) + " slope " +
                                   std::to_string(rep.fitted_slope) + " >= " +
                                   std::to_string(rep.target_slope));
        }
    }
    {
        ProblemSpec spec = load("feliu.gspt");
        LevelProblem lp = level0_problem(spec);
        Binding params;
        params.values = {{"k1", 1.0}, {"k2", 0.4}, {"km2", 0.7}, {"kappa", std::cbrt(1.0 / 0.5)}};
        for (unsigned m : {1u, 2u}) {
            SlowExpansion slow = expand_slow_manifold(lp, m);
            ResidualReport rep =
                residual_order_fit(lp, slow, make_grid(spec.box), eps, params, double(m + 1) - 0.25);
            c.expect(rep.pass, "feliu m=" + std::to_string(m) + " slope " +
                                   std::to_string(rep.fitted_slope) + " >= " +
                                   std::to_string(rep.target_slope));
        }
    }
}

// ---------------------------------------------------------------- criterion 8
void c8_equilibria(Check& c) {
    {
        ProblemSpec spec = load("iffl.gspt");
        Binding b;
        b.values = {{"a1", 1.0}, {"a2", 1.0}, {"a3", 1.0}, {"a4", 1.0}};
        b.epsilon = 0.01;
        Trajectory t = integrate_rk4(compile_field(spec, b), 3, {2.0, 2.0, 2.0}, 0.1, 800000);
        double err = std::max({std::fabs(t.final_state[0] - 1.0), std::fabs(t.final_state[1] - 0.01),
                               std::fabs(t.final_state[2] - 0.01)});
        c.expect(err <= 1e-3, "iffl trajectory ends within 1e-3 of (1, 0.01, 0.01); off by " +
                                  std::to_string(err));
    }
    {
        ProblemSpec spec = load("valorani.gspt");
        Binding b;
        b.values = {{"deltabar", 1.0}}; // delta = deltabar eps^2 = 1e-4
        b.epsilon = 1e-2;
        Trajectory t = integrate_rk4(compile_field(spec, b), 3, {0.2, 0.2, 0.2}, 0.1, 4000000);
        double err = std::max({std::fabs(t.final_state[0] - 1.0), std::fabs(t.final_state[1] - 1.0),
                               std::fabs(t.final_state[2] - 1.0)});
        c.expect(err <= 1e-2, "valorani trajectory ends within 1e-2 of (1, 1, 1); off by " +
                                  std::to_string(err));
    }
}

// ---------------------------------------------------------------- criterion 9
void c9_frame_properties(Check& c) {
    for (const char* name :
         {"parabola.gspt", "iffl.gspt", "d2f.gspt", "feliu.gspt", "valorani.gspt", "vdp_embedded.gspt"}) {
        ProblemSpec spec = load(name);
        LevelProblem lp = level0_problem(spec);
        Frame fr = compute_frame(lp);
        const std::string where(name);
        c.expect(fr.p0 * fr.p0 == fr.p0, where + ": P0^2 = P0");
        c.expect(fr.p0 * fr.dphi0 == fr.dphi0, where + ": P0 Dphi0 = Dphi0");
        c.expect((fr.p0 * fr.n0_frame).is_zero(), where + ": P0 N0 = 0");
        c.expect(fr.df0_phi0 * fr.n0_frame == fr.n0_frame * fr.n0_dyn, where + ": N0 n0 = DF0(phi0) N0");
        c.expect(fr.left_inv_dphi0 * fr.dphi0 == RatMat::identity(lp.chart_ring, lp.k()),
                 where + ": left inverse of Dphi0");
        c.expect(fr.left_inv_n0 * fr.n0_frame == RatMat::identity(lp.chart_ring, lp.n() - lp.k()),
                 where + ": left inverse of N0");
    }

    const RingPtr r = make_ring({"x", "y"});
    slowmani::test::RandomAlgebra rng(90210, r);
    int done = 0;
    while (done < 50) {
        RatMat m(r, 3, 2), n(r, 3, 1);
        for (size_t i = 0; i < 3; ++i) {
            for (size_t j = 0; j < 2; ++j) m.at(i, j) = RatFunc::from_poly(rng.poly(1, 2));
            n.at(i, 0) = RatFunc::from_poly(rng.poly(1, 2));
        }
        try {
            RatMat pi = projector_pi(n);
            RatMat p = projector_oblique(m, n);
            bool laws = pi * pi == pi && (pi * n).is_zero() && p * p == p && p * m == m &&
                        (p * n).is_zero();
            c.expect(laws, "projector laws on randomized instance " + std::to_string(done));
            ++done;
        } catch (const MathError& e) {
            if (e.kind() != "SingularMatrix") throw;
        }
    }
}

// --------------------------------------------------------------- criterion 10
void c10_classification(Check& c) {
    c.expect(check_no_infra_slow(load("feliu.gspt")) == InfraSlowClass::EquilibriumCurve,
             "feliu classifies as EquilibriumCurve");
    std::string toy = "problem toy\nvars x1 x2\nF0 = [x2, 0]\nF1 = [2*x1, 0]\n"
                      "chart xi\nphi0 = [xi, 0]\nN0 = [[1], [0]]\n";
    c.expect(check_no_infra_slow(parse_problem_file(toy)) == InfraSlowClass::TrivialS1,
             "containment toy classifies as TrivialS1");
    c.expect(check_no_infra_slow(load("iffl.gspt")) == InfraSlowClass::NotApplicable,
             "iffl classifies as NotApplicable");
}

// --------------------------------------------------------------- criterion 11
void c11_two_path(Check& c) {
    for (const char* name : {"iffl.gspt", "d2f.gspt", "valorani.gspt"}) {
        ProblemSpec spec = load(name);
        CascadeResult cr = run_cascade(spec, {2, 1});
        const std::string where(name);
        if (!cr.two_path) {
            c.expect(false, where + ": two-path check available");
            continue;
        }
        c.expect(cr.two_path->equal, where + ": projection formula equals the cascade recursion");
        RatMat redo = infra_slow_leading(cr.top.frame, cr.top.g[2], cr.levels[0].problem,
                                         cr.levels[0].expansion.frame);
        c.expect(redo == cr.levels[0].expansion.r.coeff(1), where + ": recomputed agreement");
    }
}

struct Criterion {
    int id;
    const char* label;
    std::function<void(Check&)> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> cs{
        {1, "parabola slow manifold, order 2, graph ansatz", c1_parabola_slow},
        {2, "parabola fast fibre bundle, order 1", c2_parabola_fibres},
        {3, "iffl cascade, depth 2", c3_iffl_cascade},
        {4, "d2f cascade, depth 2", c4_d2f_cascade},
        {5, "feliu network, order 2, ZeroX ansatz", c5_feliu},
        {6, "valorani network with dependent small parameters", c6_valorani},
        {7, "numeric residual order (log-log slope)", c7_residual_order},
        {8, "equilibrium reproduction by RK4", c8_equilibria},
        {9, "projector and frame property suite", c9_frame_properties},
        {10, "no-infra-slow classification", c10_classification},
        {11, "two-path agreement for the leading infra-slow term", c11_two_path},
    };
    return cs;
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
    }
    int failures = 0;
    for (const auto& crit : criteria()) {
        if (only && crit.id != only) continue;
        Check c;
        try {
            crit.run(c);
        } catch (const std::exception& e) {
            c.ok = false;
            c.notes.push_back(std::string("exception: ") + e.what());
        }
        std::cout << (c.ok ? "[PASS]" : "[FAIL]") << " criterion " << crit.id << ": " << crit.label
                  << "\n";
        for (const auto& n : c.notes) std::cout << "    " << n << "\n";
        if (!c.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
