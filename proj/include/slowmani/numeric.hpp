#pragma once

#include <functional>
#include <map>

#include "slowmani/expansion.hpp"

namespace slowmani {

// Double-precision values for parameters/variables plus the perturbation
// strength itself.
struct Binding {
    std::map<std::string, double> values;
    double epsilon = 0.0;
};

double eval_numeric(const RatFunc& f, const Binding& b);
std::vector<double> eval_numeric(const RatMat& m, const Binding& b);          // row-major
std::vector<double> eval_numeric(const EpsSeries& s, const Binding& b);       // summed over eps powers

// A rational function flattened for fast repeated evaluation: fixed symbols
// are folded into the coefficients, free symbols indexed by position.
class CompiledRatFunc {
public:
    CompiledRatFunc() = default;
    CompiledRatFunc(const RatFunc& f, const std::vector<std::string>& free_vars,
                    const std::map<std::string, double>& fixed);

    double eval(const double* x) const; // throws EvaluationError on denominator underflow
    // nullopt when |den| < min_den; used to screen validation grids.
    std::optional<double> eval_checked(const double* x, double min_den) const;

private:
    struct Term {
        double c;
        std::vector<std::pair<size_t, unsigned>> pows;
    };
    double eval_terms(const std::vector<Term>& ts, const double* x) const;
    std::vector<Term> num_, den_;
    bool poly_ = true;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<double> final_state;
};

using FieldFn = std::function<void(const double* x, double* dxdt)>;

// Classical fixed-step fourth-order Runge-Kutta.  Records every
// `record_every`-th point (0 = endpoints only); a non-finite state aborts
// with DivergedTrajectory carrying the step index.
Trajectory integrate_rk4(const FieldFn& field, size_t dim, const std::vector<double>& x0, double dt,
                         size_t steps, size_t record_every = 0);

// F(x, eps) with parameters and eps bound; free variables are the states.
FieldFn compile_field(const ProblemSpec& spec, const Binding& b);

struct ResidualReport {
    std::vector<double> epsilons;
    std::vector<double> sup_residuals;
    double fitted_slope = 0.0;
    double target_slope = 0.0;
    bool machine_zero = false; // all sups at rounding level; slope fit skipped
    bool pass = false;
};

// Sup over the grid of the conjugacy defect |F(phi_(m), eps) - Dphi_(m) r_(m)|
// per epsilon, with a least-squares slope of log sup against log eps.
// Grid points where any involved denominator falls below 1e-6 are rejected.
ResidualReport residual_order_fit(const LevelProblem& lp, const SlowExpansion& slow,
                                  const std::vector<std::vector<double>>& grid,
                                  const std::vector<double>& epsilons, const Binding& params,
                                  double target_slope);

struct HyperbolicityReport {
    std::vector<std::vector<double>> sample_points;
    std::vector<std::vector<double>> eigenvalue_real_parts;
    double min_abs_real_part = 0.0;
    double tolerance = 1e-8;
    bool pass = false;
};

// Eigenvalues of the numeric n0(xi) at each sample: closed form for sizes
// 1-2, Durand-Kerner on the characteristic polynomial for size >= 3.
HyperbolicityReport hyperbolicity_probe(const Frame& fr, const std::vector<std::string>& chart_vars,
                                        const std::vector<std::vector<double>>& samples,
                                        const Binding& params, double tolerance = 1e-8);

// Uniform grid of per_dim points per chart variable inside the box.
std::vector<std::vector<double>> make_grid(const std::vector<std::pair<double, double>>& box,
                                           size_t per_dim = 11);

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

} // namespace slowmani
