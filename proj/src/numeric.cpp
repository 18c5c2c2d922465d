#include "slowmani/numeric.hpp"

#include <cmath>
#include <complex>

namespace slowmani {

namespace {

std::vector<double> binding_point(const RingPtr& ring, const Binding& b) {
    std::vector<double> x(ring->size());
    for (size_t i = 0; i < ring->size(); ++i) {
        auto it = b.values.find(ring->name(i));
        if (it == b.values.end())
            throw NumericError("EvaluationError", "symbol '" + ring->name(i) + "' is not bound");
        x[i] = it->second;
    }
    return x;
}

double eval_poly_double(const MultiPoly& p, const std::vector<double>& x) { return p.eval_double(x); }

} // namespace

double eval_numeric(const RatFunc& f, const Binding& b) {
    auto x = binding_point(f.ring(), b);
    double d = eval_poly_double(f.den(), x);
    if (std::fabs(d) < 1e-300)
        throw NumericError("EvaluationError", "denominator underflow at evaluation point");
    return eval_poly_double(f.num(), x) / d;
}

std::vector<double> eval_numeric(const RatMat& m, const Binding& b) {
    std::vector<double> out;
    out.reserve(m.rows() * m.cols());
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) out.push_back(eval_numeric(m.at(i, j), b));
    return out;
}

std::vector<double> eval_numeric(const EpsSeries& s, const Binding& b) {
    std::vector<double> acc(s.rows() * s.cols(), 0.0);
    double scale = 1.0;
    for (unsigned i = 0; i <= s.order(); ++i) {
        auto c = eval_numeric(s.coeff(i), b);
        for (size_t j = 0; j < acc.size(); ++j) acc[j] += scale * c[j];
        scale *= b.epsilon;
    }
    return acc;
}

CompiledRatFunc::CompiledRatFunc(const RatFunc& f, const std::vector<std::string>& free_vars,
                                 const std::map<std::string, double>& fixed) {
    const RingPtr& ring = f.ring();
    std::vector<long> slot(ring->size(), -1);
    std::vector<double> fixed_val(ring->size(), 0.0);
    for (size_t i = 0; i < ring->size(); ++i) {
        const std::string& nm = ring->name(i);
        auto free_it = std::find(free_vars.begin(), free_vars.end(), nm);
        if (free_it != free_vars.end()) {
            slot[i] = long(free_it - free_vars.begin());
        } else {
            auto fx = fixed.find(nm);
            if (fx == fixed.end())
                throw NumericError("EvaluationError", "symbol '" + nm + "' is neither free nor bound");
            fixed_val[i] = fx->second;
        }
    }
    auto compile = [&](const MultiPoly& p, std::vector<Term>& out) {
        for (const auto& [m, c] : p.terms()) {
            Term t;
            t.c = c.to_double();
            for (size_t i = 0; i < m.size(); ++i) {
                if (m[i] == 0) continue;
                if (slot[i] >= 0) {
                    t.pows.emplace_back(size_t(slot[i]), m[i]);
                } else {
                    t.c *= std::pow(fixed_val[i], double(m[i]));
                }
            }
            out.push_back(std::move(t));
        }
    };
    compile(f.num(), num_);
    poly_ = f.is_poly();
    if (!poly_) compile(f.den(), den_);
}

double CompiledRatFunc::eval_terms(const std::vector<Term>& ts, const double* x) const {
    double acc = 0.0;
    for (const auto& t : ts) {
        double v = t.c;
        for (const auto& [slot, e] : t.pows) {
            double b = x[slot];
            unsigned k = e;
            while (k) {
                if (k & 1) v *= b;
                b *= b;
                k >>= 1;
            }
        }
        acc += v;
    }
    return acc;
}

double CompiledRatFunc::eval(const double* x) const {
    double n = eval_terms(num_, x);
    if (poly_) return n;
    double d = eval_terms(den_, x);
    if (std::fabs(d) < 1e-300)
        throw NumericError("EvaluationError", "denominator underflow at evaluation point");
    return n / d;
}

std::optional<double> CompiledRatFunc::eval_checked(const double* x, double min_den) const {
    double n = eval_terms(num_, x);
    if (poly_) return n;
    double d = eval_terms(den_, x);
    if (std::fabs(d) < min_den) return std::nullopt;
    return n / d;
}

Trajectory integrate_rk4(const FieldFn& field, size_t dim, const std::vector<double>& x0, double dt,
                         size_t steps, size_t record_every) {
    if (dt <= 0.0) throw NumericError("EvaluationError", "step size must be positive");
    if (steps < 1) throw NumericError("EvaluationError", "need at least one step");
    Trajectory traj;
    std::vector<double> x = x0, k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    traj.times.push_back(0.0);
    traj.states.push_back(x);
    for (size_t s = 0; s < steps; ++s) {
        field(x.data(), k1.data());
        for (size_t i = 0; i < dim; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
        field(tmp.data(), k2.data());
        for (size_t i = 0; i < dim; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
        field(tmp.data(), k3.data());
        for (size_t i = 0; i < dim; ++i) tmp[i] = x[i] + dt * k3[i];
        field(tmp.data(), k4.data());
        for (size_t i = 0; i < dim; ++i) x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        for (double v : x)
            if (!std::isfinite(v))
                throw NumericError("DivergedTrajectory", "non-finite state at step " + std::to_string(s + 1));
        if (record_every && (s + 1) % record_every == 0 && s + 1 != steps) {
            traj.times.push_back(double(s + 1) * dt);
            traj.states.push_back(x);
        }
    }
    traj.times.push_back(double(steps) * dt);
    traj.states.push_back(x);
    traj.final_state = x;
    return traj;
}

FieldFn compile_field(const ProblemSpec& spec, const Binding& b) {
    std::map<std::string, double> fixed = b.values;
    const size_t n = spec.n();
    auto terms = std::make_shared<std::vector<std::vector<CompiledRatFunc>>>();
    for (const auto& f_l : spec.f_terms) {
        std::vector<CompiledRatFunc> row;
        for (size_t i = 0; i < n; ++i) row.emplace_back(f_l.at(i, 0), spec.state_vars, fixed);
        terms->push_back(std::move(row));
    }
    const double eps = b.epsilon;
    return [terms, eps, n](const double* x, double* dx) {
        for (size_t i = 0; i < n; ++i) dx[i] = 0.0;
        double scale = 1.0;
        for (const auto& row : *terms) {
            for (size_t i = 0; i < n; ++i) dx[i] += scale * row[i].eval(x);
            scale *= eps;
        }
    };
}

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double denom = double(n) * sxx - sx * sx;
    if (std::fabs(denom) < 1e-30) throw NumericError("NumericalFailure", "degenerate slope fit");
    return (double(n) * sxy - sx * sy) / denom;
}

ResidualReport residual_order_fit(const LevelProblem& lp, const SlowExpansion& slow,
                                  const std::vector<std::vector<double>>& grid,
                                  const std::vector<double>& epsilons, const Binding& params,
                                  double target_slope) {
    if (epsilons.size() < 3)
        throw NumericError("EvaluationError", "slope fit needs at least three epsilon values");
    const size_t n = lp.n(), k = lp.k();
    std::vector<std::string> chart_names;
    for (size_t idx : lp.chart_idx) chart_names.push_back(lp.chart_ring->name(idx));
    std::vector<std::string> state_names;
    for (size_t idx : lp.state_idx) state_names.push_back(lp.state_ring->name(idx));

    // Compile once: phi and r coefficients, the jacobian coefficients, and
    // the ambient field terms.
    const unsigned m = slow.order;
    std::vector<std::vector<CompiledRatFunc>> phi_c(m + 1), r_c(m + 1);
    std::vector<std::vector<CompiledRatFunc>> dphi_c(m + 1); // row-major n x k
    for (unsigned o = 0; o <= m; ++o) {
        RatMat dphi = jacobian(slow.phi.coeff(o), lp.chart_idx);
        for (size_t i = 0; i < n; ++i) {
            phi_c[o].emplace_back(slow.phi.coeff(o).at(i, 0), chart_names, params.values);
            for (size_t j = 0; j < k; ++j) dphi_c[o].emplace_back(dphi.at(i, j), chart_names, params.values);
        }
        for (size_t j = 0; j < k; ++j) r_c[o].emplace_back(slow.r.coeff(o).at(j, 0), chart_names, params.values);
    }
    std::vector<std::vector<CompiledRatFunc>> f_c;
    for (const auto& f_l : lp.f_terms) {
        std::vector<CompiledRatFunc> row;
        for (size_t i = 0; i < n; ++i) row.emplace_back(f_l.at(i, 0), state_names, params.values);
        f_c.push_back(std::move(row));
    }

    ResidualReport rep;
    rep.epsilons = epsilons;
    rep.target_slope = target_slope;
    const double min_den = 1e-6;
    for (double eps : epsilons) {
        double sup = 0.0;
        size_t used = 0;
        for (const auto& pt : grid) {
            bool ok = true;
            std::vector<double> x(n, 0.0), dphi_r(n, 0.0), rv(k, 0.0);
            double scale = 1.0;
            for (unsigned o = 0; o <= m && ok; ++o) {
                for (size_t i = 0; i < n && ok; ++i) {
                    auto v = phi_c[o][i].eval_checked(pt.data(), min_den);
                    if (!v) ok = false;
                    else x[i] += scale * *v;
                }
                for (size_t j = 0; j < k && ok; ++j) {
                    auto v = r_c[o][j].eval_checked(pt.data(), min_den);
                    if (!v) ok = false;
                    else rv[j] += scale * *v;
                }
                scale *= eps;
            }
            if (!ok) continue;
            // Dphi(pt,eps) * r(pt,eps)
            scale = 1.0;
            std::vector<double> dphi(n * k, 0.0);
            for (unsigned o = 0; o <= m && ok; ++o) {
                for (size_t e = 0; e < n * k && ok; ++e) {
                    auto v = dphi_c[o][e].eval_checked(pt.data(), min_den);
                    if (!v) ok = false;
                    else dphi[e] += scale * *v;
                }
                scale *= eps;
            }
            if (!ok) continue;
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < k; ++j) dphi_r[i] += dphi[i * k + j] * rv[j];
            // F(x, eps)
            std::vector<double> fx(n, 0.0);
            scale = 1.0;
            for (const auto& row : f_c) {
                for (size_t i = 0; i < n && ok; ++i) {
                    auto v = row[i].eval_checked(x.data(), min_den);
                    if (!v) ok = false;
                    else fx[i] += scale * *v;
                }
                scale *= eps;
            }
            if (!ok) continue;
            ++used;
            for (size_t i = 0; i < n; ++i) sup = std::max(sup, std::fabs(fx[i] - dphi_r[i]));
        }
        if (used == 0)
            throw NumericError("EvaluationError", "every grid point was rejected by the denominator screen");
        rep.sup_residuals.push_back(sup);
    }

    rep.machine_zero = true;
    for (double s : rep.sup_residuals)
        if (s > 1e-13) rep.machine_zero = false;
    if (rep.machine_zero) {
        rep.fitted_slope = std::numeric_limits<double>::quiet_NaN();
        rep.pass = true;
    } else {
        rep.fitted_slope = fit_loglog_slope(rep.epsilons, rep.sup_residuals);
        rep.pass = rep.fitted_slope >= target_slope;
    }
    return rep;
}

namespace {

// Real parts of the eigenvalues of a dense real matrix, sizes 1-3 (all the
// bundled problems have n-k <= 2; size >= 3 uses Durand-Kerner on the
// characteristic polynomial, which also covers larger sizes).
std::vector<double> eigen_real_parts(const std::vector<double>& a, size_t n) {
    if (n == 1) return {a[0]};
    if (n == 2) {
        double tr = a[0] + a[3], det = a[0] * a[3] - a[1] * a[2];
        double disc = tr * tr / 4.0 - det;
        if (disc >= 0) {
            double s = std::sqrt(disc);
            return {tr / 2.0 + s, tr / 2.0 - s};
        }
        return {tr / 2.0, tr / 2.0};
    }
    // Characteristic polynomial via Faddeev-LeVerrier.
    std::vector<double> coef(n + 1, 0.0); // c[0] lambda^n ... c[n]
    coef[0] = 1.0;
    std::vector<double> m(a), id(n * n, 0.0);
    for (size_t i = 0; i < n; ++i) id[i * n + i] = 1.0;
    std::vector<double> mk = id;
    for (size_t kk = 1; kk <= n; ++kk) {
        // mk = A * mk_prev + c_{k-1} I ; c_k = -trace(A*mk)/k
        std::vector<double> am(n * n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                double s = 0;
                for (size_t l = 0; l < n; ++l) s += m[i * n + l] * mk[l * n + j];
                am[i * n + j] = s;
            }
        double tr = 0;
        for (size_t i = 0; i < n; ++i) tr += am[i * n + i];
        coef[kk] = -tr / double(kk);
        for (size_t i = 0; i < n; ++i) am[i * n + i] += coef[kk];
        mk = am;
    }
    // Durand-Kerner on p(z) = z^n + coef[1] z^{n-1} + ... + coef[n].
    std::vector<std::complex<double>> roots(n);
    std::complex<double> seed(0.4, 0.9);
    std::complex<double> z(1.0, 0.0);
    for (size_t i = 0; i < n; ++i) {
        z *= seed;
        roots[i] = z;
    }
    auto poly_at = [&](std::complex<double> w) {
        std::complex<double> acc(1.0, 0.0);
        for (size_t i = 1; i <= n; ++i) acc = acc * w + coef[i];
        return acc;
    };
    for (int iter = 0; iter < 200; ++iter) {
        double move = 0.0;
        for (size_t i = 0; i < n; ++i) {
            std::complex<double> d(1.0, 0.0);
            for (size_t j = 0; j < n; ++j)
                if (j != i) d *= roots[i] - roots[j];
            std::complex<double> step = poly_at(roots[i]) / d;
            roots[i] -= step;
            move = std::max(move, std::abs(step));
        }
        if (move < 1e-13) break;
        if (iter == 199) throw NumericError("NumericalFailure", "eigenvalue iteration did not converge");
    }
    std::vector<double> re;
    for (auto& r : roots) re.push_back(r.real());
    return re;
}

} // namespace

HyperbolicityReport hyperbolicity_probe(const Frame& fr, const std::vector<std::string>& chart_vars,
                                        const std::vector<std::vector<double>>& samples,
                                        const Binding& params, double tolerance) {
    const size_t q = fr.n0_dyn.rows();
    std::vector<CompiledRatFunc> n0_c;
    for (size_t i = 0; i < q; ++i)
        for (size_t j = 0; j < q; ++j) n0_c.emplace_back(fr.n0_dyn.at(i, j), chart_vars, params.values);

    HyperbolicityReport rep;
    rep.tolerance = tolerance;
    rep.min_abs_real_part = std::numeric_limits<double>::infinity();
    for (const auto& pt : samples) {
        std::vector<double> a(q * q);
        bool ok = true;
        for (size_t e = 0; e < q * q && ok; ++e) {
            auto v = n0_c[e].eval_checked(pt.data(), 1e-6);
            if (!v) ok = false;
            else a[e] = *v;
        }
        if (!ok) continue;
        auto re = eigen_real_parts(a, q);
        for (double x : re) rep.min_abs_real_part = std::min(rep.min_abs_real_part, std::fabs(x));
        rep.sample_points.push_back(pt);
        rep.eigenvalue_real_parts.push_back(std::move(re));
    }
    if (rep.sample_points.empty())
        throw NumericError("EvaluationError", "every hyperbolicity sample was rejected");
    rep.pass = rep.min_abs_real_part > tolerance;
    return rep;
}

std::vector<std::vector<double>> make_grid(const std::vector<std::pair<double, double>>& box,
                                           size_t per_dim) {
    std::vector<std::vector<double>> grid{{}};
    for (const auto& [lo, hi] : box) {
        std::vector<std::vector<double>> next;
        for (const auto& base : grid)
            for (size_t i = 0; i < per_dim; ++i) {
                auto p = base;
                p.push_back(per_dim == 1 ? (lo + hi) / 2 : lo + (hi - lo) * double(i) / double(per_dim - 1));
                next.push_back(std::move(p));
            }
        grid = std::move(next);
    }
    return grid;
}

} // namespace slowmani
