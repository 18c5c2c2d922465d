#include "slowmani/output.hpp"

#include <iomanip>
#include <sstream>

namespace slowmani {

using nlohmann::json;

std::string vec_str(const RatMat& m) {
    if (m.rows() == 1 && m.cols() == 1) return m.at(0, 0).str();
    std::string s = "[";
    for (size_t i = 0; i < m.rows(); ++i) {
        if (i) s += ", ";
        s += m.at(i, 0).str();
    }
    return s + "]";
}

std::string mat_str(const RatMat& m) {
    if (m.cols() == 1) return vec_str(m);
    return m.str();
}

json json_of_mat(const RatMat& m) {
    if (m.cols() == 1) {
        json arr = json::array();
        for (size_t i = 0; i < m.rows(); ++i) arr.push_back(m.at(i, 0).str());
        return arr;
    }
    json rows = json::array();
    for (size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (size_t j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j).str());
        rows.push_back(std::move(row));
    }
    return rows;
}

json json_of_series(const EpsSeries& s) {
    json arr = json::array();
    for (unsigned i = 0; i <= s.order(); ++i) arr.push_back(json_of_mat(s.coeff(i)));
    return arr;
}

namespace {

json problem_header_json(const ProblemSpec& spec, const char* command) {
    json j;
    j["command"] = command;
    j["problem"] = spec.name;
    j["n"] = spec.n();
    j["k"] = spec.k();
    j["state_vars"] = spec.state_vars;
    j["params"] = spec.params;
    j["chart_vars"] = spec.chart_vars;
    return j;
}

void series_lines(std::ostringstream& out, const std::string& name, const EpsSeries& s, unsigned from) {
    for (unsigned i = from; i <= s.order(); ++i)
        out << name << i << " = " << vec_str(s.coeff(i)) << "\n";
}

void matrix_series_lines(std::ostringstream& out, const std::string& name, const EpsSeries& s,
                         unsigned from) {
    for (unsigned i = from; i <= s.order(); ++i)
        out << name << i << " = " << mat_str(s.coeff(i)) << "\n";
}

} // namespace

ResultDoc render_expand(const ProblemSpec& spec, const SlowExpansion& slow) {
    ResultDoc doc;
    std::ostringstream out;
    out << "problem " << spec.name << "  (n=" << spec.n() << ", k=" << spec.k() << ", order=" << slow.order
        << ", ansatz=" << ansatz_str(spec.ansatz, spec.graph_indices) << ")\n";
    series_lines(out, "r", slow.r, 1);
    series_lines(out, "phi", slow.phi, 0);
    series_lines(out, "Y", slow.y, 1);
    series_lines(out, "X", slow.x, 1);
    doc.text = out.str();

    json j = problem_header_json(spec, "expand");
    j["order"] = slow.order;
    j["ansatz"] = ansatz_str(spec.ansatz, spec.graph_indices);
    j["series"]["r"] = json_of_series(slow.r);
    j["series"]["phi"] = json_of_series(slow.phi);
    j["series"]["Y"] = json_of_series(slow.y);
    j["series"]["X"] = json_of_series(slow.x);
    doc.json = std::move(j);
    return doc;
}

ResultDoc render_fibres(const ProblemSpec& spec, const SlowExpansion& slow, const FibreExpansion& fib) {
    ResultDoc doc;
    std::ostringstream out;
    out << "problem " << spec.name << "  (n=" << spec.n() << ", k=" << spec.k()
        << ", fibre order=" << fib.order << ")\n";
    matrix_series_lines(out, "N", fib.n_frame, 0);
    matrix_series_lines(out, "n", fib.n_dyn, 0);
    matrix_series_lines(out, "L", fib.l, 1);
    doc.text = out.str();

    json j = problem_header_json(spec, "fibres");
    j["order"] = fib.order;
    j["series"]["N"] = json_of_series(fib.n_frame);
    j["series"]["n"] = json_of_series(fib.n_dyn);
    j["series"]["L"] = json_of_series(fib.l);
    doc.json = std::move(j);
    return doc;
}

ResultDoc render_cascade(const ProblemSpec& spec, const CascadeResult& cr) {
    ResultDoc doc;
    std::ostringstream out;
    out << "problem " << spec.name << "  (cascade depth " << cr.levels.size() + 1 << ")\n";
    out << "dim sequence:";
    for (size_t d : cr.dim_sequence) out << " " << d;
    out << "\nj sequence:";
    for (unsigned jj : cr.j_sequence) out << " " << jj;
    out << "\n";
    out << "level 0 (chart";
    for (const auto& v : spec.chart_vars) out << " " << v;
    out << ", dim " << spec.k() << "): reduced field\n";
    series_lines(out, "  r", cr.top.r, 1);
    for (const auto& lvl : cr.levels) {
        out << "level " << lvl.level_index << " (chart";
        for (size_t idx : lvl.problem.chart_idx) out << " " << lvl.problem.chart_ring->name(idx);
        out << ", dim " << lvl.dim << "): ";
        if (lvl.trivial) {
            out << "infra-slow field ≡ 0 (equilibrium curve)\n";
            continue;
        }
        out << "leading eps power " << lvl.leading_order << "\n";
        for (unsigned i = 0; i <= lvl.reduced_field.order(); ++i)
            out << "  eps^" << lvl.leading_order + i << " coefficient = "
                << vec_str(lvl.reduced_field.coeff(i)) << "\n";
    }
    if (cr.two_path) {
        out << "two-path agreement: "
            << (cr.two_path->equal ? (cr.two_path->direct.is_zero() ? "exact (trivial)" : "exact")
                                   : "MISMATCH")
            << "\n";
        out << "  leading infra-slow term = " << vec_str(cr.two_path->direct) << "\n";
    }
    out << "level conjugacies: " << (cr.conjugacy_ok ? "exact" : "FAILED") << "\n";
    doc.text = out.str();

    json j = problem_header_json(spec, "cascade");
    j["j_sequence"] = cr.j_sequence;
    j["dim_sequence"] = cr.dim_sequence;
    j["conjugacy"] = cr.conjugacy_ok ? "exact" : "failed";
    j["top"]["order"] = cr.top.order;
    j["top"]["r"] = json_of_series(cr.top.r);
    j["top"]["phi"] = json_of_series(cr.top.phi);
    json levels = json::array();
    for (const auto& lvl : cr.levels) {
        json l;
        l["index"] = lvl.level_index;
        l["dim"] = lvl.dim;
        l["trivial"] = lvl.trivial;
        std::vector<std::string> chart;
        for (size_t idx : lvl.problem.chart_idx) chart.push_back(lvl.problem.chart_ring->name(idx));
        l["chart"] = chart;
        if (!lvl.trivial) {
            l["j"] = lvl.leading_order;
            l["reduced_field"] = json_of_series(lvl.reduced_field);
        }
        l["phi"] = json_of_series(lvl.expansion.phi);
        levels.push_back(std::move(l));
    }
    j["levels"] = std::move(levels);
    if (cr.two_path) {
        j["two_path"]["equal"] = cr.two_path->equal;
        j["two_path"]["leading_term"] = json_of_mat(cr.two_path->direct);
    }
    doc.json = std::move(j);
    return doc;
}

ResultDoc render_info(const ProblemSpec& spec) {
    ResultDoc doc;
    std::ostringstream out;
    out << "problem " << spec.name << "\n";
    out << "  state vars (n=" << spec.n() << "):";
    for (const auto& v : spec.state_vars) out << " " << v;
    out << "\n  params:";
    for (const auto& p : spec.params) out << " " << p;
    out << "\n  chart (k=" << spec.k() << "):";
    for (const auto& v : spec.chart_vars) out << " " << v;
    out << "\n  eps powers in F: 0.." << spec.f_terms.size() - 1 << "\n";
    out << "  ansatz: " << ansatz_str(spec.ansatz, spec.graph_indices) << "\n";
    if (!spec.box.empty()) {
        out << "  box:";
        for (auto [lo, hi] : spec.box) out << " " << lo << ":" << hi;
        out << "\n";
    }
    for (const auto& lvl : spec.levels) {
        out << "  level " << lvl.index << ": chart";
        for (const auto& v : lvl.chart_vars) out << " " << v;
        out << " (dim " << lvl.chart_vars.size() << "), ansatz "
            << ansatz_str(lvl.ansatz, lvl.graph_indices) << "\n";
    }
    doc.text = out.str();

    json j = problem_header_json(spec, "info");
    j["f_powers"] = spec.f_terms.size() - 1;
    j["ansatz"] = ansatz_str(spec.ansatz, spec.graph_indices);
    j["levels"] = json::array();
    for (const auto& lvl : spec.levels) {
        json l;
        l["index"] = lvl.index;
        l["chart"] = lvl.chart_vars;
        j["levels"].push_back(std::move(l));
    }
    doc.json = std::move(j);
    return doc;
}

ResultDoc render_validate(const ProblemSpec& spec, const ValidateOutcome& vo) {
    ResultDoc doc;
    std::ostringstream out;
    out << "problem " << spec.name << " validation\n";
    json j = problem_header_json(spec, "validate");
    if (vo.residual) {
        const auto& r = *vo.residual;
        out << "residual fit: slope " << std::setprecision(4) << r.fitted_slope << " (target >= "
            << r.target_slope << ")";
        if (r.machine_zero) out << " [sup residuals at machine zero]";
        out << " -> " << (r.pass ? "PASS" : "FAIL") << "\n";
        out << "  eps:";
        for (double e : r.epsilons) out << " " << e;
        out << "\n  sup:";
        for (double s : r.sup_residuals) out << " " << s;
        out << "\n";
        j["residual"]["epsilons"] = r.epsilons;
        j["residual"]["sup_residuals"] = r.sup_residuals;
        j["residual"]["fitted_slope"] = r.machine_zero ? json() : json(r.fitted_slope);
        j["residual"]["target_slope"] = r.target_slope;
        j["residual"]["machine_zero"] = r.machine_zero;
        j["residual"]["pass"] = r.pass;
    }
    if (vo.hyperbolicity) {
        const auto& h = *vo.hyperbolicity;
        out << "hyperbolicity: min |Re lambda| = " << h.min_abs_real_part << " over "
            << h.sample_points.size() << " samples (tol " << h.tolerance << ") -> "
            << (h.pass ? "PASS" : "FAIL") << "\n";
        j["hyperbolicity"]["min_abs_real_part"] = h.min_abs_real_part;
        j["hyperbolicity"]["samples"] = h.sample_points.size();
        j["hyperbolicity"]["tolerance"] = h.tolerance;
        j["hyperbolicity"]["pass"] = h.pass;
    }
    if (!vo.trajectory_file.empty()) {
        out << "trajectory: wrote " << vo.trajectory_points << " points to " << vo.trajectory_file
            << "\n  final state:";
        for (double v : vo.trajectory_final) out << " " << v;
        out << "\n";
        j["trajectory"]["file"] = vo.trajectory_file;
        j["trajectory"]["points"] = vo.trajectory_points;
        j["trajectory"]["final_state"] = vo.trajectory_final;
    }
    out << "overall: " << (vo.pass ? "PASS" : "FAIL") << "\n";
    j["pass"] = vo.pass;
    doc.text = out.str();
    doc.json = std::move(j);
    return doc;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::vector<std::string>& state_vars) {
    out << "t";
    for (const auto& v : state_vars) out << "," << v;
    out << "\n";
    out << std::setprecision(15);
    for (size_t i = 0; i < traj.times.size(); ++i) {
        out << traj.times[i];
        for (double v : traj.states[i]) out << "," << v;
        out << "\n";
    }
}

} // namespace slowmani
