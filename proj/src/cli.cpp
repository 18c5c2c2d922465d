#include "slowmani/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "slowmani/output.hpp"

namespace slowmani {

double parse_eps_token(const std::string& tok) {
    size_t epos = tok.find_first_of("eE");
    if (epos != std::string::npos && tok.find('.', epos) != std::string::npos) {
        double mant = std::stod(tok.substr(0, epos));
        double expo = std::stod(tok.substr(epos + 1));
        return mant * std::pow(10.0, expo);
    }
    return std::stod(tok);
}

namespace {

struct RunConfig {
    std::string command;
    std::string input_path;
    unsigned order = 2;
    std::string ansatz_override;
    std::string format = "text";
    std::string output_path;
    std::vector<std::string> param_args;
    std::string eps_arg;
    std::string grid_arg;
    std::string traj_arg;
    std::string traj_out;
    double dt = 0.01;
    double tmax = 100.0;
    double hyp_tol = 1e-8;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

void apply_ansatz_override(ProblemSpec& spec, const std::string& override_str) {
    if (override_str.empty()) return;
    if (override_str == "zero") {
        spec.ansatz = Ansatz::ZeroX;
        spec.graph_indices.clear();
        return;
    }
    if (override_str.rfind("graph:", 0) == 0) {
        std::vector<size_t> idx;
        for (const auto& part : split(override_str.substr(6), ','))
            idx.push_back(size_t(std::stol(part) - 1));
        spec.ansatz = Ansatz::Graph;
        spec.graph_indices = idx;
        for (size_t j = 0; j < idx.size(); ++j) {
            if (j >= spec.k() || idx[j] >= spec.n())
                throw SpecError("DimensionMismatch", "graph override index out of range");
            RatFunc expected =
                RatFunc::variable(spec.chart_ring, spec.chart_ring->index_of(spec.chart_vars[j]));
            if (spec.phi0.at(idx[j], 0) != expected)
                throw SpecError("InvalidAnsatz",
                                "graph override coordinate does not match the embedding");
        }
        if (idx.size() != spec.k())
            throw SpecError("DimensionMismatch", "graph override needs one index per chart variable");
        return;
    }
    throw SpecError("InvalidAnsatz", "ansatz override must be 'zero' or 'graph:i[,j,...]'");
}

Binding make_binding(const ProblemSpec& spec, const std::vector<std::string>& param_args) {
    Binding b;
    for (const auto& pa : param_args) {
        auto eq = pa.find('=');
        if (eq == std::string::npos)
            throw SpecError("ParseError", "--param expects name=value, got '" + pa + "'");
        std::string name = pa.substr(0, eq);
        if (std::find(spec.params.begin(), spec.params.end(), name) == spec.params.end())
            throw SpecError("UnknownSymbol", "unknown parameter '" + name + "'");
        b.values[name] = std::stod(pa.substr(eq + 1));
    }
    for (const auto& p : spec.params)
        if (!b.values.count(p))
            throw SpecError("MissingBinding", "parameter '" + p + "' needs a --param value");
    return b;
}

std::vector<std::pair<double, double>> parse_grid_arg(const std::string& arg) {
    std::vector<std::pair<double, double>> box;
    for (const auto& part : split(arg, ',')) {
        auto colon = part.find(':');
        if (colon == std::string::npos)
            throw SpecError("ParseError", "--grid expects lo:hi ranges, got '" + part + "'");
        box.emplace_back(std::stod(part.substr(0, colon)), std::stod(part.substr(colon + 1)));
    }
    return box;
}

void emit(const ResultDoc& doc, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::string payload = cfg.format == "json" ? doc.json.dump(2) + "\n" : doc.text;
    if (cfg.output_path.empty()) {
        out << payload;
    } else {
        std::ofstream f(cfg.output_path);
        if (!f) throw SpecError("FileNotFound", "cannot write '" + cfg.output_path + "'");
        f << payload;
        err << "wrote " << cfg.output_path << "\n";
    }
}

std::vector<unsigned> cascade_orders(const ProblemSpec& spec, unsigned top_order) {
    std::vector<unsigned> orders{top_order};
    unsigned prev = top_order;
    for (size_t i = 0; i < spec.levels.size(); ++i) {
        unsigned next = prev > 1 ? prev - 1 : 1;
        orders.push_back(next);
        prev = next;
    }
    return orders;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    ProblemSpec spec = load_problem_file(cfg.input_path);
    apply_ansatz_override(spec, cfg.ansatz_override);

    if (cfg.command == "info") {
        emit(render_info(spec), cfg, out, err);
        return 0;
    }

    if (cfg.command == "expand") {
        if (cfg.order < 1) throw SpecError("ParseError", "--order must be >= 1");
        SlowExpansion slow = expand_slow_manifold(level0_problem(spec), cfg.order);
        emit(render_expand(spec, slow), cfg, out, err);
        return 0;
    }

    if (cfg.command == "fibres") {
        LevelProblem lp = level0_problem(spec);
        SlowExpansion slow = expand_slow_manifold(lp, std::max(cfg.order, 1u));
        FibreExpansion fib = expand_fibre_bundle(lp, slow, cfg.order);
        emit(render_fibres(spec, slow, fib), cfg, out, err);
        return 0;
    }

    if (cfg.command == "cascade") {
        if (cfg.order < 1) throw SpecError("ParseError", "--order must be >= 1");
        if (spec.levels.empty())
            throw SpecError("MissingSection", "cascade needs at least one 'level' section");
        CascadeResult cr = run_cascade(spec, cascade_orders(spec, cfg.order));
        emit(render_cascade(spec, cr), cfg, out, err);
        return cr.conjugacy_ok ? 0 : 3;
    }

    if (cfg.command == "validate") {
        Binding binding = make_binding(spec, cfg.param_args);
        std::vector<double> epsilons;
        if (!cfg.eps_arg.empty())
            for (const auto& tok : split(cfg.eps_arg, ',')) epsilons.push_back(parse_eps_token(tok));
        if (epsilons.empty()) throw SpecError("MissingBinding", "validate needs --eps");

        std::vector<std::pair<double, double>> box =
            cfg.grid_arg.empty() ? spec.box : parse_grid_arg(cfg.grid_arg);
        if (box.empty())
            throw SpecError("MissingSection",
                            "validate needs a grid box: declare 'box' in the file or pass --grid");
        if (box.size() != spec.k())
            throw SpecError("DimensionMismatch", "grid box needs one range per chart variable");

        LevelProblem lp = level0_problem(spec);
        SlowExpansion slow = expand_slow_manifold(lp, std::max(cfg.order, 1u));
        auto grid = make_grid(box);

        ValidateOutcome vo;
        if (epsilons.size() >= 3) {
            double target = double(cfg.order + 1) - 0.25;
            vo.residual = residual_order_fit(lp, slow, grid, epsilons, binding, target);
            vo.pass = vo.pass && vo.residual->pass;
        }
        vo.hyperbolicity = hyperbolicity_probe(slow.frame, spec.chart_vars, grid, binding, cfg.hyp_tol);
        vo.pass = vo.pass && vo.hyperbolicity->pass;

        if (!cfg.traj_arg.empty()) {
            std::vector<double> x0;
            for (const auto& tok : split(cfg.traj_arg, ',')) x0.push_back(std::stod(tok));
            if (x0.size() != spec.n())
                throw SpecError("DimensionMismatch", "--traj needs one coordinate per state variable");
            Binding tb = binding;
            tb.epsilon = epsilons.front();
            size_t steps = size_t(std::llround(cfg.tmax / cfg.dt));
            size_t record = std::max<size_t>(1, steps / 2000);
            Trajectory traj = integrate_rk4(compile_field(spec, tb), spec.n(), x0, cfg.dt, steps, record);
            std::string path = cfg.traj_out.empty() ? spec.name + "_traj.csv" : cfg.traj_out;
            std::ofstream f(path);
            if (!f) throw SpecError("FileNotFound", "cannot write '" + path + "'");
            write_trajectory_csv(f, traj, spec.state_vars);
            vo.trajectory_file = path;
            vo.trajectory_points = traj.times.size();
            vo.trajectory_final = traj.final_state;
        }

        emit(render_validate(spec, vo), cfg, out, err);
        return vo.pass ? 0 : 4;
    }

    throw SpecError("ParseError", "unknown command '" + cfg.command + "'");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (const char* limit = std::getenv("SLOWMANI_MAX_DEGREE")) {
        try {
            set_degree_limit(unsigned(std::stoul(limit)));
        } catch (...) {
            err << "warning: ignoring malformed SLOWMANI_MAX_DEGREE\n";
        }
    }

    CLI::App app{"slowmani: exact eps-series for slow manifolds, fast fibre bundles and timescale cascades"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub, bool with_order) {
        sub->add_option("file", cfg.input_path, "problem file (.gspt)")->required();
        if (with_order) sub->add_option("--order", cfg.order, "truncation order (default 2)");
        sub->add_option("--ansatz", cfg.ansatz_override, "override: zero | graph:i[,j,...]");
        sub->add_option("--format", cfg.format, "text | json")
            ->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--output", cfg.output_path, "write the result document here");
    };

    add_common(app.add_subcommand("expand", "slow-manifold expansion"), true);
    add_common(app.add_subcommand("fibres", "fast fibre bundle expansion"), true);
    add_common(app.add_subcommand("cascade", "nested timescale cascade"), true);
    add_common(app.add_subcommand("info", "print the parsed problem"), false);
    CLI::App* validate = app.add_subcommand("validate", "numeric validation");
    add_common(validate, true);
    validate->add_option("--param", cfg.param_args, "parameter binding name=value");
    validate->add_option("--eps", cfg.eps_arg, "comma-separated eps values (1e-1.5 style allowed)");
    validate->add_option("--grid", cfg.grid_arg, "lo:hi[,lo:hi] chart box, overrides the file's box");
    validate->add_option("--traj", cfg.traj_arg, "initial state x1,...,xn for an RK4 trajectory");
    validate->add_option("--traj-out", cfg.traj_out, "trajectory CSV path");
    validate->add_option("--dt", cfg.dt, "RK4 step size (default 0.01)");
    validate->add_option("--tmax", cfg.tmax, "RK4 horizon (default 100)");
    validate->add_option("--hyp-tol", cfg.hyp_tol, "hyperbolicity tolerance (default 1e-8)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 1;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        return dispatch(cfg, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return int(e.category());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace slowmani
