#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slowmani/expr.hpp"
#include "slowmani/matrix.hpp"

namespace slowmani {

enum class Ansatz { ZeroX, Graph };

std::string ansatz_str(Ansatz a, const std::vector<size_t>& graph_indices);

// One `level <i>` section: a user-supplied embedding and fibre frame for the
// next member of the nested slow-manifold chain.
struct LevelSection {
    int index = 0;
    std::vector<std::string> chart_vars;
    RingPtr ring; // params then this level's chart vars
    RatMat phi0;      // parent_dim x 1
    RatMat n0_frame;  // parent_dim x (parent_dim - dim)
    Ansatz ansatz = Ansatz::ZeroX;
    std::vector<size_t> graph_indices; // 0-based into the parent chart vars
};

// A parsed singular perturbation problem.  Rings are ordered parameters
// first, then variables, so that a parameter has the same index in the state
// ring and every chart ring.
struct ProblemSpec {
    std::string name;
    std::vector<std::string> state_vars;
    std::vector<std::string> params;
    std::vector<std::string> chart_vars;

    RingPtr state_ring;
    RingPtr chart_ring;

    std::vector<RatMat> f_terms; // index = eps power; each n x 1 over state_ring
    RatMat phi0;                 // n x 1 over chart_ring
    RatMat n0_frame;             // n x (n-k) over chart_ring
    Ansatz ansatz = Ansatz::ZeroX;
    std::vector<size_t> graph_indices; // 0-based into state_vars

    // Optional numeric-validation box, one closed range per chart variable.
    std::vector<std::pair<double, double>> box;

    std::vector<LevelSection> levels;

    size_t n() const { return state_vars.size(); }
    size_t k() const { return chart_vars.size(); }

    std::vector<size_t> state_var_indices() const;
    std::vector<size_t> chart_var_indices() const;
    std::vector<size_t> param_indices() const;
};

ProblemSpec parse_problem_file(const std::string& source);
ProblemSpec load_problem_file(const std::string& path);

} // namespace slowmani
