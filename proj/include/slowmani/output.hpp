#pragma once

#include <json.hpp>

#include "slowmani/cascade.hpp"
#include "slowmani/numeric.hpp"

namespace slowmani {

// Canonical text of a column vector: bare entry for one component, otherwise
// [a, b, ...].  Matrices render as rows of bracketed lists.
std::string vec_str(const RatMat& m);
std::string mat_str(const RatMat& m);

nlohmann::json json_of_mat(const RatMat& m);
nlohmann::json json_of_series(const EpsSeries& s);

struct ResultDoc {
    std::string text;
    nlohmann::json json;
};

ResultDoc render_expand(const ProblemSpec& spec, const SlowExpansion& slow);
ResultDoc render_fibres(const ProblemSpec& spec, const SlowExpansion& slow, const FibreExpansion& fib);
ResultDoc render_cascade(const ProblemSpec& spec, const CascadeResult& cr);
ResultDoc render_info(const ProblemSpec& spec);

struct ValidateOutcome {
    std::optional<ResidualReport> residual;
    std::optional<HyperbolicityReport> hyperbolicity;
    std::string trajectory_file;
    size_t trajectory_points = 0;
    std::vector<double> trajectory_final;
    bool pass = true;
};

ResultDoc render_validate(const ProblemSpec& spec, const ValidateOutcome& vo);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::vector<std::string>& state_vars);

} // namespace slowmani
