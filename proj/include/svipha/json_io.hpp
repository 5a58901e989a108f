#pragma once

#include <string>

#include "json.hpp"
#include "svipha/elicitation.hpp"
#include "svipha/pha.hpp"
#include "svipha/svi_model.hpp"

namespace svipha {

/// Instance schema:
///   {"n1": int, "n2": int,
///    "scenarios": [{"p": real, "M": [[...], ...], "q": [...]}, ...]}
/// with M stored row-major as the full (n1+n2) x (n1+n2) matrix. An optional
/// "n_basis" entry (list of flat-coordinate basis vectors) overrides the
/// subspace split used by the elicitation checkers.
nlohmann::json slcp_to_json(const TwoStageSlcp& slcp);
TwoStageSlcp slcp_from_json(const nlohmann::json& j);

SviProblem problem_from_json(const nlohmann::json& j);
SviProblem load_instance(const std::string& path);
void save_instance(const TwoStageSlcp& slcp, const std::string& path);

/// Report schema: {status, iterations, final_error, wall_time_s,
/// x1: [...], x2: {"<scenario>": [...]}, w: {"<scenario>": [...]}}.
nlohmann::json report_to_json(const SolveReport& report, int n1);
void save_report(const SolveReport& report, int n1, const std::string& path);

/// History CSV: header "iteration,err,rs_norm", one row per outer iteration.
void save_history_csv(const SolveReport& report, const std::string& path);

/// Reads the x1/x2 fields of a report (or a bare solution in the same
/// shape) back into a policy over the given problem's space.
Policy solution_from_json(const SviProblem& problem, const nlohmann::json& j);
Policy load_solution(const SviProblem& problem, const std::string& path);

nlohmann::json elicitation_report_to_json(const ElicitationReport& report);

std::string solve_status_name(SolveStatus status);

}  // namespace svipha
