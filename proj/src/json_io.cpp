#include "svipha/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace svipha {

using nlohmann::json;

nlohmann::json slcp_to_json(const TwoStageSlcp& slcp) {
  json j;
  j["n1"] = slcp.n1;
  j["n2"] = slcp.n2;
  j["scenarios"] = json::array();
  for (int i = 0; i < slcp.num_scenarios(); ++i) {
    json scen;
    scen["p"] = slcp.probabilities[i];
    json rows = json::array();
    for (int r = 0; r < slcp.dim(); ++r) {
      json row = json::array();
      for (int c = 0; c < slcp.dim(); ++c) row.push_back(slcp.m[i](r, c));
      rows.push_back(std::move(row));
    }
    scen["M"] = std::move(rows);
    json q = json::array();
    for (int r = 0; r < slcp.dim(); ++r) q.push_back(slcp.q[i][r]);
    scen["q"] = std::move(q);
    j["scenarios"].push_back(std::move(scen));
  }
  return j;
}

TwoStageSlcp slcp_from_json(const nlohmann::json& j) {
  TwoStageSlcp slcp;
  try {
    slcp.n1 = j.at("n1").get<int>();
    slcp.n2 = j.at("n2").get<int>();
    const int n = slcp.dim();
    for (const json& scen : j.at("scenarios")) {
      slcp.probabilities.push_back(scen.at("p").get<double>());
      const json& rows = scen.at("M");
      if (static_cast<int>(rows.size()) != n)
        throw std::invalid_argument("matrix row count != n1 + n2");
      Eigen::MatrixXd m(n, n);
      for (int r = 0; r < n; ++r) {
        if (static_cast<int>(rows[r].size()) != n)
          throw std::invalid_argument("matrix column count != n1 + n2");
        for (int c = 0; c < n; ++c) m(r, c) = rows[r][c].get<double>();
      }
      slcp.m.push_back(std::move(m));
      const json& qj = scen.at("q");
      if (static_cast<int>(qj.size()) != n)
        throw std::invalid_argument("offset length != n1 + n2");
      Eigen::VectorXd q(n);
      for (int r = 0; r < n; ++r) q[r] = qj[r].get<double>();
      slcp.q.push_back(std::move(q));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed instance: ") + e.what());
  }
  slcp.validate();
  return slcp;
}

SviProblem problem_from_json(const nlohmann::json& j) {
  SviProblem problem = make_problem(slcp_from_json(j));
  if (j.contains("n_basis")) {
    const json& vectors = j.at("n_basis");
    const int rows = problem.space->iso_dim();
    Eigen::MatrixXd basis(rows, vectors.size());
    for (std::size_t c = 0; c < vectors.size(); ++c) {
      if (static_cast<int>(vectors[c].size()) != rows)
        throw std::invalid_argument("n_basis vector has wrong length");
      for (int r = 0; r < rows; ++r) basis(r, c) = vectors[c][r].get<double>();
    }
    problem.custom_iso_n_basis = std::move(basis);
  }
  return problem;
}

SviProblem load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("instance is not valid JSON: ") +
                                e.what());
  }
  return problem_from_json(j);
}

void save_instance(const TwoStageSlcp& slcp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << slcp_to_json(slcp).dump(2) << "\n";
}

std::string solve_status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::InnerFailure: return "InnerFailure";
  }
  return "Unknown";
}

nlohmann::json report_to_json(const SolveReport& report, int n1) {
  json j;
  j["status"] = solve_status_name(report.status);
  j["iterations"] = report.iterations;
  j["final_error"] = report.final_error;
  j["wall_time_s"] = report.wall_time_s;

  const Policy& x = report.x_final;
  const int n = static_cast<int>(x.values().cols());
  json x1 = json::array();
  for (int c = 0; c < n1; ++c) x1.push_back(x.values()(0, c));
  j["x1"] = std::move(x1);

  json x2 = json::object();
  json w = json::object();
  for (int i = 0; i < x.values().rows(); ++i) {
    json second = json::array();
    for (int c = n1; c < n; ++c) second.push_back(x.values()(i, c));
    x2[std::to_string(i)] = std::move(second);
    json wi = json::array();
    for (int c = 0; c < n; ++c) wi.push_back(report.w_final.values()(i, c));
    w[std::to_string(i)] = std::move(wi);
  }
  j["x2"] = std::move(x2);
  j["w"] = std::move(w);
  return j;
}

void save_report(const SolveReport& report, int n1, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << report_to_json(report, n1).dump(2) << "\n";
}

void save_history_csv(const SolveReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "iteration,err,rs_norm\n";
  char line[96];
  for (std::size_t k = 0; k < report.error_history.size(); ++k) {
    const double rs = k < report.rs_norm_history.size()
                          ? report.rs_norm_history[k]
                          : 0.0;
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g\n", k + 1,
                  report.error_history[k], rs);
    out << line;
  }
}

Policy solution_from_json(const SviProblem& problem, const nlohmann::json& j) {
  const ScenarioSpace& sp = *problem.space;
  const int n = sp.decision_dim();
  const json& x1 = j.at("x1");
  const int n1 = static_cast<int>(x1.size());
  if (n1 > n) throw std::invalid_argument("x1 longer than decision dimension");
  Eigen::MatrixXd values(sp.num_scenarios(), n);
  for (int i = 0; i < sp.num_scenarios(); ++i) {
    for (int c = 0; c < n1; ++c) values(i, c) = x1[c].get<double>();
    const json& x2 = j.at("x2").at(std::to_string(i));
    if (static_cast<int>(x2.size()) != n - n1)
      throw std::invalid_argument("x2 block has wrong length");
    for (int c = n1; c < n; ++c) values(i, c) = x2[c - n1].get<double>();
  }
  return Policy(problem.space, std::move(values));
}

Policy load_solution(const SviProblem& problem, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open solution file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("solution is not valid JSON: ") +
                                e.what());
  }
  return solution_from_json(problem, j);
}

nlohmann::json elicitation_report_to_json(const ElicitationReport& report) {
  json j;
  j["criterion"] = criterion_name(report.criterion);
  j["applicable"] = report.applicable;
  if (report.level_bound) {
    j["level_bound"] = *report.level_bound;
    j["strict"] = report.strict;
  } else {
    j["level_bound"] = nullptr;
  }
  j["grid_certified"] = report.grid_certified;
  if (!report.failure_reason.empty()) j["failure_reason"] = report.failure_reason;

  json cert;
  auto emit = [&cert](const char* key, const std::vector<double>& v) {
    if (!v.empty()) cert[key] = v;
  };
  emit("alpha", report.alphas);
  emit("beta", report.betas);
  emit("gamma", report.gammas);
  emit("min_eigenvalues", report.min_eigenvalues);
  emit("df_eigenvalues", report.df_eigenvalues);
  emit("projector_eigenvalues", report.projector_eigenvalues);
  emit("spectral_radii", report.spectral_radii);
  if (report.min_multiplicity > 0)
    cert["min_multiplicity"] = report.min_multiplicity;
  if (!report.block_pairing.empty()) {
    json pairing = json::array();
    for (auto [i, k] : report.block_pairing) pairing.push_back({i, k});
    cert["block_pairing"] = std::move(pairing);
  }
  if (std::isfinite(report.min_dominance_margin) &&
      report.min_dominance_margin != 0.0)
    cert["min_dominance_margin"] = report.min_dominance_margin;
  if (report.open_superset_mode) cert["domain"] = "open-superset";
  j["certificate"] = std::move(cert);

  json defects;
  defects["symmetry"] = report.symmetry_defect;
  defects["commutation"] = report.commutation_defect;
  defects["trace"] = report.trace_defect;
  defects["diagonality"] = report.diagonality_defect;
  if (report.failing_row >= 0) defects["failing_row"] = report.failing_row;
  j["defects"] = std::move(defects);
  return j;
}

}  // namespace svipha
