#include "svipha/scenario_space.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace svipha {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

ScenarioSpace::ScenarioSpace(std::vector<int> stage_dims,
                             std::vector<Scenario> scenarios)
    : stage_dims_(std::move(stage_dims)), scenarios_(std::move(scenarios)) {
  const int num_stages = static_cast<int>(stage_dims_.size());
  require(num_stages >= 1, "scenario space needs at least one stage");
  require(!scenarios_.empty(), "scenario space needs at least one scenario");

  stage_offsets_.resize(num_stages);
  decision_dim_ = 0;
  for (int k = 0; k < num_stages; ++k) {
    require(stage_dims_[k] >= 0, "negative stage dimension");
    stage_offsets_[k] = decision_dim_;
    decision_dim_ += stage_dims_[k];
  }
  require(decision_dim_ >= 1, "total decision dimension must be positive");

  double total = 0.0;
  for (const Scenario& s : scenarios_) {
    require(s.probability > 0.0, "scenario probabilities must be positive");
    require(static_cast<int>(s.branch.size()) == num_stages - 1,
            "branch label count must be num_stages - 1");
    total += s.probability;
  }
  require(std::abs(total - 1.0) <= 1e-12,
          "scenario probabilities must sum to 1 within 1e-12");

  // Group scenarios per stage by the branch prefix visible at that stage.
  // Prefix grouping makes the information structure prefix-consistent by
  // construction. Groups are ordered by first occurrence.
  groups_.resize(num_stages);
  const int num_scen = static_cast<int>(scenarios_.size());
  for (int k = 0; k < num_stages; ++k) {
    std::map<std::vector<int>, int> index_of;
    for (int i = 0; i < num_scen; ++i) {
      std::vector<int> prefix(scenarios_[i].branch.begin(),
                              scenarios_[i].branch.begin() + k);
      auto [it, inserted] = index_of.try_emplace(prefix, -1);
      if (inserted) {
        it->second = static_cast<int>(groups_[k].size());
        groups_[k].emplace_back();
      }
      Group& g = groups_[k][it->second];
      g.members.push_back(i);
      g.probability += scenarios_[i].probability;
    }
  }
}

std::shared_ptr<const ScenarioSpace> ScenarioSpace::create(
    std::vector<int> stage_dims, std::vector<Scenario> scenarios) {
  return std::shared_ptr<const ScenarioSpace>(
      new ScenarioSpace(std::move(stage_dims), std::move(scenarios)));
}

std::shared_ptr<const ScenarioSpace> ScenarioSpace::two_stage(
    int stage1_dim, int stage2_dim, const std::vector<double>& probabilities) {
  std::vector<Scenario> scenarios(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    scenarios[i].probability = probabilities[i];
    scenarios[i].branch = {static_cast<int>(i)};
  }
  return create({stage1_dim, stage2_dim}, std::move(scenarios));
}

std::shared_ptr<const ScenarioSpace> ScenarioSpace::deterministic(int dim) {
  return create({dim}, {Scenario{1.0, {}}});
}

Policy::Policy(ScenarioSpacePtr space, Eigen::MatrixXd values)
    : space_(std::move(space)), values_(std::move(values)) {
  require(space_ != nullptr, "policy needs a scenario space");
  require(values_.rows() == space_->num_scenarios() &&
              values_.cols() == space_->decision_dim(),
          "policy values must be J x n");
  require(values_.allFinite(), "policy values must be finite");
}

Policy Policy::zero(ScenarioSpacePtr space) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(space->num_scenarios(),
                                            space->decision_dim());
  return Policy(std::move(space), std::move(v));
}

Policy Policy::constant(ScenarioSpacePtr space, const Eigen::VectorXd& row) {
  require(row.size() == space->decision_dim(), "row dimension mismatch");
  Eigen::MatrixXd v(space->num_scenarios(), space->decision_dim());
  v.rowwise() = row.transpose();
  return Policy(std::move(space), std::move(v));
}

namespace {

void require_same_space(const Policy& x, const Policy& y) {
  require(x.space() == y.space() ||
              (x.space() && y.space() &&
               x.space()->num_scenarios() == y.space()->num_scenarios() &&
               x.space()->decision_dim() == y.space()->decision_dim()),
          "policies live on different scenario spaces");
}

}  // namespace

double inner_product(const Policy& x, const Policy& y) {
  require_same_space(x, y);
  const ScenarioSpace& sp = *x.space();
  double acc = 0.0;
  for (int i = 0; i < sp.num_scenarios(); ++i)
    acc += sp.probability(i) * x.values().row(i).dot(y.values().row(i));
  return acc;
}

double policy_norm(const Policy& x) { return std::sqrt(inner_product(x, x)); }

Policy project_nonanticipative(const Policy& x) {
  const ScenarioSpace& sp = *x.space();
  Eigen::MatrixXd out = x.values();
  for (int k = 0; k < sp.num_stages(); ++k) {
    const int off = sp.stage_offset(k);
    const int dim = sp.stage_dim(k);
    if (dim == 0) continue;
    for (const ScenarioSpace::Group& g : sp.stage_groups(k)) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(dim);
      for (int i : g.members)
        mean += (sp.probability(i) / g.probability) *
                x.values().row(i).segment(off, dim);
      for (int i : g.members) out.row(i).segment(off, dim) = mean;
    }
  }
  return Policy(x.space(), std::move(out));
}

Policy project_multiplier(const Policy& x) {
  Policy nx = project_nonanticipative(x);
  return Policy(x.space(), x.values() - nx.values());
}

double multiplier_defect(const Policy& w) {
  const ScenarioSpace& sp = *w.space();
  double defect = 0.0;
  for (int k = 0; k < sp.num_stages(); ++k) {
    const int off = sp.stage_offset(k);
    const int dim = sp.stage_dim(k);
    if (dim == 0) continue;
    for (const ScenarioSpace::Group& g : sp.stage_groups(k)) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(dim);
      for (int i : g.members)
        mean += (sp.probability(i) / g.probability) *
                w.values().row(i).segment(off, dim);
      defect = std::max(defect, mean.cwiseAbs().maxCoeff());
    }
  }
  return defect;
}

double nonanticipativity_defect(const Policy& x) {
  Policy nx = project_nonanticipative(x);
  return (x.values() - nx.values()).cwiseAbs().maxCoeff();
}

bool is_nonanticipative_exact(const Policy& x) {
  const ScenarioSpace& sp = *x.space();
  for (int k = 0; k < sp.num_stages(); ++k) {
    const int off = sp.stage_offset(k);
    const int dim = sp.stage_dim(k);
    if (dim == 0) continue;
    for (const ScenarioSpace::Group& g : sp.stage_groups(k)) {
      const int first = g.members.front();
      for (int i : g.members)
        if (x.values().row(i).segment(off, dim) !=
            x.values().row(first).segment(off, dim))
          return false;
    }
  }
  return true;
}

Eigen::VectorXd to_iso(const Policy& x) {
  const ScenarioSpace& sp = *x.space();
  const int n = sp.decision_dim();
  Eigen::VectorXd v(sp.iso_dim());
  for (int i = 0; i < sp.num_scenarios(); ++i)
    v.segment(i * n, n) =
        std::sqrt(sp.probability(i)) * x.values().row(i).transpose();
  return v;
}

Policy from_iso(ScenarioSpacePtr space, const Eigen::VectorXd& v) {
  const int n = space->decision_dim();
  const int num_scen = space->num_scenarios();
  require(v.size() == static_cast<Eigen::Index>(n) * num_scen,
          "iso vector length must equal n * J");
  Eigen::MatrixXd values(num_scen, n);
  for (int i = 0; i < num_scen; ++i)
    values.row(i) = v.segment(i * n, n).transpose() /
                    std::sqrt(space->probability(i));
  return Policy(std::move(space), std::move(values));
}

Eigen::MatrixXd iso_nonanticipative_basis(const ScenarioSpace& space) {
  const int n = space.decision_dim();
  int dim = 0;
  for (int k = 0; k < space.num_stages(); ++k)
    dim += static_cast<int>(space.stage_groups(k).size()) * space.stage_dim(k);

  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(space.iso_dim(), dim);
  int col = 0;
  for (int k = 0; k < space.num_stages(); ++k) {
    const int off = space.stage_offset(k);
    for (const ScenarioSpace::Group& g : space.stage_groups(k)) {
      const double scale = 1.0 / std::sqrt(g.probability);
      for (int c = 0; c < space.stage_dim(k); ++c) {
        for (int i : g.members)
          basis(i * n + off + c, col) =
              std::sqrt(space.probability(i)) * scale;
        ++col;
      }
    }
  }
  return basis;
}

Eigen::MatrixXd iso_multiplier_basis(const ScenarioSpace& space) {
  Eigen::MatrixXd pm = iso_projection_matrix(space, Subspace::Multiplier);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pm);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition of projector failed");
  int dim = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > 0.5) ++dim;
  Eigen::MatrixXd basis(space.iso_dim(), dim);
  int col = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > 0.5) basis.col(col++) = es.eigenvectors().col(i);
  return basis;
}

Eigen::MatrixXd iso_projection_matrix(const ScenarioSpace& space,
                                      Subspace which) {
  Eigen::MatrixXd bn = iso_nonanticipative_basis(space);
  Eigen::MatrixXd pn = bn * bn.transpose();
  if (which == Subspace::Nonanticipative) return pn;
  return Eigen::MatrixXd::Identity(space.iso_dim(), space.iso_dim()) - pn;
}

}  // namespace svipha
