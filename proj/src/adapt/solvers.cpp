#include "dexgrasp/adapt/solvers.hpp"

namespace dexgrasp::adapt {

SolveResult descend(const Objective& f, const Eigen::VectorXd& x0,
                    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& project, double step,
                    const SolverOptions& options) {
  SolveResult res;
  res.dj = x0;
  LossValue cur = f(res.dj);
  for (int it = 0; it < options.iterations; ++it) {
    if (cur.grad.squaredNorm() == 0.0) break;
    double alpha = step;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, alpha *= 0.5) {
      const Eigen::VectorXd cand = project(res.dj - alpha * cur.grad);
      const LossValue next = f(cand);
      if (next.value <= cur.value) {
        accepted = next.value < cur.value || cand != res.dj;
        res.dj = cand;
        cur = next;
        break;
      }
    }
    if (!accepted) break;
    ++res.iterations;
  }
  res.loss = cur.value;
  return res;
}

double scaled_step(const model::GripperModel& model, const Eigen::VectorXd& q, const SolverOptions& options) {
  if (!options.scale_by_jacobian) return options.step;
  const double norm2 = model::keypoint_jacobian(model, q).squaredNorm();
  return norm2 > 0.0 ? options.step / norm2 : options.step;
}

namespace {

std::function<Eigen::VectorXd(const Eigen::VectorXd&)> limit_projection(const model::GripperModel& model,
                                                                        const Eigen::VectorXd& q) {
  return [&model, q](const Eigen::VectorXd& dj) -> Eigen::VectorXd {
    return (q + dj).cwiseMax(model.lower()).cwiseMin(model.upper()) - q;
  };
}

}  // namespace

SolveResult ob_ik_solve(const model::GripperModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& dp,
                        const SolverOptions& options) {
  return descend([&](const Eigen::VectorXd& dj) { return cycle_point_loss(model, q, dj, dp); },
                 Eigen::VectorXd::Zero(model.dof()), limit_projection(model, q), scaled_step(model, q, options),
                 options);
}

SolveResult ob_ik_sc_solve(const model::GripperModel& model, const CollisionContext& ctx, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& dp, const SolverOptions& options, double omega) {
  return descend([&](const Eigen::VectorXd& dj) { return total_adaptation_loss(model, ctx, q, dj, dp, omega); },
                 Eigen::VectorXd::Zero(model.dof()), limit_projection(model, q), scaled_step(model, q, options),
                 options);
}

}  // namespace dexgrasp::adapt
