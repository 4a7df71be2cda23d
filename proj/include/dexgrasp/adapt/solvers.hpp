#pragma once

#include "dexgrasp/adapt/losses.hpp"

#include <functional>

namespace dexgrasp::adapt {

struct SolverOptions {
  int iterations = 100;
  double step = 0.5;
  int max_halvings = 30;
  /// Divide the step by the squared Frobenius norm of the keypoint Jacobian
  /// at the start point, making the step size independent of the hand scale.
  bool scale_by_jacobian = true;
};

struct SolveResult {
  Eigen::VectorXd dj;
  double loss = 0.0;
  int iterations = 0;  // accepted descent steps
};

using Objective = std::function<LossValue(const Eigen::VectorXd&)>;

/// Projected gradient descent from `x0` with backtracking: a step that
/// increases the objective is halved until it does not. `project` maps an
/// iterate back into the feasible set.
SolveResult descend(const Objective& f, const Eigen::VectorXd& x0,
                    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& project, double step,
                    const SolverOptions& options);

/// Joint change that tracks keypoint displacements `dp` by minimising the cycle loss.
SolveResult ob_ik_solve(const model::GripperModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& dp,
                        const SolverOptions& options = {});

/// As ob_ik_solve with the self-collision term added (weight omega).
SolveResult ob_ik_sc_solve(const model::GripperModel& model, const CollisionContext& ctx, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& dp, const SolverOptions& options = {}, double omega = 1.0);

/// Step size used by the OB solvers at configuration q.
double scaled_step(const model::GripperModel& model, const Eigen::VectorXd& q, const SolverOptions& options);

}  // namespace dexgrasp::adapt
