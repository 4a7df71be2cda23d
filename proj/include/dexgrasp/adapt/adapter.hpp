#pragma once

#include "dexgrasp/adapt/net.hpp"
#include "dexgrasp/adapt/solvers.hpp"

#include <memory>
#include <string>

namespace dexgrasp::adapt {

/// Maps desired finger keypoint displacements (6K, base frame) to a joint change.
class Adapter {
 public:
  virtual ~Adapter() = default;
  virtual std::string name() const = 0;
  virtual Eigen::VectorXd adapt(const Eigen::VectorXd& q, const Eigen::VectorXd& dp) = 0;
};

class LearnedAdapter : public Adapter {
 public:
  LearnedAdapter(const model::GripperModel& model, const AdaptationNet& net) : model_(model), net_(net) {}
  std::string name() const override { return "lb-ik-sc"; }
  Eigen::VectorXd adapt(const Eigen::VectorXd& q, const Eigen::VectorXd& dp) override;

 private:
  const model::GripperModel& model_;
  const AdaptationNet& net_;
};

class ObIkAdapter : public Adapter {
 public:
  ObIkAdapter(const model::GripperModel& model, SolverOptions options = {}) : model_(model), options_(options) {}
  std::string name() const override { return "ob-ik"; }
  Eigen::VectorXd adapt(const Eigen::VectorXd& q, const Eigen::VectorXd& dp) override;

 private:
  const model::GripperModel& model_;
  SolverOptions options_;
};

class ObIkScAdapter : public Adapter {
 public:
  ObIkScAdapter(const model::GripperModel& model, const CollisionContext& ctx, SolverOptions options = {},
                double omega = 1.0)
      : model_(model), ctx_(ctx), options_(options), omega_(omega) {}
  std::string name() const override { return "ob-ik-sc"; }
  Eigen::VectorXd adapt(const Eigen::VectorXd& q, const Eigen::VectorXd& dp) override;

 private:
  const model::GripperModel& model_;
  const CollisionContext& ctx_;
  SolverOptions options_;
  double omega_;
};

}  // namespace dexgrasp::adapt
