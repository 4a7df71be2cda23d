#include "dexgrasp/adapt/adapter.hpp"

namespace dexgrasp::adapt {

Eigen::VectorXd LearnedAdapter::adapt(const Eigen::VectorXd& q, const Eigen::VectorXd& dp) {
  return net_.predict(q, model::finger_keypoints(model_, q), dp);
}

Eigen::VectorXd ObIkAdapter::adapt(const Eigen::VectorXd& q, const Eigen::VectorXd& dp) {
  return ob_ik_solve(model_, q, dp, options_).dj;
}

Eigen::VectorXd ObIkScAdapter::adapt(const Eigen::VectorXd& q, const Eigen::VectorXd& dp) {
  return ob_ik_sc_solve(model_, ctx_, q, dp, options_, omega_).dj;
}

}  // namespace dexgrasp::adapt
