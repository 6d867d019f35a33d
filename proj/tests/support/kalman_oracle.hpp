#pragma once

// Textbook dense Kalman reference, kept deliberately naive: general F and H,
// explicit matrix inverse, no factorizations. Library results are checked
// against this independent implementation.

#include <Eigen/Dense>

namespace skf_test {

struct OracleState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

inline OracleState oracle_predict(const OracleState& s, const Eigen::MatrixXd& f,
                                  const Eigen::MatrixXd& q) {
  return {f * s.mean, f * s.cov * f.transpose() + q};
}

inline OracleState oracle_update(const OracleState& s, const Eigen::MatrixXd& h,
                                 const Eigen::MatrixXd& r, const Eigen::VectorXd& z) {
  const Eigen::MatrixXd innovation_cov = h * s.cov * h.transpose() + r;
  const Eigen::MatrixXd gain = s.cov * h.transpose() * innovation_cov.inverse();
  const auto d = s.mean.size();
  OracleState out;
  out.mean = s.mean + gain * (z - h * s.mean);
  out.cov = (Eigen::MatrixXd::Identity(d, d) - gain * h) * s.cov;
  return out;
}

}  // namespace skf_test
