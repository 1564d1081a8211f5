#pragma once

#include "hardy/holo.hpp"

namespace hardy {

// operator norm of 1_E T 1_F between the weighted L2 spaces
double block_norm(const Eigen::MatrixXcd& T, const Eigen::VectorXd& W,
                  const std::vector<int>& E, const std::vector<int>& F);

// dense resolvent (z - D)^{-1}
Eigen::MatrixXcd resolvent_matrix(const DiracOperator& op, cplx z);

// norm of the worst block at each separation band: sources are unit balls in
// the supplied (pseudo-)metric, targets the shells at distance [k w, (k+1) w)
struct DecayProfile {
  double width = 2.0;
  std::vector<double> sep;   // k * width
  std::vector<double> norm;  // max block norm in the band
  double rate = 0;           // fitted exponential decay per unit distance
  double amp = 0;            // fitted amplitude at separation 0
  int fitted = 0;            // bands entering the fit
};

DecayProfile decay_profile(const Eigen::MatrixXcd& T, const Eigen::VectorXd& W,
                           const Eigen::MatrixXd& dist, double width = 2.0);

// smallest constant c making every band obey
//   norm(sep) <= c * (C_thetar/|z|) * <1/(sep |z|)>^b * exp(-a sep |z| / (C_D C_thetar))
struct BoundCheck {
  double c = 0;
  double worst_sep = 0;
};
BoundCheck verify_bound(const DecayProfile& prof, cplx z, double C_thetar,
                        double C_D, double a, double b);

}  // namespace hardy
