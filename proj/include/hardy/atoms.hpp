#pragma once

#include "hardy/tent.hpp"

namespace hardy {

// normalized tent-space building block: supported in the tent over its ball,
// radius <= 2, energy at most mu(ball)^{-1/2}
struct TentAtomRecord {
  TentField field;
  BallRef ball;
  double coeff;
};

struct TentAtomCheck {
  bool support_ok = false, radius_ok = false, norm_ok = false;
  double support_leak = 0;  // energy fraction outside the tent over the ball
  double radius = 0;
  double norm_slack = 0;  // ||a||_{L2_bullet} * mu(B)^{1/2}
  bool pass() const { return support_ok && radius_ok && norm_ok; }
};
TentAtomCheck validate_tent_atom(const Space& X, const TentAtomRecord& rec);

// same norm bound but supported in the box over the ball; any radius > 0
struct CarlesonAtomRecord {
  TentField field;
  BallRef ball;
  double coeff;
};

// rewrite a box atom as a sum of genuine tent atoms (one for small balls, a
// disjoint radius-1 family for large ones); reconstruction is exact
std::vector<TentAtomRecord> split_carleson_atom(const Space& X,
                                                const CarlesonAtomRecord& rec);

struct DensityConfig {
  double eta = 0.25;    // tent aperture shrink
  double h = 0.5;       // whitney radius cap
  double alpha = 20.0;  // atom ball dilation
  double gamma = 0.0;   // density level; 0 derives 1 - c_eta/2 from the space
};

// points where S has mass density >= gamma in every ball of radius <= 1
std::vector<int> gamma_density_points(const Space& X, const std::vector<int>& S,
                                      double gamma);

// level sets of the square function, density dilation, interior covers, and
// one atom per cover ball and level; sum coeff * atom reproduces the field
std::vector<TentAtomRecord> t1_decompose(const Space& X, const TentField& F,
                                         const DensityConfig& cfg = {});

// block-normalized vertical building block on a ball of radius >= 1
struct LQAtomRecord {
  Eigen::VectorXcd field;
  BallRef ball;
  double coeff;
};

struct LQAtomCheck {
  bool support_ok = false, radius_ok = false;
  double norm_slack = 0;  // ||a||_2 * mu(B)^{1/2}; <= 1 for a strict atom
  bool strict = false;
  bool pass() const { return support_ok && radius_ok && strict; }
};
LQAtomCheck validate_lq_atom(const Space& X, const LQAtomRecord& rec);

// rescale so the norm bound holds with equality of the reconstruction
LQAtomRecord lq_strictify(const Space& X, const LQAtomRecord& rec);

// cube-blocked norm: p-sum of mu(Q_j)^{1/p - 1/2} ||f||_{L2(Q_j)}
double lq_norm(const Space& X, const UnitCubeStructure& U,
               const Eigen::VectorXcd& f, double p);

// one block per cube, coefficients mu(Q_j)^{1/2} ||f||_{L2(Q_j)}; their sum
// equals lq_norm(f, 1) exactly and the blocks reassemble f
std::vector<LQAtomRecord> l1q_decompose(const Space& X,
                                        const UnitCubeStructure& U,
                                        const Eigen::VectorXcd& f);

}  // namespace hardy
