#pragma once

#include "hardy/space.hpp"

namespace hardy {

struct BallRef {
  int center;
  double radius;
};

inline std::vector<int> ball_members(const Space& X, const BallRef& B) {
  return ball(X, B.center, B.radius);
}
inline BallRef dilate(const BallRef& B, double c) {
  return {B.center, c * B.radius};
}

// Greedy selection of a pairwise disjoint subfamily whose 4x dilates cover
// every input ball. Balls are bucketed into geometric radius classes with
// ratio 2/3 below the largest radius; within a class larger balls go first.
// Disjointness and coverage are exact point-set statements.
struct VitaliSelection {
  std::vector<int> selected;    // input indices in selection order
  std::vector<int> assignment;  // per input ball, the selected index covering it
};
VitaliSelection vitali_select(const Space& X, const std::vector<BallRef>& balls);

// Interior cover of an open set by balls with radius (1/8) min(d(x, O^c), h),
// selected by the Vitali routine; dilates 4B_j reproduce O exactly and carry
// a partition of unity built from indicator bump functions.
struct WhitneyCover {
  std::vector<BallRef> balls;    // B_j in selection order
  std::vector<BallRef> dilates;  // 4 B_j
  Eigen::MatrixXd partition;     // row j = phi_j, supported in 4B_j, sums to 1 on O
  int intersection_bound = 0;    // max number of dilates meeting one dilate
  double h = 0.5;
};
WhitneyCover whitney_cover(const Space& X, const std::vector<int>& O,
                           double h = 0.5);
// Same construction with O = X admitted (every radius caps at h/8); the
// public entry point keeps its complement check.
WhitneyCover whitney_cover_allow_full(const Space& X, const std::vector<int>& O,
                                      double h = 0.5);

// Partition of X into "cubes" Q_j sandwiched between disjoint radius-1/4
// seeds and their radius-1 anchors.
struct UnitCubeStructure {
  std::vector<std::vector<int>> cubes;
  std::vector<BallRef> seeds;    // pairwise disjoint, radius 1/4
  std::vector<BallRef> anchors;  // radius 1, seed_j <= cube_j <= anchor_j
  double delta = 0.25;
};
UnitCubeStructure unit_cubes(const Space& X);

}  // namespace hardy
