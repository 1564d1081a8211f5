#pragma once

#include <complex>

#include "hardy/covering.hpp"

namespace hardy {

using cplx = std::complex<double>;

// Geometric time grid t_m = q^m, m = 0..M-1, with the uniform log weight
// w = ln(1/q); sums over (y, m) weighted by mass(y) * w stand in for all
// dmu dt/t integrals.
struct TimeGrid {
  double q = 0.84089641525371454;  // 2^(-1/4)
  int M = 64;
  double node(int m) const { return std::pow(q, m); }
  double weight() const { return std::log(1.0 / q); }
  bool same(const TimeGrid& o) const { return q == o.q && M == o.M; }
};

struct TentField {
  TimeGrid grid;
  Eigen::MatrixXcd v;  // n x M, column m is the slice at t_m
};

TentField zero_field(const Space& X, const TimeGrid& g);

enum class RegionKind { Cone, Tent, Box };

struct TentRegion {
  RegionKind kind;
  std::vector<std::vector<int>> members;  // per time node, ascending ids
};

TentRegion region_cone(const Space& X, const TimeGrid& g, int x,
                       double aperture = 1.0);
// over O^c: the tent {(y,t) : d(y, O^c) >= aperture * t}; empty complement
// means the whole upper half space
TentRegion region_tent(const Space& X, const TimeGrid& g,
                       const std::vector<int>& O, double aperture = 1.0);
// box over a ball: B x (0, min(radius, 1)]
TentRegion region_box(const Space& X, const TimeGrid& g, const BallRef& B);
TentRegion region_from_json(const Space& X, const TimeGrid& g,
                            const nlohmann::json& spec);

TentField restrict_field(const TentField& F, const TentRegion& R);
double l2bullet(const Space& X, const TentField& F);

// sup over r in (0,1] of ball averages of |f|
Eigen::VectorXd maximal_local(const Space& X, const Eigen::VectorXd& f);

// square function over cones of the given aperture, normalized by V(x, t_m)
Eigen::VectorXd lusin(const Space& X, const TentField& F, double aperture = 1.0);

// sup over balls of radius <= 2 containing x of the box energy over the tent
Eigen::VectorXd carleson(const Space& X, const TentField& F);

// p < inf: mass-weighted L^p norm of the lusin function; p = inf: max carleson
double tent_norm(const Space& X, const TentField& F, double p);

cplx pairing(const Space& X, const TentField& F, const TentField& G);

}  // namespace hardy
