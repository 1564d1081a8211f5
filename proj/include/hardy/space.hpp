#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <vector>

#include "hardy/errors.hpp"

namespace hardy {

// Finite metric measure space. Balls are open throughout; volumes are plain
// mass sums, so every sup/inf over a continuous radius range is attained at a
// realized distance and can be enumerated exactly.
struct Space {
  Eigen::MatrixXd dist;  // symmetric, zero diagonal, triangle inequality holds
  Eigen::VectorXd mass;  // strictly positive

  // per-point sorted distances with cumulative masses, for O(log n) volumes
  std::vector<std::vector<double>> sorted_dist;
  std::vector<std::vector<double>> cum_mass;

  int n() const { return static_cast<int>(mass.size()); }
  double total() const { return mass.sum(); }
  double diameter() const { return dist.maxCoeff(); }
};

Space build_space(const Eigen::MatrixXd& dist, const Eigen::VectorXd& mass);
Space space_from_json(const nlohmann::json& j);

// open ball {y : d(x,y) < r}, ascending indices
std::vector<int> ball(const Space& X, int x, double r);
double volume(const Space& X, int x, double r);
double set_measure(const Space& X, const std::vector<int>& S);

// distance from x to S; +inf when S is empty (so tents over the whole space work)
double dist_to_set(const Space& X, int x, const std::vector<int>& S);
double dist_between_sets(const Space& X, const std::vector<int>& E,
                         const std::vector<int>& F);
std::vector<int> complement(const Space& X, const std::vector<int>& S);

struct ScaleFit {
  double b;        // scale cap
  double A_b;      // max of V(x,2r)/V(x,r) over x and realized r <= b
  double kappa_b;  // log2(A_b)
};

struct GrowthEnvelope {
  double A, kappa, lambda;  // V(x,ar) <= A a^kappa e^{lambda (a-1) r} V(x,r)
  int samples;              // how many (x, r, a) triples backed the fit
};

struct GlobalGrowth {
  double b0, delta, A0;  // V(x, r+delta) <= A0 V(x,r) for r >= b0
  double lambda;         // ln(A0)/delta
};

struct GrowthReport {
  std::vector<ScaleFit> per_scale;
  GrowthEnvelope envelope;
  GlobalGrowth global;
};

GrowthReport fit_growth(const Space& X,
                        const std::vector<double>& scales = {1.0, 2.0, 4.0});
nlohmann::json growth_to_json(const GrowthReport& g);

struct SeparatedCount {
  int count = 0;
  bool exact = true;  // false once any ball was subsampled or handled greedily
};

// largest r/2-separated subset of any ball of radius <= b
SeparatedCount homogeneity_count(const Space& X, double b);

}  // namespace hardy
