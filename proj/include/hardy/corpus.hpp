#pragma once

#include <string>
#include <vector>

#include "hardy/complex.hpp"
#include "hardy/space.hpp"
#include "hardy/tent.hpp"

namespace hardy {

// Seeded generators behind every measured constant. Same seed, same bytes.

// n points in a planar box sized so unit balls stay local, Euclidean metric,
// masses in [0.5, 1.5]
Space random_cloud_space(int n, unsigned seed);

// connected random graph (spanning tree plus n/2 extra edges), edge lengths
// in [0.3, 1.2], shortest-path metric
Space random_graph_space(int n, unsigned seed);

// mixed cloud/graph corpus, sizes ramping up to n_max
std::vector<Space> space_corpus(int count, int n_max, unsigned seed);

TentField random_tent_field(const Space& X, const TimeGrid& g, unsigned seed);
Eigen::VectorXcd random_form(int n, unsigned seed);

struct NamedComplex {
  std::string name;
  WeightedComplex K;
};
// the four fixture families: path, cycle, grid, triangulated disc
std::vector<NamedComplex> standard_complexes();

}  // namespace hardy
