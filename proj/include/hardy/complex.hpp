#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>

#include "hardy/space.hpp"

namespace hardy {

// Oriented simplicial complex up to dimension 2 with positive weights per
// simplex. Global simplex index: vertices, then edges, then triangles.
struct WeightedComplex {
  int nv = 0;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> triangles;
  Eigen::VectorXd wv, we, wt;

  int ne() const { return static_cast<int>(edges.size()); }
  int nt() const { return static_cast<int>(triangles.size()); }
  int n_simplices() const { return nv + ne() + nt(); }
  int edge_base() const { return nv; }
  int tri_base() const { return nv + ne(); }
  int degree_of(int s) const { return s < nv ? 0 : (s < tri_base() ? 1 : 2); }
  Eigen::VectorXd weights() const;
  std::vector<int> vertices_of(int s) const;
};

WeightedComplex complex_from_json(const nlohmann::json& j);
WeightedComplex path_complex(int n);
WeightedComplex cycle_complex(int n);
WeightedComplex grid_complex(int rows, int cols);
WeightedComplex disc_complex(int n);  // center, n-ring, n spokes, n triangles

// exterior derivative components; d1 * d0 = 0 with integer entries
Eigen::SparseMatrix<double> d0_matrix(const WeightedComplex& K);
Eigen::SparseMatrix<double> d1_matrix(const WeightedComplex& K);

// first-order operator d + d* on the direct sum of form degrees, with the
// codifferential taken in the weighted inner product
struct DiracOperator {
  Eigen::SparseMatrix<double> D;
  Eigen::VectorXd W;

  int n() const { return static_cast<int>(W.size()); }
  bool self_adjoint(double tol = 1e-12) const;
  void ensure_eig() const;  // dense decomposition of W^{1/2} D W^{-1/2}
  mutable bool eig_done = false;
  mutable Eigen::VectorXd evals;
  mutable Eigen::MatrixXd evecs_hat;  // orthonormal columns in the flat frame
};
DiracOperator dirac(const WeightedComplex& K);

// hop metric on vertices with the vertex weights as masses
Space vertex_space(const WeightedComplex& K);
// incidence metric on all simplices (codimension-1 incidences at length 1/2,
// graph edges at length 1); restricts to the hop metric on vertices
Space simplex_space(const WeightedComplex& K);
// nearest-vertex simplex distance (not a metric; used for shell partitions)
Eigen::MatrixXd nearest_vertex_dist(const WeightedComplex& K);

// diagonal multiplication operator: vertex value, edge/triangle averages
Eigen::VectorXd simplex_average(const WeightedComplex& K,
                                const Eigen::VectorXd& eta);

struct CommutatorReport {
  double lip = 0;    // Lipschitz constant of eta in the hop metric
  double norm = 0;   // weighted operator norm of [D, M_eta]
  double ratio = 0;  // norm / lip when lip > 0
  bool local = false;
  bool zero_lip_pass = true;
};
CommutatorReport commutator_profile(const WeightedComplex& K,
                                    const Eigen::VectorXd& eta);

}  // namespace hardy
