#include "hardy/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hardy {

Space random_cloud_space(int n, unsigned seed) {
  if (n < 2) throw Error("random_cloud_space: need n >= 2");
  std::mt19937 rng(seed);
  // density ~1 point per unit area keeps radius-1 balls at O(1) occupancy
  double L = std::sqrt(static_cast<double>(n));
  std::uniform_real_distribution<double> pos(0.0, L);
  std::uniform_real_distribution<double> wt(0.5, 1.5);
  Eigen::MatrixXd pts(n, 2);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = pos(rng);
    pts(i, 1) = pos(rng);
  }
  Eigen::MatrixXd dist(n, n);
  for (int i = 0; i < n; ++i) {
    dist(i, i) = 0;
    for (int j = i + 1; j < n; ++j) {
      double d = (pts.row(i) - pts.row(j)).norm();
      if (d == 0) d = 1e-9;  // coincident draws would break ball enumeration
      dist(i, j) = dist(j, i) = d;
    }
  }
  Eigen::VectorXd mass(n);
  for (int i = 0; i < n; ++i) mass(i) = wt(rng);
  return build_space(dist, mass);
}

Space random_graph_space(int n, unsigned seed) {
  if (n < 2) throw Error("random_graph_space: need n >= 2");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> len(0.3, 1.2);
  std::uniform_real_distribution<double> wt(0.5, 1.5);
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, inf);
  for (int i = 0; i < n; ++i) d(i, i) = 0;
  auto add_edge = [&](int i, int j) {
    double w = len(rng);
    if (w < d(i, j)) d(i, j) = d(j, i) = w;
  };
  // random spanning tree: attach each vertex to an earlier one
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    add_edge(i, pick(rng));
  }
  std::uniform_int_distribution<int> any(0, n - 1);
  for (int e = 0; e < n / 2; ++e) {
    int i = any(rng), j = any(rng);
    if (i != j) add_edge(i, j);
  }
  // Floyd-Warshall, column-wise inner loop; symmetry is preserved by the
  // update so no mirror store is needed
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double dkj = d(k, j);
      if (dkj == inf) continue;
      for (int i = 0; i < n; ++i) {
        double via = d(i, k) + dkj;
        if (via < d(i, j)) d(i, j) = via;
      }
    }
  Eigen::VectorXd mass(n);
  for (int i = 0; i < n; ++i) mass(i) = wt(rng);
  return build_space(d, mass);
}

std::vector<Space> space_corpus(int count, int n_max, unsigned seed) {
  if (count < 1 || n_max < 8) throw Error("space_corpus: bad parameters");
  std::vector<Space> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    // sizes sweep the range; odd entries are graphs, even entries clouds
    int n = 8 + ((n_max - 8) * (k + 1)) / count;
    unsigned s = seed + 1000003u * static_cast<unsigned>(k);
    out.push_back(k % 2 == 0 ? random_cloud_space(n, s)
                             : random_graph_space(n, s));
  }
  return out;
}

TentField random_tent_field(const Space& X, const TimeGrid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n01(0, 1);
  TentField F;
  F.grid = g;
  F.v.resize(X.n(), g.M);
  for (int i = 0; i < X.n(); ++i)
    for (int m = 0; m < g.M; ++m) F.v(i, m) = cplx(n01(rng), n01(rng));
  return F;
}

Eigen::VectorXcd random_form(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n01(0, 1);
  Eigen::VectorXcd u(n);
  for (int i = 0; i < n; ++i) u(i) = cplx(n01(rng), n01(rng));
  return u;
}

std::vector<NamedComplex> standard_complexes() {
  std::vector<NamedComplex> out;
  out.push_back({"path40", path_complex(40)});
  out.push_back({"cycle32", cycle_complex(32)});
  out.push_back({"grid8x7", grid_complex(8, 7)});
  out.push_back({"disc24", disc_complex(24)});
  return out;
}

}  // namespace hardy
