#include "hardy/complex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

namespace hardy {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const WeightedComplex& K) {
  if (K.nv == 0) throw EmptySpace();
  for (int i = 0; i < K.nv; ++i)
    if (!(K.wv(i) > 0)) throw NonpositiveWeight("vertex " + std::to_string(i));
  std::map<std::pair<int, int>, int> seen;
  for (int e = 0; e < K.ne(); ++e) {
    auto [a, b] = K.edges[e];
    if (a < 0 || b < 0 || a >= K.nv || b >= K.nv || a == b)
      throw InconsistentIncidence("edge " + std::to_string(e));
    auto key = std::minmax(a, b);
    if (seen.count({key.first, key.second}))
      throw InconsistentIncidence("duplicate edge " + std::to_string(e));
    seen[{key.first, key.second}] = e;
    if (!(K.we(e) > 0)) throw NonpositiveWeight("edge " + std::to_string(e));
  }
  for (int t = 0; t < K.nt(); ++t) {
    auto [a, b, c] = K.triangles[t];
    if (a == b || b == c || a == c || a < 0 || b < 0 || c < 0 || a >= K.nv ||
        b >= K.nv || c >= K.nv)
      throw InconsistentIncidence("triangle " + std::to_string(t));
    for (auto [u, v] : {std::pair{a, b}, {b, c}, {a, c}}) {
      auto key = std::minmax(u, v);
      if (!seen.count({key.first, key.second}))
        throw InconsistentIncidence("triangle " + std::to_string(t) +
                                    " misses edge (" + std::to_string(u) + "," +
                                    std::to_string(v) + ")");
    }
    if (!(K.wt(t) > 0)) throw NonpositiveWeight("triangle " + std::to_string(t));
  }
}

int find_edge(const WeightedComplex& K, int u, int v, double& sign) {
  for (int e = 0; e < K.ne(); ++e) {
    if (K.edges[e][0] == u && K.edges[e][1] == v) {
      sign = 1.0;
      return e;
    }
    if (K.edges[e][0] == v && K.edges[e][1] == u) {
      sign = -1.0;
      return e;
    }
  }
  throw InconsistentIncidence("missing edge (" + std::to_string(u) + "," +
                              std::to_string(v) + ")");
}

Eigen::MatrixXd hop_matrix(const WeightedComplex& K) {
  const int n = K.nv;
  Eigen::MatrixXd D = Eigen::MatrixXd::Constant(n, n, kInf);
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : K.edges) {
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  for (int s = 0; s < n; ++s) {
    std::queue<int> q;
    D(s, s) = 0;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adj[u])
        if (D(s, v) == kInf) {
          D(s, v) = D(s, u) + 1;
          q.push(v);
        }
    }
  }
  if (!D.allFinite()) throw Error("complex graph is disconnected");
  return D;
}

}  // namespace

Eigen::VectorXd WeightedComplex::weights() const {
  Eigen::VectorXd W(n_simplices());
  W.segment(0, nv) = wv;
  if (ne()) W.segment(edge_base(), ne()) = we;
  if (nt()) W.segment(tri_base(), nt()) = wt;
  return W;
}

std::vector<int> WeightedComplex::vertices_of(int s) const {
  if (s < nv) return {s};
  if (s < tri_base()) {
    auto e = edges[s - edge_base()];
    return {e[0], e[1]};
  }
  auto t = triangles[s - tri_base()];
  return {t[0], t[1], t[2]};
}

WeightedComplex complex_from_json(const nlohmann::json& j) {
  WeightedComplex K;
  K.nv = j.contains("vertices") ? j.at("vertices").get<int>() : j.value("n", 0);
  if (j.contains("edges"))
    for (const auto& e : j.at("edges")) {
      K.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
      K.nv = std::max({K.nv, K.edges.back()[0] + 1, K.edges.back()[1] + 1});
    }
  if (j.contains("triangles"))
    for (const auto& t : j.at("triangles")) {
      K.triangles.push_back(
          {t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
      for (int v : K.triangles.back()) K.nv = std::max(K.nv, v + 1);
    }
  auto load = [&](const char* key, int len, Eigen::VectorXd& w) {
    w = Eigen::VectorXd::Ones(len);
    if (j.contains(key)) {
      const auto& arr = j.at(key);
      if (static_cast<int>(arr.size()) != len)
        throw Error(std::string(key) + " length mismatch");
      for (int i = 0; i < len; ++i) w(i) = arr.at(i).get<double>();
    }
  };
  load("vertex_weights", K.nv, K.wv);
  load("edge_weights", K.ne(), K.we);
  load("triangle_weights", K.nt(), K.wt);
  validate(K);
  return K;
}

WeightedComplex path_complex(int n) {
  WeightedComplex K;
  K.nv = n;
  for (int i = 0; i + 1 < n; ++i) K.edges.push_back({i, i + 1});
  K.wv = Eigen::VectorXd::Ones(K.nv);
  K.we = Eigen::VectorXd::Ones(K.ne());
  K.wt = Eigen::VectorXd::Ones(0);
  validate(K);
  return K;
}

WeightedComplex cycle_complex(int n) {
  WeightedComplex K;
  K.nv = n;
  for (int i = 0; i < n; ++i) K.edges.push_back({i, (i + 1) % n});
  K.wv = Eigen::VectorXd::Ones(K.nv);
  K.we = Eigen::VectorXd::Ones(K.ne());
  K.wt = Eigen::VectorXd::Ones(0);
  validate(K);
  return K;
}

WeightedComplex grid_complex(int rows, int cols) {
  WeightedComplex K;
  K.nv = rows * cols;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) K.edges.push_back({id(r, c), id(r, c + 1)});
      if (r + 1 < rows) K.edges.push_back({id(r, c), id(r + 1, c)});
    }
  K.wv = Eigen::VectorXd::Ones(K.nv);
  K.we = Eigen::VectorXd::Ones(K.ne());
  K.wt = Eigen::VectorXd::Ones(0);
  validate(K);
  return K;
}

WeightedComplex disc_complex(int n) {
  WeightedComplex K;
  K.nv = n + 1;  // center 0 plus an n-ring
  for (int i = 1; i <= n; ++i) K.edges.push_back({0, i});
  for (int i = 1; i <= n; ++i) K.edges.push_back({i, i % n + 1});
  for (int i = 1; i <= n; ++i) K.triangles.push_back({0, i, i % n + 1});
  K.wv = Eigen::VectorXd::Ones(K.nv);
  K.we = Eigen::VectorXd::Ones(K.ne());
  K.wt = Eigen::VectorXd::Ones(K.nt());
  validate(K);
  return K;
}

Eigen::SparseMatrix<double> d0_matrix(const WeightedComplex& K) {
  std::vector<Eigen::Triplet<double>> trips;
  for (int e = 0; e < K.ne(); ++e) {
    trips.emplace_back(e, K.edges[e][0], -1.0);
    trips.emplace_back(e, K.edges[e][1], 1.0);
  }
  Eigen::SparseMatrix<double> M(K.ne(), K.nv);
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

Eigen::SparseMatrix<double> d1_matrix(const WeightedComplex& K) {
  std::vector<Eigen::Triplet<double>> trips;
  for (int t = 0; t < K.nt(); ++t) {
    auto [a, b, c] = K.triangles[t];
    double s;
    // boundary of (a,b,c): (b,c) - (a,c) + (a,b), each matched against the
    // stored edge orientation
    int e = find_edge(K, b, c, s);
    trips.emplace_back(t, e, s);
    e = find_edge(K, a, c, s);
    trips.emplace_back(t, e, -s);
    e = find_edge(K, a, b, s);
    trips.emplace_back(t, e, s);
  }
  Eigen::SparseMatrix<double> M(K.nt(), K.ne());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

DiracOperator dirac(const WeightedComplex& K) {
  validate(K);
  const int n = K.n_simplices();
  auto D0 = d0_matrix(K), D1 = d1_matrix(K);

  std::vector<Eigen::Triplet<double>> trips;
  auto add_block = [&](const Eigen::SparseMatrix<double>& M, int row0, int col0,
                       bool transpose_weighted, const Eigen::VectorXd& wrow,
                       const Eigen::VectorXd& wcol) {
    for (int k = 0; k < M.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it) {
        if (!transpose_weighted) {
          trips.emplace_back(row0 + static_cast<int>(it.row()),
                             col0 + static_cast<int>(it.col()), it.value());
        } else {
          // codifferential: W_row^{-1} M^T W_col
          trips.emplace_back(row0 + static_cast<int>(it.col()),
                             col0 + static_cast<int>(it.row()),
                             it.value() * wcol(it.row()) / wrow(it.col()));
        }
      }
  };
  add_block(D0, K.edge_base(), 0, false, {}, {});
  add_block(D0, 0, K.edge_base(), true, K.wv, K.we);
  if (K.nt()) {
    add_block(D1, K.tri_base(), K.edge_base(), false, {}, {});
    add_block(D1, K.edge_base(), K.tri_base(), true, K.we, K.wt);
  }

  DiracOperator op;
  op.D.resize(n, n);
  op.D.setFromTriplets(trips.begin(), trips.end());
  op.W = K.weights();
  return op;
}

bool DiracOperator::self_adjoint(double tol) const {
  Eigen::MatrixXd S = Eigen::MatrixXd(D);
  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j) S(i, j) *= std::sqrt(W(i) / W(j));
  double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  return (S - S.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

void DiracOperator::ensure_eig() const {
  if (eig_done) return;
  Eigen::MatrixXd S = Eigen::MatrixXd(D);
  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j) S(i, j) *= std::sqrt(W(i) / W(j));
  S = ((S + S.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) throw EigensolveFailure();
  evals = es.eigenvalues();
  evecs_hat = es.eigenvectors();
  eig_done = true;
}

Space vertex_space(const WeightedComplex& K) {
  return build_space(hop_matrix(K), K.wv);
}

Space simplex_space(const WeightedComplex& K) {
  const int n = K.n_simplices();
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  auto link = [&](int a, int b, double len) {
    adj[a].push_back({b, len});
    adj[b].push_back({a, len});
  };
  for (int e = 0; e < K.ne(); ++e) {
    link(K.edges[e][0], K.edges[e][1], 1.0);
    link(K.edge_base() + e, K.edges[e][0], 0.5);
    link(K.edge_base() + e, K.edges[e][1], 0.5);
  }
  for (int t = 0; t < K.nt(); ++t) {
    auto [a, b, c] = K.triangles[t];
    double s;
    for (auto [u, v] : {std::pair{a, b}, {b, c}, {a, c}})
      link(K.tri_base() + t, K.edge_base() + find_edge(K, u, v, s), 0.5);
  }
  Eigen::MatrixXd D = Eigen::MatrixXd::Constant(n, n, kInf);
  for (int s = 0; s < n; ++s) {
    std::priority_queue<std::pair<double, int>,
                        std::vector<std::pair<double, int>>, std::greater<>> pq;
    D(s, s) = 0;
    pq.push({0.0, s});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > D(s, u)) continue;
      for (auto [v, w] : adj[u])
        if (d + w < D(s, v)) {
          D(s, v) = d + w;
          pq.push({D(s, v), v});
        }
    }
  }
  if (!D.allFinite()) throw Error("complex graph is disconnected");
  return build_space(D, K.weights());
}

Eigen::MatrixXd nearest_vertex_dist(const WeightedComplex& K) {
  auto hop = hop_matrix(K);
  const int n = K.n_simplices();
  Eigen::MatrixXd D(n, n);
  for (int s = 0; s < n; ++s) {
    auto vs = K.vertices_of(s);
    for (int t = 0; t < n; ++t) {
      double best = kInf;
      for (int u : vs)
        for (int v : K.vertices_of(t)) best = std::min(best, hop(u, v));
      D(s, t) = best;
    }
  }
  return D;
}

Eigen::VectorXd simplex_average(const WeightedComplex& K,
                                const Eigen::VectorXd& eta) {
  Eigen::VectorXd out(K.n_simplices());
  for (int s = 0; s < K.n_simplices(); ++s) {
    double acc = 0;
    auto vs = K.vertices_of(s);
    for (int v : vs) acc += eta(v);
    out(s) = acc / static_cast<double>(vs.size());
  }
  return out;
}

CommutatorReport commutator_profile(const WeightedComplex& K,
                                    const Eigen::VectorXd& eta) {
  CommutatorReport rep;
  auto op = dirac(K);
  Eigen::VectorXd m = simplex_average(K, eta);
  Eigen::MatrixXd D = Eigen::MatrixXd(op.D);
  Eigen::MatrixXd C = D * m.asDiagonal();
  C -= m.asDiagonal() * D;

  for (const auto& e : K.edges)
    rep.lip = std::max(rep.lip, std::abs(eta(e[0]) - eta(e[1])));

  Eigen::MatrixXd Cw = C;
  for (int i = 0; i < op.n(); ++i)
    for (int j = 0; j < op.n(); ++j) Cw(i, j) *= std::sqrt(op.W(i) / op.W(j));
  rep.norm = Cw.jacobiSvd().singularValues()(0);

  rep.local = true;
  double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
  for (int i = 0; i < op.n(); ++i)
    for (int j = 0; j < op.n(); ++j)
      if (std::abs(C(i, j)) > 1e-14 * scale && D(i, j) == 0.0 && D(j, i) == 0.0)
        rep.local = false;

  if (rep.lip > 0)
    rep.ratio = rep.norm / rep.lip;
  else
    rep.zero_lip_pass = rep.norm <= 1e-13 * scale;
  return rep;
}

}  // namespace hardy
