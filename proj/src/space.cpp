#include "hardy/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace hardy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void index_distances(Space& X) {
  const int n = X.n();
  X.sorted_dist.assign(n, {});
  X.cum_mass.assign(n, {});
  std::vector<int> order(n);
  for (int x = 0; x < n; ++x) {
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double da = X.dist(x, a), db = X.dist(x, b);
      if (da != db) return da < db;
      return a < b;
    });
    auto& sd = X.sorted_dist[x];
    auto& cm = X.cum_mass[x];
    sd.resize(n);
    cm.resize(n);
    double acc = 0;
    for (int i = 0; i < n; ++i) {
      sd[i] = X.dist(x, order[i]);
      acc += X.mass(order[i]);
      cm[i] = acc;
    }
  }
}

}  // namespace

Space build_space(const Eigen::MatrixXd& dist, const Eigen::VectorXd& mass) {
  const int n = static_cast<int>(mass.size());
  if (n == 0 || dist.rows() == 0) throw EmptySpace();
  if (dist.rows() != n || dist.cols() != n)
    throw Error("distance matrix is " + std::to_string(dist.rows()) + "x" +
                std::to_string(dist.cols()) + " for " + std::to_string(n) +
                " masses");
  for (int i = 0; i < n; ++i)
    if (!(mass(i) > 0) || !std::isfinite(mass(i))) throw NonpositiveMass(i);

  double scale = std::max(1.0, dist.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;
  for (int i = 0; i < n; ++i) {
    if (std::abs(dist(i, i)) > tol)
      throw Error("nonzero self-distance at point " + std::to_string(i));
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(dist(i, j)) || dist(i, j) < -tol)
        throw Error("invalid distance at (" + std::to_string(i) + "," +
                    std::to_string(j) + ")");
      if (std::abs(dist(i, j) - dist(j, i)) > tol)
        throw AsymmetricDistance(i, j);
    }
  }

  Space X;
  X.dist = (dist + dist.transpose()) / 2.0;
  for (int i = 0; i < n; ++i) X.dist(i, i) = 0.0;
  X.mass = mass;

  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        if (X.dist(i, k) > X.dist(i, j) + X.dist(j, k) + tol)
          throw TriangleInequalityViolation(i, j, k);

  index_distances(X);
  return X;
}

Space space_from_json(const nlohmann::json& j) {
  Eigen::MatrixXd D;
  int n = 0;
  if (j.contains("dist")) {
    const auto& rows = j.at("dist");
    n = static_cast<int>(rows.size());
    if (n == 0) throw EmptySpace();
    D.resize(n, n);
    for (int i = 0; i < n; ++i) {
      const auto& row = rows.at(i);
      if (static_cast<int>(row.size()) != n)
        throw Error("ragged distance matrix");
      for (int k = 0; k < n; ++k) D(i, k) = row.at(k).get<double>();
    }
  } else if (j.contains("graph")) {
    const auto& g = j.at("graph");
    int declared = g.value("n", 0);
    std::vector<std::array<double, 3>> edges;
    for (const auto& e : g.at("edges")) {
      int a = e.at(0).get<int>(), b = e.at(1).get<int>();
      double w = e.size() > 2 ? e.at(2).get<double>() : 1.0;
      if (w <= 0) throw NonpositiveWeight("edge weight");
      edges.push_back({double(a), double(b), w});
      n = std::max(n, std::max(a, b) + 1);
    }
    n = std::max(n, declared);
    if (n == 0) throw EmptySpace();
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const auto& e : edges) {
      adj[int(e[0])].push_back({int(e[1]), e[2]});
      adj[int(e[1])].push_back({int(e[0]), e[2]});
    }
    D = Eigen::MatrixXd::Constant(n, n, kInf);
    for (int s = 0; s < n; ++s) {
      // Dijkstra
      std::priority_queue<std::pair<double, int>,
                          std::vector<std::pair<double, int>>,
                          std::greater<>> pq;
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
    if (!D.allFinite()) throw Error("graph is disconnected");
  } else {
    throw UnknownKind("space json needs \"dist\" or \"graph\"");
  }

  Eigen::VectorXd mass = Eigen::VectorXd::Ones(n);
  if (j.contains("mass")) {
    const auto& m = j.at("mass");
    if (static_cast<int>(m.size()) != n)
      throw Error("mass length does not match point count");
    for (int i = 0; i < n; ++i) mass(i) = m.at(i).get<double>();
  }
  return build_space(D, mass);
}

std::vector<int> ball(const Space& X, int x, double r) {
  std::vector<int> out;
  if (!(r > 0)) return out;
  for (int i = 0; i < X.n(); ++i)
    if (X.dist(x, i) < r) out.push_back(i);
  return out;
}

double volume(const Space& X, int x, double r) {
  if (!(r > 0)) return 0.0;
  const auto& sd = X.sorted_dist[x];
  auto it = std::lower_bound(sd.begin(), sd.end(), r);
  auto k = it - sd.begin();
  return k == 0 ? 0.0 : X.cum_mass[x][k - 1];
}

double set_measure(const Space& X, const std::vector<int>& S) {
  double m = 0;
  for (int i : S) m += X.mass(i);
  return m;
}

double dist_to_set(const Space& X, int x, const std::vector<int>& S) {
  double d = kInf;
  for (int i : S) d = std::min(d, X.dist(x, i));
  return d;
}

double dist_between_sets(const Space& X, const std::vector<int>& E,
                         const std::vector<int>& F) {
  double d = kInf;
  for (int i : E)
    for (int j : F) d = std::min(d, X.dist(i, j));
  return d;
}

std::vector<int> complement(const Space& X, const std::vector<int>& S) {
  std::vector<char> in(X.n(), 0);
  for (int i : S) in[i] = 1;
  std::vector<int> out;
  for (int i = 0; i < X.n(); ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

namespace {

// radii at which balls around x change, restricted to (0, cap], plus cap itself
std::vector<double> radius_events(const Space& X, int x, double cap) {
  std::vector<double> out;
  for (double d : X.sorted_dist[x])
    if (d > 0 && d <= cap && (out.empty() || d != out.back())) out.push_back(d);
  if (out.empty() || out.back() != cap) out.push_back(cap);
  return out;
}

}  // namespace

GrowthReport fit_growth(const Space& X, const std::vector<double>& scales) {
  GrowthReport rep;
  const int n = X.n();
  const double diam = X.diameter();

  // Both volumes in V(x,2r)/V(x,r) are piecewise constant in r with breaks at
  // distances realized from x, so scanning those events attains the sup over
  // continuous r in (0, b].
  for (double b : scales) {
    double Ab = 1.0;
    for (int x = 0; x < n; ++x)
      for (double r : radius_events(X, x, b)) {
        double v = volume(X, x, r);
        if (v > 0) Ab = std::max(Ab, volume(X, x, 2 * r) / v);
      }
    rep.per_scale.push_back({b, Ab, std::log2(Ab)});
  }

  // envelope fit over a fixed (kappa, lambda) grid; samples are deterministic
  struct Sample {
    double lnratio, lnalpha, gap;  // gap = (alpha - 1) r
  };
  std::vector<Sample> samples;
  const double alphas[] = {1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
  for (int x = 0; x < n; ++x) {
    auto events = radius_events(X, x, diam > 0 ? diam : 1.0);
    // at most 24 radii per point, spread over the event list
    std::vector<double> radii;
    int m = static_cast<int>(events.size());
    int take = std::min(24, m);
    for (int i = 0; i < take; ++i)
      radii.push_back(events[(static_cast<long>(i) * (m - 1)) / std::max(1, take - 1)]);
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    for (double r : radii) {
      double v = volume(X, x, r);
      if (!(v > 0)) continue;
      for (double a : alphas) {
        if (diam > 0 && a * r > 1.2 * diam) break;
        double ratio = volume(X, x, a * r) / v;
        samples.push_back({std::log(ratio), std::log(a), (a - 1.0) * r});
      }
    }
  }

  double best_lnA = kInf, best_kappa = 0, best_lambda = 0;
  for (int ki = 0; ki <= 12; ++ki) {
    double kappa = 0.5 * ki;
    for (int li = 0; li <= 50; ++li) {
      double lambda = 0.1 * li;
      double need = 0.0;  // A >= 1 always allowed
      for (const auto& s : samples)
        need = std::max(need, s.lnratio - kappa * s.lnalpha - lambda * s.gap);
      if (need < best_lnA - 1e-12 ||
          (need <= best_lnA + 1e-12 &&
           (lambda < best_lambda ||
            (lambda == best_lambda && kappa < best_kappa)))) {
        best_lnA = std::min(best_lnA, need);
        best_kappa = kappa;
        best_lambda = lambda;
      }
    }
  }
  rep.envelope = {std::exp(best_lnA), best_kappa, best_lambda,
                  static_cast<int>(samples.size())};

  const double b0 = 1.0, delta = 1.0;
  double A0 = 1.0;
  for (int x = 0; x < n; ++x) {
    std::vector<double> radii{b0};
    for (double d : X.sorted_dist[x])
      if (d >= b0 && d <= diam) radii.push_back(d);
    for (double r : radii) {
      double v = volume(X, x, r);
      if (v > 0) A0 = std::max(A0, volume(X, x, r + delta) / v);
    }
  }
  rep.global = {b0, delta, A0, std::log(A0) / delta};
  return rep;
}

nlohmann::json growth_to_json(const GrowthReport& g) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& s : g.per_scale)
    per.push_back({{"b", s.b}, {"A_b", s.A_b}, {"kappa_b", s.kappa_b}});
  return {
      {"per_scale", per},
      {"envelope",
       {{"A", g.envelope.A},
        {"kappa", g.envelope.kappa},
        {"lambda", g.envelope.lambda},
        {"samples", g.envelope.samples},
        {"provenance", "fitted"}}},
      {"global",
       {{"b0", g.global.b0},
        {"delta", g.global.delta},
        {"A0", g.global.A0},
        {"lambda", g.global.lambda},
        {"provenance", "fitted"}}},
  };
}

namespace {

// exact maximum subset of `pts` with pairwise distance >= sep, branch and bound
int max_separated_exact(const Space& X, const std::vector<int>& pts, double sep) {
  const int k = static_cast<int>(pts.size());
  std::vector<uint32_t> compat(k, 0);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (a != b && X.dist(pts[a], pts[b]) >= sep) compat[a] |= (1u << b);
  int best = 0;
  // candidates always a subset of indices >= depth start; recursion on bitmask
  std::function<void(uint32_t, int)> rec = [&](uint32_t cand, int size) {
    if (size + __builtin_popcount(cand) <= best) return;
    if (!cand) {
      best = std::max(best, size);
      return;
    }
    int a = __builtin_ctz(cand);
    // branch: exclude a
    rec(cand & ~(1u << a), size);
    // include a
    rec(cand & compat[a] & ~(1u << a), size + 1);
  };
  rec(k >= 32 ? 0xffffffffu : ((1u << k) - 1), 0);
  return best;
}

int max_separated_greedy(const Space& X, const std::vector<int>& pts, double sep) {
  if (pts.empty()) return 0;
  std::vector<double> mind(pts.size(), kInf);
  std::vector<char> used(pts.size(), 0);
  int chosen = 0, cur = 0;  // start from the lowest index
  while (true) {
    used[cur] = 1;
    ++chosen;
    for (size_t i = 0; i < pts.size(); ++i)
      mind[i] = std::min(mind[i], X.dist(pts[i], pts[cur]));
    int nxt = -1;
    double bestd = sep;
    for (size_t i = 0; i < pts.size(); ++i)
      if (!used[i] && mind[i] >= bestd &&
          (nxt < 0 || mind[i] > bestd)) {
        nxt = static_cast<int>(i);
        bestd = mind[i];
      }
    if (nxt < 0) break;
    cur = nxt;
  }
  return chosen;
}

}  // namespace

SeparatedCount homogeneity_count(const Space& X, double b) {
  SeparatedCount out;
  const int n = X.n();
  bool subsampled = false;
  for (int x = 0; x < n; ++x) {
    auto events = radius_events(X, x, b);
    std::vector<double> radii = events;
    if (events.size() > 16 || n > 120) {
      radii.clear();
      int m = static_cast<int>(events.size());
      int take = std::min(16, m);
      for (int i = 0; i < take; ++i)
        radii.push_back(events[(static_cast<long>(i) * (m - 1)) / std::max(1, take - 1)]);
      radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
      if (radii.size() < events.size()) subsampled = true;
    }
    for (double r : radii) {
      auto pts = ball(X, x, r);
      if (static_cast<int>(pts.size()) <= out.count) continue;
      if (pts.size() <= 20) {
        out.count = std::max(out.count, max_separated_exact(X, pts, r / 2));
      } else {
        out.count = std::max(out.count, max_separated_greedy(X, pts, r / 2));
        out.exact = false;
      }
    }
  }
  if (subsampled) out.exact = false;
  return out;
}

}  // namespace hardy
