#include "hardy/tent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hardy {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TentField zero_field(const Space& X, const TimeGrid& g) {
  return {g, Eigen::MatrixXcd::Zero(X.n(), g.M)};
}

TentRegion region_cone(const Space& X, const TimeGrid& g, int x, double aperture) {
  TentRegion R{RegionKind::Cone, {}};
  R.members.resize(g.M);
  for (int m = 0; m < g.M; ++m) {
    double r = aperture * g.node(m);
    for (int y = 0; y < X.n(); ++y)
      if (X.dist(x, y) < r) R.members[m].push_back(y);
  }
  return R;
}

TentRegion region_tent(const Space& X, const TimeGrid& g,
                       const std::vector<int>& O, double aperture) {
  TentRegion R{RegionKind::Tent, {}};
  R.members.resize(g.M);
  auto Oc = complement(X, O);
  std::vector<double> rho(X.n());
  for (int y = 0; y < X.n(); ++y) rho[y] = dist_to_set(X, y, Oc);
  for (int m = 0; m < g.M; ++m) {
    double t = aperture * g.node(m);
    for (int y = 0; y < X.n(); ++y)
      if (rho[y] >= t) R.members[m].push_back(y);
  }
  return R;
}

TentRegion region_box(const Space& X, const TimeGrid& g, const BallRef& B) {
  TentRegion R{RegionKind::Box, {}};
  R.members.resize(g.M);
  auto mem = ball_members(X, B);
  double cap = std::min(B.radius, 1.0);
  for (int m = 0; m < g.M; ++m)
    if (g.node(m) <= cap) R.members[m] = mem;
  return R;
}

TentRegion region_from_json(const Space& X, const TimeGrid& g,
                            const nlohmann::json& spec) {
  std::string kind = spec.value("kind", "");
  if (kind == "cone")
    return region_cone(X, g, spec.at("x").get<int>(), spec.value("aperture", 1.0));
  if (kind == "tent")
    return region_tent(X, g, spec.at("set").get<std::vector<int>>(),
                       spec.value("aperture", 1.0));
  if (kind == "box")
    return region_box(X, g,
                      {spec.at("center").get<int>(), spec.at("radius").get<double>()});
  throw UnknownKind(kind.empty() ? "<missing>" : kind);
}

TentField restrict_field(const TentField& F, const TentRegion& R) {
  TentField G{F.grid, Eigen::MatrixXcd::Zero(F.v.rows(), F.v.cols())};
  for (int m = 0; m < F.grid.M && m < static_cast<int>(R.members.size()); ++m)
    for (int y : R.members[m]) G.v(y, m) = F.v(y, m);
  return G;
}

double l2bullet(const Space& X, const TentField& F) {
  double s = 0;
  const double w = F.grid.weight();
  for (int m = 0; m < F.grid.M; ++m)
    for (int y = 0; y < X.n(); ++y) s += std::norm(F.v(y, m)) * X.mass(y) * w;
  return std::sqrt(s);
}

Eigen::VectorXd maximal_local(const Space& X, const Eigen::VectorXd& f) {
  const int n = X.n();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  std::vector<int> order(n);
  for (int x = 0; x < n; ++x) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double da = X.dist(x, a), db = X.dist(x, b);
      if (da != db) return da < db;
      return a < b;
    });
    // averages over closed balls at realized thresholds < 1 attain the sup
    // over open balls with r in (0, 1]
    double msum = 0, fsum = 0, best = 0;
    for (int k = 0; k < n; ++k) {
      int y = order[k];
      if (X.dist(x, y) >= 1.0) break;
      msum += X.mass(y);
      fsum += std::abs(f(y)) * X.mass(y);
      bool group_end = (k + 1 == n) || (X.dist(x, order[k + 1]) != X.dist(x, y));
      if (group_end) best = std::max(best, fsum / msum);
    }
    out(x) = best;
  }
  return out;
}

Eigen::VectorXd lusin(const Space& X, const TentField& F, double aperture) {
  const int n = X.n();
  const double w = F.grid.weight();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int x = 0; x < n; ++x) {
    double acc = 0;
    for (int m = 0; m < F.grid.M; ++m) {
      double t = F.grid.node(m), r = aperture * t;
      double slice = 0;
      for (int y = 0; y < n; ++y)
        if (X.dist(x, y) < r) slice += std::norm(F.v(y, m)) * X.mass(y);
      if (slice > 0) acc += slice * w / volume(X, x, t);
    }
    out(x) = std::sqrt(acc);
  }
  return out;
}

Eigen::VectorXd carleson(const Space& X, const TentField& F) {
  const int n = X.n(), M = F.grid.M;
  const double w = F.grid.weight();
  std::vector<double> tvec(M);
  for (int m = 0; m < M; ++m) tvec[m] = F.grid.node(m);

  // suffix[y][m] = sum over m' >= m of |F(y,m')|^2 mass(y) w; t decreasing in m
  std::vector<std::vector<double>> suffix(n, std::vector<double>(M + 1, 0.0));
  for (int y = 0; y < n; ++y)
    for (int m = M - 1; m >= 0; --m)
      suffix[y][m] = suffix[y][m + 1] + std::norm(F.v(y, m)) * X.mass(y) * w;

  auto energy_below = [&](int y, double tau) {
    if (tau == kInf) return suffix[y][0];
    // smallest m with t_m <= tau; all later (smaller) times qualify
    int lo = 0, hi = M;
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (tvec[mid] <= tau)
        hi = mid;
      else
        lo = mid + 1;
    }
    return suffix[y][lo];
  };

  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  std::vector<int> order(n);
  for (int c = 0; c < n; ++c) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double da = X.dist(c, a), db = X.dist(c, b);
      if (da != db) return da < db;
      return a < b;
    });
    // distinct balls around c with radius <= 2 are the closed balls at
    // realized thresholds < 2; sweep them in growing order
    int k = 0;
    while (k < n) {
      int k2 = k;
      while (k2 + 1 < n && X.dist(c, order[k2 + 1]) == X.dist(c, order[k])) ++k2;
      double tau = X.dist(c, order[k]);
      if (tau >= 2.0) break;
      // members are order[0..k2]
      double mu = 0, val = 0;
      std::vector<char> inB(n, 0);
      for (int i = 0; i <= k2; ++i) inB[order[i]] = 1;
      for (int i = 0; i <= k2; ++i) {
        int y = order[i];
        mu += X.mass(y);
        double rho = kInf;
        for (int z = 0; z < n; ++z)
          if (!inB[z]) rho = std::min(rho, X.dist(y, z));
        if (rho > 0) val += energy_below(y, rho);
      }
      val /= mu;
      for (int i = 0; i <= k2; ++i) out(order[i]) = std::max(out(order[i]), val);
      k = k2 + 1;
    }
  }
  return out.cwiseSqrt();
}

double tent_norm(const Space& X, const TentField& F, double p) {
  if (!F.v.allFinite()) throw NonfiniteValues("tent field");
  if (std::isnan(p) || p < 1.0) throw InvalidP(p);
  if (std::isinf(p)) {
    auto C = carleson(X, F);
    return C.size() ? C.maxCoeff() : 0.0;
  }
  auto A = lusin(X, F, 1.0);
  double s = 0;
  for (int x = 0; x < X.n(); ++x) s += std::pow(A(x), p) * X.mass(x);
  return std::pow(s, 1.0 / p);
}

cplx pairing(const Space& X, const TentField& F, const TentField& G) {
  if (!F.grid.same(G.grid)) throw GridMismatch();
  cplx s = 0;
  const double w = F.grid.weight();
  for (int m = 0; m < F.grid.M; ++m)
    for (int y = 0; y < X.n(); ++y)
      s += F.v(y, m) * std::conj(G.v(y, m)) * X.mass(y) * w;
  return s;
}

}  // namespace hardy
