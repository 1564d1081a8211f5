#include "hardy/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hardy {

namespace {

double region_leak(const Space& X, const TentField& F, const TentRegion& R) {
  // energy fraction of F outside R
  double inside = 0, total = 0;
  const double w = F.grid.weight();
  std::vector<char> in(X.n(), 0);
  for (int m = 0; m < F.grid.M; ++m) {
    std::fill(in.begin(), in.end(), 0);
    if (m < static_cast<int>(R.members.size()))
      for (int y : R.members[m]) in[y] = 1;
    for (int y = 0; y < X.n(); ++y) {
      double e = std::norm(F.v(y, m)) * X.mass(y) * w;
      total += e;
      if (in[y]) inside += e;
    }
  }
  return total == 0 ? 0.0 : (total - inside) / total;
}

}  // namespace

TentAtomCheck validate_tent_atom(const Space& X, const TentAtomRecord& rec) {
  TentAtomCheck c;
  c.radius = rec.ball.radius;
  c.radius_ok = rec.ball.radius > 0 && rec.ball.radius <= 2.0 + 1e-12;
  auto tent = region_tent(X, rec.field.grid, ball_members(X, rec.ball), 1.0);
  c.support_leak = region_leak(X, rec.field, tent);
  c.support_ok = c.support_leak <= 1e-12;
  double mu = set_measure(X, ball_members(X, rec.ball));
  c.norm_slack = l2bullet(X, rec.field) * std::sqrt(mu);
  c.norm_ok = c.norm_slack <= 1.0 + 1e-9;
  return c;
}

std::vector<int> gamma_density_points(const Space& X, const std::vector<int>& S,
                                      double gamma) {
  const int n = X.n();
  std::vector<char> inS(n, 0);
  for (int i : S) inS[i] = 1;
  std::vector<int> out, order(n);
  for (int x = 0; x < n; ++x) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double da = X.dist(x, a), db = X.dist(x, b);
      if (da != db) return da < db;
      return a < b;
    });
    // density over closed balls at realized thresholds < 1 attains the inf
    // over open balls with r in (0, 1]
    double msum = 0, ssum = 0, worst = 1.0;
    for (int k = 0; k < n; ++k) {
      int y = order[k];
      if (X.dist(x, y) >= 1.0) break;
      msum += X.mass(y);
      if (inS[y]) ssum += X.mass(y);
      bool group_end = (k + 1 == n) || (X.dist(x, order[k + 1]) != X.dist(x, y));
      if (group_end) worst = std::min(worst, ssum / msum);
    }
    if (worst >= gamma) out.push_back(x);
  }
  return out;
}

std::vector<TentAtomRecord> t1_decompose(const Space& X, const TentField& F,
                                         const DensityConfig& cfg) {
  if (!F.v.allFinite()) throw NonfiniteValues("t1 decomposition input");
  const double eta = cfg.eta, h = cfg.h, alpha = cfg.alpha;
  if ((alpha - 4) * (1 - eta) < 12.0 - 1e-12 || (alpha - 4) * h < 8.0 - 1e-12 ||
      alpha * h > 16.0 + 1e-12 || eta <= 0 || eta >= 1 || h <= 0)
    throw Error("density config violates the support constraints");

  std::vector<TentAtomRecord> out;
  if (F.v.isZero(0)) return out;

  const TimeGrid& g = F.grid;
  Eigen::VectorXd A = lusin(X, F, 1.0);

  double gamma = cfg.gamma;
  if (gamma <= 0) {
    double ceta = 1.0;
    for (int x = 0; x < X.n(); ++x)
      for (int m = 0; m < g.M; ++m) {
        double t = g.node(m);
        ceta = std::min(ceta, volume(X, x, eta * t) / volume(X, x, t));
      }
    gamma = 1.0 - ceta / 2.0;
  }

  double minpos = 0;
  for (int x = 0; x < X.n(); ++x)
    if (A(x) > 0 && (minpos == 0 || A(x) < minpos)) minpos = A(x);
  if (minpos == 0) return out;
  const int kmin = static_cast<int>(std::floor(std::log2(minpos))) - 1;

  // level sets shrink as k grows; tents over their dilations nest, so the
  // k-th shell tent difference telescopes exactly
  auto level_set = [&](int k) {
    std::vector<int> O;
    double thr = std::ldexp(1.0, k);
    for (int x = 0; x < X.n(); ++x)
      if (A(x) > thr) O.push_back(x);
    return O;
  };
  auto dilate_set = [&](const std::vector<int>& O) {
    return complement(X, gamma_density_points(X, complement(X, O), gamma));
  };

  std::vector<std::vector<std::vector<char>>> tents;  // per level: [m][y]
  std::vector<std::vector<int>> stars;
  for (int k = kmin;; ++k) {
    auto O = level_set(k);
    if (O.empty()) break;
    auto Ostar = dilate_set(O);
    auto region = region_tent(X, g, Ostar, 1.0 - eta);
    std::vector<std::vector<char>> in(g.M, std::vector<char>(X.n(), 0));
    for (int m = 0; m < g.M; ++m)
      for (int y : region.members[m]) in[m][y] = 1;
    tents.push_back(std::move(in));
    stars.push_back(std::move(Ostar));
  }

  const double w = g.weight();
  for (size_t lev = 0; lev < stars.size(); ++lev) {
    auto W = whitney_cover_allow_full(X, stars[lev], h);
    const auto& inT = tents[lev];
    const auto* inNext = lev + 1 < tents.size() ? &tents[lev + 1] : nullptr;
    for (size_t j = 0; j < W.balls.size(); ++j) {
      TentField G = zero_field(X, g);
      double energy = 0;
      for (int m = 0; m < g.M; ++m)
        for (int y = 0; y < X.n(); ++y) {
          if (!inT[m][y] || (inNext && (*inNext)[m][y])) continue;
          double phi = W.partition(j, y);
          if (phi == 0.0) continue;
          G.v(y, m) = F.v(y, m) * phi;
          energy += std::norm(G.v(y, m)) * X.mass(y) * w;
        }
      if (energy == 0) continue;
      BallRef B{W.balls[j].center, alpha * W.balls[j].radius};
      double lambda = std::sqrt(set_measure(X, ball_members(X, B)) * energy);
      G.v /= lambda;
      out.push_back({std::move(G), B, lambda});
    }
  }
  return out;
}

std::vector<TentAtomRecord> split_carleson_atom(const Space& X,
                                                const CarlesonAtomRecord& rec) {
  if (!(rec.ball.radius > 0))
    throw NotACarlesonAtom("ball radius must be positive");
  auto box = region_box(X, rec.field.grid, rec.ball);
  if (region_leak(X, rec.field, box) > 1e-12)
    throw NotACarlesonAtom("field leaks outside the box over its ball");
  auto mem = ball_members(X, rec.ball);
  double mu = set_measure(X, mem);
  if (l2bullet(X, rec.field) > (1.0 + 1e-9) / std::sqrt(mu))
    throw NotACarlesonAtom("energy exceeds mu(B)^{-1/2}");

  const TimeGrid& g = rec.field.grid;
  const double w = g.weight();

  // small balls: pay a doubling factor and move to the tent over 2B
  auto inflate = [&](const TentField& a, const BallRef& B, double coeff) {
    BallRef twoB = dilate(B, 2.0);
    double c = set_measure(X, ball_members(X, twoB)) /
               set_measure(X, ball_members(X, B));
    TentAtomRecord r{a, twoB, coeff * std::sqrt(c)};
    r.field.v /= std::sqrt(c);
    return r;
  };

  std::vector<TentAtomRecord> out;
  if (rec.ball.radius <= 1.0) {
    out.push_back(inflate(rec.field, rec.ball, rec.coeff));
    return out;
  }

  // large balls: disjoint radius-1/4 family covering B via its dilates,
  // then the same doubling step on each radius-1 piece
  std::vector<BallRef> family;
  for (int x : mem) family.push_back({x, 0.25});
  auto sel = vitali_select(X, family);
  std::vector<BallRef> tiles;
  for (int s : sel.selected) tiles.push_back(dilate(family[s], 4.0));  // radius 1

  const int J = static_cast<int>(tiles.size());
  std::vector<std::vector<char>> inBox(J);
  for (int j = 0; j < J; ++j) {
    inBox[j].assign(X.n(), 0);
    for (int y : ball_members(X, tiles[j])) inBox[j][y] = 1;
  }
  // box over a radius-1 ball contains all grid times
  for (int m = 0; m < g.M; ++m)
    for (int y = 0; y < X.n(); ++y) {
      if (rec.field.v(y, m) == 0.0) continue;
      int cnt = 0;
      for (int j = 0; j < J; ++j) cnt += inBox[j][y];
      if (cnt == 0) throw Error("carleson tiles fail to cover the atom");
    }

  for (int j = 0; j < J; ++j) {
    TentField piece = zero_field(X, g);
    double energy = 0;
    for (int m = 0; m < g.M; ++m)
      for (int y = 0; y < X.n(); ++y) {
        if (!inBox[j][y] || rec.field.v(y, m) == 0.0) continue;
        int cnt = 0;
        for (int k = 0; k < J; ++k) cnt += inBox[k][y];
        piece.v(y, m) = rec.field.v(y, m) / static_cast<double>(cnt);
        energy += std::norm(piece.v(y, m)) * X.mass(y) * w;
      }
    if (energy == 0) continue;
    double muj = set_measure(X, ball_members(X, tiles[j]));
    double lambda = std::sqrt(muj * energy);
    piece.v /= lambda;
    out.push_back(inflate(piece, tiles[j], rec.coeff * lambda));
  }
  return out;
}

LQAtomCheck validate_lq_atom(const Space& X, const LQAtomRecord& rec) {
  LQAtomCheck c;
  auto mem = ball_members(X, rec.ball);
  std::vector<char> in(X.n(), 0);
  for (int y : mem) in[y] = 1;
  double outside = 0, norm2 = 0;
  for (int y = 0; y < X.n(); ++y) {
    double e = std::norm(rec.field(y)) * X.mass(y);
    norm2 += e;
    if (!in[y]) outside += e;
  }
  c.support_ok = norm2 == 0 || outside <= 1e-24 * norm2;
  c.radius_ok = rec.ball.radius >= 1.0 - 1e-12;
  c.norm_slack = std::sqrt(norm2 * set_measure(X, mem));
  c.strict = c.norm_slack <= 1.0 + 1e-9;
  return c;
}

LQAtomRecord lq_strictify(const Space& X, const LQAtomRecord& rec) {
  auto c = validate_lq_atom(X, rec);
  if (c.norm_slack <= 1.0) return rec;
  LQAtomRecord out = rec;
  out.field /= c.norm_slack;
  out.coeff *= c.norm_slack;
  return out;
}

double lq_norm(const Space& X, const UnitCubeStructure& U,
               const Eigen::VectorXcd& f, double p) {
  if (std::isnan(p) || p < 1.0) throw InvalidP(p);
  if (!f.allFinite()) throw NonfiniteValues("blocked norm input");
  double acc = 0, top = 0;
  for (const auto& Q : U.cubes) {
    double mu = set_measure(X, Q), e = 0;
    for (int y : Q) e += std::norm(f(y)) * X.mass(y);
    double l2 = std::sqrt(e);
    if (std::isinf(p))
      top = std::max(top, l2 / std::sqrt(mu));
    else
      acc += std::pow(std::pow(mu, 1.0 / p - 0.5) * l2, p);
  }
  return std::isinf(p) ? top : std::pow(acc, 1.0 / p);
}

std::vector<LQAtomRecord> l1q_decompose(const Space& X,
                                        const UnitCubeStructure& U,
                                        const Eigen::VectorXcd& f) {
  if (!f.allFinite()) throw NonfiniteValues("block decomposition input");
  std::vector<LQAtomRecord> out;
  for (size_t j = 0; j < U.cubes.size(); ++j) {
    const auto& Q = U.cubes[j];
    double e = 0;
    for (int y : Q) e += std::norm(f(y)) * X.mass(y);
    if (e == 0) continue;
    double l2 = std::sqrt(e);
    double lambda = std::sqrt(set_measure(X, Q)) * l2;
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(X.n());
    for (int y : Q) a(y) = f(y) / lambda;
    out.push_back({std::move(a), U.anchors[j], lambda});
  }
  return out;
}

}  // namespace hardy
