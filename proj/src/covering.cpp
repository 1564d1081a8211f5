#include "hardy/covering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hardy {

namespace {

// packed membership rows for fast disjointness tests
struct BitRows {
  int words;
  std::vector<uint64_t> data;
  BitRows(int rows, int n) : words((n + 63) / 64), data(size_t(rows) * words, 0) {}
  void set(int row, int i) { data[size_t(row) * words + i / 64] |= 1ull << (i % 64); }
  bool intersects(int a, int b) const {
    const uint64_t* pa = &data[size_t(a) * words];
    const uint64_t* pb = &data[size_t(b) * words];
    for (int w = 0; w < words; ++w)
      if (pa[w] & pb[w]) return true;
    return false;
  }
};

int radius_class(double r, double R) {
  // class k means r in (delta^k R, delta^{k-1} R], delta = 2/3
  const double delta = 2.0 / 3.0;
  int k = 1;
  double thr = delta * R;
  while (r <= thr * (1 + 1e-15) && k < 4096) {
    thr *= delta;
    ++k;
  }
  return k;
}

}  // namespace

VitaliSelection vitali_select(const Space& X, const std::vector<BallRef>& balls) {
  if (balls.empty()) throw EmptyInput("vitali family");
  const int F = static_cast<int>(balls.size());
  double R = 0;
  for (const auto& B : balls) {
    if (!(B.radius > 0)) throw Error("nonpositive ball radius");
    if (B.center < 0 || B.center >= X.n()) throw Error("ball center out of range");
    R = std::max(R, B.radius);
  }

  BitRows rows(F, X.n());
  for (int i = 0; i < F; ++i)
    for (int p : ball_members(X, balls[i])) rows.set(i, p);

  std::vector<int> order(F);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> cls(F);
  for (int i = 0; i < F; ++i) cls[i] = radius_class(balls[i].radius, R);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (cls[a] != cls[b]) return cls[a] < cls[b];
    if (balls[a].radius != balls[b].radius) return balls[a].radius > balls[b].radius;
    if (balls[a].center != balls[b].center) return balls[a].center < balls[b].center;
    return a < b;
  });

  VitaliSelection out;
  out.assignment.assign(F, -1);
  for (int i : order) {
    bool clear = true;
    for (int s : out.selected)
      if (rows.intersects(i, s)) {
        clear = false;
        break;
      }
    if (clear) out.selected.push_back(i);
  }
  // first selected ball (in selection order) meeting each input ball has class
  // at most the input's class, so the 4x dilate swallows it
  for (int i = 0; i < F; ++i)
    for (int s : out.selected)
      if (rows.intersects(i, s)) {
        out.assignment[i] = s;
        break;
      }
  return out;
}

namespace {

WhitneyCover whitney_impl(const Space& X, std::vector<int> O, double h,
                          bool allow_full) {
  if (!(h > 0)) throw Error("whitney scale h must be positive");
  std::sort(O.begin(), O.end());
  O.erase(std::unique(O.begin(), O.end()), O.end());
  if (O.empty()) throw OIsEmpty();
  auto Oc = complement(X, O);
  if (Oc.empty() && !allow_full) throw OIsAllOfX();

  std::vector<BallRef> family;
  family.reserve(O.size());
  for (int x : O)
    family.push_back({x, std::min(dist_to_set(X, x, Oc), h) / 8.0});

  auto sel = vitali_select(X, family);

  WhitneyCover W;
  W.h = h;
  for (int s : sel.selected) {
    W.balls.push_back(family[s]);
    W.dilates.push_back(dilate(family[s], 4.0));
  }
  const int J = static_cast<int>(W.balls.size());

  std::vector<std::vector<int>> dm(J);
  for (int j = 0; j < J; ++j) dm[j] = ball_members(X, W.dilates[j]);

  W.partition = Eigen::MatrixXd::Zero(J, X.n());
  Eigen::VectorXd colsum = Eigen::VectorXd::Zero(X.n());
  for (int j = 0; j < J; ++j)
    for (int p : dm[j]) {
      W.partition(j, p) = 1.0;
      colsum(p) += 1.0;
    }
  for (int x : O) {
    if (colsum(x) == 0) throw Error("whitney dilates fail to cover the set");
    W.partition.col(x) /= colsum(x);
  }
  for (int x : Oc) W.partition.col(x).setZero();

  W.intersection_bound = 0;
  std::vector<std::vector<char>> inD(J, std::vector<char>(X.n(), 0));
  for (int j = 0; j < J; ++j)
    for (int p : dm[j]) inD[j][p] = 1;
  for (int j = 0; j < J; ++j) {
    int cnt = 0;
    for (int k = 0; k < J; ++k) {
      bool meet = false;
      for (int p : dm[k])
        if (inD[j][p]) {
          meet = true;
          break;
        }
      if (meet) ++cnt;
    }
    W.intersection_bound = std::max(W.intersection_bound, cnt);
  }
  return W;
}

}  // namespace

WhitneyCover whitney_cover(const Space& X, const std::vector<int>& O, double h) {
  return whitney_impl(X, O, h, false);
}

WhitneyCover whitney_cover_allow_full(const Space& X, const std::vector<int>& O,
                                      double h) {
  return whitney_impl(X, O, h, true);
}

UnitCubeStructure unit_cubes(const Space& X) {
  const int n = X.n();
  std::vector<BallRef> family;
  family.reserve(n);
  for (int x = 0; x < n; ++x) family.push_back({x, 0.25});
  auto sel = vitali_select(X, family);

  UnitCubeStructure U;
  for (int s : sel.selected) {
    U.seeds.push_back(family[s]);
    U.anchors.push_back({family[s].center, 1.0});
  }
  const int J = static_cast<int>(U.seeds.size());

  std::vector<std::vector<char>> seed_in(J, std::vector<char>(n, 0));
  for (int j = 0; j < J; ++j)
    for (int p : ball_members(X, U.seeds[j])) seed_in[j][p] = 1;

  std::vector<char> taken(n, 0);
  U.cubes.resize(J);
  for (int j = 0; j < J; ++j) {
    for (int p : ball_members(X, U.anchors[j])) {
      if (taken[p]) continue;
      bool later_seed = false;
      for (int k = j + 1; k < J && !later_seed; ++k) later_seed = seed_in[k][p];
      if (later_seed) continue;
      U.cubes[j].push_back(p);
      taken[p] = 1;
    }
  }
  // every point lies in the anchor of the seed family covering its own
  // radius-1/4 ball, so the sweep above exhausts X
  for (int p = 0; p < n; ++p)
    if (!taken[p]) throw Error("unit cube sweep left a point unassigned");
  return U;
}

}  // namespace hardy
