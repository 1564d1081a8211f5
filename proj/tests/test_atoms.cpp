#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hardy/atoms.hpp"

using namespace hardy;

namespace {

Space cloud(unsigned seed, int n, double side = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, side), mw(0.5, 2.0);
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = u(rng);
    ys[i] = u(rng);
  }
  Eigen::MatrixXd D(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      D(i, j) = std::hypot(xs[i] - xs[j], ys[i] - ys[j]);
  Eigen::VectorXd m(n);
  for (int i = 0; i < n; ++i) m(i) = mw(rng);
  return build_space(D, m);
}

TentField random_field(unsigned seed, const Space& X, const TimeGrid& g,
                       double sparsity = 0.7) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TentField F{g, Eigen::MatrixXcd::Zero(X.n(), g.M)};
  for (int m = 0; m < g.M; ++m)
    for (int y = 0; y < X.n(); ++y)
      if (u(rng) > sparsity) F.v(y, m) = cplx(gauss(rng), gauss(rng));
  return F;
}

}  // namespace

TEST_CASE("density points match the maximal function") {
  Space X = cloud(31, 50);
  std::mt19937_64 rng(1);
  std::vector<int> S;
  for (int i = 0; i < X.n(); ++i)
    if (rng() % 3 == 0) S.push_back(i);
  double gamma = 0.7;
  auto dense = gamma_density_points(X, S, gamma);

  Eigen::VectorXd indSc = Eigen::VectorXd::Zero(X.n());
  for (int i : complement(X, S)) indSc(i) = 1.0;
  auto M = maximal_local(X, indSc);
  std::vector<int> viaM;
  for (int x = 0; x < X.n(); ++x)
    if (M(x) <= 1.0 - gamma + 1e-15) viaM.push_back(x);
  CHECK(dense == viaM);
}

TEST_CASE("density dilation inflates measure boundedly") {
  Space X = cloud(32, 60);
  auto O = ball(X, 5, 0.8);
  REQUIRE(!O.empty());
  double gamma = 0.8;
  auto Ostar = complement(X, gamma_density_points(X, complement(X, O), gamma));
  std::vector<char> in(X.n(), 0);
  for (int x : Ostar) in[x] = 1;
  for (int x : O) CHECK(in[x]);  // zero-density radius exists inside O
  CHECK(set_measure(X, Ostar) <= 20.0 * set_measure(X, O));
}

TEST_CASE("t1 decomposition reconstructs and validates") {
  TimeGrid g{0.84089641525371454, 16};
  for (unsigned seed : {41u, 42u, 43u}) {
    Space X = cloud(seed, 40);
    auto F = random_field(seed, X, g);
    auto atoms = t1_decompose(X, F);
    REQUIRE(!atoms.empty());

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(X.n(), g.M);
    double lambda1 = 0;
    for (const auto& rec : atoms) {
      sum += rec.coeff * rec.field.v;
      lambda1 += std::abs(rec.coeff);
      auto chk = validate_tent_atom(X, rec);
      CHECK(chk.support_ok);
      CHECK(chk.radius_ok);
      CHECK(chk.norm_ok);
      CHECK(chk.norm_slack == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(rec.ball.radius <= 1.25 + 1e-12);
    }
    double scale = F.v.cwiseAbs().maxCoeff();
    CHECK((sum - F.v).cwiseAbs().maxCoeff() <= 1e-12 * scale);

    double t1 = tent_norm(X, F, 1.0);
    CHECK(lambda1 < 100.0 * t1);
    CHECK(lambda1 >= t1 * 0.009);
  }
}

TEST_CASE("t1 decomposition edge cases") {
  TimeGrid g{0.84089641525371454, 8};
  Space X = cloud(44, 20);
  CHECK(t1_decompose(X, zero_field(X, g)).empty());

  TentField bad = zero_field(X, g);
  bad.v(0, 0) = cplx(1.0 / 0.0, 0.0);
  CHECK_THROWS_AS(t1_decompose(X, bad), NonfiniteValues);

  DensityConfig broken;
  broken.alpha = 5.0;  // violates the support inequalities
  auto F = random_field(44, X, g);
  CHECK_THROWS_AS(t1_decompose(X, F, broken), Error);

  // single spike: one atom family still reconstructs
  TentField spike = zero_field(X, g);
  spike.v(3, 2) = 1.0;
  auto atoms = t1_decompose(X, spike);
  REQUIRE(!atoms.empty());
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(X.n(), g.M);
  for (const auto& rec : atoms) sum += rec.coeff * rec.field.v;
  CHECK((sum - spike.v).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("carleson split small ball") {
  TimeGrid g{0.84089641525371454, 12};
  Space X = cloud(45, 40);
  BallRef B{7, 0.8};
  auto box = region_box(X, g, B);
  TentField a = zero_field(X, g);
  for (int m = 0; m < g.M; ++m)
    for (int y : box.members[m]) a.v(y, m) = 1.0;
  double mu = set_measure(X, ball_members(X, B));
  a.v /= l2bullet(X, a) * std::sqrt(mu);

  auto parts = split_carleson_atom(X, {a, B, 2.5});
  REQUIRE(parts.size() == 1);
  CHECK(parts[0].ball.radius == doctest::Approx(1.6));
  auto chk = validate_tent_atom(X, parts[0]);
  CHECK(chk.pass());
  Eigen::MatrixXcd sum = parts[0].coeff * parts[0].field.v;
  CHECK((sum - 2.5 * a.v).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("carleson split large ball") {
  TimeGrid g{0.84089641525371454, 12};
  Space X = cloud(46, 60, 6.0);
  BallRef B{0, 3.0};
  auto box = region_box(X, g, B);
  TentField a = zero_field(X, g);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int m = 0; m < g.M; ++m)
    for (int y : box.members[m]) a.v(y, m) = cplx(gauss(rng), gauss(rng));
  double mu = set_measure(X, ball_members(X, B));
  a.v /= l2bullet(X, a) * std::sqrt(mu);

  auto parts = split_carleson_atom(X, {a, B, 1.0});
  REQUIRE(parts.size() >= 2);
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(X.n(), g.M);
  for (const auto& rec : parts) {
    auto chk = validate_tent_atom(X, rec);
    CHECK(chk.pass());
    CHECK(rec.ball.radius == doctest::Approx(2.0));
    sum += rec.coeff * rec.field.v;
  }
  CHECK((sum - a.v).cwiseAbs().maxCoeff() <= 1e-12 * a.v.cwiseAbs().maxCoeff());
}

TEST_CASE("carleson split rejects junk") {
  TimeGrid g{0.84089641525371454, 8};
  Space X = cloud(47, 30);
  TentField stray = zero_field(X, g);
  stray.v.setConstant(0.01);
  CHECK_THROWS_AS(split_carleson_atom(X, {stray, {0, 0.5}, 1.0}),
                  NotACarlesonAtom);
  TentField empty = zero_field(X, g);
  CHECK_THROWS_AS(split_carleson_atom(X, {empty, {0, 0.0}, 1.0}),
                  NotACarlesonAtom);

  // norm violation: box-supported but too big
  BallRef B{1, 0.6};
  auto box = region_box(X, g, B);
  TentField big = zero_field(X, g);
  for (int m = 0; m < g.M; ++m)
    for (int y : box.members[m]) big.v(y, m) = 1.0;
  double mu = set_measure(X, ball_members(X, B));
  big.v *= 10.0 / (l2bullet(X, big) * std::sqrt(mu));
  CHECK_THROWS_AS(split_carleson_atom(X, {big, B, 1.0}), NotACarlesonAtom);
}

TEST_CASE("blocked norms") {
  Space X = cloud(48, 50);
  auto U = unit_cubes(X);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd f(X.n());
  for (int i = 0; i < X.n(); ++i) f(i) = cplx(gauss(rng), gauss(rng));

  // p = 2 collapses to the plain weighted L2 norm
  double l2 = 0;
  for (int i = 0; i < X.n(); ++i) l2 += std::norm(f(i)) * X.mass(i);
  CHECK(lq_norm(X, U, f, 2.0) == doctest::Approx(std::sqrt(l2)).epsilon(1e-12));
  CHECK_THROWS_AS(lq_norm(X, U, f, 0.3), InvalidP);
  CHECK(lq_norm(X, U, f, 1.0) > 0);
  CHECK(lq_norm(X, U, f, std::numeric_limits<double>::infinity()) > 0);
}

TEST_CASE("block decomposition is exact") {
  for (unsigned seed : {51u, 52u}) {
    Space X = cloud(seed, 45);
    auto U = unit_cubes(X);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd f(X.n());
    for (int i = 0; i < X.n(); ++i) f(i) = cplx(gauss(rng), gauss(rng));

    auto atoms = l1q_decompose(X, U, f);
    REQUIRE(!atoms.empty());
    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(X.n());
    double lambda1 = 0;
    for (const auto& rec : atoms) {
      sum += rec.coeff * rec.field;
      lambda1 += rec.coeff;
      auto chk = validate_lq_atom(X, rec);
      CHECK(chk.support_ok);
      CHECK(chk.radius_ok);
      CHECK(chk.norm_slack >= 1.0 - 1e-12);  // cube-normalized, not strict
      CHECK(chk.norm_slack < 10.0);
      auto strict = lq_strictify(X, rec);
      CHECK(validate_lq_atom(X, strict).pass());
      CHECK((strict.coeff * strict.field - rec.coeff * rec.field).norm() <=
            1e-12 * rec.field.norm() * rec.coeff);
    }
    CHECK((sum - f).cwiseAbs().maxCoeff() <= 1e-12 * f.cwiseAbs().maxCoeff());
    CHECK(lambda1 == doctest::Approx(lq_norm(X, U, f, 1.0)).epsilon(1e-13));
  }
}
