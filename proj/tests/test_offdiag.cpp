#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hardy/errors.hpp"
#include "hardy/offdiag.hpp"

using namespace hardy;

namespace {

Eigen::MatrixXcd random_cmat(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0, 1);
  Eigen::MatrixXcd T(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) T(i, j) = cplx(g(rng), g(rng));
  return T;
}

Eigen::VectorXd random_weights(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = u(rng);
  return w;
}

}  // namespace

TEST_CASE("block norm equals the singular value of the flattened block") {
  const int n = 9;
  Eigen::MatrixXcd T = random_cmat(n, 11);
  Eigen::VectorXd W = random_weights(n, 12);
  std::vector<int> E = {0, 2, 5, 7}, F = {1, 3, 8};

  // whole-space flattening done independently of the library's path
  Eigen::MatrixXcd S = W.cwiseSqrt().cast<cplx>().asDiagonal() * T *
                       W.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal();
  Eigen::MatrixXcd B(E.size(), F.size());
  for (size_t i = 0; i < E.size(); ++i)
    for (size_t j = 0; j < F.size(); ++j) B(i, j) = S(E[i], F[j]);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B);
  CHECK(block_norm(T, W, E, F) ==
        doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));

  // single entry blocks reduce to the scaled modulus
  CHECK(block_norm(T, W, {4}, {6}) ==
        doctest::Approx(std::abs(T(4, 6)) * std::sqrt(W(4) / W(6)))
            .epsilon(1e-13));

  CHECK_THROWS_AS(block_norm(T, W, {}, F), EmptySet);
  CHECK_THROWS_AS(block_norm(T, W, E, {}), EmptySet);
}

TEST_CASE("sub-blocks never exceed the full weighted norm") {
  const int n = 12;
  Eigen::MatrixXcd T = random_cmat(n, 21);
  Eigen::VectorXd W = random_weights(n, 22);
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  double full = block_norm(T, W, all, all);
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> E, F;
    for (int i = 0; i < n; ++i) {
      if (rng() % 2) E.push_back(i);
      if (rng() % 2) F.push_back(i);
    }
    if (E.empty() || F.empty()) continue;
    CHECK(block_norm(T, W, E, F) <= full * (1 + 1e-12));
  }
}

TEST_CASE("resolvent matrix inverts the shifted operator") {
  DiracOperator op = dirac(path_complex(10));
  const int n = op.n();
  cplx z(0.3, 1.7);
  Eigen::MatrixXcd R = resolvent_matrix(op, z);
  Eigen::MatrixXcd A = -Eigen::MatrixXd(op.D).cast<cplx>();
  A.diagonal().array() += z;
  CHECK((A * R - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-10);

  // z on the real axis inside the spectrum is singular
  op.ensure_eig();
  cplx bad(op.evals(n - 1), 0);
  CHECK_THROWS_AS(resolvent_matrix(op, bad), ResolventSolveFailure);
}

TEST_CASE("resolvent blocks decay along the path and obey the sector bound") {
  WeightedComplex K = path_complex(20);
  DiracOperator op = dirac(K);
  Eigen::MatrixXd dist = nearest_vertex_dist(K);
  Eigen::VectorXd W = op.W;

  cplx z(0, 2);
  Eigen::MatrixXcd R = resolvent_matrix(op, z);
  DecayProfile prof = decay_profile(R, W, dist);

  REQUIRE(prof.sep.size() >= 4);
  CHECK(prof.norm[0] > 0);
  // decay across shells: two bands out the norm has dropped hard
  CHECK(prof.norm[2] < 0.3 * prof.norm[0]);
  CHECK(prof.rate > 0.1);
  for (size_t k = 0; k + 1 < prof.norm.size(); ++k)
    CHECK(prof.norm[k + 1] <= prof.norm[k] * (1 + 1e-9));

  BoundCheck bc = verify_bound(prof, z, 2.0, 1.0, 0.5, 0.0);
  CHECK(bc.c > 0);
  CHECK(std::isfinite(bc.c));

  // shrinking the operator constant a hundredfold sharpens the exponential
  // beyond what the measured blocks satisfy with a comparable constant
  BoundCheck canary = verify_bound(prof, z, 2.0, 1.0 / 100.0, 0.5, 0.0);
  CHECK(canary.c > 50.0 * bc.c);
}

TEST_CASE("larger spectral parameter sharpens the measured decay rate") {
  WeightedComplex K = path_complex(16);
  DiracOperator op = dirac(K);
  Eigen::MatrixXd dist = nearest_vertex_dist(K);

  DecayProfile p1 = decay_profile(resolvent_matrix(op, cplx(0, 2)), op.W, dist);
  DecayProfile p2 = decay_profile(resolvent_matrix(op, cplx(0, 4)), op.W, dist);
  CHECK(p2.rate > p1.rate);
}

TEST_CASE("profile input validation") {
  WeightedComplex K = path_complex(4);
  DiracOperator op = dirac(K);
  Eigen::MatrixXd dist = nearest_vertex_dist(K);
  Eigen::MatrixXcd R = resolvent_matrix(op, cplx(0, 1));
  CHECK_THROWS_AS(decay_profile(R, op.W, dist, 0.0), Error);
  Eigen::MatrixXd wrong(2, 2);
  wrong.setZero();
  CHECK_THROWS_AS(decay_profile(R, op.W, wrong), Error);
  DecayProfile prof = decay_profile(R, op.W, dist);
  CHECK_THROWS_AS(verify_bound(prof, cplx(0, 0), 2.0, 1.0, 0.5, 0.0), Error);
  CHECK_THROWS_AS(verify_bound(prof, cplx(0, 1), -1.0, 1.0, 0.5, 0.0), Error);
}
