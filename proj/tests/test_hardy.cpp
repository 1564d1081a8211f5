#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hardy/errors.hpp"
#include "hardy/hardy_space.hpp"

using namespace hardy;

namespace {

Eigen::VectorXcd random_cvec(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0, 1);
  Eigen::VectorXcd u(n);
  for (int i = 0; i < n; ++i) u(i) = cplx(g(rng), g(rng));
  return u;
}

TentField random_field(const Space& X, const TimeGrid& g, unsigned seed) {
  TentField F;
  F.grid = g;
  F.v.resize(X.n(), g.M);
  std::mt19937 rng(seed);
  std::normal_distribution<double> n01(0, 1);
  for (int i = 0; i < X.n(); ++i)
    for (int m = 0; m < g.M; ++m) F.v(i, m) = cplx(n01(rng), n01(rng));
  return F;
}

// indicator of the tent over B, rescaled into a strict atom
TentAtomRecord make_tent_atom(const Space& X, const TimeGrid& g, int center,
                              double radius) {
  BallRef B{center, radius};
  TentRegion reg = region_tent(X, g, ball(X, center, radius), 1.0);
  TentAtomRecord rec;
  rec.ball = B;
  rec.coeff = 1;
  rec.field = zero_field(X, g);
  for (int m = 0; m < g.M; ++m)
    for (int i : reg.members[m]) rec.field.v(i, m) = 1.0;
  double nb = l2bullet(X, rec.field);
  REQUIRE(nb > 0);
  double target = 1.0 / std::sqrt(volume(X, center, radius));
  rec.field.v *= target / nb;
  return rec;
}

struct Setup {
  WeightedComplex K;
  DiracOperator op;
  Space X;
  UnitCubeStructure cubes;
  HardyConfig cfg;
  Setup(int path_len, int gridM) : K(path_complex(path_len)), op(dirac(K)),
                                   X(simplex_space(K)), cubes(unit_cubes(X)) {
    cfg = make_config(fit_growth(X), 1.0);
    cfg.grid.M = gridM;
  }
};

}  // namespace

TEST_CASE("config construction respects the measured growth") {
  Setup s(12, 16);
  CHECK(s.cfg.sec.theta == doctest::Approx(0.55));
  CHECK(s.cfg.sec.r >= 1.0);
  CHECK(s.cfg.sec.r * std::sin(s.cfg.sec.theta) > s.cfg.lambda / 2);
  CHECK_NOTHROW(check_config(s.cfg));

  HardyConfig bad = s.cfg;
  bad.lambda = 5.0;
  bad.sec.r = 1.0;
  CHECK_THROWS_AS(check_config(bad), SectorInfeasible);
  HardyConfig bad2 = s.cfg;
  bad2.beta = 0.0;
  CHECK_THROWS_AS(check_config(bad2), SectorInfeasible);
}

TEST_CASE("hand-built point molecule validates and edge cases fail") {
  Setup s(8, 16);
  const Space& X = s.X;
  int c = X.n() / 2;

  Molecule mol;
  mol.ball = BallRef{c, 1.5};
  mol.N = 1;
  mol.q = 0.3;
  mol.a = Eigen::VectorXcd::Zero(X.n());
  // exactly saturate the first annulus row
  double bound0 =
      std::exp(-mol.q * 0.75) / std::sqrt(volume(X, c, 1.5));
  mol.a(c) = bound0 / std::sqrt(X.mass(c));
  MoleculeCheck chk = validate_molecule(s.op, X, mol);
  CHECK(chk.pass);
  CHECK(chk.rows >= 2);
  CHECK(chk.worst_slack == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(chk.witness_required);

  // same mass but a small ball: a witness becomes mandatory
  Molecule small = mol;
  small.ball.radius = 0.5;
  MoleculeCheck chk2 = validate_molecule(s.op, X, small);
  CHECK(chk2.witness_required);
  CHECK_FALSE(chk2.pass);

  // an overweight row fails
  Molecule heavy = mol;
  heavy.a *= 3.0;
  CHECK_FALSE(validate_molecule(s.op, X, heavy).pass);
}

TEST_CASE("tent atoms convert to valid molecules with exact witnesses") {
  Setup s(12, 16);
  TentField F = random_field(s.X, s.cfg.grid, 551);
  std::vector<TentAtomRecord> atoms = t1_decompose(s.X, F);
  REQUIRE(atoms.size() >= 3);

  int converted = 0;
  for (size_t i = 0; i < atoms.size() && converted < 4; ++i) {
    Molecule mol = tent_atom_to_molecule(s.op, s.X, s.cfg, atoms[i]);
    MoleculeCheck chk = validate_molecule(s.op, s.X, mol);
    CHECK(chk.pass);
    CHECK(mol.coeff > 0);
    CHECK(std::isfinite(mol.coeff));
    if (mol.ball.radius < 1.0) {
      CHECK(mol.has_witness);
      CHECK(chk.witness_ok);
    }
    double h1 = molecule_h1_bound(s.op, s.X, s.cubes, s.cfg, mol);
    CHECK(h1 > 0);
    CHECK(std::isfinite(h1));
    ++converted;
  }
  CHECK(converted >= 3);
}

TEST_CASE("a wide tent atom converts without needing a witness") {
  Setup s(10, 16);
  TentAtomRecord atom = make_tent_atom(s.X, s.cfg.grid, s.X.n() / 2, 1.5);
  REQUIRE(validate_tent_atom(s.X, atom).pass());
  Molecule mol = tent_atom_to_molecule(s.op, s.X, s.cfg, atom);
  CHECK_FALSE(mol.has_witness);
  CHECK(validate_molecule(s.op, s.X, mol).pass);
}

TEST_CASE("block atoms convert to valid molecules") {
  Setup s(12, 16);
  Eigen::VectorXcd f = random_cvec(s.X.n(), 808);
  std::vector<LQAtomRecord> atoms = l1q_decompose(s.X, s.cubes, f);
  REQUIRE(!atoms.empty());
  for (size_t i = 0; i < std::min<size_t>(atoms.size(), 3); ++i) {
    LQAtomRecord strict = lq_strictify(s.X, atoms[i]);
    Molecule mol = lq_atom_to_molecule(s.op, s.X, s.cfg, strict);
    MoleculeCheck chk = validate_molecule(s.op, s.X, mol);
    CHECK(chk.pass);
    CHECK_FALSE(chk.witness_required);
    double h1 = molecule_h1_bound(s.op, s.X, s.cubes, s.cfg, mol);
    CHECK(std::isfinite(h1));
    CHECK(h1 > 0);
  }
}

TEST_CASE("square-function norm brackets the L2 norm at p = 2") {
  Setup s(14, 16);
  Eigen::VectorXcd u = random_cvec(s.X.n(), 909);
  double h2 = hp_norm(s.op, s.X, s.cubes, s.cfg, u, 2.0);
  double l2 = std::sqrt((s.X.mass.array() * u.cwiseAbs2().array()).sum());
  CHECK(h2 > 0.05 * l2);
  CHECK(h2 < 20.0 * l2);

  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(s.X.n());
  CHECK(hp_norm(s.op, s.X, s.cubes, s.cfg, zero, 2.0) == 0.0);

  Space wrong = vertex_space(s.K);
  CHECK_THROWS_AS(hp_norm(s.op, wrong, s.cubes, s.cfg, u, 2.0), Error);
}

TEST_CASE("local riesz transform is a contraction and the routes agree") {
  DiracOperator op = dirac(path_complex(10));
  Eigen::VectorXcd u = random_cvec(op.n(), 321);
  for (double a : {0.5, 1.0, 4.0}) {
    RieszReport rep = riesz_local(op, a, u);
    CHECK(rep.contraction);
    CHECK(rep.norm_bound <= 1.0 + 1e-9);
    CHECK(rep.rel_gap <= 1e-6);
    CHECK((rep.spectral.norm() <= u.norm() * (1 + 1e-9)));
  }
  CHECK_THROWS_AS(riesz_local(op, 0.0, u), Error);
}

TEST_CASE("sup of a symbol over the realized spectrum") {
  DiracOperator op = dirac(path_complex(6));
  op.ensure_eig();
  HoloFn f = HoloFn::riesz_symbol(1.0);
  double expect = 0;
  for (int k = 0; k < op.evals.size(); ++k) {
    double lam = op.evals(k);
    expect = std::max(expect, std::abs(lam) / std::sqrt(lam * lam + 1.0));
  }
  CHECK(hinfty_norm(op, f) == doctest::Approx(expect).epsilon(1e-12));
}
