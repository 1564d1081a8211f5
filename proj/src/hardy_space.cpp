#include "hardy/hardy_space.hpp"

#include <algorithm>
#include <cmath>

#include "hardy/errors.hpp"

namespace hardy {

HardyConfig make_config(const GrowthReport& g, double beta) {
  HardyConfig cfg;
  cfg.beta = beta;
  cfg.kappa = g.envelope.kappa;
  cfg.lambda = g.envelope.lambda;
  double s = std::sin(cfg.sec.theta);
  cfg.sec.r = std::max(1.0, 1.05 * cfg.lambda / (2 * s));
  DefaultPair pair = default_pair(beta, cfg.sec);
  cfg.eta = pair.eta;
  cfg.phi = pair.phi;
  check_config(cfg);
  return cfg;
}

void check_config(const HardyConfig& cfg) {
  if (!(cfg.sec.theta > 0) || cfg.sec.theta >= M_PI / 2 || !(cfg.sec.r > 0))
    throw SectorInfeasible("sector parameters out of range");
  if (!(cfg.sec.r * std::sin(cfg.sec.theta) > cfg.lambda / 2))
    throw SectorInfeasible(
        "sector too small for the measured exponential growth");
  if (!(cfg.beta > 0)) throw SectorInfeasible("beta must be positive");
}

double hp_norm(const DiracOperator& op, const Space& X,
               const UnitCubeStructure& cubes, const HardyConfig& cfg,
               const Eigen::VectorXcd& u, double p) {
  if (X.n() != op.n()) throw Error("hp_norm: space and operator disagree");
  QResult q = q_transform(op, cfg.eta, cfg.phi, u, cfg.grid, Route::Spectral);
  double tent = tent_norm(X, q.slices, p);
  double foot = lq_norm(X, cubes, q.footprint, p);
  return tent + foot;
}

namespace {

double l2_on(const Space& X, const Eigen::VectorXcd& v,
             const std::vector<int>& S) {
  double s = 0;
  for (int i : S) s += X.mass(i) * std::norm(v(i));
  return std::sqrt(s);
}

// dyadic annulus rows around the ball until the space is swallowed
struct AnnulusRow {
  std::vector<int> members;
  double bound;  // e^{-q 2^{k-1} r} 2^{-k} mu(2^k B)^{-1/2}
};

std::vector<AnnulusRow> annulus_rows(const Space& X, const BallRef& B,
                                     double q) {
  std::vector<AnnulusRow> rows;
  std::vector<int> prev;
  for (int k = 0;; ++k) {
    double rk = std::ldexp(B.radius, k);
    std::vector<int> cur = ball(X, B.center, rk);
    AnnulusRow row;
    if (k == 0) {
      row.members = cur;
    } else {
      std::set_difference(cur.begin(), cur.end(), prev.begin(), prev.end(),
                          std::back_inserter(row.members));
    }
    double vol = volume(X, B.center, rk);
    if (vol <= 0) vol = X.mass(B.center);
    row.bound = std::exp(-q * std::ldexp(B.radius, k - 1)) * std::ldexp(1.0, -k) /
                std::sqrt(vol);
    rows.push_back(std::move(row));
    if (static_cast<int>(cur.size()) == X.n()) break;
    prev = std::move(cur);
    if (k > 300) throw Error("annulus_rows: ball never covers the space");
  }
  return rows;
}

}  // namespace

MoleculeCheck validate_molecule(const DiracOperator& op, const Space& X,
                                const Molecule& mol) {
  if (X.n() != op.n() || mol.a.size() != op.n())
    throw Error("validate_molecule: size mismatch");
  MoleculeCheck out;
  out.witness_required = mol.ball.radius < 1.0;
  std::vector<AnnulusRow> rows = annulus_rows(X, mol.ball, mol.q);
  out.rows = static_cast<int>(rows.size());
  double rN = std::pow(mol.ball.radius, mol.N);
  for (const AnnulusRow& row : rows) {
    if (row.members.empty()) continue;
    double got = l2_on(X, mol.a, row.members);
    out.worst_slack = std::max(out.worst_slack, got / row.bound);
    if (mol.has_witness) {
      double gb = l2_on(X, mol.b, row.members);
      out.witness_slack = std::max(out.witness_slack, gb / (rN * row.bound));
    }
  }
  bool rows_ok = out.worst_slack <= 1 + 1e-9;
  if (mol.has_witness) {
    Eigen::VectorXcd da = mol.b;
    for (int i = 0; i < mol.N; ++i) {
      Eigen::VectorXcd next(da.size());
      next.real() = op.D * da.real().eval();
      next.imag() = op.D * da.imag().eval();
      da = next;
    }
    std::vector<int> all(X.n());
    for (int i = 0; i < X.n(); ++i) all[i] = i;
    double scale = l2_on(X, mol.a, all);
    out.witness_ok =
        l2_on(X, da - mol.a, all) <= 1e-9 * std::max(scale, 1e-300);
    rows_ok = rows_ok && out.witness_slack <= 1 + 1e-9;
  }
  out.pass = rows_ok && (!out.witness_required || mol.has_witness) &&
             out.witness_ok;
  return out;
}

namespace {

// the common normalization step: scale so the worst annulus row sits at 1
Molecule normalize_molecule(const Space& X, Molecule mol) {
  std::vector<AnnulusRow> rows = annulus_rows(X, mol.ball, mol.q);
  double c = 0;
  double rN = std::pow(mol.ball.radius, mol.N);
  for (const AnnulusRow& row : rows) {
    if (row.members.empty()) continue;
    c = std::max(c, l2_on(X, mol.a, row.members) / row.bound);
    if (mol.has_witness)
      c = std::max(c, l2_on(X, mol.b, row.members) / (rN * row.bound));
  }
  if (c <= 0) c = 1;
  mol.a /= c;
  if (mol.has_witness) mol.b /= c;
  mol.coeff = c;
  return mol;
}

}  // namespace

Molecule tent_atom_to_molecule(const DiracOperator& op, const Space& X,
                               const HardyConfig& cfg,
                               const TentAtomRecord& atom) {
  TentAtomCheck chk = validate_tent_atom(X, atom);
  if (!chk.pass()) throw AtomInvalid("tent atom fails its own bounds");
  if (atom.field.v.rows() != op.n())
    throw Error("tent_atom_to_molecule: size mismatch");
  check_config(cfg);

  int N = static_cast<int>(std::floor(cfg.kappa / 2)) + 1;
  double q = std::max(cfg.lambda, 0.0);
  int p = static_cast<int>(std::ceil(cfg.beta)) + N + 1;
  HoloFn psi_m = HoloFn::monomial(p) * HoloFn::expz2();
  HoloFn psi_w = HoloFn::monomial(p - N) * HoloFn::expz2();
  HoloFn zero = HoloFn::constant(cplx(0, 0));

  Eigen::VectorXcd nul = Eigen::VectorXcd::Zero(op.n());
  Molecule mol;
  mol.ball = atom.ball;
  mol.N = N;
  mol.q = q;
  mol.a = s_transform(op, psi_m, zero, atom.field, nul, Route::Spectral);
  if (atom.ball.radius < 1.0) {
    // witness via the reduced symbol: t^N D^N psi_w(tD) = psi_m(tD)
    TentField scaled = atom.field;
    for (int m = 0; m < scaled.grid.M; ++m)
      scaled.v.col(m) *= std::pow(scaled.grid.node(m), N);
    mol.b = s_transform(op, psi_w, zero, scaled, nul, Route::Spectral);
    mol.has_witness = true;
  }
  return normalize_molecule(X, std::move(mol));
}

Molecule lq_atom_to_molecule(const DiracOperator& op, const Space& X,
                             const HardyConfig& cfg, const LQAtomRecord& atom) {
  LQAtomCheck chk = validate_lq_atom(X, atom);
  if (!chk.pass()) throw AtomInvalid("block atom fails its own bounds");
  if (atom.field.size() != op.n())
    throw Error("lq_atom_to_molecule: size mismatch");
  check_config(cfg);

  Molecule mol;
  mol.ball = atom.ball;
  mol.N = static_cast<int>(std::floor(cfg.kappa / 2)) + 1;
  mol.q = std::max(cfg.lambda, 0.0);
  mol.a = spectral_apply(op, HoloFn::expz2(), atom.field);
  return normalize_molecule(X, std::move(mol));
}

double molecule_h1_bound(const DiracOperator& op, const Space& X,
                         const UnitCubeStructure& cubes,
                         const HardyConfig& cfg, const Molecule& mol) {
  return hp_norm(op, X, cubes, cfg, mol.a, 1.0);
}

RieszReport riesz_local(const DiracOperator& op, double a,
                        const Eigen::VectorXcd& u, const SectorParams& sec) {
  if (!(a > 0)) throw Error("riesz_local: shift must be > 0");
  RieszReport rep;
  rep.spectral = spectral_apply(op, HoloFn::riesz_symbol(a), u);

  ApplyResult half =
      contour_apply(op, HoloFn::resolvent_power(a, 0.5), u, sec);
  rep.contour.resize(op.n());
  rep.contour.real() = op.D * half.u.real().eval();
  rep.contour.imag() = op.D * half.u.imag().eval();
  rep.err_estimate = half.err_estimate;
  rep.rel_gap = (rep.contour - rep.spectral).norm() /
                std::max(rep.spectral.norm(), 1e-300);

  op.ensure_eig();
  double nb = 0;
  for (int k = 0; k < op.evals.size(); ++k) {
    double lam = op.evals(k);
    nb = std::max(nb, std::abs(lam) / std::sqrt(lam * lam + a));
  }
  rep.norm_bound = nb;
  rep.contraction = nb <= 1 + 1e-9;
  return rep;
}

double hinfty_norm(const DiracOperator& op, const HoloFn& f) {
  op.ensure_eig();
  double m = 0;
  for (int k = 0; k < op.evals.size(); ++k)
    m = std::max(m, std::abs(f(cplx(op.evals(k), 0))));
  return m;
}

}  // namespace hardy
