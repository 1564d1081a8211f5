#pragma once

#include "hardy/atoms.hpp"
#include "hardy/covering.hpp"
#include "hardy/holo.hpp"

namespace hardy {

// everything the local theory needs on one space: a sector compatible with
// the measured growth, the time grid, and a closed analytic pair
struct HardyConfig {
  SectorParams sec{0.55, 1.0, 0.0, 0.0};
  TimeGrid grid;
  double beta = 1;
  double kappa = 0;
  double lambda = 0;
  double C_D = 1;
  HoloFn eta = HoloFn::constant(cplx(0, 0));
  HoloFn phi = HoloFn::constant(cplx(0, 0));
};

HardyConfig make_config(const GrowthReport& g, double beta = 1);
void check_config(const HardyConfig& cfg);  // sector vs growth feasibility

// square-function norm: tent norm of the eta slices plus the cube-blocked
// norm of the footprint
double hp_norm(const DiracOperator& op, const Space& X,
               const UnitCubeStructure& cubes, const HardyConfig& cfg,
               const Eigen::VectorXcd& u, double p);

// section with L2 mass spread over dyadic annuli of its ball at a controlled
// rate; small balls additionally carry a witness a = D^N b
struct Molecule {
  Eigen::VectorXcd a;
  BallRef ball{0, 1.0};
  int N = 1;
  double q = 0;
  double coeff = 1;  // normalization paid to make the annulus rows hold
  bool has_witness = false;
  Eigen::VectorXcd b;
};

struct MoleculeCheck {
  bool pass = false;
  int rows = 0;
  double worst_slack = 0;  // max over rows of measured/bound
  bool witness_required = false;
  bool witness_ok = true;  // D^N b reproduces a
  double witness_slack = 0;
};
MoleculeCheck validate_molecule(const DiracOperator& op, const Space& X,
                                const Molecule& mol);

Molecule tent_atom_to_molecule(const DiracOperator& op, const Space& X,
                               const HardyConfig& cfg,
                               const TentAtomRecord& atom);
Molecule lq_atom_to_molecule(const DiracOperator& op, const Space& X,
                             const HardyConfig& cfg, const LQAtomRecord& atom);

double molecule_h1_bound(const DiracOperator& op, const Space& X,
                         const UnitCubeStructure& cubes,
                         const HardyConfig& cfg, const Molecule& mol);

struct RieszReport {
  Eigen::VectorXcd spectral;
  Eigen::VectorXcd contour;
  double rel_gap = 0;        // contour vs spectral
  double norm_bound = 0;     // max |lambda (lambda^2+a)^{-1/2}| on the spectrum
  bool contraction = false;  // norm_bound <= 1 + 1e-9
  double err_estimate = 0;
};
RieszReport riesz_local(const DiracOperator& op, double a,
                        const Eigen::VectorXcd& u,
                        const SectorParams& sec = {});

// largest |f| on the realized spectrum
double hinfty_norm(const DiracOperator& op, const HoloFn& f);

}  // namespace hardy
