#pragma once

#include <memory>

#include "hardy/complex.hpp"
#include "hardy/tent.hpp"

namespace hardy {

// Bisector of half-angle theta around the real axis joined with a disc of
// radius r; the operator's spectrum sits in the (omega, R) core.
struct SectorParams {
  double theta = 0.55;
  double r = 1.0;
  double omega = 0.0;
  double R = 0.0;
  bool contains(cplx z) const;
};

enum class FnClassKind { Psi, ThetaDecay, Phi, Hinfty };

// Psi: |f| <= C min(|z|^alpha, |z|^-beta); ThetaDecay/Phi: |f| <= C <z>^-beta
struct FnClass {
  FnClassKind kind = FnClassKind::Hinfty;
  double alpha = 0;
  double beta = 0;
};

constexpr double kSuperDecay = 1e6;  // stands in for faster-than-polynomial

// Immutable expression tree for the holomorphic symbols used in the calculus.
class HoloFn {
 public:
  struct Node;

  static HoloFn monomial(int k);
  static HoloFn expz2();                                // e^{-z^2}
  static HoloFn expsqrt(double a);                      // e^{-sqrt(z^2+a)}
  static HoloFn resolvent_power(double a, double beta); // (z^2+a)^{-beta}
  static HoloFn riesz_symbol(double a);                 // z (z^2+a)^{-1/2}
  static HoloFn constant(cplx c);

  friend HoloFn operator+(const HoloFn& f, const HoloFn& g);
  friend HoloFn operator*(const HoloFn& f, const HoloFn& g);
  HoloFn scaled(double t) const;    // z -> f(tz)
  HoloFn reflected() const;         // z -> f(-z); cancels its own double
  HoloFn starred() const;           // z -> conj(f(conj z)); cancels its double
  HoloFn powi(int k) const;
  HoloFn with_class(FnClass c) const;
  HoloFn with_domain(SectorParams sec) const;

  cplx operator()(cplx z) const;
  const FnClass& cls() const;

  static HoloFn from_node(std::shared_ptr<const Node> n);
  const std::shared_ptr<const Node>& node() const { return node_; }

 private:
  explicit HoloFn(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// sqrt(1 - sum_m w eta(t_m z)^2): the grid-exact companion of eta
HoloFn grid_complement_phi(const HoloFn& eta, const TimeGrid& g);
// sqrt(1 - int_0^1 eta(tz)^2 dt/t), quadrature-defined
HoloFn continuum_complement_phi(const HoloFn& eta);
HoloFn fn_from_json(const nlohmann::json& j);

struct ClassReport {
  bool plausible = false;
  double worst = 0;       // smallest admissible constant
  double phi_floor = 0;   // Phi only: min |f| on the disc
};
ClassReport class_check(const HoloFn& f, const SectorParams& sec,
                        int samples = 120);

// ---------------------------------------------------------------------------
// resolvent calculus on the boundary of a slightly smaller sector

struct ContourSpec {
  double theta_hat = 0;  // 0 = auto: min(0.75 theta, pi/5)
  double r_hat = 0;      // 0 = auto: half the smallest nonzero |eigenvalue|
  int per_octave = 8;    // Gauss nodes per radial octave on each ray
  int arc_nodes = 24;    // per arc
  double zmax = 0;       // 0 = auto from the symbol's decay
  double tail_tol = 1e-9;
  bool error_estimate = true;
};

struct ContourNodes {
  std::vector<cplx> z, w;  // weights absorb dz/(2 pi i)
  double theta_hat = 0, r_hat = 0, zmax = 0;
};

ContourNodes build_contour(const DiracOperator& op, const HoloFn& f,
                           const SectorParams& sec, const ContourSpec& spec);

// streams one dense factorization per node; solves carry a residual check
class ResolventCalculus {
 public:
  ResolventCalculus(const DiracOperator& op, ContourNodes nodes);
  Eigen::VectorXcd apply(const HoloFn& f, const Eigen::VectorXcd& u) const;
  // resolvent of u at every node, column q = (z_q - D)^{-1} u
  Eigen::MatrixXcd solves(const Eigen::VectorXcd& u) const;
  const ContourNodes& nodes() const { return nodes_; }

 private:
  const DiracOperator* op_;
  ContourNodes nodes_;
  Eigen::MatrixXd dense_;
};

struct ApplyResult {
  Eigen::VectorXcd u;
  double err_estimate = 0;  // node-doubling comparison, relative
};
ApplyResult contour_apply(const DiracOperator& op, const HoloFn& f,
                          const Eigen::VectorXcd& u, const SectorParams& sec,
                          const ContourSpec& spec = {});

Eigen::VectorXcd spectral_apply(const DiracOperator& op, const HoloFn& f,
                                const Eigen::VectorXcd& u);
Eigen::MatrixXcd spectral_matrix(const DiracOperator& op, const HoloFn& f);

enum class Route { Auto, Spectral, Contour };

// downward transform: slices psi(t_m D) u plus the footprint phi(D) u
struct QResult {
  TentField slices;
  Eigen::VectorXcd footprint;
};
QResult q_transform(const DiracOperator& op, const HoloFn& psi,
                    const HoloFn& phi, const Eigen::VectorXcd& u,
                    const TimeGrid& g, Route route = Route::Auto,
                    const SectorParams& sec = {}, const ContourSpec& spec = {});

// upward transform: sum_m w psi(t_m D) U_m + phi(D) u
Eigen::VectorXcd s_transform(const DiracOperator& op, const HoloFn& psi,
                             const HoloFn& phi, const TentField& U,
                             const Eigen::VectorXcd& u, Route route = Route::Auto,
                             const SectorParams& sec = {},
                             const ContourSpec& spec = {});

// companion pair making S_tilde Q = I up to the time-grid error
struct CalderonPair {
  HoloFn psi_tilde, phi_tilde;
  double c = 0;
  int M = 0, N = 0;
};
CalderonPair calderon_pair(const HoloFn& psi, const HoloFn& phi,
                           const SectorParams& sec, int M, int N);

struct DefaultPair {
  HoloFn eta, phi;
  double beta = 1;
};
// eta in Psi with order ceil(beta), phi its continuum complement; exact
// gaussian pair when beta <= 1
DefaultPair default_pair(double beta, const SectorParams& sec);

}  // namespace hardy
