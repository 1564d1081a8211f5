#include "hardy/holo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "hardy/errors.hpp"

namespace hardy {

bool SectorParams::contains(cplx z) const {
  if (std::abs(z) < r) return true;
  double a = std::abs(std::arg(z));
  return std::min(a, M_PI - a) < theta;
}

namespace {

constexpr double kLn2 = 0.69314718055994530942;

struct GLRule {
  std::vector<double> x, w;  // on [-1, 1]
};

// Newton iteration on Legendre roots; deterministic to machine precision.
const GLRule& gauss_legendre(int n) {
  static std::map<int, GLRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GLRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(r)).first->second;
}

template <class F>
cplx gl_integrate(F&& h, double lo, double hi, int order) {
  const GLRule& g = gauss_legendre(order);
  double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  cplx acc = 0;
  for (int i = 0; i < order; ++i) acc += g.w[i] * h(mid + half * g.x[i]);
  return acc * half;
}

}  // namespace

struct HoloFn::Node {
  enum Kind {
    kMonomial,
    kExpZ2,
    kExpSqrt,
    kResPow,
    kRiesz,
    kConst,
    kSum,
    kProd,
    kScale,
    kReflect,
    kStar,
    kPowi,
    kGridComp,
    kContComp,
    kPhiTilde
  };
  Kind kind = kConst;
  int ipar = 0;
  double a = 0;  // shift in z^2+a, or the scale factor
  double b = 0;  // exponent
  cplx cpar{0, 0};
  std::shared_ptr<const Node> c1, c2, c3;
  TimeGrid grid;
  FnClass cls;
  std::optional<SectorParams> domain;
};

namespace {

using Node = HoloFn::Node;
using NodePtr = std::shared_ptr<const Node>;

cplx eval_node(const Node& n, cplx z);

// int_0^1 f(tz) g(tz) dt/t on geometric panels; g may be null (then f alone).
// Assumes the product vanishes at t -> 0 (order >= 1), which every caller's
// class constraints guarantee.
cplx integral01(const Node& f, const Node* g, cplx z) {
  cplx total = 0;
  int quiet = 0;
  for (int k = 0; k < 240; ++k) {
    auto h = [&](double x) {
      cplx zt = std::exp(x) * z;
      cplx v = eval_node(f, zt);
      if (g != nullptr) v *= eval_node(*g, zt);
      return v;
    };
    cplx panel = gl_integrate(h, -(k + 1) * kLn2, -k * kLn2, 16);
    total += panel;
    if (std::abs(panel) <= 1e-18 * (std::abs(total) + 1e-30)) {
      if (++quiet >= 2 && k >= 8) break;
    } else {
      quiet = 0;
    }
  }
  return total;
}

cplx eval_node(const Node& n, cplx z) {
  if (n.domain && !n.domain->contains(z)) throw OutsideDomain(z);
  switch (n.kind) {
    case Node::kMonomial:
      return n.ipar == 0 ? cplx(1, 0) : std::pow(z, n.ipar);
    case Node::kExpZ2:
      return std::exp(-z * z);
    case Node::kExpSqrt: {
      cplx w = z * z + n.a;
      if (w.imag() == 0 && w.real() < 0) throw BranchCutHit(z);
      return std::exp(-std::sqrt(w));
    }
    case Node::kResPow: {
      cplx w = z * z + n.a;
      if (w.imag() == 0 && w.real() <= 0) throw BranchCutHit(z);
      return std::pow(w, -n.b);
    }
    case Node::kRiesz: {
      cplx w = z * z + n.a;
      if (w.imag() == 0 && w.real() <= 0) throw BranchCutHit(z);
      return z * std::pow(w, -0.5);
    }
    case Node::kConst:
      return n.cpar;
    case Node::kSum:
      return eval_node(*n.c1, z) + eval_node(*n.c2, z);
    case Node::kProd: {
      cplx a = eval_node(*n.c1, z);
      if (a == cplx(0, 0)) return a;  // decay beats growth in every product here
      cplx b = eval_node(*n.c2, z);
      if (b == cplx(0, 0)) return b;
      return a * b;
    }
    case Node::kScale:
      return eval_node(*n.c1, n.a * z);
    case Node::kReflect:
      return eval_node(*n.c1, -z);
    case Node::kStar:
      return std::conj(eval_node(*n.c1, std::conj(z)));
    case Node::kPowi: {
      cplx v = eval_node(*n.c1, z);
      cplx acc = 1;
      for (int k = 0; k < n.ipar; ++k) acc *= v;
      return acc;
    }
    case Node::kGridComp: {
      cplx s = 0;
      double w = n.grid.weight();
      for (int m = 0; m < n.grid.M; ++m) {
        cplx v = eval_node(*n.c1, n.grid.node(m) * z);
        s += w * v * v;
      }
      return std::sqrt(cplx(1, 0) - s);
    }
    case Node::kContComp: {
      cplx s = integral01(*n.c1, n.c1.get(), z);
      return std::sqrt(cplx(1, 0) - s);
    }
    case Node::kPhiTilde: {
      cplx den = eval_node(*n.c3, z);
      if (std::abs(den) < 1e-280) throw PhiVanishes(z);
      cplx s = integral01(*n.c1, n.c2.get(), z);
      return (cplx(1, 0) - s) / den;
    }
  }
  throw Error("eval: corrupt node");
}

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

FnClass sum_cls(const FnClass& a, const FnClass& b) {
  FnClass c;
  c.kind = (a.kind == FnClassKind::Psi && b.kind == FnClassKind::Psi)
               ? FnClassKind::Psi
               : FnClassKind::ThetaDecay;
  c.alpha = std::min(a.alpha, b.alpha);
  c.beta = std::min(a.beta, b.beta);
  return c;
}

FnClass prod_cls(const FnClass& a, const FnClass& b) {
  FnClass c;
  c.alpha = a.alpha + b.alpha;
  c.beta = std::min(a.beta + b.beta, kSuperDecay);
  if (c.alpha > 0)
    c.kind = FnClassKind::Psi;
  else if (a.kind == FnClassKind::Phi && b.kind == FnClassKind::Phi)
    c.kind = FnClassKind::Phi;
  else
    c.kind = FnClassKind::ThetaDecay;
  return c;
}

}  // namespace

HoloFn HoloFn::from_node(std::shared_ptr<const Node> n) {
  return HoloFn(std::move(n));
}

HoloFn HoloFn::monomial(int k) {
  if (k < 0) throw Error("monomial: degree must be >= 0");
  Node n;
  n.kind = Node::kMonomial;
  n.ipar = k;
  n.cls = k == 0 ? FnClass{FnClassKind::Hinfty, 0, 0}
                 : FnClass{FnClassKind::Psi, double(k), -double(k)};
  return HoloFn(make(std::move(n)));
}

HoloFn HoloFn::expz2() {
  Node n;
  n.kind = Node::kExpZ2;
  n.cls = {FnClassKind::Phi, 0, kSuperDecay};
  return HoloFn(make(std::move(n)));
}

HoloFn HoloFn::expsqrt(double a) {
  if (a < 0) throw Error("expsqrt: shift must be >= 0");
  Node n;
  n.kind = Node::kExpSqrt;
  n.a = a;
  n.cls = {FnClassKind::Phi, 0, kSuperDecay};
  return HoloFn(make(std::move(n)));
}

HoloFn HoloFn::resolvent_power(double a, double beta) {
  if (a <= 0) throw Error("resolvent_power: shift must be > 0");
  if (beta <= 0) throw Error("resolvent_power: exponent must be > 0");
  Node n;
  n.kind = Node::kResPow;
  n.a = a;
  n.b = beta;
  n.cls = {FnClassKind::Phi, 0, 2 * beta};
  return HoloFn(make(std::move(n)));
}

HoloFn HoloFn::riesz_symbol(double a) {
  if (a <= 0) throw Error("riesz_symbol: shift must be > 0");
  Node n;
  n.kind = Node::kRiesz;
  n.a = a;
  n.cls = {FnClassKind::Hinfty, 0, 0};
  return HoloFn(make(std::move(n)));
}

HoloFn HoloFn::constant(cplx c) {
  Node n;
  n.kind = Node::kConst;
  n.cpar = c;
  n.cls = {FnClassKind::Hinfty, 0, 0};
  return HoloFn(make(std::move(n)));
}

HoloFn operator+(const HoloFn& f, const HoloFn& g) {
  Node n;
  n.kind = Node::kSum;
  n.c1 = f.node();
  n.c2 = g.node();
  n.cls = sum_cls(f.cls(), g.cls());
  return HoloFn::from_node(make(std::move(n)));
}

HoloFn operator*(const HoloFn& f, const HoloFn& g) {
  Node n;
  n.kind = Node::kProd;
  n.c1 = f.node();
  n.c2 = g.node();
  n.cls = prod_cls(f.cls(), g.cls());
  return HoloFn::from_node(make(std::move(n)));
}

HoloFn HoloFn::scaled(double t) const {
  if (!(t > 0)) throw Error("scaled: factor must be > 0");
  if (node_->kind == Node::kScale) {  // collapse nested scalings
    Node n = *node_;
    n.a = node_->a * t;
    return HoloFn(make(std::move(n)));
  }
  Node n;
  n.kind = Node::kScale;
  n.a = t;
  n.c1 = node_;
  n.cls = node_->cls;
  return HoloFn(make(std::move(n)));
}

HoloFn HoloFn::reflected() const {
  if (node_->kind == Node::kReflect) return HoloFn(node_->c1);
  Node n;
  n.kind = Node::kReflect;
  n.c1 = node_;
  n.cls = node_->cls;
  return HoloFn(make(std::move(n)));
}

HoloFn HoloFn::starred() const {
  if (node_->kind == Node::kStar) return HoloFn(node_->c1);
  Node n;
  n.kind = Node::kStar;
  n.c1 = node_;
  n.cls = node_->cls;
  return HoloFn(make(std::move(n)));
}

HoloFn HoloFn::powi(int k) const {
  if (k < 1) throw Error("powi: exponent must be >= 1");
  if (k == 1) return *this;
  Node n;
  n.kind = Node::kPowi;
  n.ipar = k;
  n.c1 = node_;
  n.cls = node_->cls;
  n.cls.alpha *= k;
  n.cls.beta = std::min(n.cls.beta * k, kSuperDecay);
  return HoloFn(make(std::move(n)));
}

HoloFn HoloFn::with_class(FnClass c) const {
  Node n = *node_;
  n.cls = c;
  return HoloFn(make(std::move(n)));
}

HoloFn HoloFn::with_domain(SectorParams sec) const {
  Node n = *node_;
  n.domain = sec;
  return HoloFn(make(std::move(n)));
}

cplx HoloFn::operator()(cplx z) const { return eval_node(*node_, z); }

const FnClass& HoloFn::cls() const { return node_->cls; }

HoloFn grid_complement_phi(const HoloFn& eta, const TimeGrid& g) {
  if (eta.cls().alpha < 0.5)
    throw Error("grid_complement_phi: eta must vanish at 0");
  Node n;
  n.kind = Node::kGridComp;
  n.c1 = eta.node();
  n.grid = g;
  // bounded but not decaying: once the grid window slides past the bump of
  // eta the discrete sum returns to 0 and the complement returns to 1
  n.cls = {FnClassKind::Hinfty, 0, 0};
  return HoloFn::from_node(std::make_shared<const Node>(std::move(n)));
}

HoloFn continuum_complement_phi(const HoloFn& eta) {
  if (eta.cls().alpha < 0.5)
    throw Error("continuum_complement_phi: eta must vanish at 0");
  Node n;
  n.kind = Node::kContComp;
  n.c1 = eta.node();
  n.cls = {FnClassKind::Phi, 0, eta.cls().beta};
  return HoloFn::from_node(std::make_shared<const Node>(std::move(n)));
}

HoloFn fn_from_json(const nlohmann::json& j) {
  std::string kind = j.value("kind", "");
  if (kind == "monomial") return HoloFn::monomial(j.at("k").get<int>());
  if (kind == "exp_z2") return HoloFn::expz2();
  if (kind == "exp_sqrt") return HoloFn::expsqrt(j.value("a", 0.0));
  if (kind == "resolvent_power")
    return HoloFn::resolvent_power(j.at("a").get<double>(),
                                   j.at("beta").get<double>());
  if (kind == "riesz") return HoloFn::riesz_symbol(j.at("a").get<double>());
  if (kind == "constant")
    return HoloFn::constant(cplx(j.value("re", 0.0), j.value("im", 0.0)));
  if (kind == "product") {
    const auto& fs = j.at("factors");
    if (fs.empty()) throw Error("product: needs at least one factor");
    HoloFn f = fn_from_json(fs[0]);
    for (size_t i = 1; i < fs.size(); ++i) f = f * fn_from_json(fs[i]);
    return f;
  }
  if (kind == "sum") {
    const auto& ts = j.at("terms");
    if (ts.empty()) throw Error("sum: needs at least one term");
    HoloFn f = fn_from_json(ts[0]);
    for (size_t i = 1; i < ts.size(); ++i) f = f + fn_from_json(ts[i]);
    return f;
  }
  if (kind == "scaled")
    return fn_from_json(j.at("of")).scaled(j.at("t").get<double>());
  if (kind == "power")
    return fn_from_json(j.at("of")).powi(j.at("k").get<int>());
  throw UnknownKind(kind);
}

ClassReport class_check(const HoloFn& f, const SectorParams& sec,
                        int samples) {
  if (samples < 12) samples = 12;
  ClassReport rep;
  const FnClass& c = f.cls();
  double ae = std::min(c.alpha, 8.0);
  double be = std::clamp(c.beta, 0.0, 8.0);
  std::vector<double> angles = {0.0, 0.9 * sec.theta, -0.9 * sec.theta};
  int per = samples / 3;
  double worst = 0;
  bool finite = true;
  for (double ang : angles) {
    for (int i = 0; i < per; ++i) {
      double m = std::pow(10.0, -3.0 + 6.0 * i / (per - 1.0));
      cplx z = std::polar(m, ang);
      double v;
      try {
        v = std::abs(f(z));
      } catch (const Error&) {
        continue;  // branch point or domain edge grazed by the sample grid
      }
      if (!std::isfinite(v)) {
        finite = false;
        continue;
      }
      double shape = std::min(std::pow(m, ae), std::pow(1 + m, -be));
      if (c.kind != FnClassKind::Psi) shape = std::pow(1 + m, -be);
      worst = std::max(worst, v / shape);
    }
  }
  rep.worst = worst;
  rep.plausible = finite && worst < 1e6;
  if (c.kind == FnClassKind::Phi) {
    double floor = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 40; ++i) {
      double m = sec.r * i / 40.0;
      for (double ang : {0.0, 0.5 * M_PI, M_PI, 1.5 * M_PI}) {
        try {
          floor = std::min(floor, std::abs(f(std::polar(m, ang))));
        } catch (const Error&) {
        }
      }
    }
    rep.phi_floor = floor;
    rep.plausible = rep.plausible && floor > 1e-12;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// contour

ContourNodes build_contour(const DiracOperator& op, const HoloFn& f,
                           const SectorParams& sec, const ContourSpec& spec) {
  if (!(sec.theta > 0) || sec.theta >= M_PI / 2 || !(sec.r > 0))
    throw Error("build_contour: sector must have 0 < theta < pi/2 and r > 0");
  double th = spec.theta_hat > 0 ? spec.theta_hat
                                 : std::min(0.75 * sec.theta, M_PI / 5);
  if (th >= sec.theta) th = 0.75 * sec.theta;

  double rh = spec.r_hat;
  double max_abs_eig = 1.0;
  if (rh <= 0) {
    rh = 0.5 * sec.r;
    if (op.self_adjoint()) {
      op.ensure_eig();
      double lmax = op.evals.size() ? op.evals.cwiseAbs().maxCoeff() : 0.0;
      max_abs_eig = std::max(lmax, 1.0);
      double lmin = std::numeric_limits<double>::infinity();
      for (int i = 0; i < op.evals.size(); ++i) {
        double a = std::abs(op.evals(i));
        if (a > 1e-12 * std::max(lmax, 1.0)) lmin = std::min(lmin, a);
      }
      if (std::isfinite(lmin)) rh = 0.5 * lmin;
    }
    rh = std::min(rh, 0.9 * sec.r);
    rh = std::max(rh, 1e-8);
  }

  double zmax = spec.zmax;
  if (zmax <= 0) {
    double Z = std::max({4.0 * rh, 8.0, 2.0 * max_abs_eig});
    double target = 0.1 * spec.tail_tol;
    for (;;) {
      double fZ = std::abs(f(std::polar(Z, th)));
      double f2 = std::abs(f(std::polar(2 * Z, th)));
      if (!std::isfinite(fZ) || !std::isfinite(f2))
        throw TailToleranceUnmet("symbol grows along the contour ray");
      if (fZ == 0) break;
      double p = f2 > 0 ? std::log(fZ / f2) / kLn2 : 40.0;
      double tail = (2.0 / (M_PI * std::sin(th))) * fZ / std::max(p, 0.1);
      if (p > 0.05 && tail <= target) break;
      Z *= 2;
      if (Z > 1e14)
        throw TailToleranceUnmet("symbol decay too slow for the tail target");
    }
    zmax = Z;
  }

  ContourNodes out;
  out.theta_hat = th;
  out.r_hat = rh;
  out.zmax = zmax;
  const cplx inv2pii(0, -1.0 / (2 * M_PI));  // 1/(2 pi i)

  int octaves = std::max(1, (int)std::ceil(std::log2(zmax / rh)));
  int ray_order = std::clamp(spec.per_octave, 2, 24);
  const GLRule& rg = gauss_legendre(ray_order);
  // outgoing rays carry +e^{i phi} ds, incoming ones the opposite sign
  struct Ray {
    double ang;
    double sign;
  };
  Ray rays[4] = {{th, -1}, {M_PI - th, +1}, {M_PI + th, -1}, {-th, +1}};
  for (const Ray& ray : rays) {
    cplx dir = std::polar(1.0, ray.ang);
    for (int k = 0; k < octaves; ++k) {
      double lo = rh * std::pow(2.0, k), hi = rh * std::pow(2.0, k + 1);
      double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (int i = 0; i < ray_order; ++i) {
        double s = mid + half * rg.x[i];
        out.z.push_back(s * dir);
        out.w.push_back(ray.sign * dir * (half * rg.w[i]) * inv2pii);
      }
    }
  }
  int arc_order = std::clamp(spec.arc_nodes, 4, 48);
  const GLRule& ra = gauss_legendre(arc_order);
  double spans[2][2] = {{th, M_PI - th}, {M_PI + th, 2 * M_PI - th}};
  for (auto& sp : spans) {
    double mid = 0.5 * (sp[0] + sp[1]), half = 0.5 * (sp[1] - sp[0]);
    for (int i = 0; i < arc_order; ++i) {
      double phi = mid + half * ra.x[i];
      cplx zq = std::polar(rh, phi);
      out.z.push_back(zq);
      out.w.push_back(cplx(0, 1) * zq * (half * ra.w[i]) * inv2pii);
    }
  }
  return out;
}

ResolventCalculus::ResolventCalculus(const DiracOperator& op,
                                     ContourNodes nodes)
    : op_(&op), nodes_(std::move(nodes)), dense_(op.D) {}

Eigen::MatrixXcd ResolventCalculus::solves(const Eigen::VectorXcd& u) const {
  const int n = op_->n();
  const int Q = static_cast<int>(nodes_.z.size());
  Eigen::MatrixXcd out(n, Q);
  Eigen::MatrixXcd A(n, n);
  double unorm = u.norm();
  for (int q = 0; q < Q; ++q) {
    A = -dense_.cast<cplx>();
    A.diagonal().array() += nodes_.z[q];
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    Eigen::VectorXcd x = lu.solve(u);
    if (!x.allFinite() || (A * x - u).norm() > 1e-8 * std::max(unorm, 1e-300))
      throw ResolventSolveFailure(nodes_.z[q]);
    out.col(q) = x;
  }
  return out;
}

Eigen::VectorXcd ResolventCalculus::apply(const HoloFn& f,
                                          const Eigen::VectorXcd& u) const {
  Eigen::MatrixXcd X = solves(u);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(op_->n());
  for (int q = 0; q < X.cols(); ++q)
    out += nodes_.w[q] * f(nodes_.z[q]) * X.col(q);
  return out;
}

ApplyResult contour_apply(const DiracOperator& op, const HoloFn& f,
                          const Eigen::VectorXcd& u, const SectorParams& sec,
                          const ContourSpec& spec) {
  ContourNodes nodes = build_contour(op, f, sec, spec);
  ResolventCalculus calc(op, nodes);
  Eigen::VectorXcd r1 = calc.apply(f, u);
  ApplyResult res;
  if (!spec.error_estimate) {
    res.u = std::move(r1);
    return res;
  }
  ContourSpec fine = spec;
  fine.per_octave = std::min(2 * std::max(spec.per_octave, 2), 24);
  fine.arc_nodes = std::min(2 * std::max(spec.arc_nodes, 4), 48);
  fine.theta_hat = nodes.theta_hat;
  fine.r_hat = nodes.r_hat;
  fine.zmax = nodes.zmax;
  ResolventCalculus calc2(op, build_contour(op, f, sec, fine));
  Eigen::VectorXcd r2 = calc2.apply(f, u);
  res.err_estimate =
      (r2 - r1).norm() / std::max(r2.norm(), 1e-12 * std::max(u.norm(), 1e-300));
  res.u = std::move(r2);
  return res;
}

// ---------------------------------------------------------------------------
// spectral route

namespace {

void require_spectral(const DiracOperator& op) {
  if (!op.self_adjoint(1e-10)) throw NotSelfAdjoint();
  op.ensure_eig();
}

// coefficients of u in the flat eigenframe
Eigen::VectorXcd to_frame(const DiracOperator& op, const Eigen::VectorXcd& u) {
  Eigen::VectorXd sqw = op.W.cwiseSqrt();
  Eigen::VectorXcd v = sqw.array().cast<cplx>() * u.array();
  Eigen::VectorXcd out(op.n());
  out.real() = op.evecs_hat.transpose() * v.real().eval();
  out.imag() = op.evecs_hat.transpose() * v.imag().eval();
  return out;
}

Eigen::VectorXcd from_frame(const DiracOperator& op,
                            const Eigen::VectorXcd& c) {
  Eigen::VectorXd sqw = op.W.cwiseSqrt();
  Eigen::VectorXcd v(op.n());
  v.real() = op.evecs_hat * c.real().eval();
  v.imag() = op.evecs_hat * c.imag().eval();
  return v.array() / sqw.array().cast<cplx>();
}

}  // namespace

Eigen::VectorXcd spectral_apply(const DiracOperator& op, const HoloFn& f,
                                const Eigen::VectorXcd& u) {
  require_spectral(op);
  Eigen::VectorXcd c = to_frame(op, u);
  for (int k = 0; k < c.size(); ++k) c(k) *= f(cplx(op.evals(k), 0));
  return from_frame(op, c);
}

Eigen::MatrixXcd spectral_matrix(const DiracOperator& op, const HoloFn& f) {
  require_spectral(op);
  const int n = op.n();
  Eigen::VectorXcd fv(n);
  for (int k = 0; k < n; ++k) fv(k) = f(cplx(op.evals(k), 0));
  Eigen::VectorXd sqw = op.W.cwiseSqrt();
  Eigen::MatrixXcd E = op.evecs_hat.cast<cplx>();
  Eigen::MatrixXcd M = E * fv.asDiagonal() * E.transpose();
  return sqw.cwiseInverse().cast<cplx>().asDiagonal() * M *
         sqw.cast<cplx>().asDiagonal();
}

// ---------------------------------------------------------------------------
// transforms

namespace {

bool pick_spectral(const DiracOperator& op, Route route) {
  if (route == Route::Spectral) return true;
  if (route == Route::Contour) return false;
  return op.self_adjoint(1e-10) && op.n() <= 400;
}

// contour sized for every dilate psi(t z) with t down to the grid floor
ContourNodes transform_contour(const DiracOperator& op, const HoloFn& psi,
                               const HoloFn& phi, const TimeGrid& g,
                               const SectorParams& sec,
                               const ContourSpec& spec) {
  double tmin = g.node(g.M - 1);
  ContourNodes a = build_contour(op, psi.scaled(tmin), sec, spec);
  ContourNodes b = build_contour(op, phi, sec, spec);
  if (b.zmax <= a.zmax) return a;
  ContourSpec wide = spec;
  wide.theta_hat = a.theta_hat;
  wide.r_hat = a.r_hat;
  wide.zmax = b.zmax;
  return build_contour(op, psi, sec, wide);
}

}  // namespace

QResult q_transform(const DiracOperator& op, const HoloFn& psi,
                    const HoloFn& phi, const Eigen::VectorXcd& u,
                    const TimeGrid& g, Route route, const SectorParams& sec,
                    const ContourSpec& spec) {
  const int n = op.n();
  if (u.size() != n) throw Error("q_transform: vector size mismatch");
  QResult out;
  out.slices.grid = g;
  out.slices.v.resize(n, g.M);
  if (pick_spectral(op, route)) {
    require_spectral(op);
    Eigen::VectorXcd c = to_frame(op, u);
    Eigen::VectorXcd fc(n);
    for (int m = 0; m < g.M; ++m) {
      double t = g.node(m);
      for (int k = 0; k < n; ++k)
        fc(k) = psi(cplx(t * op.evals(k), 0)) * c(k);
      out.slices.v.col(m) = from_frame(op, fc);
    }
    for (int k = 0; k < n; ++k) fc(k) = phi(cplx(op.evals(k), 0)) * c(k);
    out.footprint = from_frame(op, fc);
    return out;
  }
  ContourNodes nodes = transform_contour(op, psi, phi, g, sec, spec);
  ResolventCalculus calc(op, nodes);
  Eigen::MatrixXcd X = calc.solves(u);
  const int Q = static_cast<int>(nodes.z.size());
  Eigen::MatrixXcd coef(Q, g.M);
  Eigen::VectorXcd pcoef(Q);
  for (int q = 0; q < Q; ++q) {
    for (int m = 0; m < g.M; ++m)
      coef(q, m) = nodes.w[q] * psi(g.node(m) * nodes.z[q]);
    pcoef(q) = nodes.w[q] * phi(nodes.z[q]);
  }
  out.slices.v = X * coef;
  out.footprint = X * pcoef;
  return out;
}

Eigen::VectorXcd s_transform(const DiracOperator& op, const HoloFn& psi,
                             const HoloFn& phi, const TentField& U,
                             const Eigen::VectorXcd& u, Route route,
                             const SectorParams& sec, const ContourSpec& spec) {
  const int n = op.n();
  const TimeGrid& g = U.grid;
  if (U.v.rows() != n || u.size() != n)
    throw Error("s_transform: size mismatch");
  double w = g.weight();
  if (pick_spectral(op, route)) {
    require_spectral(op);
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n);
    Eigen::MatrixXcd C(n, g.M);
    for (int m = 0; m < g.M; ++m) C.col(m) = to_frame(op, U.v.col(m));
    Eigen::VectorXcd cu = to_frame(op, u);
    for (int k = 0; k < n; ++k) {
      cplx s = 0;
      for (int m = 0; m < g.M; ++m)
        s += w * psi(cplx(g.node(m) * op.evals(k), 0)) * C(k, m);
      acc(k) = s + phi(cplx(op.evals(k), 0)) * cu(k);
    }
    return from_frame(op, acc);
  }
  ContourNodes nodes = transform_contour(op, psi, phi, g, sec, spec);
  Eigen::MatrixXd dense(op.D);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  Eigen::MatrixXcd A(n, n);
  for (size_t q = 0; q < nodes.z.size(); ++q) {
    Eigen::VectorXcd rhs = phi(nodes.z[q]) * u;
    for (int m = 0; m < g.M; ++m)
      rhs += w * psi(g.node(m) * nodes.z[q]) * U.v.col(m);
    A = -dense.cast<cplx>();
    A.diagonal().array() += nodes.z[q];
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    Eigen::VectorXcd x = lu.solve(rhs);
    double rn = rhs.norm();
    if (!x.allFinite() || (A * x - rhs).norm() > 1e-8 * std::max(rn, 1e-300))
      throw ResolventSolveFailure(nodes.z[q]);
    out += nodes.w[q] * x;
  }
  return out;
}

// ---------------------------------------------------------------------------
// companion pairs

CalderonPair calderon_pair(const HoloFn& psi, const HoloFn& phi,
                           const SectorParams& sec, int M, int N) {
  if (M < 1) throw Error("calderon_pair: M must be >= 1");
  if (N < 0) throw Error("calderon_pair: N must be >= 0");
  if (psi.cls().kind != FnClassKind::Psi || psi.cls().alpha < 1)
    throw DegeneratePsi("psi must vanish to order >= 1 at 0");

  HoloFn quad = psi * psi.starred() * psi.reflected() *
                psi.reflected().starred();  // |psi(t) psi(-t)|^2 on the reals
  HoloFn phi4 = phi * phi.starred() * phi.reflected() *
                phi.reflected().starred();
  HoloFn integrand = quad.powi(M);
  if (N >= 1) integrand = integrand * phi4.powi(N);

  // phi must not vanish near the spectrum core; a Phi function decays at
  // infinity, so only scan a bounded window and leave the far zeros to the
  // evaluation-time guard
  double phimax = 0, phimin = std::numeric_limits<double>::infinity();
  double argmin = 0;
  for (int i = 0; i <= 80; ++i) {
    double t = 2.0 * i / 80.0;
    double v = std::abs(phi(cplx(t, 0)));
    phimax = std::max(phimax, v);
    if (v < phimin) {
      phimin = v;
      argmin = t;
    }
  }

  double c = 0;
  for (int k = -96; k < 96; ++k) {
    cplx panel = gl_integrate(
        [&](double x) { return integrand(cplx(std::exp(x), 0)); }, k * kLn2,
        (k + 1) * kLn2, 16);
    c += panel.real();
  }
  if (!std::isfinite(c) || c <= 1e-300)
    throw DegeneratePsi("normalization integral vanished");
  if (!(phimin > 1e-12 * phimax)) throw PhiVanishes(cplx(argmin, 0));

  HoloFn psi_tilde = psi.starred().powi(M) * psi.reflected().powi(M) *
                     psi.reflected().starred().powi(M);
  if (M >= 2) psi_tilde = psi_tilde * psi.powi(M - 1);
  if (N >= 1) psi_tilde = psi_tilde * phi4.powi(N);
  psi_tilde = HoloFn::constant(cplx(1.0 / c, 0)) * psi_tilde;

  Node n;
  n.kind = Node::kPhiTilde;
  n.c1 = psi_tilde.node();
  n.c2 = psi.node();
  n.c3 = phi.node();
  double bsum = psi_tilde.cls().beta + psi.cls().beta;
  n.cls = {FnClassKind::Phi, 0, std::max(0.0, bsum - phi.cls().beta)};
  HoloFn phi_tilde = HoloFn::from_node(std::make_shared<const Node>(std::move(n)));

  (void)sec;
  CalderonPair out{psi_tilde, phi_tilde, c, M, N};
  return out;
}

DefaultPair default_pair(double beta, const SectorParams& sec) {
  if (sec.theta >= M_PI / 4) throw ThetaTooLarge(sec.theta);
  if (!(beta > 0)) throw Error("default_pair: beta must be > 0");
  if (beta <= 1) {
    HoloFn eta = HoloFn::constant(cplx(2, 0)) * HoloFn::monomial(1) *
                 HoloFn::expz2();
    return {eta, HoloFn::expz2(), beta};
  }
  int k = static_cast<int>(std::ceil(beta));
  double fact = 1;  // (k-1)!
  for (int i = 2; i < k; ++i) fact *= i;
  double ck = std::sqrt(std::pow(2.0, k + 1) / fact);
  HoloFn eta =
      HoloFn::constant(cplx(ck, 0)) * HoloFn::monomial(k) * HoloFn::expz2();
  return {eta, continuum_complement_phi(eta), beta};
}

}  // namespace hardy
