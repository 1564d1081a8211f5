#include "hardy/offdiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardy/errors.hpp"

namespace hardy {

double block_norm(const Eigen::MatrixXcd& T, const Eigen::VectorXd& W,
                  const std::vector<int>& E, const std::vector<int>& F) {
  if (E.empty()) throw EmptySet("E");
  if (F.empty()) throw EmptySet("F");
  Eigen::MatrixXcd B(E.size(), F.size());
  for (size_t i = 0; i < E.size(); ++i)
    for (size_t j = 0; j < F.size(); ++j)
      B(i, j) = std::sqrt(W(E[i]) / W(F[j])) * T(E[i], F[j]);
  if (B.rows() == 1 || B.cols() == 1) return B.norm();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B);
  return svd.singularValues()(0);
}

Eigen::MatrixXcd resolvent_matrix(const DiracOperator& op, cplx z) {
  const int n = op.n();
  Eigen::MatrixXcd A = -Eigen::MatrixXd(op.D).cast<cplx>();
  A.diagonal().array() += z;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  Eigen::MatrixXcd R = lu.solve(Eigen::MatrixXcd::Identity(n, n));
  if (!R.allFinite() ||
      (A * R - Eigen::MatrixXcd::Identity(n, n)).norm() > 1e-8 * std::sqrt(n))
    throw ResolventSolveFailure(z);
  return R;
}

DecayProfile decay_profile(const Eigen::MatrixXcd& T, const Eigen::VectorXd& W,
                           const Eigen::MatrixXd& dist, double width) {
  const int n = static_cast<int>(T.rows());
  if (n == 0 || T.cols() != n || W.size() != n || dist.rows() != n ||
      dist.cols() != n)
    throw Error("decay_profile: size mismatch");
  if (!(width > 0)) throw Error("decay_profile: width must be > 0");

  DecayProfile out;
  out.width = width;
  double dmax = dist.maxCoeff();
  int bands = static_cast<int>(std::floor(dmax / width)) + 1;
  out.sep.resize(bands);
  out.norm.assign(bands, 0.0);
  for (int k = 0; k < bands; ++k) out.sep[k] = k * width;

  for (int j = 0; j < n; ++j) {
    std::vector<int> F;
    for (int i = 0; i < n; ++i)
      if (dist(i, j) <= 1.0) F.push_back(i);
    // distance from each simplex to the source ball
    std::vector<double> dF(n, std::numeric_limits<double>::infinity());
    for (int i = 0; i < n; ++i)
      for (int f : F) dF[i] = std::min(dF[i], dist(i, f));
    std::vector<std::vector<int>> shell(bands);
    for (int i = 0; i < n; ++i) {
      int k = std::min(bands - 1, static_cast<int>(std::floor(dF[i] / width)));
      shell[k].push_back(i);
    }
    for (int k = 0; k < bands; ++k) {
      if (shell[k].empty()) continue;
      out.norm[k] = std::max(out.norm[k], block_norm(T, W, shell[k], F));
    }
  }

  // least-squares slope of log norm over the bands that carry signal
  double floor = 1e-14 * (*std::max_element(out.norm.begin(), out.norm.end()));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int k = 0; k < bands; ++k) {
    if (out.norm[k] <= floor) continue;
    double x = out.sep[k], y = std::log(out.norm[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  out.fitted = m;
  if (m >= 2 && sxx * m - sx * sx > 0) {
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    out.rate = -slope;
    out.amp = std::exp((sy - slope * sx) / m);
  } else if (m >= 1) {
    out.rate = 0;
    out.amp = out.norm[0];
  }
  return out;
}

BoundCheck verify_bound(const DecayProfile& prof, cplx z, double C_thetar,
                        double C_D, double a, double b) {
  if (!(C_thetar > 0) || !(C_D > 0))
    throw Error("verify_bound: constants must be > 0");
  double az = std::abs(z);
  if (!(az > 0)) throw Error("verify_bound: z must be nonzero");
  BoundCheck out;
  for (size_t k = 0; k < prof.sep.size(); ++k) {
    if (prof.norm[k] == 0) continue;
    double rho = prof.sep[k];
    double bracket = 1.0;
    if (b != 0) {
      double x = rho > 0 ? 1.0 / (rho * az) : 0.0;
      bracket = std::pow(std::sqrt(1.0 + x * x), b);
      if (rho == 0) bracket = 1.0;
    }
    double shape = (C_thetar / az) * bracket *
                   std::exp(-a * rho * az / (C_D * C_thetar));
    double need = prof.norm[k] / shape;
    if (need > out.c) {
      out.c = need;
      out.worst_sep = rho;
    }
  }
  return out;
}

}  // namespace hardy
