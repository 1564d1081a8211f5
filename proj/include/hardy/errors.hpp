#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace hardy {

// Every failure mode surfaced by a library entry point gets its own type so
// callers (and the command-line tool) can report the reason without parsing
// message strings.
struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

struct TriangleInequalityViolation : Error {
  int i, j, k;
  TriangleInequalityViolation(int i_, int j_, int k_)
      : Error("TriangleInequalityViolation: d(" + std::to_string(i_) + "," +
              std::to_string(k_) + ") > d(" + std::to_string(i_) + "," +
              std::to_string(j_) + ") + d(" + std::to_string(j_) + "," +
              std::to_string(k_) + ")"),
        i(i_), j(j_), k(k_) {}
};

struct AsymmetricDistance : Error {
  int i, j;
  AsymmetricDistance(int i_, int j_)
      : Error("AsymmetricDistance: d(" + std::to_string(i_) + "," +
              std::to_string(j_) + ") != d(" + std::to_string(j_) + "," +
              std::to_string(i_) + ")"),
        i(i_), j(j_) {}
};

struct NonpositiveMass : Error {
  int i;
  explicit NonpositiveMass(int i_)
      : Error("NonpositiveMass: point " + std::to_string(i_)), i(i_) {}
};

struct EmptySpace : Error {
  EmptySpace() : Error("EmptySpace: a space needs at least one point") {}
};

struct OIsEmpty : Error {
  OIsEmpty() : Error("OIsEmpty: open set must be nonempty") {}
};

struct OIsAllOfX : Error {
  OIsAllOfX() : Error("OIsAllOfX: open set must have nonempty complement") {}
};

struct EmptyInput : Error {
  explicit EmptyInput(const std::string& what)
      : Error("EmptyInput: " + what) {}
};

struct InvalidP : Error {
  explicit InvalidP(double p)
      : Error("InvalidP: p = " + std::to_string(p) + ", need p in [1, inf]") {}
};

struct UnknownKind : Error {
  explicit UnknownKind(const std::string& k) : Error("UnknownKind: " + k) {}
};

struct GridMismatch : Error {
  GridMismatch() : Error("GridMismatch: time grids differ") {}
};

struct NonfiniteValues : Error {
  explicit NonfiniteValues(const std::string& where)
      : Error("NonfiniteValues: " + where) {}
};

struct NotACarlesonAtom : Error {
  explicit NotACarlesonAtom(const std::string& why)
      : Error("NotACarlesonAtom: " + why) {}
};

struct InconsistentIncidence : Error {
  explicit InconsistentIncidence(const std::string& why)
      : Error("InconsistentIncidence: " + why) {}
};

struct NonpositiveWeight : Error {
  explicit NonpositiveWeight(const std::string& which)
      : Error("NonpositiveWeight: " + which) {}
};

struct OutsideDomain : Error {
  explicit OutsideDomain(std::complex<double> z)
      : Error("OutsideDomain: z = (" + std::to_string(z.real()) + "," +
              std::to_string(z.imag()) + ") not in the declared sector") {}
};

struct BranchCutHit : Error {
  explicit BranchCutHit(std::complex<double> z)
      : Error("BranchCutHit: z^2 + a on the cut at z = (" +
              std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")") {}
};

struct ResolventSolveFailure : Error {
  std::complex<double> z;
  explicit ResolventSolveFailure(std::complex<double> z_)
      : Error("ResolventSolveFailure: z = (" + std::to_string(z_.real()) + "," +
              std::to_string(z_.imag()) + ")"),
        z(z_) {}
};

struct TailToleranceUnmet : Error {
  explicit TailToleranceUnmet(const std::string& why)
      : Error("TailToleranceUnmet: " + why) {}
};

struct NotSelfAdjoint : Error {
  NotSelfAdjoint() : Error("NotSelfAdjoint: spectral route needs a self-adjoint operator") {}
};

struct EigensolveFailure : Error {
  EigensolveFailure() : Error("EigensolveFailure") {}
};

struct DegeneratePsi : Error {
  explicit DegeneratePsi(const std::string& why) : Error("DegeneratePsi: " + why) {}
};

struct PhiVanishes : Error {
  explicit PhiVanishes(std::complex<double> z)
      : Error("PhiVanishes: phi has a zero near (" + std::to_string(z.real()) +
              "," + std::to_string(z.imag()) + ")") {}
};

struct ThetaTooLarge : Error {
  explicit ThetaTooLarge(double theta)
      : Error("ThetaTooLarge: theta = " + std::to_string(theta) +
              " >= pi/4, gaussian pair undefined") {}
};

struct EmptySet : Error {
  explicit EmptySet(const std::string& which) : Error("EmptySet: " + which) {}
};

struct AtomInvalid : Error {
  explicit AtomInvalid(const std::string& why) : Error("AtomInvalid: " + why) {}
};

struct SectorInfeasible : Error {
  explicit SectorInfeasible(const std::string& why)
      : Error("SectorInfeasible: " + why) {}
};

}  // namespace hardy
