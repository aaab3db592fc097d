#pragma once

#include <vector>

#include "nhzbw/model.hpp"

namespace nhzbw {

/// Eigenvalues H0 ± E and biorthonormal eigenvectors. Left vectors are stored
/// as plain components and paired without conjugation: leftᵀ·right = δ.
template <typename Real = double>
struct EigenSystem {
  Complex<Real> Eplus{}, Eminus{}, E{};
  Spinor<Real> rightPlus = Spinor<Real>::Zero(), rightMinus = Spinor<Real>::Zero();
  Spinor<Real> leftPlus = Spinor<Real>::Zero(), leftMinus = Spinor<Real>::Zero();
  bool vectorsValid = false;
};

inline constexpr double kCoalescenceTol = 1e-12;

namespace detail {

template <typename Real>
void eigenpair(const ComplexVec3<Real>& H, Complex<Real> lambda, Spinor<Real>& right,
               Spinor<Real>& left) {
  const Complex<Real> i(0, 1);
  const Complex<Real> hx = H.x(), hy = H.y(), hz = H.z();
  // Two equivalent column choices of the adjugate; the one with the larger
  // pairing is better conditioned.
  const Complex<Real> pairA = Real(2) * lambda * (lambda + hz);
  const Complex<Real> pairB = Real(2) * lambda * (lambda - hz);
  if (std::abs(pairA) >= std::abs(pairB)) {
    const Complex<Real> s = std::sqrt(pairA);
    right << (hz + lambda) / s, (hx + i * hy) / s;
    left << (hz + lambda) / s, (hx - i * hy) / s;
  } else {
    const Complex<Real> s = std::sqrt(pairB);
    right << (hx - i * hy) / s, (lambda - hz) / s;
    left << (hx + i * hy) / s, (lambda - hz) / s;
  }
}

}  // namespace detail

template <typename Real>
EigenSystem<Real> eigensystem(const FieldSample<Real>& f) {
  using C = Complex<Real>;
  const C i(0, 1);
  EigenSystem<Real> es;
  es.E = std::sqrt(f.E2());
  es.Eplus = f.H0 + es.E;
  es.Eminus = f.H0 - es.E;
  const Real scale = f.scale();
  if (scale == Real(0) || std::abs(es.E) <= Real(kCoalescenceTol) * scale) return es;
  es.vectorsValid = true;
  const C E = es.E;
  if (f.H.z() == C(0)) {
    const C n = std::sqrt(Real(2) * E * E);
    const C hp = f.H.x() + i * f.H.y();
    const C hm = f.H.x() - i * f.H.y();
    es.rightPlus << E / n, hp / n;
    es.rightMinus << -E / n, hp / n;
    es.leftPlus << E / n, hm / n;
    es.leftMinus << -E / n, hm / n;
    return es;
  }
  detail::eigenpair(f.H, E, es.rightPlus, es.leftPlus);
  detail::eigenpair(f.H, C(-E), es.rightMinus, es.leftMinus);
  return es;
}

enum class PointTag { ExceptionalPoint, BulkFermiArc, ImaginaryFermiArc, Generic };

const char* to_string(PointTag tag);

template <typename Real = double>
struct PointClass {
  PointTag tag = PointTag::Generic;
  Real absE{}, absReE{}, absImE{};
};

template <typename Real>
PointClass<Real> classify_point(const ModelSpec<Real>& m, const Vec2<Real>& k, Real tolAbs) {
  const Complex<Real> E = std::sqrt(evaluate_field(m, k).E2());
  PointClass<Real> pc;
  pc.absE = std::abs(E);
  pc.absReE = std::abs(E.real());
  pc.absImE = std::abs(E.imag());
  if (pc.absE <= tolAbs)
    pc.tag = PointTag::ExceptionalPoint;
  else if (pc.absReE <= tolAbs)
    pc.tag = PointTag::BulkFermiArc;
  else if (pc.absImE <= tolAbs)
    pc.tag = PointTag::ImaginaryFermiArc;
  return pc;
}

/// Axis-aligned momentum rectangle.
struct KWindow {
  double kxMin = -1, kxMax = 1, kyMin = -1, kyMax = 1;
};

/// Roots of E²(k) = 0 from Newton iteration seeded at sign-change cells.
std::vector<Vec2d> find_exceptional_points(const ModelSpec<double>& m, const KWindow& window,
                                           int seedGrid, double tol);

using Polyline = std::vector<Vec2d>;

struct FermiArcs {
  std::vector<Polyline> bulk;       // Re E = 0
  std::vector<Polyline> imaginary;  // Im E = 0
};

/// Zero set of Im E² split by the sign of Re E²: Re E² ≤ 0 is the bulk arc
/// (E purely imaginary), Re E² > 0 the imaginary arc (E purely real).
FermiArcs trace_fermi_arcs(const ModelSpec<double>& m, const KWindow& window, int gridN);

/// Gridded band energies; element (i, j) is at (kx[i], ky[j]).
struct BandGrid {
  std::vector<double> kx, ky;
  Eigen::MatrixXd rePlus, imPlus, reMinus, imMinus;
};

BandGrid band_surfaces(const ModelSpec<double>& m, const KWindow& window, int gridN);

}  // namespace nhzbw
