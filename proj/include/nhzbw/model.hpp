#pragma once

#include <array>

#include "nhzbw/types.hpp"

namespace nhzbw {

inline constexpr double kHbarEvPs = 6.582119569e-4;

enum class ModelKind { Dirac, Polariton };

/// Parameters of either concrete model. Polariton quantities are in eV and
/// μm (time in ps); the Dirac model is dimensionless with ħ = 1.
template <typename Real = double>
struct ModelSpec {
  ModelKind kind = ModelKind::Dirac;

  Real kappa = Real(-1);

  Real E0 = Real(2.306);
  Real gamma0 = Real(4.5e-4);
  Real gamma2 = Real(0);
  Real gamma4 = Real(3.75e-4);
  Real kinetic = Real(2.3e-3);  // ħ²/2m
  Real alpha = Real(8e-3);
  Real a = Real(1e-5);
  Real beta = Real(1e-3);
  Real b = Real(7.5e-4);
  Real Delta = Real(0);

  static ModelSpec dirac(Real kappa) {
    ModelSpec m;
    m.kind = ModelKind::Dirac;
    m.kappa = kappa;
    return m;
  }

  static ModelSpec polariton() {
    ModelSpec m;
    m.kind = ModelKind::Polariton;
    return m;
  }

  Real hbar() const { return kind == ModelKind::Dirac ? Real(1) : Real(kHbarEvPs); }
};

/// Effective field H0·I + H·σ and its analytic momentum derivatives at k.
template <typename Real = double>
struct FieldSample {
  Vec2<Real> k = Vec2<Real>::Zero();
  Complex<Real> H0{};
  ComplexVec3<Real> H = ComplexVec3<Real>::Zero();
  std::array<Complex<Real>, 2> dH0{};
  std::array<ComplexVec3<Real>, 2> dH{ComplexVec3<Real>::Zero(), ComplexVec3<Real>::Zero()};

  Complex<Real> E2() const { return bdot(H, H); }

  /// Largest field component magnitude; reference scale for EP guards.
  Real scale() const { return H.cwiseAbs().maxCoeff(); }

  Mat2c<Real> matrix() const { return sigma_dot(H, H0); }
  Mat2c<Real> derivative_matrix(Axis dir) const {
    return sigma_dot(dH[index(dir)], dH0[index(dir)]);
  }
};

template <typename Real = double>
struct FieldSplit {
  Real G0{}, Gamma0{};
  Vec3<Real> G = Vec3<Real>::Zero(), Gamma = Vec3<Real>::Zero();
  std::array<Real, 2> dG0{}, dGamma0{};
  std::array<Vec3<Real>, 2> dG{Vec3<Real>::Zero(), Vec3<Real>::Zero()};
  std::array<Vec3<Real>, 2> dGamma{Vec3<Real>::Zero(), Vec3<Real>::Zero()};
};

template <typename Real>
FieldSample<Real> evaluate_field(const ModelSpec<Real>& m, const Vec2<Real>& k) {
  using C = Complex<Real>;
  const C i(0, 1);
  FieldSample<Real> f;
  f.k = k;
  const Real kx = k.x(), ky = k.y();
  if (m.kind == ModelKind::Dirac) {
    f.H0 = C(0);
    f.H = ComplexVec3<Real>(C(kx), C(ky, -m.kappa), C(0));
    f.dH0 = {C(0), C(0)};
    f.dH[0] = ComplexVec3<Real>(C(1), C(0), C(0));
    f.dH[1] = ComplexVec3<Real>(C(0), C(1), C(0));
    return f;
  }
  const Real k2 = kx * kx + ky * ky;
  const Real gamma = m.gamma0 + m.gamma2 * k2 + m.gamma4 * k2 * k2;
  const Real dgammaDk2 = m.gamma2 + Real(2) * m.gamma4 * k2;
  const C c(m.alpha, -m.a);
  const C d(m.beta, -m.b);
  f.H0 = C(m.E0 + m.kinetic * k2, -gamma);
  f.H = ComplexVec3<Real>(c + d * (kx * kx - ky * ky), Real(2) * d * kx * ky, C(m.Delta));
  for (int dir = 0; dir < 2; ++dir) {
    const Real kd = dir == 0 ? kx : ky;
    f.dH0[dir] = C(Real(2) * m.kinetic * kd, -Real(2) * dgammaDk2 * kd);
  }
  f.dH[0] = ComplexVec3<Real>(Real(2) * d * kx, Real(2) * d * ky, C(0));
  f.dH[1] = ComplexVec3<Real>(-Real(2) * d * ky, Real(2) * d * kx, C(0));
  return f;
}

template <typename Real>
FieldSplit<Real> split_field(const FieldSample<Real>& f) {
  FieldSplit<Real> s;
  s.G0 = f.H0.real();
  s.Gamma0 = f.H0.imag();
  s.G = f.H.real();
  s.Gamma = f.H.imag();
  for (int d = 0; d < 2; ++d) {
    s.dG0[d] = f.dH0[d].real();
    s.dGamma0[d] = f.dH0[d].imag();
    s.dG[d] = f.dH[d].real();
    s.dGamma[d] = f.dH[d].imag();
  }
  return s;
}

/// Central-difference approximation of ∂H along x and y (validation only).
template <typename Real>
std::array<ComplexVec3<Real>, 2> field_derivative_oracle(const ModelSpec<Real>& m,
                                                          const Vec2<Real>& k, Real h) {
  std::array<ComplexVec3<Real>, 2> out;
  for (int d = 0; d < 2; ++d) {
    Vec2<Real> e = Vec2<Real>::Zero();
    e[d] = h;
    out[d] = (evaluate_field(m, Vec2<Real>(k + e)).H - evaluate_field(m, Vec2<Real>(k - e)).H) /
             (Real(2) * h);
  }
  return out;
}

}  // namespace nhzbw
