#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nhzbw/model.hpp"

namespace nhzbw {

template <typename Real = double>
struct SpinTrajectory {
  std::vector<Real> times;
  std::vector<Vec3<Real>> S;
  std::vector<Real> norm;
};

/// Scalar coefficients of e^{−iĤt/ħ} = phase·[c·I − i·(t/ħ)·s·(H·σ)], with
/// c = cos(Et/ħ) and s = sin(Et/ħ)/(Et/ħ) evaluated as entire functions of E².
template <typename Real>
struct PropagatorCoefficients {
  Complex<Real> phase, c, s;
};

template <typename Real>
PropagatorCoefficients<Real> propagator_coefficients(Complex<Real> H0, Complex<Real> E2, Real t,
                                                     Real hbar) {
  const Complex<Real> i(0, 1);
  const Real tau = t / hbar;
  const Complex<Real> z = E2 * tau * tau;
  const Complex<Real> phase = std::exp(-i * H0 * tau);
  if (std::abs(z) < Real(1e-8))
    return {phase, Real(1) - z / Real(2) + z * z / Real(24), Real(1) - z / Real(6) + z * z / Real(120)};
  const Complex<Real> y = std::sqrt(z);
  return {phase, std::cos(y), std::sin(y) / y};
}

template <typename Real>
PropagatorCoefficients<Real> propagator_coefficients(const FieldSample<Real>& f, Real t,
                                                     Real hbar) {
  return propagator_coefficients(f.H0, f.E2(), t, hbar);
}

template <typename Real>
Mat2c<Real> propagator(const FieldSample<Real>& f, Real t, Real hbar) {
  const Complex<Real> i(0, 1);
  const auto pc = propagator_coefficients(f, t, hbar);
  Mat2c<Real> u = Mat2c<Real>::Identity() * pc.c;
  u -= i * (t / hbar) * pc.s * sigma_dot(f.H);
  return pc.phase * u;
}

template <typename Real>
Spinor<Real> evolve_spinor(const FieldSample<Real>& f, const Spinor<Real>& psi0, Real t,
                           Real hbar) {
  return propagator(f, t, hbar) * psi0;
}

template <typename Real>
Real spinor_norm(const Spinor<Real>& psi) {
  return psi.squaredNorm();
}

/// RR-normalized Bloch vector ⟨ψ|σ|ψ⟩/⟨ψ|ψ⟩.
template <typename Real>
Vec3<Real> pseudospin_of(const Spinor<Real>& psi) {
  const Real n = psi.squaredNorm();
  if (!(n > Real(0)) || !std::isfinite(n))
    throw std::domain_error("pseudospin of a zero-norm or non-finite state");
  const Complex<Real> cross = std::conj(psi(0)) * psi(1);
  return Vec3<Real>(Real(2) * cross.real(), Real(2) * cross.imag(),
                    std::norm(psi(0)) - std::norm(psi(1))) /
         n;
}

template <typename Real>
Spinor<Real> spinor_from_pseudospin(const Vec3<Real>& S) {
  if (std::abs(S.norm() - Real(1)) > Real(1e-8))
    throw std::invalid_argument("pseudospin must have unit length");
  const Vec3<Real> u = S.normalized();
  const Real theta = std::acos(std::clamp(u.z(), Real(-1), Real(1)));
  const Real phi = std::atan2(u.y(), u.x());
  Spinor<Real> psi;
  psi << Complex<Real>(std::cos(theta / 2)), std::polar(std::sin(theta / 2), phi);
  return psi;
}

template <typename Real>
void check_increasing(const std::vector<Real>& times) {
  for (std::size_t n = 1; n < times.size(); ++n)
    if (!(times[n] > times[n - 1])) throw std::invalid_argument("times must be strictly increasing");
}

template <typename Real>
SpinTrajectory<Real> spin_trajectory_exact(const FieldSample<Real>& f, const Spinor<Real>& psi0,
                                           const std::vector<Real>& times, Real hbar) {
  check_increasing(times);
  SpinTrajectory<Real> tr;
  tr.times = times;
  // The scalar phase e^{−iH0 t/ħ} is kept out of ψ so strong uniform loss
  // cannot underflow the pseudospin.
  FieldSample<Real> traceless = f;
  traceless.H0 = Complex<Real>(0);
  for (Real t : times) {
    const Spinor<Real> psi = evolve_spinor(traceless, psi0, t, hbar);
    tr.S.push_back(pseudospin_of(psi));
    tr.norm.push_back(psi.squaredNorm() * std::exp(Real(2) * f.H0.imag() * t / hbar));
  }
  return tr;
}

/// dS/dt = (2/ħ)[G×S − (Γ·S)S + Γ]
template <typename Real>
Vec3<Real> bloch_rhs(const Vec3<Real>& G, const Vec3<Real>& Gamma, const Vec3<Real>& S,
                     Real hbar) {
  return (Real(2) / hbar) * (G.cross(S) - Gamma.dot(S) * S + Gamma);
}

/// Landau–Lifshitz–Gilbert form of the Bloch equation with Γ = λG.
template <typename Real>
Vec3<Real> llg_rhs(const Vec3<Real>& G, Real lambda, const Vec3<Real>& S, Real hbar) {
  return (Real(2) / hbar) * (G.cross(S) - lambda * G.dot(S) * S + lambda * G);
}

/// Fixed-step RK4 on the Bloch equation, co-integrating ln⟨ψ|ψ⟩ with
/// d ln n/dt = (2/ħ)(Γ0 + Γ·S) (initial norm 1). The step is tEnd/⌈tEnd/dt⌉.
template <typename Real>
SpinTrajectory<Real> spin_trajectory_ode(const FieldSample<Real>& f, const Vec3<Real>& S0,
                                         Real tEnd, Real dt, Real hbar) {
  if (!(dt > Real(0))) throw std::invalid_argument("dt must be positive");
  if (!(tEnd >= Real(0))) throw std::invalid_argument("tEnd must be non-negative");
  if (std::abs(S0.norm() - Real(1)) > Real(1e-8))
    throw std::invalid_argument("pseudospin must have unit length");
  const Vec3<Real> G = f.H.real(), Gamma = f.H.imag();
  const Real Gamma0 = f.H0.imag();
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(tEnd / dt - Real(1e-9))));
  const Real h = tEnd / Real(steps);

  using State = Eigen::Matrix<Real, 4, 1>;
  auto rhs = [&](const State& y) {
    const Vec3<Real> S = y.template head<3>();
    State d;
    d.template head<3>() = bloch_rhs(G, Gamma, S, hbar);
    d(3) = (Real(2) / hbar) * (Gamma0 + Gamma.dot(S));
    return d;
  };

  SpinTrajectory<Real> tr;
  State y;
  y << S0, Real(0);
  tr.times.push_back(Real(0));
  tr.S.push_back(S0);
  tr.norm.push_back(Real(1));
  if (tEnd == Real(0)) return tr;
  for (long n = 1; n <= steps; ++n) {
    const State k1 = rhs(y);
    const State k2 = rhs(State(y + h / 2 * k1));
    const State k3 = rhs(State(y + h / 2 * k2));
    const State k4 = rhs(State(y + h * k3));
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    tr.times.push_back(h * Real(n));
    tr.S.push_back(y.template head<3>());
    tr.norm.push_back(std::exp(y(3)));
  }
  return tr;
}

/// Closed form for an in-plane field (H_z = 0) starting from S = (0,0,1).
/// Hyperbolic terms are divided through by cosh(ω_i t) so long runs on the
/// bulk arc stay finite.
template <typename Real>
SpinTrajectory<Real> spin_closed_form_inplane(const FieldSample<Real>& f,
                                              const std::vector<Real>& times, Real hbar) {
  if (std::abs(f.H.z()) != Real(0))
    throw std::invalid_argument("in-plane closed form requires H_z = 0");
  check_increasing(times);
  const Complex<Real> i(0, 1);
  const Complex<Real> hp = f.H.x() + i * f.H.y();
  const Complex<Real> hm = f.H.x() - i * f.H.y();
  const Complex<Real> E = std::sqrt(f.E2());
  if (std::abs(E) == Real(0) || std::abs(hm) == Real(0))
    throw std::invalid_argument("in-plane closed form undefined at this point");
  const Real ap = std::abs(hp), am = std::abs(hm);
  const Complex<Real> q = am * hp / E;
  const Real wr = Real(2) * E.real() / hbar;
  const Real wi = Real(2) * E.imag() / hbar;

  SpinTrajectory<Real> tr;
  tr.times = times;
  for (Real t : times) {
    const Real c = std::cos(wr * t), s = std::sin(wr * t);
    const Real ch = std::cosh(wi * t);
    const Real sech = Real(1) / ch, th = std::tanh(wi * t);
    const Real D = (am - ap) * c * sech + (am + ap);
    Vec3<Real> S;
    S.x() = (Real(2) * q.imag() * s * sech + Real(2) * q.real() * th) / D;
    S.y() = (-Real(2) * q.real() * s * sech + Real(2) * q.imag() * th) / D;
    S.z() = ((am + ap) * c * sech + (am - ap)) / D;
    tr.S.push_back(S);
    const Real phase = std::exp(Real(2) * f.H0.imag() * t / hbar);
    tr.norm.push_back(phase * ch * D / (Real(2) * am));
  }
  return tr;
}

/// Rigid precession about a real field G.
template <typename Real>
SpinTrajectory<Real> spin_closed_form_hermitian(const Vec3<Real>& G, const Vec3<Real>& S0,
                                                const std::vector<Real>& times, Real hbar) {
  if (std::abs(S0.norm() - Real(1)) > Real(1e-8))
    throw std::invalid_argument("pseudospin must have unit length");
  check_increasing(times);
  SpinTrajectory<Real> tr;
  tr.times = times;
  const Real E = G.norm();
  for (Real t : times) {
    if (E == Real(0)) {
      tr.S.push_back(S0);
    } else {
      const Real w = Real(2) * E / hbar;
      const Vec3<Real> n = G / E;
      tr.S.push_back(n.dot(S0) * n - n.cross(n.cross(S0)) * std::cos(w * t) +
                     n.cross(S0) * std::sin(w * t));
    }
    tr.norm.push_back(Real(1));
  }
  return tr;
}

}  // namespace nhzbw
