#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "nhzbw/geometry.hpp"
#include "nhzbw/spectrum.hpp"
#include "nhzbw/spin_dynamics.hpp"

namespace nhzbw {

/// v_i = (∂G0 + ∂G·S)/ħ
template <typename Real>
Vec2<Real> velocity_hermitian(const FieldSample<Real>& f, const Vec3<Real>& S, Real hbar) {
  Vec2<Real> v;
  for (int d = 0; d < 2; ++d) v[d] = (f.dH0[d].real() + f.dH[d].real().dot(S)) / hbar;
  return v;
}

namespace detail {

/// Shared assembly of the non-Hermitian velocity given the geometric part c_i.
template <typename Real>
Real velocity_component(const FieldSample<Real>& f, const Vec3<Real>& S, Real t, Real hbar,
                        int d, const ComplexVec3<Real>& c) {
  const Vec3<Real> Gamma = f.H.imag();
  const Vec3<Real> dG = f.dH[d].real(), dGamma = f.dH[d].imag();
  const Vec3<Real> reC = c.real(), imC = c.imag();
  const Real gS = Gamma.dot(S);
  Real v = (f.dH0[d].real() + dG.dot(S)) / hbar;
  v += (Real(2) * t / (hbar * hbar)) * (Gamma.dot(dG) - gS * dG.dot(S) - Gamma.cross(dGamma).dot(S));
  v += (Real(2) / hbar) * (Gamma.dot(reC) - gS * reC.dot(S) - Gamma.cross(imC).dot(S));
  return v;
}

}  // namespace detail

/// Full non-Hermitian centre-of-mass velocity; S must be the pseudospin at t.
template <typename Real>
Vec2<Real> velocity_nonhermitian(const FieldSample<Real>& f, const Vec3<Real>& S, Real t,
                                 Real hbar) {
  Vec2<Real> v;
  for (int d = 0; d < 2; ++d)
    v[d] = detail::velocity_component(f, S, t, hbar, d,
                                      geometric_coefficients(f, static_cast<Axis>(d), t, hbar));
  return v;
}

/// Same velocity with the geometric part rebuilt from the left-right metric;
/// only defined for in-plane fields.
template <typename Real>
Vec2<Real> velocity_inplane_metric(const FieldSample<Real>& f, const Vec3<Real>& S, Real t,
                                   Real hbar) {
  require_inplane(f);
  Vec2<Real> v;
  for (int d = 0; d < 2; ++d) {
    const ComplexVec3<Real> c =
        (t / hbar) * correction_vector_B_metric(f, static_cast<Axis>(d), t, hbar);
    v[d] = detail::velocity_component(f, S, t, hbar, d, c);
  }
  return v;
}

/// Velocity as d⟨L̂^Re⟩/dt from the generalized Ehrenfest theorem, assembled
/// from complex density-matrix traces. The imaginary part is a consistency
/// residue and should vanish.
template <typename Real>
Eigen::Matrix<Complex<Real>, 2, 1> velocity_operator_form(const FieldSample<Real>& f,
                                                          const Vec3<Real>& S, Real t, Real hbar) {
  using C = Complex<Real>;
  const C i(0, 1);
  const Mat2c<Real> rho =
      (Mat2c<Real>::Identity() + sigma_dot(ComplexVec3<Real>(S.template cast<C>()))) / Real(2);
  const Mat2c<Real> G = sigma_dot(ComplexVec3<Real>(f.H.real().template cast<C>()), C(f.H0.real()));
  const Mat2c<Real> Gam = sigma_dot(ComplexVec3<Real>(f.H.imag().template cast<C>()), C(f.H0.imag()));
  const C gammaMean = (rho * Gam).trace();
  Eigen::Matrix<C, 2, 1> v;
  for (int d = 0; d < 2; ++d) {
    const Axis dir = static_cast<Axis>(d);
    const Mat2c<Real> X = L_operator(f, dir, t, hbar).LRe;
    const ComplexVec3<Real> rate =
        f.dH[d].real().template cast<C>() / hbar + geometric_coefficients_rate(f, dir, t, hbar).real().template cast<C>();
    const Mat2c<Real> dXdt = sigma_dot(rate, C(f.dH0[d].real() / hbar));
    const C commutator = (rho * (G * X - X * G)).trace();
    const C anticommutator = (rho * (Gam * X + X * Gam)).trace();
    v[d] = (rho * dXdt).trace() + (i / hbar) * commutator +
           (anticommutator - Real(2) * gammaMean * (rho * X).trace()) / hbar;
  }
  return v;
}

enum class ArcKind { Imaginary, Bulk };

/// Dirac-model velocity specialised to a Fermi arc (k_y = 0, ħ = 1).
template <typename Real>
Vec2<Real> velocity_dirac_arc(Real kappa, const Vec2<Real>& k, const Vec3<Real>& S, Real t,
                              ArcKind kind) {
  const auto model = ModelSpec<Real>::dirac(kappa);
  const auto pc = classify_point(model, k, Real(1e-9));
  const PointTag want = kind == ArcKind::Imaginary ? PointTag::ImaginaryFermiArc : PointTag::BulkFermiArc;
  if (pc.tag != want) throw std::invalid_argument("momentum is not on the requested Fermi arc");
  const auto f = evaluate_field(model, k);
  const auto m = lr_metric_inplane(f);
  const Complex<Real> E = std::sqrt(f.E2());
  Real oscCos, oscSinOverW;  // (cos ωt − 1) and (sin ωt/ω − t) or their hyperbolic versions
  if (kind == ArcKind::Imaginary) {
    const Real w = Real(2) * E.real();
    oscCos = std::cos(w * t) - Real(1);
    oscSinOverW = std::sin(w * t) / w - t;
  } else {
    const Real w = Real(2) * E.imag();
    oscCos = std::cosh(w * t) - Real(1);
    oscSinOverW = std::sinh(w * t) / w - t;
  }
  const Real kx = k.x();
  const Complex<Real> i(0, 1);
  const Complex<Real> vx = S.x() + Real(2) * t * kappa * S.x() * S.y() -
                           Real(2) * i * m.sqrt_gxx *
                               (-oscCos * kappa * S.x() - Real(2) * oscSinOverW * kappa * kappa * S.x() * S.y());
  const Complex<Real> vy =
      S.y() - Real(2) * t * kappa * (Real(1) - S.y() * S.y()) +
      Real(2) * m.sqrt_gyy *
          (Real(2) * oscSinOverW * (-kappa * kx - kappa * kappa * S.z() + kappa * kx * S.y() * S.y()) -
           oscCos * kappa * S.y() * S.z());
  return Vec2<Real>(vx.real(), vy.real());
}

/// Centre of mass Re⟨L̂⟩ of an infinitesimally narrow packet at time t.
template <typename Real>
Vec2<Real> narrow_packet_com(const FieldSample<Real>& f, const Spinor<Real>& psi0, Real t,
                             Real hbar) {
  const Spinor<Real> psi = evolve_spinor(f, psi0, t, hbar);
  const Real n = psi.squaredNorm();
  Vec2<Real> r;
  for (int d = 0; d < 2; ++d)
    r[d] = (psi.adjoint() * L_operator(f, static_cast<Axis>(d), t, hbar).L * psi)(0).real() / n;
  return r;
}

/// ψ(t) = Uψ0 and ∂ψ/∂k_i = (∂U/∂k_i)ψ0 from the closed-form propagator,
/// both without the scalar factor e^{−iH0 t/ħ}.
template <typename Real = double>
struct PropagatedState {
  Spinor<Real> psi;
  std::array<Spinor<Real>, 2> dpsi;
};

template <typename Real>
PropagatedState<Real> propagated_state(const FieldSample<Real>& f, const Spinor<Real>& psi0, Real t,
                                       Real hbar) {
  const Complex<Real> i(0, 1);
  const Real tau = t / hbar;
  const Complex<Real> z = f.E2() * tau * tau;
  const Complex<Real> c = series::cos_sqrt(z), sc = series::sinc_sqrt(z), p3 = series::phi3(z);
  const Spinor<Real> hpsi = sigma_dot(f.H) * psi0;
  PropagatedState<Real> st;
  st.psi = c * psi0 - i * tau * sc * hpsi;
  for (int d = 0; d < 2; ++d) {
    const Complex<Real> hd = bdot(f.H, f.dH[d]);
    st.dpsi[d] = -tau * tau * sc * hd * psi0 - i * tau * tau * tau * p3 * hd * hpsi -
                 i * tau * sc * (sigma_dot(f.dH[d]) * psi0);
  }
  return st;
}

/// Re⟨L̂⟩ evaluated as Re[ψ†(i∂ψ)]/ψ†ψ.
template <typename Real>
Vec2<Real> position_from_state(const FieldSample<Real>& f, const PropagatedState<Real>& st, Real t,
                               Real hbar) {
  const Real n = st.psi.squaredNorm();
  Vec2<Real> r;
  for (int d = 0; d < 2; ++d)
    r[d] = -(st.psi.adjoint() * st.dpsi[d])(0).imag() / n + f.dH0[d].real() * t / hbar;
  return r;
}

/// The same velocity as velocity_nonhermitian, evaluated from ψ and ∂ψ:
/// ħv = ∂G0 + Re⟨∂Ĥ⟩ + 2 Re[iψ†Γ̂∂ψ]/ψ†ψ − 2⟨Γ̂⟩ Re⟨L̂⟩.
/// The explicit formula multiplies coefficients growing like e^{2|Im E|t/ħ}
/// with S(t) and relies on cancellation; this form never does.
template <typename Real>
Vec2<Real> velocity_from_state(const FieldSample<Real>& f, const PropagatedState<Real>& st, Real hbar) {
  using C = Complex<Real>;
  const C i(0, 1);
  const Real n = st.psi.squaredNorm();
  const Spinor<Real> gpsi = sigma_dot(ComplexVec3<Real>(f.H.imag().template cast<C>())) * st.psi;
  const Real gmean = (st.psi.adjoint() * gpsi)(0).real() / n;
  Vec2<Real> v;
  for (int d = 0; d < 2; ++d) {
    const Real r = -(st.psi.adjoint() * st.dpsi[d])(0).imag() / n;
    const Real dh = (st.psi.adjoint() * sigma_dot(f.dH[d]) * st.psi)(0).real() / n;
    const Real gamma = (Real(2) * i * (gpsi.adjoint() * st.dpsi[d])(0)).real() / n;
    v[d] = (f.dH0[d].real() + dh + gamma - Real(2) * r * gmean) / hbar;
  }
  return v;
}

/// State evaluates the equation of motion through velocity_from_state; the
/// other three use the explicit formulas.
enum class VelocityFormula { State, General, Metric, Arc };

template <typename Real = double>
struct ComTrajectory {
  std::vector<Real> times;
  std::vector<Vec2<Real>> positions, velocities;
  std::vector<Vec3<Real>> spins;
};

template <typename Real>
std::vector<Real> uniform_times(Real tEnd, int samples) {
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  if (!(tEnd > Real(0))) throw std::invalid_argument("tEnd must be positive");
  std::vector<Real> t(samples);
  for (int n = 0; n < samples; ++n) t[n] = tEnd * Real(n) / Real(samples - 1);
  return t;
}

/// Semiclassical trajectory at fixed k_c: exact S(t), the chosen velocity
/// formula, and trapezoidal positions starting at the origin. The explicit
/// formulas lose accuracy once e^{2|Im E|t/ħ}·ε is no longer small.
template <typename Real>
ComTrajectory<Real> com_trajectory(const ModelSpec<Real>& model, const Vec2<Real>& kc,
                                   const Vec3<Real>& S0, Real tEnd, int samples,
                                   VelocityFormula formula = VelocityFormula::State) {
  const Real hbar = model.hbar();
  const auto f = evaluate_field(model, kc);
  ComTrajectory<Real> tr;
  tr.times = uniform_times(tEnd, samples);
  const auto spin = spin_trajectory_exact(f, spinor_from_pseudospin(S0), tr.times, hbar);
  ArcKind arc = ArcKind::Imaginary;
  if (formula == VelocityFormula::Arc) {
    if (model.kind != ModelKind::Dirac)
      throw std::invalid_argument("arc formula is specific to the Dirac model");
    arc = classify_point(model, kc, Real(1e-9)).tag == PointTag::BulkFermiArc ? ArcKind::Bulk
                                                                              : ArcKind::Imaginary;
  }
  tr.spins = spin.S;
  const Spinor<Real> psi0 = spinor_from_pseudospin(S0);
  for (std::size_t n = 0; n < tr.times.size(); ++n) {
    const Real t = tr.times[n];
    const Vec3<Real>& S = spin.S[n];
    switch (formula) {
      case VelocityFormula::State:
        tr.velocities.push_back(velocity_from_state(f, propagated_state(f, psi0, t, hbar), hbar));
        break;
      case VelocityFormula::General:
        tr.velocities.push_back(velocity_nonhermitian(f, S, t, hbar));
        break;
      case VelocityFormula::Metric:
        tr.velocities.push_back(velocity_inplane_metric(f, S, t, hbar));
        break;
      case VelocityFormula::Arc:
        tr.velocities.push_back(velocity_dirac_arc(model.kappa, kc, S, t, arc));
        break;
    }
  }
  tr.positions.push_back(Vec2<Real>::Zero());
  for (std::size_t n = 1; n < tr.times.size(); ++n) {
    const Real h = tr.times[n] - tr.times[n - 1];
    tr.positions.push_back(tr.positions.back() + h / 2 * (tr.velocities[n] + tr.velocities[n - 1]));
  }
  return tr;
}

}  // namespace nhzbw
