#pragma once

#include <array>
#include <stdexcept>

#include "nhzbw/spectrum.hpp"

namespace nhzbw {

inline constexpr double kEpGuard = 1e-6;

/// A = H × ∂H
template <typename Real>
ComplexVec3<Real> cross_field(const FieldSample<Real>& f, Axis dir) {
  return bcross(f.H, f.dH[index(dir)]);
}

/// ∂H (H·H) − H (H·∂H), which equals −H × (H × ∂H).
template <typename Real>
ComplexVec3<Real> double_cross_field(const FieldSample<Real>& f, Axis dir) {
  const auto& d = f.dH[index(dir)];
  return d * f.E2() - f.H * bdot(f.H, d);
}

/// n-fold adjoint ad_Ĥⁿ(∂Ĥ) from its closed form.
template <typename Real>
Mat2c<Real> ad_series_term(const FieldSample<Real>& f, Axis dir, int n) {
  if (n < 0) throw std::invalid_argument("adjoint order must be non-negative");
  if (n == 0) return f.derivative_matrix(dir);
  const Complex<Real> i(0, 1);
  const int m = (n + 1) / 2;
  const Complex<Real> e2pow = std::pow(f.E2(), m - 1);
  const Real two = std::ldexp(Real(1), n);
  if (n % 2 == 1) return sigma_dot(ComplexVec3<Real>(two * i * e2pow * cross_field(f, dir)));
  return sigma_dot(ComplexVec3<Real>(two * e2pow * double_cross_field(f, dir)));
}

/// Geometric part c of L̂ = (t/ħ)(∂H0 + ∂H·σ) + c·σ:
/// c = (1 − cos y)/(2E²)·A + (sin y − y)/(2E³)·B with y = 2Et/ħ.
template <typename Real>
ComplexVec3<Real> geometric_coefficients(const FieldSample<Real>& f, Axis dir, Real t, Real hbar) {
  const Real tau = t / hbar;
  const Complex<Real> z = Real(4) * f.E2() * tau * tau;
  return tau * tau * series::phi1(z) * cross_field(f, dir) +
         Real(4) * tau * tau * tau * series::phi2(z) * double_cross_field(f, dir);
}

/// d c/dt, used by the operator-form velocity.
template <typename Real>
ComplexVec3<Real> geometric_coefficients_rate(const FieldSample<Real>& f, Axis dir, Real t,
                                              Real hbar) {
  const Real tau = t / hbar;
  const Complex<Real> z = Real(4) * f.E2() * tau * tau;
  return (Real(2) * tau / hbar) *
         (series::sinc_sqrt(z) * cross_field(f, dir) - tau * series::phi1(z) * double_cross_field(f, dir));
}

template <typename Real = double>
struct LOperator {
  Mat2c<Real> L, LRe, LIm;
};

template <typename Real>
LOperator<Real> L_operator(const FieldSample<Real>& f, Axis dir, Real t, Real hbar) {
  const Real tau = t / hbar;
  const ComplexVec3<Real> l = tau * f.dH[index(dir)] + geometric_coefficients(f, dir, t, hbar);
  const Complex<Real> l0 = tau * f.dH0[index(dir)];
  LOperator<Real> out;
  out.L = sigma_dot(l, l0);
  out.LRe = sigma_dot(ComplexVec3<Real>(l.real().template cast<Complex<Real>>()),
                      Complex<Real>(l0.real()));
  out.LIm = sigma_dot(ComplexVec3<Real>(l.imag().template cast<Complex<Real>>()),
                      Complex<Real>(l0.imag()));
  return out;
}

/// Correction vector B_i = (ħ/t)·c entering the compact velocity formula.
template <typename Real>
ComplexVec3<Real> correction_vector_B(const FieldSample<Real>& f, Axis dir, Real t, Real hbar) {
  const Real tau = t / hbar;
  const Complex<Real> z = Real(4) * f.E2() * tau * tau;
  return tau * series::phi1(z) * cross_field(f, dir) +
         Real(4) * tau * tau * series::phi2(z) * double_cross_field(f, dir);
}

template <typename Real>
void require_inplane(const FieldSample<Real>& f) {
  if (f.H.z() != Complex<Real>(0))
    throw std::invalid_argument("metric form requires an in-plane field (H_z = 0)");
}

/// (H_x ∂H_y − H_y ∂H_x)/(2E²): the signed square root of the diagonal metric.
template <typename Real>
Complex<Real> sqrt_metric_inplane(const FieldSample<Real>& f, Axis dir) {
  const auto& d = f.dH[index(dir)];
  return (f.H.x() * d.y() - f.H.y() * d.x()) / (Real(2) * f.E2());
}

/// B_i expressed through √g: √g·[2(sin ωt/ωt − 1)(H_x ŷ − H_y x̂) − (ħ/t)(cos ωt − 1) ẑ].
template <typename Real>
ComplexVec3<Real> correction_vector_B_metric(const FieldSample<Real>& f, Axis dir, Real t,
                                             Real hbar) {
  require_inplane(f);
  const Real tau = t / hbar;
  const Complex<Real> z = Real(4) * f.E2() * tau * tau;
  const Complex<Real> sg = sqrt_metric_inplane(f, dir);
  const Complex<Real> sincTerm = z * series::phi2(z);                       // sin ωt/ωt − 1
  const Complex<Real> cosTerm = Real(2) * f.E2() * tau * series::phi1(z);  // −(ħ/t)(cos ωt − 1)
  return sg * ComplexVec3<Real>(-Real(2) * sincTerm * f.H.y(), Real(2) * sincTerm * f.H.x(), cosTerm);
}

template <typename Real = double>
struct MetricSample {
  Complex<Real> g_xx{}, g_yy{};
  Complex<Real> sqrt_gxx{}, sqrt_gyy{};
};

template <typename Real>
MetricSample<Real> lr_metric_inplane(const FieldSample<Real>& f) {
  require_inplane(f);
  if (std::abs(std::sqrt(f.E2())) <= Real(kCoalescenceTol) * f.scale())
    throw std::domain_error("metric diverges at an exceptional point");
  MetricSample<Real> m;
  m.sqrt_gxx = sqrt_metric_inplane(f, Axis::X);
  m.sqrt_gyy = sqrt_metric_inplane(f, Axis::Y);
  m.g_xx = m.sqrt_gxx * m.sqrt_gxx;
  m.g_yy = m.sqrt_gyy * m.sqrt_gyy;
  return m;
}

template <typename Real = double>
struct MetricTensor {
  Eigen::Matrix<Complex<Real>, 2, 2> plus, minus;
};

namespace detail {

template <typename Real>
EigenSystem<Real> guarded_eigensystem(const FieldSample<Real>& f) {
  auto es = eigensystem(f);
  if (!es.vectorsValid || std::abs(es.E) <= Real(kEpGuard) * f.scale())
    throw std::domain_error("too close to an exceptional point");
  return es;
}

/// ⟨m^L| ∂_dir Ĥ |n^R⟩ for (m,n) = (+,−) and (−,+).
template <typename Real>
std::pair<Complex<Real>, Complex<Real>> interband_elements(const FieldSample<Real>& f,
                                                           const EigenSystem<Real>& es, Axis dir) {
  const Mat2c<Real> d = f.derivative_matrix(dir);
  const Complex<Real> pm = (es.leftPlus.transpose() * d * es.rightMinus)(0);
  const Complex<Real> mp = (es.leftMinus.transpose() * d * es.rightPlus)(0);
  return {pm, mp};
}

}  // namespace detail

/// Left-right metric of both bands from interband matrix elements.
template <typename Real>
MetricTensor<Real> lr_metric_general(const FieldSample<Real>& f) {
  const auto es = detail::guarded_eigensystem(f);
  std::array<std::pair<Complex<Real>, Complex<Real>>, 2> el = {
      detail::interband_elements(f, es, Axis::X), detail::interband_elements(f, es, Axis::Y)};
  const Complex<Real> gap2 = (es.Eplus - es.Eminus) * (es.Eplus - es.Eminus);
  MetricTensor<Real> g;
  for (int mu = 0; mu < 2; ++mu) {
    for (int nu = 0; nu < 2; ++nu) {
      // Band +: m = −, terms ⟨−|∂μ|+⟩⟨+|∂ν|−⟩ + (μ↔ν).
      g.plus(mu, nu) = (el[mu].second * el[nu].first + el[nu].second * el[mu].first) /
                       (Real(2) * gap2);
      g.minus(mu, nu) = (el[mu].first * el[nu].second + el[nu].first * el[mu].second) /
                        (Real(2) * gap2);
    }
  }
  return g;
}

template <typename Real = double>
struct InterbandConnection {
  std::array<Complex<Real>, 2> plusMinus{}, minusPlus{};
};

/// A_nm = ⟨n^L| i∂ m^R⟩ = i⟨n^L|∂Ĥ|m^R⟩/(E_m − E_n).
template <typename Real>
InterbandConnection<Real> interband_connection(const FieldSample<Real>& f) {
  const Complex<Real> i(0, 1);
  InterbandConnection<Real> a;
  if (f.H.z() == Complex<Real>(0)) {
    if (std::abs(std::sqrt(f.E2())) <= Real(kEpGuard) * f.scale())
      throw std::domain_error("too close to an exceptional point");
    for (int d = 0; d < 2; ++d) {
      a.plusMinus[d] = -sqrt_metric_inplane(f, static_cast<Axis>(d));
      a.minusPlus[d] = a.plusMinus[d];
    }
    return a;
  }
  const auto es = detail::guarded_eigensystem(f);
  for (int d = 0; d < 2; ++d) {
    const auto [pm, mp] = detail::interband_elements(f, es, static_cast<Axis>(d));
    a.plusMinus[d] = i * pm / (es.Eminus - es.Eplus);
    a.minusPlus[d] = i * mp / (es.Eplus - es.Eminus);
  }
  return a;
}

template <typename Real = double>
struct GeometryVectors {
  std::array<ComplexVec3<Real>, 2> A, Bsupp, Bcorr;
};

template <typename Real>
GeometryVectors<Real> geometry_vectors(const FieldSample<Real>& f, Real t, Real hbar) {
  GeometryVectors<Real> g;
  for (int d = 0; d < 2; ++d) {
    const Axis dir = static_cast<Axis>(d);
    g.A[d] = cross_field(f, dir);
    g.Bsupp[d] = double_cross_field(f, dir);
    g.Bcorr[d] = correction_vector_B(f, dir, t, hbar);
  }
  return g;
}

}  // namespace nhzbw
