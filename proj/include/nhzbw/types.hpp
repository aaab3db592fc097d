#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace nhzbw {

template <typename Real>
using Complex = std::complex<Real>;
template <typename Real>
using Vec2 = Eigen::Matrix<Real, 2, 1>;
template <typename Real>
using Vec3 = Eigen::Matrix<Real, 3, 1>;
template <typename Real>
using ComplexVec3 = Eigen::Matrix<Complex<Real>, 3, 1>;
template <typename Real>
using Spinor = Eigen::Matrix<Complex<Real>, 2, 1>;
template <typename Real>
using Mat2c = Eigen::Matrix<Complex<Real>, 2, 2>;

using Vec2d = Vec2<double>;
using Vec3d = Vec3<double>;
using ComplexVec3d = ComplexVec3<double>;
using Spinord = Spinor<double>;
using Mat2cd = Mat2c<double>;

enum class Axis : int { X = 0, Y = 1 };

inline int index(Axis a) { return static_cast<int>(a); }

/// Non-conjugating product a·b of two complex 3-vectors.
template <typename Real>
Complex<Real> bdot(const ComplexVec3<Real>& a, const ComplexVec3<Real>& b) {
  return a.cwiseProduct(b).sum();
}

/// Bilinear a×b. Eigen's cross() conjugates its result for complex scalars.
template <typename Real>
ComplexVec3<Real> bcross(const ComplexVec3<Real>& a, const ComplexVec3<Real>& b) {
  return ComplexVec3<Real>(a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(),
                           a.x() * b.y() - a.y() * b.x());
}

template <typename Real>
Mat2c<Real> pauli(int j) {
  using C = Complex<Real>;
  Mat2c<Real> m = Mat2c<Real>::Zero();
  switch (j) {
    case 0:
      m(0, 1) = C(1);
      m(1, 0) = C(1);
      break;
    case 1:
      m(0, 1) = C(0, -1);
      m(1, 0) = C(0, 1);
      break;
    default:
      m(0, 0) = C(1);
      m(1, 1) = C(-1);
      break;
  }
  return m;
}

/// v0·I + v·σ
template <typename Real>
Mat2c<Real> sigma_dot(const ComplexVec3<Real>& v, Complex<Real> v0 = Complex<Real>(0)) {
  const Complex<Real> i(0, 1);
  Mat2c<Real> m;
  m << v0 + v.z(), v.x() - i * v.y(), v.x() + i * v.y(), v0 - v.z();
  return m;
}

/// Decomposes M = m0·I + m·σ; returns (m0, m).
template <typename Real>
std::pair<Complex<Real>, ComplexVec3<Real>> pauli_components(const Mat2c<Real>& m) {
  const Complex<Real> i(0, 1);
  ComplexVec3<Real> v;
  v.x() = (m(0, 1) + m(1, 0)) / Real(2);
  v.y() = (m(1, 0) - m(0, 1)) / (Real(2) * i);
  v.z() = (m(0, 0) - m(1, 1)) / Real(2);
  return {(m(0, 0) + m(1, 1)) / Real(2), v};
}

namespace series {

// Entire functions of z = y² used wherever cos(y), sin(y)/y and their
// cancelling combinations appear; written in z so the square-root branch never
// matters.

template <typename Real>
Complex<Real> cos_sqrt(Complex<Real> z) {
  if (std::abs(z) < Real(1e-8)) return Real(1) - z / Real(2) + z * z / Real(24);
  return std::cos(std::sqrt(z));
}

/// sin(√z)/√z
template <typename Real>
Complex<Real> sinc_sqrt(Complex<Real> z) {
  if (std::abs(z) < Real(1e-8)) return Real(1) - z / Real(6) + z * z / Real(120);
  const Complex<Real> y = std::sqrt(z);
  return std::sin(y) / y;
}

/// 2(1 − cos√z)/z
template <typename Real>
Complex<Real> phi1(Complex<Real> z) {
  const Complex<Real> s = sinc_sqrt(z / Real(4));
  return s * s;
}

/// (sin√z − √z)/(√z)³
template <typename Real>
Complex<Real> phi2(Complex<Real> z) {
  if (std::abs(z) < Real(1)) {
    Complex<Real> term(Real(-1) / Real(6));
    Complex<Real> sum = term;
    for (int m = 1; m < 14; ++m) {
      term *= -z / Real((2 * m + 2) * (2 * m + 3));
      sum += term;
    }
    return sum;
  }
  const Complex<Real> y = std::sqrt(z);
  return (std::sin(y) - y) / (y * y * y);
}

/// (cos√z − sin√z/√z)/z
template <typename Real>
Complex<Real> phi3(Complex<Real> z) {
  if (std::abs(z) < Real(1)) {
    Complex<Real> term(Real(-1) / Real(3));
    Complex<Real> sum = term;
    for (int n = 1; n < 14; ++n) {
      term *= -z / Real(2 * n * (2 * n + 3));
      sum += term;
    }
    return sum;
  }
  const Complex<Real> y = std::sqrt(z);
  return (std::cos(y) - std::sin(y) / y) / z;
}

}  // namespace series

}  // namespace nhzbw
