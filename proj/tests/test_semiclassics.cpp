#include <doctest.h>

#include "nhzbw/semiclassics.hpp"
#include "oracles.hpp"

using namespace nhzbw;
using cd = std::complex<double>;

namespace {

double rel2(const Vec2d& a, const Vec2d& b) { return (a - b).norm() / std::max(1.0, std::max(a.norm(), b.norm())); }

/// Largest t for which the explicit formulas keep about ten digits.
double well_conditioned(const FieldSample<double>& f, double hbar) {
  const double wi = 2 * std::abs(std::sqrt(f.E2()).imag()) / hbar;
  return wi > 0 ? 8 / wi : 1e300;
}

Vec3d spin_at(const FieldSample<double>& f, const Vec3d& S0, double t, double hbar) {
  return pseudospin_of(evolve_spinor(f, spinor_from_pseudospin(S0), t, hbar));
}

}  // namespace

TEST_CASE("Hermitian and t = 0 reductions") {
  oracle::Gen gen(61);
  for (int s = 0; s < 50; ++s) {
    const auto f = evaluate_field(ModelSpec<double>::dirac(0), gen.k(3));
    const Vec3d S = gen.unit();
    const double t = gen.uniform(0, 5);
    CHECK(rel2(velocity_nonhermitian(f, S, t, 1.0), velocity_hermitian(f, S, 1.0)) <= 1e-12);
  }
  for (int s = 0; s < 50; ++s) {
    const auto f = gen.field(s % 2 == 0);
    const Vec3d S = gen.unit();
    CHECK(rel2(velocity_nonhermitian(f, S, 0.0, 1.0), velocity_hermitian(f, S, 1.0)) <= 1e-12);
  }
}

TEST_CASE("metric form equals the general velocity") {
  oracle::Gen gen(62);
  for (int s = 0; s < 100; ++s) {
    const bool polariton = s % 3 == 2;
    const auto m = polariton ? ModelSpec<double>::polariton() : ModelSpec<double>::dirac(gen.uniform(-2, 2));
    const auto f = s % 3 == 1 ? gen.field(true) : evaluate_field(m, gen.k(3));
    const double hbar = polariton ? m.hbar() : 1.0;
    const double t = std::min(polariton ? gen.uniform(0, 5) : gen.uniform(0, 4), well_conditioned(f, hbar));
    const Vec3d S = spin_at(f, gen.unit(), t, hbar);
    const Vec2d a = velocity_nonhermitian(f, S, t, hbar), b = velocity_inplane_metric(f, S, t, hbar);
    CHECK((a - b).norm() <= 1e-10 * std::max(1.0, a.norm()));
  }
  CHECK_THROWS_AS(velocity_inplane_metric(gen.field(false), Vec3d(1, 0, 0), 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("Fermi-arc velocity formulas equal the general velocity") {
  const auto m = ModelSpec<double>::dirac(-1);
  const Vec3d S0 = Vec3d(1, 1, 1).normalized();
  for (double t : {0.5, 1.0, 2.0}) {
    const auto f = evaluate_field(m, Vec2d(4, 0));
    const Vec3d S = spin_at(f, S0, t, 1.0);
    CHECK(rel2(velocity_dirac_arc(-1.0, Vec2d(4, 0), S, t, ArcKind::Imaginary), velocity_nonhermitian(f, S, t, 1.0)) <=
          1e-10);
    const auto b = evaluate_field(m, Vec2d(0.5, 0));
    const Vec3d Sb = spin_at(b, S0, t, 1.0);
    CHECK(rel2(velocity_dirac_arc(-1.0, Vec2d(0.5, 0), Sb, t, ArcKind::Bulk), velocity_nonhermitian(b, Sb, t, 1.0)) <=
          1e-10);
  }
  oracle::Gen gen(63);
  for (int s = 0; s < 30; ++s) {
    const double kappa = gen.uniform(-2, 2);
    if (std::abs(kappa) < 0.2) continue;
    const double kx = gen.uniform(0.05, 0.95) * std::abs(kappa) * (s % 2 ? 1 : -1);
    const double kxImag = (std::abs(kappa) + gen.uniform(0.1, 3)) * (s % 2 ? 1 : -1);
    const double t = gen.uniform(0, 3);
    const Vec3d S = gen.unit();
    const auto fb = evaluate_field(ModelSpec<double>::dirac(kappa), Vec2d(kx, 0));
    const auto fi = evaluate_field(ModelSpec<double>::dirac(kappa), Vec2d(kxImag, 0));
    CHECK(rel2(velocity_dirac_arc(kappa, Vec2d(kx, 0), S, t, ArcKind::Bulk), velocity_nonhermitian(fb, S, t, 1.0)) <=
          1e-9);
    CHECK(rel2(velocity_dirac_arc(kappa, Vec2d(kxImag, 0), S, t, ArcKind::Imaginary),
               velocity_nonhermitian(fi, S, t, 1.0)) <= 1e-9);
  }
  CHECK_THROWS_AS(velocity_dirac_arc(-1.0, Vec2d(0.5, 0.3), S0, 1.0, ArcKind::Bulk), std::invalid_argument);
  CHECK_THROWS_AS(velocity_dirac_arc(-1.0, Vec2d(4, 0), S0, 1.0, ArcKind::Bulk), std::invalid_argument);
}

TEST_CASE("generalized Ehrenfest form") {
  oracle::Gen gen(64);
  for (int s = 0; s < 60; ++s) {
    const auto f = s % 2 ? gen.field(false) : evaluate_field(ModelSpec<double>::dirac(gen.uniform(-2, 2)), gen.k(3));
    const double t = gen.uniform(0, 3);
    const Vec3d S = spin_at(f, gen.unit(), t, 1.0);
    const auto v = velocity_operator_form(f, S, t, 1.0);
    const Vec2d ref = velocity_nonhermitian(f, S, t, 1.0);
    const double scale = std::max(1.0, ref.norm());
    for (int d = 0; d < 2; ++d) {
      CHECK(std::abs(v[d].imag()) <= 1e-10 * scale);
      CHECK(std::abs(v[d].real() - ref[d]) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("state evaluation agrees with the explicit formula") {
  oracle::Gen gen(66);
  for (int s = 0; s < 100; ++s) {
    const bool polariton = s % 4 == 3;
    const auto m = polariton ? ModelSpec<double>::polariton() : ModelSpec<double>::dirac(gen.uniform(-2, 2));
    const double hbar = m.hbar();
    const auto f = s % 4 == 2 ? gen.field(false) : evaluate_field(m, gen.k(3));
    const double t = std::min(polariton ? gen.uniform(0, 3) : gen.uniform(0, 4), well_conditioned(f, hbar));
    const Spinor<double> psi0 = spinor_from_pseudospin(gen.unit());
    const auto st = propagated_state(f, psi0, t, hbar);
    const Vec3d S = pseudospin_of(evolve_spinor(f, psi0, t, hbar));
    const Vec2d a = velocity_from_state(f, st, hbar), b = velocity_nonhermitian(f, S, t, hbar);
    CHECK((a - b).norm() <= 1e-9 * std::max(1.0, b.norm()));
    const Vec2d r = position_from_state(f, st, t, hbar), q = narrow_packet_com(f, psi0, t, hbar);
    CHECK((r - q).norm() <= 1e-9 * std::max(1.0, q.norm()));
    CHECK((pseudospin_of(st.psi) - S).norm() <= 1e-12);
  }
}

TEST_CASE("state evaluation stays accurate where the explicit formula does not") {
  // Polariton generic point: e^{2|Im E|t/ħ} reaches 1e28 by t = 5 ps.
  const auto m = ModelSpec<double>::polariton();
  const auto f = evaluate_field(m, Vec2d(0.5, 2.0));
  const Spinor<double> psi0 = spinor_from_pseudospin(Vec3d(1, 0, 0));
  const double hbar = m.hbar();
  for (double t : {1.0, 3.0, 5.0, 8.0}) {
    const double h = 1e-4;
    const Vec2d fd = (position_from_state(f, propagated_state(f, psi0, t + h, hbar), t + h, hbar) -
                      position_from_state(f, propagated_state(f, psi0, t - h, hbar), t - h, hbar)) /
                     (2 * h);
    const Vec2d v = velocity_from_state(f, propagated_state(f, psi0, t, hbar), hbar);
    CHECK((fd - v).norm() <= 1e-6 * v.norm());
  }
}

TEST_CASE("velocity is the time derivative of the narrow-packet centre") {
  oracle::Gen gen(65);
  const double h = 1e-5;
  for (int s = 0; s < 40; ++s) {
    const bool polariton = s % 4 == 3;
    const auto m = polariton ? ModelSpec<double>::polariton() : ModelSpec<double>::dirac(gen.uniform(-2, 2));
    const double hbar = m.hbar();
    const auto f = evaluate_field(m, gen.k(3));
    const double t = std::min(polariton ? gen.uniform(0.01, 1) : gen.uniform(0.01, 3), well_conditioned(f, hbar));
    const double ht = polariton ? 1e-6 : h;
    const Spinor<double> psi0 = spinor_from_pseudospin(gen.unit());
    const Vec2d fd = (narrow_packet_com(f, psi0, t + ht, hbar) - narrow_packet_com(f, psi0, t - ht, hbar)) / (2 * ht);
    const Vec2d v = velocity_nonhermitian(f, pseudospin_of(evolve_spinor(f, psi0, t, hbar)), t, hbar);
    CHECK((fd - v).norm() <= 1e-6 * std::max(1.0, v.norm()));
  }
}

TEST_CASE("uniform loss does not change the motion") {
  auto lossy = ModelSpec<double>::polariton();
  auto lossless = lossy;
  lossless.gamma0 = 0;
  lossless.gamma4 = 0;
  auto other = lossy;
  other.gamma2 = 2e-4;
  other.gamma0 = 1e-3;
  oracle::Gen gen(67);
  for (int s = 0; s < 50; ++s) {
    const Vec2d k = gen.k(3);
    const Vec3d S = gen.unit();
    const double t = gen.uniform(0, 2);
    const Vec2d a = velocity_nonhermitian(evaluate_field(lossy, k), S, t, lossy.hbar());
    const Vec2d b = velocity_nonhermitian(evaluate_field(other, k), S, t, lossy.hbar());
    CHECK((a - b).norm() <= 1e-12 * std::max(1.0, a.norm()));
  }
  const Vec2d kc(0.5, 2.0);
  const Vec3d S0(1, 0, 0);
  const auto a = com_trajectory(lossy, kc, S0, 5.0, 201);
  const auto b = com_trajectory(lossless, kc, S0, 5.0, 201);
  double err = 0, scale = 0;
  for (std::size_t n = 0; n < a.times.size(); ++n) {
    err = std::max(err, (a.positions[n] - b.positions[n]).norm());
    scale = std::max(scale, b.positions[n].norm());
  }
  CHECK(err <= 1e-12 * scale);
}

TEST_CASE("centre-of-mass trajectory") {
  const auto m = ModelSpec<double>::dirac(-1);
  const Vec3d S0(0, 0, 1);
  const auto gen = com_trajectory(m, Vec2d(4, 0), S0, 6.0, 601);
  const auto met = com_trajectory(m, Vec2d(4, 0), S0, 6.0, 601, VelocityFormula::Metric);
  const auto arc = com_trajectory(m, Vec2d(4, 0), S0, 6.0, 601, VelocityFormula::Arc);
  REQUIRE(gen.times.size() == 601);
  CHECK(gen.times.front() == 0.0);
  CHECK(gen.times.back() == 6.0);
  CHECK(gen.positions.front() == Vec2d::Zero());
  CHECK(rel2(gen.velocities.front(), velocity_hermitian(evaluate_field(m, Vec2d(4, 0)), S0, 1.0)) <= 1e-15);
  for (std::size_t n = 0; n < gen.times.size(); ++n) {
    CHECK(rel2(gen.positions[n], met.positions[n]) <= 1e-10);
    CHECK(rel2(gen.positions[n], arc.positions[n]) <= 1e-9);
    CHECK(std::abs(gen.spins[n].norm() - 1) <= 1e-12);
  }

  // Trapezoid integration converges at second order.
  auto end_at = [&](int samples) { return com_trajectory(m, Vec2d(4, 0), S0, 6.0, samples).positions.back(); };
  const Vec2d fine = end_at(6401);
  CHECK((end_at(401) - fine).norm() / (end_at(801) - fine).norm() >= 3.5);

  CHECK_THROWS_AS(com_trajectory(ModelSpec<double>::polariton(), Vec2d(0, 2), S0, 1.0, 10, VelocityFormula::Arc),
                  std::invalid_argument);
  CHECK_THROWS_AS(com_trajectory(m, Vec2d(4, 0), S0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(com_trajectory(m, Vec2d(4, 0), S0, -1.0, 10), std::invalid_argument);
}

TEST_CASE("Hermitian eigenstate moves in a straight line") {
  const auto m = ModelSpec<double>::dirac(0);
  const Vec2d kc(2, 2);
  const Vec3d S0 = Vec3d(2, 2, 0).normalized();
  const auto tr = com_trajectory(m, kc, S0, 10.0, 101);
  for (std::size_t n = 0; n < tr.times.size(); ++n) {
    CHECK((tr.positions[n] - tr.times[n] * S0.head<2>()).norm() <= 1e-12 * std::max(1.0, tr.times[n]));
  }
}

TEST_CASE("Hermitian velocity under time reversal") {
  // v_H(S(−t)) read forwards is the trajectory started from S(−T) read backwards.
  const auto f = evaluate_field(ModelSpec<double>::dirac(0), Vec2d(1.2, -0.7));
  const Spinor<double> psi0 = spinor_from_pseudospin(Vec3d(0, 0, 1));
  const double T = 4;
  const Spinor<double> start = evolve_spinor(f, psi0, -T, 1.0);
  for (int n = 0; n <= 40; ++n) {
    const double t = T * n / 40;
    const Vec2d back = velocity_hermitian(f, pseudospin_of(evolve_spinor(f, psi0, -t, 1.0)), 1.0);
    const Vec2d fwd = velocity_hermitian(f, pseudospin_of(evolve_spinor(f, start, T - t, 1.0)), 1.0);
    CHECK((back - fwd).norm() <= 1e-12);
  }
}
