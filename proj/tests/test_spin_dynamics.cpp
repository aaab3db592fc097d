#include <doctest.h>

#include <numbers>

#include "nhzbw/spectrum.hpp"
#include "nhzbw/spin_dynamics.hpp"
#include "oracles.hpp"

using namespace nhzbw;
using cd = std::complex<double>;

namespace {

std::vector<double> grid(double tEnd, int n) {
  std::vector<double> t(n);
  for (int m = 0; m < n; ++m) t[m] = tEnd * m / (n - 1);
  return t;
}

double sup_diff(const SpinTrajectory<double>& a, const SpinTrajectory<double>& b) {
  double e = 0;
  for (std::size_t n = 0; n < a.S.size(); ++n) e = std::max(e, (a.S[n] - b.S[n]).cwiseAbs().maxCoeff());
  return e;
}

struct Point {
  ModelSpec<double> model;
  Vec2d k;
};

std::vector<Point> scenario_points() {
  const auto d = ModelSpec<double>::dirac(-1);
  const auto p = ModelSpec<double>::polariton();
  return {{d, {0.5, 0}}, {d, {4, 0}}, {d, {2, 2}}, {p, {0.5, 2.685}}, {p, {1.5, 1.5}}, {p, {0.9, 1.22}}};
}

}  // namespace

TEST_CASE("propagator special cases") {
  oracle::Gen gen(31);
  const auto f = gen.field(false);
  CHECK(oracle::max_abs_diff(propagator(f, 0.0, 1.0), Mat2cd::Identity()) == 0.0);

  const auto ep = evaluate_field(ModelSpec<double>::dirac(-1), Vec2d(1, 0));
  Mat2cd want;
  want << 1, cd(0, -2), 0, 1;
  CHECK(oracle::max_abs_diff(propagator(ep, 1.0, 1.0), want) <= 1e-15);

  FieldSample<double> z;
  z.H = ComplexVec3d(0, 0, 0.7);
  const double t = std::numbers::pi / (2 * 0.7);
  Mat2cd rot = Mat2cd::Zero();
  rot(0, 0) = std::exp(cd(0, -std::numbers::pi / 2));
  rot(1, 1) = std::exp(cd(0, std::numbers::pi / 2));
  CHECK(oracle::max_abs_diff(propagator(z, t, 1.0), rot) <= 1e-14);
}

TEST_CASE("propagator matches the matrix exponential") {
  oracle::Gen gen(32);
  for (int n = 0; n < 200; ++n) {
    const auto f = gen.field(n % 3 == 0);
    const double t = gen.uniform(0, 3);
    const double hbar = n % 2 ? 1.0 : 0.5;
    const Mat2cd u = propagator(f, t, hbar), ref = oracle::propagator(f, t, hbar);
    CHECK(oracle::max_abs_diff(u, ref) <= 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
  // Across the series switch-over near the exceptional point.
  FieldSample<double> f;
  f.H = ComplexVec3d(1, cd(0, 1), 0);
  f.H.x() += 1e-9;
  for (double t : {1e-3, 0.1, 1.0, 10.0}) {
    const Mat2cd ref = oracle::propagator(f, t, 1.0);
    CHECK(oracle::max_abs_diff(propagator(f, t, 1.0), ref) <= 1e-12 * ref.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("norm evolution") {
  const Spinord up(1, 0);
  const auto herm = evaluate_field(ModelSpec<double>::dirac(0), Vec2d(0.3, 1.1));
  for (double t = 0; t <= 100; t += 0.37)
    CHECK(std::abs(evolve_spinor(herm, up, t, 1.0).squaredNorm() - 1.0) <= 1e-12);

  // Bulk arc: growth rate approaches 2·Im E of the least dissipative band.
  const auto bulk = evaluate_field(ModelSpec<double>::dirac(-1), Vec2d(0.5, 0));
  const double wi = 2 * std::sqrt(0.75);
  const double n20 = evolve_spinor(bulk, up, 20.0, 1.0).squaredNorm();
  const double n21 = evolve_spinor(bulk, up, 21.0, 1.0).squaredNorm();
  CHECK(std::log(n21 / n20) == doctest::Approx(wi).epsilon(1e-9));
  CHECK(oracle::max_abs_diff(evolve_spinor(bulk, up, 0.0, 1.0), up) == 0.0);
}

TEST_CASE("pseudospin_of") {
  const double r = 1 / std::sqrt(2.0);
  CHECK((pseudospin_of(Spinord(1, 0)) - Vec3d(0, 0, 1)).norm() == 0.0);
  CHECK((pseudospin_of(Spinord(r, r)) - Vec3d(1, 0, 0)).norm() <= 1e-15);
  CHECK((pseudospin_of(Spinord(r, cd(0, r))) - Vec3d(0, 1, 0)).norm() <= 1e-15);
  CHECK_THROWS_AS(pseudospin_of(Spinord(0, 0)), std::domain_error);
}

TEST_CASE("spinor_from_pseudospin") {
  const double r = 1 / std::sqrt(2.0);
  CHECK(oracle::max_abs_diff(spinor_from_pseudospin(Vec3d(0, 0, 1)), Spinord(1, 0)) <= 1e-15);
  CHECK(oracle::max_abs_diff(spinor_from_pseudospin(Vec3d(1, 0, 0)), Spinord(r, r)) <= 1e-15);
  const Spinord want(std::cos(std::numbers::pi / 4), std::polar(std::sin(std::numbers::pi / 4), std::numbers::pi / 4));
  CHECK(oracle::max_abs_diff(spinor_from_pseudospin(Vec3d(r, r, 0)), want) <= 1e-15);
  oracle::Gen gen(33);
  for (int n = 0; n < 100; ++n) {
    const Vec3d S = gen.unit();
    CHECK((pseudospin_of(spinor_from_pseudospin(S)) - S).norm() <= 1e-12);
  }
  CHECK_THROWS_AS(spinor_from_pseudospin(Vec3d(1, 1, 0)), std::invalid_argument);
}

TEST_CASE("bulk arc: monotone alignment with the less dissipative eigenstate") {
  const auto f = evaluate_field(ModelSpec<double>::dirac(-1), Vec2d(0.5, 0));
  const double wi = 2 * std::sqrt(0.75);
  const auto tr = spin_trajectory_exact(f, Spinord(1, 0), grid(20 / wi, 400), 1.0);
  for (std::size_t n = 1; n < tr.S.size(); ++n) CHECK(tr.S[n].z() <= tr.S[n - 1].z());
  const auto es = eigensystem(f);
  const Vec3d target = pseudospin_of(es.Eplus.imag() > es.Eminus.imag() ? es.rightPlus : es.rightMinus);
  CHECK((target - Vec3d(0, std::sqrt(3.0) / 2, 0.5)).norm() <= 1e-12);
  CHECK((tr.S.back() - target).norm() <= 1e-6);
}

TEST_CASE("in-plane closed form") {
  const auto f = evaluate_field(ModelSpec<double>::dirac(-1), Vec2d(0.5, 0));
  const auto times = grid(8, 200);
  const auto cf = spin_closed_form_inplane(f, times, 1.0);
  CHECK((cf.S[0] - Vec3d(0, 0, 1)).norm() == 0.0);
  const double wi = 2 * std::sqrt(0.75);
  for (std::size_t n = 0; n < times.size(); ++n) {
    const double t = times[n];
    const double d = 1 + 2 * std::cosh(wi * t);
    CHECK(std::abs(cf.S[n].x()) <= 1e-15);
    CHECK(cf.S[n].y() == doctest::Approx(2 * std::sqrt(0.75) * std::sinh(wi * t) / d).epsilon(1e-12));
    CHECK(cf.S[n].z() == doctest::Approx((2 + std::cosh(wi * t)) / d).epsilon(1e-12));
  }
  const auto late = spin_closed_form_inplane(f, {1000.0}, 1.0);
  CHECK((late.S[0] - Vec3d(0, std::sqrt(3.0) / 2, 0.5)).norm() <= 1e-14);

  for (const auto& p : scenario_points()) {
    const auto fp = evaluate_field(p.model, p.k);
    const double hbar = p.model.hbar();
    const double period = 2 * std::numbers::pi * hbar / (2 * std::abs(std::sqrt(fp.E2())));
    const auto ts = grid(5 * period, 200);
    const auto a = spin_closed_form_inplane(fp, ts, hbar);
    const auto b = spin_trajectory_exact(fp, Spinord(1, 0), ts, hbar);
    CHECK(sup_diff(a, b) <= 1e-10);
    for (std::size_t n = 0; n < ts.size(); ++n) CHECK(a.norm[n] == doctest::Approx(b.norm[n]).epsilon(1e-10));
  }

  FieldSample<double> tilted;
  tilted.H = ComplexVec3d(1, 0, 0.1);
  CHECK_THROWS_AS(spin_closed_form_inplane(tilted, times, 1.0), std::invalid_argument);
}

TEST_CASE("ODE agrees with the exact propagator") {
  oracle::Gen gen(34);
  for (const auto& p : scenario_points()) {
    const auto f = evaluate_field(p.model, p.k);
    const double hbar = p.model.hbar();
    const double period = 2 * std::numbers::pi * hbar / (2 * std::abs(std::sqrt(f.E2())));
    const Vec3d S0 = gen.unit();
    const auto ode = spin_trajectory_ode(f, S0, 3 * period, period / 2000, hbar);
    const auto ex = spin_trajectory_exact(f, spinor_from_pseudospin(S0), ode.times, hbar);
    CHECK(sup_diff(ode, ex) <= 1e-6);
    for (std::size_t n = 0; n < ode.times.size(); n += 97)
      CHECK(ode.norm[n] == doctest::Approx(ex.norm[n]).epsilon(1e-6));
  }
}

TEST_CASE("RK4 convergence order") {
  const auto f = evaluate_field(ModelSpec<double>::dirac(-1), Vec2d(2, 2));
  const Vec3d S0(1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0);
  auto err = [&](double dt) {
    const auto ode = spin_trajectory_ode(f, S0, 2.0, dt, 1.0);
    const auto ex = spin_trajectory_exact(f, spinor_from_pseudospin(S0), ode.times, 1.0);
    return sup_diff(ode, ex);
  };
  const double e1 = err(0.02), e2 = err(0.01);
  CHECK(e1 / e2 >= 12.0);
}

TEST_CASE("ODE at the exceptional point") {
  const auto f = evaluate_field(ModelSpec<double>::dirac(-1), Vec2d(1, 0));
  const auto still = spin_trajectory_ode(f, Vec3d(0, 0, 1), 10.0, 0.01, 1.0);
  for (const auto& S : still.S) CHECK((S - Vec3d(0, 0, 1)).norm() <= 1e-12);

  const auto tr = spin_trajectory_ode(f, Vec3d(1, 0, 0), 50.0, 0.005, 1.0);
  for (const auto& S : tr.S) CHECK(std::abs(S.norm() - 1) <= 1e-8);
  CHECK(tr.S.back().z() > 0.999);
}

TEST_CASE("Hermitian reduction") {
  const Vec3d G(0, 0, 0.8);
  const auto times = grid(10, 101);
  const auto cf = spin_closed_form_hermitian(G, Vec3d(1, 0, 0), times, 1.0);
  for (std::size_t n = 0; n < times.size(); ++n) {
    const double w = 1.6 * times[n];
    CHECK((cf.S[n] - Vec3d(std::cos(w), std::sin(w), 0)).norm() <= 1e-14);
  }
  const auto fixed = spin_closed_form_hermitian(G, Vec3d(0, 0, 1), times, 1.0);
  for (const auto& S : fixed.S) CHECK((S - Vec3d(0, 0, 1)).norm() <= 1e-15);
  const auto zero = spin_closed_form_hermitian(Vec3d(0, 0, 0), Vec3d(0, 1, 0), times, 1.0);
  for (const auto& S : zero.S) CHECK((S - Vec3d(0, 1, 0)).norm() == 0.0);

  oracle::Gen gen(35);
  for (int n = 0; n < 30; ++n) {
    FieldSample<double> f;
    f.H = ComplexVec3d(gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-2, 2));
    const Vec3d S0 = gen.unit();
    const double hbar = gen.uniform(0.5, 2);
    const auto a = spin_closed_form_hermitian(Vec3d(f.H.real()), S0, times, hbar);
    const auto b = spin_trajectory_exact(f, spinor_from_pseudospin(S0), times, hbar);
    CHECK(sup_diff(a, b) <= 1e-10);
    for (const auto& S : a.S) CHECK(std::abs(S.norm() - 1) <= 1e-14);
  }
}

TEST_CASE("LLG form") {
  oracle::Gen gen(36);
  for (int n = 0; n < 50; ++n) {
    const Vec3d G(gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-2, 2));
    const double lambda = gen.uniform(-1, 1);
    const Vec3d S = gen.unit();
    CHECK((llg_rhs(G, lambda, S, 1.0) - bloch_rhs(G, Vec3d(lambda * G), S, 1.0)).norm() <= 1e-14);
    CHECK((llg_rhs(G, 0.0, S, 1.0) - 2.0 * G.cross(S)).norm() <= 1e-14);
    CHECK(llg_rhs(G, lambda, Vec3d(G.normalized()), 1.0).norm() <= 1e-14);
    // S ∥ G either way: (G·S)S = G, so the damping terms cancel as well.
    CHECK(llg_rhs(G, lambda, Vec3d(-G.normalized()), 1.0).norm() <= 1e-13);
  }
}

TEST_CASE("purity and imaginary-arc persistence") {
  oracle::Gen gen(37);
  for (const auto& p : scenario_points()) {
    const auto f = evaluate_field(p.model, p.k);
    const double hbar = p.model.hbar();
    const double period = 2 * std::numbers::pi * hbar / (2 * std::abs(std::sqrt(f.E2())));
    const auto tr = spin_trajectory_exact(f, spinor_from_pseudospin(gen.unit()), grid(6 * period, 300), hbar);
    for (const auto& S : tr.S) CHECK(std::abs(S.norm() - 1) <= 1e-10);
  }
  const auto f = evaluate_field(ModelSpec<double>::dirac(-1), Vec2d(4, 0));
  const double T = 2 * std::numbers::pi / (2 * std::sqrt(15.0));
  std::vector<double> a, b;
  for (int n = 0; n < 50; ++n) {
    a.push_back(0.013 * n);
    b.push_back(0.013 * n + 7 * T);
  }
  const auto sa = spin_trajectory_exact(f, Spinord(1, 0), a, 1.0);
  const auto sb = spin_trajectory_exact(f, Spinord(1, 0), b, 1.0);
  CHECK(sup_diff(sa, sb) <= 1e-8);
}
