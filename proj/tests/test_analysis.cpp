#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "nhzbw/analysis.hpp"

using namespace nhzbw;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sampled(std::size_t L, double dt, auto fn) {
  std::vector<double> y(L);
  for (std::size_t n = 0; n < L; ++n) y[n] = fn(dt * static_cast<double>(n));
  return y;
}

}  // namespace

TEST_CASE("on-bin sinusoid") {
  const std::size_t L = 512;
  const double dt = 0.1;
  const double w = 2 * kPi * 20 / (L * dt);
  const auto y = sampled(L, dt, [&](double t) { return 3 * std::cos(w * t); });

  const auto raw = fft_spectrum(y, dt, {Window::None, false});
  REQUIRE(raw.amplitudes.size() == L / 2 + 1);
  CHECK(raw.length == L);
  CHECK(raw.resolution == doctest::Approx(2 * kPi / (L * dt)).epsilon(1e-15));
  CHECK(raw.frequencies[20] == doctest::Approx(w).epsilon(1e-14));
  CHECK(raw.amplitudes[20] == doctest::Approx(3.0 * L / 2).epsilon(1e-12));
  for (std::size_t n = 0; n < raw.amplitudes.size(); ++n)
    if (n != 20) CHECK(raw.amplitudes[n] <= 1e-10);
  CHECK(dominant_bin(raw) == 20);

  const auto hann = fft_spectrum(y, dt);
  CHECK(dominant_bin(hann) == 20);
  CHECK(hann.amplitudes[19] / hann.amplitudes[20] == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(hann.amplitudes[21] / hann.amplitudes[20] == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(hann.amplitudes[25] <= 1e-2 * hann.amplitudes[20]);
}

TEST_CASE("constant series has no spectrum after mean removal") {
  const auto s = fft_spectrum(std::vector<double>(128, 2.5), 0.3);
  for (double a : s.amplitudes) CHECK(a <= 1e-12);
  const auto raw = fft_spectrum(std::vector<double>(128, 2.5), 0.3, {Window::None, false});
  CHECK(raw.amplitudes[0] == doctest::Approx(2.5 * 128).epsilon(1e-14));
}

TEST_CASE("Parseval with one-sided weighting") {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> nd;
  for (std::size_t L : {128u, 257u, 1000u}) {
    std::vector<double> y(L);
    double energy = 0;
    for (auto& v : y) {
      v = nd(rng);
      energy += v * v;
    }
    const auto s = fft_spectrum(y, 1.0, {Window::None, false});
    double sum = s.amplitudes[0] * s.amplitudes[0];
    for (std::size_t n = 1; n < s.amplitudes.size(); ++n) {
      const bool nyquist = L % 2 == 0 && n == L / 2;
      sum += (nyquist ? 1 : 2) * s.amplitudes[n] * s.amplitudes[n];
    }
    CHECK(sum / static_cast<double>(L) == doctest::Approx(energy).epsilon(1e-12));
  }
}

TEST_CASE("off-bin peak stays within one bin") {
  const std::size_t L = 400;
  const double dt = 0.05;
  for (double frac : {0.1, 0.3, 0.5, 0.7}) {
    const double w = 2 * kPi * (33 + frac) / (L * dt);
    const auto s = fft_spectrum(sampled(L, dt, [&](double t) { return std::sin(w * t) + 0.2; }), dt);
    CHECK(std::abs(s.frequencies[dominant_bin(s)] - w) <= s.resolution);
  }
}

TEST_CASE("harmonic detection") {
  const std::size_t L = 2048;
  const double dt = 0.02;
  const double wr = 2 * kPi * 17.4 / (L * dt);
  const auto y = sampled(L, dt, [&](double t) { return std::sin(wr * t) + 0.3 * std::cos(3 * wr * t + 0.4); });
  const auto s = fft_spectrum(y, dt);
  const auto r = find_harmonics(s, wr, 4, 10);
  REQUIRE(r.peaks.size() == 4);
  CHECK(r.base == wr);
  CHECK(r.peaks[0].matched);
  CHECK_FALSE(r.peaks[1].matched);
  CHECK(r.peaks[2].matched);
  CHECK_FALSE(r.peaks[3].matched);
  CHECK(std::abs(r.peaks[2].omega - 3 * wr) <= s.resolution);

  // Raising the prominence threshold can only remove matches.
  int previous = 5;
  for (double prom : {1.0, 10.0, 1e2, 1e4, 1e8, 1e16}) {
    int count = 0;
    for (const auto& p : find_harmonics(s, wr, 4, prom).peaks) count += p.matched;
    CHECK(count <= previous);
    previous = count;
  }
  CHECK(previous == 0);

  CHECK_THROWS_AS(find_harmonics(s, 0.0, 3, 10), std::invalid_argument);
  CHECK_THROWS_AS(find_harmonics(s, wr, 0, 10), std::invalid_argument);
}

TEST_CASE("white noise has no prominent harmonics") {
  std::mt19937_64 rng(72);
  std::normal_distribution<double> nd;
  std::vector<double> y(4096);
  for (auto& v : y) v = nd(rng);
  const auto s = fft_spectrum(y, 0.01);
  for (double wr : {5.0, 23.0, 61.0}) {
    for (const auto& p : find_harmonics(s, wr, 3, 10).peaks) CHECK_FALSE(p.matched);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(fft_spectrum(std::vector<double>(63, 0.0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fft_spectrum(std::vector<double>(64, 0.0), 0.0), std::invalid_argument);
  std::vector<double> t(100), y(100, 0.0);
  for (int n = 0; n < 100; ++n) t[n] = n * 0.1 + (n == 50 ? 0.01 : 0);
  CHECK_THROWS_AS(fft_spectrum(t, y), std::invalid_argument);
  t[50] = 5.0;
  CHECK_NOTHROW(fft_spectrum(t, y));
  CHECK_THROWS_AS(fft_spectrum(t, std::vector<double>(99, 0.0)), std::invalid_argument);
}
