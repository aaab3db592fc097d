#include "nhzbw/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace nhzbw {

Spectrum fft_spectrum(const std::vector<double>& series, double dt, SpectrumOptions opt) {
  const std::size_t L = series.size();
  if (L < 64) throw std::invalid_argument("spectrum needs at least 64 samples");
  if (!(dt > 0)) throw std::invalid_argument("sample spacing must be positive");
  std::vector<double> x = series;
  if (opt.subtractMean) {
    double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(L);
    for (double& v : x) v -= mean;
  }
  if (opt.window == Window::Hann)
    for (std::size_t n = 0; n < L; ++n)
      x[n] *= 0.5 * (1 - std::cos(2 * std::numbers::pi * n / static_cast<double>(L - 1)));

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> X;
  fft.fwd(X, x);

  Spectrum s;
  s.length = L;
  s.resolution = 2 * std::numbers::pi / (static_cast<double>(L) * dt);
  for (std::size_t n = 0; n <= L / 2; ++n) {
    s.frequencies.push_back(s.resolution * static_cast<double>(n));
    s.amplitudes.push_back(std::abs(X[n]));
  }
  return s;
}

Spectrum fft_spectrum(const std::vector<double>& times, const std::vector<double>& series,
                      SpectrumOptions opt) {
  if (times.size() != series.size()) throw std::invalid_argument("times and series differ in length");
  if (times.size() < 2) throw std::invalid_argument("spectrum needs at least 64 samples");
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t n = 1; n < times.size(); ++n)
    if (std::abs(times[n] - times[n - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("spectrum requires uniformly sampled times");
  return fft_spectrum(series, dt, opt);
}

std::size_t dominant_bin(const Spectrum& spec) {
  if (spec.amplitudes.size() < 2) return 0;
  return static_cast<std::size_t>(
      std::max_element(spec.amplitudes.begin() + 1, spec.amplitudes.end()) - spec.amplitudes.begin());
}

HarmonicReport find_harmonics(const Spectrum& spec, double omegaR, int nMax, double prominence) {
  if (!(omegaR > 0)) throw std::invalid_argument("base frequency must be positive");
  if (nMax < 1) throw std::invalid_argument("need at least one harmonic");
  HarmonicReport r;
  r.base = omegaR;
  std::vector<double> sorted = spec.amplitudes;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  r.median = sorted[sorted.size() / 2];

  const auto& a = spec.amplitudes;
  const double dw = spec.resolution;
  for (int n = 1; n <= nMax; ++n) {
    HarmonicPeak p;
    p.n = n;
    const double target = n * omegaR;
    for (std::size_t b = 1; b + 1 < a.size(); ++b) {
      if (std::abs(spec.frequencies[b] - target) > 2 * dw) continue;
      if (!(a[b] > a[b - 1] && a[b] > a[b + 1])) continue;
      if (!p.found || a[b] > p.amplitude) {
        p.found = true;
        p.omega = spec.frequencies[b];
        p.amplitude = a[b];
      }
    }
    p.matched = p.found && std::abs(p.omega - target) <= dw && p.amplitude >= prominence * r.median;
    r.peaks.push_back(p);
  }
  return r;
}

}  // namespace nhzbw
