#pragma once

#include <vector>

namespace nhzbw {

enum class Window { None, Hann };

struct Spectrum {
  std::vector<double> frequencies;  // angular, 0 … Nyquist
  std::vector<double> amplitudes;   // |DFT|, one-sided
  double resolution = 0;            // Δω
  std::size_t length = 0;           // number of input samples
};

struct SpectrumOptions {
  Window window = Window::Hann;
  bool subtractMean = true;
};

Spectrum fft_spectrum(const std::vector<double>& series, double dt, SpectrumOptions opt = {});

/// Same as above after checking that the sample times are uniform.
Spectrum fft_spectrum(const std::vector<double>& times, const std::vector<double>& series,
                      SpectrumOptions opt = {});

struct HarmonicPeak {
  int n = 0;
  bool found = false;   // a local maximum exists within ±2Δω of n·ω_r
  double omega = 0;
  double amplitude = 0;
  bool matched = false;  // found, within Δω of n·ω_r, and prominent
};

struct HarmonicReport {
  double base = 0;
  double median = 0;
  std::vector<HarmonicPeak> peaks;
};

HarmonicReport find_harmonics(const Spectrum& spec, double omegaR, int nMax, double prominence);

/// Index of the largest amplitude, skipping the ω = 0 bin.
std::size_t dominant_bin(const Spectrum& spec);

}  // namespace nhzbw
