#pragma once

#include <vector>

#include "nhzbw/model.hpp"

namespace nhzbw {

/// Square N×N momentum lattice centred on k_c with half-width W, holding
/// one spinor per node (row-major, kx index outermost). The t = 0 amplitudes
/// are kept so every evolution is a single exact jump from them.
struct WavepacketGrid {
  Vec2d center = Vec2d::Zero();
  double halfWidth = 0;
  int n = 0;
  double sigma = 0;
  double t = 0;
  std::vector<Spinord> initial;
  std::vector<Spinord> amplitudes;

  double spacing() const { return 2 * halfWidth / (n - 1); }
  Vec2d k(int i, int j) const {
    return center + Vec2d(-halfWidth + spacing() * i, -halfWidth + spacing() * j);
  }
  std::size_t at(int i, int j) const { return static_cast<std::size_t>(i) * n + j; }
};

/// Real Gaussian exp(−|k−k_c|²/2σ²) times the uniform spinor for S0.
WavepacketGrid init_gaussian(const Vec2d& kc, double sigma, const Vec3d& S0, int n,
                             double halfWidth);

WavepacketGrid evolve_to(const WavepacketGrid& g, const ModelSpec<double>& model, double t,
                         int threads = 1);

struct Observables {
  Vec2d com = Vec2d::Zero();
  Vec3d spin = Vec3d::Zero();
  double norm = 0;
};

/// Position expectation from Re[ψ†(i∂_k ψ)] with 8th-order central
/// differences in k; throws when the density at the lattice edge exceeds
/// 1e-12 of its peak.
Observables observables(const WavepacketGrid& g, int threads = 1);

struct TrajectorySeries {
  std::vector<double> times;
  std::vector<Vec2d> com, velocity;
  std::vector<Vec3d> spin;
  std::vector<double> norm;
};

struct ScenarioParams {
  Vec2d kc = Vec2d::Zero();
  double sigma = 0.005;
  Vec3d S0 = Vec3d(0, 0, 1);
  double tEnd = 1;
  int samples = 400;
  int n = 128;
  double halfWidth = 0;  // 0 means 6σ
  int threads = 0;
};

/// Evolves the packet to each sample time and differentiates the centre of
/// mass with 4th-order finite differences (one-sided at the ends).
TrajectorySeries run_scenario(const ModelSpec<double>& model, const ScenarioParams& p);

/// 4th-order derivative of a uniformly sampled series.
std::vector<double> differentiate_uniform(const std::vector<double>& y, double h);

}  // namespace nhzbw
