#include "nhzbw/wavepacket.hpp"

#include <cmath>
#include <stdexcept>

#include "nhzbw/parallel.hpp"
#include "nhzbw/spin_dynamics.hpp"

namespace nhzbw {

WavepacketGrid init_gaussian(const Vec2d& kc, double sigma, const Vec3d& S0, int n,
                             double halfWidth) {
  if (!(sigma > 0)) throw std::invalid_argument("wavepacket width must be positive");
  if (n < 64) throw std::invalid_argument("wavepacket grid must have at least 64 points per side");
  if (halfWidth < 6 * sigma * (1 - 1e-12))
    throw std::invalid_argument("wavepacket half-width must be at least 6 sigma");
  WavepacketGrid g;
  g.center = kc;
  g.halfWidth = halfWidth;
  g.n = n;
  g.sigma = sigma;
  const Spinord psi = spinor_from_pseudospin(S0);
  g.initial.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2d dk = g.k(i, j) - kc;
      g.initial[g.at(i, j)] = std::exp(-dk.squaredNorm() / (2 * sigma * sigma)) * psi;
    }
  }
  g.amplitudes = g.initial;
  return g;
}

namespace {

// Per-node data that does not depend on t: the field and (H·σ)ψ0.
struct NodeCache {
  std::complex<double> H0, E2;
  Spinord psi0, hpsi0;
};

std::vector<NodeCache> build_cache(const WavepacketGrid& g, const ModelSpec<double>& model) {
  std::vector<NodeCache> cache(g.initial.size());
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const auto f = evaluate_field(model, g.k(i, j));
      auto& c = cache[g.at(i, j)];
      c.H0 = f.H0;
      c.E2 = f.E2();
      c.psi0 = g.initial[g.at(i, j)];
      c.hpsi0 = sigma_dot(f.H) * c.psi0;
    }
  }
  return cache;
}

void apply(const std::vector<NodeCache>& cache, double t, double hbar, std::vector<Spinord>& out,
           int threads) {
  const std::complex<double> i(0, 1);
  const double tau = t / hbar;
  out.resize(cache.size());
  parallel_for(cache.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t n = b; n < e; ++n) {
      const auto& c = cache[n];
      const auto pc = propagator_coefficients(c.H0, c.E2, t, hbar);
      out[n] = pc.phase * (pc.c * c.psi0 - i * tau * pc.s * c.hpsi0);
    }
  });
}

}  // namespace

WavepacketGrid evolve_to(const WavepacketGrid& g, const ModelSpec<double>& model, double t,
                         int threads) {
  if (!(t >= 0)) throw std::invalid_argument("evolution time must be non-negative");
  WavepacketGrid out = g;
  apply(build_cache(g, model), t, model.hbar(), out.amplitudes, threads);
  out.t = t;
  return out;
}

Observables observables(const WavepacketGrid& g, int threads) {
  static constexpr double kStencil[4] = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
  const int n = g.n;
  const double h = g.spacing();
  const std::complex<double> i(0, 1);
  const auto& a = g.amplitudes;

  double peak = 0, edge = 0;
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      const double d = a[g.at(p, q)].squaredNorm();
      peak = std::max(peak, d);
      if (p == 0 || q == 0 || p == n - 1 || q == n - 1) edge = std::max(edge, d);
    }
  }
  if (!(peak > 0) || !std::isfinite(peak)) throw std::runtime_error("wavepacket has vanished or overflowed");
  if (edge > 1e-12 * peak) throw std::runtime_error("wavepacket support reaches the grid boundary");

  auto amp = [&](int p, int q) -> Spinord {
    if (p < 0 || q < 0 || p >= n || q >= n) return Spinord::Zero();
    return a[g.at(p, q)];
  };

  // Row sums are reduced serially so the result is independent of threads.
  struct Row {
    double norm = 0, rx = 0, ry = 0;
    Vec3d s = Vec3d::Zero();
  };
  std::vector<Row> rows(n);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      Row r;
      for (int q = 0; q < n; ++q) {
        const Spinord psi = amp(static_cast<int>(p), q);
        Spinord dx = Spinord::Zero(), dy = Spinord::Zero();
        for (int m = 1; m <= 4; ++m) {
          dx += kStencil[m - 1] * (amp(static_cast<int>(p) + m, q) - amp(static_cast<int>(p) - m, q));
          dy += kStencil[m - 1] * (amp(static_cast<int>(p), q + m) - amp(static_cast<int>(p), q - m));
        }
        r.norm += psi.squaredNorm();
        r.rx += (psi.adjoint() * (i * dx))(0).real() / h;
        r.ry += (psi.adjoint() * (i * dy))(0).real() / h;
        const std::complex<double> cross = std::conj(psi(0)) * psi(1);
        r.s += Vec3d(2 * cross.real(), 2 * cross.imag(), std::norm(psi(0)) - std::norm(psi(1)));
      }
      rows[p] = r;
    }
  });
  Row total;
  for (const Row& r : rows) {
    total.norm += r.norm;
    total.rx += r.rx;
    total.ry += r.ry;
    total.s += r.s;
  }
  Observables o;
  o.norm = total.norm * h * h;
  o.com = Vec2d(total.rx, total.ry) / total.norm;
  o.spin = total.s / total.norm;
  return o;
}

std::vector<double> differentiate_uniform(const std::vector<double>& y, double h) {
  const std::size_t L = y.size();
  if (L < 5) throw std::invalid_argument("need at least five samples to differentiate");
  std::vector<double> d(L);
  for (std::size_t n = 2; n + 2 < L; ++n)
    d[n] = (-y[n + 2] + 8 * y[n + 1] - 8 * y[n - 1] + y[n - 2]) / (12 * h);
  d[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / (12 * h);
  d[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) / (12 * h);
  const std::size_t e = L - 1;
  d[e] = (25 * y[e] - 48 * y[e - 1] + 36 * y[e - 2] - 16 * y[e - 3] + 3 * y[e - 4]) / (12 * h);
  d[e - 1] = (3 * y[e] + 10 * y[e - 1] - 18 * y[e - 2] + 6 * y[e - 3] - y[e - 4]) / (12 * h);
  return d;
}

TrajectorySeries run_scenario(const ModelSpec<double>& model, const ScenarioParams& p) {
  if (p.samples < 5) throw std::invalid_argument("wavepacket run needs at least five samples");
  if (!(p.tEnd > 0)) throw std::invalid_argument("tEnd must be positive");
  const double W = p.halfWidth > 0 ? p.halfWidth : 6 * p.sigma;
  WavepacketGrid g = init_gaussian(p.kc, p.sigma, p.S0, p.n, W);
  const auto cache = build_cache(g, model);
  const double hbar = model.hbar();

  TrajectorySeries s;
  for (int m = 0; m < p.samples; ++m) {
    const double t = p.tEnd * m / (p.samples - 1);
    apply(cache, t, hbar, g.amplitudes, p.threads);
    g.t = t;
    const Observables o = observables(g, p.threads);
    s.times.push_back(t);
    s.com.push_back(o.com);
    s.spin.push_back(o.spin);
    s.norm.push_back(o.norm);
  }
  const double h = p.tEnd / (p.samples - 1);
  std::vector<double> x, y;
  for (const auto& r : s.com) {
    x.push_back(r.x());
    y.push_back(r.y());
  }
  const auto vx = differentiate_uniform(x, h), vy = differentiate_uniform(y, h);
  for (std::size_t m = 0; m < vx.size(); ++m) s.velocity.emplace_back(vx[m], vy[m]);
  return s;
}

}  // namespace nhzbw
