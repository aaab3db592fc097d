#include "nhzbw/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace nhzbw {

const char* to_string(PointTag tag) {
  switch (tag) {
    case PointTag::ExceptionalPoint:
      return "ExceptionalPoint";
    case PointTag::BulkFermiArc:
      return "BulkFermiArc";
    case PointTag::ImaginaryFermiArc:
      return "ImaginaryFermiArc";
    case PointTag::Generic:
      break;
  }
  return "Generic";
}

namespace {

struct Lattice {
  KWindow w;
  int n;
  double kx(int i) const { return w.kxMin + (w.kxMax - w.kxMin) * i / (n - 1); }
  double ky(int j) const { return w.kyMin + (w.kyMax - w.kyMin) * j / (n - 1); }
};

void check_window(const KWindow& w) {
  if (!(w.kxMax > w.kxMin) || !(w.kyMax > w.kyMin))
    throw std::invalid_argument("k-window must have positive extent");
}

Eigen::MatrixXcd sample_E2(const ModelSpec<double>& m, const Lattice& lat) {
  Eigen::MatrixXcd e2(lat.n, lat.n);
  for (int i = 0; i < lat.n; ++i)
    for (int j = 0; j < lat.n; ++j) e2(i, j) = evaluate_field(m, Vec2d(lat.kx(i), lat.ky(j))).E2();
  return e2;
}

bool straddles(double a, double b, double c, double d) {
  const double lo = std::min({a, b, c, d});
  const double hi = std::max({a, b, c, d});
  return lo <= 0.0 && hi >= 0.0;
}

}  // namespace

std::vector<Vec2d> find_exceptional_points(const ModelSpec<double>& m, const KWindow& window,
                                           int seedGrid, double tol) {
  if (seedGrid < 16) throw std::invalid_argument("seed grid must be at least 16");
  check_window(window);
  const Lattice lat{window, seedGrid};
  const Eigen::MatrixXcd e2 = sample_E2(m, lat);
  const double slackX = (window.kxMax - window.kxMin) / (seedGrid - 1);
  const double slackY = (window.kyMax - window.kyMin) / (seedGrid - 1);

  std::vector<Vec2d> roots;
  for (int i = 0; i + 1 < seedGrid; ++i) {
    for (int j = 0; j + 1 < seedGrid; ++j) {
      const auto c00 = e2(i, j), c10 = e2(i + 1, j), c01 = e2(i, j + 1), c11 = e2(i + 1, j + 1);
      if (!straddles(c00.real(), c10.real(), c01.real(), c11.real()) ||
          !straddles(c00.imag(), c10.imag(), c01.imag(), c11.imag()))
        continue;
      Vec2d k(0.5 * (lat.kx(i) + lat.kx(i + 1)), 0.5 * (lat.ky(j) + lat.ky(j + 1)));
      auto f = evaluate_field(m, k);
      std::complex<double> val = f.E2();
      bool converged = std::abs(val) <= tol;
      for (int it = 0; it < 50 && !converged; ++it) {
        const std::complex<double> gx = 2.0 * bdot(f.H, f.dH[0]);
        const std::complex<double> gy = 2.0 * bdot(f.H, f.dH[1]);
        Eigen::Matrix2d J;
        J << gx.real(), gy.real(), gx.imag(), gy.imag();
        const double det = J.determinant();
        if (!(std::abs(det) > 1e-12 * J.squaredNorm())) break;
        Vec2d step = -J.inverse() * Vec2d(val.real(), val.imag());
        Vec2d next = k + step;
        auto fn = evaluate_field(m, next);
        for (int damp = 0; damp < 30 && std::abs(fn.E2()) > std::abs(val); ++damp) {
          step *= 0.5;
          next = k + step;
          fn = evaluate_field(m, next);
        }
        k = next;
        f = fn;
        val = f.E2();
        converged = std::abs(val) <= tol;
      }
      if (!converged) continue;
      if (k.x() < window.kxMin - slackX || k.x() > window.kxMax + slackX ||
          k.y() < window.kyMin - slackY || k.y() > window.kyMax + slackY)
        continue;
      const bool duplicate = std::any_of(roots.begin(), roots.end(),
                                         [&](const Vec2d& r) { return (r - k).norm() <= 1e-6; });
      if (!duplicate) roots.push_back(k);
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Vec2d& a, const Vec2d& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  return roots;
}

namespace {

// Marching squares on a node field; edge ids are unique per lattice edge so
// segments from neighbouring cells share endpoints exactly.
struct Segment {
  long edgeA, edgeB;
  Vec2d a, b;
};

std::vector<Polyline> chain_segments(const std::vector<Segment>& segs) {
  std::map<long, std::vector<int>> byEdge;
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    byEdge[segs[s].edgeA].push_back(s);
    byEdge[segs[s].edgeB].push_back(s);
  }
  std::vector<bool> used(segs.size(), false);
  std::vector<Polyline> lines;

  auto walk = [&](int start, long fromEdge) {
    Polyline line;
    int s = start;
    long edge = fromEdge;
    line.push_back(segs[s].edgeA == edge ? segs[s].a : segs[s].b);
    while (s >= 0 && !used[s]) {
      used[s] = true;
      const bool forward = segs[s].edgeA == edge;
      line.push_back(forward ? segs[s].b : segs[s].a);
      edge = forward ? segs[s].edgeB : segs[s].edgeA;
      int next = -1;
      for (int c : byEdge[edge])
        if (!used[c]) next = c;
      s = next;
    }
    lines.push_back(std::move(line));
  };

  // Open chains start at an edge touched by a single segment.
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    if (used[s]) continue;
    if (byEdge[segs[s].edgeA].size() == 1)
      walk(s, segs[s].edgeA);
    else if (byEdge[segs[s].edgeB].size() == 1)
      walk(s, segs[s].edgeB);
  }
  for (int s = 0; s < static_cast<int>(segs.size()); ++s)
    if (!used[s]) walk(s, segs[s].edgeA);
  return lines;
}

}  // namespace

FermiArcs trace_fermi_arcs(const ModelSpec<double>& m, const KWindow& window, int gridN) {
  if (gridN < 64) throw std::invalid_argument("arc grid must be at least 64");
  check_window(window);
  const Lattice lat{window, gridN};
  const Eigen::MatrixXcd e2 = sample_E2(m, lat);
  const Eigen::MatrixXd im = e2.imag();
  const double scale = e2.cwiseAbs().maxCoeff();

  FermiArcs arcs;
  if (im.cwiseAbs().maxCoeff() <= 1e-14 * scale) {
    // E is real everywhere: the imaginary set would cover the window, and the
    // bulk set collapses to isolated degeneracies.
    for (int i = 0; i < gridN; ++i)
      for (int j = 0; j < gridN; ++j)
        if (std::abs(e2(i, j)) <= 1e-14 * scale) arcs.bulk.push_back({Vec2d(lat.kx(i), lat.ky(j))});
    return arcs;
  }

  const long n = gridN;
  auto hEdge = [n](int i, int j) { return 2 * (static_cast<long>(i) * n + j); };
  auto vEdge = [n](int i, int j) { return 2 * (static_cast<long>(i) * n + j) + 1; };
  auto positive = [&](int i, int j) { return im(i, j) >= 0.0; };
  auto cross = [&](int i0, int j0, int i1, int j1) {
    const double f0 = im(i0, j0), f1 = im(i1, j1);
    const double s = f0 / (f0 - f1);
    const Vec2d p0(lat.kx(i0), lat.ky(j0)), p1(lat.kx(i1), lat.ky(j1));
    return Vec2d(p0 + s * (p1 - p0));
  };

  std::vector<Segment> bulk, imag;
  for (int i = 0; i + 1 < gridN; ++i) {
    for (int j = 0; j + 1 < gridN; ++j) {
      // Cell edges in order: bottom (j), right (i+1), top (j+1), left (i).
      struct Hit {
        long id;
        Vec2d p;
      };
      std::vector<Hit> hits;
      if (positive(i, j) != positive(i + 1, j)) hits.push_back({hEdge(i, j), cross(i, j, i + 1, j)});
      if (positive(i + 1, j) != positive(i + 1, j + 1))
        hits.push_back({vEdge(i + 1, j), cross(i + 1, j, i + 1, j + 1)});
      if (positive(i, j + 1) != positive(i + 1, j + 1))
        hits.push_back({hEdge(i, j + 1), cross(i, j + 1, i + 1, j + 1)});
      if (positive(i, j) != positive(i, j + 1)) hits.push_back({vEdge(i, j), cross(i, j, i, j + 1)});
      if (hits.empty()) continue;

      std::vector<std::pair<Hit, Hit>> pairs;
      if (hits.size() == 2) {
        pairs.push_back({hits[0], hits[1]});
      } else {
        // Saddle: the centre value decides which corners connect.
        const double centre = 0.25 * (im(i, j) + im(i + 1, j) + im(i, j + 1) + im(i + 1, j + 1));
        if ((centre >= 0.0) == positive(i, j)) {
          pairs.push_back({hits[0], hits[1]});
          pairs.push_back({hits[2], hits[3]});
        } else {
          pairs.push_back({hits[0], hits[3]});
          pairs.push_back({hits[1], hits[2]});
        }
      }
      for (const auto& [h0, h1] : pairs) {
        const Vec2d mid = 0.5 * (h0.p + h1.p);
        const double re = evaluate_field(m, mid).E2().real();
        Segment s{h0.id, h1.id, h0.p, h1.p};
        (re <= 0.0 ? bulk : imag).push_back(s);
      }
    }
  }
  arcs.bulk = chain_segments(bulk);
  arcs.imaginary = chain_segments(imag);
  return arcs;
}

BandGrid band_surfaces(const ModelSpec<double>& m, const KWindow& window, int gridN) {
  if (gridN < 2) throw std::invalid_argument("band grid must be at least 2");
  check_window(window);
  const Lattice lat{window, gridN};
  BandGrid g;
  g.rePlus.resize(gridN, gridN);
  g.imPlus.resize(gridN, gridN);
  g.reMinus.resize(gridN, gridN);
  g.imMinus.resize(gridN, gridN);
  for (int i = 0; i < gridN; ++i) g.kx.push_back(lat.kx(i));
  for (int j = 0; j < gridN; ++j) g.ky.push_back(lat.ky(j));
  for (int i = 0; i < gridN; ++i) {
    for (int j = 0; j < gridN; ++j) {
      const auto f = evaluate_field(m, Vec2d(g.kx[i], g.ky[j]));
      const auto E = std::sqrt(f.E2());
      g.rePlus(i, j) = (f.H0 + E).real();
      g.imPlus(i, j) = (f.H0 + E).imag();
      g.reMinus(i, j) = (f.H0 - E).real();
      g.imMinus(i, j) = (f.H0 - E).imag();
    }
  }
  return g;
}

}  // namespace nhzbw
