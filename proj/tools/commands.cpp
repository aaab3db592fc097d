#include "commands.hpp"

#include <cmath>
#include <cstdio>

#include "nhzbw/analysis.hpp"
#include "nhzbw/config.hpp"
#include "nhzbw/geometry.hpp"
#include "nhzbw/output.hpp"
#include "nhzbw/parallel.hpp"
#include "nhzbw/semiclassics.hpp"
#include "nhzbw/wavepacket.hpp"

namespace nhzbw::cli {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

KWindow check_window(const std::vector<double>& w) {
  require(w.size() == 4, "--window expects kx_min,kx_max,ky_min,ky_max");
  require(w[0] < w[1] && w[2] < w[3], "--window bounds must satisfy min < max");
  return {w[0], w[1], w[2], w[3]};
}

Vec3d check_point(const PointArgs& p) {
  require(p.tEnd > 0, "--t-end must be positive");
  require(p.samples >= 2, "--samples must be at least 2");
  require(p.s0.size() == 3, "--s0 expects x,y,z");
  const Vec3d s(p.s0[0], p.s0[1], p.s0[2]);
  require(s.norm() > 0, "--s0 must be non-zero");
  return s.normalized();
}

/// Polariton losses must keep both bands decaying on every momentum used.
void check_losses(const ModelSpec<double>& m, const std::vector<Vec2d>& ks) {
  if (m.kind != ModelKind::Polariton) return;
  for (const auto& k : ks) {
    const auto es = eigensystem(evaluate_field(m, k));
    char buf[160];
    std::snprintf(buf, sizeof buf, "polariton band gains at k = (%.6g, %.6g): Im E+ = %.3g, Im E- = %.3g", k.x(),
                  k.y(), es.Eplus.imag(), es.Eminus.imag());
    require(es.Eplus.imag() < 0 && es.Eminus.imag() < 0, buf);
  }
}

std::vector<Vec2d> packet_window(const Vec2d& kc, double W) {
  std::vector<Vec2d> ks;
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j) ks.push_back(kc + Vec2d(W * i / 4, W * j / 4));
  return ks;
}

double auto_ep_tol(const ModelSpec<double>& m, const KWindow& w, int n) {
  double peak = 0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const Vec2d k(w.kxMin + (w.kxMax - w.kxMin) * i / n, w.kyMin + (w.kyMax - w.kyMin) * j / n);
      peak = std::max(peak, std::abs(evaluate_field(m, k).E2()));
    }
  return 1e-12 * peak;
}

nlohmann::json point_json(const Vec2d& k) { return nlohmann::json::array({k.x(), k.y()}); }

PlotSeries series(const std::string& label, const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color) {
  PlotSeries s;
  s.label = label;
  s.x = x;
  s.y = y;
  s.color = color;
  return s;
}

ScenarioParams scenario_params(const PacketArgs& a, const Vec3d& S0, int threads) {
  ScenarioParams p;
  p.kc = Vec2d(a.point.kx, a.point.ky);
  p.sigma = a.sigma;
  p.S0 = S0;
  p.tEnd = a.point.tEnd;
  p.samples = a.point.samples;
  p.n = a.gridN;
  p.halfWidth = a.halfWidth;
  p.threads = threads;
  return p;
}

Vec3d check_packet(const ModelSpec<double>& m, const PacketArgs& a) {
  const Vec3d S0 = check_point(a.point);
  require(a.sigma > 0, "--sigma must be positive");
  require(a.gridN >= 64, "--grid-n must be at least 64");
  require(a.halfWidth == 0 || a.halfWidth >= 6 * a.sigma, "--half-width must be 0 or at least 6 sigma");
  require(a.point.samples >= 5, "--samples must be at least 5 for a wavepacket run");
  const double W = a.halfWidth > 0 ? a.halfWidth : 6 * a.sigma;
  check_losses(m, packet_window(Vec2d(a.point.kx, a.point.ky), W));
  return S0;
}

void velocity_plot(const std::filesystem::path& path, const std::string& title, const std::vector<double>& t,
                   const std::vector<Vec2d>& v) {
  std::vector<double> vx, vy;
  for (const auto& u : v) {
    vx.push_back(u.x());
    vy.push_back(u.y());
  }
  LinePlot plot;
  plot.title = title;
  plot.xLabel = "t";
  plot.yLabel = "velocity";
  plot.series = {series("vx", t, vx, "#1f77b4"), series("vy", t, vy, "#d62728")};
  render_line_plot(path, plot);
}

}  // namespace

ModelSpec<double> resolve_model(const std::string& path) { return load_model(path); }

void run_bands(const ModelSpec<double>& m, const BandsArgs& a, Output& out, nlohmann::json& results) {
  const KWindow w = check_window(a.window);
  require(a.grid >= 64, "--grid must be at least 64");
  require(a.seedGrid >= 16, "--seed-grid must be at least 16");
  require(a.epTol >= 0, "--ep-tol must be non-negative");

  const auto grid = band_surfaces(m, w, a.grid);
  const auto arcs = trace_fermi_arcs(m, w, a.grid);
  const double tol = a.epTol > 0 ? a.epTol : auto_ep_tol(m, w, a.seedGrid);
  const auto eps = find_exceptional_points(m, w, a.seedGrid, tol);

  write_csv(out.file("re_plus.csv"), band_table(grid, grid.rePlus));
  write_csv(out.file("im_plus.csv"), band_table(grid, grid.imPlus));
  write_csv(out.file("re_minus.csv"), band_table(grid, grid.reMinus));
  write_csv(out.file("im_minus.csv"), band_table(grid, grid.imMinus));
  write_json(out.file("arcs.json"), arcs_json(eps, arcs));
  render_band_plot(out.file("bands_re_plus.svg"), "Re E+", grid, grid.rePlus, eps, arcs);
  render_band_plot(out.file("bands_im_plus.svg"), "Im E+", grid, grid.imPlus, eps, arcs);

  results["ep_tol"] = tol;
  results["exceptional_points"] = arcs_json(eps, arcs)["exceptional_points"];
  results["bulk_arc_polylines"] = arcs.bulk.size();
  results["imaginary_arc_polylines"] = arcs.imaginary.size();
}

void run_eps(const ModelSpec<double>& m, const EpsArgs& a, Output& out, nlohmann::json& results) {
  const KWindow w = check_window(a.window);
  require(a.seedGrid >= 16, "--seed-grid must be at least 16");
  require(a.epTol >= 0, "--ep-tol must be non-negative");
  require(a.classTol >= 0, "--class-tol must be non-negative");
  const double classTol = a.classTol > 0 ? a.classTol : (m.kind == ModelKind::Dirac ? 1e-9 : 1e-7);

  const double tol = a.epTol > 0 ? a.epTol : auto_ep_tol(m, w, a.seedGrid);
  const auto eps = find_exceptional_points(m, w, a.seedGrid, tol);
  Table t{{"kx", "ky", "abs_E2"}, {}};
  for (const auto& k : eps) t.rows.push_back({k.x(), k.y(), std::abs(evaluate_field(m, k).E2())});
  write_csv(out.file("eps.csv"), t);

  nlohmann::json classes = nlohmann::json::array();
  for (const auto& p : a.points) {
    const auto pc = classify_point(m, Vec2d(p[0], p[1]), classTol);
    classes.push_back({{"k", {p[0], p[1]}},
                       {"tag", to_string(pc.tag)},
                       {"abs_E", pc.absE},
                       {"abs_re_E", pc.absReE},
                       {"abs_im_E", pc.absImE}});
  }
  nlohmann::json doc = {{"ep_tol", tol}, {"exceptional_points", nlohmann::json::array()}, {"classified", classes}};
  for (const auto& k : eps) doc["exceptional_points"].push_back(point_json(k));
  write_json(out.file("eps.json"), doc);
  results = doc;
}

void run_spin(const ModelSpec<double>& m, const SpinArgs& a, Output& out, nlohmann::json& results) {
  const Vec3d S0 = check_point(a.point);
  require(a.dt >= 0, "--dt must be non-negative");
  require(!a.methods.empty(), "--method needs at least one value");
  const Vec2d k(a.point.kx, a.point.ky);
  check_losses(m, {k});
  const auto f = evaluate_field(m, k);
  const double hbar = m.hbar();
  const bool hermitian = f.H.imag().norm() == 0 && f.H0.imag() == 0;
  for (const auto& method : a.methods) {
    if (method != "closed" || hermitian) continue;
    require(f.H.z() == std::complex<double>(0), "closed form needs an in-plane field (H_z = 0)");
    require((S0 - Vec3d(0, 0, 1)).norm() <= 1e-12, "non-Hermitian closed form is only available for s0 = 0,0,1");
    require(std::abs(f.E2()) > 0 && std::abs(f.H.x() - std::complex<double>(0, 1) * f.H.y()) > 0,
            "closed form is undefined at this momentum");
  }

  const auto times = uniform_times(a.point.tEnd, a.point.samples);
  std::vector<std::string> done;
  std::vector<SpinTrajectory<double>> trs;
  for (const auto& method : a.methods) {
    if (std::find(done.begin(), done.end(), method) != done.end()) continue;
    SpinTrajectory<double> tr;
    if (method == "exact") {
      tr = spin_trajectory_exact(f, spinor_from_pseudospin(S0), times, hbar);
    } else if (method == "ode") {
      const double dtReq = a.dt > 0 ? a.dt : a.point.tEnd / 2000;
      const double spacing = a.point.tEnd / (a.point.samples - 1);
      const long stride = std::max<long>(1, static_cast<long>(std::ceil(spacing / dtReq - 1e-9)));
      const auto full = spin_trajectory_ode(f, S0, a.point.tEnd, spacing / stride, hbar);
      tr.times = times;
      for (std::size_t n = 0; n < times.size(); ++n) {
        tr.S.push_back(full.S[n * stride]);
        tr.norm.push_back(full.norm[n * stride]);
      }
      results["ode_step"] = spacing / stride;
    } else {
      tr = hermitian ? spin_closed_form_hermitian(Vec3d(f.H.real()), S0, times, hbar)
                     : spin_closed_form_inplane(f, times, hbar);
    }
    write_csv(out.file("spin_" + method + ".csv"), spin_table(tr));
    done.push_back(method);
    trs.push_back(std::move(tr));
  }

  if (trs.size() > 1) {
    Table dev{{"t"}, {}};
    for (std::size_t m2 = 1; m2 < trs.size(); ++m2) dev.header.push_back("dev_" + done[m2]);
    std::vector<double> sup(trs.size(), 0.0);
    for (std::size_t n = 0; n < times.size(); ++n) {
      std::vector<double> row{times[n]};
      for (std::size_t m2 = 1; m2 < trs.size(); ++m2) {
        const double d = (trs[m2].S[n] - trs[0].S[n]).norm();
        sup[m2] = std::max(sup[m2], d);
        row.push_back(d);
      }
      dev.rows.push_back(row);
    }
    write_csv(out.file("spin_deviation.csv"), dev);
    for (std::size_t m2 = 1; m2 < trs.size(); ++m2)
      results["sup_deviation"][done[m2] + "_vs_" + done[0]] = sup[m2];
  }

  std::vector<double> sx, sy, sz;
  for (const auto& S : trs[0].S) {
    sx.push_back(S.x());
    sy.push_back(S.y());
    sz.push_back(S.z());
  }
  LinePlot plot;
  plot.title = "pseudospin (" + done[0] + ")";
  plot.xLabel = "t";
  plot.yLabel = "S";
  plot.series = {series("Sx", times, sx, "#1f77b4"), series("Sy", times, sy, "#d62728"),
                 series("Sz", times, sz, "#2ca02c")};
  render_line_plot(out.file("spin.svg"), plot);
  results["final_S"] = {trs[0].S.back().x(), trs[0].S.back().y(), trs[0].S.back().z()};
}

void run_zbw(const ModelSpec<double>& m, const ZbwArgs& a, Output& out, nlohmann::json& results) {
  const Vec3d S0 = check_point(a.point);
  const Vec2d k(a.point.kx, a.point.ky);
  check_losses(m, {k});
  const auto f = evaluate_field(m, k);
  VelocityFormula formula = VelocityFormula::State;
  if (a.formula == "general") {
    formula = VelocityFormula::General;
  } else if (a.formula == "metric") {
    formula = VelocityFormula::Metric;
    require(f.H.z() == std::complex<double>(0), "metric formula needs an in-plane field (H_z = 0)");
    require(std::abs(std::sqrt(f.E2())) > kCoalescenceTol * f.scale(), "metric formula diverges at an exceptional point");
  } else if (a.formula == "arc") {
    formula = VelocityFormula::Arc;
    require(m.kind == ModelKind::Dirac, "arc formula is specific to the Dirac model");
    const auto tag = classify_point(m, k, 1e-9).tag;
    require(tag == PointTag::BulkFermiArc || tag == PointTag::ImaginaryFermiArc,
            "arc formula needs a momentum on a Fermi arc");
    require(k.y() == 0, "arc formula needs k_y = 0");
  }

  const auto tr = com_trajectory(m, k, S0, a.point.tEnd, a.point.samples, formula);
  write_csv(out.file("com.csv"), com_table(tr));
  velocity_plot(out.file("com.svg"), "semiclassical velocity (" + a.formula + ")", tr.times, tr.velocities);
  results["final_position"] = {tr.positions.back().x(), tr.positions.back().y()};
}

void run_wavepacket(const ModelSpec<double>& m, const PacketArgs& a, int threads, Output& out,
                    nlohmann::json& results) {
  const Vec3d S0 = check_packet(m, a);
  const auto s = run_scenario(m, scenario_params(a, S0, threads));
  write_csv(out.file("wavepacket.csv"), wavepacket_table(s));
  velocity_plot(out.file("wavepacket.svg"), "wavepacket group velocity", s.times, s.velocity);
  results["final_com"] = {s.com.back().x(), s.com.back().y()};
  results["final_norm"] = s.norm.back();
}

void run_spectrum(const ModelSpec<double>* m, const SpectrumArgs& a, int threads, Output& out,
                  nlohmann::json& results) {
  require(a.harmonics >= 1, "--harmonics must be at least 1");
  require(a.prominence > 0, "--prominence must be positive");
  require(a.omegaR >= 0, "--omega-r must be non-negative");
  std::vector<double> t, y;
  double omegaR = a.omegaR;
  const Vec2d kc(a.packet.point.kx, a.packet.point.ky);

  if (!a.input.empty()) {
    require(omegaR > 0 || m, "--input without --model-config needs --omega-r");
    const Table in = read_csv(a.input);
    const auto tc = std::find(in.header.begin(), in.header.end(), "t");
    const auto vc = std::find(in.header.begin(), in.header.end(), a.component);
    require(tc != in.header.end(), "input '" + a.input + "' has no t column");
    require(vc != in.header.end(), "input '" + a.input + "' has no column '" + a.component + "'");
    for (const auto& row : in.rows) {
      t.push_back(row[tc - in.header.begin()]);
      y.push_back(row[vc - in.header.begin()]);
    }
  } else {
    require(m != nullptr, "--model-config is required unless --input is given");
    require(a.component == "vx" || a.component == "vy", "--component must be vx or vy");
    const int d = a.component == "vx" ? 0 : 1;
    if (a.source == "wavepacket") {
      const Vec3d S0 = check_packet(*m, a.packet);
      const auto s = run_scenario(*m, scenario_params(a.packet, S0, threads));
      write_csv(out.file("wavepacket.csv"), wavepacket_table(s));
      t = s.times;
      for (const auto& v : s.velocity) y.push_back(v[d]);
    } else {
      const Vec3d S0 = check_point(a.packet.point);
      check_losses(*m, {kc});
      const auto tr = com_trajectory(*m, kc, S0, a.packet.point.tEnd, a.packet.point.samples);
      write_csv(out.file("com.csv"), com_table(tr));
      t = tr.times;
      for (const auto& v : tr.velocities) y.push_back(v[d]);
    }
  }
  require(t.size() >= 64, "spectrum needs at least 64 samples");
  if (omegaR == 0 && m) omegaR = 2 * std::abs(std::sqrt(evaluate_field(*m, kc).E2()).real()) / m->hbar();

  SpectrumOptions opt;
  opt.window = a.window == "hann" ? Window::Hann : Window::None;
  const Spectrum spec = fft_spectrum(t, y, opt);
  write_csv(out.file("spectrum.csv"), spectrum_table(spec));

  nlohmann::json h = {{"omega_r", omegaR}, {"resolution", spec.resolution}, {"peaks", nlohmann::json::array()}};
  LinePlot plot;
  plot.title = "spectrum of " + a.component;
  plot.xLabel = "omega";
  plot.yLabel = "|FFT|";
  plot.series = {series("", spec.frequencies, spec.amplitudes, "#1f77b4")};
  if (omegaR > 0) {
    const auto report = find_harmonics(spec, omegaR, a.harmonics, a.prominence);
    h["median"] = report.median;
    for (const auto& p : report.peaks) {
      h["peaks"].push_back({{"n", p.n},
                            {"found", p.found},
                            {"omega", p.omega},
                            {"amplitude", p.amplitude},
                            {"matched", p.matched}});
      plot.verticalLines.push_back(p.n * omegaR);
    }
  }
  write_json(out.file("harmonics.json"), h);
  render_line_plot(out.file("spectrum.svg"), plot);
  results = h;
}

void run_compare(const ModelSpec<double>& m, const PacketArgs& a, int threads, Output& out,
                 nlohmann::json& results) {
  const Vec3d S0 = check_packet(m, a);
  const Vec2d kc(a.point.kx, a.point.ky);
  const auto sc = com_trajectory(m, kc, S0, a.point.tEnd, a.point.samples);
  const auto wp = run_scenario(m, scenario_params(a, S0, threads));
  write_csv(out.file("semiclassical.csv"), com_table(sc));
  write_csv(out.file("wavepacket.csv"), wavepacket_table(wp));

  double supVec = 0, scaleVec = 0;
  double sup[2] = {0, 0}, sq[2] = {0, 0};
  for (std::size_t n = 0; n < sc.times.size(); ++n) {
    const Vec2d d = wp.velocity[n] - sc.velocities[n];
    supVec = std::max(supVec, d.norm());
    scaleVec = std::max(scaleVec, sc.velocities[n].norm());
    for (int c = 0; c < 2; ++c) {
      sup[c] = std::max(sup[c], std::abs(d[c]));
      sq[c] += d[c] * d[c];
    }
  }
  const double L = static_cast<double>(sc.times.size());
  nlohmann::json dev = {{"vx", {{"sup", sup[0]}, {"rms", std::sqrt(sq[0] / L)}}},
                        {"vy", {{"sup", sup[1]}, {"rms", std::sqrt(sq[1] / L)}}},
                        {"sup_relative", scaleVec > 0 ? supVec / scaleVec : 0.0}};
  write_json(out.file("deviation.json"), dev);

  std::vector<double> a1, a2, b1, b2;
  for (std::size_t n = 0; n < sc.times.size(); ++n) {
    a1.push_back(sc.velocities[n].x());
    a2.push_back(sc.velocities[n].y());
    b1.push_back(wp.velocity[n].x());
    b2.push_back(wp.velocity[n].y());
  }
  LinePlot plot;
  plot.title = "semiclassics vs wavepacket";
  plot.xLabel = "t";
  plot.yLabel = "velocity";
  plot.series = {series("vx semiclassical", sc.times, a1, "#1f77b4"), series("vy semiclassical", sc.times, a2, "#d62728")};
  auto p1 = series("vx wavepacket", wp.times, b1, "#17becf");
  auto p2 = series("vy wavepacket", wp.times, b2, "#ff7f0e");
  p1.markers = p2.markers = true;
  plot.series.push_back(p1);
  plot.series.push_back(p2);
  render_line_plot(out.file("compare.svg"), plot);
  results = dev;
}

void run_qgt(const ModelSpec<double>& m, const QgtArgs& a, int threads, Output& out, nlohmann::json& results) {
  const KWindow w = check_window(a.window);
  require(a.grid >= 2, "--grid must be at least 2");
  const int n = a.grid;
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n) * n);
  std::vector<char> ok(rows.size(), 0);
  parallel_for(rows.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      const int i = static_cast<int>(idx) / n, j = static_cast<int>(idx) % n;
      const Vec2d k(w.kxMin + (w.kxMax - w.kxMin) * i / (n - 1), w.kyMin + (w.kyMax - w.kyMin) * j / (n - 1));
      try {
        const auto g = lr_metric_general(evaluate_field(m, k));
        rows[idx] = {k.x(), k.y(), g.plus(0, 0).real(), g.plus(0, 0).imag(), g.plus(1, 1).real(), g.plus(1, 1).imag()};
        ok[idx] = 1;
      } catch (const std::domain_error&) {
      }
    }
  });
  Table t{{"kx", "ky", "re_gxx", "im_gxx", "re_gyy", "im_gyy"}, {}};
  std::size_t skipped = 0;
  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    if (ok[idx])
      t.rows.push_back(rows[idx]);
    else
      ++skipped;
  }
  write_csv(out.file("qgt.csv"), t);
  results["skipped_near_exceptional_points"] = skipped;
}

}  // namespace nhzbw::cli
