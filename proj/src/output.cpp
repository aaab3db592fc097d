#include "nhzbw/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nhzbw/config.hpp"

namespace nhzbw {

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string f2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

void write_csv(const std::filesystem::path& path, const Table& table) {
  auto out = open_out(path);
  for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw std::invalid_argument("row width does not match header for '" + path.string() + "'");
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << g17(row[c]);
    out << '\n';
  }
  finish(out, path);
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) return t;
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream rs(line);
    std::vector<double> row;
    for (std::string cell; std::getline(rs, cell, ',');)
      row.push_back(parse_number(cell, "CSV cell in " + path.string()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table spin_table(const SpinTrajectory<double>& tr) {
  Table t{{"t", "Sx", "Sy", "Sz", "norm"}, {}};
  for (std::size_t n = 0; n < tr.times.size(); ++n)
    t.rows.push_back({tr.times[n], tr.S[n].x(), tr.S[n].y(), tr.S[n].z(), tr.norm[n]});
  return t;
}

Table com_table(const ComTrajectory<double>& tr) {
  Table t{{"t", "x", "y", "vx", "vy", "Sx", "Sy", "Sz"}, {}};
  for (std::size_t n = 0; n < tr.times.size(); ++n)
    t.rows.push_back({tr.times[n], tr.positions[n].x(), tr.positions[n].y(), tr.velocities[n].x(),
                      tr.velocities[n].y(), tr.spins[n].x(), tr.spins[n].y(), tr.spins[n].z()});
  return t;
}

Table wavepacket_table(const TrajectorySeries& s) {
  Table t{{"t", "x", "y", "vx", "vy", "Sx", "Sy", "Sz", "norm"}, {}};
  for (std::size_t n = 0; n < s.times.size(); ++n)
    t.rows.push_back({s.times[n], s.com[n].x(), s.com[n].y(), s.velocity[n].x(), s.velocity[n].y(),
                      s.spin[n].x(), s.spin[n].y(), s.spin[n].z(), s.norm[n]});
  return t;
}

Table spectrum_table(const Spectrum& s) {
  Table t{{"omega", "amplitude"}, {}};
  for (std::size_t n = 0; n < s.frequencies.size(); ++n) t.rows.push_back({s.frequencies[n], s.amplitudes[n]});
  return t;
}

Table band_table(const BandGrid& g, const Eigen::MatrixXd& values) {
  Table t{{"kx", "ky", "value"}, {}};
  for (std::size_t i = 0; i < g.kx.size(); ++i)
    for (std::size_t j = 0; j < g.ky.size(); ++j)
      t.rows.push_back({g.kx[i], g.ky[j], values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
  return t;
}

nlohmann::json arcs_json(const std::vector<Vec2d>& eps, const FermiArcs& arcs) {
  auto points = [](const std::vector<Vec2d>& pts) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : pts) a.push_back({p.x(), p.y()});
    return a;
  };
  auto lines = [&](const std::vector<Polyline>& ls) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& l : ls) a.push_back(points(l));
    return a;
  };
  return {{"exceptional_points", points(eps)},
          {"bulk_arc", lines(arcs.bulk)},
          {"imaginary_arc", lines(arcs.imaginary)}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
  finish(out, path);
}

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 30, kTop = 40, kBottom = 60;

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

Frame fit(double x0, double x1, double y0, double y1) {
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  return {x0, x1, y0 - pad, y1 + pad};
}

void axes(std::ostream& o, const Frame& fr, const std::string& title, const std::string& xl,
          const std::string& yl) {
  o << "<rect x=\"" << f2(kLeft) << "\" y=\"" << f2(kTop) << "\" width=\"" << f2(kWidth - kLeft - kRight)
    << "\" height=\"" << f2(kHeight - kTop - kBottom) << "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (int n = 0; n <= 4; ++n) {
    const double xv = fr.x0 + (fr.x1 - fr.x0) * n / 4, yv = fr.y0 + (fr.y1 - fr.y0) * n / 4;
    char xs[32], ys[32];
    std::snprintf(xs, sizeof xs, "%.4g", xv);
    std::snprintf(ys, sizeof ys, "%.4g", yv);
    o << "<text x=\"" << f2(fr.px(xv)) << "\" y=\"" << f2(kHeight - kBottom + 18)
      << "\" font-size=\"11\" text-anchor=\"middle\">" << xs << "</text>\n";
    o << "<text x=\"" << f2(kLeft - 6) << "\" y=\"" << f2(fr.py(yv) + 4)
      << "\" font-size=\"11\" text-anchor=\"end\">" << ys << "</text>\n";
  }
  o << "<text x=\"" << f2(kWidth / 2) << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">" << esc(title)
    << "</text>\n";
  o << "<text x=\"" << f2((kLeft + kWidth - kRight) / 2) << "\" y=\"" << f2(kHeight - 16)
    << "\" font-size=\"13\" text-anchor=\"middle\">" << esc(xl) << "</text>\n";
  o << "<text x=\"18\" y=\"" << f2((kTop + kHeight - kBottom) / 2)
    << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << f2((kTop + kHeight - kBottom) / 2) << ")\">" << esc(yl) << "</text>\n";
}

void header(std::ostream& o) {
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
}

std::string colormap(double u) {
  // Linear blend through dark blue, teal, yellow.
  static const double stops[3][3] = {{48, 18, 108}, {33, 145, 140}, {253, 231, 37}};
  u = std::clamp(u, 0.0, 1.0);
  const int seg = u < 0.5 ? 0 : 1;
  const double w = u < 0.5 ? u * 2 : (u - 0.5) * 2;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(stops[seg][0] + w * (stops[seg + 1][0] - stops[seg][0]))),
                static_cast<int>(std::lround(stops[seg][1] + w * (stops[seg + 1][1] - stops[seg][1]))),
                static_cast<int>(std::lround(stops[seg][2] + w * (stops[seg + 1][2] - stops[seg][2]))));
  return buf;
}

}  // namespace

void render_line_plot(const std::filesystem::path& path, const LinePlot& plot) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series) {
    for (std::size_t n = 0; n < s.x.size(); ++n) {
      if (!std::isfinite(s.x[n]) || !std::isfinite(s.y[n])) continue;
      x0 = std::min(x0, s.x[n]);
      x1 = std::max(x1, s.x[n]);
      y0 = std::min(y0, s.y[n]);
      y1 = std::max(y1, s.y[n]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  const Frame fr = fit(x0, x1, y0, y1);
  std::ostringstream o;
  header(o);
  axes(o, fr, plot.title, plot.xLabel, plot.yLabel);
  for (double v : plot.verticalLines) {
    if (v < fr.x0 || v > fr.x1) continue;
    o << "<line x1=\"" << f2(fr.px(v)) << "\" y1=\"" << f2(kTop) << "\" x2=\"" << f2(fr.px(v)) << "\" y2=\""
      << f2(kHeight - kBottom) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  int legend = 0;
  for (const auto& s : plot.series) {
    if (s.markers) {
      const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 200);
      for (std::size_t n = 0; n < s.x.size(); n += stride)
        if (std::isfinite(s.y[n]))
          o << "<circle cx=\"" << f2(fr.px(s.x[n])) << "\" cy=\"" << f2(fr.py(s.y[n])) << "\" r=\"2\" fill=\""
            << s.color << "\"/>\n";
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t n = 0; n < s.x.size(); ++n)
        if (std::isfinite(s.y[n])) o << f2(fr.px(s.x[n])) << "," << f2(fr.py(s.y[n])) << " ";
      o << "\"/>\n";
    }
    if (!s.label.empty()) {
      const double ly = kTop + 16 + 16 * legend++;
      o << "<rect x=\"" << f2(kWidth - kRight - 150) << "\" y=\"" << f2(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
        << s.color << "\"/>\n<text x=\"" << f2(kWidth - kRight - 134) << "\" y=\"" << f2(ly)
        << "\" font-size=\"11\">" << esc(s.label) << "</text>\n";
    }
  }
  o << "</svg>\n";
  auto out = open_out(path);
  out << o.str();
  finish(out, path);
}

void render_band_plot(const std::filesystem::path& path, const std::string& title,
                      const BandGrid& grid, const Eigen::MatrixXd& values,
                      const std::vector<Vec2d>& eps, const FermiArcs& arcs) {
  const Frame fr{grid.kx.front(), grid.kx.back(), grid.ky.front(), grid.ky.back()};
  std::ostringstream o;
  header(o);
  const double lo = values.minCoeff(), hi = values.maxCoeff();
  const int nx = static_cast<int>(grid.kx.size()), ny = static_cast<int>(grid.ky.size());
  const int cells = std::min(64, std::min(nx, ny));
  const double cw = (kWidth - kLeft - kRight) / cells, ch = (kHeight - kTop - kBottom) / cells;
  for (int a = 0; a < cells; ++a) {
    for (int b = 0; b < cells; ++b) {
      const int i = std::min(nx - 1, (a * nx + nx / 2) / cells);
      const int j = std::min(ny - 1, (b * ny + ny / 2) / cells);
      const double u = hi > lo ? (values(i, j) - lo) / (hi - lo) : 0.5;
      o << "<rect x=\"" << f2(kLeft + a * cw) << "\" y=\"" << f2(kHeight - kBottom - (b + 1) * ch) << "\" width=\""
        << f2(cw + 0.3) << "\" height=\"" << f2(ch + 0.3) << "\" fill=\"" << colormap(u) << "\"/>\n";
    }
  }
  auto lines = [&](const std::vector<Polyline>& ls, const char* color) {
    for (const auto& l : ls) {
      if (l.size() == 1) {
        o << "<circle cx=\"" << f2(fr.px(l[0].x())) << "\" cy=\"" << f2(fr.py(l[0].y())) << "\" r=\"2.5\" fill=\""
          << color << "\"/>\n";
        continue;
      }
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2.5\" points=\"";
      for (const auto& p : l) o << f2(fr.px(p.x())) << "," << f2(fr.py(p.y())) << " ";
      o << "\"/>\n";
    }
  };
  lines(arcs.bulk, "#ff4fa3");
  lines(arcs.imaginary, "#8a2be2");
  for (const auto& p : eps)
    o << "<circle cx=\"" << f2(fr.px(p.x())) << "\" cy=\"" << f2(fr.py(p.y()))
      << "\" r=\"5\" fill=\"#2ca02c\" stroke=\"#000\"/>\n";
  axes(o, fr, title, "kx", "ky");
  o << "</svg>\n";
  auto out = open_out(path);
  out << o.str();
  finish(out, path);
}

}  // namespace nhzbw
