#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhzbw/analysis.hpp"
#include "nhzbw/semiclassics.hpp"
#include "nhzbw/spectrum.hpp"
#include "nhzbw/spin_dynamics.hpp"
#include "nhzbw/wavepacket.hpp"

namespace nhzbw {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Comma-separated, '\n' line endings, 17 significant digits.
void write_csv(const std::filesystem::path& path, const Table& table);
Table read_csv(const std::filesystem::path& path);

Table spin_table(const SpinTrajectory<double>& tr);
Table com_table(const ComTrajectory<double>& tr);
Table wavepacket_table(const TrajectorySeries& s);
Table spectrum_table(const Spectrum& s);
/// One band component on the k-lattice as kx,ky,value.
Table band_table(const BandGrid& g, const Eigen::MatrixXd& values);

nlohmann::json arcs_json(const std::vector<Vec2d>& eps, const FermiArcs& arcs);

/// Pretty-printed with sorted keys.
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  bool markers = false;  // dots instead of a polyline
};

struct LinePlot {
  std::string title, xLabel, yLabel;
  std::vector<PlotSeries> series;
  std::vector<double> verticalLines;  // dashed guides, e.g. n·ω_r
};

void render_line_plot(const std::filesystem::path& path, const LinePlot& plot);

/// Heat map of one band component with Fermi arcs and exceptional points.
void render_band_plot(const std::filesystem::path& path, const std::string& title,
                      const BandGrid& grid, const Eigen::MatrixXd& values,
                      const std::vector<Vec2d>& eps, const FermiArcs& arcs);

}  // namespace nhzbw
