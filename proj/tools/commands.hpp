#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhzbw/model.hpp"

namespace nhzbw::cli {

/// Bad input detected before any computation (exit code 1).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Collects written files so the manifest can list them.
struct Output {
  std::filesystem::path dir;
  std::vector<std::string> files;
  std::filesystem::path file(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }
};

struct BandsArgs {
  std::vector<double> window{-2, 2, -2, 2};
  int grid = 256;
  int seedGrid = 64;
  double epTol = 0;  // 0 picks a tolerance from the field scale
};

struct EpsArgs {
  std::vector<double> window{-2, 2, -2, 2};
  int seedGrid = 64;
  double epTol = 0;
  std::vector<std::vector<double>> points;
  double classTol = 0;  // 0: 1e-9 for Dirac, 1e-7 eV for the polariton
};

struct PointArgs {
  double kx = 0, ky = 0;
  std::vector<double> s0{0, 0, 1};
  double tEnd = 10;
  int samples = 1001;
};

struct SpinArgs {
  PointArgs point;
  std::vector<std::string> methods{"exact"};
  double dt = 0;  // 0 means tEnd/2000
};

struct ZbwArgs {
  PointArgs point;
  std::string formula = "state";
};

struct PacketArgs {
  PointArgs point;
  double sigma = 0.005;
  int gridN = 128;
  double halfWidth = 0;
};

struct SpectrumArgs {
  PacketArgs packet;
  std::string source = "wavepacket";
  std::string input;
  std::string component = "vx";
  std::string window = "hann";
  double omegaR = 0;
  int harmonics = 4;
  double prominence = 5;
};

struct QgtArgs {
  std::vector<double> window{-2, 2, -2, 2};
  int grid = 128;
};

ModelSpec<double> resolve_model(const std::string& path);

void run_bands(const ModelSpec<double>& m, const BandsArgs& a, Output& out, nlohmann::json& results);
void run_eps(const ModelSpec<double>& m, const EpsArgs& a, Output& out, nlohmann::json& results);
void run_spin(const ModelSpec<double>& m, const SpinArgs& a, Output& out, nlohmann::json& results);
void run_zbw(const ModelSpec<double>& m, const ZbwArgs& a, Output& out, nlohmann::json& results);
void run_wavepacket(const ModelSpec<double>& m, const PacketArgs& a, int threads, Output& out,
                    nlohmann::json& results);
void run_spectrum(const ModelSpec<double>* m, const SpectrumArgs& a, int threads, Output& out,
                  nlohmann::json& results);
void run_compare(const ModelSpec<double>& m, const PacketArgs& a, int threads, Output& out,
                 nlohmann::json& results);
void run_qgt(const ModelSpec<double>& m, const QgtArgs& a, int threads, Output& out, nlohmann::json& results);

}  // namespace nhzbw::cli
