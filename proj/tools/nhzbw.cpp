// Scenario runner: one subcommand per task, flags override scenario keys.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>

#include "commands.hpp"
#include "nhzbw/config.hpp"
#include "nhzbw/output.hpp"

namespace fs = std::filesystem;
using namespace nhzbw;
using namespace nhzbw::cli;

namespace {

const std::set<std::string> kTasks = {"bands", "eps", "spin", "zbw", "wavepacket", "spectrum", "compare", "qgt"};

CLI::Validator finite_number() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          parse_number(s, "flag value");
        } catch (const ConfigError& e) {
          return e.what();
        }
        return {};
      },
      "NUMBER");
}

std::string flag_of(const std::string& key) {
  std::string f = "--" + key;
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

std::string name_of(const std::string& token) {
  const auto eq = token.find('=');
  return eq == std::string::npos ? token : token.substr(0, eq);
}

struct Prepass {
  std::vector<std::string> args;
  std::string scenario;
};

/// Pulls --scenario out of argv and splices its keys in as flags, skipping
/// any flag the user already passed. A missing subcommand is taken from the
/// scenario's `task` key.
Prepass merge_scenario(CLI::App& app, int argc, char** argv) {
  Prepass p;
  std::vector<std::string> rest;
  for (int i = 1; i < argc; ++i) {
    const std::string tok = argv[i];
    if (tok == "--scenario") {
      if (i + 1 >= argc) throw ValidationError("--scenario needs a file name");
      p.scenario = argv[++i];
    } else if (tok.rfind("--scenario=", 0) == 0) {
      p.scenario = tok.substr(11);
    } else {
      rest.push_back(tok);
    }
  }
  if (!rest.empty() && rest.front().rfind("-", 0) != 0 && !kTasks.count(rest.front()))
    throw ValidationError("unknown subcommand '" + rest.front() + "'");
  if (p.scenario.empty()) {
    p.args = rest;
    return p;
  }

  const KeyValues kv = read_key_values(p.scenario);
  std::string task;
  if (const auto* t = kv.find("task")) task = *t;
  std::string sub = !rest.empty() && kTasks.count(rest.front()) ? rest.front() : "";
  if (sub.empty()) {
    if (task.empty()) throw ValidationError("no subcommand given and scenario '" + p.scenario + "' has no task key");
    if (!kTasks.count(task)) throw ValidationError("unknown task '" + task + "' in " + p.scenario);
    sub = task;
    rest.insert(rest.begin(), sub);
  } else if (!task.empty() && task != sub) {
    throw ValidationError("scenario task '" + task + "' does not match subcommand '" + sub + "'");
  }

  std::set<std::string> given;
  for (const auto& tok : rest)
    if (tok.rfind("--", 0) == 0) given.insert(name_of(tok));

  CLI::App* subApp = app.get_subcommand(sub);
  const fs::path base = fs::path(p.scenario).parent_path();
  for (const auto& [key, value] : kv.entries) {
    if (key == "task") continue;
    const std::string flag = flag_of(key);
    if (!subApp->get_option_no_throw(flag) && !app.get_option_no_throw(flag))
      throw ValidationError("unknown key '" + key + "' in " + p.scenario + " for task " + sub);
    if (given.count(flag)) continue;
    std::string v = value;
    if (key == "model_config" || key == "input") {
      const fs::path path(value);
      if (path.is_relative()) v = (base / path).lexically_normal().string();
    }
    rest.push_back(flag);
    rest.push_back(v);
  }
  p.args = rest;
  return p;
}

void add_point(CLI::App* s, PointArgs& p) {
  s->add_option("--kx", p.kx, "momentum x")->check(finite_number());
  s->add_option("--ky", p.ky, "momentum y")->check(finite_number());
  s->add_option("--s0", p.s0, "initial pseudospin x,y,z")->delimiter(',')->expected(3)->check(finite_number());
  s->add_option("--t-end", p.tEnd, "final time")->check(finite_number());
  s->add_option("--samples", p.samples, "number of output times");
}

void add_packet(CLI::App* s, PacketArgs& p) {
  add_point(s, p.point);
  s->add_option("--sigma", p.sigma, "Gaussian width in k")->check(finite_number());
  s->add_option("--grid-n", p.gridN, "lattice points per side");
  s->add_option("--half-width", p.halfWidth, "lattice half-width (0 means 6 sigma)")->check(finite_number());
}

nlohmann::json resolved_options(const CLI::App* sub) {
  nlohmann::json cfg = nlohmann::json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->count() > 0) {
      std::string joined;
      for (const auto& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
      cfg[name] = joined;
    } else {
      cfg[name] = opt->get_default_str();
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Hermitian zitterbewegung toolkit"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  std::string out, modelConfig;
  int threads = 0;
  BandsArgs bands;
  EpsArgs eps;
  SpinArgs spin;
  ZbwArgs zbw;
  PacketArgs packet;
  SpectrumArgs spectrum;
  PacketArgs compare;
  QgtArgs qgt;

  auto common = [&](CLI::App* s, bool needsModel = true) {
    s->add_option("--out", out, "output directory")->required();
    s->add_option("--threads", threads, "worker threads (0 = hardware count)")->check(CLI::NonNegativeNumber);
    auto* m = s->add_option("--model-config", modelConfig, "model key/value file");
    if (needsModel) m->required();
  };
  auto window = [](CLI::App* s, std::vector<double>& w) {
    s->add_option("--window", w, "kx_min,kx_max,ky_min,ky_max")->delimiter(',')->expected(4)->check(finite_number());
  };

  auto* sBands = app.add_subcommand("bands", "complex band structure, arcs and exceptional points");
  common(sBands);
  window(sBands, bands.window);
  sBands->add_option("--grid", bands.grid, "band lattice size");
  sBands->add_option("--seed-grid", bands.seedGrid, "Newton seed lattice size");
  sBands->add_option("--ep-tol", bands.epTol, "|E^2| acceptance (0 = automatic)")->check(finite_number());

  auto* sEps = app.add_subcommand("eps", "exceptional points and point classification");
  common(sEps);
  window(sEps, eps.window);
  sEps->add_option("--seed-grid", eps.seedGrid, "Newton seed lattice size");
  sEps->add_option("--ep-tol", eps.epTol, "|E^2| acceptance (0 = automatic)")->check(finite_number());
  std::vector<std::string> pointTokens;
  sEps->add_option("--point", pointTokens, "kx,ky to classify (repeatable)");
  sEps->add_option("--class-tol", eps.classTol, "classification tolerance (0 = model default)")->check(finite_number());

  auto* sSpin = app.add_subcommand("spin", "pseudospin dynamics at one momentum");
  common(sSpin);
  add_point(sSpin, spin.point);
  sSpin->add_option("--method", spin.methods, "exact, ode or closed (repeatable)")
      ->delimiter(',')
      ->check(CLI::IsMember({"exact", "ode", "closed"}));
  sSpin->add_option("--dt", spin.dt, "RK4 step (0 = t_end/2000)")->check(finite_number());

  auto* sZbw = app.add_subcommand("zbw", "semiclassical centre-of-mass trajectory");
  common(sZbw);
  add_point(sZbw, zbw.point);
  sZbw->add_option("--formula", zbw.formula, "state, general, metric or arc")
      ->check(CLI::IsMember({"state", "general", "metric", "arc"}));

  auto* sPacket = app.add_subcommand("wavepacket", "narrow wavepacket simulation");
  common(sPacket);
  add_packet(sPacket, packet);

  auto* sSpectrum = app.add_subcommand("spectrum", "Fourier spectrum and harmonics of a velocity trace");
  common(sSpectrum, false);
  add_packet(sSpectrum, spectrum.packet);
  sSpectrum->add_option("--source", spectrum.source, "wavepacket or semiclassical")
      ->check(CLI::IsMember({"wavepacket", "semiclassical"}));
  sSpectrum->add_option("--input", spectrum.input, "analyse a CSV with a t column instead");
  sSpectrum->add_option("--component", spectrum.component, "column to analyse");
  sSpectrum->add_option("--window", spectrum.window, "hann or none")->check(CLI::IsMember({"hann", "none"}));
  sSpectrum->add_option("--omega-r", spectrum.omegaR, "base frequency (0 = 2 Re E / hbar)")->check(finite_number());
  sSpectrum->add_option("--harmonics", spectrum.harmonics, "highest harmonic to look for");
  sSpectrum->add_option("--prominence", spectrum.prominence, "peak/median threshold")->check(finite_number());

  auto* sCompare = app.add_subcommand("compare", "semiclassics against the wavepacket simulation");
  common(sCompare);
  add_packet(sCompare, compare);

  auto* sQgt = app.add_subcommand("qgt", "left-right quantum metric on a grid");
  common(sQgt);
  window(sQgt, qgt.window);
  sQgt->add_option("--grid", qgt.grid, "lattice size");

  Prepass pre;
  try {
    pre = merge_scenario(app, argc, argv);
    std::vector<std::string> rev(pre.args.rbegin(), pre.args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string task = sub->get_name();
  Output output{fs::path(out), {}};
  nlohmann::json results = nlohmann::json::object();

  ModelSpec<double> model;
  bool haveModel = false;
  try {
    if (!modelConfig.empty()) {
      model = resolve_model(modelConfig);
      haveModel = true;
    }
    for (const auto& tok : pointTokens) {
      std::vector<double> p;
      std::size_t start = 0;
      while (true) {
        const auto comma = tok.find(',', start);
        p.push_back(parse_number(tok.substr(start, comma - start), "--point"));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (p.size() != 2) throw ValidationError("--point expects kx,ky but got '" + tok + "'");
      eps.points.push_back(p);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    fs::create_directories(output.dir);
    if (task == "bands") run_bands(model, bands, output, results);
    if (task == "eps") run_eps(model, eps, output, results);
    if (task == "spin") run_spin(model, spin, output, results);
    if (task == "zbw") run_zbw(model, zbw, output, results);
    if (task == "wavepacket") run_wavepacket(model, packet, threads, output, results);
    if (task == "spectrum") run_spectrum(haveModel ? &model : nullptr, spectrum, threads, output, results);
    if (task == "compare") run_compare(model, compare, threads, output, results);
    if (task == "qgt") run_qgt(model, qgt, threads, output, results);

    nlohmann::json manifest;
    manifest["task"] = task;
    manifest["scenario"] = pre.scenario;
    manifest["config"] = resolved_options(sub);
    manifest["model"] = haveModel ? nlohmann::json(describe_model(model)) : nlohmann::json(nullptr);
    std::sort(output.files.begin(), output.files.end());
    manifest["files"] = output.files;
    manifest["results"] = results;
    write_json(output.dir / "manifest.json", manifest);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
