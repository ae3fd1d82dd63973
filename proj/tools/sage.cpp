// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/error.hpp>
#include <sage/fields.hpp>
#include <sage/geometry.hpp>
#include <sage/io.hpp>
#include <sage/log.hpp>
#include <sage/presets.hpp>
#include <sage/sim.hpp>
#include <sage/svg.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void emit(const json& j) { std::printf("%s\n", j.dump().c_str()); }

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw sage::ConfigError("cannot write " + p.string());
  f << content;
}

sage::Scenario load_with_overrides(const std::string& path,
                                   const std::vector<std::string>& overrides, long seed,
                                   bool has_seed) {
  sage::Scenario sc = sage::load_scenario(path);
  if (!overrides.empty()) {
    json tree = sage::params_to_json(sc.params);
    for (const auto& kv : overrides) sage::apply_override(tree, kv);
    sc.params = sage::params_from_json(tree);
  }
  if (has_seed) sc.seed = seed;
  return sc;
}

struct MeanStd {
  double mean = 0.0, std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd r;
  if (xs.empty()) return r;
  r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.std = xs.size() > 1 ? std::sqrt(ss / (xs.size() - 1)) : 0.0;
  return r;
}

json ms_json(const MeanStd& m) { return json{{"mean", m.mean}, {"std", m.std}}; }

int cmd_solve(const std::string& scenario, const std::string& out,
              const std::vector<std::string>& overrides, bool plot) {
  const sage::Scenario sc = load_with_overrides(scenario, overrides, 0, false);
  fs::create_directories(out);

  const sage::SemanticGrid grid = sage::rasterize_scenario(sc);
  sage::FieldSynthesizer synth(sc.params);
  const sage::FieldStack stack = synth.synthesize(grid, 0.0);

  sage::io::GridFile gf;
  gf.origin = stack.origin;
  gf.resolution = stack.resolution;
  gf.width = stack.width;
  gf.height = stack.height;
  gf.stamp = stack.stamp;
  char name[32];
  for (int l = 0; l < stack.n_psi; ++l) {
    const auto li = static_cast<std::size_t>(l);
    std::snprintf(name, sizeof name, "h_%02d", l);
    gf.add(name, stack.s[li].h);
    std::snprintf(name, sizeof name, "f_%02d", l);
    gf.add(name, stack.s[li].f);
    std::snprintf(name, sizeof name, "vx_%02d", l);
    gf.add(name, stack.v[li].vx);
    std::snprintf(name, sizeof name, "vy_%02d", l);
    gf.add(name, stack.v[li].vy);
    std::snprintf(name, sizeof name, "dpsi_%02d", l);
    gf.add(name, stack.dpsi[li]);
    std::snprintf(name, sizeof name, "dhdt_%02d", l);
    gf.add(name, stack.dhdt[li]);
    std::snprintf(name, sizeof name, "free_%02d", l);
    gf.add(name, stack.free[li]);
    const sage::Domain dom =
        sage::build_domain(grid.cell_class, sc.params.geometry,
                           sc.params.fields.tangent_classes, sc.params.fields.lambda_tangent, l);
    std::snprintf(name, sizeof name, "flux_%02d", l);
    gf.add(name, sage::class_flux(dom, sc.params.fields.b_human, sc.params.fields.b_objects));
  }
  const fs::path grid_path = fs::path(out) / "fields.grid";
  sage::io::write_grid_file(grid_path.string(), gf);

  std::vector<std::string> files{grid_path.string()};
  if (plot) {
    sage::PlotOverlay ov;
    for (const auto& a : sc.agents) {
      ov.agent_centers.push_back(a.waypoints.front());
      ov.agent_radii.push_back(a.radius);
    }
    for (int l : {0, stack.n_psi / 4}) {
      std::snprintf(name, sizeof name, "field_%02d.svg", l);
      const fs::path p = fs::path(out) / name;
      write_file(p, sage::field_svg(stack, l, ov));
      files.push_back(p.string());
    }
  }

  emit(json{{"ok", true},
            {"cmd", "solve"},
            {"out", out},
            {"open", stack.open},
            {"h_max", stack.h_max},
            {"n_psi", stack.n_psi},
            {"files", files}});
  return 0;
}

int cmd_run(const std::string& scenario, const std::string& out,
            const std::vector<std::string>& overrides, long seed, bool has_seed, bool plot) {
  const sage::Scenario sc = load_with_overrides(scenario, overrides, seed, has_seed);
  fs::create_directories(out);

  sage::Simulator sim(sc);
  sage::RunOptions opts;
  int frame = 0;
  const int k_field = sc.params.sim.k_field;
  const int ticks = std::max(1, static_cast<int>(sc.duration * sc.params.sim.control_hz) / k_field);
  const int stride = std::max(1, ticks / 40);
  if (plot) {
    fs::create_directories(fs::path(out) / "frames");
    opts.on_field = [&](int step, const sage::FieldStack& stack) {
      if ((step / k_field) % stride != 0) return;
      sage::PlotOverlay ov;
      for (const auto& row : sim.partial_log()) ov.trajectory.push_back({row.x, row.y});
      ov.has_robot = true;
      ov.robot_x = sim.world().robot.x;
      ov.robot_y = sim.world().robot.y;
      ov.robot_psi = sim.world().robot.psi;
      ov.footprint_a = sc.params.geometry.footprint_a;
      ov.footprint_b = sc.params.geometry.footprint_b;
      for (std::size_t i = 0; i < sim.world().agent_pos.size(); ++i) {
        ov.agent_centers.push_back(sim.world().agent_pos[i]);
        ov.agent_radii.push_back(sc.agents[i].radius);
      }
      char fname[48];
      std::snprintf(fname, sizeof fname, "frame_%04d.svg", frame++);
      write_file(fs::path(out) / "frames" / fname, sage::field_svg(stack, 0, ov));
    };
  }

  sage::RunResult rr;
  try {
    rr = sim.run(opts);
  } catch (const sage::SolverDiverged& e) {
    // Dump what the solver saw so the failure can be reproduced offline.
    sage::io::GridFile gf;
    gf.origin = sim.grid().occupancy.origin();
    gf.resolution = sim.grid().occupancy.resolution();
    gf.width = sim.grid().occupancy.width();
    gf.height = sim.grid().occupancy.height();
    gf.stamp = sim.grid().stamp;
    gf.add("occupancy", sim.grid().occupancy);
    gf.add("cell_class", sim.grid().cell_class);
    const fs::path gp = fs::path(out) / "diverged_occupancy.grid";
    sage::io::write_grid_file(gp.string(), gf);
    write_file(fs::path(out) / "trajectory.csv", sage::trajectory_csv(sim.partial_log()));
    emit(json{{"ok", false},
              {"cmd", "run"},
              {"error", e.what()},
              {"residual", e.residual},
              {"diagnostics", {gp.string(), (fs::path(out) / "trajectory.csv").string()}}});
    return 2;
  }

  write_file(fs::path(out) / "trajectory.csv", sage::trajectory_csv(rr.log));
  write_file(fs::path(out) / "metrics.json", sage::metrics_to_json(rr.metrics).dump(2) + "\n");

  emit(json{{"ok", !rr.metrics.safety_violation},
            {"cmd", "run"},
            {"out", out},
            {"metrics", sage::metrics_to_json(rr.metrics)}});
  return rr.metrics.safety_violation ? 3 : 0;
}

json bench_solver(bool& pass) {
  using sage::GridF;
  using sage::GridU8;
  json entry;

  // Poisson vs the parabolic disk profile h(r) = (R^2 - r^2) / 4 for f = -1,
  // Dirichlet ring data sampled from the profile at cell-center radii.
  {
    const auto t0 = std::chrono::steady_clock::now();
    const double res = 0.05, R = 1.0;
    const int n = 45;  // 2.25 m square, disk centered
    const Eigen::Vector2d c{n * res / 2, n * res / 2};
    GridF u({0, 0}, res, n, n);
    GridU8 interior({0, 0}, res, n, n);
    GridF f({0, 0}, res, n, n, -1.0f);
    auto profile = [&](double r) { return (R * R - r * r) / 4.0; };
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        interior(ix, iy) = (u.cellCenter(ix, iy) - c).norm() < R ? 1 : 0;
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        if (interior(ix, iy)) continue;
        const bool ring =
            (ix > 0 && interior(ix - 1, iy)) || (ix + 1 < n && interior(ix + 1, iy)) ||
            (iy > 0 && interior(ix, iy - 1)) || (iy + 1 < n && interior(ix, iy + 1));
        if (ring) u(ix, iy) = static_cast<float>(profile((u.cellCenter(ix, iy) - c).norm()));
      }
    sage::sor_solve(u, interior, &f, 1.9, 1e-8, 200000);
    double max_err = 0.0;
    const double peak = R * R / 4.0;
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        if (!interior(ix, iy)) continue;
        const double r = (u.cellCenter(ix, iy) - c).norm();
        max_err = std::max(max_err, std::abs(u(ix, iy) - profile(r)) / peak);
      }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    entry["poisson_disk"] = {{"max_rel_error", max_err}, {"seconds", secs},
                             {"pass", max_err < 0.02 && secs < 2.0}};
    pass = pass && max_err < 0.02 && secs < 2.0;
  }

  // Laplace vs a linear ramp across a strip.
  {
    const int w = 201, hgt = 5;
    GridF u({0, 0}, 0.05, w, hgt);
    GridU8 interior({0, 0}, 0.05, w, hgt);
    const double a = -1.3, b = 0.7;
    for (int iy = 0; iy < hgt; ++iy)
      for (int ix = 0; ix < w; ++ix) {
        interior(ix, iy) = (ix > 0 && ix < w - 1) ? 1 : 0;
        u(ix, iy) = ix == 0 ? a : (ix == w - 1 ? b : 0.0);
      }
    sage::sor_solve(u, interior, nullptr, 1.8, 1e-8, 200000);
    double max_err = 0.0;
    for (int iy = 0; iy < hgt; ++iy)
      for (int ix = 0; ix < w; ++ix)
        max_err = std::max(max_err,
                           std::abs(u(ix, iy) - (a + (b - a) * ix / double(w - 1))));
    entry["laplace_ramp"] = {{"max_error", max_err}, {"pass", max_err < 1e-6}};
    pass = pass && max_err < 1e-6;
  }

  // Laplace vs the log profile between two rings, boundary data sampled from
  // the profile at cell-center radii.
  {
    const double res = 0.05, r0 = 0.6, r1 = 1.7;
    const int n = 73;
    const Eigen::Vector2d c{n * res / 2, n * res / 2};
    GridF u({0, 0}, res, n, n);
    GridU8 interior({0, 0}, res, n, n);
    auto profile = [&](double r) { return std::log(r1 / r) / std::log(r1 / r0); };
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const double r = (u.cellCenter(ix, iy) - c).norm();
        if (r > r0 && r < r1) {
          interior(ix, iy) = 1;
        } else {
          u(ix, iy) = static_cast<float>(profile(std::clamp(r, 0.05, r1)));
        }
      }
    sage::sor_solve(u, interior, nullptr, 1.9, 1e-8, 200000);
    double max_err = 0.0;
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        if (!interior(ix, iy)) continue;
        const double r = (u.cellCenter(ix, iy) - c).norm();
        max_err = std::max(max_err, std::abs(u(ix, iy) - profile(r)));
      }
    entry["laplace_annulus"] = {{"max_error", max_err}, {"pass", max_err < 0.02}};
    pass = pass && max_err < 0.02;
  }
  return entry;
}

json bench_social(long seed_base, bool& pass) {
  std::vector<double> prop, base;
  for (long s = seed_base; s < seed_base + 10; ++s) {
    {
      sage::Simulator sim(sage::preset_enclosure(s));
      const auto rr = sim.run();
      if (rr.metrics.human_margin_defined) prop.push_back(rr.metrics.human_margin);
    }
    {
      sage::Scenario sc = sage::preset_enclosure(s);
      sc.params.fields.b_human = -1.0;
      sc.params.fields.b_objects = -1.0;
      sage::Simulator sim(sc);
      const auto rr = sim.run();
      if (rr.metrics.human_margin_defined) base.push_back(rr.metrics.human_margin);
    }
  }
  const MeanStd mp = mean_std(prop), mb = mean_std(base);
  const bool ok = prop.size() == 10 && base.size() == 10 && mp.mean - mb.mean > 0.0 &&
                  mp.mean > 0.0;
  pass = pass && ok;
  return json{{"margin_proposed", ms_json(mp)},
              {"margin_baseline", ms_json(mb)},
              {"defined_proposed", prop.size()},
              {"defined_baseline", base.size()},
              {"pass", ok}};
}

json bench_safety(long seed_base, bool& pass) {
  std::vector<double> min_hs;
  int violations = 0;
  double worst_resid = std::numeric_limits<double>::infinity();
  bool dtcbf_ok = true;
  for (long s = seed_base; s < seed_base + 5; ++s) {
    sage::Simulator sim(sage::preset_safety(s));
    sage::RunOptions opts;
    opts.collect_dtcbf = true;
    const auto rr = sim.run(opts);
    min_hs.push_back(rr.metrics.min_h);
    if (rr.metrics.safety_violation) ++violations;
    for (const auto& chk : rr.dtcbf) {
      worst_resid = std::min(worst_resid, chk.min_residual);
      if (chk.min_residual < -1e-3 * chk.h_max) dtcbf_ok = false;
    }
  }
  const bool ok = violations == 0 && dtcbf_ok;
  pass = pass && ok;
  return json{{"min_h", ms_json(mean_std(min_hs))},
              {"violations", violations},
              {"worst_dtcbf_residual", worst_resid},
              {"dtcbf_ok", dtcbf_ok},
              {"pass", ok}};
}

int cmd_bench(const std::string& suite, const std::string& out, long seed) {
  bool pass = true;
  json report;
  report["suite"] = suite;
  report["seed_base"] = seed;
  if (suite == "solver") {
    report["results"] = bench_solver(pass);
  } else if (suite == "social") {
    report["results"] = bench_social(seed, pass);
  } else if (suite == "safety") {
    report["results"] = bench_safety(seed, pass);
  } else {
    throw sage::ConfigError("unknown bench suite: " + suite +
                            " (expected social, safety or solver)");
  }
  report["pass"] = pass;
  fs::create_directories(out);
  write_file(fs::path(out) / ("bench_" + suite + ".json"), report.dump(2) + "\n");
  emit(json{{"ok", pass}, {"cmd", "bench"}, {"suite", suite}, {"report", report}});
  return pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semantic guidance and safety fields: solve, simulate, benchmark"};
  app.require_subcommand(1);

  std::string scenario, out = "out", suite;
  std::vector<std::string> overrides;
  long seed = 0;
  bool plot = false;

  CLI::App* solve = app.add_subcommand("solve", "solve the field stack for a static scene");
  solve->add_option("--scenario", scenario, "scenario JSON path")->required();
  solve->add_option("--out", out, "output directory");
  solve->add_option("--override", overrides, "dotted-key override KEY=VALUE");
  solve->add_flag("--plot", plot, "write SVG renders");

  CLI::App* run = app.add_subcommand("run", "run a closed-loop scenario");
  run->add_option("--scenario", scenario, "scenario JSON path")->required();
  run->add_option("--out", out, "output directory");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "seed override");
  run->add_option("--override", overrides, "dotted-key override KEY=VALUE");
  run->add_flag("--plot", plot, "write SVG frames");

  CLI::App* bench = app.add_subcommand("bench", "run a benchmark suite");
  bench->add_option("--suite", suite, "social | safety | solver")->required();
  bench->add_option("--out", out, "output directory");
  bench->add_option("--seed", seed, "base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    if (rc != 0) emit(json{{"ok", false}, {"error", "argument parse failure"}, {"exit", 1}});
    return rc == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(scenario, out, overrides, plot);
    if (run->parsed())
      return cmd_run(scenario, out, overrides, seed, seed_opt->count() > 0, plot);
    return cmd_bench(suite, out, seed);
  } catch (const sage::ConfigError& e) {
    sage::log::error("%s", e.what());
    emit(json{{"ok", false}, {"error", e.what()}, {"kind", "config"}});
    return 1;
  } catch (const sage::SolverDiverged& e) {
    sage::log::error("%s", e.what());
    emit(json{{"ok", false}, {"error", e.what()}, {"kind", "solver"}});
    return 2;
  } catch (const std::exception& e) {
    sage::log::error("%s", e.what());
    emit(json{{"ok", false}, {"error", e.what()}, {"kind", "internal"}});
    return 2;
  }
}
