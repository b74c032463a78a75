// mhdlab: command-line driver for the low-Mach MHD experiments.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mhdlab/acoustic.hpp"
#include "mhdlab/checkpoint.hpp"
#include "mhdlab/error.hpp"
#include "mhdlab/harness.hpp"
#include "mhdlab/norms.hpp"

namespace fs = std::filesystem;
using namespace mhdlab;

namespace {

constexpr int kExitBlowUp = 2;
constexpr int kExitConfig = 3;

struct Common {
  std::string config_path;
  std::string out_dir;
  std::string lambdas;
  long long seed = -1;
  bool verbose = false;
};

std::vector<double> parse_lambda_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(parse_double(item));
    } catch (const IoError&) {
      throw ConfigError("--lambda: '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError("--lambda: empty list");
  return out;
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? RunConfig{} : load_config(c.config_path);
  if (!c.lambdas.empty()) cfg.lambdas = parse_lambda_list(c.lambdas);
  if (c.seed >= 0) cfg.data.seed = static_cast<std::uint64_t>(c.seed);
  if (!c.out_dir.empty()) cfg.out_dir = c.out_dir;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "YAML run configuration")->check(CLI::ExistingFile);
  app->add_option("--out", c.out_dir, "output directory (overrides out_dir)");
  app->add_option("--lambda", c.lambdas, "comma-separated lambda list, e.g. 4,8,16,32");
  app->add_option("--seed", c.seed, "data-family seed")->check(CLI::NonNegativeNumber);
  app->add_flag("-v,--verbose", c.verbose, "progress on stderr");
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_atomic(path, text);
  std::cout << "wrote " << path.string() << "\n";
}

int cmd_simulate(const Common& c) {
  const RunConfig cfg = resolve(c);
  const MaterialLaw law = MaterialLaw::from_tag(cfg.eos);
  const Grid grid = cfg.grid();
  int failures = 0;
  for (const double lambda : cfg.lambdas) {
    SolverConfig sc = cfg.solver_config(lambda);
    sc.store_states = false;
    const CompressibleModel model(grid, sc, law);
    CsvTable csv;
    csv.header = {"t", "energy", "l2_q", "divH"};
    StateField last;
    double last_t = 0.0;
    const StateField u0 = make_initial_data(cfg.data, grid, lambda, law);
    const Trajectory tr = run(sc, grid, u0, law, [&](const TrajectorySample& s) {
      csv.rows.push_back({s.t, model.energy(s.u), std::sqrt(l2_squared(s.u[kQ], grid)), s.div_H});
      last = s.u;
      last_t = s.t;
    });
    const RunDiagnostics& d = tr.diagnostics;
    std::cout << "lambda " << format_double(lambda) << ": steps " << d.steps << ", final time "
              << format_double(d.final_time) << ", max divH " << format_double(d.max_div_H)
              << ", max energy residual " << format_double(d.max_energy_residual) << "\n";
    const std::string tag = "simulate_lambda_" + format_double(lambda);
    std::ostringstream os;
    write_csv(csv, os);
    write_text(fs::path(cfg.out_dir) / (tag + ".csv"), os.str());
    if (d.blew_up) {
      ++failures;
      std::cout << "  blew up at t = " << format_double(d.blowup_time) << ": " << d.failure << "\n";
    } else if (cfg.write_checkpoints) {
      save_checkpoint(fs::path(cfg.out_dir) / (tag + ".ckpt"), last, grid, last_t, law.tag);
    }
  }
  return failures == static_cast<int>(cfg.lambdas.size()) ? kExitBlowUp : 0;
}

int cmd_limit(const Common& c) {
  const RunConfig cfg = resolve(c);
  const MaterialLaw law = MaterialLaw::from_tag(cfg.eos);
  const Grid grid = cfg.reference_grid();
  IncompressibleConfig ic = cfg.reference_config();
  ic.store_states = false;
  const IncompressibleModel model(grid, ic, law);
  CsvTable csv;
  csv.header = {"t", "energy", "l2_pi"};
  const StateField u0 = make_initial_data(cfg.data, grid, cfg.lambdas.front(), law);
  const IncompressibleTrajectory tr =
      run_incompressible(ic, grid, IncompressibleState::from(u0), law, [&](const IncompressibleSample& s) {
        csv.rows.push_back({s.t, model.energy(s.state), std::sqrt(l2_squared(s.state.pi, grid))});
      });
  std::cout << "incompressible run: steps " << tr.steps << ", max div w " << format_double(tr.max_div_w)
            << ", max div B " << format_double(tr.max_div_B) << "\n";
  std::ostringstream os;
  write_csv(csv, os);
  write_text(fs::path(cfg.out_dir) / "limit.csv", os.str());
  return 0;
}

int cmd_sweep(const Common& c) {
  const RunConfig cfg = resolve(c);
  SweepOptions o;
  o.verbose = c.verbose;
  const ConvergenceTable table = run_sweep(cfg, o);
  std::cout << "wrote " << (fs::path(cfg.out_dir) / "table.csv").string() << "\n";
  for (const auto& f : table.failures) {
    std::cout << "lambda " << format_double(f.lambda) << " failed at t = " << format_double(f.blowup_time) << ": "
              << f.failure << "\n";
  }
  if (table.failures.size() == cfg.lambdas.size()) return kExitBlowUp;
  const LayerReport rep = detect_initial_layer(table, cfg.t0_fraction * cfg.T);
  std::cout << "|P_G v0|_L2(K) = " << format_double(table.pg_norm) << "\n";
  std::cout << "lambda,e_early,e_late,ratio\n";
  for (const auto& e : rep.entries) {
    std::cout << format_double(e.lambda) << "," << format_double(e.e_early) << "," << format_double(e.e_late) << ","
              << format_double(e.ratio) << "\n";
  }
  if (rep.ratio_increasing) {
    std::cout << "layer " << (rep.layer ? "detected" : "not detected") << " (late errors "
              << (*rep.late_decreasing ? "decrease" : "do not decrease") << " with lambda)\n";
  }
  return 0;
}

int cmd_norms(const std::string& path, const std::string& family, int m, std::vector<double> subdomain) {
  NormSpec spec;
  try {
    spec.family = norm_family_from_string(family);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  spec.m = m;
  const Checkpoint ck = load_checkpoint(path);
  if (ck.non_finite > 0) {
    std::cerr << "checkpoint holds " << ck.non_finite << " non-finite values\n";
    return kExitBlowUp;
  }
  if (subdomain.size() == 2) spec.subdomain = Subdomain{subdomain[0], subdomain[1]};
  const StateField u = apply_ghost_fill(ck.state);
  std::cout << norm_spatial(u, spec, ck.grid).to_json() << "\n";
  return 0;
}

int cmd_acoustic(const Common& c, double window) {
  const RunConfig cfg = resolve(c);
  const MaterialLaw law = MaterialLaw::from_tag(cfg.eos);
  const Grid grid = cfg.grid();
  CsvTable csv;
  csv.header = {"lambda", "initial_energy", "min_ratio", "time_of_min", "return_time", "ps_drift"};
  for (const double lambda : cfg.lambdas) {
    const LayerDecayReport r = pulse_layer_decay(cfg.data, grid, lambda, law, window);
    csv.rows.push_back({lambda, r.initial_energy, r.min_ratio, r.time_of_min, r.return_time, r.ps_drift});
  }
  std::ostringstream os;
  write_csv(csv, os);
  std::cout << os.str();
  write_text(fs::path(cfg.out_dir) / "acoustic.csv", os.str());
  return 0;
}

int cmd_battery(int m, const std::string& out_dir) {
  const std::vector<std::pair<int, int>> ladder = {{33, 32}, {65, 64}, {129, 128}};
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& bc : standard_battery_cases()) {
    const BatteryReport r = embedding_battery(bc, ladder, m);
    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    for (const auto& l : r.levels) {
      levels.push_back({{"n1", l.n1},
                        {"n2", l.n2},
                        {"characterization", l.characterization},
                        {"moser", l.moser},
                        {"sigma_division", l.sigma_division},
                        {"chain", l.chain}});
    }
    j.push_back({{"name", r.name},
                 {"m", r.m},
                 {"levels", levels},
                 {"sup_characterization", r.sup_characterization},
                 {"sup_moser", r.sup_moser},
                 {"sup_sigma_division", r.sup_sigma_division},
                 {"max_spread", r.max_spread},
                 {"chain", r.chain}});
    std::cout << r.name << ": spread " << format_double(r.max_spread) << ", chain " << (r.chain ? "ok" : "broken")
              << "\n";
  }
  write_text(fs::path(out_dir.empty() ? "out" : out_dir) / "battery.json", j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-Mach MHD numerical lab"};
  app.require_subcommand(1);

  Common common;
  auto* simulate = app.add_subcommand("simulate", "one compressible run per lambda");
  auto* limit = app.add_subcommand("limit", "incompressible reference run");
  auto* sweep = app.add_subcommand("sweep", "lambda sweep against the incompressible limit");
  auto* acoustic = app.add_subcommand("acoustic", "linear acoustic layer study");
  for (auto* s : {simulate, limit, sweep, acoustic}) add_common(s, common);
  double window = 0.5;
  acoustic->add_option("--window", window, "x1 window fraction")->check(CLI::Range(0.05, 0.95));

  auto* norms = app.add_subcommand("norms", "conormal norms of a checkpoint");
  std::string ckpt, family = "star";
  int m = 2;
  std::vector<double> subdomain;
  norms->add_option("checkpoint", ckpt, "checkpoint file")->required()->check(CLI::ExistingFile);
  norms->add_option("--family", family, "star, star2 or star3");
  norms->add_option("--m", m, "order")->check(CLI::Range(0, 4));
  norms->add_option("--subdomain", subdomain, "x1_lo x1_hi")->expected(2);

  auto* battery = app.add_subcommand("battery", "embedding and product inequality ratios");
  int battery_m = 2;
  std::string battery_out;
  battery->add_option("--m", battery_m, "order")->check(CLI::Range(1, 4));
  battery->add_option("--out", battery_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(common);
    if (*limit) return cmd_limit(common);
    if (*sweep) return cmd_sweep(common);
    if (*acoustic) return cmd_acoustic(common, window);
    if (*norms) return cmd_norms(ckpt, family, m, subdomain);
    if (*battery) return cmd_battery(battery_m, battery_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
