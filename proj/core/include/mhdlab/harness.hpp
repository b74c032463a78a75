#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mhdlab/checkpoint.hpp"
#include "mhdlab/compressible.hpp"
#include "mhdlab/incompressible.hpp"
#include "mhdlab/norms.hpp"
#include "mhdlab/state.hpp"

namespace mhdlab {

/// Sweep configuration. Loaded from a YAML mapping whose keys mirror the
/// field names (nested: grid, data, sponge, subdomain); unknown keys are
/// rejected.
struct RunConfig {
  int n1 = 129;
  int n2 = 64;
  double L1 = 1.0;
  double L2 = 1.0;
  std::string eos = "exp";
  DataFamily data;
  std::vector<double> lambdas{4.0, 8.0, 16.0, 32.0};
  double T = 0.5;
  double cfl = 0.8;
  double epsilon = 0.02;
  double output_dt = 0.005;
  int clean_every = 10;
  int energy_every = 10;
  Sponge sponge{0.8, 8.0};
  /// Measurement region K = [x1_lo, x1_hi] x full x2, as fractions of L1.
  Subdomain subdomain{0.0, 0.8};
  double t0_fraction = 0.1;  ///< layer split t0 = t0_fraction * T
  /// The incompressible reference runs on the nested grid
  /// ((n1 - 1) r + 1) x (n2 r).
  int reference_refinement = 1;
  int jobs = 1;  ///< concurrent compressible runs
  std::string out_dir = "out";
  bool write_checkpoints = true;

  /// Throws ConfigError.
  void validate() const;
  Grid grid() const;
  Grid reference_grid() const;
  Subdomain region() const { return {subdomain.x1_lo * L1, subdomain.x1_hi * L1}; }
  SolverConfig solver_config(double lambda) const;
  IncompressibleConfig reference_config() const;
};

/// Throws ConfigError on syntax errors, unknown keys or invalid values.
RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical YAML of every field (used for the config hash).
std::string dump_config(const RunConfig& config);
/// 64-bit FNV-1a of dump_config, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Column order of the CSV export.
inline const std::vector<std::string> kTableColumns = {
    "lambda", "t", "err_v", "err_q", "err_H", "norm_ss_lambda", "wp_metric", "divH", "energy_residual",
    "grad_q_err", "norm_ss_unweighted"};

/// err_v    L2(K) of v - w (three components)
/// err_q    L2(K) of q
/// err_H    star-norm (m = 1) on K of H - B
/// norm_ss_lambda     (|u|^2_{2,**} + |u_t / lambda|^2_{1,**})^{1/2} over the slab
/// norm_ss_unweighted the same with weight 1 instead of 1 / lambda
/// wp_metric  lambda (|D q| + |D.v|) in L2 over the slab
/// divH       max |D.H| since the previous row, before cleaning
/// energy_residual  max energy-identity residual since the previous row
/// grad_q_err sup over K of |lambda D q - D(pi + |B|^2 / 2)|
struct ConvergenceRow {
  double lambda = 0.0;
  double t = 0.0;
  double err_v = 0.0;
  double err_q = 0.0;
  double err_H = 0.0;
  double norm_ss_lambda = 0.0;
  double wp_metric = 0.0;
  double divH = 0.0;
  double energy_residual = 0.0;
  double grad_q_err = 0.0;
  double norm_ss_unweighted = 0.0;
};

struct FailedRun {
  double lambda = 0.0;
  double blowup_time = -1.0;
  std::string failure;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::vector<FailedRun> failures;
  std::vector<double> lambdas;
  double pg_norm = 0.0;  ///< |P_G v0|_{L2(K)} of the initial velocity
  double T = 0.0;
  std::string config_hash;
};

CsvTable to_csv(const ConvergenceTable& table);
/// Throws IoError if the header is not kTableColumns.
ConvergenceTable table_from_csv(const CsvTable& csv);

/// Limit-side data at one time: velocity, magnetic field, and the gradient
/// of the total pressure (for a compressible sample: lambda D q).
struct LimitSample {
  double t = 0.0;
  std::array<GridFunction, 3> w;
  std::array<GridFunction, 3> B;
  PlaneVector grad_total_pressure;
  GridFunction q;  ///< empty for limit data
};

std::vector<LimitSample> limit_samples(const IncompressibleTrajectory& traj,
                                       const MaterialLaw& law = MaterialLaw::exponential());
LimitSample limit_sample(const TrajectorySample& s, const Grid& grid);
std::vector<LimitSample> limit_samples(const Trajectory& traj);

struct LimitMetrics {
  double t = 0.0;
  double err_v = 0.0;       ///< L2(K)
  double sup_err_v = 0.0;   ///< sup over K
  double err_v_star = 0.0;  ///< star-norm (m = 1) on K
  double err_q = 0.0;       ///< L2(K) of q_a - q_b (a missing q counts as zero)
  double err_H = 0.0;       ///< star-norm (m = 1) on K
  double grad_q_err = 0.0;  ///< sup over K
};

/// Compares a at each of its times with b at the same time (within 1e-9 T).
/// The grid of b may be a nested refinement of grid_a. Throws
/// PreconditionError when no timestamps overlap.
std::vector<LimitMetrics> compare_to_limit(const std::vector<LimitSample>& a, const Grid& grid_a,
                                           const std::vector<LimitSample>& b, const Grid& grid_b,
                                           const Subdomain& region, const TimeWindow& window = {});

/// Metrics for one pair of samples (no time check).
LimitMetrics compare_samples(const LimitSample& a, const Grid& grid_a, const LimitSample& b, const Grid& grid_b,
                             const Subdomain& region);

struct LayerEntry {
  double lambda = 0.0;
  double e_early = 0.0;
  double e_late = 0.0;
  double ratio = 0.0;  ///< e_early / e_late
};

struct LayerReport {
  double t0 = 0.0;
  std::vector<LayerEntry> entries;
  /// Trends need at least two lambdas.
  std::optional<bool> ratio_increasing;
  std::optional<bool> late_decreasing;
  std::optional<double> early_spread;  ///< max / min of e_early
  bool layer = false;
};

/// Throws PreconditionError when some lambda lacks rows on either side of t0.
LayerReport detect_initial_layer(const ConvergenceTable& table, double t0);

struct SweepOptions {
  bool write_files = true;
  bool verbose = false;
};

/// Runs the incompressible reference once from (P_S v0, H0), then the
/// compressible solver for each lambda, and tabulates the columns on the
/// common output times. Blow-ups are recorded and the sweep continues.
ConvergenceTable run_sweep(const RunConfig& config, const SweepOptions& options = {});

/// JSON metadata: config hash, grid, sigma block, EOS tag, failures.
std::string sweep_metadata_json(const RunConfig& config, const ConvergenceTable& table);

}  // namespace mhdlab
