#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mhdlab/compressible.hpp"
#include "mhdlab/grid.hpp"
#include "mhdlab/state.hpp"

namespace mhdlab {

/// Index-set families of the anisotropic spaces:
///   star:  |alpha| + 2k <= m
///   star2: |alpha| + 2k <= m + 1, |alpha| <= m
///   star3: |alpha| <= m, |alpha| + 2k <= m + 2 for k >= 2, <= m + 1 for k = 1
enum class NormFamily { star, star2, star3 };

const char* to_string(NormFamily f);
NormFamily norm_family_from_string(const std::string& s);

/// x1 window for local norms. Stencils are unchanged; only the quadrature
/// is restricted.
struct Subdomain {
  double x1_lo = 0.0;
  double x1_hi = 0.0;
};

struct NormSpec {
  NormFamily family = NormFamily::star;
  int m = 1;                       ///< 0 <= m <= 4 (0 is plain L2)
  std::optional<double> lambda;    ///< time weight; defaults to the state's lambda
  int k_max_time = 1;              ///< 0, 1 or 2
  std::optional<Subdomain> subdomain;
};

/// (sigma d1)^a1 d2^a2 d1^k, or the same applied to d_t^time_order u.
/// x3 derivatives vanish in the 2.5-D reduction and are not listed.
struct NormTerm {
  int component = -1;   ///< -1 for a scalar field
  ConormalIndex alpha;
  int k = 0;
  int time_order = 0;
  double value = 0.0;   ///< L2 norm of this derivative (time weight included)

  std::string label() const;
};

struct NormReport {
  double total = 0.0;
  std::vector<NormTerm> terms;
  std::string quadrature = "trapezoid-x1/rectangle-x2";

  std::string to_json() const;
};

/// (alpha, k) pairs of the family at order m, alpha3 = 0.
std::vector<std::pair<ConormalIndex, int>> index_set(NormFamily family, int m);

/// Trapezoid-in-x1 L2 norm squared, optionally restricted to a window.
double l2_squared(const GridFunction& f, const Grid& grid, const std::optional<Subdomain>& sub = std::nullopt);

/// Throws PreconditionError for m outside [0, 4].
NormReport norm_spatial(const GridFunction& f, const NormSpec& spec, const Grid& grid);
/// Sum over all seven components.
NormReport norm_spatial(const StateField& u, const NormSpec& spec, const Grid& grid);

/// max of |f|, |sigma D1 f|, |D2 f| (over all components for a state).
double norm_w1inf_star(const GridFunction& f, const Grid& grid, const std::optional<Subdomain>& sub = std::nullopt);
double norm_w1inf_star(const StateField& u, const Grid& grid, const std::optional<Subdomain>& sub = std::nullopt);

struct TimeWindow {
  double t0 = 0.0;
  double t1 = 1e300;
};

/// sup over samples in the window of
///   (sum_{k <= k_max} || lambda^-k d_t^k u ||^2_{m-k, family})^{1/2}.
/// d_t u is the stored u_t; d_t^2 u is a centred (one-sided at the ends)
/// difference of the stored u_t. Throws PreconditionError when the window
/// holds fewer than k_max + 1 samples or u_t is missing.
double norm_spacetime_lambda(const std::vector<TrajectorySample>& traj, const NormSpec& spec, const Grid& grid,
                             const TimeWindow& window = {});

/// As norm_spacetime_lambda without the zeroth-order term.
double seminorm_bracket(const std::vector<TrajectorySample>& traj, const NormSpec& spec, const Grid& grid,
                        const TimeWindow& window = {});

/// Per-sample values behind the two functions above.
std::vector<double> spacetime_profile(const std::vector<TrajectorySample>& traj, const NormSpec& spec,
                                      const Grid& grid, const TimeWindow& window, bool seminorm);

/// Single-grid ratios evaluated by the battery below.
double characterization_ratio(const GridFunction& u, const Grid& grid, int m);
double moser_ratio(const GridFunction& u, const GridFunction& v, const Grid& grid, int m);
/// Throws PreconditionError unless u vanishes at x1 = 0.
double sigma_division_ratio(const GridFunction& u, const Grid& grid, int m);

using TestFunction = std::function<double(double x1, double x2)>;

struct BatteryCase {
  std::string name;
  TestFunction u;  ///< must vanish at x1 = 0 for the sigma-division ratio
  TestFunction v;
};

struct BatteryLevel {
  int n1 = 0;
  int n2 = 0;
  double characterization = 0.0;  ///< |u|_{m,**} / (|u|_{m,*} + |d1 u|_{m-1,*})
  double moser = 0.0;             ///< |uv|_{m,**} / (|u|_{m,**} |v|_W + |u|_W |v|_{m,**})
  double sigma_division = 0.0;    ///< |u / sigma|_{m-1,*} / |u|_{m,**}
  bool chain = true;              ///< star <= star2 <= star3 termwise for u and v
};

struct BatteryReport {
  std::string name;
  int m = 2;
  std::vector<BatteryLevel> levels;
  double sup_characterization = 0.0;
  double sup_moser = 0.0;
  double sup_sigma_division = 0.0;
  /// max over the three ratios of (max - min) / max across the ladder.
  double max_spread = 0.0;
  bool chain = true;
};

/// Evaluates the three ratios on each (n1, n2) of the ladder over
/// [0, L1] x [0, L2). Throws PreconditionError if u does not vanish at the wall.
BatteryReport embedding_battery(const BatteryCase& c, const std::vector<std::pair<int, int>>& ladder, int m = 2,
                                double L1 = 1.0, double L2 = 1.0);

/// Smooth test pairs used by the CLI and the acceptance run.
std::vector<BatteryCase> standard_battery_cases();

}  // namespace mhdlab
