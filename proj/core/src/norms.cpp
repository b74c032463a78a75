#include "mhdlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "mhdlab/error.hpp"

namespace mhdlab {

namespace {

constexpr int kMaxOrder = 4;

void check_order(int m) {
  if (m < 0 || m > kMaxOrder) {
    throw PreconditionError("norm order m = " + std::to_string(m) + " outside [0, " + std::to_string(kMaxOrder) + "]");
  }
}

bool in_set(NormFamily family, int m, int a, int k) {
  switch (family) {
    case NormFamily::star:
      return a + 2 * k <= m;
    case NormFamily::star2:
      return a + 2 * k <= m + 1 && a <= m;
    case NormFamily::star3:
      if (a > m) return false;
      if (k >= 2) return a + 2 * k <= m + 2;
      if (k == 1) return a + 2 <= m + 1;
      return true;
  }
  return false;
}

// Terms of one scalar field, value squared accumulated into `sum`.
void add_terms(const GridFunction& f, int component, int time_order, double weight, const NormSpec& spec, int m,
               const Grid& grid, bool skip_zeroth, std::vector<NormTerm>& out, double& sum) {
  for (const auto& [alpha, k] : index_set(spec.family, m)) {
    if (skip_zeroth && time_order == 0 && alpha.order() == 0 && k == 0) continue;
    const GridFunction d = conormal_diff(f, alpha, k, grid, alpha.order() + 2 * k);
    const double sq = weight * weight * l2_squared(d, grid, spec.subdomain);
    sum += sq;
    out.push_back(NormTerm{component, alpha, k, time_order, std::sqrt(sq)});
  }
}

double w1inf(const GridFunction& f, const Grid& grid, const std::optional<Subdomain>& sub) {
  const GridFunction s1 = conormal_diff(f, ConormalIndex{1, 0, 0}, 0, grid);
  const GridFunction d2 = conormal_diff(f, ConormalIndex{0, 1, 0}, 0, grid);
  double m = 0.0;
  for (int i = 0; i < grid.n1; ++i) {
    const double x = grid.x1(i);
    if (sub && (x < sub->x1_lo - 1e-12 * grid.L1 || x > sub->x1_hi + 1e-12 * grid.L1)) continue;
    for (int j = 0; j < grid.n2; ++j) {
      m = std::max({m, std::abs(f(i, j)), std::abs(s1(i, j)), std::abs(d2(i, j))});
    }
  }
  return m;
}

GridFunction sample(const TestFunction& fn, const Grid& grid) {
  GridFunction f(grid);
  for (int i = 0; i < grid.n1; ++i)
    for (int j = 0; j < grid.n2; ++j) f(i, j) = fn(grid.x1(i), grid.x2(j));
  return f;
}

double norm_of(const GridFunction& f, NormFamily family, int m, const Grid& grid) {
  NormSpec s;
  s.family = family;
  s.m = m;
  return norm_spatial(f, s, grid).total;
}

}  // namespace

const char* to_string(NormFamily f) {
  switch (f) {
    case NormFamily::star:
      return "star";
    case NormFamily::star2:
      return "star2";
    case NormFamily::star3:
      return "star3";
  }
  return "?";
}

NormFamily norm_family_from_string(const std::string& s) {
  if (s == "star") return NormFamily::star;
  if (s == "star2") return NormFamily::star2;
  if (s == "star3") return NormFamily::star3;
  throw PreconditionError("unknown norm family '" + s + "'");
}

std::string NormTerm::label() const {
  std::string s;
  if (component >= 0) s += std::string(kComponentNames[static_cast<std::size_t>(component)]) + ":";
  s += "a1=" + std::to_string(alpha.a1) + ",a2=" + std::to_string(alpha.a2) + ",k=" + std::to_string(k);
  if (time_order > 0) s += ",t=" + std::to_string(time_order);
  return s;
}

std::string NormReport::to_json() const {
  nlohmann::ordered_json j;
  j["total"] = total;
  j["quadrature"] = quadrature;
  auto& arr = j["terms"] = nlohmann::ordered_json::array();
  for (const NormTerm& t : terms) {
    arr.push_back({{"label", t.label()},
                   {"component", t.component},
                   {"a1", t.alpha.a1},
                   {"a2", t.alpha.a2},
                   {"k", t.k},
                   {"time_order", t.time_order},
                   {"value", t.value}});
  }
  return j.dump(2);
}

std::vector<std::pair<ConormalIndex, int>> index_set(NormFamily family, int m) {
  check_order(m);
  std::vector<std::pair<ConormalIndex, int>> out;
  for (int k = 0; 2 * k <= m + 2; ++k)
    for (int a = 0; a <= m; ++a)
      if (in_set(family, m, a, k))
        for (int a1 = a; a1 >= 0; --a1) out.push_back({ConormalIndex{a1, a - a1, 0}, k});
  return out;
}

double l2_squared(const GridFunction& f, const Grid& grid, const std::optional<Subdomain>& sub) {
  int i0 = 0, i1 = grid.n1 - 1;
  if (sub) {
    i0 = grid.n1;
    i1 = -1;
    for (int i = 0; i < grid.n1; ++i) {
      const double x = grid.x1(i);
      if (x >= sub->x1_lo - 1e-12 * grid.L1 && x <= sub->x1_hi + 1e-12 * grid.L1) {
        i0 = std::min(i0, i);
        i1 = std::max(i1, i);
      }
    }
    if (i1 < i0) return 0.0;
  }
  double s = 0.0;
  for (int i = i0; i <= i1; ++i) {
    const double w = (i == i0 || i == i1) ? 0.5 * grid.dx1 * grid.dx2 : grid.dx1 * grid.dx2;
    double row = 0.0;
    for (int j = 0; j < grid.n2; ++j) row += f(i, j) * f(i, j);
    s += w * row;
  }
  return s;
}

NormReport norm_spatial(const GridFunction& f, const NormSpec& spec, const Grid& grid) {
  check_order(spec.m);
  NormReport r;
  double sum = 0.0;
  add_terms(f, -1, 0, 1.0, spec, spec.m, grid, false, r.terms, sum);
  r.total = std::sqrt(sum);
  return r;
}

NormReport norm_spatial(const StateField& u, const NormSpec& spec, const Grid& grid) {
  check_order(spec.m);
  NormReport r;
  double sum = 0.0;
  for (int c = 0; c < kNumComponents; ++c) add_terms(u[c], c, 0, 1.0, spec, spec.m, grid, false, r.terms, sum);
  r.total = std::sqrt(sum);
  return r;
}

double norm_w1inf_star(const GridFunction& f, const Grid& grid, const std::optional<Subdomain>& sub) {
  return w1inf(f, grid, sub);
}

double norm_w1inf_star(const StateField& u, const Grid& grid, const std::optional<Subdomain>& sub) {
  double m = 0.0;
  for (int c = 0; c < kNumComponents; ++c) m = std::max(m, w1inf(u[c], grid, sub));
  return m;
}

std::vector<double> spacetime_profile(const std::vector<TrajectorySample>& traj, const NormSpec& spec,
                                      const Grid& grid, const TimeWindow& window, bool seminorm) {
  check_order(spec.m);
  if (spec.k_max_time < 0 || spec.k_max_time > 2) throw PreconditionError("k_max_time must be 0, 1 or 2");
  std::vector<std::size_t> idx;
  for (std::size_t n = 0; n < traj.size(); ++n)
    if (traj[n].t >= window.t0 && traj[n].t <= window.t1) idx.push_back(n);
  if (idx.size() < static_cast<std::size_t>(spec.k_max_time) + 1) {
    throw PreconditionError("time window holds " + std::to_string(idx.size()) + " samples, need " +
                            std::to_string(spec.k_max_time + 1));
  }
  const int kmax = std::min(spec.k_max_time, spec.m);
  if (kmax >= 1)
    for (std::size_t n : idx)
      if (traj[n].u_t.n1() != grid.n1) throw PreconditionError("trajectory sample lacks u_t");
  if (kmax >= 2 && traj.size() < 2) throw PreconditionError("second time derivative needs two samples");

  std::vector<double> out;
  for (std::size_t n : idx) {
    const TrajectorySample& s = traj[n];
    const double lam = spec.lambda.value_or(s.u.lambda);
    double sum = 0.0;
    std::vector<NormTerm> scratch;
    for (int c = 0; c < kNumComponents; ++c) add_terms(s.u[c], c, 0, 1.0, spec, spec.m, grid, seminorm, scratch, sum);
    if (kmax >= 1) {
      for (int c = 0; c < kNumComponents; ++c)
        add_terms(s.u_t[c], c, 1, 1.0 / lam, spec, spec.m - 1, grid, seminorm, scratch, sum);
    }
    if (kmax >= 2) {
      const std::size_t a = n == 0 ? 0 : n - 1;
      const std::size_t b = n + 1 == traj.size() ? n : n + 1;
      const double dt = traj[b].t - traj[a].t;
      if (!(dt > 0.0)) throw PreconditionError("trajectory times must increase");
      for (int c = 0; c < kNumComponents; ++c) {
        GridFunction d = traj[b].u_t[c];
        const GridFunction& lo = traj[a].u_t[c];
        for (int i = 0; i < grid.n1; ++i)
          for (int j = 0; j < grid.n2; ++j) d(i, j) = (d(i, j) - lo(i, j)) / dt;
        add_terms(d, c, 2, 1.0 / (lam * lam), spec, spec.m - 2, grid, seminorm, scratch, sum);
      }
    }
    out.push_back(std::sqrt(sum));
  }
  return out;
}

double norm_spacetime_lambda(const std::vector<TrajectorySample>& traj, const NormSpec& spec, const Grid& grid,
                             const TimeWindow& window) {
  const auto p = spacetime_profile(traj, spec, grid, window, false);
  return *std::max_element(p.begin(), p.end());
}

double seminorm_bracket(const std::vector<TrajectorySample>& traj, const NormSpec& spec, const Grid& grid,
                        const TimeWindow& window) {
  const auto p = spacetime_profile(traj, spec, grid, window, true);
  return *std::max_element(p.begin(), p.end());
}

double characterization_ratio(const GridFunction& u, const Grid& grid, int m) {
  if (m < 1) throw PreconditionError("characterization ratio needs m >= 1");
  const GridFunction d1u = diff(u, 1, grid, DiffMode::one_sided);
  return norm_of(u, NormFamily::star2, m, grid) /
         (norm_of(u, NormFamily::star, m, grid) + norm_of(d1u, NormFamily::star, m - 1, grid));
}

double moser_ratio(const GridFunction& u, const GridFunction& v, const Grid& grid, int m) {
  GridFunction uv(grid);
  for (int i = 0; i < grid.n1; ++i)
    for (int j = 0; j < grid.n2; ++j) uv(i, j) = u(i, j) * v(i, j);
  const double u2 = norm_of(u, NormFamily::star2, m, grid);
  const double v2 = norm_of(v, NormFamily::star2, m, grid);
  return norm_of(uv, NormFamily::star2, m, grid) / (u2 * w1inf(v, grid, std::nullopt) + w1inf(u, grid, std::nullopt) * v2);
}

double sigma_division_ratio(const GridFunction& u, const Grid& grid, int m) {
  if (m < 1) throw PreconditionError("sigma-division ratio needs m >= 1");
  const double scale = std::max(max_abs(u), 1e-300);
  for (int j = 0; j < grid.n2; ++j) {
    if (std::abs(u(0, j)) > 1e-12 * scale) throw PreconditionError("sigma division: u does not vanish at x1 = 0");
  }
  // Wall value d1 u(0), since sigma'(0) = 1.
  const GridFunction d1u = diff(u, 1, grid, DiffMode::one_sided);
  GridFunction q(grid);
  for (int i = 0; i < grid.n1; ++i) {
    const double s = grid.sigma_values[static_cast<std::size_t>(i)];
    for (int j = 0; j < grid.n2; ++j) q(i, j) = i == 0 ? d1u(0, j) : u(i, j) / s;
  }
  return norm_of(q, NormFamily::star, m - 1, grid) / norm_of(u, NormFamily::star2, m, grid);
}

BatteryReport embedding_battery(const BatteryCase& c, const std::vector<std::pair<int, int>>& ladder, int m,
                                double L1, double L2) {
  if (m < 1 || m > kMaxOrder) throw PreconditionError("battery order must lie in [1, 4]");
  if (ladder.empty()) throw PreconditionError("empty refinement ladder");
  BatteryReport rep;
  rep.name = c.name;
  rep.m = m;
  for (const auto& [n1, n2] : ladder) {
    const Grid g = build_grid(n1, n2, L1, L2);
    const GridFunction u = sample(c.u, g);
    const GridFunction v = sample(c.v, g);
    BatteryLevel lv;
    lv.n1 = n1;
    lv.n2 = n2;
    lv.sigma_division = sigma_division_ratio(u, g, m);
    lv.characterization = characterization_ratio(u, g, m);
    lv.moser = moser_ratio(u, v, g, m);

    for (const GridFunction* f : {&u, &v}) {
      const double a = norm_of(*f, NormFamily::star, m, g);
      const double b = norm_of(*f, NormFamily::star2, m, g);
      const double d = norm_of(*f, NormFamily::star3, m, g);
      lv.chain = lv.chain && a <= b && b <= d;
    }
    rep.chain = rep.chain && lv.chain;
    rep.levels.push_back(lv);
  }
  const auto spread = [&](double BatteryLevel::*field, double& sup) {
    double lo = 1e300, hi = 0.0;
    for (const auto& lv : rep.levels) {
      lo = std::min(lo, lv.*field);
      hi = std::max(hi, lv.*field);
    }
    sup = hi;
    return hi > 0.0 ? (hi - lo) / hi : 0.0;
  };
  rep.max_spread = std::max({spread(&BatteryLevel::characterization, rep.sup_characterization),
                             spread(&BatteryLevel::moser, rep.sup_moser),
                             spread(&BatteryLevel::sigma_division, rep.sup_sigma_division)});
  return rep;
}

std::vector<BatteryCase> standard_battery_cases() {
  constexpr double pi = std::numbers::pi;
  return {
      {"sine-cosine", [](double x, double y) { return std::sin(pi * x) * std::cos(2.0 * pi * y); },
       [](double x, double y) { return std::exp(-x) * (1.0 + 0.5 * std::sin(2.0 * pi * y)); }},
      {"wall-linear", [](double x, double y) { return x * std::exp(-2.0 * x) * (2.0 + std::cos(2.0 * pi * y)); },
       [](double x, double y) { return std::cos(pi * x) + 0.3 * std::sin(4.0 * pi * y); }},
      {"quadratic-layer", [](double x, double y) { return x * x * (1.0 - x) * std::sin(2.0 * pi * y); },
       [](double x, double) { return 1.0 + x; }},
  };
}

}  // namespace mhdlab
