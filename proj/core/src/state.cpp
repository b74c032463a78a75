#include "mhdlab/state.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mhdlab/error.hpp"

namespace mhdlab {

StateField::StateField(const Grid& grid, double lam) : lambda(lam) {
  for (auto& c : comp) c = GridFunction(grid);
}

void fill_ghosts(StateField& field, const ParityTable& parity, double wall_v1) {
  for (int c = 0; c < kNumComponents; ++c) {
    fill_ghosts(field[c], parity.at_wall[static_cast<std::size_t>(c)], c == kV1 ? wall_v1 : 0.0);
  }
}

StateField apply_ghost_fill(StateField field, const ParityTable& parity, double wall_v1) {
  fill_ghosts(field, parity, wall_v1);
  return field;
}

void axpy(double a, const StateField& x, StateField& y) {
  for (int c = 0; c < kNumComponents; ++c) axpy(a, x[c], y[c]);
}

double max_abs(const StateField& f) {
  double m = 0.0;
  for (const auto& c : f.comp) m = std::max(m, max_abs(c));
  return m;
}

std::pair<double, double> MaterialLaw::eos(double p) const {
  if (!(std::abs(p) <= max_abs_pressure)) {
    std::ostringstream os;
    os << "pressure " << p << " outside admissible range |p| <= " << max_abs_pressure;
    throw HyperbolicityError(os.str());
  }
  const double r = rho(p);
  const double rp = rho_p(p);
  if (!(r > 0.0) || !(rp > 0.0)) {
    std::ostringstream os;
    os << "equation of state '" << tag << "' not hyperbolic at p = " << p << " (rho = " << r << ", rho_p = " << rp
       << ")";
    throw HyperbolicityError(os.str());
  }
  return {r, rp};
}

MaterialLaw MaterialLaw::exponential() {
  MaterialLaw law;
  law.tag = "exp";
  law.rho = [](double p) { return std::exp(p); };
  law.rho_p = [](double p) { return std::exp(p); };
  law.rho_pp = [](double p) { return std::exp(p); };
  return law;
}

MaterialLaw MaterialLaw::affine(double rho0, double slope) {
  if (!(rho0 > 0.0) || !(slope > 0.0)) throw PreconditionError("affine law needs rho0 > 0 and slope > 0");
  MaterialLaw law;
  std::ostringstream os;
  os.precision(17);
  os << "affine:" << rho0 << ":" << slope;
  law.tag = os.str();
  law.rho = [rho0, slope](double p) { return rho0 + slope * p; };
  law.rho_p = [slope](double) { return slope; };
  law.rho_pp = [](double) { return 0.0; };
  return law;
}

MaterialLaw MaterialLaw::from_tag(const std::string& tag) {
  if (tag == "exp") return exponential();
  if (tag.rfind("affine:", 0) == 0) {
    const auto rest = tag.substr(7);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw ConfigError("EOS tag '" + tag + "' must be affine:<rho0>:<slope>");
    try {
      return affine(std::stod(rest.substr(0, colon)), std::stod(rest.substr(colon + 1)));
    } catch (const std::logic_error&) {
      throw ConfigError("EOS tag '" + tag + "' has non-numeric parameters");
    }
  }
  throw ConfigError("unknown EOS tag '" + tag + "'");
}

double p_to_q(double p, const std::array<double, 3>& H, double lambda) {
  const double h2 = H[0] * H[0] + H[1] * H[1] + H[2] * H[2];
  return lambda * p + h2 / (2.0 * lambda);
}

double q_to_p(double q, const std::array<double, 3>& H, double lambda) {
  const double h2 = H[0] * H[0] + H[1] * H[1] + H[2] * H[2];
  return q / lambda - h2 / (2.0 * lambda * lambda);
}

namespace {

struct Profile {
  double C;   // normalization so that max chi = 1
  double ell; // support length
  int r;

  double chi(double x) const {
    if (x <= 0.0 || x >= ell) return 0.0;
    const double xi = x / ell;
    return C * std::pow(xi * (1.0 - xi), r);
  }
  double dchi(double x) const {
    if (x <= 0.0 || x >= ell) return 0.0;
    const double xi = x / ell;
    return C * r * std::pow(xi * (1.0 - xi), r - 1) * (1.0 - 2.0 * xi) / ell;
  }
};

double bump(double r) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double s = 1.0 - r * r;
  const double s2 = s * s;
  return s2 * s2 * s;
}

void validate(const DataFamily& f) {
  if (f.vanishing_order < 4) throw PreconditionError("cutoff vanishing order must be >= 4");
  if (!(f.support > 0.0 && f.support <= 1.0)) throw PreconditionError("support fraction must lie in (0, 1]");
  if (!(f.pulse_width > 0.0) || f.pulse_center - f.pulse_width <= 0.0 || f.pulse_center + f.pulse_width >= 1.0) {
    throw PreconditionError("gradient pulse must be supported strictly inside (0, L1)");
  }
  if (f.mode_v < 1 || f.mode_H < 1) throw PreconditionError("stream-function modes must be >= 1");
}

}  // namespace

double gradient_pulse(const DataFamily& family, const Grid& grid, double x1) {
  const double c = family.pulse_center * grid.L1;
  const double w = family.pulse_width * grid.L1;
  return family.amp_phi * bump((x1 - c) / w);
}

double gradient_pulse_l2(const DataFamily& family, const Grid& grid) {
  // int_{-1}^{1} (1 - r^2)^10 dr = 2 prod_{k=1}^{10} 2k / (2k + 1)
  double integral = 2.0;
  for (int k = 1; k <= 10; ++k) integral *= (2.0 * k) / (2.0 * k + 1.0);
  const double w = family.pulse_width * grid.L1;
  return std::abs(family.amp_phi) * std::sqrt(grid.L2 * w * integral);
}

StateField make_initial_data(const DataFamily& family, const Grid& grid, double lambda, const MaterialLaw& law) {
  validate(family);
  if (lambda < 1.0) throw PreconditionError("lambda must be >= 1");

  double phase[4] = {0.0, 0.0, 0.0, 0.0};
  double factor[4] = {1.0, 1.0, 1.0, 1.0};
  if (family.seed != 0) {
    std::mt19937_64 rng(family.seed);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> fa(0.8, 1.2);
    for (int n = 0; n < 4; ++n) {
      phase[n] = ph(rng);
      factor[n] = fa(rng);
    }
  }

  const Profile prof{std::pow(4.0, family.vanishing_order), family.support * grid.L1, family.vanishing_order};
  const double kv = 2.0 * std::numbers::pi * family.mode_v / grid.L2;
  const double kh = 2.0 * std::numbers::pi * family.mode_H / grid.L2;
  const double av = family.amp_v * factor[0];
  const double ah = family.amp_H * factor[1];
  const double av3 = family.amp_v3 * factor[2];
  const double ah3 = family.amp_H3 * factor[3];
  const bool ill = family.kind == DataKind::ill_prepared;
  const double c = family.pulse_center * grid.L1;
  const double w = family.pulse_width * grid.L1;

  StateField u(grid, lambda);
  for (int i = 0; i < grid.n1; ++i) {
    const double x = grid.x1(i);
    const double chi = prof.chi(x), dchi = prof.dchi(x);
    for (int j = 0; j < grid.n2; ++j) {
      const double y = grid.x2(j);
      // psi_v = av chi sin(kv y + ph) / kv, psi_H = ah chi sin(kh y + ph) / kh;
      // field = (d2 psi, -d1 psi).
      const double sv = std::sin(kv * y + phase[0]), cv = std::cos(kv * y + phase[0]);
      const double sh = std::sin(kh * y + phase[1]), ch = std::cos(kh * y + phase[1]);
      u[kV1](i, j) = av * chi * cv;
      u[kV2](i, j) = -av * dchi * sv / kv;
      u[kV3](i, j) = av3 * chi * std::cos(kv * y + phase[2]);
      u[kH1](i, j) = ah * chi * ch;
      u[kH2](i, j) = -ah * dchi * sh / kh;
      u[kH3](i, j) = ah3 * chi * std::sin(kh * y + phase[3]);
      if (ill) {
        u[kV1](i, j) += gradient_pulse(family, grid, x);
        u[kQ](i, j) = family.amp_q * bump((x - c) / w);
      }
    }
  }
  // Wall nodes are exact zeros already (chi(0) = 0, pulse compact); make it
  // explicit for x1 = L1 where chi may be evaluated at a rounding offset.
  for (int j = 0; j < grid.n2; ++j) {
    u[kV1](0, j) = u[kV1](grid.n1 - 1, j) = 0.0;
    u[kH1](0, j) = u[kH1](grid.n1 - 1, j) = 0.0;
  }
  fill_ghosts(u);

  for (int i = 0; i < grid.n1; ++i) {
    for (int j = 0; j < grid.n2; ++j) {
      const std::array<double, 3> H{u[kH1](i, j), u[kH2](i, j), u[kH3](i, j)};
      law.eos(q_to_p(u[kQ](i, j), H, lambda));
    }
  }
  return u;
}

GridFunction divergence(const GridFunction& f1, const GridFunction& f2, const Grid& grid) {
  GridFunction a = f1, b = f2;
  fill_ghosts(a, Parity::odd);
  fill_ghosts(b, Parity::even);
  GridFunction d = diff(a, 1, grid);
  axpy(1.0, diff(b, 2, grid), d);
  return d;
}

CompatibilityReport check_compatibility(const StateField& state, const Grid& grid, double wall_tolerance,
                                        double div_tolerance) {
  CompatibilityReport rep;
  rep.wall_tolerance = wall_tolerance;
  rep.div_tolerance = div_tolerance;
  for (int j = 0; j < grid.n2; ++j) {
    for (int i : {0, grid.n1 - 1}) {
      rep.max_wall_v1 = std::max(rep.max_wall_v1, std::abs(state[kV1](i, j)));
      rep.max_wall_H1 = std::max(rep.max_wall_H1, std::abs(state[kH1](i, j)));
    }
  }
  rep.max_div_H = max_abs(divergence(state[kH1], state[kH2], grid));
  return rep;
}

}  // namespace mhdlab
