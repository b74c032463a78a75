#include "mhdlab/acoustic.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fftw_support.hpp"
#include "mhdlab/error.hpp"
#include "mhdlab/helmholtz.hpp"

namespace mhdlab {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

// In-place 2-D r2r transform pair on a rows x n2 buffer.
class Transform2D {
 public:
  Transform2D(int rows, int n2, fftw_r2r_kind k1, fftw_r2r_kind k1_inv)
      : rows_(rows), n2_(n2), size_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(n2)) {
    buf_ = static_cast<double*>(fftw_malloc(sizeof(double) * size_));
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    fwd_ = fftw_plan_r2r_2d(rows, n2, buf_, buf_, k1, FFTW_R2HC, FFTW_ESTIMATE);
    bwd_ = fftw_plan_r2r_2d(rows, n2, buf_, buf_, k1_inv, FFTW_HC2R, FFTW_ESTIMATE);
    if (fwd_ == nullptr || bwd_ == nullptr) throw SolverError("FFTW planning failed");
  }
  ~Transform2D() {
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Transform2D(const Transform2D&) = delete;
  Transform2D& operator=(const Transform2D&) = delete;

  double* data() { return buf_; }
  std::size_t size() const { return size_; }
  void forward() { fftw_execute(fwd_); }
  void backward() { fftw_execute(bwd_); }

  void load(const GridFunction& f, int row0) {
    for (int r = 0; r < rows_; ++r)
      for (int j = 0; j < n2_; ++j) buf_[index(r, j)] = f(r + row0, j);
  }
  void store(GridFunction& f, int row0, double scale) const {
    for (int r = 0; r < rows_; ++r)
      for (int j = 0; j < n2_; ++j) f(r + row0, j) = scale * buf_[index(r, j)];
  }
  std::size_t index(int r, int j) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(n2_) + static_cast<std::size_t>(j);
  }

 private:
  int rows_, n2_;
  std::size_t size_;
  double* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

// Halfcomplex access: coefficient of exp(i kappa2 x2) for 0 <= kk <= n2/2.
cplx get_hc(const std::vector<double>& y, std::size_t row_offset, int n2, int kk) {
  const double re = y[row_offset + static_cast<std::size_t>(kk)];
  const bool real_only = kk == 0 || 2 * kk == n2;
  const double im = real_only ? 0.0 : y[row_offset + static_cast<std::size_t>(n2 - kk)];
  return {re, im};
}

void set_hc(double* y, std::size_t row_offset, int n2, int kk, cplx c) {
  y[row_offset + static_cast<std::size_t>(kk)] = c.real();
  if (!(kk == 0 || 2 * kk == n2)) y[row_offset + static_cast<std::size_t>(n2 - kk)] = c.imag();
}

}  // namespace

AcousticField::AcousticField(const Grid& grid) : q(grid), v{GridFunction(grid), GridFunction(grid), GridFunction(grid)} {}

AcousticField AcousticField::from(const StateField& u) {
  AcousticField f;
  f.q = u[kQ];
  f.v = {u[kV1], u[kV2], u[kV3]};
  return f;
}

double AcousticMode::frequency(const Grid& grid) const {
  const double a = kPi * k1 / grid.L1;
  const double b = 2.0 * kPi * k2 / grid.L2;
  return lambda * std::sqrt(mu1 * mu2) * std::sqrt(a * a + b * b);
}

AcousticField modal_solution(const AcousticMode& mode, const Grid& grid, double t) {
  if (mode.k1 < 0 || mode.k2 < 0) throw PreconditionError("modal_solution: mode indices must be non-negative");
  AcousticField f(grid);
  const double a = kPi * mode.k1 / grid.L1;
  const double b = 2.0 * kPi * mode.k2 / grid.L2;
  const double K = std::sqrt(a * a + b * b);
  const double w = mode.frequency(grid);
  const double vamp = K > 0.0 ? mode.amplitude * std::sqrt(mode.mu2 / mode.mu1) * std::sin(w * t) / K : 0.0;
  for (int i = 0; i < grid.n1; ++i) {
    const double x = grid.x1(i);
    for (int j = 0; j < grid.n2; ++j) {
      const double y = grid.x2(j);
      f.q(i, j) = mode.amplitude * std::cos(a * x) * std::cos(b * y) * std::cos(w * t);
      f.v[0](i, j) = vamp * a * std::sin(a * x) * std::cos(b * y);
      f.v[1](i, j) = vamp * b * std::cos(a * x) * std::sin(b * y);
    }
  }
  // sin(a L1) is rounding-level, not zero.
  for (int j = 0; j < grid.n2; ++j) {
    f.v[0](0, j) = 0.0;
    f.v[0](grid.n1 - 1, j) = 0.0;
  }
  return f;
}

std::vector<AcousticField> run_linear(const AcousticField& initial, const Grid& grid, double lambda, double mu1,
                                      double mu2, const std::vector<double>& times, AcousticSymbol symbol) {
  if (!(lambda > 0.0 && mu1 > 0.0 && mu2 > 0.0)) throw PreconditionError("run_linear: coefficients must be positive");
  const int n1 = grid.n1, n2 = grid.n2;
  double scale = 0.0;
  for (const auto* f : {&initial.q, &initial.v[0], &initial.v[1]}) scale = std::max(scale, max_abs(*f));
  for (int j = 0; j < n2; ++j) {
    if (std::abs(initial.v[0](0, j)) > 1e-12 * scale || std::abs(initial.v[0](n1 - 1, j)) > 1e-12 * scale) {
      throw PreconditionError("run_linear: v1 must vanish at the walls");
    }
  }

  Transform2D tq(n1, n2, FFTW_REDFT00, FFTW_REDFT00);
  Transform2D tv2(n1, n2, FFTW_REDFT00, FFTW_REDFT00);
  Transform2D tv1(n1 - 2, n2, FFTW_RODFT00, FFTW_RODFT00);
  tq.load(initial.q, 0);
  tv2.load(initial.v[1], 0);
  tv1.load(initial.v[0], 1);
  tq.forward();
  tv2.forward();
  tv1.forward();
  const std::vector<double> Yq(tq.data(), tq.data() + tq.size());
  const std::vector<double> Yv2(tv2.data(), tv2.data() + tv2.size());
  const std::vector<double> Yv1(tv1.data(), tv1.data() + tv1.size());

  const auto kappa1 = [&](int k1) {
    if (k1 == 0 || k1 == n1 - 1) return 0.0;  // no sine partner for v1
    return symbol == AcousticSymbol::exact ? kPi * k1 / grid.L1
                                           : detail::difference_symbol(kPi * k1 / (n1 - 1)) / grid.dx1;
  };
  const auto kappa2 = [&](int kk) {
    if (2 * kk == n2) return 0.0;
    return symbol == AcousticSymbol::exact ? 2.0 * kPi * kk / grid.L2
                                           : detail::difference_symbol(2.0 * kPi * kk / n2) / grid.dx2;
  };
  const double c = lambda * std::sqrt(mu1 * mu2);
  const double norm = 1.0 / (2.0 * (n1 - 1) * static_cast<double>(n2));

  std::vector<AcousticField> out;
  out.reserve(times.size());
  for (double t : times) {
    for (int k1 = 0; k1 < n1; ++k1) {
      const double a = kappa1(k1);
      const std::size_t row = static_cast<std::size_t>(k1) * static_cast<std::size_t>(n2);
      const bool has_v1 = k1 >= 1 && k1 <= n1 - 2;
      const std::size_t row1 = has_v1 ? static_cast<std::size_t>(k1 - 1) * static_cast<std::size_t>(n2) : 0;
      for (int kk = 0; kk <= n2 / 2; ++kk) {
        const double b = kappa2(kk);
        const cplx Q0 = get_hc(Yq, row, n2, kk);
        const cplx V20 = get_hc(Yv2, row, n2, kk);
        const cplx V10 = has_v1 ? get_hc(Yv1, row1, n2, kk) : cplx{};
        const double K2 = a * a + b * b;
        cplx Q = Q0, V1 = V10, V2 = V20;
        if (K2 > 0.0) {
          const double w = c * std::sqrt(K2);
          const cplx D0 = a * V10 + cplx(0.0, b) * V20;
          const double cw = std::cos(w * t), sw = std::sin(w * t);
          Q = Q0 * cw - (lambda * mu1 / w) * D0 * sw;
          const cplx I = Q0 * (sw / w) - (lambda * mu1 / (w * w)) * D0 * (1.0 - cw);
          V1 = V10 + lambda * mu2 * a * I;
          V2 = V20 - cplx(0.0, lambda * mu2 * b) * I;
        }
        set_hc(tq.data(), row, n2, kk, Q);
        set_hc(tv2.data(), row, n2, kk, V2);
        if (has_v1) set_hc(tv1.data(), row1, n2, kk, V1);
      }
    }
    tq.backward();
    tv2.backward();
    tv1.backward();
    AcousticField f(grid);
    tq.store(f.q, 0, norm);
    tv2.store(f.v[1], 0, norm);
    tv1.store(f.v[0], 1, norm);
    f.v[2] = initial.v[2];
    fill_ghosts(f.q, Parity::even);
    fill_ghosts(f.v[0], Parity::odd);
    fill_ghosts(f.v[1], Parity::even);
    fill_ghosts(f.v[2], Parity::even);
    out.push_back(std::move(f));
  }
  return out;
}

double acoustic_energy(const AcousticField& f, const Grid& grid, double mu1, double mu2, double x1_lo, double x1_hi) {
  // Trapezoid on the nodes inside the window: half weight on its end nodes.
  int i0 = grid.n1, i1 = -1;
  for (int i = 0; i < grid.n1; ++i) {
    const double x = grid.x1(i);
    if (x >= x1_lo - 1e-12 * grid.L1 && x <= x1_hi + 1e-12 * grid.L1) {
      i0 = std::min(i0, i);
      i1 = std::max(i1, i);
    }
  }
  if (i1 < i0) return 0.0;
  double e = 0.0;
  for (int i = i0; i <= i1; ++i) {
    const double w = (i == i0 || i == i1) ? 0.5 * grid.dx1 * grid.dx2 : grid.dx1 * grid.dx2;
    for (int j = 0; j < grid.n2; ++j) {
      const double v2 = f.v[0](i, j) * f.v[0](i, j) + f.v[1](i, j) * f.v[1](i, j) + f.v[2](i, j) * f.v[2](i, j);
      e += w * (f.q(i, j) * f.q(i, j) / mu1 + v2 / mu2);
    }
  }
  return 0.5 * e;
}

LayerDecayReport pulse_layer_decay(const DataFamily& family, const Grid& grid, double lambda, const MaterialLaw& law,
                                   double window, int samples) {
  if (!(window > 0.0 && window < 1.0) || samples < 2) throw PreconditionError("pulse_layer_decay: bad window");
  const double mu1 = law.mu1(), mu2 = law.mu2();
  const double speed = lambda * std::sqrt(mu1 * mu2);
  const double right_edge = (family.pulse_center + family.pulse_width) * grid.L1;
  const double x_hi = window * grid.L1;
  if (right_edge >= grid.L1) throw PreconditionError("pulse_layer_decay: pulse touches the far wall");

  LayerDecayReport rep;
  rep.return_time = ((grid.L1 - right_edge) + (grid.L1 - x_hi)) / speed;
  for (int k = 0; k < samples; ++k) rep.times.push_back(rep.return_time * k / samples);

  AcousticField pulse(grid);
  for (int i = 1; i < grid.n1 - 1; ++i) {
    const double v = gradient_pulse(family, grid, grid.x1(i));
    for (int j = 0; j < grid.n2; ++j) pulse.v[0](i, j) = v;
  }
  const auto traj = run_linear(pulse, grid, lambda, mu1, mu2, rep.times, AcousticSymbol::discrete);
  rep.initial_energy = acoustic_energy(traj.front(), grid, mu1, mu2, 0.0, x_hi);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double r = rep.initial_energy > 0.0 ? acoustic_energy(traj[k], grid, mu1, mu2, 0.0, x_hi) / rep.initial_energy
                                              : 0.0;
    rep.ratios.push_back(r);
    if (r < rep.min_ratio) {
      rep.min_ratio = r;
      rep.time_of_min = rep.times[k];
    }
  }

  // Pulse plus the vortical velocity of the family: the solenoidal part must not move.
  DataFamily with_vortex = family;
  with_vortex.kind = DataKind::ill_prepared;
  const StateField u = make_initial_data(with_vortex, grid, lambda, law);
  AcousticField full = AcousticField::from(u);
  full.q.fill(0.0);
  const auto traj_full = run_linear(full, grid, lambda, mu1, mu2, rep.times, AcousticSymbol::discrete);
  Helmholtz h(grid);
  const PlaneVector s0 = h.project_S(PlaneVector{traj_full.front().v[0], traj_full.front().v[1]});
  const double scale = std::max(max_abs(full.v[0]), max_abs(full.v[1]));
  for (const AcousticField& f : traj_full) {
    const PlaneVector s = h.project_S(PlaneVector{f.v[0], f.v[1]});
    for (int i = 0; i < grid.n1; ++i)
      for (int j = 0; j < grid.n2; ++j) {
        rep.ps_drift = std::max(rep.ps_drift, std::abs(s.c1(i, j) - s0.c1(i, j)) / scale);
        rep.ps_drift = std::max(rep.ps_drift, std::abs(s.c2(i, j) - s0.c2(i, j)) / scale);
      }
  }
  return rep;
}

ResidualTerms residual_terms(const StateField& u_in, const StateField& u_t, const Grid& grid, const MaterialLaw& law) {
  if (u_t.n1() != grid.n1 || u_t.n2() != grid.n2) throw PreconditionError("residual_terms: missing time derivative");
  const StateField u = apply_ghost_fill(u_in);
  const double lambda = u.lambda;
  std::array<GridFunction, kNumComponents> d1, d2;
  for (int c = 0; c < kNumComponents; ++c) {
    d1[static_cast<std::size_t>(c)] = diff(u[c], 1, grid);
    d2[static_cast<std::size_t>(c)] = diff(u[c], 2, grid);
  }
  const double rho_bar = law.rho_bar();
  const double a_bar = law.rho_p_bar() / rho_bar;
  const double mu1 = law.mu1(), mu2 = law.mu2();

  ResidualTerms r;
  r.G0 = GridFunction(grid);
  r.G = {GridFunction(grid), GridFunction(grid), GridFunction(grid)};
  for (int i = 0; i < grid.n1; ++i) {
    for (int j = 0; j < grid.n2; ++j) {
      const std::array<double, 3> v{u[kV1](i, j), u[kV2](i, j), u[kV3](i, j)};
      const std::array<double, 3> H{u[kH1](i, j), u[kH2](i, j), u[kH3](i, j)};
      const double p = q_to_p(u[kQ](i, j), H, lambda);
      const auto [rho, rho_p] = law.eos(p);
      const double a = rho_p / rho;
      const auto vgrad = [&](int c) {
        const auto C = static_cast<std::size_t>(c);
        return v[0] * d1[C](i, j) + v[1] * d2[C](i, j);
      };
      const auto Hgrad = [&](int c) {
        const auto C = static_cast<std::size_t>(c);
        return H[0] * d1[C](i, j) + H[1] * d2[C](i, j);
      };
      double hmat = 0.0;
      for (int c = 0; c < 3; ++c) hmat += H[static_cast<std::size_t>(c)] / lambda * (u_t[kH1 + c](i, j) + vgrad(kH1 + c));
      r.G0(i, j) = mu1 * ((a_bar - a) * u_t[kQ](i, j) - a * (vgrad(kQ) - hmat));
      for (int c = 0; c < 3; ++c) {
        r.G[static_cast<std::size_t>(c)](i, j) =
            mu2 * ((rho_bar - rho) * u_t[kV1 + c](i, j) - rho * vgrad(kV1 + c) + Hgrad(kH1 + c));
      }
    }
  }
  return r;
}

}  // namespace mhdlab
