#include "mhdlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mhdlab/error.hpp"

namespace mhdlab {

Sigma::Sigma(double L1) : a_(0.25 * L1), b_(0.75 * L1) {}

// Quintic Hermite blend from (sigma, sigma', sigma'') = (a, 1, 0) at x = a to
// (1, 0, 0) at x = b.
double Sigma::operator()(double x) const {
  if (x <= a_) return x;
  if (x >= b_) return 1.0;
  const double h = b_ - a_;
  const double t = (x - a_) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  const double h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  const double h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  return a_ * h0 + h * h1 + h3;
}

double Sigma::derivative(double x) const {
  if (x <= a_) return 1.0;
  if (x >= b_) return 0.0;
  const double h = b_ - a_;
  const double t = (x - a_) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
  const double d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
  return (a_ * d0 + h * d1 - d0) / h;
}

double Sigma::second_derivative(double x) const {
  if (x <= a_ || x >= b_) return 0.0;
  const double h = b_ - a_;
  const double t = (x - a_) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double s0 = -60.0 * t + 180.0 * t2 - 120.0 * t3;
  const double s1 = -36.0 * t + 96.0 * t2 - 60.0 * t3;
  return (a_ * s0 + h * s1 - s0) / (h * h);
}

Grid build_grid(int n1, int n2, double L1, double L2) {
  if (n1 < 9) throw PreconditionError("n1 too small (need n1 >= 9, got " + std::to_string(n1) + ")");
  if (n2 < 4) throw PreconditionError("n2 too small (need n2 >= 4, got " + std::to_string(n2) + ")");
  if (!(L1 > 0.0) || !(L2 > 0.0)) throw PreconditionError("domain lengths must be positive");

  Grid g;
  g.n1 = n1;
  g.n2 = n2;
  g.L1 = L1;
  g.L2 = L2;
  g.dx1 = L1 / (n1 - 1);
  g.dx2 = L2 / n2;
  g.ghost = 2;
  g.sigma = Sigma(L1);

  // The blend must stay monotone and below 1, which holds for L1 <= 20/9.
  constexpr int kSamples = 4000;
  for (int s = 0; s <= kSamples; ++s) {
    const double x = g.sigma.blend_start() + (g.sigma.blend_end() - g.sigma.blend_start()) * s / kSamples;
    if (g.sigma.derivative(x) < 0.0 || g.sigma(x) > 1.0 + 1e-15) {
      throw PreconditionError("L1 = " + std::to_string(L1) +
                              " gives a non-monotone conormal weight; need L1 <= 20/9");
    }
  }

  g.sigma_values.resize(static_cast<std::size_t>(n1));
  for (int i = 0; i < n1; ++i) g.sigma_values[static_cast<std::size_t>(i)] = g.sigma(g.x1(i));
  return g;
}

GridFunction::GridFunction(int n1, int n2, int ghost)
    : n1_(n1), n2_(n2), ghost_(ghost),
      data_(static_cast<std::size_t>(n1 + 2 * ghost) * static_cast<std::size_t>(n2), 0.0) {}

void GridFunction::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

std::vector<double> GridFunction::interior() const {
  std::vector<double> out(static_cast<std::size_t>(n1_) * static_cast<std::size_t>(n2_));
  std::copy(data_.begin() + static_cast<std::ptrdiff_t>(index(0, 0)),
            data_.begin() + static_cast<std::ptrdiff_t>(index(n1_, 0)), out.begin());
  return out;
}

void GridFunction::set_interior(std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(n1_) * static_cast<std::size_t>(n2_)) {
    throw PreconditionError("set_interior: size mismatch");
  }
  std::copy(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(index(0, 0)));
}

void axpy(double a, const GridFunction& x, GridFunction& y) {
  auto& yd = y.storage();
  const auto& xd = x.storage();
  for (std::size_t n = 0; n < yd.size(); ++n) yd[n] += a * xd[n];
}

double max_abs(const GridFunction& f) {
  double m = 0.0;
  for (int i = 0; i < f.n1(); ++i)
    for (double v : f.row(i)) m = std::max(m, std::abs(v));
  return m;
}

void fill_ghosts(GridFunction& f, Parity parity, double wall_value) {
  const int n1 = f.n1(), n2 = f.n2(), g = f.ghost();
  const int last = n1 - 1;
  if (parity == Parity::odd) {
    for (int j = 0; j < n2; ++j) {
      f(0, j) = wall_value;
      f(last, j) = wall_value;
    }
  }
  for (int r = 1; r <= g; ++r) {
    for (int j = 0; j < n2; ++j) {
      if (parity == Parity::even) {
        f(-r, j) = f(r, j);
        f(last + r, j) = f(last - r, j);
      } else {
        f(-r, j) = 2.0 * wall_value - f(r, j);
        f(last + r, j) = 2.0 * wall_value - f(last - r, j);
      }
    }
  }
}

GridFunction diff(const GridFunction& f, int axis, const Grid& grid, DiffMode mode) {
  GridFunction out(f.n1(), f.n2(), f.ghost());
  const int n1 = f.n1(), n2 = f.n2();
  if (axis == 2) {
    const double c = 1.0 / (12.0 * grid.dx2);
    for (int i = 0; i < n1; ++i) {
      auto src = f.row(i);
      auto dst = out.row(i);
      for (int j = 0; j < n2; ++j) {
        const int jm2 = (j - 2 + n2) % n2, jm1 = (j - 1 + n2) % n2;
        const int jp1 = (j + 1) % n2, jp2 = (j + 2) % n2;
        dst[static_cast<std::size_t>(j)] =
            c * (src[static_cast<std::size_t>(jm2)] - 8.0 * src[static_cast<std::size_t>(jm1)] +
                 8.0 * src[static_cast<std::size_t>(jp1)] - src[static_cast<std::size_t>(jp2)]);
      }
    }
    return out;
  }
  if (axis != 1) throw PreconditionError("diff: axis must be 1 or 2");

  const double c = 1.0 / (12.0 * grid.dx1);
  const int lo = mode == DiffMode::ghost ? 0 : 2;
  const int hi = mode == DiffMode::ghost ? n1 : n1 - 2;
  for (int i = lo; i < hi; ++i) {
    for (int j = 0; j < n2; ++j) {
      out(i, j) = c * (f(i - 2, j) - 8.0 * f(i - 1, j) + 8.0 * f(i + 1, j) - f(i + 2, j));
    }
  }
  if (mode == DiffMode::one_sided) {
    const int L = n1 - 1;
    for (int j = 0; j < n2; ++j) {
      out(0, j) = c * (-25.0 * f(0, j) + 48.0 * f(1, j) - 36.0 * f(2, j) + 16.0 * f(3, j) - 3.0 * f(4, j));
      out(1, j) = c * (-3.0 * f(0, j) - 10.0 * f(1, j) + 18.0 * f(2, j) - 6.0 * f(3, j) + f(4, j));
      out(L, j) =
          -c * (-25.0 * f(L, j) + 48.0 * f(L - 1, j) - 36.0 * f(L - 2, j) + 16.0 * f(L - 3, j) - 3.0 * f(L - 4, j));
      out(L - 1, j) =
          -c * (-3.0 * f(L, j) - 10.0 * f(L - 1, j) + 18.0 * f(L - 2, j) - 6.0 * f(L - 3, j) + f(L - 4, j));
    }
  }
  return out;
}

GridFunction fourth_difference(const GridFunction& f, int axis) {
  GridFunction out(f.n1(), f.n2(), f.ghost());
  const int n1 = f.n1(), n2 = f.n2();
  if (axis == 1) {
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j)
        out(i, j) = f(i - 2, j) - 4.0 * f(i - 1, j) + 6.0 * f(i, j) - 4.0 * f(i + 1, j) + f(i + 2, j);
    return out;
  }
  if (axis != 2) throw PreconditionError("fourth_difference: axis must be 1 or 2");
  for (int i = 0; i < n1; ++i) {
    auto src = f.row(i);
    auto dst = out.row(i);
    for (int j = 0; j < n2; ++j) {
      const auto at = [&](int jj) { return src[static_cast<std::size_t>((jj + n2) % n2)]; };
      dst[static_cast<std::size_t>(j)] = at(j - 2) - 4.0 * at(j - 1) + 6.0 * at(j) - 4.0 * at(j + 1) + at(j + 2);
    }
  }
  return out;
}

GridFunction conormal_diff(const GridFunction& f, ConormalIndex alpha, int k, const Grid& grid, int max_order) {
  if (alpha.a1 < 0 || alpha.a2 < 0 || alpha.a3 < 0 || k < 0) {
    throw PreconditionError("conormal_diff: negative derivative order");
  }
  if (alpha.order() + 2 * k > max_order) {
    throw PreconditionError("conormal_diff: order |alpha| + 2k = " + std::to_string(alpha.order() + 2 * k) +
                            " exceeds limit " + std::to_string(max_order));
  }
  GridFunction g = f;
  if (alpha.a3 > 0) {
    g.fill(0.0);
    return g;
  }
  for (int r = 0; r < k; ++r) g = diff(g, 1, grid, DiffMode::one_sided);
  for (int r = 0; r < alpha.a2; ++r) g = diff(g, 2, grid);
  for (int r = 0; r < alpha.a1; ++r) {
    g = diff(g, 1, grid, DiffMode::one_sided);
    for (int i = 0; i < g.n1(); ++i) {
      const double s = grid.sigma_values[static_cast<std::size_t>(i)];
      for (double& v : g.row(i)) v *= s;
    }
  }
  return g;
}

}  // namespace mhdlab
