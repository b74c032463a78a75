#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mhdlab {

/// Conormal weight on [0, L1].
///
/// sigma(x) = x for x <= L1/4, sigma(x) = 1 for x >= 3L1/4, and a quintic
/// Hermite blend (C2 at both joints) in between.
class Sigma {
 public:
  explicit Sigma(double L1);

  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  double blend_start() const { return a_; }
  double blend_end() const { return b_; }

 private:
  double a_ = 0.0;
  double b_ = 0.0;
};

/// Node-centred slab [0, L1] x [0, L2), walls at x1 = 0 and x1 = L1,
/// periodic in x2.
struct Grid {
  int n1 = 0;
  int n2 = 0;
  double L1 = 0.0;
  double L2 = 0.0;
  double dx1 = 0.0;
  double dx2 = 0.0;
  int ghost = 2;
  Sigma sigma{1.0};
  std::vector<double> sigma_values;

  double x1(int i) const { return i * dx1; }
  double x2(int j) const { return j * dx2; }
  /// Trapezoid weight in x1 (half at the walls) times dx2.
  double weight(int i) const {
    return (i == 0 || i == n1 - 1) ? 0.5 * dx1 * dx2 : dx1 * dx2;
  }
};

/// Throws PreconditionError on bad sizes or lengths.
Grid build_grid(int n1, int n2, double L1, double L2);

/// Scalar function on the grid. Rows run over x1 and include `ghost` layers
/// on each side; x2 is contiguous.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(int n1, int n2, int ghost = 2);
  explicit GridFunction(const Grid& g) : GridFunction(g.n1, g.n2, g.ghost) {}

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int ghost() const { return ghost_; }

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }

  std::span<double> row(int i) { return {data_.data() + index(i, 0), static_cast<std::size_t>(n2_)}; }
  std::span<const double> row(int i) const {
    return {data_.data() + index(i, 0), static_cast<std::size_t>(n2_)};
  }

  /// All storage including ghost rows.
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  void fill(double value);
  /// Copy of the interior block, x2 fastest.
  std::vector<double> interior() const;
  void set_interior(std::span<const double> values);

  bool same_shape(const GridFunction& other) const {
    return n1_ == other.n1_ && n2_ == other.n2_ && ghost_ == other.ghost_;
  }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i + ghost_) * static_cast<std::size_t>(n2_) + static_cast<std::size_t>(j);
  }

  int n1_ = 0;
  int n2_ = 0;
  int ghost_ = 0;
  std::vector<double> data_;
};

/// y += a * x over all storage.
void axpy(double a, const GridFunction& x, GridFunction& y);
/// Interior max |f|.
double max_abs(const GridFunction& f);

enum class Parity { even, odd };

/// Fills ghost rows by reflection about both walls. For odd parity the wall
/// nodes are set to `wall_value` (0 unless a boundary violation is being
/// injected on purpose) and the reflection is odd about that value.
void fill_ghosts(GridFunction& f, Parity parity, double wall_value = 0.0);

enum class DiffMode {
  ghost,      ///< central stencil everywhere, reads ghost rows
  one_sided,  ///< central in the interior, one-sided 4th order near walls
};

/// 4th-order first derivative along axis 1 or 2. Ghost rows of the result
/// are zero.
GridFunction diff(const GridFunction& f, int axis, const Grid& grid, DiffMode mode = DiffMode::ghost);

/// Undivided 5-point fourth difference along `axis` (ghost rows required for
/// axis 1).
GridFunction fourth_difference(const GridFunction& f, int axis);

struct ConormalIndex {
  int a1 = 0;  ///< order of sigma * d/dx1
  int a2 = 0;  ///< order of d/dx2
  int a3 = 0;  ///< d/dx3 is identically zero in the 2.5-D reduction

  int order() const { return a1 + a2 + a3; }
};

/// (sigma d1)^a1 d2^a2 d3^a3 applied after d1^k, using one-sided closures.
/// Throws PreconditionError if |alpha| + 2k exceeds max_order.
GridFunction conormal_diff(const GridFunction& f, ConormalIndex alpha, int k, const Grid& grid,
                           int max_order = 4);

}  // namespace mhdlab
