#pragma once

#include <array>
#include <vector>

#include "mhdlab/grid.hpp"
#include "mhdlab/state.hpp"

namespace mhdlab {

/// Row-major 7x7 matrix, ordered (q, v1, v2, v3, H1, H2, H3).
using Mat7 = std::array<double, 49>;
using Vec7 = std::array<double, 7>;

inline double& at(Mat7& m, int r, int c) { return m[static_cast<std::size_t>(7 * r + c)]; }
inline double at(const Mat7& m, int r, int c) { return m[static_cast<std::size_t>(7 * r + c)]; }

Vec7 matvec(const Mat7& m, const Vec7& x);

/// Point values of the unknown.
struct NodeState {
  double q = 0.0;
  std::array<double, 3> v{};
  std::array<double, 3> H{};

  static NodeState from(const StateField& u, int i, int j);
  Vec7 as_vector() const { return {q, v[0], v[1], v[2], H[0], H[1], H[2]}; }
};

/// Density and a = rho_p / rho at a node; throws HyperbolicityError.
struct NodeCoefficients {
  double rho = 1.0;
  double a = 1.0;
  double p = 0.0;
};
NodeCoefficients node_coefficients(const NodeState& s, double lambda, const MaterialLaw& law);

Mat7 assemble_A0(const NodeState& s, double lambda, const MaterialLaw& law);
/// lambda-free part of the j-th spatial coefficient, j in {1, 2, 3}.
Mat7 assemble_Aj(const NodeState& s, int j, double lambda, const MaterialLaw& law);
Mat7 constant_Cj(int j);

/// A0 and A_j from precomputed coefficients (hot path).
Mat7 assemble_A0(const NodeState& s, const NodeCoefficients& k, double lambda);
/// (A_j + lam_c C_j) du without forming the matrix.
Vec7 apply_Aj(const NodeState& s, const NodeCoefficients& k, int j, double lambda, const Vec7& du, double lam_c);

/// Cholesky factor of an SPD 7x7 matrix; pivots below 1e-10 throw
/// HyperbolicityError.
class Cholesky7 {
 public:
  explicit Cholesky7(const Mat7& a);
  Vec7 solve(const Vec7& b) const;
  double min_pivot() const { return min_pivot_; }

 private:
  Mat7 l_{};
  double min_pivot_ = 0.0;
};

/// One 7x7 matrix per interior node.
struct MatrixField {
  int n1 = 0;
  int n2 = 0;
  std::vector<Mat7> data;

  MatrixField() = default;
  MatrixField(int n1_, int n2_) : n1(n1_), n2(n2_), data(static_cast<std::size_t>(n1_) * static_cast<std::size_t>(n2_)) {}
  Mat7& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(j)]; }
  const Mat7& operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(j)];
  }
};

MatrixField assemble_A0(const StateField& u, const MaterialLaw& law);
MatrixField assemble_Aj(const StateField& u, int j, const MaterialLaw& law);

/// d_t A0 + sum_j d_j A_j: chain rule in time (u_t supplied), discrete
/// 4th-order differences of the assembled A_j in space.
/// `wall_v1` must match the ghost fill used to produce u_t.
MatrixField div_A_bar(const StateField& u, const StateField& u_t, const Grid& grid, const MaterialLaw& law,
                      double wall_v1 = 0.0);

}  // namespace mhdlab
