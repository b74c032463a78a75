#include "mhdlab/flux.hpp"

#include <cmath>
#include <sstream>

#include "mhdlab/error.hpp"

namespace mhdlab {

Vec7 matvec(const Mat7& m, const Vec7& x) {
  Vec7 y{};
  for (int r = 0; r < 7; ++r) {
    double s = 0.0;
    for (int c = 0; c < 7; ++c) s += at(m, r, c) * x[static_cast<std::size_t>(c)];
    y[static_cast<std::size_t>(r)] = s;
  }
  return y;
}

NodeState NodeState::from(const StateField& u, int i, int j) {
  NodeState s;
  s.q = u[kQ](i, j);
  s.v = {u[kV1](i, j), u[kV2](i, j), u[kV3](i, j)};
  s.H = {u[kH1](i, j), u[kH2](i, j), u[kH3](i, j)};
  return s;
}

NodeCoefficients node_coefficients(const NodeState& s, double lambda, const MaterialLaw& law) {
  NodeCoefficients k;
  k.p = q_to_p(s.q, s.H, lambda);
  const auto [rho, rho_p] = law.eos(k.p);
  k.rho = rho;
  k.a = rho_p / rho;
  return k;
}

Mat7 assemble_A0(const NodeState& s, const NodeCoefficients& k, double lambda) {
  Mat7 m{};
  const double h[3] = {s.H[0] / lambda, s.H[1] / lambda, s.H[2] / lambda};
  at(m, 0, 0) = k.a;
  for (int i = 0; i < 3; ++i) {
    at(m, 0, 4 + i) = at(m, 4 + i, 0) = -k.a * h[i];
    at(m, 1 + i, 1 + i) = k.rho;
    for (int c = 0; c < 3; ++c) at(m, 4 + i, 4 + c) = (i == c ? 1.0 : 0.0) + k.a * h[i] * h[c];
  }
  return m;
}

Mat7 assemble_A0(const NodeState& s, double lambda, const MaterialLaw& law) {
  return assemble_A0(s, node_coefficients(s, lambda, law), lambda);
}

Mat7 assemble_Aj(const NodeState& s, int j, double lambda, const MaterialLaw& law) {
  if (j < 1 || j > 3) throw PreconditionError("assemble_Aj: j must be 1, 2 or 3");
  const NodeCoefficients k = node_coefficients(s, lambda, law);
  const double vj = s.v[static_cast<std::size_t>(j - 1)];
  const double Hj = s.H[static_cast<std::size_t>(j - 1)];
  const double h[3] = {s.H[0] / lambda, s.H[1] / lambda, s.H[2] / lambda};
  Mat7 m{};
  at(m, 0, 0) = k.a * vj;
  for (int i = 0; i < 3; ++i) {
    at(m, 0, 4 + i) = at(m, 4 + i, 0) = -k.a * h[i] * vj;
    at(m, 1 + i, 1 + i) = k.rho * vj;
    at(m, 1 + i, 4 + i) = at(m, 4 + i, 1 + i) = -Hj;
    for (int c = 0; c < 3; ++c) at(m, 4 + i, 4 + c) = ((i == c ? 1.0 : 0.0) + k.a * h[i] * h[c]) * vj;
  }
  return m;
}

Mat7 constant_Cj(int j) {
  if (j < 1 || j > 3) throw PreconditionError("constant_Cj: j must be 1, 2 or 3");
  Mat7 m{};
  at(m, 0, j) = at(m, j, 0) = 1.0;
  return m;
}

Vec7 apply_Aj(const NodeState& s, const NodeCoefficients& k, int j, double lambda, const Vec7& du, double lam_c) {
  const double vj = s.v[static_cast<std::size_t>(j - 1)];
  const double Hj = s.H[static_cast<std::size_t>(j - 1)];
  const double h0 = s.H[0] / lambda, h1 = s.H[1] / lambda, h2 = s.H[2] / lambda;
  const double hdH = h0 * du[4] + h1 * du[5] + h2 * du[6];
  Vec7 r;
  r[0] = k.a * vj * (du[0] - hdH) + lam_c * du[static_cast<std::size_t>(j)];
  r[1] = k.rho * vj * du[1] - Hj * du[4];
  r[2] = k.rho * vj * du[2] - Hj * du[5];
  r[3] = k.rho * vj * du[3] - Hj * du[6];
  r[static_cast<std::size_t>(j)] += lam_c * du[0];
  const double coupling = k.a * (hdH - du[0]) * vj;
  r[4] = vj * du[4] + h0 * coupling - Hj * du[1];
  r[5] = vj * du[5] + h1 * coupling - Hj * du[2];
  r[6] = vj * du[6] + h2 * coupling - Hj * du[3];
  return r;
}

Cholesky7::Cholesky7(const Mat7& a) {
  min_pivot_ = INFINITY;
  for (int c = 0; c < 7; ++c) {
    double d = at(a, c, c);
    for (int k = 0; k < c; ++k) d -= at(l_, c, k) * at(l_, c, k);
    min_pivot_ = std::min(min_pivot_, d);
    if (!(d >= 1e-10)) {
      std::ostringstream os;
      os << "A0 not positive definite (Cholesky pivot " << d << " in column " << c << ")";
      throw HyperbolicityError(os.str());
    }
    const double lcc = std::sqrt(d);
    at(l_, c, c) = lcc;
    for (int r = c + 1; r < 7; ++r) {
      double s = at(a, r, c);
      for (int k = 0; k < c; ++k) s -= at(l_, r, k) * at(l_, c, k);
      at(l_, r, c) = s / lcc;
    }
  }
}

Vec7 Cholesky7::solve(const Vec7& b) const {
  Vec7 y{};
  for (int r = 0; r < 7; ++r) {
    double s = b[static_cast<std::size_t>(r)];
    for (int k = 0; k < r; ++k) s -= at(l_, r, k) * y[static_cast<std::size_t>(k)];
    y[static_cast<std::size_t>(r)] = s / at(l_, r, r);
  }
  Vec7 x{};
  for (int r = 6; r >= 0; --r) {
    double s = y[static_cast<std::size_t>(r)];
    for (int k = r + 1; k < 7; ++k) s -= at(l_, k, r) * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(r)] = s / at(l_, r, r);
  }
  return x;
}

MatrixField assemble_A0(const StateField& u, const MaterialLaw& law) {
  MatrixField m(u.n1(), u.n2());
  for (int i = 0; i < u.n1(); ++i)
    for (int j = 0; j < u.n2(); ++j) m(i, j) = assemble_A0(NodeState::from(u, i, j), u.lambda, law);
  return m;
}

MatrixField assemble_Aj(const StateField& u, int j, const MaterialLaw& law) {
  MatrixField m(u.n1(), u.n2());
  for (int i = 0; i < u.n1(); ++i)
    for (int jj = 0; jj < u.n2(); ++jj) m(i, jj) = assemble_Aj(NodeState::from(u, i, jj), j, u.lambda, law);
  return m;
}

MatrixField div_A_bar(const StateField& u_in, const StateField& u_t, const Grid& grid, const MaterialLaw& law,
                      double wall_v1) {
  const StateField u = apply_ghost_fill(u_in, {}, wall_v1);
  const double lambda = u.lambda;
  const int n1 = u.n1(), n2 = u.n2(), g = u[0].ghost();

  // A1 on interior plus ghost rows, A2 on interior rows.
  const int rows = n1 + 2 * g;
  std::vector<Mat7> a1(static_cast<std::size_t>(rows) * static_cast<std::size_t>(n2));
  std::vector<Mat7> a2(static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2));
  for (int i = -g; i < n1 + g; ++i) {
    for (int j = 0; j < n2; ++j) {
      const NodeState s = NodeState::from(u, i, j);
      a1[static_cast<std::size_t>(i + g) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(j)] =
          assemble_Aj(s, 1, lambda, law);
      if (i >= 0 && i < n1)
        a2[static_cast<std::size_t>(i) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(j)] =
            assemble_Aj(s, 2, lambda, law);
    }
  }
  const auto A1 = [&](int i, int j) -> const Mat7& {
    return a1[static_cast<std::size_t>(i + g) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(j)];
  };
  const auto A2 = [&](int i, int j) -> const Mat7& {
    return a2[static_cast<std::size_t>(i) * static_cast<std::size_t>(n2) + static_cast<std::size_t>((j + n2) % n2)];
  };

  const double c1 = 1.0 / (12.0 * grid.dx1);
  const double c2 = 1.0 / (12.0 * grid.dx2);
  MatrixField out(n1, n2);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      Mat7& m = out(i, j);
      for (int e = 0; e < 49; ++e) {
        const auto E = static_cast<std::size_t>(e);
        m[E] = c1 * (A1(i - 2, j)[E] - 8.0 * A1(i - 1, j)[E] + 8.0 * A1(i + 1, j)[E] - A1(i + 2, j)[E]) +
               c2 * (A2(i, j - 2)[E] - 8.0 * A2(i, j - 1)[E] + 8.0 * A2(i, j + 1)[E] - A2(i, j + 2)[E]);
      }

      // Time part by the chain rule through p, rho and h = H / lambda.
      const NodeState s = NodeState::from(u, i, j);
      const NodeCoefficients k = node_coefficients(s, lambda, law);
      const double H[3] = {s.H[0], s.H[1], s.H[2]};
      const double Ht[3] = {u_t[kH1](i, j), u_t[kH2](i, j), u_t[kH3](i, j)};
      const double p_t = u_t[kQ](i, j) / lambda - (H[0] * Ht[0] + H[1] * Ht[1] + H[2] * Ht[2]) / (lambda * lambda);
      const double rho_p = law.rho_p(k.p);
      const double da_dp = (law.rho_pp(k.p) * k.rho - rho_p * rho_p) / (k.rho * k.rho);
      const double a_t = da_dp * p_t;
      const double rho_t = rho_p * p_t;
      double h[3], h_t[3];
      for (int c = 0; c < 3; ++c) {
        h[c] = H[c] / lambda;
        h_t[c] = Ht[c] / lambda;
      }
      at(m, 0, 0) += a_t;
      for (int r = 0; r < 3; ++r) {
        const double e = -(a_t * h[r] + k.a * h_t[r]);
        at(m, 0, 4 + r) += e;
        at(m, 4 + r, 0) += e;
        at(m, 1 + r, 1 + r) += rho_t;
        for (int c = 0; c < 3; ++c) at(m, 4 + r, 4 + c) += a_t * h[r] * h[c] + k.a * (h_t[r] * h[c] + h[r] * h_t[c]);
      }
    }
  }
  return out;
}

}  // namespace mhdlab
