#pragma once

// Piecewise linear finite elements on the uniform mesh of (0,1): mass and
// stiffness matrices, the quadratic convection term of the Galerkin system,
// the diagonalizing change of basis with verified enclosures, projection
// error bounds, and the residual widths of the differential inclusion.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "vfem/forcing.hpp"
#include "vfem/linalg.hpp"
#include "vfem/local_bounds.hpp"

namespace vfem {

struct Mesh {
  int k;
  Interval h;
};

inline Mesh make_mesh(int k) {
  if (k < 2) throw DomainError("mesh needs at least 2 subintervals");
  return {k, Interval(1.0) / static_cast<double>(k)};
}

// Unscaled mass matrix (diag 2h/3, off h/6) and stiffness matrix
// (diag 2/h, off -1/h), both (k-1) x (k-1).
inline std::pair<IMatrix, IMatrix> assemble(const Mesh& mesh) {
  int n = mesh.k - 1;
  IMatrix mass(n, n), stiffness(n, n);
  Interval md = Interval(2.0) * mesh.h / 3.0;
  Interval mo = mesh.h / 6.0;
  Interval sd = Interval(2.0) / mesh.h;
  Interval so = Interval(-1.0) / mesh.h;
  for (int i = 0; i < n; ++i) {
    mass(i, i) = md;
    stiffness(i, i) = sd;
    if (i + 1 < n) {
      mass(i, i + 1) = mass(i + 1, i) = mo;
      stiffness(i, i + 1) = stiffness(i + 1, i) = so;
    }
  }
  return {mass, stiffness};
}

// The convection term of the 6/h-scaled Galerkin system
//   Ms a' = Ss a + N(a) + F(t) + residual,
// with N_m(a) = (1/h)(a_m a_{m-1} - a_m a_{m+1} + a_{m-1}^2 - a_{m+1}^2)
// and the boundary convention a_0 = a_k = 0.
inline IVector nonlinear_term(const IVector& alpha, const Mesh& mesh) {
  int n = mesh.k - 1;
  if (static_cast<int>(alpha.size()) != n)
    throw DomainError("nonlinear_term: wrong coefficient count");
  IVector out(n, Interval(0.0));
  auto at = [&](int i) {
    return (i < 0 || i >= n) ? Interval(0.0) : alpha[i];
  };
  for (int m = 0; m < n; ++m)
    out[m] = (at(m) * at(m - 1) - at(m) * at(m + 1) + sqr(at(m - 1)) -
              sqr(at(m + 1))) /
             mesh.h;
  return out;
}

// Symmetric bilinear form with nonlinear_bilinear(x, x) = nonlinear_term(x);
// needed by the Taylor recurrence of the integrator.
inline IVector nonlinear_bilinear(const IVector& x, const IVector& y,
                                  const Mesh& mesh) {
  int n = mesh.k - 1;
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
    throw DomainError("nonlinear_bilinear: wrong coefficient count");
  IVector out(n, Interval(0.0));
  auto xa = [&](int i) { return (i < 0 || i >= n) ? Interval(0.0) : x[i]; };
  auto ya = [&](int i) { return (i < 0 || i >= n) ? Interval(0.0) : y[i]; };
  Interval twoh = Interval(2.0) * mesh.h;
  for (int m = 0; m < n; ++m)
    out[m] = (xa(m) * ya(m - 1) + ya(m) * xa(m - 1) - xa(m) * ya(m + 1) -
              ya(m) * xa(m + 1) + 2.0 * xa(m - 1) * ya(m - 1) -
              2.0 * xa(m + 1) * ya(m + 1)) /
             twoh;
  return out;
}

// Scaled system matrices: Ms = (6/h) mass (tridiag 1,4,1) and
// Ss = -(6/h) stiffness.
inline IMatrix scaled_mass(const IMatrix& mass, const Mesh& mesh) {
  return (Interval(6.0) / mesh.h) * mass;
}

inline IMatrix scaled_stiffness_neg(const IMatrix& stiffness,
                                    const Mesh& mesh) {
  return (Interval(-6.0) / mesh.h) * stiffness;
}

struct DiagonalBasis {
  IMatrix B;          // point entries; unit-euclidean-norm columns
  IMatrix Binv_Minv;  // enclosure of B^-1 Ms^-1, rows are the dual vectors
  IMatrix A;          // enclosure of B^-1 Ms^-1 Ss B
  std::vector<int> eig_order;  // permutation sorting |A_ll| increasingly
  IVector w_norms_L2;
  IVector w_norms_H1;
};

// Change of basis built from the sine eigenvectors of the discrete problem
// (exact for the uniform mesh, but treated as approximate: soundness rests
// only on the interval enclosures computed from B).
inline DiagonalBasis diagonalize(const IMatrix& mass, const IMatrix& stiffness,
                                 const Mesh& mesh) {
  int n = mesh.k - 1;
  if (mass.rows() != n || stiffness.rows() != n)
    throw DomainError("diagonalize: dimension mismatch with mesh");
  DiagonalBasis basis;
  basis.B = IMatrix(n, n);
  double hk = 1.0 / mesh.k;
  for (int l = 1; l <= n; ++l) {
    double norm = 0.0;
    std::vector<double> col(n);
    for (int m = 1; m <= n; ++m) {
      col[m - 1] = std::sin(l * M_PI * m * hk);
      norm += col[m - 1] * col[m - 1];
    }
    norm = std::sqrt(norm);
    for (int m = 0; m < n; ++m) basis.B(m, l - 1) = Interval(col[m] / norm);
  }
  IMatrix Ms = scaled_mass(mass, mesh);
  IMatrix Ss = scaled_stiffness_neg(stiffness, mesh);
  // one verified inversion gives B^-1 Ms^-1 = (Ms B)^-1 directly
  basis.Binv_Minv = verified_inverse(Ms * basis.B);
  basis.A = basis.Binv_Minv * (Ss * basis.B);
  basis.eig_order.resize(n);
  std::iota(basis.eig_order.begin(), basis.eig_order.end(), 0);
  std::sort(basis.eig_order.begin(), basis.eig_order.end(), [&](int a, int b) {
    return std::fabs(basis.A(a, a).mid()) < std::fabs(basis.A(b, b).mid());
  });
  basis.w_norms_L2.resize(n);
  basis.w_norms_H1.resize(n);
  for (int l = 0; l < n; ++l) {
    IVector row(n);
    for (int m = 0; m < n; ++m) row[m] = basis.Binv_Minv(l, m);
    Interval q2 = dot(row, mass * row);
    Interval q1 = dot(row, stiffness * row);
    basis.w_norms_L2[l] = sqrt(Interval(0.0, std::max(q2.hi(), 0.0)));
    basis.w_norms_H1[l] = sqrt(Interval(0.0, std::max(q1.hi(), 0.0)));
  }
  return basis;
}

struct GalerkinBounds {
  Interval h1;
  Interval l2;
};

// If ||u_xx|| <= R3 then the complementary projection satisfies
// ||Q_k u||_{H1} <= (h/pi) R3 and ||Q_k u||_{L2} <= (h^2/pi^2) R3.
inline GalerkinBounds galerkin_error_bounds(const Interval& R3,
                                            const Interval& h) {
  if (R3.lo() < 0.0)
    throw DomainError("galerkin_error_bounds: negative curvature bound");
  return {h / pi() * R3, sqr(h) / sqr(pi()) * R3};
}

struct ResidualWidths {
  IVector eps;
};

// Width of the inclusion's residual in each diagonalized coordinate for one
// time step:
//   eps_l = (6h/pi^2) [ (M2 M3 / 2) ||w^l_x|| + (M3^2 h^(1/2)/pi^(1/2)) ||w^l||
//                       + C ||w^l|| ] + (6/h) sup |(Q_k f, w^l)|,
//   C = M5 + 3 sqrt(2) M2^(1/2) M3^(3/2) + M1^(1/2) M2^(1/2) M4.
inline ResidualWidths residual_widths(const StepBounds& bounds,
                                      const DiagonalBasis& basis,
                                      const Forcing& f,
                                      const Interval& t_window,
                                      const Mesh& mesh,
                                      NormMode mode = NormMode::triangle) {
  auto up = [](const Interval& x) {
    return Interval(std::max(x.lo(), 0.0), std::max(x.hi(), 0.0));
  };
  Interval m1 = up(bounds.M1), m2 = up(bounds.M2), m3 = up(bounds.M3);
  Interval m4 = up(bounds.M4), m5 = up(bounds.M5);
  Interval C = m5 + Interval(3.0) * sqrt(Interval(2.0)) * sqrt(m2) *
                        pow_rational(m3, 3, 2) +
               sqrt(m1) * sqrt(m2) * m4;
  Interval lead = Interval(6.0) * mesh.h / sqr(pi());
  Interval mid_term = sqr(m3) * sqrt(mesh.h) / sqrt(pi());
  int n = mesh.k - 1;
  ResidualWidths out;
  out.eps.resize(n);
  for (int l = 0; l < n; ++l) {
    Interval body = m2 * m3 / 2.0 * basis.w_norms_H1[l] +
                    (mid_term + C) * basis.w_norms_L2[l];
    Interval forcing_part =
        Interval(6.0) / mesh.h *
        qk_pairing_bound(f, t_window, basis.w_norms_L2[l], mesh.h, mode);
    out.eps[l] = up(lead * body + forcing_part);
  }
  return out;
}

}  // namespace vfem
