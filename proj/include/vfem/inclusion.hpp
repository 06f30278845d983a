#pragma once

// Rigorous one-step propagation of the differential inclusion
//   beta' in A beta + Binv_Minv N(B beta) + Binv_Minv F(t) + G(t)
// in the diagonalized coordinates: first-order rough enclosure, Taylor/Lohner
// step with mean-value form for the leading (weakly damped) coordinates, the
// e^{J tau} C correction covering the multivalued term, and the closed-form
// dissipative bound for the strongly damped tail coordinates.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "vfem/fem.hpp"
#include "vfem/forcing.hpp"
#include "vfem/linalg.hpp"

namespace vfem {

struct EnclosureFailure : std::runtime_error {
  explicit EnclosureFailure(const std::string& what)
      : std::runtime_error(what) {}
};

struct StepFailure : std::runtime_error {
  explicit StepFailure(const std::string& what) : std::runtime_error(what) {}
};

// Parallelepiped {center + basis r + q : r in coeff_box, q in remainder};
// center and basis hold point intervals.
struct LohnerSet {
  IVector center;
  IMatrix basis;
  IVector coeff_box;
  IVector remainder;
};

inline LohnerSet make_lohner(const IVector& box) {
  int n = static_cast<int>(box.size());
  LohnerSet s;
  s.center.resize(n);
  s.coeff_box.resize(n);
  s.remainder.assign(n, Interval(0.0));
  s.basis = IMatrix::identity(n);
  for (int i = 0; i < n; ++i) {
    double c = box[i].mid();
    s.center[i] = Interval(c);
    s.coeff_box[i] = box[i] - Interval(c);
  }
  return s;
}

inline IVector lohner_hull(const LohnerSet& s) {
  IVector out = s.basis * s.coeff_box;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] += s.center[i] + s.remainder[i];
  return out;
}

// The inclusion in diagonal coordinates together with the leading/tail split:
// slot i refers to coordinate eig_order[i]; slots below leading_count are
// integrated by the Taylor/Lohner scheme, the rest by the dissipative bound.
struct InclusionProblem {
  IMatrix A;
  IMatrix B;
  IMatrix Binv_Minv;
  Mesh mesh;
  Forcing forcing;
  IVector eps;
  std::vector<int> eig_order;
  int leading_count = 8;

  // caches filled by make_problem
  IMatrix A_lead;       // leading-slot block of A
  IMatrix B_lead;       // columns of B for leading slots
  IMatrix rows_lead;    // rows of Binv_Minv for leading slots
  std::vector<IVector> term_channels;  // Binv_Minv (6/h) (sin(k pi x), v^m)
  // quad_rows[i](p, q): the quadratic form of leading slot i, so that
  // Q(x, y) in that slot is x^T quad_rows[i] y; contracting coordinate pairs
  // against these near-point coefficients keeps the cancellation between
  // eigenmodes that a nodal evaluation of wide interval vectors smears out
  std::vector<IMatrix> quad_rows;
};

inline InclusionProblem make_problem(const DiagonalBasis& basis,
                                     const Mesh& mesh, const Forcing& forcing,
                                     const IVector& eps, int leading_count) {
  int n = mesh.k - 1;
  if (leading_count < 1 || leading_count > n)
    throw DomainError("make_problem: bad leading count");
  InclusionProblem prob;
  prob.A = basis.A;
  prob.B = basis.B;
  prob.Binv_Minv = basis.Binv_Minv;
  prob.mesh = mesh;
  prob.forcing = forcing;
  prob.eps = eps;
  prob.eig_order = basis.eig_order;
  prob.leading_count = leading_count;
  for (int i = leading_count; i < n; ++i) {
    int l = prob.eig_order[i];
    if (prob.A(l, l).hi() >= 0.0)
      throw DomainError("make_problem: tail coordinate is not dissipative");
  }
  int L = leading_count;
  prob.A_lead = IMatrix(L, L);
  prob.B_lead = IMatrix(n, L);
  prob.rows_lead = IMatrix(L, n);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j)
      prob.A_lead(i, j) = prob.A(prob.eig_order[i], prob.eig_order[j]);
    for (int m = 0; m < n; ++m) {
      prob.B_lead(m, i) = prob.B(m, prob.eig_order[i]);
      prob.rows_lead(i, m) = prob.Binv_Minv(prob.eig_order[i], m);
    }
  }
  prob.quad_rows.assign(L, IMatrix(n, n));
  {
    IVector Bp(n), Bq(n);
    for (int p = 0; p < n; ++p) {
      for (int m = 0; m < n; ++m) Bp[m] = prob.B(m, p);
      for (int q = p; q < n; ++q) {
        for (int m = 0; m < n; ++m) Bq[m] = prob.B(m, q);
        IVector v = prob.rows_lead * nonlinear_bilinear(Bp, Bq, mesh);
        for (int i = 0; i < L; ++i)
          prob.quad_rows[i](p, q) = prob.quad_rows[i](q, p) = v[i];
      }
    }
  }
  Interval scale = Interval(6.0) / mesh.h;
  for (const ForcingTerm& term : forcing.terms) {
    IVector F(n);
    for (int m = 1; m <= n; ++m)
      F[m - 1] = scale * term.amplitude *
                 detail::node_overlap(term.spatial_mode, m, mesh.h);
    prob.term_channels.push_back(prob.Binv_Minv * F);
  }
  return prob;
}

namespace detail {

// full-dimension quadratic part Q(x, y) = Binv_Minv NB2(Bx, By)
inline IVector quad_full(const InclusionProblem& prob, const IVector& x,
                         const IVector& y) {
  return prob.Binv_Minv *
         nonlinear_bilinear(prob.B * x, prob.B * y, prob.mesh);
}

// leading-slot quadratic part with tail coordinates frozen to zero,
// contracted against the cached per-slot quadratic forms
inline IVector quad_lead(const InclusionProblem& prob, const IVector& x,
                         const IVector& y) {
  int L = prob.leading_count;
  IVector out(L, Interval(0.0));
  for (int a = 0; a < L; ++a) {
    int p = prob.eig_order[a];
    for (int b = 0; b < L; ++b) {
      int q = prob.eig_order[b];
      Interval xy = x[a] * y[b];
      for (int i = 0; i < L; ++i) out[i] += prob.quad_rows[i](p, q) * xy;
    }
  }
  return out;
}

// n-th temporal Taylor coefficient of h(t) = Binv_Minv F(t)
inline IVector forcing_coeff(const InclusionProblem& prob, const Interval& t,
                             int n) {
  IVector out(prob.mesh.k - 1, Interval(0.0));
  for (std::size_t j = 0; j < prob.forcing.terms.size(); ++j) {
    Interval w =
        temporal_taylor(prob.forcing, prob.forcing.terms[j].temporal, t, n);
    for (std::size_t m = 0; m < out.size(); ++m)
      out[m] += w * prob.term_channels[j][m];
  }
  return out;
}

// columns 2 Q(c, e_j): the derivative of Q at the point c
inline IMatrix quad_jacobian(const InclusionProblem& prob, const IVector& c) {
  int n = static_cast<int>(c.size());
  IVector Bc = prob.B * c;
  IMatrix out(n, n);
  IVector ej(n);
  for (int j = 0; j < n; ++j) {
    for (int m = 0; m < n; ++m) ej[m] = prob.B(m, j);
    IVector q = prob.Binv_Minv * nonlinear_bilinear(Bc, ej, prob.mesh);
    for (int i = 0; i < n; ++i) out(i, j) = 2.0 * q[i];
  }
  return out;
}

// Q(x, x) over a box through the exact bilinear expansion around the midpoint
// c:  Q(c, c) + 2 Q(c, x - c) + Q(x - c, x - c).  Evaluating the linear part
// column-wise keeps the cancellation between the smooth midpoint profile and
// an oscillatory coordinate direction that a whole-vector evaluation smears.
inline IVector quad_centered(const InclusionProblem& prob, const IVector& x) {
  int n = static_cast<int>(x.size());
  IVector c(n), xi(n);
  for (int l = 0; l < n; ++l) {
    double m = x[l].mid();
    c[l] = Interval(m);
    xi[l] = x[l] - Interval(m);
  }
  IVector out = quad_full(prob, c, c);
  IVector lin = quad_jacobian(prob, c) * xi;
  IVector sq = quad_full(prob, xi, xi);
  for (int l = 0; l < n; ++l) out[l] += lin[l] + sq[l];
  return out;
}

struct FieldParts {
  IVector off_diag;  // sum_{j != l} A_lj x_j
  IVector quad;
  IVector forc;
};

inline FieldParts field_parts(const InclusionProblem& prob, const IVector& x,
                              const Interval& t_window) {
  int n = static_cast<int>(x.size());
  FieldParts p;
  p.off_diag.assign(n, Interval(0.0));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      if (j != l) p.off_diag[l] += prob.A(l, j) * x[j];
  p.quad = quad_centered(prob, x);
  p.forc = forcing_coeff(prob, t_window, 0);
  return p;
}

inline bool strictly_inside(const Interval& a, const Interval& b) {
  return a.lo() > b.lo() && a.hi() < b.hi();
}

inline Interval widen(const Interval& x, double factor) {
  double c = x.mid();
  double r = factor * 0.5 * x.width() + 1e-14 * (1.0 + x.mag()) + 1e-300;
  return Interval(c - r, c + r);
}

inline Interval factorial(int n) {
  Interval f(1.0);
  for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace detail

// Per-tail-slot bounds [N-, N+] on f_l(beta) + lambda_l beta_l + h_l + G_l
// over the enclosure, with lambda_l = inf |A_ll|.
struct DissipativeBounds {
  std::vector<Interval> N;
};

inline DissipativeBounds tail_sources(const InclusionProblem& prob,
                                      const IVector& W,
                                      const Interval& t_window) {
  detail::FieldParts p = detail::field_parts(prob, W, t_window);
  int n = static_cast<int>(W.size());
  DissipativeBounds out;
  for (int i = prob.leading_count; i < n; ++i) {
    int l = prob.eig_order[i];
    Interval lam(-prob.A(l, l).hi());
    out.N.push_back(p.off_diag[l] + (prob.A(l, l) + lam) * W[l] + p.quad[l] +
                    p.forc[l] + prob.eps[l] * Interval(-1.0, 1.0));
  }
  return out;
}

// [x0- e^{-lambda h} + (N-/lambda)(1 - e^{-lambda h}),
//  x0+ e^{-lambda h} + (N+/lambda)(1 - e^{-lambda h})]
inline Interval dissipative_step(const Interval& A_ll, const Interval& N,
                                 const Interval& x0, const Interval& step) {
  if (A_ll.hi() >= 0.0)
    throw DomainError("dissipative_step: coordinate is not dissipative");
  Interval lam(-A_ll.hi());
  Interval decay = exp(-lam * step);
  Interval gain = (Interval(1.0) - decay) / lam;
  Interval lo = Interval(x0.lo()) * decay + Interval(N.lo()) * gain;
  Interval hi = Interval(x0.hi()) * decay + Interval(N.hi()) * gain;
  return Interval(lo.lo(), hi.hi());
}

// Box W (full dimension, natural coordinate order) containing every solution
// of the inclusion on the whole step.  Each coordinate validates the
// intersection of the first-order criterion X0 + [0, step] f(W) with the
// dissipative isolation hull(X0, N/lambda) (when the diagonal is negative)
// strictly inside W.
inline IVector rough_enclosure(const InclusionProblem& prob, const LohnerSet& P,
                               const IVector& tail_box,
                               const Interval& t_window) {
  int n = prob.mesh.k - 1;
  int L = prob.leading_count;
  if (static_cast<int>(tail_box.size()) != n - L)
    throw DomainError("rough_enclosure: tail dimension mismatch");
  Interval step = detail::window_length(t_window);
  IVector lead_box = lohner_hull(P);
  IVector X0(n);
  for (int i = 0; i < n; ++i)
    X0[prob.eig_order[i]] = i < L ? lead_box[i] : tail_box[i - L];

  // per-coordinate candidate: intersection of the first-order box with, for
  // coordinates with a negative diagonal, the dissipative isolation hull;
  // both contain the reachable set, so the intersection does too
  auto candidate = [&](const detail::FieldParts& p, const IVector& at, int l) {
    Interval rhs = p.off_diag[l] + prob.A(l, l) * at[l] + p.quad[l] +
                   p.forc[l] + prob.eps[l] * Interval(-1.0, 1.0);
    Interval fo = X0[l] + Interval(0.0, step.hi()) * rhs;
    if (prob.A(l, l).hi() >= 0.0) return fo;
    Interval lam(-prob.A(l, l).hi());
    Interval N = p.off_diag[l] + (prob.A(l, l) + lam) * at[l] + p.quad[l] +
                 p.forc[l] + prob.eps[l] * Interval(-1.0, 1.0);
    Interval diss = hull(X0[l], N / lam);
    return Interval(std::max(fo.lo(), diss.lo()), std::min(fo.hi(), diss.hi()));
  };

  detail::FieldParts p0 = detail::field_parts(prob, X0, t_window);
  IVector W(n);
  for (int l = 0; l < n; ++l)
    W[l] = detail::widen(candidate(p0, X0, l), 1.5);

  double cap = 0.0;
  for (int l = 0; l < n; ++l) cap = std::max(cap, X0[l].mag());
  cap = 1e6 * (1.0 + cap);

  for (int attempt = 0; attempt < 40; ++attempt) {
    detail::FieldParts p = detail::field_parts(prob, W, t_window);
    bool ok = true;
    for (int l = 0; l < n; ++l) {
      Interval target = candidate(p, W, l);
      if (!detail::strictly_inside(target, W[l])) {
        ok = false;
        W[l] = detail::widen(hull(W[l], target), 1.3);
      }
      if (!(W[l].mag() < cap))
        throw EnclosureFailure("rough_enclosure: candidate set diverged");
    }
    if (ok) return W;
  }
  throw EnclosureFailure("rough_enclosure: inflation budget exhausted");
}

namespace detail {

// columns: bilinear form of z against each column of V (leading slots)
inline IMatrix quad_mat(const InclusionProblem& prob, const IVector& z,
                        const IMatrix& V) {
  int L = prob.leading_count;
  IMatrix out(L, L);
  IVector col(L);
  for (int j = 0; j < L; ++j) {
    for (int i = 0; i < L; ++i) col[i] = V(i, j);
    IVector q = quad_lead(prob, z, col);
    for (int i = 0; i < L; ++i) out(i, j) = q[i];
  }
  return out;
}

// modified Gram-Schmidt on mid(S) with columns sorted by length * box width;
// nullopt when numerically singular
inline std::optional<IMatrix> qr_basis(const IMatrix& S, const IVector& r) {
  int n = S.rows();
  std::vector<std::vector<double>> cols(n, std::vector<double>(n));
  std::vector<double> weight(n);
  std::vector<int> order(n);
  for (int j = 0; j < n; ++j) {
    double len = 0.0;
    for (int i = 0; i < n; ++i) {
      cols[j][i] = S(i, j).mid();
      len += cols[j][i] * cols[j][i];
    }
    weight[j] = std::sqrt(len) * (r[j].width() + 1e-300);
    order[j] = j;
  }
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return weight[a] > weight[b]; });
  IMatrix Q(n, n);
  std::vector<std::vector<double>> done;
  for (int jj = 0; jj < n; ++jj) {
    std::vector<double> v = cols[order[jj]];
    for (const auto& u : done) {
      double d = 0.0;
      for (int i = 0; i < n; ++i) d += u[i] * v[i];
      for (int i = 0; i < n; ++i) v[i] -= d * u[i];
    }
    double len = 0.0;
    for (int i = 0; i < n; ++i) len += v[i] * v[i];
    len = std::sqrt(len);
    if (!(len > 1e-154)) return std::nullopt;
    for (int i = 0; i < n; ++i) v[i] /= len;
    for (int i = 0; i < n; ++i) Q(i, jj) = Interval(v[i]);
    done.push_back(v);
  }
  return Q;
}

}  // namespace detail

// One Taylor step for the leading-slot ODE beta1' = (A11 + K) beta1 +
// Q(beta1) + h1(t) + drift, in mean-value Lohner form with a QR-refreshed
// basis.  W is the rough enclosure (full dimension); drift is the constant
// selection of the coupling term and K its part linear in the leading state
// (both empty means zero).
inline LohnerSet taylor_lohner_step(const InclusionProblem& prob,
                                    const LohnerSet& P, const IVector& W,
                                    const Interval& t_window, int order,
                                    const IVector& drift = {},
                                    const IMatrix& coupling = {}) {
  int L = prob.leading_count;
  Interval step = detail::window_length(t_window);
  Interval t0(t_window.lo());
  IVector zero(L, Interval(0.0));
  const IVector& c0 = drift.empty() ? zero : drift;
  IMatrix AK = prob.A_lead;
  if (coupling.rows() == L) AK = AK + coupling;

  IVector X0 = lohner_hull(P);
  IVector Wlead(L);
  for (int i = 0; i < L; ++i) Wlead[i] = W[prob.eig_order[i]];
  auto project = [&](const IVector& full) {
    IVector out(L);
    for (int i = 0; i < L; ++i) out[i] = full[prob.eig_order[i]];
    return out;
  };

  // Taylor coefficient sequences: point (at the center), over the initial
  // box (for the mean-value Jacobian), and over the enclosure (remainder)
  auto coeffs = [&](const IVector& start, const Interval& t, int upto) {
    std::vector<IVector> z{start};
    for (int nn = 0; nn < upto; ++nn) {
      IVector acc = AK * z[nn];
      for (int a = 0; a <= nn; ++a) {
        IVector q = detail::quad_lead(prob, z[a], z[nn - a]);
        for (int i = 0; i < L; ++i) acc[i] += q[i];
      }
      IVector h = project(detail::forcing_coeff(prob, t, nn));
      for (int i = 0; i < L; ++i) {
        acc[i] += h[i];
        if (nn == 0) acc[i] += c0[i];
        acc[i] = acc[i] / static_cast<double>(nn + 1);
      }
      z.push_back(acc);
    }
    return z;
  };
  std::vector<IVector> zc = coeffs(P.center, t0, order);
  std::vector<IVector> zx = coeffs(X0, t0, order);
  std::vector<IVector> zw = coeffs(Wlead, t_window, order + 1);

  // variational coefficients over the initial box
  std::vector<IMatrix> V{IMatrix::identity(L)};
  for (int nn = 0; nn < order; ++nn) {
    IMatrix acc = AK * V[nn];
    for (int a = 0; a <= nn; ++a)
      acc = acc + detail::quad_mat(prob, zx[a], V[nn - a]) +
            detail::quad_mat(prob, zx[nn - a], V[a]);
    acc = (Interval(1.0) / static_cast<double>(nn + 1)) * acc;
    V.push_back(acc);
  }

  // polynomial values
  IVector Tc(L, Interval(0.0));
  IMatrix J(L, L);
  Interval pw(1.0);
  for (int nn = 0; nn <= order; ++nn) {
    for (int i = 0; i < L; ++i) {
      Tc[i] += zc[nn][i] * pw;
      for (int j = 0; j < L; ++j) J(i, j) += V[nn](i, j) * pw;
    }
    pw *= step;
  }
  IVector rem(L);
  for (int i = 0; i < L; ++i) rem[i] = zw[order + 1][i] * pw;

  // Lohner update: x(h) in Tc + J (basis r + q) + rem
  IMatrix S = J * P.basis;
  IVector z_local = J * P.remainder;
  LohnerSet out;
  out.center.resize(L);
  out.remainder.assign(L, Interval(0.0));
  for (int i = 0; i < L; ++i) {
    double c = Tc[i].mid();
    out.center[i] = Interval(c);
    z_local[i] += (Tc[i] - Interval(c)) + rem[i];
  }
  std::optional<IMatrix> Q = detail::qr_basis(S, P.coeff_box);
  try {
    if (!Q) throw InversionFailure("degenerate basis");
    IMatrix Qinv = verified_inverse(*Q);
    out.basis = *Q;
    out.coeff_box = (Qinv * S) * P.coeff_box;
    IVector extra = Qinv * z_local;
    for (int i = 0; i < L; ++i) out.coeff_box[i] += extra[i];
  } catch (const InversionFailure&) {
    // fall back to an axis-aligned box
    out.basis = IMatrix::identity(L);
    out.coeff_box = S * P.coeff_box;
    for (int i = 0; i < L; ++i) out.coeff_box[i] += z_local[i];
  }
  for (int i = 0; i < L; ++i)
    if (!std::isfinite(out.coeff_box[i].mag()))
      throw StepFailure("taylor_lohner_step: enclosure blew up");
  return out;
}

// Upper bounds d_j on |(int_0^step e^{J tau} C dtau)_j| with J built from the
// leading-slot field Jacobian over the enclosure: diagonal entries are upper
// bounds of df_i/dbeta_i, off-diagonal entries bound |df_i/dbeta_j|.
inline std::vector<double> inclusion_correction(const InclusionProblem& prob,
                                                const IVector& W,
                                                const Interval& step,
                                                const IVector& C,
                                                const IMatrix& coupling = {}) {
  int L = prob.leading_count;
  IVector Wlead(L);
  for (int i = 0; i < L; ++i) Wlead[i] = W[prob.eig_order[i]];
  IMatrix H = prob.A_lead +
              Interval(2.0) * detail::quad_mat(prob, Wlead, IMatrix::identity(L));
  if (coupling.rows() == L) H = H + coupling;
  IMatrix J(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j)
      J(i, j) = i == j ? Interval(H(i, j).hi()) : Interval(H(i, j).mag());

  // int_0^h e^{J tau} dtau = sum_m J^m h^{m+1}/(m+1)!
  const int terms = 12;
  IVector d(L, Interval(0.0));
  IVector Jm_C = C;
  Interval pw = step;
  for (int m = 0; m <= terms; ++m) {
    for (int i = 0; i < L; ++i)
      d[i] += Jm_C[i] * pw / detail::factorial(m + 1);
    Jm_C = J * Jm_C;
    pw *= step;
  }
  double normJ = inf_norm_sup(J);
  double normC = inf_norm_sup(C);
  Interval r = Interval(normJ) * step;
  Interval tail = Interval(normC) * step * pow_int(r, terms + 1) /
                  detail::factorial(terms + 2) * exp(r);
  std::vector<double> out(L);
  for (int i = 0; i < L; ++i) {
    out[i] = d[i].mag() + tail.hi();
    if (!std::isfinite(out[i]))
      throw StepFailure("inclusion_correction: series diverged");
  }
  return out;
}

// Convenience wrapper running one full step: rough enclosure, coupling split,
// Taylor/Lohner step with correction for the leading slots, dissipative
// bounds for the tail slots.
struct StepResult {
  LohnerSet leading;
  IVector tail;
  IVector enclosure;
};

inline StepResult inclusion_step(const InclusionProblem& prob,
                                 const LohnerSet& P, const IVector& tail_box,
                                 const Interval& t_window, int order = 4) {
  int n = prob.mesh.k - 1;
  int L = prob.leading_count;
  Interval step = detail::window_length(t_window);
  IVector W = rough_enclosure(prob, P, tail_box, t_window);

  // coupling A y + 2 Q(x, y) + Q(y, y) from the tail y onto the leading
  // state x, split around the tail midpoint yc: a constant drift
  // A yc + Q(yc, yc), a matrix K = 2 Q(., yc) linear in x (folded into the
  // Taylor scheme so the contraction acts on it), and noise proportional to
  // the tail width only
  IVector yc(n, Interval(0.0)), dy(n, Interval(0.0));
  IVector zc(n, Interval(0.0)), xdiff(n, Interval(0.0));
  for (int i = 0; i < n; ++i) {
    int l = prob.eig_order[i];
    if (i < L) {
      double c = W[l].mid();
      zc[l] = Interval(c);
      xdiff[l] = W[l] - Interval(c);
    } else {
      double c = tail_box[i - L].mid();
      yc[l] = zc[l] = Interval(c);
      dy[l] = hull(W[l], tail_box[i - L]) - Interval(c);
    }
  }
  IVector Byc = prob.B * yc;
  IMatrix K(L, L);
  for (int j = 0; j < L; ++j) {
    IVector Bj(n);
    for (int m = 0; m < n; ++m) Bj[m] = prob.B_lead(m, j);
    IVector q = prob.rows_lead * nonlinear_bilinear(Bj, Byc, prob.mesh);
    for (int i = 0; i < L; ++i) K(i, j) = 2.0 * q[i];
  }
  IVector Ayc = prob.A * yc;
  IVector qcc = detail::quad_full(prob, yc, yc);
  // noise A dy + 2 Q(zc + xdiff, dy) + Q(dy, dy), each quadratic piece
  // contracted against the cached per-slot forms so every coordinate pair
  // enters with its exact coupling coefficient
  IVector Ad = prob.A * dy;
  auto contract = [&](const IVector& u, const IVector& v) {
    IVector out(L, Interval(0.0));
    for (int p = 0; p < n; ++p) {
      if (u[p].lo() == 0.0 && u[p].hi() == 0.0) continue;
      for (int q = 0; q < n; ++q) {
        if (v[q].lo() == 0.0 && v[q].hi() == 0.0) continue;
        Interval uv = u[p] * v[q];
        for (int i = 0; i < L; ++i) out[i] += prob.quad_rows[i](p, q) * uv;
      }
    }
    return out;
  };
  IVector s_cd = contract(zc, dy);
  IVector s_xd = contract(xdiff, dy);
  IVector s_dd = contract(dy, dy);
  IVector drift(L), C(L);
  for (int i = 0; i < L; ++i) {
    int l = prob.eig_order[i];
    Interval Dc = Ayc[l] + qcc[l];
    double c = Dc.mid();
    drift[i] = Interval(c);
    Interval noise = Ad[l] + 2.0 * (s_cd[i] + s_xd[i]) + s_dd[i];
    C[i] = Interval((Dc - Interval(c)).mag() + noise.mag() + prob.eps[l].hi());
  }

  StepResult out;
  out.enclosure = W;
  out.leading = taylor_lohner_step(prob, P, W, t_window, order, drift, K);
  std::vector<double> d = inclusion_correction(prob, W, step, C, K);
  for (int i = 0; i < L; ++i)
    out.leading.remainder[i] += Interval(-d[i], d[i]);

  DissipativeBounds N = tail_sources(prob, W, t_window);
  out.tail.resize(n - L);
  for (int i = L; i < n; ++i) {
    int l = prob.eig_order[i];
    out.tail[i - L] =
        dissipative_step(prob.A(l, l), N.N[i - L], tail_box[i - L], step);
  }
  return out;
}

}  // namespace vfem
