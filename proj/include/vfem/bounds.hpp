#pragma once

// Scalar bound toolkit: verified dominant roots of x = d0 + sum d_k x^{p_k},
// the two-ODE decay bound behind the parametric radius estimates, and
// closed-form comparison bounds for scalar differential inequalities.

#include <vector>
#include <utility>

#include "vfem/interval.hpp"

namespace vfem {

struct RootFailure : std::runtime_error {
  explicit RootFailure(const std::string& what) : std::runtime_error(what) {}
};

struct NoBound : std::runtime_error {
  explicit NoBound(const std::string& what) : std::runtime_error(what) {}
};

// One sublinear term d * x^(p_num/p_den) with 0 < p < 1.
struct RootTerm {
  Interval coeff;
  long long p_num;
  long long p_den;
};

// x = d0 + sum_k d_k x^{p_k}; all coefficients nonnegative, exponents in
// (0,1).  Such an equation has a unique positive solution dominating all
// others.
struct RootEquation {
  Interval d0;
  std::vector<RootTerm> terms;
};

namespace detail {

inline Interval root_rhs(const RootEquation& eq, const Interval& x) {
  Interval acc = eq.d0;
  for (const RootTerm& t : eq.terms)
    acc += t.coeff * pow_rational(x, t.p_num, t.p_den);
  return acc;
}

inline double root_rhs_mid(const RootEquation& eq, double x) {
  double acc = eq.d0.mid();
  for (const RootTerm& t : eq.terms)
    acc += t.coeff.mid() *
           std::pow(x, static_cast<double>(t.p_num) / t.p_den);
  return acc;
}

}  // namespace detail

// Verified bracket [r.lo, r.hi] of the dominant root: rhs(r.hi) <= r.hi and
// rhs(r.lo) >= r.lo, certified in interval arithmetic.
inline Interval solve_dominant_root(const RootEquation& eq) {
  if (eq.d0.lo() < 0.0)
    throw DomainError("dominant root: constant term must be nonnegative");
  double coeff_sum = eq.d0.hi();
  for (const RootTerm& t : eq.terms) {
    if (t.coeff.lo() < 0.0)
      throw DomainError("dominant root: coefficients must be nonnegative");
    if (t.p_num <= 0 || t.p_den <= 0 || t.p_num >= t.p_den)
      throw DomainError("dominant root: exponents must lie in (0,1)");
    coeff_sum += t.coeff.hi();
  }
  if (coeff_sum == 0.0) return Interval(0.0);

  // locate with plain floating fixed-point iteration from above; for x above
  // the dominant root the map is a monotone contraction toward it
  double x = coeff_sum + 1.0;
  for (int it = 0; it < 400; ++it) {
    double nx = detail::root_rhs_mid(eq, x);
    if (!std::isfinite(nx)) throw RootFailure("iteration diverged");
    if (std::fabs(nx - x) <= 1e-15 * (std::fabs(x) + 1e-300)) { x = nx; break; }
    x = nx;
  }

  // certify an upper bound
  double hi = x * (1.0 + 4e-12) + 1e-300;
  bool ok = false;
  for (int it = 0; it < 120; ++it) {
    if (detail::root_rhs(eq, Interval(hi)).hi() <= hi) { ok = true; break; }
    hi = hi * (1.0 + 1e-8) + 1e-300;
  }
  if (!ok) throw RootFailure("could not certify an upper bound for the root");

  // certify a lower bound; x = 0 always works since rhs(0) = d0 >= 0
  double lo = std::max(0.0, x * (1.0 - 4e-12));
  for (int it = 0; it < 120 && lo > 0.0; ++it) {
    if (detail::root_rhs(eq, Interval(lo)).lo() >= lo) break;
    lo *= 1.0 - 1e-8;
    if (it == 119) lo = 0.0;
  }
  if (lo > hi) lo = 0.0;
  return Interval(lo, hi);
}

// Inputs of the decay lemma: g(t) in [0, A], dg/dt + C v <= B, and
// dv/dt <= D + E v along trajectories.
struct WangParams {
  Interval A, B, C, D, E;
};

// Eventually v <= F + (transient), and the certified trapping value for the
// associated quantity is F with slope S (used as sqrt(F) radii downstream).
struct WangBound {
  Interval F;
  Interval S;
};

// Best certified asymptotic bound over the admissible multiplier choices:
// lambda = -E (needs E < 0) gives F = D/(-E), S = 0; lambda = sqrt((CD+BE)/A)
// (needs CD+BE > 0 and lambda + E >= 0) gives
// F = (EA + B + 2 sqrt(A(CD+BE)))/C, S = (E+lambda)/C.
inline WangBound wang_bound(const WangParams& p) {
  if (p.A.lo() < 0.0 || p.B.lo() < 0.0 || p.D.lo() < 0.0 || p.C.lo() <= 0.0)
    throw DomainError("wang_bound: need A,B,D >= 0 and C > 0");
  bool have = false;
  WangBound best{Interval(0.0), Interval(0.0)};
  auto consider = [&](const WangBound& cand) {
    if (!have || cand.F.hi() < best.F.hi()) { best = cand; have = true; }
  };
  if (p.E.hi() < 0.0)
    consider({max(p.D / (-p.E), Interval(0.0)), Interval(0.0)});
  Interval disc = p.C * p.D + p.B * p.E;
  if (p.A.lo() > 0.0 && disc.lo() > 0.0) {
    Interval lambda = sqrt(disc / p.A);
    if ((lambda + p.E).lo() >= 0.0) {
      Interval f = (p.E * p.A + p.B + 2.0 * sqrt(p.A * disc)) / p.C;
      consider({max(f, Interval(0.0)), (p.E + lambda) / p.C});
    }
  }
  if (!have) throw NoBound("wang_bound: no admissible multiplier");
  return best;
}

// Bound for z' <= -a z + b with z(0) <= z0:
//   z(t) <= z0 e^{-at} + b t phi(-a t),  phi(u) = (e^u - 1)/u.
// Valid for any sign of a (a <= 0 is growth).  The comparison curve is
// monotone, so its supremum over [0,t] is max(z0, value at t).
struct OdeBound {
  Interval at_t;
  Interval sup;
};

namespace detail {

// (e^u - 1)/u on a point, extended by continuity at 0; increasing in u.
inline Interval em1_point(double u) {
  if (std::fabs(u) >= 0.125) return (exp_point(u) - Interval(1.0)) / u;
  Interval ui(u);
  Interval term(1.0), sum(1.0);
  for (int n = 1; n <= 12; ++n) {
    term = term * ui / static_cast<double>(n + 1);
    sum += term;
  }
  double tail = std::pow(std::fabs(u), 13) / 6227020800.0 * 1.2;
  return sum + Interval(-tail, tail);
}

inline Interval em1(const Interval& u) {
  return Interval(em1_point(u.lo()).lo(), em1_point(u.hi()).hi());
}

}  // namespace detail

inline OdeBound linear_ode_bound(const Interval& a, const Interval& b,
                                 const Interval& z0, const Interval& t) {
  if (t.lo() < 0.0) throw DomainError("linear_ode_bound: t must be >= 0");
  Interval u = -a * t;
  Interval value = z0 * exp(u) + b * t * detail::em1(u);
  return {value, max(z0, value)};
}

// Bound for z' <= -C z^2 + D with z(0) <= z0 >= 0, C > 0, D >= 0:
// comparison solution via tanh, monotone toward the equilibrium sqrt(D/C).
inline OdeBound riccati_tanh_bound(const Interval& C, const Interval& D,
                                   const Interval& z0, const Interval& t) {
  if (C.lo() <= 0.0 || D.lo() < 0.0 || z0.lo() < 0.0 || t.lo() < 0.0)
    throw DomainError("riccati_tanh_bound: need C > 0, D >= 0, z0 >= 0");
  if (D.hi() == 0.0) {
    Interval value = z0 / (1.0 + C * z0 * t);
    return {value, z0};
  }
  Interval s = sqrt(C * D);
  Interval th = tanh(s * t);
  Interval value = (D * th + s * z0) / (C * th * z0 + s);
  return {value, max(z0, sqrt(D / C))};
}

}  // namespace vfem
