#pragma once

// Per-time-step bounds on the solution's spatial-derivative L2 norms: window
// suprema M1..M5 over [t_i, t_{i+1}] and endpoint radii R1..R5 at t_{i+1}.
// Each level takes the minimum over the applicable comparison-ODE methods
// (exponential decay and tanh/Riccati forms, with free Young parameters
// optimized by grid search), plus a projection-based refinement step.

#include <array>
#include <optional>

#include "vfem/bounds.hpp"
#include "vfem/forcing.hpp"
#include "vfem/linalg.hpp"
#include "vfem/optimize.hpp"

namespace vfem {

// Bounds on the norm itself (not its square): value over the whole window
// and at the window's right end.
struct LocalBound {
  Interval M;
  Interval R;
};

struct StepBounds {
  Interval M1, M2, M3, M4, M5;
  Interval R1, R2, R3, R4, R5;
  Interval window{0.0};
};

namespace detail {

// norm bounds from a comparison bound on the squared norm
inline LocalBound sq_to_norm(const OdeBound& ob) {
  Interval at(std::max(ob.at_t.lo(), 0.0), std::max(ob.at_t.hi(), 0.0));
  Interval sup(std::max(ob.sup.lo(), 0.0), std::max(ob.sup.hi(), 0.0));
  return {sqrt(sup), sqrt(at)};
}

// keep the smaller upper bound per component; minimizing separately is sound
// and preserves R <= M
inline void take_min(std::optional<LocalBound>& best, const LocalBound& cand) {
  if (!best) {
    best = cand;
    return;
  }
  if (cand.R.hi() < best->R.hi()) best->R = cand.R;
  if (cand.M.hi() < best->M.hi()) best->M = cand.M;
}

// Optimizes eval's free parameters over (0,2)^n and folds the best rigorous
// evaluation into best.  eval throws for infeasible parameters.
template <class Eval>
void run_method(std::optional<LocalBound>& best, int nparams, Eval&& eval,
                const ParamGrid& grid) {
  auto cost = [&](const std::vector<double>& p) -> double {
    try {
      return eval(p).R.hi();
    } catch (const std::runtime_error&) {
      return INFINITY;
    }
  };
  std::vector<double> lo(nparams, 1e-6), hi(nparams, 2.0);
  std::vector<double> p = grid_minimize(cost, lo, hi, grid);
  try {
    take_min(best, eval(p));
  } catch (const std::runtime_error&) {
  }
}

inline Interval window_length(const Interval& window) {
  return Interval(window.hi()) - Interval(window.lo());
}

inline void require_radius(const Interval& r, const char* what) {
  if (r.lo() < 0.0) throw DomainError(std::string(what) + ": negative radius");
}

// 7^7 / 2^16, exact in doubles
inline Interval c_h1() { return Interval(823543.0) / Interval(65536.0); }
// 5^4 3^3 / 2^4
inline Interval c_h2a() { return Interval(16875.0) / Interval(16.0); }
// 3 * 5^(13/3) / 2^(28/3)
inline Interval c_h2b() {
  return Interval(3.0) * pow_rational(Interval(5.0), 13, 3) /
         pow_rational(Interval(2.0), 28, 3);
}
// 3 * 7^(8/3) * 5^(5/3) / 2^(25/3)
inline Interval c_h3a() {
  return Interval(3.0) * pow_rational(Interval(7.0), 8, 3) *
         pow_rational(Interval(5.0), 5, 3) / pow_rational(Interval(2.0), 25, 3);
}
// 7^4 3^3 / 2^4
inline Interval c_h3b() { return Interval(64827.0) / Interval(16.0); }
// 3^3 11^4 / 2^4
inline Interval c_h4() { return Interval(395307.0) / Interval(16.0); }

}  // namespace detail

// d/dt ||u|| <= -pi^2 ||u|| + ||f(t)||, directly on the norm.
inline LocalBound local_L2(const Forcing& f, const Interval& R1_in,
                           const Interval& window,
                           NormMode mode = NormMode::triangle) {
  detail::require_radius(R1_in, "local_L2");
  Interval fn = norm_bound(f, 0, window, mode);
  OdeBound ob =
      linear_ode_bound(sqr(pi()), fn, R1_in, detail::window_length(window));
  Interval at(std::max(ob.at_t.lo(), 0.0), std::max(ob.at_t.hi(), 0.0));
  Interval sup(std::max(ob.sup.lo(), 0.0), std::max(ob.sup.hi(), 0.0));
  return {sup, at};
}

// z = ||u_x||^2:  z' <= -pi^2 (2-a-b) z + (||f||^2/a + 7^7 R1^10 / (2^16 b^7))
// under sup_window ||u|| <= R1, plus the Riccati variant with
// C = (2-a-b)/R1^2.  The exponential family also tries the closed-form
// optimal (a, b) when it is defined.
inline LocalBound local_H1(const Forcing& f, const Interval& R1,
                           const Interval& R2_in, const Interval& window,
                           const ParamGrid& grid = {},
                           NormMode mode = NormMode::triangle) {
  detail::require_radius(R1, "local_H1");
  detail::require_radius(R2_in, "local_H1");
  Interval fn = norm_bound(f, 0, window, mode);
  Interval z0 = sqr(R2_in);
  Interval dt = detail::window_length(window);
  auto source = [&](const Interval& a, const Interval& b) {
    return sqr(fn) / a + detail::c_h1() * pow_int(R1, 10) / pow_int(b, 7);
  };
  std::optional<LocalBound> best;
  auto exp_eval = [&](const std::vector<double>& p) {
    Interval a(p[0]), b(p[1]);
    if (p[0] <= 0.0 || p[1] <= 0.0 || p[0] + p[1] > 2.0)
      throw DomainError("infeasible");
    Interval rate = sqr(pi()) * (Interval(2.0) - a - b);
    return detail::sq_to_norm(linear_ode_bound(rate, source(a, b), z0, dt));
  };
  detail::run_method(best, 2, exp_eval, grid);
  // closed-form optimum of the source constant: a is the root of
  // a + (R1^5/||f||)^(1/4) a^(1/4) - 1 = 0, b = 7/4 - 7a/4
  if (fn.lo() > 0.0 && R1.hi() > 0.0) {
    double c = std::pow(std::pow(R1.mid(), 5) / fn.mid(), 0.25);
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      double m = 0.5 * (lo + hi);
      (m + c * std::pow(m, 0.25) - 1.0 < 0.0 ? lo : hi) = m;
    }
    double a = 0.5 * (lo + hi);
    if (a > 0.0) {
      try {
        detail::take_min(best, exp_eval({a, 7.0 / 4.0 - 7.0 * a / 4.0}));
      } catch (const std::runtime_error&) {
      }
    }
  }
  if (R1.lo() > 0.0) {
    auto tanh_eval = [&](const std::vector<double>& p) {
      Interval a(p[0]), b(p[1]);
      if (p[0] <= 0.0 || p[1] <= 0.0 || p[0] + p[1] >= 2.0)
        throw DomainError("infeasible");
      Interval C = (Interval(2.0) - a - b) / sqr(R1);
      return detail::sq_to_norm(riccati_tanh_bound(C, source(a, b), z0, dt));
    };
    detail::run_method(best, 2, tanh_eval, grid);
  }
  return *best;
}

// z = ||u_xx||^2 under sup_window ||u|| <= R1, ||u_x|| <= R2: two exponential
// sources, one possibly-growing variant (rate pi^2(2-a-b) - 25 R1 R2 / b),
// and two Riccati forms with C = (2-a-b)/R2^2.
inline LocalBound local_H2(const Forcing& f, const Interval& R1,
                           const Interval& R2, const Interval& R3_in,
                           const Interval& window, const ParamGrid& grid = {},
                           NormMode mode = NormMode::triangle) {
  detail::require_radius(R1, "local_H2");
  detail::require_radius(R2, "local_H2");
  detail::require_radius(R3_in, "local_H2");
  Interval fx = norm_bound(f, 1, window, mode);
  Interval z0 = sqr(R3_in);
  Interval dt = detail::window_length(window);
  auto source1 = [&](const Interval& a, const Interval& b) {
    return detail::c_h2a() * pow_int(R2, 4) * sqr(R1) / pow_int(b, 3) +
           sqr(fx) / a;
  };
  auto source2 = [&](const Interval& a, const Interval& b) {
    return detail::c_h2b() * pow_rational(R2, 14, 3) /
               pow_rational(b, 5, 3) +
           sqr(fx) / a;
  };
  std::optional<LocalBound> best;
  for (int variant = 0; variant < 2; ++variant) {
    auto src = [&](const Interval& a, const Interval& b) {
      return variant == 0 ? source1(a, b) : source2(a, b);
    };
    auto exp_eval = [&](const std::vector<double>& p) {
      Interval a(p[0]), b(p[1]);
      if (p[0] <= 0.0 || p[1] <= 0.0 || p[0] + p[1] > 2.0)
        throw DomainError("infeasible");
      Interval rate = sqr(pi()) * (Interval(2.0) - a - b);
      return detail::sq_to_norm(linear_ode_bound(rate, src(a, b), z0, dt));
    };
    detail::run_method(best, 2, exp_eval, grid);
    if (R2.lo() > 0.0) {
      auto tanh_eval = [&](const std::vector<double>& p) {
        Interval a(p[0]), b(p[1]);
        if (p[0] <= 0.0 || p[1] <= 0.0 || p[0] + p[1] >= 2.0)
          throw DomainError("infeasible");
        Interval C = (Interval(2.0) - a - b) / sqr(R2);
        return detail::sq_to_norm(riccati_tanh_bound(C, src(a, b), z0, dt));
      };
      detail::run_method(best, 2, tanh_eval, grid);
    }
  }
  auto growth_eval = [&](const std::vector<double>& p) {
    Interval a(p[0]), b(p[1]);
    if (p[0] <= 0.0 || p[1] <= 0.0 || p[0] + p[1] > 2.0)
      throw DomainError("infeasible");
    Interval rate =
        sqr(pi()) * (Interval(2.0) - a - b) - Interval(25.0) * R1 * R2 / b;
    return detail::sq_to_norm(
        linear_ode_bound(rate, sqr(fx) / a, z0, dt));
  };
  detail::run_method(best, 2, growth_eval, grid);
  return *best;
}

// z = ||u_xxx||^2 under sup_window bounds R1, R2, R3: two exponential sources
// and two Riccati forms with C = (2-a-b)/R3^2.
inline LocalBound local_H3(const Forcing& f, const Interval& R1,
                           const Interval& R2, const Interval& R3,
                           const Interval& R4_in, const Interval& window,
                           const ParamGrid& grid = {},
                           NormMode mode = NormMode::triangle) {
  detail::require_radius(R1, "local_H3");
  detail::require_radius(R2, "local_H3");
  detail::require_radius(R3, "local_H3");
  detail::require_radius(R4_in, "local_H3");
  Interval fxx = norm_bound(f, 2, window, mode);
  Interval z0 = sqr(R4_in);
  Interval dt = detail::window_length(window);
  auto source1 = [&](const Interval& a, const Interval& b) {
    return detail::c_h3a() * pow_rational(R2, 8, 3) * sqr(R3) /
               pow_rational(a, 5, 3) +
           sqr(fxx) / b;
  };
  auto source2 = [&](const Interval& a, const Interval& b) {
    return detail::c_h3b() * sqr(R1) * sqr(R2) * sqr(R3) / pow_int(a, 3) +
           sqr(fxx) / b;
  };
  std::optional<LocalBound> best;
  for (int variant = 0; variant < 2; ++variant) {
    auto src = [&](const Interval& a, const Interval& b) {
      return variant == 0 ? source1(a, b) : source2(a, b);
    };
    auto exp_eval = [&](const std::vector<double>& p) {
      Interval a(p[0]), b(p[1]);
      if (p[0] <= 0.0 || p[1] <= 0.0 || p[0] + p[1] > 2.0)
        throw DomainError("infeasible");
      Interval rate = sqr(pi()) * (Interval(2.0) - a - b);
      return detail::sq_to_norm(linear_ode_bound(rate, src(a, b), z0, dt));
    };
    detail::run_method(best, 2, exp_eval, grid);
    if (R3.lo() > 0.0) {
      auto tanh_eval = [&](const std::vector<double>& p) {
        Interval a(p[0]), b(p[1]);
        if (p[0] <= 0.0 || p[1] <= 0.0 || p[0] + p[1] >= 2.0)
          throw DomainError("infeasible");
        Interval C = (Interval(2.0) - a - b) / sqr(R3);
        return detail::sq_to_norm(riccati_tanh_bound(C, src(a, b), z0, dt));
      };
      detail::run_method(best, 2, tanh_eval, grid);
    }
  }
  return *best;
}

// z = ||u_xxxx||^2 under sup_window bounds R1..R4: one exponential family
// (rate pi^2(2-a-b-c)) and the Riccati form with C = (2-a-b-c)/R4^2, both
// with source ||f_xxx||^2/a + 200 R2 R3 R4^2 / b + 3^3 11^4 R1^2 R2^2 R4^2 /
// (2^4 c^3).
inline LocalBound local_H4(const Forcing& f, const Interval& R1,
                           const Interval& R2, const Interval& R3,
                           const Interval& R4, const Interval& R5_in,
                           const Interval& window, const ParamGrid& grid = {},
                           NormMode mode = NormMode::triangle) {
  detail::require_radius(R1, "local_H4");
  detail::require_radius(R2, "local_H4");
  detail::require_radius(R3, "local_H4");
  detail::require_radius(R4, "local_H4");
  detail::require_radius(R5_in, "local_H4");
  Interval fxxx = norm_bound(f, 3, window, mode);
  Interval z0 = sqr(R5_in);
  Interval dt = detail::window_length(window);
  auto source = [&](const Interval& a, const Interval& b, const Interval& c) {
    return sqr(fxxx) / a + Interval(200.0) * R2 * R3 * sqr(R4) / b +
           detail::c_h4() * sqr(R1) * sqr(R2) * sqr(R4) / pow_int(c, 3);
  };
  std::optional<LocalBound> best;
  auto exp_eval = [&](const std::vector<double>& p) {
    Interval a(p[0]), b(p[1]), c(p[2]);
    if (p[0] <= 0.0 || p[1] <= 0.0 || p[2] <= 0.0 ||
        p[0] + p[1] + p[2] > 2.0)
      throw DomainError("infeasible");
    Interval rate = sqr(pi()) * (Interval(2.0) - a - b - c);
    return detail::sq_to_norm(linear_ode_bound(rate, source(a, b, c), z0, dt));
  };
  detail::run_method(best, 3, exp_eval, grid);
  if (R4.lo() > 0.0) {
    auto tanh_eval = [&](const std::vector<double>& p) {
      Interval a(p[0]), b(p[1]), c(p[2]);
      if (p[0] <= 0.0 || p[1] <= 0.0 || p[2] <= 0.0 ||
          p[0] + p[1] + p[2] >= 2.0)
        throw DomainError("infeasible");
      Interval C = (Interval(2.0) - a - b - c) / sqr(R4);
      return detail::sq_to_norm(
          riccati_tanh_bound(C, source(a, b, c), z0, dt));
    };
    detail::run_method(best, 3, tanh_eval, grid);
  }
  return *best;
}

// All five levels chained: each level's hypothesis radii are the window
// suprema of the lower levels.
inline StepBounds compute_step_bounds(const Forcing& f,
                                      const std::array<Interval, 5>& radii_in,
                                      const Interval& window,
                                      const ParamGrid& grid = {},
                                      NormMode mode = NormMode::triangle) {
  StepBounds out;
  out.window = window;
  LocalBound b1 = local_L2(f, radii_in[0], window, mode);
  out.M1 = b1.M;
  out.R1 = b1.R;
  Interval m1(out.M1.hi());
  LocalBound b2 = local_H1(f, m1, radii_in[1], window, grid, mode);
  out.M2 = b2.M;
  out.R2 = b2.R;
  Interval m2(out.M2.hi());
  LocalBound b3 = local_H2(f, m1, m2, radii_in[2], window, grid, mode);
  out.M3 = b3.M;
  out.R3 = b3.R;
  Interval m3(out.M3.hi());
  LocalBound b4 = local_H3(f, m1, m2, m3, radii_in[3], window, grid, mode);
  out.M4 = b4.M;
  out.R4 = b4.R;
  Interval m4(out.M4.hi());
  LocalBound b5 = local_H4(f, m1, m2, m3, m4, radii_in[4], window, grid, mode);
  out.M5 = b5.M;
  out.R5 = b5.R;
  return out;
}

namespace detail {

inline Interval quad_form_norm(const IVector& x, const IMatrix& Q) {
  Interval q(0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) q += x[i] * Q(i, j) * x[j];
  return sqrt(Interval(0.0, std::max(q.hi(), 0.0)));
}

inline Interval min_by_hi(const Interval& a, const Interval& b) {
  return a.hi() <= b.hi() ? a : b;
}

}  // namespace detail

// Projection refinement: once the step's coefficient enclosure is known, the
// L2 and H1 bounds can be replaced by
//   N1 <- min(N1, h^2 N3 / pi^2 + sup_S ||v||),
//   N2 <- min(N2, h N3 / pi + sup_S ||v_x||),
// where S is the finite element set described by the coefficient box and N3
// bounds ||u_xx||.  mass and stiffness are the unscaled matrices, so the
// suprema are interval square roots of the quadratic forms over the box.
inline StepBounds refine(const StepBounds& b, const IVector& endpoint_box,
                         const std::optional<IVector>& window_box,
                         const IMatrix& mass, const IMatrix& stiffness,
                         const Interval& h) {
  StepBounds out = b;
  Interval r1_cand = sqr(h) * b.R3 / sqr(pi()) +
                     detail::quad_form_norm(endpoint_box, mass);
  Interval r2_cand =
      h * b.R3 / pi() + detail::quad_form_norm(endpoint_box, stiffness);
  out.R1 = detail::min_by_hi(b.R1, r1_cand);
  out.R2 = detail::min_by_hi(b.R2, r2_cand);
  if (window_box) {
    Interval m1_cand = sqr(h) * b.M3 / sqr(pi()) +
                       detail::quad_form_norm(*window_box, mass);
    Interval m2_cand =
        h * b.M3 / pi() + detail::quad_form_norm(*window_box, stiffness);
    out.M1 = detail::min_by_hi(b.M1, m1_cand);
    out.M2 = detail::min_by_hi(b.M2, m2_cand);
  }
  // a window bound also bounds the endpoint
  out.R1 = detail::min_by_hi(out.R1, out.M1);
  out.R2 = detail::min_by_hi(out.R2, out.M2);
  return out;
}

}  // namespace vfem
