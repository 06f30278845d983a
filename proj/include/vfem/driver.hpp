#pragma once

// One-period orchestration: per step compute local norm bounds, residual
// widths, one rigorous inclusion step, then refine the endpoint radii; after
// a full forcing period check containment of the final coefficient box in
// the initial one, which certifies a periodic trajectory inside the trapping
// set.  Also hosts the nonrigorous RK4 reference integrator used as a test
// oracle (never in any certified quantity).

#include <array>
#include <string>
#include <vector>

#include "vfem/inclusion.hpp"
#include "vfem/local_bounds.hpp"
#include "vfem/radii.hpp"

namespace vfem {

struct RunConfig {
  Forcing forcing;
  int mesh_k = 32;
  int steps_per_period = 512;
  int leading_count = 8;
  int taylor_order = 4;
  NormMode norm_mode = NormMode::triangle;
  ParamGrid grid;

  // true: clamp per-step radii with the global trapping radii and verify
  // containment of the coefficient box only; false: let the radii run free
  // and additionally require the final radii back inside the initial ones
  bool use_global_radii_init = true;

  // initial set P0 in the diagonalized coordinates (natural order); empty
  // means a box around the burnt-in reference solution at t = 0, inflated
  // by initial_inflate in every coordinate
  std::vector<std::array<double, 2>> initial_box;
  int burn_in_periods = 3;
  double initial_inflate = 1e-3;
  int reference_substeps = 8;
};

inline void validate(const RunConfig& cfg) {
  if (cfg.mesh_k < 3) throw DomainError("config: mesh_k must be at least 3");
  if (cfg.steps_per_period < 1)
    throw DomainError("config: steps_per_period must be positive");
  if (cfg.leading_count < 1 || cfg.leading_count >= cfg.mesh_k - 1)
    throw DomainError("config: leading_count must be in [1, mesh_k - 2]");
  if (cfg.taylor_order < 1 || cfg.taylor_order > 20)
    throw DomainError("config: taylor_order must be in [1, 20]");
  if (cfg.forcing.period.lo() <= 0.0)
    throw DomainError("config: forcing period must be positive");
  if (!cfg.initial_box.empty() &&
      static_cast<int>(cfg.initial_box.size()) != cfg.mesh_k - 1)
    throw DomainError("config: initial_box dimension must be mesh_k - 1");
  for (const auto& [lo, hi] : cfg.initial_box)
    if (!(lo <= hi)) throw DomainError("config: empty initial_box component");
  if (cfg.initial_box.empty() &&
      (cfg.initial_inflate <= 0.0 || cfg.burn_in_periods < 0 ||
       cfg.reference_substeps < 1))
    throw DomainError("config: bad reference-initialization parameters");
}

enum class Verdict { periodic_verified, not_verified, failed };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::periodic_verified: return "periodic_verified";
    case Verdict::not_verified: return "not_verified";
    default: return "failed";
  }
}

struct TraceStep {
  Interval window;
  StepBounds bounds;  // after refinement
  IVector beta_box;   // endpoint hull, natural coordinate order
  IVector eps;
  GalerkinBounds qk;  // unresolved-part bounds from the refined R3
};

struct IntegrationResult {
  TrappingRadii radii;
  IVector initial_box;
  IVector final_box;
  std::vector<TraceStep> trace;
  bool completed = false;
  int failed_step = -1;
  std::string failure;
};

struct Certificate {
  Verdict verdict = Verdict::failed;
  std::string reason;
  IntegrationResult run;
};

namespace detail {

// [t_i, t_{i+1}] with outward-rounded endpoints
inline Interval step_window(const Forcing& f, int steps, int i) {
  Interval t0 = f.period * Interval(static_cast<double>(i)) /
                static_cast<double>(steps);
  Interval t1 = f.period * Interval(static_cast<double>(i + 1)) /
                static_cast<double>(steps);
  return Interval(t0.lo(), t1.hi());
}

inline Interval clamp_radius(const Interval& x) {
  return Interval(std::max(x.lo(), 0.0), std::max(x.hi(), 0.0));
}

// midpoint vector field in the diagonalized coordinates (nonrigorous)
inline std::vector<double> field_mid(const InclusionProblem& prob,
                                     const std::vector<double>& beta,
                                     double t) {
  int n = static_cast<int>(beta.size());
  IVector b(n);
  for (int i = 0; i < n; ++i) b[i] = Interval(beta[i]);
  IVector lin = prob.A * b;
  IVector quad = quad_full(prob, b, b);
  IVector forc = forcing_coeff(prob, Interval(t), 0);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = lin[i].mid() + quad[i].mid() + forc[i].mid();
  return out;
}

}  // namespace detail

// Classical RK4 on the midpoint field; oracle only.
inline std::vector<double> reference_flow(const InclusionProblem& prob,
                                          std::vector<double> beta, double t0,
                                          double t1, int substeps) {
  int n = static_cast<int>(beta.size());
  double dt = (t1 - t0) / substeps;
  for (int s = 0; s < substeps; ++s) {
    double t = t0 + s * dt;
    std::vector<double> k1 = detail::field_mid(prob, beta, t);
    std::vector<double> tmp(n);
    for (int i = 0; i < n; ++i) tmp[i] = beta[i] + 0.5 * dt * k1[i];
    std::vector<double> k2 = detail::field_mid(prob, tmp, t + 0.5 * dt);
    for (int i = 0; i < n; ++i) tmp[i] = beta[i] + 0.5 * dt * k2[i];
    std::vector<double> k3 = detail::field_mid(prob, tmp, t + 0.5 * dt);
    for (int i = 0; i < n; ++i) tmp[i] = beta[i] + dt * k3[i];
    std::vector<double> k4 = detail::field_mid(prob, tmp, t + dt);
    for (int i = 0; i < n; ++i)
      beta[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return beta;
}

// Trajectory samples over one forcing period after burn-in from rest:
// steps_per_period + 1 states in the diagonalized coordinates.
inline std::vector<std::vector<double>> reference_solve(const RunConfig& cfg) {
  validate(cfg);
  Mesh mesh = make_mesh(cfg.mesh_k);
  auto [mass, stiffness] = assemble(mesh);
  DiagonalBasis basis = diagonalize(mass, stiffness, mesh);
  int n = cfg.mesh_k - 1;
  InclusionProblem prob = make_problem(basis, mesh, cfg.forcing,
                                       IVector(n, Interval(0.0)),
                                       cfg.leading_count);
  double T = cfg.forcing.period.mid();
  double dt = T / cfg.steps_per_period;
  // explicit RK4 stability: keep substep * stiffest eigenvalue below 2.5
  double lam_max = 0.0;
  for (int l = 0; l < n; ++l)
    lam_max = std::max(lam_max, std::fabs(prob.A(l, l).mid()));
  int substeps = std::max(cfg.reference_substeps,
                          static_cast<int>(dt * lam_max / 2.5) + 1);
  std::vector<double> beta(n, 0.0);
  for (int p = 0; p < cfg.burn_in_periods; ++p)
    for (int i = 0; i < cfg.steps_per_period; ++i)
      beta = reference_flow(prob, beta, i * dt, (i + 1) * dt,
                            substeps);
  std::vector<std::vector<double>> out{beta};
  for (int i = 0; i < cfg.steps_per_period; ++i) {
    beta = reference_flow(prob, beta, i * dt, (i + 1) * dt,
                          substeps);
    out.push_back(beta);
  }
  return out;
}

inline IVector initial_coefficient_box(const RunConfig& cfg) {
  int n = cfg.mesh_k - 1;
  IVector box(n);
  if (!cfg.initial_box.empty()) {
    for (int i = 0; i < n; ++i)
      box[i] = Interval(cfg.initial_box[i][0], cfg.initial_box[i][1]);
    return box;
  }
  std::vector<double> beta = reference_solve(cfg).front();
  for (int i = 0; i < n; ++i)
    box[i] = Interval(beta[i]) +
             Interval(-cfg.initial_inflate, cfg.initial_inflate);
  return box;
}

// One forcing period of the rigorous algorithm.  Every trace entry's
// beta_box contains the resolved part of every solution starting in the
// initial box, and the qk fields bound the unresolved part.
inline IntegrationResult integrate_period(const RunConfig& cfg) {
  validate(cfg);
  Mesh mesh = make_mesh(cfg.mesh_k);
  auto [mass, stiffness] = assemble(mesh);
  DiagonalBasis basis = diagonalize(mass, stiffness, mesh);
  int n = cfg.mesh_k - 1;
  int L = cfg.leading_count;

  IntegrationResult out;
  out.radii = compute_radii(cfg.forcing, cfg.grid, cfg.norm_mode);
  out.initial_box = initial_coefficient_box(cfg);
  std::array<Interval, 5> rad{out.radii.R1, out.radii.R2, out.radii.R3,
                              out.radii.R4, out.radii.R5};

  InclusionProblem prob = make_problem(basis, mesh, cfg.forcing,
                                       IVector(n, Interval(0.0)), L);
  IVector lead_box(L), tail(n - L);
  for (int i = 0; i < n; ++i) {
    int l = prob.eig_order[i];
    (i < L ? lead_box[i] : tail[i - L]) = out.initial_box[l];
  }
  LohnerSet P = make_lohner(lead_box);

  for (int i = 0; i < cfg.steps_per_period; ++i) {
    Interval window = detail::step_window(cfg.forcing, cfg.steps_per_period, i);
    try {
      StepBounds bounds = compute_step_bounds(cfg.forcing, rad, window,
                                              cfg.grid, cfg.norm_mode);
      ResidualWidths rw = residual_widths(bounds, basis, cfg.forcing, window,
                                          mesh, cfg.norm_mode);
      prob.eps = rw.eps;
      StepResult st = inclusion_step(prob, P, tail, window, cfg.taylor_order);

      TraceStep ts;
      ts.window = window;
      ts.eps = rw.eps;
      ts.beta_box.resize(n);
      IVector lead_hull = lohner_hull(st.leading);
      for (int j = 0; j < n; ++j) {
        int l = prob.eig_order[j];
        ts.beta_box[l] = j < L ? lead_hull[j] : st.tail[j - L];
      }
      IVector alpha_end = prob.B * ts.beta_box;
      IVector alpha_win = prob.B * st.enclosure;
      ts.bounds = refine(bounds, alpha_end, alpha_win, mass, stiffness,
                         mesh.h);
      ts.qk = galerkin_error_bounds(detail::clamp_radius(ts.bounds.R3),
                                    mesh.h);
      out.trace.push_back(ts);

      std::array<Interval, 5> next{ts.bounds.R1, ts.bounds.R2, ts.bounds.R3,
                                   ts.bounds.R4, ts.bounds.R5};
      std::array<Interval, 5> global{out.radii.R1, out.radii.R2, out.radii.R3,
                                     out.radii.R4, out.radii.R5};
      for (int j = 0; j < 5; ++j) {
        rad[j] = detail::clamp_radius(next[j]);
        if (cfg.use_global_radii_init)
          rad[j] = detail::min_by_hi(rad[j], global[j]);
      }
      P = st.leading;
      tail = st.tail;
    } catch (const std::runtime_error& e) {
      out.failed_step = i;
      out.failure = e.what();
      return out;
    }
  }
  out.final_box = out.trace.back().beta_box;
  out.completed = true;
  return out;
}

inline bool box_inside(const IVector& inner, const IVector& outer) {
  if (inner.size() != outer.size()) return false;
  for (std::size_t i = 0; i < inner.size(); ++i)
    if (inner[i].lo() < outer[i].lo() || inner[i].hi() > outer[i].hi())
      return false;
  return true;
}

// Containment check after one period: the image of the initial box under the
// period map lies back inside it, so the compact convex set maps into itself
// and a periodic trajectory exists inside the trapping set.
inline Certificate verify_periodic(const RunConfig& cfg) {
  Certificate cert;
  cert.run = integrate_period(cfg);
  if (!cert.run.completed) {
    cert.verdict = Verdict::failed;
    cert.reason = "step " + std::to_string(cert.run.failed_step) + ": " +
                  cert.run.failure;
    return cert;
  }
  bool contained = box_inside(cert.run.final_box, cert.run.initial_box);
  if (contained && !cfg.use_global_radii_init) {
    const StepBounds& last = cert.run.trace.back().bounds;
    std::array<Interval, 5> fin{last.R1, last.R2, last.R3, last.R4, last.R5};
    std::array<Interval, 5> global{cert.run.radii.R1, cert.run.radii.R2,
                                   cert.run.radii.R3, cert.run.radii.R4,
                                   cert.run.radii.R5};
    for (int j = 0; j < 5; ++j)
      if (fin[j].hi() > global[j].hi()) contained = false;
  }
  cert.verdict =
      contained ? Verdict::periodic_verified : Verdict::not_verified;
  cert.reason = contained ? "final box contained in initial box"
                          : "final box escapes the initial box";
  return cert;
}

}  // namespace vfem
