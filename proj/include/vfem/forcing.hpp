#pragma once

// Separable trigonometric forcings f(x,t) = sum_j a_j sin(k_j pi x) s_j(t)
// with s_j(t) = c0 + c1 sin(2 pi (t + phase)/T): spatial-derivative L2 norms,
// windowed temporal suprema, pairings with the hat basis, and temporal
// Taylor coefficients for the integrator.

#include <optional>
#include <map>
#include <vector>

#include "vfem/interval.hpp"

namespace vfem {

enum class NormMode { triangle, orthogonal };

struct TemporalWave {
  Interval c0;
  Interval c1;
  Interval phase;
};

struct ForcingTerm {
  Interval amplitude;
  int spatial_mode = 1;
  TemporalWave temporal;
};

struct Forcing {
  Interval period{1.0};
  std::vector<ForcingTerm> terms;
};

// nullopt window means the whole line (sup over all t).
using TimeWindow = std::optional<Interval>;

namespace detail {

inline Interval wave_range(const Forcing& f, const TemporalWave& s,
                           const TimeWindow& window) {
  if (!window) return s.c0 + s.c1 * Interval(-1.0, 1.0);
  Interval theta = two_pi() * (*window + s.phase) / f.period;
  return s.c0 + s.c1 * sin(theta);
}

// Enclosure of sup_t |s(t)| over the window: the upper end comes from the
// range of s, the lower end from the endpoint values (whole line: exactly
// |c0| + |c1|).
inline Interval wave_sup_abs(const Forcing& f, const TemporalWave& s,
                             const TimeWindow& window) {
  if (!window) {
    Interval cand = max(abs(s.c0 + s.c1), abs(s.c0 - s.c1));
    return cand;
  }
  Interval range = wave_range(f, s, window);
  Interval lo1 = abs(wave_range(f, s, Interval(window->lo())));
  Interval lo2 = abs(wave_range(f, s, Interval(window->hi())));
  double lo = std::max(lo1.lo(), lo2.lo());
  return Interval(std::min(lo, range.mag()), range.mag());
}

inline Interval rsqrt2() { return sqrt(Interval(0.5)); }

// int_0^1 v^m(x) sin(k pi x) dx for the hat function v^m on mesh width h
inline Interval node_overlap(int k, int m, const Interval& h) {
  Interval kpi = Interval(static_cast<double>(k)) * pi();
  Interval s_half = sin(kpi * h * 0.5);
  return 4.0 * sqr(s_half) / (sqr(kpi) * h) *
         sin(kpi * Interval(static_cast<double>(m)) * h);
}

}  // namespace detail

// Enclosure of the per-mode / per-term bound on sup over the window of
// ||d^n/dx^n f(.,t)||_{L2(0,1)}.  triangle sums per-term contributions;
// orthogonal groups terms by spatial mode and combines modes in quadrature.
inline Interval norm_bound(const Forcing& f, int deriv_order,
                           const TimeWindow& window,
                           NormMode mode = NormMode::triangle) {
  if (deriv_order < 0 || deriv_order > 4)
    throw DomainError("norm_bound: derivative order must be 0..4");
  if (mode == NormMode::triangle) {
    Interval acc(0.0);
    for (const ForcingTerm& term : f.terms) {
      Interval kpi = Interval(static_cast<double>(term.spatial_mode)) * pi();
      acc += abs(term.amplitude) * pow_int(kpi, deriv_order) *
             detail::rsqrt2() * detail::wave_sup_abs(f, term.temporal, window);
    }
    return acc;
  }
  std::map<int, Interval> per_mode;
  for (const ForcingTerm& term : f.terms) {
    Interval c = abs(term.amplitude) *
                 detail::wave_sup_abs(f, term.temporal, window);
    auto [it, fresh] = per_mode.try_emplace(term.spatial_mode, c);
    if (!fresh) it->second += c;
  }
  Interval sumsq(0.0);
  for (const auto& [k, amp] : per_mode) {
    Interval kpi = Interval(static_cast<double>(k)) * pi();
    sumsq += sqr(pow_int(kpi, deriv_order) * detail::rsqrt2() * amp);
  }
  return sqrt(sumsq);
}

// Range over the window of (f(t), v^m) for the hat function v^m on a uniform
// mesh of width h, via the closed form
//   int_0^1 v^m(x) sin(k pi x) dx = (4 sin^2(k pi h/2) / (k^2 pi^2 h)) *
//                                   sin(k pi m h).
inline Interval project_node(const Forcing& f, const TimeWindow& window,
                             int m, const Interval& h) {
  if (m < 1) throw DomainError("project_node: node index must be >= 1");
  Interval acc(0.0);
  for (const ForcingTerm& term : f.terms)
    acc += term.amplitude * detail::node_overlap(term.spatial_mode, m, h) *
           detail::wave_range(f, term.temporal, window);
  return acc;
}

// Upper bound on sup over the window of |(Q_k f(t), w)| for any w with
// ||w||_{L2} <= w_norm_L2, where Q_k is the complementary projection on the
// mesh of width h:  (h^2/pi^2) * sup||f_xx|| * ||w||.
inline Interval qk_pairing_bound(const Forcing& f, const TimeWindow& window,
                                 const Interval& w_norm_L2, const Interval& h,
                                 NormMode mode = NormMode::triangle) {
  if (w_norm_L2.lo() < 0.0)
    throw DomainError("qk_pairing_bound: norm must be nonnegative");
  Interval nb = norm_bound(f, 2, window, mode);
  return sqr(h) / sqr(pi()) * nb * w_norm_L2;
}

// n-th Taylor coefficient (derivative / n!) of s_j at time t:
//   s^{(n)}(t) = c1 * w^n * sin(w (t+phase) + n pi/2),  w = 2 pi / T,
// plus c0 for n = 0.
inline Interval temporal_taylor(const Forcing& f, const TemporalWave& s,
                                const Interval& t, int n) {
  Interval omega = two_pi() / f.period;
  Interval arg = omega * (t + s.phase) +
                 Interval(static_cast<double>(n)) * half_pi();
  Interval fact(1.0);
  for (int i = 2; i <= n; ++i) fact *= static_cast<double>(i);
  Interval coef = s.c1 * pow_int(omega, n) * sin(arg) / fact;
  if (n == 0) coef += s.c0;
  return coef;
}

}  // namespace vfem
