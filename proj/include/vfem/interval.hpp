#pragma once

// Outward-rounded interval arithmetic on binary64 endpoints.
//
// Rounding strategy: every endpoint is computed in round-to-nearest and then
// post-adjusted to the adjacent representable value whenever the operation is
// not provably exact (exactness is detected with two-sum / fma residuals).
// This keeps integer-valued results exact and avoids touching the hardware
// rounding mode, so values are safe to share across threads.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <algorithm>

namespace vfem {

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline double next_up(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}
inline double next_down(double x) {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}

// z = round(a+b); residual of the two-sum tells us whether it was exact.
inline bool add_exact(double a, double b, double z) {
  double bp = z - a;
  double ap = z - bp;
  return (a - ap) + (b - bp) == 0.0;
}

inline bool mul_exact(double a, double b, double z) {
  return std::isfinite(z) && std::fma(a, b, -z) == 0.0;
}

inline bool div_exact(double a, double b, double q) {
  return std::isfinite(q) && std::fma(q, b, -a) == 0.0;
}

}  // namespace detail

class Interval {
 public:
  Interval() : lo_(0.0), hi_(0.0) {}
  Interval(double point) : lo_(point), hi_(point) {
    if (std::isnan(point)) throw DomainError("interval endpoint is NaN");
  }
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (std::isnan(lo) || std::isnan(hi) || lo > hi)
      throw DomainError("invalid interval endpoints");
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mid() const {
    double m = 0.5 * (lo_ + hi_);
    if (std::isfinite(m)) return m;
    return 0.5 * lo_ + 0.5 * hi_;
  }
  double width() const { return hi_ - lo_; }
  // Largest absolute value over the interval.
  double mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }
  // Smallest absolute value over the interval (0 if it straddles zero).
  double mig() const {
    if (lo_ > 0.0) return lo_;
    if (hi_ < 0.0) return -hi_;
    return 0.0;
  }

  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool subset_of(const Interval& o) const { return o.contains(*this); }
  bool strictly_inside(const Interval& o) const {
    return o.lo_ < lo_ && hi_ < o.hi_;
  }
  bool is_finite() const { return std::isfinite(lo_) && std::isfinite(hi_); }

  static Interval hull(const Interval& a, const Interval& b) {
    return Interval(std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_));
  }

  Interval operator-() const { return Interval(-hi_, -lo_); }

  Interval operator+(const Interval& o) const {
    double lo = lo_ + o.lo_;
    double hi = hi_ + o.hi_;
    if (!detail::add_exact(lo_, o.lo_, lo)) lo = detail::next_down(lo);
    if (!detail::add_exact(hi_, o.hi_, hi)) hi = detail::next_up(hi);
    return Interval(lo, hi);
  }
  Interval operator-(const Interval& o) const { return *this + (-o); }

  Interval operator*(const Interval& o) const {
    double cand[4] = {lo_ * o.lo_, lo_ * o.hi_, hi_ * o.lo_, hi_ * o.hi_};
    double fac_a[4] = {lo_, lo_, hi_, hi_};
    double fac_b[4] = {o.lo_, o.hi_, o.lo_, o.hi_};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < 4; ++i) {
      double c = cand[i];
      if (std::isnan(c)) c = 0.0;  // 0 * inf corner; 0 is the exact product here
      bool exact = detail::mul_exact(fac_a[i], fac_b[i], c) ||
                   fac_a[i] == 0.0 || fac_b[i] == 0.0;
      lo = std::min(lo, exact ? c : detail::next_down(c));
      hi = std::max(hi, exact ? c : detail::next_up(c));
    }
    return Interval(lo, hi);
  }

  Interval operator/(const Interval& o) const {
    if (o.contains(0.0)) throw DomainError("interval division by zero");
    double cand[4] = {lo_ / o.lo_, lo_ / o.hi_, hi_ / o.lo_, hi_ / o.hi_};
    double num[4] = {lo_, lo_, hi_, hi_};
    double den[4] = {o.lo_, o.hi_, o.lo_, o.hi_};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < 4; ++i) {
      double c = cand[i];
      bool exact = detail::div_exact(num[i], den[i], c) || num[i] == 0.0;
      lo = std::min(lo, exact ? c : detail::next_down(c));
      hi = std::max(hi, exact ? c : detail::next_up(c));
    }
    return Interval(lo, hi);
  }

  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }
  Interval& operator/=(const Interval& o) { return *this = *this / o; }

  bool operator==(const Interval& o) const {
    return lo_ == o.lo_ && hi_ == o.hi_;
  }

 private:
  double lo_, hi_;
};

inline Interval operator+(double a, const Interval& b) { return Interval(a) + b; }
inline Interval operator-(double a, const Interval& b) { return Interval(a) - b; }
inline Interval operator*(double a, const Interval& b) { return Interval(a) * b; }
inline Interval operator/(double a, const Interval& b) { return Interval(a) / b; }
inline Interval operator+(const Interval& a, double b) { return a + Interval(b); }
inline Interval operator-(const Interval& a, double b) { return a - Interval(b); }
inline Interval operator*(const Interval& a, double b) { return a * Interval(b); }
inline Interval operator/(const Interval& a, double b) { return a / Interval(b); }

// Shared enclosure of pi; the true value lies strictly between the endpoints.
inline Interval pi() {
  double lo = 3.141592653589793;  // nearest double below pi
  return Interval(lo, detail::next_up(lo));
}
inline Interval two_pi() { return pi() * 2.0; }
inline Interval half_pi() { return pi() * 0.5; }

// ln 2, enclosed.
inline Interval ln2() {
  double lo = 0.6931471805599453;  // nearest double, which is below ln 2
  return Interval(lo, detail::next_up(lo));
}

inline Interval hull(const Interval& a, const Interval& b) {
  return Interval::hull(a, b);
}

inline Interval intersect(const Interval& a, const Interval& b) {
  double lo = std::max(a.lo(), b.lo());
  double hi = std::min(a.hi(), b.hi());
  if (lo > hi) throw DomainError("empty intersection");
  return Interval(lo, hi);
}

inline Interval abs(const Interval& x) {
  return Interval(x.mig(), x.mag());
}

inline Interval max(const Interval& a, const Interval& b) {
  return Interval(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}
inline Interval min(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

// Exact scaling by 2^e.
inline Interval scale2(const Interval& x, int e) {
  return Interval(std::ldexp(x.lo(), e), std::ldexp(x.hi(), e));
}

inline Interval sqr(const Interval& x) {
  Interval a = abs(x);
  return a * a;
}

inline Interval pow_int(const Interval& x, int n) {
  if (n == 0) return Interval(1.0);
  if (n < 0) return Interval(1.0) / pow_int(x, -n);
  Interval base = (n % 2 == 0) ? abs(x) : x;
  Interval acc(1.0);
  Interval p = base;
  int m = n;
  while (m > 0) {
    if (m & 1) acc *= p;
    p = sqr(p);
    m >>= 1;
  }
  // for even n the result is the range of |x|^n, already correct via abs
  return acc;
}

inline Interval sqrt(const Interval& x) {
  if (x.lo() < 0.0) throw DomainError("sqrt of negative interval");
  double lo = std::sqrt(x.lo());
  double hi = std::sqrt(x.hi());
  if (std::fma(lo, lo, -x.lo()) != 0.0) lo = detail::next_down(lo);
  if (std::fma(hi, hi, -x.hi()) != 0.0) hi = detail::next_up(hi);
  return Interval(std::max(lo, 0.0), hi);
}

namespace detail {

// Enclose a long double value v with a symmetric absolute error bound err.
inline Interval ld_enclose(long double v, long double err) {
  long double lo = v - err, hi = v + err;
  double dlo = static_cast<double>(lo);
  double dhi = static_cast<double>(hi);
  if (static_cast<long double>(dlo) > lo) dlo = next_down(dlo);
  if (static_cast<long double>(dhi) < hi) dhi = next_up(dhi);
  return Interval(dlo, dhi);
}

constexpr long double kLn2L = 0.693147180559945309417232121458L;
constexpr long double kLn2LitErr = 3e-20L;  // literal rounding bound
constexpr long double kPio2L = 1.57079632679489661923132169164L;
constexpr long double kPio2LitErr = 6e-20L;
constexpr long double kEpsL = std::numeric_limits<long double>::epsilon();

// exp on a point argument: k*ln2 reduction and a Taylor series evaluated in
// long double, with one consolidated error bound.
inline Interval exp_point(double x) {
  if (x > 709.0) return Interval(1.7976931348623157e308,
                                 std::numeric_limits<double>::infinity());
  if (x < -745.0) return Interval(0.0, 5e-324);
  double kd = std::nearbyint(x * 1.4426950408889634);
  long double r = static_cast<long double>(x) -
                  static_cast<long double>(kd) * kLn2L;
  // reduction error: literal error amplified by k, product rounding, and
  // the subtraction rounding (at most one ulp of the small result)
  long double r_err = std::fabs(kd) * kLn2LitErr +
                      kEpsL * (std::fabs(kd) * 0.7L + 1.0L);
  // series: sum_{n=0}^{17} r^n / n!, |r| <= 0.35 + slack
  long double s = 1.0L;
  for (int n = 17; n >= 1; --n) s = 1.0L + s * r / n;
  long double rm = std::fabs(r) + r_err;
  long double tail = 1.0L;
  for (int n = 1; n <= 18; ++n) tail = tail * rm / n;
  tail = tail / (1.0L - rm / 19.0L);
  // rounding: ~2 ops per term, partial sums bounded by e^0.36 < 1.5
  long double err = 60.0L * kEpsL * 1.5L + tail + 1.5L * r_err;
  return scale2(ld_enclose(s, err), static_cast<int>(kd));
}

// log on a positive point argument: frexp reduction + atanh series in
// long double.
inline Interval log_point(double x) {
  if (x <= 0.0) throw DomainError("log of nonpositive value");
  int e;
  double m = std::frexp(x, &e);  // x = m * 2^e, m in [0.5, 1)
  if (m < 0.70710678118654752) { m *= 2.0; e -= 1; }
  // t = (m-1)/(m+1), |t| <= 0.1716...; numerator and denominator are exact
  // in long double, so t carries a single division rounding.
  long double t = (static_cast<long double>(m) - 1.0L) /
                  (static_cast<long double>(m) + 1.0L);
  long double t_err = kEpsL * std::fabs(t);
  const int N = 13;  // odd powers through t^(2N+1)
  long double t2 = t * t;
  long double p = 1.0L / (2 * N + 1);
  for (int n = N - 1; n >= 0; --n) p = 1.0L / (2 * n + 1) + p * t2;
  long double lg = 2.0L * t * p + static_cast<long double>(e) * kLn2L;
  long double tm = std::fabs(t) + t_err;
  long double tail = 1.0L;
  for (int n = 0; n < 2 * N + 3; ++n) tail *= tm;
  tail = tail / (2 * N + 3) / (1.0L - tm * tm) * 2.0L;
  long double err = kEpsL * (100.0L * std::fabs(t) + 2.0L * std::fabs(lg) +
                             std::fabs(static_cast<long double>(e)) * 0.7L) +
                    tail + 3.0L * t_err +
                    std::fabs(static_cast<long double>(e)) * kLn2LitErr;
  return ld_enclose(lg, err);
}

// pi/2 reduction for trig point arguments.  Tier 1 (|x| <= 64) is a tight
// long double reduction; tier 2 falls back to a double-double Cody-Waite
// style split with interval bookkeeping (wider, still sound).
inline void sincos_reduce(double x, long double& r, long double& err,
                          int& quadrant) {
  if (std::fabs(x) > 1e12)
    throw DomainError("trig argument too large for rigorous reduction");
  double q = std::nearbyint(x * 0.6366197723675814);
  long long qi = static_cast<long long>(q);
  quadrant = static_cast<int>(((qi % 4) + 4) % 4);
  const double pio2_hi = 1.57079632673412561417e+00;  // 33 leading bits
  const double pio2_lo = 6.07710050650619224932e-11;
  if (std::fabs(x) <= 64.0) {
    // q*pio2_hi is exact (33-bit factor, |q| <= 41); both subtractions are
    // long double ops whose rounding is at most one ulp of their results.
    long double diff = static_cast<long double>(x) -
                       static_cast<long double>(q * pio2_hi);
    r = diff - static_cast<long double>(q) * pio2_lo;
    // residual pi/2 - hi - lo is within 4e-27; q*lo rounding is negligible
    err = std::fabs(q) * 5e-27L + kEpsL * (std::fabs(diff) + 2.0L);
    return;
  }
  const Interval pio2_res(-4e-27, 4e-27);  // pi/2 - hi - lo lies inside
  Interval qi_iv(q);
  Interval riv =
      ((Interval(x) - qi_iv * pio2_hi) - qi_iv * pio2_lo) - qi_iv * pio2_res;
  r = static_cast<long double>(riv.mid());
  err = static_cast<long double>(riv.width());
}

// Taylor series for sin/cos about 0 in long double; the Lagrange remainder
// and the argument uncertainty (|sin'|,|cos'| <= 1) are folded into one
// error bound.  Valid for |r| <= ~1.
inline Interval sin_series(long double rm, long double rerr) {
  long double r2 = rm * rm;
  long double p = 1.0L;
  for (int n = 8; n >= 1; --n)
    p = 1.0L - p * r2 / static_cast<long double>(2 * n * (2 * n + 1));
  long double s = rm * p;
  long double ra = std::fabs(rm) + rerr;
  long double tail = 1.0L;
  for (int n = 1; n <= 19; ++n) tail = tail * ra / n;
  long double err = 100.0L * kEpsL * std::fabs(rm) + tail + rerr;
  return ld_enclose(s, err);
}

inline Interval cos_series(long double rm, long double rerr) {
  long double r2 = rm * rm;
  long double p = 1.0L;
  for (int n = 8; n >= 1; --n)
    p = 1.0L - p * r2 / static_cast<long double>((2 * n - 1) * 2 * n);
  long double ra = std::fabs(rm) + rerr;
  long double tail = 1.0L;
  for (int n = 1; n <= 18; ++n) tail = tail * ra / n;
  long double err = 100.0L * kEpsL + tail + rerr;
  return ld_enclose(p, err);
}

inline Interval clamp_unit(const Interval& x) {
  return intersect(x, Interval(-1.0, 1.0));
}

inline Interval sin_point(double x) {
  long double r, e;
  int q;
  sincos_reduce(x, r, e, q);
  Interval v;
  switch (q) {
    case 0: v = sin_series(r, e); break;
    case 1: v = cos_series(r, e); break;
    case 2: v = -sin_series(r, e); break;
    default: v = -cos_series(r, e); break;
  }
  return clamp_unit(v);
}

inline Interval cos_point(double x) {
  long double r, e;
  int q;
  sincos_reduce(x, r, e, q);
  Interval v;
  switch (q) {
    case 0: v = cos_series(r, e); break;
    case 1: v = -sin_series(r, e); break;
    case 2: v = -cos_series(r, e); break;
    default: v = sin_series(r, e); break;
  }
  return clamp_unit(v);
}

// Conservative test: may [a,b] contain a point of the form c + period*n?
inline bool may_contain_lattice(double a, double b, double c, double period) {
  if (b - a >= period) return true;
  double n_lo = std::floor((a - c) / period) - 1;
  double n_hi = std::ceil((b - c) / period) + 1;
  for (double n = n_lo; n <= n_hi; n += 1.0) {
    double p = c + period * n;
    // widen by a couple of ulps to stay conservative
    if (p >= a - 1e-9 * (1.0 + std::fabs(a)) &&
        p <= b + 1e-9 * (1.0 + std::fabs(b)))
      return true;
  }
  return false;
}

}  // namespace detail

inline Interval exp(const Interval& x) {
  Interval lo = detail::exp_point(x.lo());
  Interval hi = detail::exp_point(x.hi());
  return Interval(std::max(lo.lo(), 0.0), hi.hi());
}

inline Interval log(const Interval& x) {
  if (x.lo() <= 0.0) throw DomainError("log requires a positive interval");
  Interval lo = detail::log_point(x.lo());
  Interval hi = detail::log_point(x.hi());
  return Interval(lo.lo(), hi.hi());
}

inline Interval sin(const Interval& x) {
  const double tp = 6.283185307179586;  // ~2*pi, used only to pick candidates
  if (x.width() >= tp) return Interval(-1.0, 1.0);
  Interval a = detail::sin_point(x.lo());
  Interval b = detail::sin_point(x.hi());
  Interval v = hull(a, b);
  double lo = v.lo(), hi = v.hi();
  if (detail::may_contain_lattice(x.lo(), x.hi(), 1.5707963267948966, tp))
    hi = 1.0;
  if (detail::may_contain_lattice(x.lo(), x.hi(), -1.5707963267948966, tp))
    lo = -1.0;
  return Interval(lo, hi);
}

inline Interval cos(const Interval& x) {
  const double tp = 6.283185307179586;
  if (x.width() >= tp) return Interval(-1.0, 1.0);
  Interval a = detail::cos_point(x.lo());
  Interval b = detail::cos_point(x.hi());
  Interval v = hull(a, b);
  double lo = v.lo(), hi = v.hi();
  if (detail::may_contain_lattice(x.lo(), x.hi(), 0.0, tp)) hi = 1.0;
  if (detail::may_contain_lattice(x.lo(), x.hi(), 3.141592653589793, tp))
    lo = -1.0;
  return Interval(lo, hi);
}

inline Interval tanh(const Interval& x) {
  auto point = [](double v) -> Interval {
    if (v >= 0.0) {
      if (v > 20.0) return Interval(detail::next_down(1.0), 1.0);
      Interval e = detail::exp_point(-2.0 * v);
      return (Interval(1.0) - e) / (Interval(1.0) + e);
    }
    if (v < -20.0) return Interval(-1.0, detail::next_up(-1.0));
    Interval e = detail::exp_point(2.0 * v);
    return (e - 1.0) / (e + 1.0);
  };
  Interval lo = point(x.lo());
  Interval hi = point(x.hi());
  return detail::clamp_unit(Interval(lo.lo(), hi.hi()));
}

// x^(num/den) for x >= 0 and a positive rational exponent.
inline Interval pow_rational(const Interval& x, long long num, long long den) {
  if (den <= 0 || num <= 0) throw DomainError("pow_rational needs p > 0");
  if (x.lo() < 0.0) throw DomainError("pow_rational requires x >= 0");
  Interval p = Interval(static_cast<double>(num)) / static_cast<double>(den);
  double lo;
  if (x.lo() == 0.0) {
    lo = 0.0;
  } else {
    lo = exp(p * log(Interval(x.lo()))).lo();
  }
  double hi = (x.hi() == 0.0)
                  ? 0.0
                  : exp(p * log(Interval(x.hi()))).hi();
  return Interval(std::max(lo, 0.0), hi);
}

}  // namespace vfem
