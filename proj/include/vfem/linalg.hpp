#pragma once

// Dense interval vectors/matrices and a verified matrix inverse.

#include <vector>
#include <functional>

#include "vfem/interval.hpp"

namespace vfem {

struct InversionFailure : std::runtime_error {
  explicit InversionFailure(const std::string& what)
      : std::runtime_error(what) {}
};

using IVector = std::vector<Interval>;

class IMatrix {
 public:
  IMatrix() : rows_(0), cols_(0) {}
  IMatrix(int rows, int cols, Interval fill = Interval(0.0))
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  static IMatrix identity(int n) {
    IMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Interval(1.0);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Interval& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const Interval& operator()(int i, int j) const {
    return data_[static_cast<size_t>(i) * cols_ + j];
  }

 private:
  int rows_, cols_;
  std::vector<Interval> data_;
};

inline IVector operator+(const IVector& a, const IVector& b) {
  IVector r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline IVector operator-(const IVector& a, const IVector& b) {
  IVector r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline IVector operator*(const Interval& s, const IVector& a) {
  IVector r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

inline IMatrix operator+(const IMatrix& a, const IMatrix& b) {
  IMatrix r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

inline IMatrix operator-(const IMatrix& a, const IMatrix& b) {
  IMatrix r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

inline IVector operator*(const IMatrix& m, const IVector& v) {
  IVector r(m.rows(), Interval(0.0));
  for (int i = 0; i < m.rows(); ++i) {
    Interval acc(0.0);
    for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
    r[i] = acc;
  }
  return r;
}

inline IMatrix operator*(const IMatrix& a, const IMatrix& b) {
  IMatrix r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      Interval acc(0.0);
      for (int k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      r(i, j) = acc;
    }
  return r;
}

inline IMatrix operator*(const Interval& s, const IMatrix& a) {
  IMatrix r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
  return r;
}

// Upper bound on the infinity operator norm over all point matrices inside.
inline double inf_norm_sup(const IMatrix& m) {
  Interval best(0.0);
  for (int i = 0; i < m.rows(); ++i) {
    Interval row(0.0);
    for (int j = 0; j < m.cols(); ++j) row += Interval(m(i, j).mag());
    if (row.hi() > best.hi()) best = row;
  }
  return best.hi();
}

inline double inf_norm_sup(const IVector& v) {
  double best = 0.0;
  for (const Interval& x : v) best = std::max(best, x.mag());
  return best;
}

inline Interval dot(const IVector& a, const IVector& b) {
  Interval acc(0.0);
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

namespace detail {

// Plain floating Gauss-Jordan inverse of the midpoint matrix.
inline std::vector<double> approx_inverse(const IMatrix& m) {
  int n = m.rows();
  std::vector<double> a(static_cast<size_t>(n) * n), inv(a.size(), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[static_cast<size_t>(i) * n + j] = m(i, j).mid();
  for (int i = 0; i < n; ++i) inv[static_cast<size_t>(i) * n + i] = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[static_cast<size_t>(r) * n + col]) >
          std::fabs(a[static_cast<size_t>(piv) * n + col]))
        piv = r;
    if (a[static_cast<size_t>(piv) * n + col] == 0.0)
      throw InversionFailure("approximate inverse: singular midpoint matrix");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a[static_cast<size_t>(piv) * n + j],
                  a[static_cast<size_t>(col) * n + j]);
        std::swap(inv[static_cast<size_t>(piv) * n + j],
                  inv[static_cast<size_t>(col) * n + j]);
      }
    double d = a[static_cast<size_t>(col) * n + col];
    for (int j = 0; j < n; ++j) {
      a[static_cast<size_t>(col) * n + j] /= d;
      inv[static_cast<size_t>(col) * n + j] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[static_cast<size_t>(r) * n + col];
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        a[static_cast<size_t>(r) * n + j] -= f * a[static_cast<size_t>(col) * n + j];
        inv[static_cast<size_t>(r) * n + j] -= f * inv[static_cast<size_t>(col) * n + j];
      }
    }
  }
  return inv;
}

}  // namespace detail

// Componentwise enclosure of the inverse of every point matrix inside m.
// Uses an approximate inverse G and the residual rho = ||I - G m||_inf:
// if rho < 1, each entry of the true inverse differs from G by at most
// ||G||_inf * rho / (1 - rho).
inline IMatrix verified_inverse(const IMatrix& m) {
  if (m.rows() != m.cols()) throw InversionFailure("matrix not square");
  int n = m.rows();
  std::vector<double> g = detail::approx_inverse(m);
  IMatrix G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = Interval(g[static_cast<size_t>(i) * n + j]);
  IMatrix R = IMatrix::identity(n) - G * m;
  double rho = inf_norm_sup(R);
  if (!(rho < 1.0))
    throw InversionFailure("residual norm " + std::to_string(rho) + " >= 1");
  double gn = inf_norm_sup(G);
  double eta = (Interval(gn) * rho / (Interval(1.0) - rho)).hi();
  Interval pad(-eta, eta);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) += pad;
  return G;
}

}  // namespace vfem
