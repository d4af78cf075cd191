#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace symdyn {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

inline double log_sum(const std::vector<double>& xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return m;
  double s = 0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// Square matrix of logarithms of nonnegative entries (kNegInf for zero).
struct LogMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  explicit LogMatrix(std::size_t size = 0) : n(size), a(size * size, kNegInf) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  void accumulate(std::size_t i, std::size_t j, double log_w) { a[i * n + j] = log_add(a[i * n + j], log_w); }

  LogMatrix transpose() const {
    LogMatrix t(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  std::vector<Arc> support() const {
    std::vector<Arc> arcs;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if ((*this)(i, j) != kNegInf) arcs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    return arcs;
  }
};

inline std::vector<double> log_apply(const LogMatrix& m, const std::vector<double>& v) {
  std::vector<double> out(m.n, kNegInf);
  std::vector<double> terms(m.n);
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) terms[j] = m(i, j) + v[j];
    out[i] = log_sum(terms);
  }
  return out;
}

inline LogMatrix log_multiply(const LogMatrix& x, const LogMatrix& y) {
  LogMatrix out(x.n);
  std::vector<double> terms(x.n);
  for (std::size_t i = 0; i < x.n; ++i)
    for (std::size_t j = 0; j < x.n; ++j) {
      for (std::size_t k = 0; k < x.n; ++k) terms[k] = x(i, k) + y(k, j);
      out(i, j) = log_sum(terms);
    }
  return out;
}

struct PerronResult {
  double log_rho = kNegInf;
  double log_lo = kNegInf;  // Collatz-Wielandt bracket on log rho
  double log_hi = kNegInf;
  std::vector<double> log_right;
  std::vector<double> log_left;
  int iterations = 0;
};

namespace detail {

// Collatz-Wielandt bracket of log rho(B) from a positive vector v: min and max
// of log((Bv)_i / v_i).
inline std::pair<double, double> cw_bracket(const LogMatrix& b, const std::vector<double>& v) {
  auto bv = log_apply(b, v);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double r = bv[i] - v[i];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, hi};
}

inline void normalize_log(std::vector<double>& v) {
  double m = *std::max_element(v.begin(), v.end());
  for (double& x : v) x -= m;
}

}  // namespace detail

// Perron root and eigenvectors of an irreducible nonnegative matrix given by
// logarithms. The matrix is first shifted by its maximum cycle mean so the
// spectral radius lies in [1, n], then B = I + A is iterated (B is primitive
// even when A is periodic). Repeated squaring reaches high powers quickly;
// the Collatz-Wielandt bracket on B certifies the result.
inline PerronResult perron_log(const LogMatrix& a, double tol = 1e-12) {
  const std::size_t n = a.n;
  if (n == 0) fail(ErrorCode::NoCycle, "empty matrix");
  std::vector<WeightedArc<double>> warcs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (a(i, j) != kNegInf) warcs.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), a(i, j)});
  auto shift = max_cycle_mean<double>(n, warcs);
  if (!shift) fail(ErrorCode::NoCycle, "matrix support is acyclic");
  const double c = *shift;
  // Log entries of size s carry absolute rounding error near s * eps, which
  // bounds how narrow a bracket can honestly be.
  double scale = 1;
  for (double x : a.a)
    if (x != kNegInf) scale = std::max(scale, std::abs(x - c));
  tol = std::max(tol, 64 * std::numeric_limits<double>::epsilon() * scale);

  LogMatrix b(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = a(i, j) == kNegInf ? kNegInf : a(i, j) - c;
  for (std::size_t i = 0; i < n; ++i) b(i, i) = log_add(b(i, i), 0.0);
  const LogMatrix bt = b.transpose();

  PerronResult res;
  auto to_a = [](double log_rho_b) {
    // rho(A') = rho(B) - 1 and rho(A') >= 1, so rho(B) >= 2.
    return std::log(std::expm1(log_rho_b));
  };
  auto finished = [&](const std::vector<double>& r) {
    auto [lo, hi] = detail::cw_bracket(b, r);
    res.log_lo = to_a(lo) + c;
    res.log_hi = to_a(hi) + c;
    return res.log_hi - res.log_lo <= tol;
  };

  std::vector<double> right(n, 0.0), left(n, 0.0);
  bool done = false;
  if (n <= 160) {
    LogMatrix m = b;
    for (int k = 0; k < 64 && !done; ++k) {
      std::vector<double> r(n), l(n), row(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row[j] = m(i, j);
        r[i] = log_sum(row);
        for (std::size_t j = 0; j < n; ++j) row[j] = m(j, i);
        l[i] = log_sum(row);
      }
      detail::normalize_log(r);
      detail::normalize_log(l);
      right = r;
      left = l;
      ++res.iterations;
      if (finished(right)) {
        done = true;
        break;
      }
      m = log_multiply(m, m);
      double mx = *std::max_element(m.a.begin(), m.a.end());
      for (double& x : m.a) x -= mx;
    }
  }
  // Plain power iteration, also used to polish the squared result.
  for (int it = 0; it < 1000000 && !done; ++it) {
    right = log_apply(b, right);
    left = log_apply(bt, left);
    detail::normalize_log(right);
    detail::normalize_log(left);
    ++res.iterations;
    if (finished(right)) done = true;
  }
  if (!done) fail(ErrorCode::NonConvergence, "Perron iteration did not reach tolerance");
  for (double x : right)
    if (x == kNegInf) fail(ErrorCode::Reducible, "Perron vector has zero entries; matrix is reducible");
  res.log_rho = 0.5 * (res.log_lo + res.log_hi);
  res.log_right = right;
  // The left vector converges at the same rate; polish it against B^T.
  for (int it = 0; it < 100000; ++it) {
    auto [lo, hi] = detail::cw_bracket(bt, left);
    if (to_a(hi) - to_a(lo) <= tol) break;
    left = log_apply(bt, left);
    detail::normalize_log(left);
  }
  res.log_left = left;
  return res;
}

}  // namespace symdyn
