// Grids, quadrature weights, special functions and the dense symmetric
// eigendecomposition the rest of the library is built on.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <lapacke.h>

namespace opokit {

// Thrown when a backend solver or a numerical procedure fails (as opposed to
// bad arguments, which throw std::invalid_argument).
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace numerics {

// One-dimensional quadrature grid: strictly increasing points with positive
// weights, so that sum_i w_i f(x_i) approximates the integral of f.
struct Axis {
  std::vector<double> points;
  std::vector<double> weights;
  std::string label;

  std::size_t size() const { return points.size(); }

  void validate() const {
    if (points.size() != weights.size() || points.size() < 2)
      throw std::invalid_argument("Axis: points/weights must have equal length >= 2");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!std::isfinite(points[i])) throw std::invalid_argument("Axis: non-finite point");
      if (i > 0 && points[i] <= points[i - 1])
        throw std::invalid_argument("Axis: points must be strictly increasing");
      if (!(weights[i] > 0.0)) throw std::invalid_argument("Axis: weights must be positive");
    }
  }

  // Symmetric about the origin within tolerance; several builders rely on this
  // to preserve parity.
  bool is_symmetric(double tol = 1e-12) const {
    const std::size_t n = points.size();
    const double scale = std::max(std::abs(points.front()), std::abs(points.back()));
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(points[i] + points[n - 1 - i]) > tol * scale) return false;
      if (std::abs(weights[i] - weights[n - 1 - i]) > tol * weights[i]) return false;
    }
    return true;
  }
};

// n points spanning [-x_max, x_max] with uniform weights 2*x_max/(n-1).
// Endpoints are not halved: the integrands in this library vanish at the
// boundary to ~1e-15 under the default sizing x_max = 6/sigma_min.
inline Axis make_uniform_axis(double x_max, std::size_t n, std::string label = "x") {
  if (!(x_max > 0.0)) throw std::invalid_argument("make_uniform_axis: x_max must be > 0");
  if (n < 2) throw std::invalid_argument("make_uniform_axis: n must be >= 2");
  Axis ax;
  ax.label = std::move(label);
  ax.points.resize(n);
  ax.weights.assign(n, 2.0 * x_max / static_cast<double>(n - 1));
  const double h = 2.0 * x_max / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    ax.points[i] = -x_max + h * static_cast<double>(i);
  ax.points.front() = -x_max;
  ax.points.back() = x_max;
  return ax;
}

/// sin(x)/x with the removable singularity at 0.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

namespace detail {

// Si by its power series; accurate to ~1e-13 absolute for z <= 8.
inline double sine_integral_series(double z) {
  double c = z;        // (-1)^k z^(2k+1) / (2k+1)!
  double sum = z;      // term k=0: c / 1
  const double z2 = z * z;
  for (int k = 0; k < 80; ++k) {
    c *= -z2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    const double term = c / (2.0 * k + 3.0);
    sum += term;
    if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
  }
  return sum;
}

// E1(i z) by the modified Lentz continued fraction,
//   E1(w) = e^{-w} / (w + 1 - 1^2/(w + 3 - 2^2/(w + 5 - ...)))
// converging for |arg w| < pi; used on the imaginary axis for z > 8.
inline std::complex<double> exp_integral_e1_iz(double z) {
  using cd = std::complex<double>;
  const cd w(0.0, z);
  const double tiny = 1e-300;
  cd b = w + 1.0;
  cd c = 1.0 / tiny;
  cd d = 1.0 / b;
  cd f = d;
  for (int k = 1; k <= 300; ++k) {
    const double a = -static_cast<double>(k) * static_cast<double>(k);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const cd delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-w) * f;
}

} // namespace detail

// Si(z) = integral of sinc(u) du from 0 to z, odd-extended for z < 0.
// Power series below z = 8, continued fraction for E1(iz) above, giving
// better than 1e-12 absolute accuracy everywhere.
inline double sine_integral(double z) {
  if (z < 0.0) return -sine_integral(-z);
  if (z <= 8.0) return detail::sine_integral_series(z);
  // E1(iz) = -Ci(z) - i (pi/2 - Si(z))
  return std::numbers::pi / 2.0 + detail::exp_integral_e1_iz(z).imag();
}

/// Physicists' Hermite polynomial H_m(x) by the three-term recurrence.
inline double hermite(int m, double x) {
  if (m < 0) throw std::invalid_argument("hermite: m must be >= 0");
  double hkm1 = 1.0;          // H_0
  if (m == 0) return hkm1;
  double hk = 2.0 * x;        // H_1
  for (int k = 1; k < m; ++k) {
    const double hkp1 = 2.0 * x * hk - 2.0 * static_cast<double>(k) * hkm1;
    hkm1 = hk;
    hk = hkp1;
  }
  return hk;
}

/// Associated Laguerre polynomial L_p^l(x) by the three-term recurrence.
inline double laguerre_assoc(int p, int l, double x) {
  if (p < 0 || l < 0) throw std::invalid_argument("laguerre_assoc: p, l must be >= 0");
  double lkm1 = 1.0;                                   // L_0^l
  if (p == 0) return lkm1;
  double lk = 1.0 + static_cast<double>(l) - x;        // L_1^l
  for (int k = 1; k < p; ++k) {
    const double kk = static_cast<double>(k);
    const double lkp1 =
        ((2.0 * kk + l + 1.0 - x) * lk - (kk + l) * lkm1) / (kk + 1.0);
    lkm1 = lk;
    lk = lkp1;
  }
  return lk;
}

// Dense real symmetric matrix. Writes go through set(), which stores both
// (i,j) and (j,i), so symmetry is exact by construction.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  std::size_t size() const { return n_; }

  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  void set(std::size_t i, std::size_t j, double v) {
    a_[i * n_ + j] = v;
    a_[j * n_ + i] = v;
  }

  const std::vector<double>& data() const { return a_; }

  bool all_finite() const {
    for (double v : a_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

enum class EigenOrder { ValueDescending, AbsDescending };

// Full spectrum of a symmetric matrix. Eigenvectors are stored column-major
// (column k at data offset k*n), orthonormal, with the sign convention that
// each vector's largest-magnitude component is positive (ties broken by
// lowest index).
struct EigenResult {
  std::size_t n = 0;
  EigenOrder order = EigenOrder::ValueDescending;
  std::vector<double> values;
  std::vector<double> vectors; // column-major n x n

  std::span<const double> vector(std::size_t k) const {
    return std::span<const double>(vectors.data() + k * n, n);
  }
};

namespace detail {

inline void fix_vector_sign(double* v, std::size_t n) {
  std::size_t imax = 0;
  double amax = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(v[i]);
    if (a > amax) { amax = a; imax = i; }
  }
  if (v[imax] < 0.0)
    for (std::size_t i = 0; i < n; ++i) v[i] = -v[i];
}

inline std::vector<std::size_t> sort_permutation(const std::vector<double>& vals,
                                                 EigenOrder order) {
  std::vector<std::size_t> idx(vals.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const auto by_value = [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; };
  const auto by_abs = [&](std::size_t a, std::size_t b) {
    const double aa = std::abs(vals[a]), ab = std::abs(vals[b]);
    if (aa != ab) return aa > ab;
    return vals[a] > vals[b]; // tie: positive first
  };
  if (order == EigenOrder::ValueDescending)
    std::stable_sort(idx.begin(), idx.end(), by_value);
  else
    std::stable_sort(idx.begin(), idx.end(), by_abs);
  return idx;
}

} // namespace detail

// Eigenvalues only, sorted per `order`. Uses LAPACK dsyevd without vectors,
// which is the fast path for the large SPOPO kernels.
inline std::vector<double> symmetric_eigenvalues(const SymMatrix& a,
                                                 EigenOrder order = EigenOrder::AbsDescending) {
  if (!a.all_finite()) throw std::invalid_argument("symmetric_eigenvalues: non-finite entries");
  const lapack_int n = static_cast<lapack_int>(a.size());
  std::vector<double> m = a.data();
  std::vector<double> w(a.size());
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, m.data(), n, w.data());
  if (info != 0)
    throw numerical_error("symmetric_eigenvalues: dsyevd failed, info=" + std::to_string(info));
  const auto idx = detail::sort_permutation(w, order);
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[idx[i]];
  return out;
}

inline EigenResult symmetric_eig(const SymMatrix& a,
                                 EigenOrder order = EigenOrder::ValueDescending) {
  if (!a.all_finite()) throw std::invalid_argument("symmetric_eig: non-finite entries");
  const std::size_t n = a.size();
  const lapack_int ln = static_cast<lapack_int>(n);
  std::vector<double> m = a.data(); // symmetric, so row/col-major agree
  std::vector<double> w(n);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', ln, m.data(), ln, w.data());
  if (info != 0)
    throw numerical_error("symmetric_eig: dsyevd failed, info=" + std::to_string(info));

  const auto idx = detail::sort_permutation(w, order);
  EigenResult r;
  r.n = n;
  r.order = order;
  r.values.resize(n);
  r.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    r.values[k] = w[idx[k]];
    std::copy_n(m.data() + idx[k] * n, n, r.vectors.data() + k * n);
    detail::fix_vector_sign(r.vectors.data() + k * n, n);
  }
  return r;
}

// Gauss-Laguerre nodes/weights for integrals of g(u) e^{-u} on [0, inf),
// by Golub-Welsch on the Jacobi matrix of the Laguerre recurrence.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Quadrature gauss_laguerre(std::size_t n) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre: n must be >= 1");
  SymMatrix j(n);
  for (std::size_t k = 0; k < n; ++k) {
    j.set(k, k, 2.0 * static_cast<double>(k) + 1.0);
    if (k + 1 < n) j.set(k, k + 1, static_cast<double>(k + 1));
  }
  EigenResult e = symmetric_eig(j, EigenOrder::ValueDescending);
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  // ascending nodes
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = n - 1 - k;
    q.nodes[k] = e.values[src];
    const double v0 = e.vector(src)[0];
    q.weights[k] = v0 * v0; // moment integral of e^{-u} is 1
  }
  return q;
}

} // namespace numerics
} // namespace opokit
