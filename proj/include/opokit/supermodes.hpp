// Supermode analysis: numerical solution of the Fredholm eigenproblem
//   Int K(xi, xi') s_n(xi') dxi' = Lambda_n s_n(xi)
// on discretized kernels, and the closed-form spectrum of the modulated
// Gaussian family for cross-checking. Eigenvalues are reported sorted by
// absolute value descending; Lambda_1 is the eigenvalue of largest |.|.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "kernellab.hpp"
#include "numerics.hpp"

namespace opokit::supermodes {

using kernellab::KernelMatrix;
using kernellab::ModulatedKernelSpec;
using numerics::Axis;

// Discrete supermodes of a kernel: eigenvalues sorted by |.| descending and
// eigenfunctions sampled on the axis, normalized in the weighted inner
// product sum_i w_i s(x_i)^2 = 1. Entries below truncation_floor * |Lambda_1|
// are discarded.
struct SupermodeSet {
  Axis axis;
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenfunctions; // one sampled function per eigenvalue
  double truncation_floor = 1e-9;
  bool all_below_floor = false;

  std::size_t count() const { return eigenvalues.size(); }
};

enum class TrigBranch { CosCos, CosSin, SinCos, SinSin };

inline const char* to_string(TrigBranch b) {
  switch (b) {
    case TrigBranch::CosCos: return "cc";
    case TrigBranch::CosSin: return "cs";
    case TrigBranch::SinCos: return "sc";
    case TrigBranch::SinSin: return "ss";
  }
  return "?";
}

// (n1, n2) index the plus/minus modulation terms, m the Hermite rung of the
// asymmetric-width ladder (always 0 when sigma+ = sigma-).
struct ModeLabel {
  int n_plus = 0;
  int n_minus = 0;
  int hermite_m = 0;
  TrigBranch branch = TrigBranch::CosCos;
};

struct SpectrumEntry {
  double value = 0.0;
  int multiplicity = 1;
  ModeLabel label;
};

struct AnalyticSpectrum {
  std::vector<SpectrumEntry> entries; // sorted by |value| descending
  bool validity_ok = true;            // advisory separation condition met
  double validity_margin = 0.0;

  std::size_t total_count() const {
    std::size_t c = 0;
    for (const auto& e : entries) c += static_cast<std::size_t>(e.multiplicity);
    return c;
  }
};

namespace detail {

inline bool kernel_commutes_with_parity(const kernellab::KernelMatrix& k, double tol) {
  const std::size_t n = k.size();
  const double scale = k.values.max_abs();
  if (scale == 0.0) return true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (std::abs(k.values(i, j) - k.values(n - 1 - i, n - 1 - j)) > tol * scale) return false;
  return true;
}

// Replace the eigenvectors of each numerically degenerate group by an
// equivalent basis of definite parity. The kernels in scope commute with
// parity, but within machine-degenerate pairs (e.g. the cos/sin partners of
// one modulation frequency) the backend returns an arbitrary mixture; this
// rotation restores even/odd vectors without changing the spanned subspace.
// Groups are found in signed-value order, where near-equal eigenvalues are
// always adjacent (the incoming list is sorted by magnitude, which can
// interleave signs).
inline void purify_parity_groups(std::vector<double>& values,
                                 std::vector<std::vector<double>>& vectors,
                                 double group_tol_abs) {
  const std::size_t count = values.size();
  if (count == 0) return;
  const std::size_t n = vectors.front().size();

  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::size_t g0 = 0;
  while (g0 < count) {
    std::size_t g1 = g0 + 1;
    while (g1 < count &&
           std::abs(values[order[g1]] - values[order[g0]]) <= group_tol_abs)
      ++g1;
    const std::size_t gsize = g1 - g0;
    if (gsize > 1) {
      std::vector<std::vector<double>> even, odd;
      for (std::size_t k = g0; k < g1; ++k) {
        const auto& src = vectors[order[k]];
        std::vector<double> e(n), o(n);
        for (std::size_t i = 0; i < n; ++i) {
          e[i] = 0.5 * (src[i] + src[n - 1 - i]);
          o[i] = 0.5 * (src[i] - src[n - 1 - i]);
        }
        even.push_back(std::move(e));
        odd.push_back(std::move(o));
      }
      // modified Gram-Schmidt within each parity class
      std::vector<std::vector<double>> basis;
      for (auto* cls : {&even, &odd}) {
        for (auto& v : *cls) {
          for (const auto& b : basis) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += v[i] * b[i];
            for (std::size_t i = 0; i < n; ++i) v[i] -= dot * b[i];
          }
          double nrm = 0.0;
          for (double x : v) nrm += x * x;
          nrm = std::sqrt(nrm);
          if (nrm > 1e-6) {
            for (double& x : v) x /= nrm;
            basis.push_back(v);
          }
          if (basis.size() == gsize) break;
        }
        if (basis.size() == gsize) break;
      }
      if (basis.size() == gsize) {
        for (std::size_t k = 0; k < gsize; ++k) vectors[order[g0 + k]] = std::move(basis[k]);
      }
      // else: subspace did not split cleanly by parity; keep the raw basis
    }
    g0 = g1;
  }
}

} // namespace detail

// Discretize with symmetric weighting M = W^1/2 K W^1/2, diagonalize, and map
// eigenvectors back to functions s(x_i) = v_i / sqrt(w_i). The symmetric
// weighting keeps the discrete operator symmetric for non-uniform axes and
// makes the returned functions orthonormal in the weighted inner product.
inline SupermodeSet solve_fredholm(const KernelMatrix& k, double floor_rel = 1e-9,
                                   std::size_t max_modes = 0) {
  if (!k.values.all_finite()) throw std::invalid_argument("solve_fredholm: non-finite kernel");
  k.axis.validate();
  const std::size_t n = k.size();
  std::vector<double> sqw(n);
  for (std::size_t i = 0; i < n; ++i) sqw[i] = std::sqrt(k.axis.weights[i]);

  numerics::SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.set(i, j, sqw[i] * k.values(i, j) * sqw[j]);

  numerics::EigenResult eig = numerics::symmetric_eig(m, numerics::EigenOrder::AbsDescending);

  SupermodeSet s;
  s.axis = k.axis;
  s.truncation_floor = floor_rel;
  const double lam1 = eig.values.empty() ? 0.0 : std::abs(eig.values.front());
  if (lam1 == 0.0) {
    s.all_below_floor = true;
    return s;
  }
  std::size_t keep = 0;
  while (keep < n && std::abs(eig.values[keep]) >= floor_rel * lam1) ++keep;
  if (max_modes > 0) keep = std::min(keep, max_modes);
  if (keep == 0) {
    s.all_below_floor = true;
    return s;
  }

  s.eigenvalues.assign(eig.values.begin(), eig.values.begin() + static_cast<long>(keep));
  s.eigenfunctions.resize(keep);
  std::vector<std::vector<double>> weighted(keep);
  for (std::size_t kk = 0; kk < keep; ++kk)
    weighted[kk].assign(eig.vector(kk).begin(), eig.vector(kk).end());

  if (k.axis.is_symmetric() && detail::kernel_commutes_with_parity(k, 1e-12))
    detail::purify_parity_groups(s.eigenvalues, weighted, 1e-10 * lam1);

  for (std::size_t kk = 0; kk < keep; ++kk) {
    numerics::detail::fix_vector_sign(weighted[kk].data(), n);
    s.eigenfunctions[kk].resize(n);
    for (std::size_t i = 0; i < n; ++i) s.eigenfunctions[kk][i] = weighted[kk][i] / sqw[i];
  }
  return s;
}

/// Eigenvalues only; the fast path for large kernels.
inline std::vector<double> solve_fredholm_values(const KernelMatrix& k, double floor_rel = 1e-9) {
  if (!k.values.all_finite())
    throw std::invalid_argument("solve_fredholm_values: non-finite kernel");
  const std::size_t n = k.size();
  std::vector<double> sqw(n);
  for (std::size_t i = 0; i < n; ++i) sqw[i] = std::sqrt(k.axis.weights[i]);
  numerics::SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.set(i, j, sqw[i] * k.values(i, j) * sqw[j]);
  std::vector<double> vals =
      numerics::symmetric_eigenvalues(m, numerics::EigenOrder::AbsDescending);
  if (!vals.empty()) {
    const double lam1 = std::abs(vals.front());
    std::size_t keep = 0;
    while (keep < vals.size() && std::abs(vals[keep]) >= floor_rel * lam1) ++keep;
    vals.resize(keep);
  }
  return vals;
}

// Closed-form spectrum of the modulated-Gaussian kernel. With
// lambda_m = (-1)^m sqrt(pi/2)/(2 (sigma+ + sigma-)) ((sigma+ - sigma-)/(sigma+ + sigma-))^m,
// the eigenvalue of branch (n1, n2, m) is
//   g * lambda_m * b_{n1}+ * b_{n2}-,
// positive for t1 = cos and negative for t1 = sin, where the branch weight g
// accounts for modulation factors that degenerate to 1:
//   g = 4 for (n1, n2) = (0, 0), g = 2 when exactly one index is 0, g = 1
// otherwise. At sigma+ = sigma- this reproduces the symmetric-case values
// sqrt(pi/2sigma^2), +-sqrt(pi/8sigma^2) and +-sqrt(pi/32sigma^2), and the
// unmodulated asymmetric ladder 4 lambda_m matches Mehler's expansion
// exactly. For a one-sided zero modulation the sin branch of that factor
// vanishes: (0, n2) keeps only t1 = cos (multiplicity 2 in t2), while
// (n1, 0) keeps t2 = cos with both signs of t1 (multiplicity 1 each).
inline AnalyticSpectrum predict_modulated_spectrum(const ModulatedKernelSpec& spec,
                                                   double floor_rel = 1e-9) {
  spec.validate();
  AnalyticSpectrum out;
  out.validity_margin = spec.validity_margin();
  out.validity_ok = spec.validity_ok();

  const double sp = spec.sigma_plus, sm = spec.sigma_minus;
  const double lam0 = std::sqrt(std::numbers::pi / 2.0) / (2.0 * (sp + sm));
  const double ratio = (sp - sm) / (sp + sm);

  int m_max = 0;
  if (ratio != 0.0) {
    m_max = static_cast<int>(std::ceil(std::log(floor_rel) / std::log(std::abs(ratio))));
    m_max = std::clamp(m_max, 0, 200);
  }

  const auto np = static_cast<int>(spec.plus_terms.size());
  const auto nm = static_cast<int>(spec.minus_terms.size());
  for (int n1 = 0; n1 < np; ++n1) {
    for (int n2 = 0; n2 < nm; ++n2) {
      const double bb = spec.plus_terms[n1].b * spec.minus_terms[n2].b;
      if (bb == 0.0) continue; // a zero coefficient contributes no mode
      const bool zp = (n1 == 0), zm = (n2 == 0);
      const double g = zp && zm ? 4.0 : (zp || zm ? 2.0 : 1.0);
      for (int m = 0; m <= m_max; ++m) {
        const double lam_m =
            ((m % 2) ? -1.0 : 1.0) * lam0 * std::pow(ratio, m);
        const double v = g * lam_m * bb;
        if (v == 0.0) continue;
        if (zp && zm) {
          out.entries.push_back({v, 1, {n1, n2, m, TrigBranch::CosCos}});
        } else if (zp) {
          out.entries.push_back({v, 2, {n1, n2, m, TrigBranch::CosCos}});
        } else if (zm) {
          out.entries.push_back({v, 1, {n1, n2, m, TrigBranch::CosCos}});
          out.entries.push_back({-v, 1, {n1, n2, m, TrigBranch::SinCos}});
        } else {
          out.entries.push_back({v, 2, {n1, n2, m, TrigBranch::CosCos}});
          out.entries.push_back({-v, 2, {n1, n2, m, TrigBranch::SinCos}});
        }
      }
    }
  }

  double vmax = 0.0;
  for (const auto& e : out.entries) vmax = std::max(vmax, std::abs(e.value));
  std::erase_if(out.entries,
                [&](const SpectrumEntry& e) { return std::abs(e.value) < floor_rel * vmax; });

  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const SpectrumEntry& a, const SpectrumEntry& b) {
                     const double aa = std::abs(a.value), ab = std::abs(b.value);
                     if (aa != ab) return aa > ab;
                     return a.value > b.value;
                   });
  return out;
}

// Unnormalized analytic eigenfunction
//   s(x) = exp(-tau^2 x^2) t1(beta+_{n1} x) t2(beta-_{n2} x) H_m(sqrt(2) tau x)
// with tau = sqrt(sigma+ sigma-). The caller normalizes on an axis.
inline double analytic_eigenfunction(const ModulatedKernelSpec& spec, const ModeLabel& label,
                                     double x) {
  spec.validate();
  if (label.n_plus < 0 || label.n_plus >= static_cast<int>(spec.plus_terms.size()) ||
      label.n_minus < 0 || label.n_minus >= static_cast<int>(spec.minus_terms.size()) ||
      label.hermite_m < 0)
    throw std::invalid_argument("analytic_eigenfunction: label out of range");
  const double tau = std::sqrt(spec.sigma_plus * spec.sigma_minus);
  const double bp = spec.plus_terms[static_cast<std::size_t>(label.n_plus)].beta;
  const double bm = spec.minus_terms[static_cast<std::size_t>(label.n_minus)].beta;
  const bool t1_cos =
      label.branch == TrigBranch::CosCos || label.branch == TrigBranch::CosSin;
  const bool t2_cos =
      label.branch == TrigBranch::CosCos || label.branch == TrigBranch::SinCos;
  const double t1 = t1_cos ? std::cos(bp * x) : std::sin(bp * x);
  const double t2 = t2_cos ? std::cos(bm * x) : std::sin(bm * x);
  return std::exp(-tau * tau * x * x) * t1 * t2 *
         numerics::hermite(label.hermite_m, std::numbers::sqrt2 * tau * x);
}

// Sign-preserving clustering of eigenvalues: a value joins the current group
// when its relative distance to the group anchor (the largest member) is at
// most rel_tol. Groups are reported as (mean value, count), ordered by
// anchor magnitude descending.
inline std::vector<std::pair<double, int>> group_degeneracies(const SupermodeSet& s,
                                                              double rel_tol) {
  if (!(rel_tol > 0.0) || rel_tol > 0.1)
    throw std::invalid_argument("group_degeneracies: rel_tol must be in (0, 0.1]");
  std::vector<double> pos, neg;
  for (double v : s.eigenvalues) (v >= 0.0 ? pos : neg).push_back(v);
  std::sort(pos.begin(), pos.end(), [](double a, double b) { return a > b; });
  std::sort(neg.begin(), neg.end(), [](double a, double b) { return a < b; });

  std::vector<std::pair<double, int>> groups; // (anchor-signed mean, count)
  auto cluster = [&](const std::vector<double>& vals) {
    std::size_t i = 0;
    while (i < vals.size()) {
      const double anchor = std::abs(vals[i]);
      double sum = 0.0;
      std::size_t j = i;
      while (j < vals.size() && anchor - std::abs(vals[j]) <= rel_tol * anchor) {
        sum += vals[j];
        ++j;
      }
      groups.emplace_back(sum / static_cast<double>(j - i), static_cast<int>(j - i));
      i = j;
    }
  };
  cluster(pos);
  cluster(neg);
  std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    const double aa = std::abs(a.first), ab = std::abs(b.first);
    if (aa != ab) return aa > ab;
    return a.first > b.first;
  });
  return groups;
}

struct ComparisonReport {
  double max_rel_deviation = 0.0;
  std::size_t matched = 0;
  std::size_t unmatched_numeric = 0;
  std::size_t unmatched_analytic = 0;
  std::vector<double> deviations; // per matched pair, in pairing order
};

// Greedy matching by sorted signed value. Count mismatches are reported, not
// fatal: the longer tail is dropped from whichever end pairs worst.
inline ComparisonReport compare_spectra(const SupermodeSet& numeric,
                                        const AnalyticSpectrum& analytic) {
  if (numeric.eigenvalues.empty())
    throw std::invalid_argument("compare_spectra: empty numeric spectrum");
  std::vector<double> a = numeric.eigenvalues;
  std::vector<double> b;
  for (const auto& e : analytic.entries)
    for (int m = 0; m < e.multiplicity; ++m) b.push_back(e.value);

  ComparisonReport rep;
  if (b.empty()) {
    rep.unmatched_numeric = a.size();
    return rep;
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  // align the equal-length windows that pair best
  std::size_t ia = 0, ib = 0;
  if (a.size() > b.size()) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t off = 0; off + b.size() <= a.size(); ++off) {
      double cost = 0.0;
      for (std::size_t i = 0; i < b.size(); ++i) cost += std::abs(a[off + i] - b[i]);
      if (cost < best) { best = cost; ia = off; }
    }
    rep.unmatched_numeric = a.size() - b.size();
  } else if (b.size() > a.size()) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t off = 0; off + a.size() <= b.size(); ++off) {
      double cost = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) cost += std::abs(a[i] - b[off + i]);
      if (cost < best) { best = cost; ib = off; }
    }
    rep.unmatched_analytic = b.size() - a.size();
  }

  const std::size_t npairs = std::min(a.size(), b.size());
  rep.matched = npairs;
  for (std::size_t i = 0; i < npairs; ++i) {
    const double x = a[ia + i], y = b[ib + i];
    const double denom = std::max(std::abs(x), std::abs(y));
    const double dev = denom > 0.0 ? std::abs(x - y) / denom : 0.0;
    rep.deviations.push_back(dev);
    rep.max_rel_deviation = std::max(rep.max_rel_deviation, dev);
  }
  return rep;
}

} // namespace opokit::supermodes
