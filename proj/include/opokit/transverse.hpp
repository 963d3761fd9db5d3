// Discrete transverse-mode OPO: an optical cavity tuned to one family of
// frequency-degenerate Laguerre-Gauss modes, pumped by a cylindrically
// symmetric superposition of TEM00 beams. OAM conservation couples +l to -l
// only, so the supermodes are the hybrid (cosine/sine) Laguerre-Gauss modes
// and the eigenvalues are the pump overlaps
//   chi_l = 2 pi Int r dr alpha_p(r) [R_{(f-l)/2}^l(r)]^2.
// All lengths are in units of the signal spot size w_s; chi is then
// dimensionless with the wide-pump asymptote sqrt(2/pi)/rho.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <lapacke.h>

#include "numerics.hpp"

namespace opokit::transverse {

// Transverse mode family f = 2p + |l|; family f holds the f + 1 modes with
// l = l0, l0 + 2, ..., f, where l0 = f mod 2.
struct LGFamily {
  int f = 0;
  double w_s = 1.0;

  void validate() const {
    if (f < 0) throw std::invalid_argument("LGFamily: f must be >= 0");
    if (!(w_s > 0.0)) throw std::invalid_argument("LGFamily: w_s must be > 0");
  }

  int l0() const { return f % 2; }

  std::vector<int> l_values() const {
    std::vector<int> ls;
    for (int l = l0(); l <= f; l += 2) ls.push_back(l);
    return ls;
  }

  bool contains(int l) const { return l >= l0() && l <= f && ((l - l0()) % 2 == 0); }

  /// Number of hybrid supermodes: C_l for every l plus S_l for l > 0.
  int mode_count() const { return f + 1; }
};

struct GaussComponent {
  double amplitude = 1.0;
  double rho = 1.0; // spot-size ratio w_p / w_s
};

// Pump built from TEM00 beams of distinct widths, alpha_p(r) = w_s sum_k
// c_k G_{rho_k}(r) with G the normalized Gaussian profile.
struct MultiGaussPump {
  std::vector<GaussComponent> components;

  void validate() const {
    if (components.empty()) throw std::invalid_argument("MultiGaussPump: needs a component");
    for (std::size_t i = 0; i < components.size(); ++i) {
      if (!(components[i].rho > 0.0))
        throw std::invalid_argument("MultiGaussPump: rho must be > 0");
      for (std::size_t j = i + 1; j < components.size(); ++j)
        if (components[i].rho == components[j].rho)
          throw std::invalid_argument("MultiGaussPump: rho values must be distinct");
    }
  }
};

// Couplings chi_l for one mode family. Complex-valued for generality (a pump
// phase psi_l rotates the squeezing direction); every pump in scope is real.
struct ChiSet {
  LGFamily family;
  std::map<int, std::complex<double>> chi;
};

// Radial Laguerre-Gauss profile at the cavity waist,
//   R_p^l(r) = sqrt(2 p!/(pi (p+l)!)) (1/w) (sqrt(2) r/w)^l L_p^l(2 r^2/w^2)
//              exp(-r^2/w^2),
// normalized so that 2 pi Int r [R_p^l]^2 dr = 1.
inline double lg_radial(int p, int l, double w, double r) {
  if (p < 0 || l < 0) throw std::invalid_argument("lg_radial: p, l must be >= 0");
  if (!(w > 0.0)) throw std::invalid_argument("lg_radial: w must be > 0");
  if (r < 0.0) throw std::invalid_argument("lg_radial: r must be >= 0");
  double pfrac = 1.0; // p!/(p+l)!
  for (int i = p + 1; i <= p + l; ++i) pfrac /= static_cast<double>(i);
  const double norm = std::sqrt(2.0 * pfrac / std::numbers::pi) / w;
  const double s2r = std::numbers::sqrt2 * r / w;
  const double u = 2.0 * r * r / (w * w);
  return norm * std::pow(s2r, l) * numerics::laguerre_assoc(p, l, u) * std::exp(-r * r / (w * w));
}

namespace detail {

inline const numerics::Quadrature& laguerre_rule() {
  static const numerics::Quadrature q = numerics::gauss_laguerre(48);
  return q;
}

// chi for a unit-amplitude Gaussian component: substituting u = 2 r^2 turns
// the overlap into (1/rho) sqrt(2/pi) (p!/(p+l)!) Int u^l [L_p^l(u)]^2
// e^{-s u} du with s = 1 + 1/(2 rho^2); the integrand is a polynomial times
// e^{-s u}, so Gauss-Laguerre is exact with enough nodes.
inline double chi_single_gaussian(int f, int l, double rho) {
  const int p = (f - l) / 2;
  const double s = 1.0 + 1.0 / (2.0 * rho * rho);
  const auto& q = laguerre_rule();
  double integral = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double u = q.nodes[i] / s;
    const double lp = numerics::laguerre_assoc(p, l, u);
    integral += q.weights[i] * std::pow(u, l) * lp * lp;
  }
  integral /= s;
  double pfrac = 1.0;
  for (int i = p + 1; i <= p + l; ++i) pfrac /= static_cast<double>(i);
  return std::sqrt(2.0 / std::numbers::pi) / rho * pfrac * integral;
}

} // namespace detail

/// Pump-signal overlap chi_l, linear in the pump amplitudes.
inline double chi_overlap(const LGFamily& fam, int l, const MultiGaussPump& pump) {
  fam.validate();
  pump.validate();
  if (!fam.contains(l))
    throw std::invalid_argument("chi_overlap: l not in family (need l = f mod 2, f mod 2 + 2, ..., f)");
  double chi = 0.0;
  for (const auto& c : pump.components)
    chi += c.amplitude * detail::chi_single_gaussian(fam.f, l, c.rho);
  return chi;
}

inline ChiSet chi_set(const LGFamily& fam, const MultiGaussPump& pump) {
  ChiSet cs;
  cs.family = fam;
  for (int l : fam.l_values()) cs.chi[l] = chi_overlap(fam, l, pump);
  return cs;
}

/// Coupling ratios r_l = chi_l / chi_{l0}.
inline std::map<int, double> chi_ratios(const LGFamily& fam, const MultiGaussPump& pump) {
  std::map<int, double> chi;
  double scale = 0.0;
  for (int l : fam.l_values()) {
    chi[l] = chi_overlap(fam, l, pump);
    scale = std::max(scale, std::abs(chi[l]));
  }
  const double ref = chi[fam.l0()];
  if (std::abs(ref) <= 1e-12 * scale)
    throw numerical_error(
        "chi_ratios: chi_{l0} vanishes for this pump; use the raw chi values instead");
  std::map<int, double> r;
  for (auto& [l, v] : chi) r[l] = v / ref;
  return r;
}

// Pump-power threshold relative to the doubly resonant reference width
// rho = 1/sqrt(2): Rth(rho) = chi_{l0}^2(1/sqrt 2) / chi_{l0}^2(rho).
inline double threshold_ratio(const LGFamily& fam, double rho) {
  fam.validate();
  if (!(rho > 0.0)) throw std::invalid_argument("threshold_ratio: rho must be > 0");
  const double ref = detail::chi_single_gaussian(fam.f, fam.l0(), 1.0 / std::numbers::sqrt2);
  const double cur = detail::chi_single_gaussian(fam.f, fam.l0(), rho);
  return (ref * ref) / (cur * cur);
}

namespace detail {

inline void check_mixing_pair(double rho_a, double rho_b) {
  if (!(rho_a > 0.0) || !(rho_b > 0.0))
    throw std::invalid_argument("mixing_angle: rho values must be > 0");
  if (std::abs(rho_a - rho_b) <= 1e-14 * std::max(rho_a, rho_b))
    throw std::invalid_argument(
        "mixing_angle: rho_a = rho_b makes the pump vanish identically (degenerate pair)");
}

} // namespace detail

// Mixing angle of the two-Gaussian pump w_s [G_a cos(theta) - G_b sin(theta)]
// (family f = 3) that flips the sign between the couplings: chi_1 = -chi_3.
inline double mixing_angle_opposite(double rho_a, double rho_b) {
  detail::check_mixing_pair(rho_a, rho_b);
  const double t = std::pow(rho_a / rho_b, 3) *
                   std::pow((1.0 + 2.0 * rho_b * rho_b) / (1.0 + 2.0 * rho_a * rho_a), 4) *
                   (1.0 + 4.0 * std::pow(rho_a, 4)) / (1.0 + 4.0 * std::pow(rho_b, 4));
  return std::atan(t);
}

/// Mixing angle cancelling the l = 1 coupling: chi_1 = 0 while chi_3 stays finite.
inline double mixing_angle_null(double rho_a, double rho_b) {
  detail::check_mixing_pair(rho_a, rho_b);
  const double t = std::pow(rho_a / rho_b, 3) *
                   std::pow((1.0 + 2.0 * rho_b * rho_b) / (1.0 + 2.0 * rho_a * rho_a), 4) *
                   (1.0 + 2.0 * std::pow(rho_a, 4)) / (1.0 + 2.0 * std::pow(rho_b, 4));
  return std::atan(t);
}

/// The two-Gaussian pump realizing a given mixing angle.
inline MultiGaussPump mixing_pump(double rho_a, double rho_b, double theta) {
  detail::check_mixing_pair(rho_a, rho_b);
  return MultiGaussPump{{{std::cos(theta), rho_a}, {-std::sin(theta), rho_b}}};
}

// Solves for the amplitudes of 1 + (f - l0)/2 TEM00 beams so that the
// couplings chi_l are proportional to the requested targets. The per-rho
// coupling matrix must be well conditioned; widely separated rho values help.
inline MultiGaussPump synthesize_chi_targets(const LGFamily& fam,
                                             const std::map<int, double>& targets,
                                             const std::vector<double>& rhos) {
  fam.validate();
  const std::vector<int> ls = fam.l_values();
  if (rhos.size() != ls.size())
    throw std::invalid_argument("synthesize_chi_targets: need exactly 1 + (f - l0)/2 rhos");
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    if (!(rhos[i] > 0.0)) throw std::invalid_argument("synthesize_chi_targets: rho must be > 0");
    for (std::size_t j = i + 1; j < rhos.size(); ++j)
      if (rhos[i] == rhos[j])
        throw std::invalid_argument("synthesize_chi_targets: rhos must be distinct");
  }
  if (targets.size() != ls.size())
    throw std::invalid_argument("synthesize_chi_targets: targets must cover every l in the family");
  const lapack_int n = static_cast<lapack_int>(ls.size());
  std::vector<double> a(ls.size() * ls.size()); // column-major
  std::vector<double> rhs(ls.size());
  double norm1 = 0.0;
  for (std::size_t col = 0; col < rhos.size(); ++col) {
    double colsum = 0.0;
    for (std::size_t row = 0; row < ls.size(); ++row) {
      const double v = detail::chi_single_gaussian(fam.f, ls[row], rhos[col]);
      a[col * ls.size() + row] = v;
      colsum += std::abs(v);
    }
    norm1 = std::max(norm1, colsum);
  }
  for (std::size_t row = 0; row < ls.size(); ++row) {
    const auto it = targets.find(ls[row]);
    if (it == targets.end())
      throw std::invalid_argument("synthesize_chi_targets: missing target for l=" +
                                  std::to_string(ls[row]));
    rhs[row] = it->second;
  }

  std::vector<lapack_int> ipiv(ls.size());
  std::vector<double> lu = a;
  lapack_int info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, n, n, lu.data(), n, ipiv.data());
  double rcond = 0.0;
  if (info == 0)
    LAPACKE_dgecon(LAPACK_COL_MAJOR, '1', n, lu.data(), n, norm1, &rcond);
  if (info != 0 || rcond < 1e-12) {
    std::ostringstream msg;
    msg << "synthesize_chi_targets: coupling matrix is numerically singular "
        << "(estimated condition number " << (rcond > 0.0 ? 1.0 / rcond : INFINITY)
        << "); choose more widely separated rho values";
    throw numerical_error(msg.str());
  }
  info = LAPACKE_dgetrs(LAPACK_COL_MAJOR, 'N', n, 1, lu.data(), n, ipiv.data(), rhs.data(), n);
  if (info != 0) throw numerical_error("synthesize_chi_targets: solve failed");

  MultiGaussPump pump;
  for (std::size_t k = 0; k < rhos.size(); ++k)
    pump.components.push_back({rhs[k], rhos[k]});
  return pump;
}

// Square sampling grid for transverse fields, [-extent, extent]^2 with n
// points per side.
struct TransverseGrid {
  double extent = 4.0;
  std::size_t n = 96;

  void validate() const {
    if (!(extent > 0.0) || n < 2) throw std::invalid_argument("TransverseGrid: bad parameters");
  }
  double step() const { return 2.0 * extent / static_cast<double>(n - 1); }
  double point(std::size_t i) const { return -extent + step() * static_cast<double>(i); }
  double cell() const { return step() * step(); }
};

struct Field2D {
  TransverseGrid grid;
  std::vector<double> values; // row-major n x n

  double& at(std::size_t i, std::size_t j) { return values[i * grid.n + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * grid.n + j]; }
};

enum class HybridKind { C, S };

// Hybrid Laguerre-Gauss supermode C_l ~ R cos(l phi) or S_l ~ R sin(l phi),
// L2-normalized on the grid.
inline Field2D hybrid_mode_profile(const LGFamily& fam, int l, HybridKind kind,
                                   const TransverseGrid& grid) {
  fam.validate();
  grid.validate();
  if (!fam.contains(l)) throw std::invalid_argument("hybrid_mode_profile: l not in family");
  if (kind == HybridKind::S && l == 0)
    throw std::invalid_argument("hybrid_mode_profile: S_0 does not exist (sin(0) = 0)");
  const int p = (fam.f - l) / 2;
  Field2D field;
  field.grid = grid;
  field.values.resize(grid.n * grid.n);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.point(i);
    for (std::size_t j = 0; j < grid.n; ++j) {
      const double y = grid.point(j);
      const double r = std::hypot(x, y);
      const double phi = std::atan2(y, x);
      const double ang = kind == HybridKind::C ? std::cos(l * phi) : std::sin(l * phi);
      const double v = lg_radial(p, l, fam.w_s, r) * ang;
      field.at(i, j) = v;
      norm2 += v * v;
    }
  }
  norm2 *= grid.cell();
  if (!(norm2 > 0.0)) throw numerical_error("hybrid_mode_profile: zero field on grid");
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : field.values) v *= inv;
  return field;
}

// The ordered hybrid-mode list for a family: C_{l0}, S_{l0} (if l0 > 0),
// C_{l0+2}, S_{l0+2}, ... — f + 1 fields.
inline std::vector<Field2D> hybrid_mode_basis(const LGFamily& fam, const TransverseGrid& grid) {
  std::vector<Field2D> basis;
  for (int l : fam.l_values()) {
    basis.push_back(hybrid_mode_profile(fam, l, HybridKind::C, grid));
    if (l > 0) basis.push_back(hybrid_mode_profile(fam, l, HybridKind::S, grid));
  }
  return basis;
}

} // namespace opokit::transverse
