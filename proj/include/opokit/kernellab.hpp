// Interaction-kernel constructors. A kernel K(xi, xi') couples signal/idler
// mode pairs in the quadratic parametric Hamiltonian; every builder here
// returns a KernelMatrix sampled on a quadrature axis, exactly symmetric by
// construction. The factorized family K(x,x') = K+(x+x') K-(x-x') with
// cosine-modulated Gaussian factors is the analytically solvable workhorse;
// the temporal (phase-matching sinc) and spatial (diffraction sine-integral)
// builders produce the physical kernels it approximates.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "numerics.hpp"
#include "pumps.hpp"

namespace opokit::kernellab {

using numerics::Axis;
using numerics::SymMatrix;

// Parameters of K±(u) = exp(-sigma±^2 u^2 / 2) sum_n b_n± cos(beta_n± u).
// The first term of each list has beta = 0; beta values are distinct,
// non-negative and sorted ascending.
struct ModulatedKernelSpec {
  double sigma_plus = 1.0;
  double sigma_minus = 1.0;
  std::vector<pumps::CosTerm> plus_terms{{1.0, 0.0}};
  std::vector<pumps::CosTerm> minus_terms{{1.0, 0.0}};

  void validate() const {
    if (!(sigma_plus > 0.0) || !(sigma_minus > 0.0))
      throw std::invalid_argument("ModulatedKernelSpec: sigma must be > 0");
    auto check = [](const std::vector<pumps::CosTerm>& terms, const char* which) {
      if (terms.empty())
        throw std::invalid_argument(std::string("ModulatedKernelSpec: empty ") + which);
      if (terms.front().beta != 0.0)
        throw std::invalid_argument(std::string("ModulatedKernelSpec: first ") + which +
                                    " entry must have beta = 0");
      for (std::size_t i = 1; i < terms.size(); ++i) {
        if (!(terms[i].beta > terms[i - 1].beta))
          throw std::invalid_argument(std::string("ModulatedKernelSpec: ") + which +
                                      " beta values must be distinct ascending");
      }
    };
    check(plus_terms, "plus_terms");
    check(minus_terms, "minus_terms");
  }

  // Advisory condition for the analytic spectrum: every nonzero modulation
  // frequency must satisfy beta^2 >= 10 * 8 sigma^2 (factor-10 margin on the
  // separation condition). Returns the worst margin beta^2 / (8 sigma^2);
  // values >= 10 count as valid. Specs failing it still diagonalize fine
  // numerically; only the closed-form prediction degrades.
  double validity_margin() const {
    const double smax2 = std::max(sigma_plus * sigma_plus, sigma_minus * sigma_minus);
    double margin = std::numeric_limits<double>::infinity();
    for (const auto* terms : {&plus_terms, &minus_terms})
      for (const auto& t : *terms)
        if (t.beta > 0.0) margin = std::min(margin, t.beta * t.beta / (8.0 * smax2));
    return margin;
  }
  bool validity_ok() const { return validity_margin() >= 10.0; }
};

// Single- or multi-crystal temporal phase matching. tau1 is the group-delay
// mismatch scale; the mismatch model is Phi = tau1 (w + w') + phi_quadratic
// (w + w')^2 (higher orders and Sellmeier data are out of scope). Crystal
// positions are mid-plane offsets in units of the crystal length; at most one
// of crystal_offsets / symmetric_pair_distances may be populated.
struct TemporalCrystal {
  double tau1 = 1.0;
  double phi_quadratic = 0.0;
  std::vector<double> crystal_offsets;          // z_n / l_c, must be symmetric about 0
  std::vector<double> symmetric_pair_distances; // d_n / l_c

  void validate() const {
    if (!(tau1 > 0.0)) throw std::invalid_argument("TemporalCrystal: tau1 must be > 0");
    if (!std::isfinite(phi_quadratic))
      throw std::invalid_argument("TemporalCrystal: non-finite phi_quadratic");
    if (!crystal_offsets.empty() && !symmetric_pair_distances.empty())
      throw std::invalid_argument(
          "TemporalCrystal: set at most one of crystal_offsets / symmetric_pair_distances");
    for (double z : crystal_offsets)
      if (!std::isfinite(z)) throw std::invalid_argument("TemporalCrystal: non-finite offset");
    // a real kernel needs the offsets symmetric about the midplane
    std::vector<double> sorted = crystal_offsets;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const double mirror = -sorted[sorted.size() - 1 - i];
      if (std::abs(sorted[i] - mirror) > 1e-12 * (1.0 + std::abs(sorted[i])))
        throw std::invalid_argument(
            "TemporalCrystal: offsets must be symmetric about z = 0 "
            "(use symmetric_pair_distances for paired crystals)");
    }
    for (double d : symmetric_pair_distances)
      if (!std::isfinite(d)) throw std::invalid_argument("TemporalCrystal: non-finite distance");
  }

  double phase_mismatch(double omega_sum) const {
    return tau1 * omega_sum + phi_quadratic * omega_sum * omega_sum;
  }

  // Phase-matching factor D(Phi): sinc for a single crystal, the symmetric
  // multi-crystal sums otherwise.
  double phase_matching(double phi) const {
    const double s = numerics::sinc(phi);
    if (!symmetric_pair_distances.empty()) {
      double c = 0.0;
      for (double d : symmetric_pair_distances) c += 2.0 * std::cos(d * phi);
      return c * s;
    }
    if (!crystal_offsets.empty()) {
      double c = 0.0;
      for (double z : crystal_offsets) c += std::cos(2.0 * z * phi);
      return c * s;
    }
    return s;
  }
};

// Spatial (transverse) crystal response; l_coh = sqrt(2 l_c / k_s) is the
// coherence length setting the width of the diffraction function.
struct SpatialCrystal {
  double coherence_length = 1.0;

  void validate() const {
    if (!(coherence_length > 0.0))
      throw std::invalid_argument("SpatialCrystal: coherence_length must be > 0");
  }

  // Delta(r) = (1/(pi l^2)) [pi/2 - Si((r/l)^2)], finite at r = 0.
  double diffraction(double r) const {
    const double l = coherence_length;
    const double arg = (r / l) * (r / l);
    return (std::numbers::pi / 2.0 - numerics::sine_integral(arg)) /
           (std::numbers::pi * l * l);
  }
};

// A real symmetric kernel sampled on a quadrature axis.
struct KernelMatrix {
  Axis axis;
  SymMatrix values;
  std::string provenance;

  std::size_t size() const { return axis.size(); }
};

namespace detail {

template <class F>
KernelMatrix build_symmetric(const Axis& axis, std::string provenance, F&& k) {
  axis.validate();
  const std::size_t n = axis.size();
  KernelMatrix km;
  km.axis = axis;
  km.values = SymMatrix(n);
  km.provenance = std::move(provenance);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = k(axis.points[i], axis.points[j]);
      if (!std::isfinite(v)) throw numerical_error("kernel: non-finite entry");
      km.values.set(i, j, v);
    }
  return km;
}

inline double eval_factor(double u, double sigma, const std::vector<pumps::CosTerm>& terms) {
  double mod = 0.0;
  for (const auto& t : terms) mod += t.b * std::cos(t.beta * u);
  return std::exp(-0.5 * sigma * sigma * u * u) * mod;
}

} // namespace detail

// K(x,x') = K+(x+x') K-(x-x') sampled on the axis. The axis must span at
// least +-4/min(sigma+, sigma-).
inline KernelMatrix build_modulated(const ModulatedKernelSpec& spec, const Axis& axis) {
  spec.validate();
  axis.validate();
  const double need = 4.0 / std::min(spec.sigma_plus, spec.sigma_minus);
  if (axis.points.front() > -need || axis.points.back() < need) {
    std::ostringstream msg;
    msg << "build_modulated: axis must span at least [-" << need << ", " << need << "]";
    throw std::invalid_argument(msg.str());
  }
  std::ostringstream prov;
  prov << "modulated(sigma+=" << spec.sigma_plus << ", sigma-=" << spec.sigma_minus
       << ", N+=" << spec.plus_terms.size() - 1 << ", N-=" << spec.minus_terms.size() - 1 << ")";
  return detail::build_symmetric(axis, prov.str(), [&](double x, double xp) {
    return detail::eval_factor(x + xp, spec.sigma_plus, spec.plus_terms) *
           detail::eval_factor(x - xp, spec.sigma_minus, spec.minus_terms);
  });
}

// K(w,w') = alpha_p(w+w') D(w,w'). The axis must be in frequency units
// consistent with crystal.tau1.
inline KernelMatrix build_temporal(const TemporalCrystal& crystal,
                                   const pumps::PumpSpectrum& pump, const Axis& axis) {
  crystal.validate();
  pumps::validate(pump);
  std::ostringstream prov;
  prov << "temporal(tau1=" << crystal.tau1 << ")";
  return detail::build_symmetric(axis, prov.str(), [&](double w, double wp) {
    const double u = w + wp;
    return pumps::eval_spectrum(pump, u) * crystal.phase_matching(crystal.phase_mismatch(u));
  });
}

// One-dimensional transverse cut of the spatial kernel,
//   K(x,x') = alpha_p((x+x')/2) Delta(x-x'),
// with the axis in units of the coherence length.
inline KernelMatrix build_spatial_cut(const SpatialCrystal& crystal,
                                      const std::function<double(double)>& pump_profile,
                                      const Axis& axis) {
  crystal.validate();
  std::ostringstream prov;
  prov << "spatial(l_coh=" << crystal.coherence_length << ")";
  return detail::build_symmetric(axis, prov.str(), [&](double x, double xp) {
    return pump_profile(0.5 * (x + xp)) * crystal.diffraction(x - xp);
  });
}

// Convenience constructor for a synchronously pumped OPO kernel. tau1 and the
// pump's time parameters are given in one common physical unit (say fs); the
// kernel is built on a frequency axis in units of 1/tau1, auto-sized to cover
// the larger of the crystal acceptance and the pump's Gaussian support.
//
// The default half-span of 8/tau1 keeps well over a hundred positive
// eigenvalues on the degenerate plateau for pulse durations around a
// picosecond at tau1 = 20 fs, which is the observable the kernel is built to
// reproduce.
inline KernelMatrix realistic_spopo_kernel(double tau1, const pumps::PumpSpectrum& pump,
                                           std::size_t n_points, double x_max_override = 0.0) {
  if (!(tau1 > 0.0)) throw std::invalid_argument("realistic_spopo_kernel: tau1 must be > 0");
  const pumps::PumpSpectrum scaled = pumps::scale_times(pump, 1.0 / tau1);
  double x_max = std::max(8.0, 0.5 * pumps::gaussian_support(scaled));
  if (x_max_override > 0.0) x_max = x_max_override;
  Axis axis = numerics::make_uniform_axis(x_max, n_points, "omega*tau1");
  TemporalCrystal crystal;
  crystal.tau1 = 1.0;
  KernelMatrix km = build_temporal(crystal, scaled, axis);
  std::ostringstream prov;
  prov << "spopo(tau1=" << tau1 << ", x_max=" << x_max << ", n=" << n_points << ")";
  km.provenance = prov.str();
  return km;
}

} // namespace opokit::kernellab
