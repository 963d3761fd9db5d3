// Below-threshold OPO steady state per supermode. Each supermode obeys an
// independent Langevin equation with gain proportional to its eigenvalue, so
// the whole device is a set of single-mode OPOs: threshold is set by the
// largest |Lambda|, and the output quadrature spectra are the standard
// input-output Lorentzians
//   V-(Omega) = 1 - 4 r / ((1 + r)^2 + (Omega/gamma)^2),
//   V+(Omega) = 1 + 4 r / ((1 - r)^2 + (Omega/gamma)^2),
// with r = pump_fraction * |Lambda_n| / |Lambda_1| in [0, 1). Shot noise = 1;
// the product V- V+ is exactly 1 in this lossless ideal-outcoupling model.
//
// Sign convention: Lambda_n > 0 amplifies the amplitude quadrature and
// squeezes the phase quadrature (direction pi/2); Lambda_n < 0 squeezes the
// amplitude quadrature (direction 0).
//
// The paper's dimensionless pump parameter is called pump fraction here
// (fraction of threshold) to avoid a symbol clash with the Gaussian kernel
// width sigma.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "supermodes.hpp"

namespace opokit::opodyn {

/// Dimensionless pump parameter at threshold: 1/|Lambda_1|.
inline double threshold_pump(const supermodes::SupermodeSet& s) {
  if (s.eigenvalues.empty()) throw std::invalid_argument("threshold_pump: empty supermode set");
  return 1.0 / std::abs(s.eigenvalues.front());
}

/// Zero-frequency squeezed-quadrature noise at threshold:
/// ((|Lambda_1| - |Lambda_n|) / (|Lambda_1| + |Lambda_n|))^2.
inline double threshold_squeezing(double lambda1, double lambda_n) {
  const double a1 = std::abs(lambda1), an = std::abs(lambda_n);
  if (!(a1 > 0.0)) throw std::invalid_argument("threshold_squeezing: lambda1 must be nonzero");
  const double d = (a1 - an) / (a1 + an);
  return d * d;
}

/// Noise level in decibels below shot noise: -10 log10(v).
inline double squeezing_db(double v) {
  if (!(v > 0.0)) throw std::invalid_argument("squeezing_db: noise level must be > 0");
  return -10.0 * std::log10(v);
}

struct SqueezingEntry {
  double lambda = 0.0;     // supermode eigenvalue
  double r = 0.0;          // effective pump parameter, pump_fraction*|L_n|/|L_1|
  double v_minus_0 = 1.0;  // squeezed quadrature noise at Omega = 0
  double v_plus_0 = 1.0;   // anti-squeezed quadrature noise at Omega = 0
  double direction = 0.0;  // angle of the squeezed quadrature
  std::vector<double> v_minus; // sampled V-(Omega/gamma), if a grid was given
  std::vector<double> v_plus;
};

struct SqueezingReport {
  double pump_fraction = 0.0;
  std::vector<double> omega_grid; // in units of the cavity loss rate
  std::vector<SqueezingEntry> modes;
};

inline double v_minus(double r, double omega_over_gamma) {
  const double d = (1.0 + r) * (1.0 + r) + omega_over_gamma * omega_over_gamma;
  return 1.0 - 4.0 * r / d;
}

inline double v_plus(double r, double omega_over_gamma) {
  const double d = (1.0 - r) * (1.0 - r) + omega_over_gamma * omega_over_gamma;
  return 1.0 + 4.0 * r / d;
}

inline SqueezingReport squeezing_report(const supermodes::SupermodeSet& s, double pump_fraction,
                                        const std::vector<double>& omega_grid = {}) {
  if (s.eigenvalues.empty()) throw std::invalid_argument("squeezing_report: empty supermode set");
  if (!(pump_fraction >= 0.0) || pump_fraction >= 1.0)
    throw std::invalid_argument(
        "squeezing_report: pump_fraction must be in [0, 1); above-threshold operation is out of "
        "the below-threshold model's scope");
  SqueezingReport rep;
  rep.pump_fraction = pump_fraction;
  rep.omega_grid = omega_grid;
  const double lam1 = std::abs(s.eigenvalues.front());
  for (double lam : s.eigenvalues) {
    SqueezingEntry e;
    e.lambda = lam;
    e.r = pump_fraction * std::abs(lam) / lam1;
    e.v_minus_0 = v_minus(e.r, 0.0);
    e.v_plus_0 = v_plus(e.r, 0.0);
    e.direction = lam > 0.0 ? std::numbers::pi / 2.0 : 0.0;
    for (double w : omega_grid) {
      e.v_minus.push_back(v_minus(e.r, w));
      e.v_plus.push_back(v_plus(e.r, w));
    }
    rep.modes.push_back(std::move(e));
  }
  return rep;
}

} // namespace opokit::opodyn
