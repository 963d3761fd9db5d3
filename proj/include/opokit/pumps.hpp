// Pump spectral-amplitude models: Gaussian and rectangular-pulse envelopes,
// harmonic-modulated (pulse-shaper) spectra and delay-line combs. All
// variants are even real functions of omega built from cosines and even
// envelopes; frequencies are in units of 1/tau1 unless the axis label says
// otherwise. Spectra are dimensionless shapes: overall pump power lives in
// the pump-strength parameter of the OPO dynamics module.
#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "numerics.hpp"

namespace opokit::pumps {

struct PumpSpectrum;

// exp(-tau_p^2 omega^2 / 2); tau_p = 0 gives a flat spectrum.
struct Gaussian {
  double tau_p = 1.0;
};

// sinc(tau_p omega), the spectrum of a rectangular pulse of duration tau_p.
struct Rectangular {
  double tau_p = 1.0;
};

struct CosTerm {
  double b = 0.0;
  double beta = 0.0; // modulation frequency, >= 0
};

// base(omega) * sum_n b_n cos(beta_n omega); beta_0 = 0 by definition.
struct Shaped {
  std::shared_ptr<const PumpSpectrum> base;
  std::vector<CosTerm> coeffs;
};

struct DelayTerm {
  double b = 0.0;
  double t = 0.0; // delay, > 0
};

// base(omega) * [b0 + sum_n b_n cos(t_n omega)]: a superposition of
// delayed/advanced pulse trains.
struct DelayComb {
  std::shared_ptr<const PumpSpectrum> base;
  double b0 = 0.0;
  std::vector<DelayTerm> terms;
};

struct PumpSpectrum {
  std::variant<Gaussian, Rectangular, Shaped, DelayComb> v;

  static PumpSpectrum gaussian(double tau_p) { return {Gaussian{tau_p}}; }
  static PumpSpectrum rectangular(double tau_p) { return {Rectangular{tau_p}}; }
  static PumpSpectrum shaped(PumpSpectrum base, std::vector<CosTerm> coeffs) {
    Shaped s;
    s.base = std::make_shared<PumpSpectrum>(std::move(base));
    s.coeffs = std::move(coeffs);
    return {std::move(s)};
  }
  static PumpSpectrum delay_comb(PumpSpectrum base, double b0, std::vector<DelayTerm> terms) {
    DelayComb d;
    d.base = std::make_shared<PumpSpectrum>(std::move(base));
    d.b0 = b0;
    d.terms = std::move(terms);
    return {std::move(d)};
  }
};

inline void validate(const PumpSpectrum& p) {
  struct V {
    void operator()(const Gaussian& g) const {
      if (!(g.tau_p >= 0.0)) throw std::invalid_argument("pump: Gaussian tau_p must be >= 0");
    }
    void operator()(const Rectangular& r) const {
      if (!(r.tau_p >= 0.0)) throw std::invalid_argument("pump: Rectangular tau_p must be >= 0");
    }
    void operator()(const Shaped& s) const {
      if (!s.base) throw std::invalid_argument("pump: Shaped requires a base spectrum");
      if (s.coeffs.empty() || s.coeffs.front().beta != 0.0)
        throw std::invalid_argument("pump: Shaped coefficients must start with beta = 0");
      for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
        if (s.coeffs[i].beta < 0.0) throw std::invalid_argument("pump: beta must be >= 0");
        for (std::size_t j = i + 1; j < s.coeffs.size(); ++j)
          if (s.coeffs[i].beta == s.coeffs[j].beta)
            throw std::invalid_argument("pump: beta values must be distinct");
      }
      validate(*s.base);
    }
    void operator()(const DelayComb& d) const {
      if (!d.base) throw std::invalid_argument("pump: DelayComb requires a base spectrum");
      for (std::size_t i = 0; i < d.terms.size(); ++i) {
        if (!(d.terms[i].t > 0.0)) throw std::invalid_argument("pump: delays must be > 0");
        for (std::size_t j = i + 1; j < d.terms.size(); ++j)
          if (d.terms[i].t == d.terms[j].t)
            throw std::invalid_argument("pump: delays must be distinct");
      }
      validate(*d.base);
    }
  };
  std::visit(V{}, p.v);
}

inline double eval_spectrum(const PumpSpectrum& p, double omega) {
  struct V {
    double omega;
    double operator()(const Gaussian& g) const {
      return std::exp(-0.5 * g.tau_p * g.tau_p * omega * omega);
    }
    double operator()(const Rectangular& r) const {
      return numerics::sinc(r.tau_p * omega);
    }
    double operator()(const Shaped& s) const {
      double mod = 0.0;
      for (const CosTerm& c : s.coeffs) mod += c.b * std::cos(c.beta * omega);
      return eval_spectrum(*s.base, omega) * mod;
    }
    double operator()(const DelayComb& d) const {
      double mod = d.b0;
      for (const DelayTerm& t : d.terms) mod += t.b * std::cos(t.t * omega);
      return eval_spectrum(*d.base, omega) * mod;
    }
  };
  return std::visit(V{omega}, p.v);
}

// Rescales every time-like parameter (tau_p, delays, modulation frequencies)
// by `factor`; used to re-express a pump in units of 1/tau1.
inline PumpSpectrum scale_times(const PumpSpectrum& p, double factor) {
  struct V {
    double f;
    PumpSpectrum operator()(const Gaussian& g) const {
      return PumpSpectrum::gaussian(g.tau_p * f);
    }
    PumpSpectrum operator()(const Rectangular& r) const {
      return PumpSpectrum::rectangular(r.tau_p * f);
    }
    PumpSpectrum operator()(const Shaped& s) const {
      std::vector<CosTerm> coeffs = s.coeffs;
      for (CosTerm& c : coeffs) c.beta *= f;
      return PumpSpectrum::shaped(scale_times(*s.base, f), std::move(coeffs));
    }
    PumpSpectrum operator()(const DelayComb& d) const {
      std::vector<DelayTerm> terms = d.terms;
      for (DelayTerm& t : terms) t.t *= f;
      return PumpSpectrum::delay_comb(scale_times(*d.base, f), d.b0, std::move(terms));
    }
  };
  return std::visit(V{factor}, p.v);
}

// Half-width of the smallest interval outside which the pump's Gaussian
// envelope is negligible (six 1/e half-widths); 0 means "no constraint"
// (flat or slowly decaying spectra such as sinc envelopes, whose kernels are
// bounded by the crystal acceptance instead).
inline double gaussian_support(const PumpSpectrum& p) {
  struct V {
    double operator()(const Gaussian& g) const { return g.tau_p > 0.0 ? 6.0 / g.tau_p : 0.0; }
    double operator()(const Rectangular&) const { return 0.0; }
    double operator()(const Shaped& s) const { return gaussian_support(*s.base); }
    double operator()(const DelayComb& d) const { return gaussian_support(*d.base); }
  };
  return std::visit(V{}, p.v);
}

struct FourierCoeffs {
  std::vector<CosTerm> coeffs;   // b_n with beta_n = 2 pi n / L
  double period_l = 0.0;
  double rms_error = 0.0;        // relative RMS reconstruction error on the window
  bool meets_tolerance = true;   // rms_error <= 1e-2
  std::size_t recommended_n = 0; // smallest n_max expected to meet it
};

// Cosine-series coefficients of sinc(tau_p omega) on [-L/2, L/2]:
//   f(omega) ~ sum_{n=0}^{n_max} b_n cos(2 pi n omega / L).
// The coefficients are nearly equal for beta_n below tau_p (the Fourier
// transform of sinc is a rectangle), which is the mechanism behind the large
// eigenvalue degeneracy of rectangular-pulse pumping. Note b_0 carries the
// usual 1/L (not 2/L) normalization, so the flat band is {2 b_0, b_1, ...}.
inline FourierCoeffs rect_fourier_coeffs(double tau_p, double period_l, std::size_t n_max) {
  if (!(tau_p >= 0.0)) throw std::invalid_argument("rect_fourier_coeffs: tau_p must be >= 0");
  if (!(period_l > 0.0)) throw std::invalid_argument("rect_fourier_coeffs: period_l must be > 0");
  if (n_max < 1) throw std::invalid_argument("rect_fourier_coeffs: n_max must be >= 1");

  FourierCoeffs out;
  out.period_l = period_l;
  out.recommended_n =
      static_cast<std::size_t>(std::ceil(period_l * tau_p / (2.0 * std::numbers::pi))) + 2;

  // composite Simpson on a grid fine enough for the fastest cosine
  const std::size_t panels = std::max<std::size_t>(2048, 64 * n_max);
  const std::size_t npts = 2 * panels + 1;
  const double h = period_l / static_cast<double>(npts - 1);
  std::vector<double> om(npts), f(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    om[i] = -period_l / 2.0 + h * static_cast<double>(i);
    f[i] = numerics::sinc(tau_p * om[i]);
  }
  auto simpson = [&](const std::vector<double>& g) {
    double s = g.front() + g.back();
    for (std::size_t i = 1; i + 1 < npts; ++i) s += (i % 2 ? 4.0 : 2.0) * g[i];
    return s * h / 3.0;
  };

  out.coeffs.resize(n_max + 1);
  std::vector<double> tmp(npts);
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double beta = 2.0 * std::numbers::pi * static_cast<double>(n) / period_l;
    for (std::size_t i = 0; i < npts; ++i) tmp[i] = f[i] * std::cos(beta * om[i]);
    const double integral = simpson(tmp);
    out.coeffs[n] = CosTerm{(n == 0 ? 1.0 : 2.0) * integral / period_l, beta};
  }

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < npts; ++i) {
    double rec = 0.0;
    for (const CosTerm& c : out.coeffs) rec += c.b * std::cos(c.beta * om[i]);
    num += (rec - f[i]) * (rec - f[i]);
    den += f[i] * f[i];
  }
  out.rms_error = std::sqrt(num / den);
  out.meets_tolerance = out.rms_error <= 1e-2;
  return out;
}

} // namespace opokit::pumps
