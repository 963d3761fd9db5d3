// Deterministic CSV and JSON export: fixed float formatting, sorted JSON
// keys, LF line endings. Identical inputs produce byte-identical files.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cluster.hpp"
#include "kernellab.hpp"
#include "opodyn.hpp"
#include "supermodes.hpp"
#include "transverse.hpp"

namespace opokit::io {

using json = nlohmann::json;

inline std::string fmt(double v) {
  if (v == 0.0) v = 0.0; // normalize -0
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

// Matrix CSV with the axis as both header row and leading column.
inline void write_kernel_csv(const std::filesystem::path& path, const kernellab::KernelMatrix& k,
                             std::size_t stride = 1) {
  if (stride == 0) return;
  auto out = open_out(path);
  const auto& x = k.axis.points;
  out << "x";
  for (std::size_t j = 0; j < x.size(); j += stride) out << "," << fmt(x[j]);
  out << "\n";
  for (std::size_t i = 0; i < x.size(); i += stride) {
    out << fmt(x[i]);
    for (std::size_t j = 0; j < x.size(); j += stride) out << "," << fmt(k.values(i, j));
    out << "\n";
  }
}

inline void write_supermodes_csv(const std::filesystem::path& path,
                                 const supermodes::SupermodeSet& s, std::size_t max_modes) {
  const std::size_t m = std::min(max_modes, s.count());
  if (m == 0) return;
  auto out = open_out(path);
  out << "x,weight";
  for (std::size_t k = 0; k < m; ++k) out << ",s" << (k + 1);
  out << "\n";
  for (std::size_t i = 0; i < s.axis.size(); ++i) {
    out << fmt(s.axis.points[i]) << "," << fmt(s.axis.weights[i]);
    for (std::size_t k = 0; k < m; ++k) out << "," << fmt(s.eigenfunctions[k][i]);
    out << "\n";
  }
}

inline void write_field_csv(const std::filesystem::path& path, const transverse::Field2D& f) {
  auto out = open_out(path);
  out << "x";
  for (std::size_t j = 0; j < f.grid.n; ++j) out << "," << fmt(f.grid.point(j));
  out << "\n";
  for (std::size_t i = 0; i < f.grid.n; ++i) {
    out << fmt(f.grid.point(i));
    for (std::size_t j = 0; j < f.grid.n; ++j) out << "," << fmt(f.at(i, j));
    out << "\n";
  }
}

inline json modulated_spec_json(const kernellab::ModulatedKernelSpec& spec) {
  json terms_p = json::array(), terms_m = json::array();
  for (const auto& t : spec.plus_terms) terms_p.push_back({t.b, t.beta});
  for (const auto& t : spec.minus_terms) terms_m.push_back({t.b, t.beta});
  return json{{"sigma_plus", spec.sigma_plus},
              {"sigma_minus", spec.sigma_minus},
              {"plus_terms", terms_p},
              {"minus_terms", terms_m}};
}

inline json pump_json(const pumps::PumpSpectrum& p) {
  struct V {
    json operator()(const pumps::Gaussian& g) const {
      return json{{"type", "gaussian"}, {"tau_p", g.tau_p}};
    }
    json operator()(const pumps::Rectangular& r) const {
      return json{{"type", "rectangular"}, {"tau_p", r.tau_p}};
    }
    json operator()(const pumps::Shaped& s) const {
      json coeffs = json::array();
      for (const auto& c : s.coeffs) coeffs.push_back({c.b, c.beta});
      return json{{"type", "shaped"}, {"base", pump_json(*s.base)}, {"coeffs", coeffs}};
    }
    json operator()(const pumps::DelayComb& d) const {
      json terms = json::array();
      for (const auto& t : d.terms) terms.push_back({t.b, t.t});
      return json{
          {"type", "delay-comb"}, {"base", pump_json(*d.base)}, {"b0", d.b0}, {"terms", terms}};
    }
  };
  return std::visit(V{}, p.v);
}

inline json supermodes_json(const supermodes::SupermodeSet& s, std::size_t max_modes) {
  const std::size_t m = std::min(max_modes, s.count());
  json modes = json::array();
  for (std::size_t k = 0; k < m; ++k)
    modes.push_back({{"eigenvalue", s.eigenvalues[k]}, {"samples", s.eigenfunctions[k]}});
  return json{{"axis", {{"points", s.axis.points}, {"label", s.axis.label}}},
              {"eigenvalues", s.eigenvalues},
              {"truncation_floor", s.truncation_floor},
              {"modes", modes}};
}

inline json squeezing_json(const opodyn::SqueezingReport& rep) {
  json modes = json::array();
  for (std::size_t k = 0; k < rep.modes.size(); ++k) {
    const auto& m = rep.modes[k];
    json e{{"index", k + 1},
           {"lambda", m.lambda},
           {"r", m.r},
           {"v_minus_0", m.v_minus_0},
           {"v_plus_0", m.v_plus_0},
           {"direction", m.direction}};
    if (!m.v_minus.empty()) {
      e["v_minus"] = m.v_minus;
      e["v_plus"] = m.v_plus;
    }
    modes.push_back(e);
  }
  return json{{"pump_fraction", rep.pump_fraction},
              {"omega_grid", rep.omega_grid},
              {"modes", modes}};
}

// Square-matrix CSV with bare 1-based index headers.
inline void write_matrix_csv(const std::filesystem::path& path, std::size_t n,
                             const std::function<double(std::size_t, std::size_t)>& entry,
                             const char* index_label = "i") {
  auto out = open_out(path);
  out << index_label;
  for (std::size_t j = 0; j < n; ++j) out << "," << (j + 1);
  out << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << (i + 1);
    for (std::size_t j = 0; j < n; ++j) out << "," << fmt(entry(i, j));
    out << "\n";
  }
}

inline void write_coupling_csv(const std::filesystem::path& path,
                               const cluster::CouplingMatrix& k) {
  write_matrix_csv(path, k.size(), [&](std::size_t i, std::size_t j) { return k(i, j); });
}

inline void write_covariance_csv(const std::filesystem::path& path,
                                 const cluster::CovarianceMatrix& v) {
  write_matrix_csv(path, 2 * v.n_modes,
                   [&](std::size_t i, std::size_t j) { return v.at(i, j); });
}

inline json analytic_json(const supermodes::AnalyticSpectrum& a) {
  json entries = json::array();
  for (const auto& e : a.entries)
    entries.push_back({{"value", e.value},
                       {"multiplicity", e.multiplicity},
                       {"label",
                        {e.label.n_plus, e.label.n_minus, e.label.hermite_m,
                         supermodes::to_string(e.label.branch)}}});
  return json{{"validity_ok", a.validity_ok},
              {"validity_margin", a.validity_margin},
              {"entries", entries}};
}

} // namespace opokit::io
