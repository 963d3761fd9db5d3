// Config-driven experiment runner behind the CLI. A run is described by one
// strict-schema JSON file (unknown keys are rejected); identical configs
// produce byte-identical output trees.
//
// Exit-code contract of the CLI built on top: 0 success, 2 config error,
// 3 numerical error.
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cluster.hpp"
#include "io.hpp"
#include "kernellab.hpp"
#include "opodyn.hpp"
#include "pumps.hpp"
#include "supermodes.hpp"
#include "transverse.hpp"

namespace opokit::cli {

using json = nlohmann::json;

class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw config_error("config error at " + (path.empty() ? std::string("<root>") : path) + ": " +
                     what);
}

inline void require_keys(const json& j, const std::string& path,
                         const std::set<std::string>& allowed,
                         const std::set<std::string>& required = {}) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) fail(path + "/" + key, "unknown key (strict schema)");
  for (const auto& key : required)
    if (!j.contains(key)) fail(path, "missing required key '" + key + "'");
}

inline double get_number(const json& j, const std::string& path, const std::string& key,
                         double fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) fail(path, "missing required key '" + key + "'");
    return fallback;
  }
  if (!j.at(key).is_number()) fail(path + "/" + key, "expected a number");
  return j.at(key).get<double>();
}

inline long get_int(const json& j, const std::string& path, const std::string& key, long fallback,
                    bool required = false) {
  if (!j.contains(key)) {
    if (required) fail(path, "missing required key '" + key + "'");
    return fallback;
  }
  if (!j.at(key).is_number_integer()) fail(path + "/" + key, "expected an integer");
  return j.at(key).get<long>();
}

inline std::vector<pumps::CosTerm> get_terms(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of [b, beta] pairs");
  std::vector<pumps::CosTerm> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& t = j[i];
    if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number())
      fail(path + "/" + std::to_string(i), "expected [b, beta]");
    terms.push_back({t[0].get<double>(), t[1].get<double>()});
  }
  return terms;
}

inline pumps::PumpSpectrum parse_pump(const json& j, const std::string& path) {
  require_keys(j, path, {"type", "tau_p_fs", "base", "coeffs", "b0", "terms"}, {"type"});
  const std::string type = j.at("type").is_string() ? j.at("type").get<std::string>() : "";
  if (type == "gaussian" || type == "rectangular") {
    const double tau = get_number(j, path, "tau_p_fs", 0.0, true);
    if (tau < 0.0) fail(path + "/tau_p_fs", "must be >= 0");
    return type == "gaussian" ? pumps::PumpSpectrum::gaussian(tau)
                              : pumps::PumpSpectrum::rectangular(tau);
  }
  if (type == "shaped") {
    if (!j.contains("base")) fail(path, "shaped pump needs a 'base'");
    auto base = parse_pump(j.at("base"), path + "/base");
    auto coeffs = get_terms(j.value("coeffs", json::array()), path + "/coeffs");
    auto p = pumps::PumpSpectrum::shaped(std::move(base), std::move(coeffs));
    pumps::validate(p);
    return p;
  }
  if (type == "delay-comb") {
    if (!j.contains("base")) fail(path, "delay-comb pump needs a 'base'");
    auto base = parse_pump(j.at("base"), path + "/base");
    const double b0 = get_number(j, path, "b0", 0.0);
    std::vector<pumps::DelayTerm> terms;
    const json jt = j.value("terms", json::array());
    for (std::size_t i = 0; i < jt.size(); ++i) {
      if (!jt[i].is_array() || jt[i].size() != 2)
        fail(path + "/terms/" + std::to_string(i), "expected [b, t_fs]");
      terms.push_back({jt[i][0].get<double>(), jt[i][1].get<double>()});
    }
    auto p = pumps::PumpSpectrum::delay_comb(std::move(base), b0, std::move(terms));
    pumps::validate(p);
    return p;
  }
  fail(path + "/type", "expected gaussian | rectangular | shaped | delay-comb");
}

struct ExportOptions {
  std::size_t kernel_stride = 1;
  std::size_t supermodes = 8;
};

inline ExportOptions parse_export(const json& j, const std::string& path, ExportOptions def) {
  if (!j.is_object()) fail(path, "expected an object");
  require_keys(j, path, {"kernel_stride", "supermodes"});
  ExportOptions e = def;
  const long ks = get_int(j, path, "kernel_stride", static_cast<long>(def.kernel_stride));
  const long sm = get_int(j, path, "supermodes", static_cast<long>(def.supermodes));
  if (ks < 0 || sm < 0) fail(path, "export counts must be >= 0");
  e.kernel_stride = static_cast<std::size_t>(ks);
  e.supermodes = static_cast<std::size_t>(sm);
  return e;
}

// Optional per-run squeezing analysis: noise spectra of every kept supermode
// at the configured pump fraction, written to squeezing.json.
inline void maybe_write_squeezing(const json& cfg, const std::filesystem::path& out,
                                  const std::vector<double>& eigenvalues,
                                  const numerics::Axis& axis) {
  if (!cfg.contains("squeezing")) return;
  const json& js = cfg.at("squeezing");
  require_keys(js, "squeezing", {"pump_fraction", "omega_max", "omega_count"},
               {"pump_fraction"});
  const double pf = get_number(js, "squeezing", "pump_fraction", 0.0, true);
  if (!(pf >= 0.0) || pf >= 1.0) fail("squeezing/pump_fraction", "must be in [0, 1)");
  const double omega_max = get_number(js, "squeezing", "omega_max", 5.0);
  const long omega_count = get_int(js, "squeezing", "omega_count", 0);
  if (omega_count < 0 || !(omega_max > 0.0)) fail("squeezing", "bad omega grid");
  std::vector<double> grid;
  for (long i = 0; i < omega_count; ++i)
    grid.push_back(omega_max * static_cast<double>(i) / std::max(1.0, double(omega_count - 1)));
  supermodes::SupermodeSet shell;
  shell.axis = axis;
  shell.eigenvalues = eigenvalues;
  io::write_json(out / "squeezing.json", io::squeezing_json(opodyn::squeezing_report(shell, pf, grid)));
}

inline json spectrum_report(const std::string& kind, const kernellab::KernelMatrix& k,
                            const std::vector<double>& eigenvalues, double floor,
                            double degeneracy_tol) {
  supermodes::SupermodeSet shell;
  shell.axis = k.axis;
  shell.eigenvalues = eigenvalues;
  json rep{{"kind", kind},
           {"provenance", k.provenance},
           {"grid",
            {{"n", k.axis.size()},
             {"x_max", k.axis.points.back()},
             {"label", k.axis.label}}},
           {"truncation_floor", floor},
           {"eigenvalues", eigenvalues}};
  if (!eigenvalues.empty()) {
    rep["threshold_pump"] = 1.0 / std::abs(eigenvalues.front());
    const auto groups = supermodes::group_degeneracies(shell, degeneracy_tol);
    json jg = json::array();
    for (const auto& [value, count] : groups) jg.push_back({value, count});
    rep["degeneracy"] = {{"tolerance", degeneracy_tol},
                         {"groups", jg},
                         {"leading_group_count", groups.front().second}};
    if (eigenvalues.size() >= 100) {
      const double a0 = std::abs(eigenvalues[0]);
      rep["degeneracy"]["abs_spread_top_100"] = (a0 - std::abs(eigenvalues[99])) / a0;
    }
  }
  return rep;
}

} // namespace detail

struct Overrides {
  std::optional<std::size_t> grid_n;
  bool verbose = false;
};

// -- kernel experiments (modulated-kernel | spopo) ---------------------------

inline void run_kernel_config(const json& cfg, const std::filesystem::path& out,
                              const Overrides& ov = {}) {
  const std::string kind = cfg.at("kind").get<std::string>();
  if (kind == "modulated-kernel") {
    detail::require_keys(cfg, "", {"kind", "kernel", "grid", "floor", "degeneracy_tol",
                                   "compare_analytic", "export", "squeezing"},
                         {"kernel"});
    const json& jk = cfg.at("kernel");
    detail::require_keys(jk, "kernel", {"sigma_plus", "sigma_minus", "plus_terms", "minus_terms"},
                         {"sigma_plus", "sigma_minus", "plus_terms", "minus_terms"});
    kernellab::ModulatedKernelSpec spec;
    spec.sigma_plus = detail::get_number(jk, "kernel", "sigma_plus", 0.0, true);
    spec.sigma_minus = detail::get_number(jk, "kernel", "sigma_minus", 0.0, true);
    spec.plus_terms = detail::get_terms(jk.at("plus_terms"), "kernel/plus_terms");
    spec.minus_terms = detail::get_terms(jk.at("minus_terms"), "kernel/minus_terms");
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      detail::fail("kernel", e.what());
    }

    const double sig_min = std::min(spec.sigma_plus, spec.sigma_minus);
    std::size_t n = 1024;
    double x_max = 6.0 / sig_min;
    if (cfg.contains("grid")) {
      detail::require_keys(cfg.at("grid"), "grid", {"n", "x_max"});
      n = static_cast<std::size_t>(detail::get_int(cfg.at("grid"), "grid", "n", 1024));
      x_max = detail::get_number(cfg.at("grid"), "grid", "x_max", x_max);
    }
    if (ov.grid_n) n = *ov.grid_n;
    const double floor = detail::get_number(cfg, "", "floor", 1e-9);
    const double dtol = detail::get_number(cfg, "", "degeneracy_tol", 1e-3);
    const bool compare = cfg.value("compare_analytic", true);
    detail::ExportOptions ex =
        cfg.contains("export") ? detail::parse_export(cfg.at("export"), "export", {1, 8})
                               : detail::ExportOptions{1, 8};

    auto axis = numerics::make_uniform_axis(x_max, n, "x");
    auto kernel = kernellab::build_modulated(spec, axis);
    auto sm = supermodes::solve_fredholm(kernel, floor);

    json rep = detail::spectrum_report(kind, kernel, sm.eigenvalues, floor, dtol);
    if (compare) {
      auto pred = supermodes::predict_modulated_spectrum(spec, floor);
      rep["analytic"] = io::analytic_json(pred);
      if (sm.count() > 0) {
        auto cmpr = supermodes::compare_spectra(sm, pred);
        rep["analytic"]["comparison"] = {{"max_rel_deviation", cmpr.max_rel_deviation},
                                         {"matched", cmpr.matched},
                                         {"unmatched_numeric", cmpr.unmatched_numeric},
                                         {"unmatched_analytic", cmpr.unmatched_analytic}};
      }
    }
    io::write_json(out / "spectrum.json", rep);
    io::write_kernel_csv(out / "kernel.csv", kernel, ex.kernel_stride);
    io::write_supermodes_csv(out / "supermodes.csv", sm, ex.supermodes);
    detail::maybe_write_squeezing(cfg, out, sm.eigenvalues, kernel.axis);
    return;
  }

  if (kind == "spopo") {
    detail::require_keys(cfg, "",
                         {"kind", "tau1_fs", "pump", "grid", "floor", "degeneracy_tol", "export",
                          "squeezing"},
                         {"pump"});
    const double tau1 = detail::get_number(cfg, "", "tau1_fs", 20.0);
    if (!(tau1 > 0.0)) detail::fail("tau1_fs", "must be > 0");
    auto pump = detail::parse_pump(cfg.at("pump"), "pump");
    std::size_t n = 4096;
    double x_max = 0.0; // 0 = auto
    if (cfg.contains("grid")) {
      detail::require_keys(cfg.at("grid"), "grid", {"n", "x_max"});
      n = static_cast<std::size_t>(detail::get_int(cfg.at("grid"), "grid", "n", 4096));
      x_max = detail::get_number(cfg.at("grid"), "grid", "x_max", 0.0);
    }
    if (ov.grid_n) n = *ov.grid_n;
    const double floor = detail::get_number(cfg, "", "floor", 1e-9);
    const double dtol = detail::get_number(cfg, "", "degeneracy_tol", 1e-2);
    detail::ExportOptions ex =
        cfg.contains("export") ? detail::parse_export(cfg.at("export"), "export", {0, 0})
                               : detail::ExportOptions{0, 0};

    auto kernel = kernellab::realistic_spopo_kernel(tau1, pump, n, x_max);
    std::vector<double> eigenvalues;
    if (ex.supermodes > 0) {
      auto sm = supermodes::solve_fredholm(kernel, floor);
      eigenvalues = sm.eigenvalues;
      io::write_supermodes_csv(out / "supermodes.csv", sm, ex.supermodes);
    } else {
      eigenvalues = supermodes::solve_fredholm_values(kernel, floor);
    }
    json rep = detail::spectrum_report(kind, kernel, eigenvalues, floor, dtol);
    rep["tau1_fs"] = tau1;
    rep["pump"] = io::pump_json(pump); // time parameters in the configured unit (fs)
    io::write_json(out / "spectrum.json", rep);
    io::write_kernel_csv(out / "kernel.csv", kernel, ex.kernel_stride);
    detail::maybe_write_squeezing(cfg, out, eigenvalues, kernel.axis);
    return;
  }

  detail::fail("kind", "subcommand 'kernel' handles kinds modulated-kernel | spopo");
}

// -- transverse sweep ---------------------------------------------------------

inline void run_transverse_config(const json& cfg, const std::filesystem::path& out,
                                  const Overrides& = {}) {
  const std::string kind = cfg.at("kind").get<std::string>();
  if (kind != "transverse-sweep")
    detail::fail("kind", "subcommand 'transverse' handles kind transverse-sweep");
  detail::require_keys(
      cfg, "", {"kind", "family", "rho_start", "rho_stop", "rho_count", "mixing_pair"},
      {"family"});
  transverse::LGFamily fam{static_cast<int>(detail::get_int(cfg, "", "family", 0, true))};
  try {
    fam.validate();
  } catch (const std::invalid_argument& e) {
    detail::fail("family", e.what());
  }
  const double rho_start = detail::get_number(cfg, "", "rho_start", 1.0 / std::numbers::sqrt2);
  const double rho_stop = detail::get_number(cfg, "", "rho_stop", 4.0);
  const long rho_count = detail::get_int(cfg, "", "rho_count", 60);
  if (!(rho_start > 0.0) || !(rho_stop > rho_start) || rho_count < 2)
    detail::fail("rho_*", "need 0 < rho_start < rho_stop and rho_count >= 2");

  const auto ls = fam.l_values();
  {
    auto sweep = io::open_out(out / "chi_sweep.csv");
    sweep << "rho";
    for (int l : ls) sweep << ",chi_" << l;
    for (int l : ls) sweep << ",r_" << l;
    sweep << "\n";
    auto rth = io::open_out(out / "rth.csv");
    rth << "rho,R_th\n";
    for (long i = 0; i < rho_count; ++i) {
      const double rho =
          rho_start + (rho_stop - rho_start) * static_cast<double>(i) /
                          static_cast<double>(rho_count - 1);
      transverse::MultiGaussPump pump{{{1.0, rho}}};
      sweep << io::fmt(rho);
      std::vector<double> chis;
      for (int l : ls) chis.push_back(transverse::chi_overlap(fam, l, pump));
      for (double c : chis) sweep << "," << io::fmt(c);
      for (double c : chis) sweep << "," << io::fmt(c / chis.front());
      sweep << "\n";
      rth << io::fmt(rho) << "," << io::fmt(transverse::threshold_ratio(fam, rho)) << "\n";
    }
  }

  if (cfg.contains("mixing_pair")) {
    const json& mp = cfg.at("mixing_pair");
    detail::require_keys(mp, "mixing_pair", {"rho_a", "rho_b"}, {"rho_a", "rho_b"});
    const double a = detail::get_number(mp, "mixing_pair", "rho_a", 0.0, true);
    const double b = detail::get_number(mp, "mixing_pair", "rho_b", 0.0, true);
    transverse::LGFamily f3{3};
    const double th_o = transverse::mixing_angle_opposite(a, b);
    const double th_n = transverse::mixing_angle_null(a, b);
    auto po = transverse::mixing_pump(a, b, th_o);
    auto pn = transverse::mixing_pump(a, b, th_n);
    const double o1 = transverse::chi_overlap(f3, 1, po), o3 = transverse::chi_overlap(f3, 3, po);
    const double n1 = transverse::chi_overlap(f3, 1, pn), n3 = transverse::chi_overlap(f3, 3, pn);
    io::write_json(out / "mixing.json",
                   json{{"rho_a", a},
                        {"rho_b", b},
                        {"theta_opposite", th_o},
                        {"theta_null", th_n},
                        {"opposite", {{"chi_1", o1}, {"chi_3", o3},
                                      {"residual", std::abs(o1 + o3) / std::abs(o3)}}},
                        {"null", {{"chi_1", n1}, {"chi_3", n3},
                                  {"residual", std::abs(n1) / std::abs(n3)}}}});
  }
}

// -- cluster synthesis and GHZ diagnostics ------------------------------------

inline void run_cluster_config(const json& cfg, const std::filesystem::path& out,
                               const Overrides& = {}) {
  const std::string kind = cfg.at("kind").get<std::string>();

  if (kind == "cluster-synthesis") {
    detail::require_keys(cfg, "", {"kind", "target", "sigma", "vertex_order"}, {"target"});
    const json& jt = cfg.at("target");
    detail::require_keys(jt, "target", {"type", "n", "weight", "entries"}, {"type"});
    const std::string type = jt.at("type").get<std::string>();
    cluster::CouplingMatrix k;
    if (type == "ring4") {
      k = cluster::ring4_matrix();
    } else if (type == "complete") {
      const long n = detail::get_int(jt, "target", "n", 0, true);
      const double w = detail::get_number(jt, "target", "weight", 0.0, true);
      if (n < 2) detail::fail("target/n", "must be >= 2");
      k = cluster::complete_matrix(static_cast<std::size_t>(n), w);
    } else if (type == "matrix") {
      if (!jt.contains("entries") || !jt.at("entries").is_array())
        detail::fail("target/entries", "expected a square array of rows");
      const json& rows = jt.at("entries");
      const std::size_t n = rows.size();
      if (n < 2) detail::fail("target/entries", "need at least 2 rows");
      k = cluster::CouplingMatrix(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (!rows[i].is_array() || rows[i].size() != n)
          detail::fail("target/entries", "rows must all have length n");
        for (std::size_t j = i; j < n; ++j) {
          const double a = rows[i][j].get<double>();
          const double b = rows[j][i].get<double>();
          if (a != b) detail::fail("target/entries", "matrix must be symmetric");
          k.set(i, j, a);
        }
      }
    } else {
      detail::fail("target/type", "expected ring4 | complete | matrix");
    }
    const double sigma = detail::get_number(cfg, "", "sigma", 0.005);
    if (!(sigma > 0.0)) detail::fail("sigma", "must be > 0");

    io::write_coupling_csv(out / "coupling.csv", k);
    auto dec = cluster::decompose_coupling(k);
    json basis = json::array();
    for (std::size_t col = 0; col < dec.n; ++col) {
      json v = json::array();
      for (std::size_t i = 0; i < dec.n; ++i) v.push_back(dec.basis[col * dec.n + i]);
      basis.push_back(v);
    }
    json rep{{"kind", kind}, {"spectrum", dec.spectrum}, {"basis_columns", basis}};
    if (cfg.contains("vertex_order")) {
      // the supermode -> graph-vertex assignment is a free choice; echo it
      rep["vertex_order"] = cfg.at("vertex_order");
    }
    io::write_json(out / "spectrum.json", rep);

    auto match = cluster::match_spectrum_to_kernel(dec.spectrum, sigma);
    json jm{{"target", dec.spectrum},
            {"feasible", match.feasible},
            {"family", match.family},
            {"sigma", sigma}};
    if (match.feasible) {
      jm["scale"] = match.scale;
      jm["spec"] = io::modulated_spec_json(match.spec);
      jm["validity_ok"] = match.spec.validity_ok();
      auto pred = supermodes::predict_modulated_spectrum(match.spec);
      std::vector<double> flat;
      for (const auto& e : pred.entries)
        for (int c = 0; c < e.multiplicity; ++c) flat.push_back(e.value);
      jm["predicted"] = flat;
      // round-trip deviation against scale * target
      std::vector<double> want = dec.spectrum;
      for (double& w : want) w *= match.scale;
      std::sort(want.begin(), want.end());
      std::sort(flat.begin(), flat.end());
      double dev = 0.0;
      if (want.size() == flat.size())
        for (std::size_t i = 0; i < want.size(); ++i)
          dev = std::max(dev, std::abs(want[i] - flat[i]) /
                                  std::max(std::abs(want[i]), 1e-300));
      else
        dev = std::numeric_limits<double>::infinity();
      jm["max_round_trip_deviation"] = dev;
    } else {
      jm["message"] = match.message;
      jm["closest"] = match.closest;
    }
    io::write_json(out / "pump_spec.json", jm);
    return;
  }

  if (kind == "ghz") {
    detail::require_keys(
        cfg, "", {"kind", "n", "r", "squeezing_db", "profile_families", "profile_grid"}, {"n"});
    const long n = detail::get_int(cfg, "", "n", 0, true);
    if (n < 2) detail::fail("n", "must be >= 2");
    if (cfg.contains("r") == cfg.contains("squeezing_db"))
      detail::fail("", "specify exactly one of 'r' and 'squeezing_db'");
    double r = 0.0;
    if (cfg.contains("r")) {
      r = detail::get_number(cfg, "", "r", 0.0, true);
      if (r < 0.0) detail::fail("r", "must be >= 0");
    } else {
      const double db = detail::get_number(cfg, "", "squeezing_db", 0.0, true);
      if (db < 0.0) detail::fail("squeezing_db", "must be >= 0");
      r = db * std::numbers::ln10 / 20.0; // e^{-2r} = 10^{-db/10}
    }

    auto v = cluster::ghz_covariance(static_cast<std::size_t>(n), r);
    io::write_covariance_csv(out / "covariance.csv", v);
    auto jv = cluster::joint_variances(v);
    double worst_ppt = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < v.n_modes; ++a)
      for (std::size_t b = a + 1; b < v.n_modes; ++b)
        worst_ppt = std::min(worst_ppt, cluster::ppt_min_eig(cluster::reduce_pair(v, a, b)));
    io::write_json(out / "ghz_report.json",
                   json{{"kind", kind},
                        {"n", n},
                        {"r", r},
                        {"squeezing_db", opodyn::squeezing_db(std::exp(-2.0 * r))},
                        {"var_sum_x", jv.var_sum_x},
                        {"max_var_p_diff", jv.max_var_p_diff},
                        {"vacuum_var_sum_x", static_cast<double>(n)},
                        {"vacuum_var_p_diff", 2.0},
                        {"uncertainty_min_eig", cluster::uncertainty_min_eig(v)},
                        {"det", cluster::covariance_det(v)},
                        {"reduced_pair_ppt_min_eig", worst_ppt}});

    if (cfg.contains("profile_families")) {
      transverse::TransverseGrid grid;
      if (cfg.contains("profile_grid")) {
        const json& g = cfg.at("profile_grid");
        detail::require_keys(g, "profile_grid", {"extent", "n"});
        grid.extent = detail::get_number(g, "profile_grid", "extent", 4.0);
        grid.n = static_cast<std::size_t>(detail::get_int(g, "profile_grid", "n", 96));
      }
      try {
        grid.validate();
      } catch (const std::invalid_argument& e) {
        detail::fail("profile_grid", e.what());
      }
      for (const auto& jf : cfg.at("profile_families")) {
        if (!jf.is_number_integer() || jf.get<long>() < 1)
          detail::fail("profile_families", "family indices must be integers >= 1");
        const int f = static_cast<int>(jf.get<long>());
        transverse::LGFamily fam{f};
        auto maps = cluster::entangled_mode_profiles(
            fam, cluster::braunstein_rotation(static_cast<std::size_t>(f + 1)), grid);
        for (std::size_t mgi = 0; mgi < maps.size(); ++mgi) {
          std::ostringstream name;
          name << "f" << f << "_mode" << mgi << ".csv";
          io::write_field_csv(out / "profiles" / name.str(), maps[mgi]);
        }
      }
    }
    return;
  }

  detail::fail("kind", "subcommand 'cluster' handles kinds cluster-synthesis | ghz");
}

// -- dispatch ------------------------------------------------------------------

inline json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("JSON parse error in ") + path.string() + ": " + e.what());
  }
}

inline std::string config_kind(const json& cfg) {
  if (!cfg.is_object() || !cfg.contains("kind") || !cfg.at("kind").is_string())
    detail::fail("kind", "missing or non-string");
  return cfg.at("kind").get<std::string>();
}

inline void run_config(const json& cfg, const std::filesystem::path& out,
                       const Overrides& ov = {}) {
  const std::string kind = config_kind(cfg);
  if (kind == "modulated-kernel" || kind == "spopo") return run_kernel_config(cfg, out, ov);
  if (kind == "transverse-sweep") return run_transverse_config(cfg, out, ov);
  if (kind == "cluster-synthesis" || kind == "ghz") return run_cluster_config(cfg, out, ov);
  detail::fail("kind", "unknown experiment kind '" + kind + "'");
}

// -- the shipped figure suite ---------------------------------------------------

struct FigureConfig {
  const char* name;
  const char* text;
};

// These mirror the files under configs/ (a unit test keeps them in sync);
// `figures` runs them into one output tree per figure.
inline const std::vector<FigureConfig>& figure_configs() {
  static const std::vector<FigureConfig> figs = {
      {"fig1a", R"({
  "kind": "modulated-kernel",
  "kernel": {
    "sigma_plus": 0.005,
    "sigma_minus": 0.005,
    "plus_terms": [[0.0, 0.0], [1.0, 0.047123889803846899], [1.0, 0.094247779607693797]],
    "minus_terms": [[1.0, 0.0]]
  },
  "grid": {"n": 1024, "x_max": 1200.0},
  "degeneracy_tol": 0.001,
  "export": {"kernel_stride": 4, "supermodes": 4}
})"},
      {"fig1c", R"({
  "kind": "modulated-kernel",
  "kernel": {
    "sigma_plus": 0.005,
    "sigma_minus": 0.005,
    "plus_terms": [[1.0, 0.0]],
    "minus_terms": [[-2.0, 0.0], [1.0, 0.047123889803846899], [1.0, 0.094247779607693797]]
  },
  "grid": {"n": 1024, "x_max": 1200.0},
  "degeneracy_tol": 0.001,
  "export": {"kernel_stride": 4, "supermodes": 5}
})"},
      {"fig2-1ps", R"({
  "kind": "spopo",
  "tau1_fs": 20.0,
  "pump": {"type": "rectangular", "tau_p_fs": 1000.0},
  "grid": {"n": 4096},
  "degeneracy_tol": 0.01,
  "export": {"kernel_stride": 0, "supermodes": 0}
})"},
      {"fig3", R"({
  "kind": "transverse-sweep",
  "family": 3,
  "rho_start": 0.70710678118654752,
  "rho_stop": 4.0,
  "rho_count": 60,
  "mixing_pair": {"rho_a": 1.0, "rho_b": 2.0}
})"},
      {"fig4", R"({
  "kind": "ghz",
  "n": 4,
  "squeezing_db": 12.0,
  "profile_families": [1, 2, 3],
  "profile_grid": {"extent": 4.0, "n": 96}
})"}};
  return figs;
}

inline void run_figures(const std::filesystem::path& out, const Overrides& ov = {}) {
  for (const auto& fig : figure_configs()) {
    const json cfg = json::parse(fig.text);
    run_config(cfg, out / fig.name, ov);
  }
}

} // namespace opokit::cli
