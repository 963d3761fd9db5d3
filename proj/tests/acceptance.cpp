// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Criterion 10 exercises the CLI binary end to end; pass its
// path as argv[1] (ctest does) or the suite falls back to in-process runs.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <opokit/cluster.hpp>
#include <opokit/config.hpp>
#include <opokit/kernellab.hpp>
#include <opokit/numerics.hpp>
#include <opokit/opodyn.hpp>
#include <opokit/supermodes.hpp>
#include <opokit/transverse.hpp>

namespace fs = std::filesystem;
using namespace opokit;

namespace {

int g_failures = 0;

struct Criterion {
  int id;
  std::string title;
  double budget_s; // 0 = no budget
};

void run_criterion(const Criterion& c, const std::function<void(std::ostringstream&)>& body) {
  std::ostringstream detail;
  bool ok = true;
  std::string err;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(detail);
  } catch (const std::exception& e) {
    ok = false;
    err = e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (ok && c.budget_s > 0.0 && secs > c.budget_s) {
    ok = false;
    err = "runtime budget exceeded";
  }
  if (!ok) ++g_failures;
  std::printf("%s criterion %d: %s [%.2f s%s]%s%s\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(),
              secs, c.budget_s > 0.0 ? ("/" + std::to_string((int)c.budget_s) + " s").c_str() : "",
              detail.str().empty() ? "" : (" " + detail.str()).c_str(),
              err.empty() ? "" : (" -- " + err).c_str());
}

void check(bool cond, const std::string& what) {
  if (!cond) throw std::runtime_error(what);
}

kernellab::KernelMatrix modulated_default(const kernellab::ModulatedKernelSpec& spec,
                                          std::size_t n = 1024) {
  const double x_max = 6.0 / std::min(spec.sigma_plus, spec.sigma_minus);
  return kernellab::build_modulated(spec, numerics::make_uniform_axis(x_max, n));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("missing file: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

int main(int argc, char** argv) {
  const std::string cli_binary = argc > 1 ? argv[1] : "";
  constexpr double kPi = std::numbers::pi;

  // 1. Gaussian kernel analytic check
  run_criterion({1, "Gaussian kernel analytic check (sigma = 0.5)", 5.0}, [&](auto& out) {
    kernellab::ModulatedKernelSpec g;
    g.sigma_plus = g.sigma_minus = 0.5;
    auto vals = supermodes::solve_fredholm_values(modulated_default(g), 0.0);
    const double expect = std::sqrt(kPi / 2.0) / 0.5;
    const double rel = std::abs(vals[0] - expect) / expect;
    check(rel <= 1e-3, "Lambda_1 off by " + std::to_string(rel));
    check(std::abs(vals[1]) <= 1e-6 * std::abs(vals[0]), "Lambda_2 above 1e-6 Lambda_1");
    out << "(Lambda_1 rel err " << rel << ")";
  });

  // 2. Fig. 1 reproduction
  run_criterion({2, "Fig. 1a/1c spectra within 2% of the closed forms", 60.0}, [&](auto& out) {
    const double sig = 0.005;
    const double u = std::sqrt(kPi / 8.0) / sig;
    kernellab::ModulatedKernelSpec a;
    a.sigma_plus = a.sigma_minus = sig;
    a.plus_terms = {{0.0, 0.0}, {1.0, 3.0 * kPi * sig}, {1.0, 6.0 * kPi * sig}};
    a.minus_terms = {{1.0, 0.0}};
    auto va = supermodes::solve_fredholm_values(modulated_default(a));
    check(va.size() >= 4, "fig1a: fewer than 4 modes above floor");
    std::vector<double> lead(va.begin(), va.begin() + 4);
    std::sort(lead.begin(), lead.end());
    const std::vector<double> want_a = {-u, -u, u, u};
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
      worst = std::max(worst, std::abs(lead[i] - want_a[i]) / u);
    check(worst <= 0.02, "fig1a deviation " + std::to_string(worst));

    kernellab::ModulatedKernelSpec c;
    c.sigma_plus = c.sigma_minus = sig;
    c.plus_terms = {{1.0, 0.0}};
    c.minus_terms = {{-2.0, 0.0}, {1.0, 3.0 * kPi * sig}, {1.0, 6.0 * kPi * sig}};
    auto vc = supermodes::solve_fredholm_values(modulated_default(c));
    check(vc.size() >= 5, "fig1c: fewer than 5 modes above floor");
    std::vector<double> leadc(vc.begin(), vc.begin() + 5);
    std::sort(leadc.begin(), leadc.end());
    const std::vector<double> want_c = {-4.0 * u, u, u, u, u};
    double worst_c = 0.0;
    for (int i = 0; i < 5; ++i)
      worst_c = std::max(worst_c, std::abs(leadc[i] - want_c[i]) / std::abs(want_c[i]));
    check(worst_c <= 0.02, "fig1c deviation " + std::to_string(worst_c));
    out << "(max dev fig1a " << worst << ", fig1c " << worst_c << ")";
  });

  // 3. Appendix B ladder
  run_criterion({3, "Hermite ladder of the (2, 1) unmodulated kernel", 10.0}, [&](auto& out) {
    kernellab::ModulatedKernelSpec s;
    s.sigma_plus = 2.0;
    s.sigma_minus = 1.0;
    auto k = modulated_default(s);
    auto sm = supermodes::solve_fredholm(k);
    // Exact ladder of this kernel (Mehler): Lambda_m = sqrt(2 pi)/(sp+sm)
    // * (-(sp-sm)/(sp+sm))^m. This equals 4x the doubly-modulated-branch
    // normalization sqrt(pi/2)/(2(sp+sm)) (1/3)^m that the printed criterion
    // carries; the branch weight of an unmodulated kernel is 4 (see the
    // decisions ledger).
    const double base = std::sqrt(2.0 * kPi) / 3.0;
    double worst = 0.0;
    for (int m = 0; m <= 6; ++m) {
      const double expect = ((m % 2) ? -1.0 : 1.0) * base * std::pow(1.0 / 3.0, m);
      const double got = sm.eigenvalues[static_cast<std::size_t>(m)];
      check(got * expect > 0.0, "sign pattern broken at m=" + std::to_string(m));
      worst = std::max(worst, std::abs(got - expect) / std::abs(expect));
      // geometric ratio of the printed formula, independent of normalization
      if (m > 0) {
        const double ratio = sm.eigenvalues[static_cast<std::size_t>(m)] /
                             sm.eigenvalues[static_cast<std::size_t>(m - 1)];
        check(std::abs(ratio + 1.0 / 3.0) <= 0.01 / 3.0,
              "ladder ratio off at m=" + std::to_string(m));
      }
    }
    check(worst <= 0.01, "ladder deviation " + std::to_string(worst));
    // eigenvector fidelity against the Hermite-Gaussian forms
    const double tau = std::sqrt(2.0);
    for (int m = 0; m <= 6; ++m) {
      double dot = 0.0, nrm = 0.0;
      for (std::size_t i = 0; i < sm.axis.size(); ++i) {
        const double x = sm.axis.points[i];
        const double h = std::exp(-tau * tau * x * x) *
                         numerics::hermite(m, std::numbers::sqrt2 * tau * x);
        dot += sm.axis.weights[i] * h * sm.eigenfunctions[static_cast<std::size_t>(m)][i];
        nrm += sm.axis.weights[i] * h * h;
      }
      const double fid = std::abs(dot) / std::sqrt(nrm);
      check(fid >= 0.999, "fidelity " + std::to_string(fid) + " at m=" + std::to_string(m));
    }
    out << "(max dev " << worst << "; printed-prefactor note: measured ladder = 4x "
        << "sqrt(pi/2)/6 (1/3)^m, see ledger)";
  });

  // 4. Fig. 2 degeneracy
  run_criterion({4, "SPOPO degeneracy: 1 ps flat to 2%, 100 fs >= 10x wider", 120.0},
                [&](auto& out) {
    auto spread_top100 = [](double tau_p_fs) {
      auto pump = pumps::PumpSpectrum::rectangular(tau_p_fs);
      auto k = kernellab::realistic_spopo_kernel(20.0, pump, 4096);
      auto vals = supermodes::solve_fredholm_values(k, 0.0);
      const double a0 = std::abs(vals[0]);
      return (a0 - std::abs(vals[99])) / a0;
    };
    const double s1ps = spread_top100(1000.0);
    check(s1ps <= 0.02, "1 ps spread " + std::to_string(s1ps));
    const double s100fs = spread_top100(100.0);
    check(s100fs >= 10.0 * s1ps, "100 fs spread not 10x larger");
    out << "(spread 1ps " << s1ps << ", 100fs " << s100fs << ")";
  });

  // 5. Transverse asymptote and ratio curves
  run_criterion({5, "chi_l -> sqrt(2/pi)/rho at rho = 50; ratios rise past 0.5", 10.0},
                [&](auto& out) {
    const double target = std::sqrt(2.0 / kPi) / 50.0;
    double worst = 0.0;
    for (int f = 0; f <= 4; ++f) {
      transverse::LGFamily fam{f};
      for (int l : fam.l_values()) {
        const double chi = transverse::chi_overlap(fam, l, {{{1.0, 50.0}}});
        worst = std::max(worst, std::abs(chi - target) / target);
      }
    }
    check(worst <= 0.01, "asymptote deviation " + std::to_string(worst));
    for (int f = 1; f <= 4; ++f) {
      transverse::LGFamily fam{f};
      std::map<int, double> prev;
      for (int i = 0; i <= 40; ++i) {
        const double rho = 1.0 / std::numbers::sqrt2 + i * (4.0 - 1.0 / std::numbers::sqrt2) / 40.0;
        auto r = transverse::chi_ratios(fam, {{{1.0, rho}}});
        for (auto& [l, v] : r) {
          if (prev.count(l)) check(v >= prev[l] - 1e-12, "ratio not monotone");
          prev[l] = v;
        }
      }
      auto r2 = transverse::chi_ratios(fam, {{{1.0, 2.0}}});
      for (auto& [l, v] : r2) check(v > 0.5, "ratio below 0.5 at rho = 2");
    }
    out << "(max asymptote dev " << worst << ")";
  });

  // 6. Mixing-angle formulas
  run_criterion({6, "mixing angles cancel/oppose chi_1 vs chi_3 to 1e-8", 10.0}, [&](auto& out) {
    transverse::LGFamily f3{3};
    std::mt19937 rng(190590u);
    std::uniform_real_distribution<double> uni(0.5, 5.0);
    int done = 0;
    double worst = 0.0;
    while (done < 20) {
      const double a = uni(rng), b = uni(rng);
      if (std::abs(a - b) <= 0.1) continue;
      ++done;
      auto po = transverse::mixing_pump(a, b, transverse::mixing_angle_opposite(a, b));
      const double ro = std::abs(transverse::chi_overlap(f3, 1, po) +
                                 transverse::chi_overlap(f3, 3, po)) /
                        std::abs(transverse::chi_overlap(f3, 3, po));
      auto pn = transverse::mixing_pump(a, b, transverse::mixing_angle_null(a, b));
      const double rn = std::abs(transverse::chi_overlap(f3, 1, pn)) /
                        std::abs(transverse::chi_overlap(f3, 3, pn));
      worst = std::max({worst, ro, rn});
    }
    check(worst <= 1e-8, "worst residual " + std::to_string(worst));
    out << "(worst residual " << worst << ")";
  });

  // 7. Cluster spectra and round trips
  run_criterion({7, "ring/complete-graph spectra and kernel round trips", 5.0}, [&](auto& out) {
    auto ring = cluster::decompose_coupling(cluster::ring4_matrix());
    std::vector<double> rs = ring.spectrum;
    std::sort(rs.begin(), rs.end());
    const std::vector<double> ring_want = {-1.0, -1.0, 1.0, 1.0};
    for (int i = 0; i < 4; ++i)
      check(std::abs(rs[static_cast<std::size_t>(i)] - ring_want[static_cast<std::size_t>(i)]) <=
                1e-12,
            "ring4 spectrum not machine-exact");

    auto comp = cluster::decompose_coupling(cluster::complete_matrix(5, -0.25));
    std::vector<double> cs = comp.spectrum;
    std::sort(cs.begin(), cs.end());
    const std::vector<double> comp_want = {-1.0, 0.25, 0.25, 0.25, 0.25};
    for (int i = 0; i < 5; ++i)
      check(std::abs(cs[static_cast<std::size_t>(i)] - comp_want[static_cast<std::size_t>(i)]) <=
                1e-12,
            "complete-graph spectrum not machine-exact");

    for (const auto& target : {ring.spectrum, comp.spectrum}) {
      auto match = cluster::match_spectrum_to_kernel(target, 0.005);
      check(match.feasible, "target multiset reported infeasible");
      auto pred = supermodes::predict_modulated_spectrum(match.spec);
      std::vector<double> flat;
      for (const auto& e : pred.entries)
        for (int c = 0; c < e.multiplicity; ++c) flat.push_back(e.value / match.scale);
      std::vector<double> want = target;
      std::sort(flat.begin(), flat.end());
      std::sort(want.begin(), want.end());
      check(flat.size() == want.size(), "round trip count mismatch");
      for (std::size_t i = 0; i < want.size(); ++i)
        check(std::abs(flat[i] - want[i]) <= 1e-12 * std::max(1.0, std::abs(want[i])),
              "round trip mismatch");
    }
  });

  // 8. GHZ diagnostics
  run_criterion({8, "GHZ joint variances, uncertainty and purity", 5.0}, [&](auto& out) {
    for (std::size_t n : {3u, 4u, 5u}) {
      // independent propagation oracle: M V M^T with M = blockdiag(R^T, R^T)
      const auto rot = cluster::braunstein_rotation(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
          double dot = 0.0;
          for (std::size_t k = 0; k < n; ++k) dot += rot[i * n + k] * rot[j * n + k];
          check(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-12, "rotation not orthogonal");
        }
      for (double r : {0.0, 1.0, 2.0}) {
        const std::size_t d = 2 * n;
        std::vector<double> diag(d);
        for (std::size_t i = 0; i < n; ++i) {
          diag[i] = std::exp(2.0 * r);
          diag[n + i] = std::exp(-2.0 * r);
        }
        diag[0] = std::exp(-2.0 * r);
        diag[n] = std::exp(2.0 * r);
        std::vector<double> m(d * d, 0.0);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            m[i * d + j] = rot[j * n + i];
            m[(n + i) * d + (n + j)] = rot[j * n + i];
          }
        std::vector<double> oracle(d * d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) acc += m[i * d + k] * diag[k] * m[j * d + k];
            oracle[i * d + j] = acc;
          }

        auto v = cluster::ghz_covariance(n, r);
        for (std::size_t i = 0; i < d * d; ++i)
          check(std::abs(v.v[i] - oracle[i]) <= 1e-12, "covariance differs from oracle");

        auto jv = cluster::joint_variances(v);
        const double e2r = std::exp(-2.0 * r);
        check(std::abs(jv.var_sum_x - static_cast<double>(n) * e2r) <= 1e-9,
              "Var(sum X) != n e^{-2r}");
        for (std::size_t j = 0; j < n; ++j) {
          const std::size_t kk = (j + 1) % n;
          const double var =
              v.at(n + j, n + j) + v.at(n + kk, n + kk) - 2.0 * v.at(n + j, n + kk);
          check(std::abs(var - 2.0 * e2r) <= 1e-9, "Var(P_j - P_{j+1}) != 2 e^{-2r}");
        }
        check(cluster::uncertainty_min_eig(v) >= -1e-9, "V + i Omega not psd");
        check(std::abs(cluster::covariance_det(v) - 1.0) <= 1e-9, "det V != 1");
      }
    }
  });

  // 9. Squeezing formula
  run_criterion({9, "squeezing spectra: threshold formula and bounds", 1.0}, [&](auto& out) {
    check(opodyn::threshold_squeezing(1.0, 0.5) == 1.0 / 9.0, "1/9 not exact");
    check(opodyn::threshold_squeezing(2.0, 1.0) == 1.0 / 9.0, "ratio scaling not exact");
    // formula path approaches the threshold expression as pump_fraction -> 1
    supermodes::SupermodeSet s;
    s.axis = numerics::make_uniform_axis(1.0, 2);
    s.eigenvalues = {2.0, 1.0};
    auto rep = opodyn::squeezing_report(s, 1.0 - 1e-10);
    check(std::abs(rep.modes[1].v_minus_0 - 1.0 / 9.0) <= 1e-8, "limit mismatch");

    std::mt19937 rng(77u);
    std::uniform_real_distribution<double> ur(0.0, 0.999), uw(0.0, 6.0);
    double prev = 2.0;
    for (int i = 0; i < 100; ++i) {
      const double r = ur(rng), w = uw(rng);
      const double vm = opodyn::v_minus(r, w), vp = opodyn::v_plus(r, w);
      check(vm * vp >= 1.0 - 1e-12, "uncertainty product below 1");
      check(vm >= 0.0 && vm <= 1.0 && vp >= 1.0, "bounds violated");
      const double v0 = opodyn::v_minus(i / 100.0, 0.0);
      check(v0 < prev, "V-(0) not monotone in r");
      prev = v0;
    }
  });

  // 10. Determinism of the shipped figure suite
  run_criterion({10, "figure suite determinism (byte-identical reruns)", 0.0}, [&](auto& out) {
    const fs::path base = fs::temp_directory_path() / "opokit_acceptance";
    fs::remove_all(base);
    const fs::path a = base / "run_a", b = base / "run_b";
    if (!cli_binary.empty()) {
      for (const auto& dir : {a, b}) {
        std::ostringstream cmd;
        cmd << "'" << cli_binary << "' figures --out '" << dir.string() << "' > /dev/null 2>&1";
        check(std::system(cmd.str().c_str()) == 0, "figures run failed");
      }
      out << "(via CLI binary)";
    } else {
      cli::run_figures(a);
      cli::run_figures(b);
      out << "(in-process; CLI binary path not given)";
    }
    // identical trees, byte for byte
    std::vector<fs::path> rel;
    for (const auto& e : fs::recursive_directory_iterator(a))
      if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), a));
    std::sort(rel.begin(), rel.end());
    check(!rel.empty(), "no output files produced");
    std::size_t checked = 0;
    for (const auto& r : rel) {
      check(fs::exists(b / r), "file missing in second run: " + r.string());
      check(slurp(a / r) == slurp(b / r), "files differ: " + r.string());
      ++checked;
    }
    // the 1 ps SPOPO degeneracy report from the suite itself
    const auto rep = nlohmann::json::parse(slurp(a / "fig2-1ps" / "spectrum.json"));
    const int leading = rep.at("degeneracy").at("leading_group_count").get<int>();
    check(leading >= 100, "fig2-1ps leading 1% group has " + std::to_string(leading));
    out << " (" << checked << " files, leading group " << leading << ")";
  });

  std::printf("%s: %d/10 criteria passed\n", g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              10 - g_failures);
  return g_failures;
}
