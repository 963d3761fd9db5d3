#include <catch2/catch_amalgamated.hpp>

#include <opokit/cluster.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace opokit;
using namespace opokit::cluster;
using Catch::Approx;

namespace {

// brute-force covariance propagation: V_out = M V_in M^T with M the
// block-diagonal action of R^T on (X, P)
CovarianceMatrix propagate(const std::vector<double>& rot_rowmajor, std::size_t n,
                           const std::vector<double>& diag_in) {
  const std::size_t d = 2 * n;
  std::vector<double> m(d * d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m[i * d + j] = rot_rowmajor[j * n + i]; // R^T
      m[(n + i) * d + (n + j)] = rot_rowmajor[j * n + i];
    }
  CovarianceMatrix v;
  v.n_modes = n;
  v.v.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += m[i * d + k] * diag_in[k] * m[j * d + k];
      v.v[i * d + j] = acc;
    }
  return v;
}

std::vector<double> ghz_input_diag(std::size_t n, double r) {
  std::vector<double> d(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = std::exp(2.0 * r);
    d[n + i] = std::exp(-2.0 * r);
  }
  d[0] = std::exp(-2.0 * r);
  d[n] = std::exp(2.0 * r);
  return d;
}

} // namespace

TEST_CASE("paper example matrices and their spectra") {
  CouplingMatrix ring = ring4_matrix();
  const double w = 1.0 / std::numbers::sqrt2;
  CHECK(ring(0, 1) == w);
  CHECK(ring(1, 2) == w);
  CHECK(ring(2, 3) == w);
  CHECK(ring(0, 3) == -w);
  CHECK(ring(3, 0) == -w);
  CHECK(ring(0, 2) == 0.0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(ring(i, i) == 0.0);

  auto dr = decompose_coupling(ring);
  REQUIRE(dr.spectrum.size() == 4);
  std::vector<double> ring_sorted = dr.spectrum;
  std::sort(ring_sorted.begin(), ring_sorted.end(), std::greater<>());
  CHECK(ring_sorted[0] == Approx(1.0).margin(1e-12));
  CHECK(ring_sorted[1] == Approx(1.0).margin(1e-12));
  CHECK(ring_sorted[2] == Approx(-1.0).margin(1e-12));
  CHECK(ring_sorted[3] == Approx(-1.0).margin(1e-12));

  auto dc = decompose_coupling(complete_matrix(5, -0.25));
  CHECK(dc.spectrum[0] == Approx(-1.0).margin(1e-12));
  for (int i = 1; i < 5; ++i) CHECK(dc.spectrum[i] == Approx(0.25).margin(1e-12));

  auto d2 = decompose_coupling(complete_matrix(2, 0.7));
  CHECK(d2.spectrum[0] == Approx(0.7).margin(1e-14));
  CHECK(d2.spectrum[1] == Approx(-0.7).margin(1e-14));

  // diagonal input: spectrum = diagonal entries, basis a (signed) permutation
  CouplingMatrix diag(3);
  diag.set(0, 0, 0.5);
  diag.set(1, 1, -2.0);
  diag.set(2, 2, 1.0);
  auto dd = decompose_coupling(diag);
  CHECK(dd.spectrum[0] == Approx(-2.0));
  CHECK(dd.spectrum[1] == Approx(1.0));
  CHECK(dd.spectrum[2] == Approx(0.5));
  for (std::size_t k = 0; k < 3; ++k) {
    int nonzero = 0;
    for (std::size_t i = 0; i < 3; ++i)
      if (std::abs(dd.basis[k * 3 + i]) > 1e-12) ++nonzero;
    CHECK(nonzero == 1);
  }
}

TEST_CASE("decompose/reconstruct round trip on random symmetric matrices") {
  std::mt19937 rng(99u);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (std::size_t n : {4u, 11u, 32u}) {
    CouplingMatrix k(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) k.set(i, j, uni(rng));
    auto d = decompose_coupling(k);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double rec = 0.0;
        for (std::size_t m = 0; m < n; ++m)
          rec += d.spectrum[m] * d.basis[m * n + i] * d.basis[m * n + j];
        num += (rec - k(i, j)) * (rec - k(i, j));
        den += k(i, j) * k(i, j);
      }
    CHECK(std::sqrt(num) <= 1e-10 * std::sqrt(den));
  }
}

TEST_CASE("match_spectrum_to_kernel: the paper's target spectra") {
  const double sigma = 0.005;
  // ring4 pattern {1, 1, -1, -1} -> plus-modulated (Fig. 1a family)
  {
    auto m = match_spectrum_to_kernel({1.0, 1.0, -1.0, -1.0}, sigma);
    REQUIRE(m.feasible);
    CHECK(m.family == "plus-modulated");
    CHECK(m.spec.plus_terms.size() == 3); // b0 = 0 plus two modulations
    CHECK(m.spec.plus_terms[0].b == 0.0);
    CHECK(m.spec.validity_ok());
    auto pred = supermodes::predict_modulated_spectrum(m.spec);
    std::vector<double> got;
    for (const auto& e : pred.entries)
      for (int c = 0; c < e.multiplicity; ++c) got.push_back(e.value / m.scale);
    std::sort(got.begin(), got.end());
    const std::vector<double> want = {-1.0, -1.0, 1.0, 1.0};
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
      CHECK(got[i] == Approx(want[i]).epsilon(1e-12));
  }
  // complete-graph pattern {-4, 1, 1, 1, 1} -> minus-modulated (Fig. 1c family)
  {
    auto m = match_spectrum_to_kernel({-4.0, 1.0, 1.0, 1.0, 1.0}, sigma);
    REQUIRE(m.feasible);
    CHECK(m.family == "minus-modulated");
    CHECK(m.spec.minus_terms[0].b == Approx(-2.0));
    auto pred = supermodes::predict_modulated_spectrum(m.spec);
    std::vector<double> got;
    for (const auto& e : pred.entries)
      for (int c = 0; c < e.multiplicity; ++c) got.push_back(e.value / m.scale);
    std::sort(got.begin(), got.end());
    const std::vector<double> want = {-4.0, 1.0, 1.0, 1.0, 1.0};
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
      CHECK(got[i] == Approx(want[i]).epsilon(1e-12));
  }
  // single supermode -> pure Gaussian
  {
    auto m = match_spectrum_to_kernel({1.0}, 0.5);
    REQUIRE(m.feasible);
    CHECK(m.family == "gaussian");
    auto pred = supermodes::predict_modulated_spectrum(m.spec);
    REQUIRE(pred.total_count() == 1);
    CHECK(pred.entries[0].value == Approx(m.scale * 1.0).epsilon(1e-12));
  }
  // infeasible: {2, 1, 1} has no +- pairing and two leftovers of odd count
  {
    auto m = match_spectrum_to_kernel({2.0, 1.0, -0.5}, sigma);
    CHECK_FALSE(m.feasible);
    CHECK_FALSE(m.message.empty());
    CHECK_FALSE(m.closest.empty());
  }
  CHECK_THROWS_AS(match_spectrum_to_kernel({}, sigma), std::invalid_argument);
  CHECK_THROWS_AS(match_spectrum_to_kernel({1.0, 0.0}, sigma), std::invalid_argument);
}

TEST_CASE("braunstein_rotation") {
  auto r2 = braunstein_rotation(2);
  const double s = 1.0 / std::numbers::sqrt2;
  CHECK(r2[0] == Approx(s));
  CHECK(r2[1] == Approx(s));
  CHECK(r2[2] == Approx(s));
  CHECK(r2[3] == Approx(-s));

  for (std::size_t n : {2u, 3u, 5u, 17u, 64u}) {
    auto r = braunstein_rotation(n);
    // orthogonality within 1e-12
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) dot += r[i * n + k] * r[j * n + k];
        CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-12);
      }
    // first row uniform: row0 . (1..1) = sqrt(n)
    double rowsum = 0.0;
    for (std::size_t k = 0; k < n; ++k) rowsum += r[k];
    CHECK(rowsum == Approx(std::sqrt(static_cast<double>(n))).epsilon(1e-12));
  }
}

TEST_CASE("ghz_covariance identities against the propagation oracle") {
  for (std::size_t n : {3u, 4u, 5u}) {
    for (double r : {0.0, 1.0, 2.0}) {
      CovarianceMatrix v = ghz_covariance(n, r);
      // brute-force oracle
      CovarianceMatrix o = propagate(braunstein_rotation(n), n, ghz_input_diag(n, r));
      for (std::size_t i = 0; i < 4 * n * n; ++i)
        CHECK(v.v[i] == Approx(o.v[i]).margin(1e-12));

      JointVariances jv = joint_variances(v);
      CHECK(jv.var_sum_x ==
            Approx(static_cast<double>(n) * std::exp(-2.0 * r)).margin(1e-9));
      CHECK(jv.max_var_p_diff == Approx(2.0 * std::exp(-2.0 * r)).margin(1e-9));
      // every cyclic difference, not just the worst one
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = (j + 1) % n;
        const double var = v.at(n + j, n + j) + v.at(n + k, n + k) - 2.0 * v.at(n + j, n + k);
        CHECK(var == Approx(2.0 * std::exp(-2.0 * r)).margin(1e-9));
      }

      CHECK(uncertainty_min_eig(v) >= -1e-9);
      CHECK(covariance_det(v) == Approx(1.0).margin(1e-9));
    }
  }
  // r = 0 is vacuum
  CovarianceMatrix vac = ghz_covariance(4, 0.0);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      CHECK(vac.at(i, j) == Approx(i == j ? 1.0 : 0.0).margin(1e-14));
}

TEST_CASE("any orthonormal completion gives the same joint variances") {
  // Householder alternative: Q = I - 2 v v^T maps e_1 to the uniform vector;
  // Q^T is orthogonal with uniform first row but different lower rows.
  const std::size_t n = 5;
  const double invs = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> v(n);
  double nrm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = (i == 0 ? 1.0 : 0.0) - invs;
    nrm += v[i] * v[i];
  }
  nrm = std::sqrt(nrm);
  for (double& x : v) x /= nrm;
  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      q[i * n + j] = (i == j ? 1.0 : 0.0) - 2.0 * v[j] * v[i]; // Q^T row-major

  const double r = 1.0;
  CovarianceMatrix alt = propagate(q, n, ghz_input_diag(n, r));
  JointVariances jv = joint_variances(alt);
  CHECK(jv.var_sum_x == Approx(n * std::exp(-2.0 * r)).margin(1e-9));
  CHECK(jv.max_var_p_diff == Approx(2.0 * std::exp(-2.0 * r)).margin(1e-9));
  CHECK(covariance_det(alt) == Approx(1.0).margin(1e-9));
}

TEST_CASE("joint_variances on vacuum and 10 dB states") {
  CovarianceMatrix vac = ghz_covariance(5, 0.0);
  JointVariances jv = joint_variances(vac);
  CHECK(jv.var_sum_x == Approx(5.0).margin(1e-12));
  CHECK(jv.max_var_p_diff == Approx(2.0).margin(1e-12));

  // 10 dB of squeezing: r = ln(10)/2, e^{-2r} = 0.1 exactly
  const double r10 = 0.5 * std::log(10.0);
  JointVariances g = joint_variances(ghz_covariance(4, r10));
  CHECK(g.var_sum_x <= 0.1 * 4.0 + 1e-12);
  CHECK(g.max_var_p_diff <= 0.1 * 2.0 + 1e-12);

  // monotone decreasing in r
  double prev_x = 1e300, prev_p = 1e300;
  for (double r : {0.0, 0.4, 0.8, 1.2, 1.6}) {
    JointVariances j = joint_variances(ghz_covariance(4, r));
    CHECK(j.var_sum_x < prev_x);
    CHECK(j.max_var_p_diff < prev_p);
    prev_x = j.var_sum_x;
    prev_p = j.max_var_p_diff;
  }
}

TEST_CASE("reduced pairs of the finite-squeezing GHZ state are NPT entangled") {
  // The equal-squeezing Braunstein construction distributes pairwise
  // entanglement among all mode pairs: the PPT test on any reduced pair is
  // violated for every r > 0 (the violation shrinks as 2/n e^{-4r} + 1 - 2/n
  // approaches 1). The idealized trace-out separability statement applies to
  // the infinite-squeezing limit only, so the assertable finite-r fact is
  // entanglement, not separability.
  CovarianceMatrix v = ghz_covariance(5, 2.0);
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t k = j + 1; k < 5; ++k) {
      const double m = ppt_min_eig(reduce_pair(v, j, k));
      CHECK(m < -1e-6);
    }
  // while the state itself is physical
  CHECK(uncertainty_min_eig(v) >= -1e-9);
  // and the violation vanishes as r -> 0 (vacuum pairs are separable)
  CovarianceMatrix v0 = ghz_covariance(5, 0.0);
  CHECK(ppt_min_eig(reduce_pair(v0, 0, 1)) >= -1e-12);
}

TEST_CASE("entangled_mode_profiles") {
  transverse::TransverseGrid grid{4.0, 64};
  transverse::LGFamily f1{1};

  // identity rotation reproduces the hybrid-mode intensities
  {
    std::vector<double> eye = {1.0, 0.0, 0.0, 1.0};
    auto maps = entangled_mode_profiles(f1, eye, grid);
    auto basis = transverse::hybrid_mode_basis(f1, grid);
    REQUIRE(maps.size() == 2);
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t t = 0; t < maps[k].values.size(); ++t)
        CHECK(maps[k].values[t] ==
              Approx(basis[k].values[t] * basis[k].values[t]).margin(1e-10));
  }
  // Braunstein rotation: normalized power on the grid
  {
    auto maps = entangled_mode_profiles(f1, braunstein_rotation(2), grid);
    REQUIRE(maps.size() == 2);
    for (const auto& m : maps) {
      double power = 0.0;
      for (double x : m.values) power += x;
      CHECK(power * grid.cell() == Approx(1.0).margin(1e-8));
    }
  }
  // f = 2: three pairwise distinct maps
  {
    transverse::LGFamily f2{2};
    auto maps = entangled_mode_profiles(f2, braunstein_rotation(3), grid);
    REQUIRE(maps.size() == 3);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b) {
        double d2 = 0.0;
        for (std::size_t t = 0; t < maps[a].values.size(); ++t) {
          const double d = maps[a].values[t] - maps[b].values[t];
          d2 += d * d;
        }
        CHECK(std::sqrt(d2 * grid.cell()) > 0.1);
      }
  }
  // dimension mismatch
  CHECK_THROWS_AS(entangled_mode_profiles(f1, braunstein_rotation(3), grid),
                  std::invalid_argument);
}
