#include <cmath>

#include "doctest.h"
#include "niplab/errors.hpp"
#include "niplab/operators.hpp"
#include "niplab/spectra.hpp"

using namespace niplab;
using Eigen::MatrixXcd;

namespace {

OperatorMatrix harmonic(const GridSpec& g, double scale) {
  const MatrixXcd x = build_position(g).entries;
  return OperatorMatrix(scale * (build_kinetic(g).entries + x * x), Basis::position_grid, g);
}

Spectrum manual(std::vector<cplx> values) {
  Spectrum s{.eigenvalues = std::move(values), .grid = GridSpec(8, 1.0)};
  s.requested = static_cast<int>(s.eigenvalues.size());
  return s;
}

}  // namespace

TEST_CASE("harmonic oscillator spectra") {
  const GridSpec g(512, 10.0);
  const Spectrum s = eigensolve(harmonic(g, 1.0), 6);
  REQUIRE(s.lowest().size() == 6);
  for (int n = 0; n < 6; ++n) CHECK(std::abs(s.lowest()[n] - cplx(2.0 * n + 1.0)) < 1e-6);
  CHECK(s.filtered_count + static_cast<int>(s.eigenvalues.size()) == 512);

  const Spectrum half = eigensolve(harmonic(g, 0.5), 4);
  for (int n = 0; n < 4; ++n) CHECK(std::abs(half.lowest()[n] - cplx(n + 0.5)) < 1e-6);
}

TEST_CASE("Hermitian input yields real, sorted eigenvalues") {
  const GridSpec g(256, 8.0);
  const Spectrum s = eigensolve(build_jm_avatar(1.0, g), 10);
  for (cplx e : s.eigenvalues) CHECK(std::abs(e.imag()) < 1e-10);
  for (std::size_t i = 1; i < s.eigenvalues.size(); ++i) CHECK(s.eigenvalues[i - 1].real() <= s.eigenvalues[i].real());
  CHECK(classify_reality(s).complex_values.empty());
}

TEST_CASE("avatar ground state is stable under refinement") {
  const double e512 = eigensolve(build_jm_avatar(1.0, GridSpec(512, 10.0)), 1).lowest()[0].real();
  const double e1024 = eigensolve(build_jm_avatar(1.0, GridSpec(1024, 10.0)), 1).lowest()[0].real();
  CHECK(std::abs(e512 - e1024) < 1e-5);
}

TEST_CASE("spectral shift covariance") {
  const GridSpec g(256, 10.0);
  const OperatorMatrix h = build_bb(1.0, 1.0, g);
  const OperatorMatrix shifted(h.entries + MatrixXcd::Identity(256, 256), h.basis, g);
  const Spectrum a = eigensolve(h, 4);
  const Spectrum b = eigensolve(shifted, 4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(a.lowest()[i] + 1.0 - b.lowest()[i]) < 1e-8);
}

TEST_CASE("artifact filter rejects box states") {
  const GridSpec g(256, 6.0);
  // A free particle in the box: every eigenvector is delocalized.
  const OperatorMatrix free = build_kinetic(g);
  const Spectrum filtered = eigensolve(free, 4);
  CHECK(filtered.filtered_count > 200);
  const Spectrum raw = eigensolve(free, 4, ArtifactFilter{.enabled = false});
  CHECK(raw.filtered_count == 0);
  CHECK(raw.eigenvalues.size() == 256);

  Eigen::VectorXcd edge = Eigen::VectorXcd::Zero(256);
  edge(0) = 1.0;
  CHECK(edge_mass(edge, Basis::position_grid, 0.1) == doctest::Approx(1.0));
  Eigen::VectorXcd centre = Eigen::VectorXcd::Zero(256);
  centre(128) = 1.0;
  CHECK(edge_mass(centre, Basis::position_grid, 0.1) == 0.0);
}

TEST_CASE("reality classification") {
  const Spectrum pair = manual({cplx(1.0, -0.1), cplx(1.0, 0.1)});
  const RealityClassification c = classify_reality(pair);
  CHECK(c.real_values.empty());
  CHECK(c.complex_values.size() == 2);
  CHECK(is_real(cplx(1.0, 1e-7), 1e-6, 1e-6));
  CHECK_FALSE(is_real(cplx(1.0, 1e-5), 1e-6, 1e-6));
  CHECK(is_real(cplx(1e6, 0.5), 1e-6, 1e-6));

  const Spectrum bb = eigensolve(build_bb(1.0, 1.0, GridSpec(512, 10.0)), 4);
  CHECK(classify_reality(bb, 1e-4, 1e-4).real_values.size() == 4);
}

TEST_CASE("spectrum comparison") {
  const Spectrum a = manual({1.0, 3.0, 5.0});
  SUBCASE("self comparison") {
    const MatchReport r = compare_spectra(a, a, 3, 1e-12);
    CHECK(r.matched);
    CHECK(r.max_deviation == 0.0);
    CHECK(r.pairs.size() == 3);
  }
  SUBCASE("bijective mismatch is reported, not thrown") {
    const Spectrum b = manual({1.0, 3.5, 5.0});
    const MatchReport r = compare_spectra(a, b, 3, 1e-3);
    CHECK_FALSE(r.matched);
    CHECK(r.max_deviation == doctest::Approx(0.5));
    bool offending = false;
    for (const MatchPair& p : r.pairs) offending |= !p.within_tolerance && p.index_a == 1;
    CHECK(offending);
  }
  SUBCASE("bijective symmetry") {
    const Spectrum b = manual({1.1, 2.9, 5.2});
    CHECK(compare_spectra(a, b, 3, 1.0).max_deviation == doctest::Approx(compare_spectra(b, a, 3, 1.0).max_deviation));
  }
  SUBCASE("subset mode reports the surplus") {
    const Spectrum b = manual({1.0, 2.0, 3.0, 4.0, 5.0, 9.0});
    const MatchReport r = compare_spectra(a, b, 3, 1e-9, MatchMode::subset);
    CHECK(r.matched);
    CHECK(r.unmatched_b.size() == 2);
    CHECK_FALSE(compare_spectra(a, b, 3, 1e-9).matched);
  }
  SUBCASE("too few eigenvalues") {
    CHECK_THROWS_AS(compare_spectra(a, manual({1.0}), 2, 1e-3), Error);
  }
  SUBCASE("relative tolerance") {
    const Spectrum big = manual({1000.0});
    const Spectrum near = manual({1000.5});
    CHECK(compare_spectra(big, near, 1, 1e-3, MatchMode::bijective, true).matched);
    CHECK_FALSE(compare_spectra(big, near, 1, 1e-3).matched);
  }
}

TEST_CASE("mapped and avatar operators are isospectral") {
  const GridSpec g(512, 10.0);
  const Spectrum mapped = eigensolve(build_jm_mapped(1.0, g), 5);
  const Spectrum avatar = eigensolve(build_jm_avatar(1.0, g), 5);
  CHECK(compare_spectra(mapped, avatar, 5, 1e-3).max_deviation < 1e-3);

  const GridSpec s(512, 12.0);
  const Spectrum bga = eigensolve(build_bg_avatar(0.05, 1.0, s), 4);
  const Spectrum bg = eigensolve(build_bg(0.05, 1.0, 0.5, s), 12);
  CHECK(compare_spectra(bga, bg, 4, 1e-2, MatchMode::subset).matched);
}
