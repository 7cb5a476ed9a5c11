#include "niplab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "niplab/errors.hpp"
#include "niplab/linalg.hpp"

namespace niplab {

namespace {

bool by_real_then_imag(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

constexpr double hermitian_switch = 1e-13;

}  // namespace

std::vector<cplx> Spectrum::lowest() const { return lowest(requested); }

std::vector<cplx> Spectrum::lowest(int k) const {
  const auto count = std::min<std::size_t>(eigenvalues.size(), static_cast<std::size_t>(std::max(k, 0)));
  return {eigenvalues.begin(), eigenvalues.begin() + static_cast<std::ptrdiff_t>(count)};
}

double edge_mass(const Eigen::VectorXcd& v, Basis basis, double edge_fraction) {
  const Eigen::Index n = v.size();
  const double total = v.squaredNorm();
  if (total == 0.0) return 0.0;
  const auto width = static_cast<Eigen::Index>(std::ceil(edge_fraction * n));
  double edge = 0.0;
  if (basis == Basis::half_line_grid) {
    // Only the far end is a box wall; r -> 0 is the physical boundary.
    edge = v.tail(width).squaredNorm();
  } else {
    const Eigen::Index side = std::max<Eigen::Index>(width / 2, 1);
    edge = v.head(side).squaredNorm() + v.tail(side).squaredNorm();
  }
  return edge / total;
}

Spectrum eigensolve(const OperatorMatrix& m, int k, const ArtifactFilter& filter) {
  const Eigen::Index n = m.dim();
  if (k < 1 || k > n) throw Error(ErrorCode::invalid_configuration, "k must lie in [1, dimension]");
  if (!m.entries.allFinite()) throw Error(ErrorCode::numerical, "operator matrix has non-finite entries");

  const bool use_filter = filter.enabled && m.basis != Basis::momentum_grid;
  const bool hermitian = hermiticity_residual(m.entries) < hermitian_switch;
  const linalg::EigenDecomposition dec = hermitian ? linalg::eig_hermitian(m.entries, use_filter)
                                                   : linalg::eig_general(m.entries, use_filter);

  Spectrum s{.eigenvalues = {}, .filtered_count = 0, .grid = m.grid, .reality_tolerance = 1e-6, .requested = k};
  s.eigenvalues.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (use_filter && edge_mass(dec.vectors.col(i), m.basis, filter.edge_fraction) > filter.threshold) {
      ++s.filtered_count;
      continue;
    }
    s.eigenvalues.push_back(dec.values(i));
  }
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), by_real_then_imag);
  return s;
}

bool is_real(cplx e, double tau_abs, double tau_rel) {
  return std::abs(e.imag()) < tau_abs + tau_rel * std::abs(e);
}

RealityClassification classify_reality(const Spectrum& s, double tau_abs, double tau_rel) {
  if (!(tau_abs > 0.0) || !(tau_rel > 0.0)) {
    throw Error(ErrorCode::invalid_configuration, "reality tolerances must be positive");
  }
  RealityClassification out;
  for (cplx e : s.lowest()) {
    if (is_real(e, tau_abs, tau_rel)) {
      out.real_values.push_back(e.real());
    } else {
      out.complex_values.push_back(e);
    }
  }
  return out;
}

MatchReport compare_spectra(const Spectrum& a, const Spectrum& b, int k, double tol, MatchMode mode,
                            bool relative) {
  if (k < 1) throw Error(ErrorCode::invalid_configuration, "k must be positive");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_configuration, "tolerance must be positive");
  if (a.eigenvalues.size() < static_cast<std::size_t>(k) || b.eigenvalues.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::invalid_configuration, "spectra hold fewer than k usable eigenvalues");
  }
  const std::vector<cplx> lhs = a.lowest(k);
  const std::vector<cplx> rhs = mode == MatchMode::bijective ? b.lowest(k) : b.eigenvalues;

  MatchReport report;
  std::vector<bool> taken(rhs.size(), false);
  for (int i = 0; i < k; ++i) {
    int best = -1;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < rhs.size(); ++j) {
      if (taken[j]) continue;
      const double gap = std::abs(rhs[j].real() - lhs[i].real());
      if (gap < best_gap) {
        best_gap = gap;
        best = static_cast<int>(j);
      }
    }
    const double dev = std::abs(lhs[i] - rhs[best]);
    const double scale = std::abs(rhs[best]);
    const double rel = scale > 0.0 ? dev / scale : dev;
    const bool ok = (relative ? rel : dev) <= tol;
    if (mode == MatchMode::subset && !ok) {
      report.unmatched_a.push_back(i);
      continue;
    }
    taken[best] = true;
    report.pairs.push_back({i, best, dev, ok});
    report.max_deviation = std::max(report.max_deviation, dev);
    report.max_relative_deviation = std::max(report.max_relative_deviation, rel);
    if (!ok) {
      report.unmatched_a.push_back(i);
      report.unmatched_b.push_back(best);
    }
  }
  if (mode == MatchMode::subset) {
    // Surplus eigenvalues of b inside the window spanned by a's k lowest.
    const double top = lhs.back().real() + (relative ? tol * std::abs(lhs.back()) : tol);
    for (std::size_t j = 0; j < rhs.size(); ++j) {
      if (!taken[j] && rhs[j].real() <= top) report.unmatched_b.push_back(static_cast<int>(j));
    }
    report.matched = report.unmatched_a.empty();
  } else {
    report.matched = report.unmatched_a.empty() && report.unmatched_b.empty();
  }
  return report;
}

}  // namespace niplab
