#pragma once

#include <vector>

#include "niplab/grid.hpp"

namespace niplab {

/// Eigenvectors with more than `threshold` of their squared norm in the outer
/// `edge_fraction` of the grid are treated as box artifacts.
struct ArtifactFilter {
  double edge_fraction = 0.10;
  double threshold = 1e-3;
  bool enabled = true;
};

struct Spectrum {
  /// Every eigenvalue that survived the artifact filter, ascending by real part
  /// (ties by imaginary part).
  std::vector<cplx> eigenvalues;
  int filtered_count = 0;
  GridSpec grid;
  double reality_tolerance = 1e-6;
  int requested = 0;

  /// The `requested` lowest retained eigenvalues (fewer if not available).
  std::vector<cplx> lowest() const;
  std::vector<cplx> lowest(int k) const;
};

Spectrum eigensolve(const OperatorMatrix& m, int k, const ArtifactFilter& filter = {});

/// Squared-norm fraction of `v` on the artifact edge of the grid.
double edge_mass(const Eigen::VectorXcd& v, Basis basis, double edge_fraction);

struct RealityClassification {
  std::vector<double> real_values;
  std::vector<cplx> complex_values;
};

/// E counts as real iff |Im E| < tau_abs + tau_rel |E|. Only the requested
/// lowest eigenvalues are classified.
RealityClassification classify_reality(const Spectrum& s, double tau_abs = 1e-6,
                                       double tau_rel = 1e-6);
bool is_real(cplx e, double tau_abs, double tau_rel);

enum class MatchMode { bijective, subset };

struct MatchPair {
  int index_a;
  int index_b;
  double deviation;  // |E_a - E_b|
  bool within_tolerance;
};

struct MatchReport {
  std::vector<MatchPair> pairs;
  double max_deviation = 0.0;
  double max_relative_deviation = 0.0;
  std::vector<int> unmatched_a;
  std::vector<int> unmatched_b;
  bool matched = false;
};

/// Greedy nearest-real-part pairing of a's k lowest against b. With `relative`
/// the tolerance applies to |E_a - E_b| / |E_b|.
MatchReport compare_spectra(const Spectrum& a, const Spectrum& b, int k, double tol,
                            MatchMode mode = MatchMode::bijective, bool relative = false);

}  // namespace niplab
