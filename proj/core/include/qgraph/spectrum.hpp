#pragma once

#include <map>

#include "qgraph/secular.hpp"

namespace qgraph {

struct SolveOptions {
  /// Scan budget per expected root; the actual step is
  /// pi / (L * scan_points_per_expected_root * refine_factor).
  int scan_points_per_expected_root = 8;
  /// Bisection half-width target; 0 selects 1e-12 * k_max.
  double k_tol = 0;
  /// |det| acceptance gate for roots found without a sign change, relative
  /// to the system scale.
  double value_tol = 1e-8;
  /// A root is flagged degenerate when the second-smallest singular value is
  /// below this fraction of the largest.
  double degeneracy_tol = 1e-8;
  /// Extra scan refinement and the subdivision factor for cells whose |det|
  /// dips without changing sign.
  int refine_factor = 32;
  int max_dip_depth = 4;
  int threads = 1;
  /// Post-hoc sanity check: fail when the count misses the mean-density
  /// prediction by more than 20% (only applied when >= 50 roots expected).
  bool check_weyl = true;
};

/// One root of the secular function along the length line.
struct EigenData {
  double k = 0;
  /// (a_0, b_0, ..., a_{E-1}, b_{E-1}); scaled so the eigenfunction has unit
  /// L2 norm over the metric graph, with a fixed sign convention.
  Eigen::VectorXd amplitudes;
  /// Smallest singular value of the secular matrix at [k l].
  double residual = 0;
  /// Kernel dimension >= 2 within tolerance (eigenvalue multiplicity > 1).
  bool degenerate = false;
  /// 2 for roots recovered from an even-order (tangential) zero, else 1.
  int multiplicity = 1;
};

struct SpectrumSlice {
  std::vector<EigenData> roots;  // strictly increasing k, k = 0 excluded
  double k_max = 0;
  int count = 0;  // sum of multiplicities
};

/// All positive roots of delta([k l]) up to k_max. Scan step
/// pi/(L * ppr * refine_factor) with sign-change bisection; cells where |det|
/// dips without a sign change are refined recursively and resolved as
/// even-order zeros when the matrix is genuinely singular there (counted with
/// multiplicity 2).
SpectrumSlice solve_spectrum(const SecularSystem& sys, const MetricGraph& mg, double k_max,
                             const SolveOptions& opts = {});
SpectrumSlice solve_spectrum(const MetricGraph& mg, double k_max, const SolveOptions& opts = {});

struct EigenfunctionOptions {
  double on_manifold_tol = 1e-5;   // |det| gate, relative to scale
  double null_space_tol = 1e-5;    // sigma_min / sigma_max gate
  double degeneracy_tol = 1e-8;
};

/// Kernel vector of the secular matrix at [k l], L2-normalized via the exact
/// per-edge integral of (a cos(kt) + b sin(kt))^2.
EigenData eigenfunction_at(const SecularSystem& sys, const MetricGraph& mg, double k,
                           const EigenfunctionOptions& opts = {});

/// d(k^2)/d l_e = -k^2 (a_e^2 + b_e^2) for a simple eigenvalue with
/// L2-normalized eigenfunction.
double eigenvalue_derivative(const MetricGraph& mg, const EigenData& root, int edge);

/// count * pi / (k_max * L); tends to 1.
double weyl_ratio(const SpectrumSlice& slice, const MetricGraph& mg);

struct WindowCounts {
  int max_count = 0;
  /// histogram over windows anchored at each root: count -> occurrences
  std::map<int, int> histogram;
  double window = 1.0;
};

/// Roots (with multiplicity) per sliding window of the given width.
WindowCounts window_zero_counts(const SpectrumSlice& slice, double window = 1.0);

}  // namespace qgraph
