#pragma once

#include <functional>
#include <optional>

#include "qgraph/spectrum.hpp"

namespace qgraph {

/// Nonnegative weight per edge, m_e |dt_e| up to scaling.
struct EdgeMeasure {
  std::vector<double> m;
};

/// Edge measure normalized to unit total mass: sum m_e l_e = 1.
struct ProbabilityEdgeMeasure {
  std::vector<double> m;
};

/// m_e = a_e^2 + b_e^2 of an L2-normalized eigenfunction.
EdgeMeasure mu_phi(const EigenData& root);

ProbabilityEdgeMeasure normalize_measure(const MetricGraph& mg, const EdgeMeasure& mu);

struct GaussOptions {
  ClassifyOptions classify;
  /// Components of the oriented normal may dip this far below zero
  /// (relative to its norm) before the direction is rejected.
  double cone_tol = 1e-7;
};

/// Unit normal direction of the determinant manifold at a regular point,
/// oriented into the closed positive cone (largest component positive,
/// negative dust clamped to zero).
EdgeMeasure gauss_map(const SecularSystem& sys, const TorusPoint& p, const GaussOptions& opts = {});

struct AverageOptions {
  SolveOptions solve;
  int blocks = 10;
  /// Reject lengths admitting a small integer relation sum n_e l_e = 0.
  bool skip_rational_check = false;
  int rational_coeff_bound = 20;
  /// Degenerate roots are legitimate sample points for plain torus
  /// functions but carry no usable eigenfunction or Gauss direction.
  bool include_degenerate = true;
};

struct BgAverage {
  Eigen::VectorXd estimate;
  Eigen::VectorXd std_error;
  /// Per-block averages (dim x blocks), each scaled to the full rate; the
  /// estimate is their mean and the error bar their spread.
  Eigen::MatrixXd block_estimates;
  int used = 0;
  int skipped_degenerate = 0;
  /// Roots whose integrand declined to evaluate (Gauss map at a near-singular
  /// point); asymptotically a measure-zero set.
  int skipped_singular = 0;
};

/// If the lengths admit a relation sum n_e l_e = 0 with |n_e| <= bound, the
/// offending coefficient vector is returned. The bound shrinks automatically
/// so the exhaustive search stays around 1e7 combinations.
std::optional<std::vector<int>> find_rational_relation(const std::vector<double>& lengths,
                                                       int coeff_bound);

/// Ergodic average (1/k_max) sum over roots of f([k_j l]), weighted by
/// multiplicity; the standard error comes from averaging over `blocks`
/// equal k-blocks. f may return nullopt to skip a root. Vector-valued core
/// used by every averaging front end.
BgAverage bg_average(
    const MetricGraph& mg, const SpectrumSlice& slice,
    const std::function<std::optional<Eigen::VectorXd>(const TorusPoint&, const EigenData&)>& f,
    int dim, const AverageOptions& opts = {});

/// Scalar convenience that solves the spectrum internally.
BgAverage bg_average(const MetricGraph& mg, const std::function<double(const TorusPoint&)>& f,
                     double k_max, const AverageOptions& opts = {});

/// Per-edge average of the probability-normalized Gauss map over the slice;
/// each component tends to 1/pi, the Liouville measure scaled by the total
/// mass L/pi.
BgAverage liouville_average(const SecularSystem& sys, const MetricGraph& mg,
                            const SpectrumSlice& slice, const AverageOptions& opts = {});

struct DensityOptions {
  AverageOptions average;
  /// Ramp half-width of the mollified indicator.
  double mollify_eps = 0.05;
};

struct DensityEstimate {
  double density = 0;
  double density_std_error = 0;
  double mollified = 0;
  double mollified_std_error = 0;
  int used = 0;
  int skipped_degenerate = 0;
  int skipped_singular = 0;
};

/// Density of roots whose normalized direction measure lies in D, estimated
/// along the spectrum; equals the weight the spectral measure gives to the
/// Gauss preimage of D. The optional margin function (positive inside D)
/// feeds a linear-ramp mollified indicator, reported alongside the sharp one.
DensityEstimate density_bound(
    const SecularSystem& sys, const MetricGraph& mg, const SpectrumSlice& slice,
    const std::function<bool(const ProbabilityEdgeMeasure&)>& membership,
    const std::function<double(const ProbabilityEdgeMeasure&)>* margin = nullptr,
    const DensityOptions& opts = {});

struct CensusOptions {
  double cluster_tol = 0.05;   // max-norm ball radius in normalized coordinates
  double support_tol = 1e-6;   // m_e above this counts as supported
};

struct CensusCluster {
  ProbabilityEdgeMeasure center;  // mean of members
  double relative_density = 0;    // member count / total used
  bool is_scar = false;           // support is a strict subset of the edges
  int count = 0;
};

struct Census {
  std::vector<CensusCluster> clusters;  // in order of first appearance
  int total_used = 0;
  int skipped_degenerate = 0;
};

/// Greedy ball clustering of normalized mu_phi over all nondegenerate roots.
Census semiclassical_census(const MetricGraph& mg, const SpectrumSlice& slice,
                            const CensusOptions& opts = {});

struct ScarMetricOptions {
  std::uint64_t seed = 20240601;
  /// Off-support lengths are base + spread * u with u uniform in [0,1).
  double off_base = 1.0;
  double off_spread = 0.25;
};

struct ScarConstruction {
  MetricGraph metric;
  double k = 0;
};

/// Lengths making the support carry an exact eigenfunction vanishing off it:
/// paths get (1/2, 1, ..., 1, 1/2) and k = pi (a single edge gets length 1),
/// cycles get unit lengths and k = 2pi. Off-support lengths are seeded noise
/// near 1; they cannot break the construction.
ScarConstruction scar_metric(const Graph& g, const ScarSupport& support,
                             const ScarMetricOptions& opts = {});

struct ScarCheck {
  /// ||M v|| / ||v|| with M the secular matrix at [k l] and v the candidate
  /// amplitude vector: the support profile on support edges, zero elsewhere.
  double residual = 0;
  Eigen::VectorXd amplitudes;
};

ScarCheck verify_scar(const MetricGraph& mg, const ScarSupport& support, double k);

}  // namespace qgraph
