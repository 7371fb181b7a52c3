#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "qgraph/graph.hpp"

namespace qgraph {

/// Markov chain on directed edges. State 2e is edge e traversed tail to
/// head, state 2e+1 the reverse; a loop's two directions are distinct
/// states. From a state ending at a vertex of degree d, the walk
/// back-scatters onto the reversed state with probability ((d-2)/d)^2 and
/// moves to each of the other d-1 outgoing states with probability (2/d)^2.
struct DirectedEdgeChain {
  Graph graph;
  Eigen::MatrixXd transition;  // row-stochastic, (2#E)^2

  int state_count() const { return 2 * graph.edge_count(); }
  static int state_of(int edge, bool backward) { return 2 * edge + (backward ? 1 : 0); }
  static int edge_of(int state) { return state / 2; }
  static bool is_backward(int state) { return state % 2 != 0; }
  static int reversed(int state) { return state ^ 1; }

  /// Vertex the traversal leaves from / arrives at.
  int start_vertex(int state) const;
  int terminal_vertex(int state) const;
};

DirectedEdgeChain transition_matrix(const Graph& g);

struct StationaryResult {
  Eigen::VectorXd distribution;
  int iterations = 0;
  /// Set for circle graphs: the walk is a deterministic rotation, each
  /// direction is invariant, and the uniform vector is returned by fiat.
  bool non_ergodic = false;
};

/// Left fixed vector of the chain, from a point mass via power iteration on
/// the lazy chain (I+P)/2 (which removes periodicity without changing the
/// fixed vector). The chain is doubly stochastic, so the result is the
/// uniform distribution whenever the chain mixes.
StationaryResult stationary_distribution(const DirectedEdgeChain& chain, double tol = 1e-12,
                                         int max_iterations = 200000);

/// 1 - |second largest eigenvalue| of the transition matrix. Zero for the
/// circle (deterministic rotation) and for chains with period 2.
double spectral_gap(const DirectedEdgeChain& chain);

struct TrajectoryEvent {
  double time = 0;  // vertex hit time
  int state = 0;    // directed edge entered at that moment
};

struct Trajectory {
  int start_state = 0;
  double start_offset = 0;  // distance already covered on the first edge
  std::vector<TrajectoryEvent> events;
  double total_time = 0;
};

/// One sample path of the unit-speed geodesic flow: deterministic along
/// edges, seeded Markov scattering at vertices, exact event times.
Trajectory simulate_geodesic(const MetricGraph& mg, int start_state, double start_offset,
                             double horizon, std::uint64_t seed);

/// Fraction of the trajectory's time spent on each edge.
std::vector<double> edge_occupation(const MetricGraph& mg, const Trajectory& traj);

struct ErgodicityReport {
  std::vector<double> occupation;         // mean fraction per edge over trials
  std::vector<double> occupation_stderr;  // sample stderr of the mean
  std::vector<double> expected;           // l_e / L
  double tv_distance = 0;                 // between mean occupation and expected
  double gap = 0;
  bool non_ergodic = false;
  int trials = 0;
  double horizon = 0;
};

/// Aggregates seeded independent trajectories (trial i starts on state
/// i mod 2#E with the derived stream seed) against the arc-length law.
ErgodicityReport ergodicity_report(const MetricGraph& mg, int trials, double horizon,
                                   std::uint64_t seed);

}  // namespace qgraph
