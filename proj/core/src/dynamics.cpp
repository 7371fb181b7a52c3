#include "qgraph/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qgraph/rng.hpp"

namespace qgraph {

int DirectedEdgeChain::start_vertex(int state) const {
  const Edge& e = graph.edge(edge_of(state));
  return is_backward(state) ? e.head : e.tail;
}

int DirectedEdgeChain::terminal_vertex(int state) const {
  const Edge& e = graph.edge(edge_of(state));
  return is_backward(state) ? e.tail : e.head;
}

namespace {

/// Outgoing states per vertex, ascending; a loop contributes both
/// directions, so the list length is the vertex degree.
std::vector<std::vector<int>> outgoing_states(const DirectedEdgeChain& chain) {
  std::vector<std::vector<int>> out(static_cast<size_t>(chain.graph.vertex_count()));
  for (int s = 0; s < chain.state_count(); ++s)
    out[static_cast<size_t>(chain.start_vertex(s))].push_back(s);
  return out;
}

}  // namespace

DirectedEdgeChain transition_matrix(const Graph& g) {
  DirectedEdgeChain chain;
  chain.graph = g;
  const int n = chain.state_count();
  chain.transition = Eigen::MatrixXd::Zero(n, n);

  const std::vector<std::vector<int>> outgoing = outgoing_states(chain);
  for (int s = 0; s < n; ++s) {
    const int v = chain.terminal_vertex(s);
    const double d = static_cast<double>(g.degree(v));
    const double back = ((d - 2.0) / d) * ((d - 2.0) / d);
    const double fwd = (2.0 / d) * (2.0 / d);
    const int rev = DirectedEdgeChain::reversed(s);
    for (int t : outgoing[static_cast<size_t>(v)]) chain.transition(s, t) = t == rev ? back : fwd;
  }
  return chain;
}

StationaryResult stationary_distribution(const DirectedEdgeChain& chain, double tol,
                                         int max_iterations) {
  const int n = chain.state_count();
  StationaryResult out;
  if (chain.graph.is_circle()) {
    out.non_ergodic = true;
    out.distribution = Eigen::VectorXd::Constant(n, 1.0 / n);
    return out;
  }

  Eigen::RowVectorXd pi = Eigen::RowVectorXd::Zero(n);
  pi[0] = 1.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::RowVectorXd next = 0.5 * (pi + pi * chain.transition);
    const double residual = (next * chain.transition - next).cwiseAbs().sum();
    pi = next;
    if (residual < tol) {
      out.distribution = pi.transpose();
      out.iterations = it;
      return out;
    }
  }
  throw NotConverged("stationary distribution did not reach tolerance after " +
                     std::to_string(max_iterations) + " iterations");
}

double spectral_gap(const DirectedEdgeChain& chain) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(chain.transition, false);
  std::vector<double> moduli(static_cast<size_t>(chain.state_count()));
  for (int i = 0; i < chain.state_count(); ++i) moduli[static_cast<size_t>(i)] = std::abs(es.eigenvalues()[i]);
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  const double second = moduli.size() > 1 ? moduli[1] : 0.0;
  return std::max(0.0, 1.0 - second);
}

Trajectory simulate_geodesic(const MetricGraph& mg, int start_state, double start_offset,
                             double horizon, std::uint64_t seed) {
  const DirectedEdgeChain chain = transition_matrix(mg.graph);
  if (start_state < 0 || start_state >= chain.state_count())
    throw InvalidInput("start state out of range");
  const double start_len = mg.lengths[static_cast<size_t>(DirectedEdgeChain::edge_of(start_state))];
  if (start_offset < 0 || start_offset >= start_len)
    throw InvalidInput("start offset must lie inside the first edge");
  if (!(horizon > 0)) throw InvalidInput("horizon must be positive");

  const std::vector<std::vector<int>> outgoing = outgoing_states(chain);
  Rng rng(seed);

  Trajectory traj;
  traj.start_state = start_state;
  traj.start_offset = start_offset;
  traj.total_time = horizon;

  int state = start_state;
  double t = -start_offset;  // entry time of the current edge
  while (true) {
    t += mg.lengths[static_cast<size_t>(DirectedEdgeChain::edge_of(state))];
    if (t >= horizon) break;

    const int v = chain.terminal_vertex(state);
    const auto& options = outgoing[static_cast<size_t>(v)];
    const double d = static_cast<double>(options.size());
    const double back = ((d - 2.0) / d) * ((d - 2.0) / d);
    const int rev = DirectedEdgeChain::reversed(state);

    const double u = rng.uniform();
    int next;
    if (u < back) {
      next = rev;
    } else {
      // The remaining mass is (2/d)^2 on each outgoing state except the
      // reversal; index into the option list with the reversal skipped.
      int idx = static_cast<int>((u - back) / ((2.0 / d) * (2.0 / d)));
      idx = std::min(idx, static_cast<int>(d) - 2);
      int seen = -1;
      next = rev;
      for (int cand : options) {
        if (cand == rev) continue;
        if (++seen == idx) {
          next = cand;
          break;
        }
      }
    }
    state = next;
    traj.events.push_back({t, state});
  }
  return traj;
}

std::vector<double> edge_occupation(const MetricGraph& mg, const Trajectory& traj) {
  std::vector<double> time_on(mg.lengths.size(), 0.0);
  int state = traj.start_state;
  double entered = 0;
  for (const TrajectoryEvent& ev : traj.events) {
    time_on[static_cast<size_t>(DirectedEdgeChain::edge_of(state))] += ev.time - entered;
    entered = ev.time;
    state = ev.state;
  }
  time_on[static_cast<size_t>(DirectedEdgeChain::edge_of(state))] += traj.total_time - entered;
  for (double& v : time_on) v /= traj.total_time;
  return time_on;
}

ErgodicityReport ergodicity_report(const MetricGraph& mg, int trials, double horizon,
                                   std::uint64_t seed) {
  if (trials < 1) throw InvalidInput("at least one trial required");
  const size_t e_count = mg.lengths.size();
  const int states = 2 * static_cast<int>(e_count);

  ErgodicityReport rep;
  rep.trials = trials;
  rep.horizon = horizon;
  rep.occupation.assign(e_count, 0.0);
  rep.occupation_stderr.assign(e_count, 0.0);

  std::vector<std::vector<double>> per_trial;
  per_trial.reserve(static_cast<size_t>(trials));
  for (int i = 0; i < trials; ++i) {
    const Trajectory traj =
        simulate_geodesic(mg, i % states, 0.0, horizon, Rng::stream_seed(seed, static_cast<std::uint64_t>(i)));
    per_trial.push_back(edge_occupation(mg, traj));
  }

  for (const auto& frac : per_trial)
    for (size_t e = 0; e < e_count; ++e) rep.occupation[e] += frac[e] / trials;
  if (trials > 1) {
    for (size_t e = 0; e < e_count; ++e) {
      double ss = 0;
      for (const auto& frac : per_trial) {
        const double dev = frac[e] - rep.occupation[e];
        ss += dev * dev;
      }
      rep.occupation_stderr[e] = std::sqrt(ss / (static_cast<double>(trials) * (trials - 1)));
    }
  }

  const double total = mg.total_length();
  rep.expected.resize(e_count);
  rep.tv_distance = 0;
  for (size_t e = 0; e < e_count; ++e) {
    rep.expected[e] = mg.lengths[e] / total;
    rep.tv_distance += 0.5 * std::abs(rep.occupation[e] - rep.expected[e]);
  }

  const DirectedEdgeChain chain = transition_matrix(mg.graph);
  rep.gap = spectral_gap(chain);
  rep.non_ergodic = mg.graph.is_circle();
  return rep;
}

}  // namespace qgraph
