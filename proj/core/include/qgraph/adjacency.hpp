#pragma once

#include "qgraph/secular.hpp"

namespace qgraph {

/// Eigenvalues, in ascending order, of the degree-normalized adjacency
/// operator A f(i) = (1/d_i) sum over neighbors of f, computed on the
/// symmetrized form D^{-1/2} A D^{-1/2}. A loop adds 2 to its vertex's
/// degree and 2 to the diagonal adjacency count, so the constant function
/// always realizes the eigenvalue 1.
std::vector<double> adjacency_spectrum(const Graph& g);

/// One predicted line of the unit-length quantum graph spectrum on (0, 2pi]
/// folded to [0, 2pi): k = 0 stands for the periodic family 2pi n.
struct UnitLine {
  enum class Source { adjacency, zero_mode, pi_mode };
  double k = 0;
  int multiplicity = 0;
  Source source = Source::adjacency;
};

struct UnitSpectrum {
  std::vector<UnitLine> lines;  // ascending k; the pi line is kept even at multiplicity 0
  int total_multiplicity() const;
};

/// Closed-form spectrum when every edge has length 1: each adjacency
/// eigenvalue mu with |mu| < 1 yields k = acos(mu) and 2pi - acos(mu) with
/// mu's multiplicity; k = 0 carries 1 + b1; k = pi carries b1 + 1 when the
/// graph is bipartite and b1 - 1 otherwise. The multiplicities must sum to
/// 2 #E, enforced as an internal consistency guard.
UnitSpectrum unit_length_spectrum(const Graph& g);

struct UnitCrossCheck {
  struct Row {
    double predicted_k = 0;  // the zero mode appears at 2pi, where the solver sees it
    int predicted_multiplicity = 0;
    UnitLine::Source source = UnitLine::Source::adjacency;
    double solver_k = 0;         // nearest root found by the secular solver
    int solver_multiplicity = 0; // summed over solver roots within match_tol
  };
  std::vector<Row> rows;
  /// Solver roots not matched by any predicted line (empty when consistent).
  std::vector<double> unmatched;
  double max_deviation = 0;
};

/// Solves the secular problem with unit lengths over (0, 2pi] and compares
/// root locations against the closed form; multiplicities are reported side
/// by side but only locations enter the deviation.
UnitCrossCheck cross_check_unit(const Graph& g, const SecularSystem& sys);

}  // namespace qgraph
