#include "qgraph/adjacency.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "qgraph/spectrum.hpp"

namespace qgraph {

std::vector<double> adjacency_spectrum(const Graph& g) {
  const int n = g.vertex_count();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    if (e.tail == e.head) {
      a(e.tail, e.tail) += 2.0;
    } else {
      a(e.tail, e.head) += 1.0;
      a(e.head, e.tail) += 1.0;
    }
  }
  Eigen::VectorXd inv_sqrt_d(n);
  for (int v = 0; v < n; ++v) inv_sqrt_d[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v)));
  const Eigen::MatrixXd sym = inv_sqrt_d.asDiagonal() * a * inv_sqrt_d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

int UnitSpectrum::total_multiplicity() const {
  int total = 0;
  for (const UnitLine& line : lines) total += line.multiplicity;
  return total;
}

UnitSpectrum unit_length_spectrum(const Graph& g) {
  const double pi = std::acos(-1.0);
  const std::vector<double> mu = adjacency_spectrum(g);
  const int b1 = g.betti_number();

  UnitSpectrum out;
  out.lines.push_back({0.0, 1 + b1, UnitLine::Source::zero_mode});
  out.lines.push_back(
      {pi, g.is_bipartite() ? b1 + 1 : b1 - 1, UnitLine::Source::pi_mode});

  // Interior eigenvalues, grouped within a numerical tolerance; the values
  // +-1 only contribute through the zero and pi rules above.
  size_t i = 0;
  while (i < mu.size()) {
    if (std::abs(mu[i]) >= 1.0 - 1e-9) {
      ++i;
      continue;
    }
    size_t j = i + 1;
    double sum = mu[i];
    while (j < mu.size() && mu[j] - mu[j - 1] < 1e-8 && std::abs(mu[j]) < 1.0 - 1e-9) {
      sum += mu[j];
      ++j;
    }
    const int count = static_cast<int>(j - i);
    const double k = std::acos(sum / count);
    out.lines.push_back({k, count, UnitLine::Source::adjacency});
    out.lines.push_back({2.0 * pi - k, count, UnitLine::Source::adjacency});
    i = j;
  }

  std::sort(out.lines.begin(), out.lines.end(),
            [](const UnitLine& x, const UnitLine& y) { return x.k < y.k; });

  const int total = out.total_multiplicity();
  if (total != 2 * g.edge_count())
    throw CountMismatch("unit-length multiplicities sum to " + std::to_string(total) +
                        ", expected " + std::to_string(2 * g.edge_count()));
  return out;
}

UnitCrossCheck cross_check_unit(const Graph& g, const SecularSystem& sys) {
  const double pi = std::acos(-1.0);
  const double k_top = 2.0 * pi;
  MetricGraph mg;
  mg.graph = g;
  mg.lengths.assign(static_cast<size_t>(g.edge_count()), 1.0);

  // Solve slightly past 2 pi so the periodic family's representative at 2 pi
  // sits strictly inside a scan cell; no other root lives in the margin.
  const SpectrumSlice slice = solve_spectrum(sys, mg, k_top + 0.01);

  std::vector<const EigenData*> roots;
  for (const EigenData& r : slice.roots)
    if (r.k <= k_top + 1e-6) roots.push_back(&r);

  const UnitSpectrum predicted = unit_length_spectrum(g);
  const double match_tol = 1e-4;

  UnitCrossCheck out;
  for (const UnitLine& line : predicted.lines) {
    if (line.multiplicity == 0) continue;
    UnitCrossCheck::Row row;
    row.predicted_k = line.source == UnitLine::Source::zero_mode ? k_top : line.k;
    row.predicted_multiplicity = line.multiplicity;
    row.source = line.source;
    row.solver_k = std::numeric_limits<double>::quiet_NaN();
    double best = std::numeric_limits<double>::infinity();
    for (const EigenData* r : roots) {
      const double d = std::abs(r->k - row.predicted_k);
      if (d < best) {
        best = d;
        row.solver_k = r->k;
      }
      if (d <= match_tol) row.solver_multiplicity += r->multiplicity;
    }
    out.max_deviation = std::max(out.max_deviation, best);
    out.rows.push_back(row);
  }
  for (const EigenData* r : roots) {
    double best = std::numeric_limits<double>::infinity();
    for (const UnitCrossCheck::Row& row : out.rows) best = std::min(best, std::abs(r->k - row.predicted_k));
    if (best > match_tol)
      out.unmatched.push_back(r->k);
    out.max_deviation = std::max(out.max_deviation, best);
  }
  return out;
}

}  // namespace qgraph
