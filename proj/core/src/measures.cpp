#include "qgraph/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qgraph/rng.hpp"

namespace qgraph {

EdgeMeasure mu_phi(const EigenData& root) {
  const int e_count = static_cast<int>(root.amplitudes.size()) / 2;
  EdgeMeasure mu;
  mu.m.resize(static_cast<size_t>(e_count));
  for (int e = 0; e < e_count; ++e) {
    const double a = root.amplitudes[2 * e];
    const double b = root.amplitudes[2 * e + 1];
    mu.m[static_cast<size_t>(e)] = a * a + b * b;
  }
  return mu;
}

ProbabilityEdgeMeasure normalize_measure(const MetricGraph& mg, const EdgeMeasure& mu) {
  if (mu.m.size() != mg.lengths.size())
    throw DimensionMismatch("measure has " + std::to_string(mu.m.size()) + " components, graph has " +
                            std::to_string(mg.lengths.size()) + " edges");
  double total = 0;
  for (size_t e = 0; e < mu.m.size(); ++e) total += mu.m[e] * mg.lengths[e];
  if (!(total > 0)) throw ZeroMeasure("total mass " + std::to_string(total) + " is not positive");
  ProbabilityEdgeMeasure p;
  p.m = mu.m;
  for (double& v : p.m) v /= total;
  return p;
}

EdgeMeasure gauss_map(const SecularSystem& sys, const TorusPoint& p, const GaussOptions& opts) {
  const PointClass cls = classify_point(sys, p, opts.classify);
  if (cls != PointClass::regular) {
    throw PointSingular(cls == PointClass::singular
                            ? "gradient vanishes on the zero set; no normal direction"
                            : "point is not on the zero set");
  }
  Eigen::VectorXd g = secular_gradient(sys, p);
  const double norm = g.norm();
  int peak = 0;
  g.cwiseAbs().maxCoeff(&peak);
  if (g[peak] < 0) g = -g;
  if (g.minCoeff() < -opts.cone_tol * norm)
    throw NormalNotInCone("oriented normal has a negative component beyond tolerance");
  g = g.cwiseMax(0.0);
  EdgeMeasure out;
  out.m.assign(g.data(), g.data() + g.size());
  return out;
}

std::optional<std::vector<int>> find_rational_relation(const std::vector<double>& lengths,
                                                       int coeff_bound) {
  const int e_count = static_cast<int>(lengths.size());
  if (e_count == 0 || e_count > 16 || coeff_bound < 1) return std::nullopt;

  // Shrink the bound so the exhaustive odometer stays near 1e7 combinations.
  int bound = coeff_bound;
  auto combos = [&](int b) {
    double c = 1;
    for (int i = 0; i < e_count; ++i) c *= 2.0 * b + 1.0;
    return c;
  };
  while (bound > 1 && combos(bound) > 2e7) --bound;
  if (combos(bound) > 2e7) return std::nullopt;

  double weight = 0;
  for (double l : lengths) weight += bound * std::abs(l);
  const double tol = 1e-9 * std::max(1.0, weight);

  std::vector<int> n(static_cast<size_t>(e_count), 0);
  std::optional<std::vector<int>> found;
  // Depth-first odometer with incremental partial sums; the first coordinate
  // stays nonnegative since a relation and its negation are the same.
  auto search = [&](auto&& self, int depth, double partial) -> bool {
    if (depth == e_count) {
      if (std::abs(partial) < tol && std::any_of(n.begin(), n.end(), [](int v) { return v != 0; })) {
        found = n;
        return true;
      }
      return false;
    }
    const int lo = depth == 0 ? 0 : -bound;
    for (int v = lo; v <= bound; ++v) {
      n[static_cast<size_t>(depth)] = v;
      if (self(self, depth + 1, partial + v * lengths[static_cast<size_t>(depth)])) return true;
    }
    n[static_cast<size_t>(depth)] = 0;
    return false;
  };
  search(search, 0, 0.0);
  if (found) {
    int g = 0;
    for (int v : *found) g = std::gcd(g, std::abs(v));
    if (g > 1)
      for (int& v : *found) v /= g;
  }
  return found;
}

namespace {

std::string relation_string(const std::vector<int>& n, const std::vector<double>& lengths) {
  std::ostringstream os;
  os << "lengths admit the integer relation ";
  bool first = true;
  for (size_t e = 0; e < n.size(); ++e) {
    if (n[e] == 0) continue;
    if (!first) os << " + ";
    os << n[e] << "*l_" << e;
    first = false;
  }
  os << " = 0 with l = (";
  for (size_t e = 0; e < lengths.size(); ++e) os << (e ? ", " : "") << lengths[e];
  os << ")";
  return os.str();
}

}  // namespace

BgAverage bg_average(
    const MetricGraph& mg, const SpectrumSlice& slice,
    const std::function<std::optional<Eigen::VectorXd>(const TorusPoint&, const EigenData&)>& f,
    int dim, const AverageOptions& opts) {
  if (dim < 1) throw InvalidInput("average dimension must be positive");
  if (!(slice.k_max > 0)) throw InvalidInput("spectrum slice has no positive k range");
  if (!opts.skip_rational_check) {
    if (auto rel = find_rational_relation(mg.lengths, opts.rational_coeff_bound))
      throw RationalLengths(relation_string(*rel, mg.lengths));
  }

  const int blocks = std::max(1, opts.blocks);
  const double block_width = slice.k_max / blocks;
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(dim, blocks);

  BgAverage out;
  for (const EigenData& root : slice.roots) {
    if (root.degenerate && !opts.include_degenerate) {
      out.skipped_degenerate += root.multiplicity;
      continue;
    }
    const TorusPoint tp = torus_point(root.k, mg.lengths);
    const std::optional<Eigen::VectorXd> v = f(tp, root);
    if (!v) {
      ++out.skipped_singular;
      continue;
    }
    if (v->size() != dim)
      throw DimensionMismatch("integrand returned " + std::to_string(v->size()) +
                              " components, expected " + std::to_string(dim));
    const int b = std::min(blocks - 1, static_cast<int>(root.k / block_width));
    sums.col(b) += root.multiplicity * *v;
    out.used += root.multiplicity;
  }

  out.block_estimates = sums / block_width;
  out.estimate = sums.rowwise().sum() / slice.k_max;
  out.std_error = Eigen::VectorXd::Zero(dim);
  if (blocks > 1) {
    for (int d = 0; d < dim; ++d) {
      double ss = 0;
      for (int b = 0; b < blocks; ++b) {
        const double dev = out.block_estimates(d, b) - out.estimate[d];
        ss += dev * dev;
      }
      out.std_error[d] = std::sqrt(ss / (static_cast<double>(blocks) * (blocks - 1)));
    }
  }
  return out;
}

BgAverage bg_average(const MetricGraph& mg, const std::function<double(const TorusPoint&)>& f,
                     double k_max, const AverageOptions& opts) {
  // Gate on the theorem hypothesis before paying for a solve; rationally
  // dependent lengths would also trip the solver's count check first and
  // mask the real problem.
  if (!opts.skip_rational_check) {
    if (auto rel = find_rational_relation(mg.lengths, opts.rational_coeff_bound))
      throw RationalLengths(relation_string(*rel, mg.lengths));
  }
  const SecularSystem sys = build_secular_system(mg.graph);
  const SpectrumSlice slice = solve_spectrum(sys, mg, k_max, opts.solve);
  auto wrap = [&f](const TorusPoint& tp, const EigenData&) -> std::optional<Eigen::VectorXd> {
    Eigen::VectorXd v(1);
    v[0] = f(tp);
    return v;
  };
  return bg_average(mg, slice, wrap, 1, opts);
}

namespace {

/// Roots sit within solver tolerance of the zero set but not exactly on it,
/// so pipeline evaluations get a looser on-manifold gate than the default.
GaussOptions pipeline_gauss_options() {
  GaussOptions go;
  go.classify.value_tol = 1e-5;
  return go;
}

}  // namespace

BgAverage liouville_average(const SecularSystem& sys, const MetricGraph& mg,
                            const SpectrumSlice& slice, const AverageOptions& opts) {
  AverageOptions o = opts;
  o.include_degenerate = false;
  const GaussOptions go = pipeline_gauss_options();
  const int e_count = mg.graph.edge_count();
  auto f = [&](const TorusPoint& tp, const EigenData&) -> std::optional<Eigen::VectorXd> {
    EdgeMeasure g;
    try {
      g = gauss_map(sys, tp, go);
    } catch (const PointSingular&) {
      return std::nullopt;
    } catch (const NormalNotInCone&) {
      return std::nullopt;
    }
    const ProbabilityEdgeMeasure p = normalize_measure(mg, g);
    return Eigen::Map<const Eigen::VectorXd>(p.m.data(), static_cast<Eigen::Index>(p.m.size()));
  };
  return bg_average(mg, slice, f, e_count, o);
}

DensityEstimate density_bound(
    const SecularSystem& sys, const MetricGraph& mg, const SpectrumSlice& slice,
    const std::function<bool(const ProbabilityEdgeMeasure&)>& membership,
    const std::function<double(const ProbabilityEdgeMeasure&)>* margin,
    const DensityOptions& opts) {
  AverageOptions o = opts.average;
  o.include_degenerate = false;
  const GaussOptions go = pipeline_gauss_options();
  auto f = [&](const TorusPoint& tp, const EigenData&) -> std::optional<Eigen::VectorXd> {
    EdgeMeasure g;
    try {
      g = gauss_map(sys, tp, go);
    } catch (const PointSingular&) {
      return std::nullopt;
    } catch (const NormalNotInCone&) {
      return std::nullopt;
    }
    const ProbabilityEdgeMeasure p = normalize_measure(mg, g);
    Eigen::VectorXd v(2);
    v[0] = membership(p) ? 1.0 : 0.0;
    v[1] = margin ? std::clamp(0.5 + (*margin)(p) / opts.mollify_eps, 0.0, 1.0) : v[0];
    return v;
  };
  const BgAverage avg = bg_average(mg, slice, f, 2, o);
  DensityEstimate out;
  out.density = avg.estimate[0];
  out.density_std_error = avg.std_error[0];
  out.mollified = avg.estimate[1];
  out.mollified_std_error = avg.std_error[1];
  out.used = avg.used;
  out.skipped_degenerate = avg.skipped_degenerate;
  out.skipped_singular = avg.skipped_singular;
  return out;
}

Census semiclassical_census(const MetricGraph& mg, const SpectrumSlice& slice,
                            const CensusOptions& opts) {
  struct Bucket {
    std::vector<double> seed;
    std::vector<double> sum;
    int count = 0;
  };
  std::vector<Bucket> buckets;
  Census out;
  const size_t e_count = mg.lengths.size();

  for (const EigenData& root : slice.roots) {
    if (root.degenerate) {
      out.skipped_degenerate += root.multiplicity;
      continue;
    }
    const ProbabilityEdgeMeasure p = normalize_measure(mg, mu_phi(root));
    const int w = root.multiplicity;
    bool placed = false;
    for (Bucket& b : buckets) {
      double dist = 0;
      for (size_t e = 0; e < e_count; ++e) dist = std::max(dist, std::abs(p.m[e] - b.seed[e]));
      if (dist <= opts.cluster_tol) {
        for (size_t e = 0; e < e_count; ++e) b.sum[e] += w * p.m[e];
        b.count += w;
        placed = true;
        break;
      }
    }
    if (!placed) {
      Bucket b;
      b.seed = p.m;
      b.sum = p.m;
      for (double& v : b.sum) v *= w;
      b.count = w;
      buckets.push_back(std::move(b));
    }
    out.total_used += w;
  }

  for (const Bucket& b : buckets) {
    CensusCluster c;
    c.center.m.resize(e_count);
    for (size_t e = 0; e < e_count; ++e) c.center.m[e] = b.sum[e] / b.count;
    c.count = b.count;
    c.relative_density = out.total_used > 0 ? static_cast<double>(b.count) / out.total_used : 0.0;
    int supported = 0;
    for (double v : c.center.m)
      if (v > opts.support_tol) ++supported;
    c.is_scar = supported < static_cast<int>(e_count);
    out.clusters.push_back(std::move(c));
  }
  return out;
}

namespace {

/// Shared validation: the sequences must describe a walk in g with distinct
/// edges, closed for a cycle, with degree-1 endpoints for a path.
void check_support(const Graph& g, const ScarSupport& support) {
  const size_t m = support.edge_seq.size();
  if (m == 0) throw InvalidSupport("support has no edges");
  if (support.vertex_seq.size() != m + 1)
    throw InvalidSupport("vertex sequence must have one more entry than the edge sequence");
  std::vector<int> seen = support.edge_seq;
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw InvalidSupport("support repeats an edge");
  for (size_t j = 0; j < m; ++j) {
    const int e = support.edge_seq[j];
    if (e < 0 || e >= g.edge_count()) throw InvalidSupport("edge id out of range");
    const Edge& ed = g.edge(e);
    const int u = support.vertex_seq[j];
    const int v = support.vertex_seq[j + 1];
    const bool forward = ed.tail == u && ed.head == v;
    const bool backward = ed.tail == v && ed.head == u;
    if (!forward && !backward)
      throw InvalidSupport("edge " + std::to_string(e) + " does not join consecutive vertices");
  }
  if (support.kind == ScarSupport::Kind::cycle) {
    if (support.vertex_seq.front() != support.vertex_seq.back())
      throw InvalidSupport("cycle support must return to its starting vertex");
  } else {
    if (g.degree(support.vertex_seq.front()) != 1 || g.degree(support.vertex_seq.back()) != 1)
      throw InvalidSupport("path support must end at degree-1 vertices");
  }
}

/// Traversal direction of support edge j relative to the edge's own
/// orientation; +1 for loops, where both choices give a valid profile.
double traversal_dir(const Graph& g, const ScarSupport& support, size_t j) {
  const Edge& ed = g.edge(support.edge_seq[j]);
  if (ed.tail == ed.head) return 1.0;
  return ed.tail == support.vertex_seq[j] ? 1.0 : -1.0;
}

}  // namespace

ScarConstruction scar_metric(const Graph& g, const ScarSupport& support,
                             const ScarMetricOptions& opts) {
  check_support(g, support);
  const size_t m = support.edge_seq.size();

  ScarConstruction out;
  out.metric.graph = g;
  out.metric.lengths.assign(static_cast<size_t>(g.edge_count()), 0.0);

  std::vector<bool> on_support(static_cast<size_t>(g.edge_count()), false);
  for (int e : support.edge_seq) on_support[static_cast<size_t>(e)] = true;

  if (support.kind == ScarSupport::Kind::cycle) {
    // sin(2 pi s) on a unit-length cycle vanishes at every vertex and its
    // derivative cancels around each one.
    for (int e : support.edge_seq) out.metric.lengths[static_cast<size_t>(e)] = 1.0;
    out.k = 2.0 * std::acos(-1.0);
  } else {
    // cos(pi s) on lengths (1/2, 1, ..., 1, 1/2): interior vertices land on
    // half-integers where the cosine vanishes, endpoints on integers where
    // its derivative vanishes. A single edge keeps length 1.
    for (size_t j = 0; j < m; ++j) {
      const bool endpoint = j == 0 || j + 1 == m;
      out.metric.lengths[static_cast<size_t>(support.edge_seq[j])] = (m > 1 && endpoint) ? 0.5 : 1.0;
    }
    out.k = std::acos(-1.0);
  }

  Rng rng(opts.seed);
  for (int e = 0; e < g.edge_count(); ++e) {
    if (!on_support[static_cast<size_t>(e)])
      out.metric.lengths[static_cast<size_t>(e)] = opts.off_base + opts.off_spread * rng.uniform();
  }
  return out;
}

ScarCheck verify_scar(const MetricGraph& mg, const ScarSupport& support, double k) {
  check_support(mg.graph, support);
  const size_t m = support.edge_seq.size();
  const int dim = 2 * mg.graph.edge_count();

  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  double arc = 0;
  for (size_t j = 0; j < m; ++j) {
    const int e = support.edge_seq[j];
    const double l = mg.lengths[static_cast<size_t>(e)];
    const double center = arc + 0.5 * l;
    const double dir = traversal_dir(mg.graph, support, j);
    // Profile f(s) in arc length restricted to edge e, rewritten in the
    // edge's own centered coordinate: s = center + dir * t.
    if (support.kind == ScarSupport::Kind::cycle) {
      v[2 * e] = std::sin(k * center);
      v[2 * e + 1] = dir * std::cos(k * center);
    } else {
      v[2 * e] = std::cos(k * center);
      v[2 * e + 1] = -dir * std::sin(k * center);
    }
    arc += l;
  }

  const SecularSystem sys = build_secular_system(mg.graph);
  const Eigen::MatrixXd mat = sys.matrix(torus_point(k, mg.lengths));
  ScarCheck out;
  out.amplitudes = v;
  out.residual = (mat * v).norm() / v.norm();
  return out;
}

}  // namespace qgraph
