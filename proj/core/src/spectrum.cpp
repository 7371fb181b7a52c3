#include "qgraph/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qgraph/parallel.hpp"

namespace qgraph {

namespace {

struct Candidate {
  double k;
  int multiplicity;
};

class Solver {
 public:
  Solver(const SecularSystem& sys, const MetricGraph& mg, double k_max, const SolveOptions& opts)
      : sys_(sys), mg_(mg), k_max_(k_max), opts_(opts) {
    if (!(k_max > 0)) throw InvalidInput("k_max must be positive");
    k_tol_ = opts_.k_tol > 0 ? opts_.k_tol : 1e-12 * k_max;
    noise_floor_ = 1e-13 * sys_.scale();
  }

  double g(double k) const { return sys_.value(torus_point(k, mg_.lengths)); }

  double gp(double k) const {
    const Eigen::VectorXd grad = sys_.gradient_adjugate(torus_point(k, mg_.lengths));
    double s = 0;
    for (int e = 0; e < sys_.edge_count(); ++e) s += grad(e) * mg_.lengths[static_cast<size_t>(e)];
    return s;
  }

  double sigma_min(double k) const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys_.matrix(torus_point(k, mg_.lengths)));
    return svd.singularValues()(sys_.dim() - 1);
  }

  SpectrumSlice run() {
    const double L = mg_.total_length();
    const int ppr = std::max(4, opts_.scan_points_per_expected_root);
    // Scan at the fine step directly: a cell with a sign change can hide an
    // odd cluster of roots, so cells must be narrow enough that clusters
    // below one cell width are genuinely rare before the dip logic takes
    // over for them.
    const double h = M_PI / (L * ppr * std::max(8, opts_.refine_factor));
    const auto n = static_cast<std::size_t>(std::ceil(k_max_ / h)) + 1;

    std::vector<double> ks(n), vals(n);
    for (std::size_t i = 0; i < n; ++i) ks[i] = std::min(static_cast<double>(i + 1) * h, k_max_);
    ks.back() = k_max_;
    parallel_for(n, opts_.threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) vals[i] = g(ks[i]);
    });

    // Sign-change brackets on the coarse grid.
    std::vector<std::pair<double, double>> brackets;
    std::vector<char> cell_has_bracket(n, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (ks[i + 1] <= ks[i]) continue;
      if (vals[i] == 0.0) {
        candidates_.push_back(Candidate{ks[i], 1});
        cell_has_bracket[i] = 1;
      } else if (vals[i] * vals[i + 1] < 0) {
        brackets.emplace_back(ks[i], ks[i + 1]);
        cell_has_bracket[i] = 1;
      }
    }

    std::vector<Candidate> bracket_roots(brackets.size());
    parallel_for(brackets.size(), opts_.threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i)
        bracket_roots[i] = bisect(brackets[i].first, brackets[i].second);
    });
    candidates_.insert(candidates_.end(), bracket_roots.begin(), bracket_roots.end());

    // Local minima of |det| without an adjacent sign change hide even-order
    // zeros or unresolved close pairs; zoom into them.
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double a = std::abs(vals[i - 1]), b = std::abs(vals[i]), c = std::abs(vals[i + 1]);
      if (b > a || b > c) continue;
      if (cell_has_bracket[i - 1] || cell_has_bracket[i] ||
          (i + 1 < cell_has_bracket.size() && cell_has_bracket[i + 1]))
        continue;
      refine_dip(ks[i - 1], ks[i + 1], b, 0);
    }

    std::sort(candidates_.begin(), candidates_.end(),
              [](const Candidate& x, const Candidate& y) { return x.k < y.k; });

    // Merge duplicates produced by overlapping refinement windows. Distinct
    // roots of the graphs handled here are separated far beyond this radius.
    const double merge_tol = std::max(20 * k_tol_, 1e-10 * k_max_);
    std::vector<Candidate> merged;
    for (const Candidate& cand : candidates_) {
      if (cand.k <= merge_tol || cand.k > k_max_ + k_tol_) continue;
      if (!merged.empty() && cand.k - merged.back().k < merge_tol) {
        merged.back().multiplicity = std::max(merged.back().multiplicity, cand.multiplicity);
        continue;
      }
      merged.push_back(cand);
    }

    SpectrumSlice slice;
    slice.k_max = k_max_;
    slice.roots.resize(merged.size());
    EigenfunctionOptions eopts;
    eopts.degeneracy_tol = opts_.degeneracy_tol;
    parallel_for(merged.size(), opts_.threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        slice.roots[i] = eigenfunction_at(sys_, mg_, merged[i].k, eopts);
        slice.roots[i].multiplicity = std::max(slice.roots[i].multiplicity, merged[i].multiplicity);
      }
    });
    for (const EigenData& r : slice.roots) slice.count += r.multiplicity;

    if (opts_.check_weyl) {
      const double expected = k_max_ * L / M_PI;
      if (expected >= 50 && std::abs(slice.count / expected - 1.0) > 0.2)
        throw StepTooCoarse("found " + std::to_string(slice.count) + " roots where about " +
                            std::to_string(expected) + " were expected; increase scan resolution");
    }
    return slice;
  }

 private:
  Candidate bisect(double a, double b) {
    double fa = g(a), fb = g(b);
    for (int it = 0; it < 200; ++it) {
      if (b - a <= k_tol_) break;
      // Plateau below the evaluation noise floor: signs are meaningless, the
      // zero has even local order or several close roots; polish on the
      // smallest singular value instead.
      if (std::abs(fa) < noise_floor_ && std::abs(fb) < noise_floor_)
        return Candidate{polish_sigma(a, b), 1};
      const double m = 0.5 * (a + b);
      const double fm = g(m);
      if (fm == 0.0) return Candidate{m, 1};
      if ((fa < 0) != (fm < 0)) {
        b = m;
        fb = fm;
      } else {
        a = m;
        fa = fm;
      }
    }
    return Candidate{0.5 * (a + b), 1};
  }

  double polish_sigma(double a, double b) {
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = sigma_min(c), fd = sigma_min(d);
    for (int it = 0; it < 300 && (b - a) > 0.25 * k_tol_; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = sigma_min(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = sigma_min(d);
      }
    }
    return 0.5 * (a + b);
  }

  void refine_dip(double lo, double hi, double entry_min, int depth) {
    const int n = std::max(8, opts_.refine_factor);
    std::vector<double> ks(static_cast<size_t>(n) + 1), vals(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
      ks[static_cast<size_t>(i)] = lo + (hi - lo) * i / n;
      vals[static_cast<size_t>(i)] = g(ks[static_cast<size_t>(i)]);
    }
    bool found = false;
    for (int i = 0; i < n; ++i) {
      if (vals[static_cast<size_t>(i)] == 0.0) {
        candidates_.push_back(Candidate{ks[static_cast<size_t>(i)], 1});
        found = true;
      } else if (vals[static_cast<size_t>(i)] * vals[static_cast<size_t>(i) + 1] < 0) {
        candidates_.push_back(bisect(ks[static_cast<size_t>(i)], ks[static_cast<size_t>(i) + 1]));
        found = true;
      }
    }
    if (found) return;

    int jmin = 0;
    for (int i = 1; i <= n; ++i)
      if (std::abs(vals[static_cast<size_t>(i)]) < std::abs(vals[static_cast<size_t>(jmin)])) jmin = i;
    const double vmin = std::abs(vals[static_cast<size_t>(jmin)]);
    const double wa = ks[static_cast<size_t>(std::max(0, jmin - 1))];
    const double wb = ks[static_cast<size_t>(std::min(n, jmin + 1))];

    if (depth < opts_.max_dip_depth && vmin < 0.25 * entry_min && vmin > noise_floor_) {
      refine_dip(wa, wb, vmin, depth + 1);
      return;
    }
    tangential_attempt(wa, wb);
  }

  // Even-order zero: locate the extremum as a sign change of d(det)/dk, then
  // require the matrix to be singular there.
  void tangential_attempt(double wa, double wb) {
    const int m = 8;
    double k_star = 0.5 * (wa + wb);
    bool located = false;
    double prev_k = wa, prev_gp = gp(wa);
    for (int i = 1; i <= m; ++i) {
      const double k = wa + (wb - wa) * i / m;
      const double d = gp(k);
      if (prev_gp * d < 0) {
        double a = prev_k, b = k, fa = prev_gp;
        for (int it = 0; it < 200 && b - a > 0.25 * k_tol_; ++it) {
          const double mid = 0.5 * (a + b);
          const double fm = gp(mid);
          if (fm == 0.0) {
            a = b = mid;
            break;
          }
          if ((fa < 0) != (fm < 0)) {
            b = mid;
          } else {
            a = mid;
            fa = fm;
          }
        }
        k_star = 0.5 * (a + b);
        located = true;
        break;
      }
      prev_k = k;
      prev_gp = d;
    }
    if (!located) k_star = polish_sigma(wa, wb);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys_.matrix(torus_point(k_star, mg_.lengths)));
    const auto& sig = svd.singularValues();
    // Gate sigma_min against the generic matrix magnitude, not the same-point
    // sigma_max: on a loop every singular value vanishes together at the root.
    if (sig(sys_.dim() - 1) > 1e-7 * sys_.matrix_scale()) return;  // dip without an actual zero
    if (std::abs(g(k_star)) > opts_.value_tol * sys_.scale()) return;
    candidates_.push_back(Candidate{k_star, 2});
  }

  const SecularSystem& sys_;
  const MetricGraph& mg_;
  double k_max_;
  SolveOptions opts_;
  double k_tol_ = 0;
  double noise_floor_ = 0;
  std::vector<Candidate> candidates_;
};

}  // namespace

SpectrumSlice solve_spectrum(const SecularSystem& sys, const MetricGraph& mg, double k_max,
                             const SolveOptions& opts) {
  if (sys.edge_count() != mg.graph.edge_count())
    throw DimensionMismatch("secular system and metric graph disagree on edge count");
  Solver solver(sys, mg, k_max, opts);
  return solver.run();
}

SpectrumSlice solve_spectrum(const MetricGraph& mg, double k_max, const SolveOptions& opts) {
  const SecularSystem sys = build_secular_system(mg.graph);
  return solve_spectrum(sys, mg, k_max, opts);
}

EigenData eigenfunction_at(const SecularSystem& sys, const MetricGraph& mg, double k,
                           const EigenfunctionOptions& opts) {
  if (!(k > 0)) throw InvalidInput("eigenfunction_at needs k > 0");
  const TorusPoint p = torus_point(k, mg.lengths);
  const double det = sys.value(p);
  if (std::abs(det) > opts.on_manifold_tol * sys.scale())
    throw NotOnManifold("det = " + std::to_string(det) + " at k = " + std::to_string(k));

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.matrix(p), Eigen::ComputeFullV);
  const auto& sig = svd.singularValues();
  const int n = sys.dim();
  // Singular values are measured against the generic matrix magnitude; the
  // same-point sigma_max collapses with the rest on a loop at its doubled
  // roots, where the kernel is the whole space.
  const double m_ref = sys.matrix_scale();
  if (sig(n - 1) > opts.null_space_tol * m_ref)
    throw NullSpaceIllConditioned("no kernel direction at k = " + std::to_string(k));

  EigenData out;
  out.k = k;
  out.residual = sig(n - 1);
  out.degenerate = n >= 2 && sig(n - 2) < opts.degeneracy_tol * m_ref;
  out.amplitudes = svd.matrixV().col(n - 1);

  // Exact squared L2 norm: sum over edges of
  // (a^2+b^2) l/2 + (a^2-b^2) sin(k l)/(2k).
  double norm2 = 0;
  for (int e = 0; e < sys.edge_count(); ++e) {
    const double a = out.amplitudes(2 * e), b = out.amplitudes(2 * e + 1);
    const double l = mg.lengths[static_cast<size_t>(e)];
    norm2 += (a * a + b * b) * l / 2 + (a * a - b * b) * std::sin(k * l) / (2 * k);
  }
  if (!(norm2 > 0)) throw NullSpaceIllConditioned("kernel vector has zero L2 norm");
  out.amplitudes /= std::sqrt(norm2);

  const double peak = out.amplitudes.cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i) {
    if (std::abs(out.amplitudes(i)) > 1e-8 * peak) {
      if (out.amplitudes(i) < 0) out.amplitudes = -out.amplitudes;
      break;
    }
  }
  return out;
}

double eigenvalue_derivative(const MetricGraph& mg, const EigenData& root, int edge) {
  if (edge < 0 || edge >= mg.graph.edge_count())
    throw InvalidInput("eigenvalue_derivative: edge " + std::to_string(edge));
  if (root.degenerate)
    throw DegenerateEigenvalue("length derivative undefined at a degenerate eigenvalue");
  const double a = root.amplitudes(2 * edge), b = root.amplitudes(2 * edge + 1);
  const double lambda = root.k * root.k;
  return -lambda * (a * a + b * b);
}

double weyl_ratio(const SpectrumSlice& slice, const MetricGraph& mg) {
  return slice.count * M_PI / (slice.k_max * mg.total_length());
}

WindowCounts window_zero_counts(const SpectrumSlice& slice, double window) {
  WindowCounts wc;
  wc.window = window;
  std::vector<double> ks;
  for (const EigenData& r : slice.roots)
    for (int m = 0; m < r.multiplicity; ++m) ks.push_back(r.k);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto end = std::upper_bound(ks.begin(), ks.end(), ks[i] + window);
    const int c = static_cast<int>(end - (ks.begin() + static_cast<std::ptrdiff_t>(i)));
    wc.max_count = std::max(wc.max_count, c);
    wc.histogram[c] += 1;
  }
  return wc;
}

}  // namespace qgraph
