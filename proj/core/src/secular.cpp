#include "qgraph/secular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "qgraph/rng.hpp"

namespace qgraph {

TorusPoint torus_point(double k, const std::vector<double>& lengths) {
  TorusPoint p;
  p.theta.reserve(lengths.size());
  for (double l : lengths) p.theta.push_back(k * l);
  return p;
}

namespace {

struct End {
  int edge;
  bool at_head;
};

// value at an end, as (coeff of a in xi, in eta, coeff of b in xi, in eta)
inline std::array<double, 4> value_coeffs(bool at_head) {
  return at_head ? std::array<double, 4>{1, 0, 0, 1} : std::array<double, 4>{1, 0, 0, -1};
}

inline std::array<double, 4> flux_coeffs(bool at_head) {
  return at_head ? std::array<double, 4>{0, 1, -1, 0} : std::array<double, 4>{0, 1, 1, 0};
}

}  // namespace

SecularSystem build_secular_system(const Graph& g) {
  SecularSystem sys;
  sys.edge_count_ = g.edge_count();
  sys.per_edge_.assign(static_cast<size_t>(g.edge_count()), {});

  std::vector<std::vector<End>> ends(static_cast<size_t>(g.vertex_count()));
  for (int e = 0; e < g.edge_count(); ++e) {
    ends[static_cast<size_t>(g.edge(e).tail)].push_back(End{e, false});
    ends[static_cast<size_t>(g.edge(e).head)].push_back(End{e, true});
  }
  // Reference end per vertex: lowest edge index, tail before head. The push
  // order above already delivers that after a stable sort on edge id.
  for (auto& v : ends)
    std::stable_sort(v.begin(), v.end(), [](const End& a, const End& b) { return a.edge < b.edge; });

  int row = 0;
  auto add = [&sys](int r, int e, std::array<double, 4> c, double sign) {
    auto& list = sys.per_edge_[static_cast<size_t>(e)];
    for (auto& ec : list) {
      if (ec.row == r) {
        ec.a_xi += sign * c[0];
        ec.a_eta += sign * c[1];
        ec.b_xi += sign * c[2];
        ec.b_eta += sign * c[3];
        return;
      }
    }
    list.push_back(SecularSystem::EntryCoeff{r, sign * c[0], sign * c[1], sign * c[2], sign * c[3]});
  };

  for (int v = 0; v < g.vertex_count(); ++v) {
    const auto& vend = ends[static_cast<size_t>(v)];
    for (size_t i = 1; i < vend.size(); ++i) {
      add(row, vend[i].edge, value_coeffs(vend[i].at_head), +1);
      add(row, vend[0].edge, value_coeffs(vend[0].at_head), -1);
      ++row;
    }
    for (const End& en : vend) add(row, en.edge, flux_coeffs(en.at_head), +1);
    ++row;
  }

  // Probe sample fixing the tolerance scales for this system.
  const int n = sys.dim() <= 12 ? 16384 : 4096;
  Rng rng(0x5ca1eULL);
  double mx = 0, frob = 0;
  TorusPoint p;
  p.theta.resize(static_cast<size_t>(sys.edge_count_));
  for (int i = 0; i < n; ++i) {
    for (auto& th : p.theta) th = 2.0 * M_PI * rng.uniform();
    const Eigen::MatrixXd m = sys.matrix(p);
    mx = std::max(mx, std::abs(m.partialPivLu().determinant()));
    frob = std::max(frob, m.norm());
  }
  sys.scale_ = mx > 0 ? mx : 1.0;
  sys.matrix_scale_ = frob > 0 ? frob : 1.0;
  return sys;
}

Eigen::MatrixXd SecularSystem::matrix(const TorusPoint& p) const {
  if (static_cast<int>(p.theta.size()) != edge_count_)
    throw DimensionMismatch("point has " + std::to_string(p.theta.size()) + " angles, system has " +
                            std::to_string(edge_count_) + " edges");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
  for (int e = 0; e < edge_count_; ++e) {
    const double xi = std::cos(p.theta[static_cast<size_t>(e)] / 2);
    const double eta = std::sin(p.theta[static_cast<size_t>(e)] / 2);
    for (const EntryCoeff& c : per_edge_[static_cast<size_t>(e)]) {
      m(c.row, 2 * e) += c.a_xi * xi + c.a_eta * eta;
      m(c.row, 2 * e + 1) += c.b_xi * xi + c.b_eta * eta;
    }
  }
  return m;
}

double SecularSystem::value(const TorusPoint& p) const {
  return matrix(p).partialPivLu().determinant();
}

Eigen::VectorXd SecularSystem::gradient_adjugate(const TorusPoint& p) const {
  const Eigen::MatrixXd m = matrix(p);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sig = svd.singularValues();
  const int n = dim();

  // adj(M) = det(U) det(V) * V diag(prod_{j != i} sigma_j) U^T; prefix and
  // suffix products keep this exact when some sigma vanish.
  Eigen::VectorXd pre(n + 1), suf(n + 1);
  pre(0) = 1;
  for (int i = 0; i < n; ++i) pre(i + 1) = pre(i) * sig(i);
  suf(n) = 1;
  for (int i = n - 1; i >= 0; --i) suf(i) = suf(i + 1) * sig(i);
  Eigen::VectorXd cof(n);
  for (int i = 0; i < n; ++i) cof(i) = pre(i) * suf(i + 1);

  const double sign_uv = svd.matrixU().determinant() * svd.matrixV().determinant();
  const Eigen::MatrixXd adj =
      sign_uv * svd.matrixV() * cof.asDiagonal() * svd.matrixU().transpose();

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(edge_count_);
  for (int e = 0; e < edge_count_; ++e) {
    const double xi = std::cos(p.theta[static_cast<size_t>(e)] / 2);
    const double eta = std::sin(p.theta[static_cast<size_t>(e)] / 2);
    double acc = 0;
    for (const EntryCoeff& c : per_edge_[static_cast<size_t>(e)]) {
      const double da = 0.5 * (-c.a_xi * eta + c.a_eta * xi);
      const double db = 0.5 * (-c.b_xi * eta + c.b_eta * xi);
      acc += adj(2 * e, c.row) * da + adj(2 * e + 1, c.row) * db;
    }
    grad(e) = acc;
  }
  return grad;
}

Eigen::VectorXd SecularSystem::gradient_finite_difference(const TorusPoint& p, double step) const {
  Eigen::VectorXd grad(edge_count_);
  TorusPoint q = p;
  for (int e = 0; e < edge_count_; ++e) {
    q.theta[static_cast<size_t>(e)] = p.theta[static_cast<size_t>(e)] + step;
    const double hi = value(q);
    q.theta[static_cast<size_t>(e)] = p.theta[static_cast<size_t>(e)] - step;
    const double lo = value(q);
    q.theta[static_cast<size_t>(e)] = p.theta[static_cast<size_t>(e)];
    grad(e) = (hi - lo) / (2 * step);
  }
  return grad;
}

double secular_value(const SecularSystem& sys, const TorusPoint& p) { return sys.value(p); }

Eigen::VectorXd secular_gradient(const SecularSystem& sys, const TorusPoint& p,
                                 const GradientOptions& opts) {
  if (opts.method == GradientMethod::finite_difference)
    return sys.gradient_finite_difference(p, opts.fd_step);
  Eigen::VectorXd g = sys.gradient_adjugate(p);
  if (!g.allFinite()) g = sys.gradient_finite_difference(p, opts.fd_step);
  return g;
}

PointClass classify_point(const SecularSystem& sys, const TorusPoint& p,
                          const ClassifyOptions& opts) {
  if (std::abs(sys.value(p)) > opts.value_tol * sys.scale()) return PointClass::off_manifold;
  const Eigen::VectorXd g = secular_gradient(sys, p);
  if (g.norm() > opts.gradient_tol * sys.scale()) return PointClass::regular;
  return PointClass::singular;
}

double closed_form_delta(MinimalClass cls, const TorusPoint& p) {
  const auto& th = p.theta;
  auto need = [&](size_t n) {
    if (th.size() != n)
      throw DimensionMismatch("closed form expects " + std::to_string(n) + " angles, got " +
                              std::to_string(th.size()));
  };
  switch (cls) {
    case MinimalClass::star3: {
      need(3);
      const double x1 = std::cos(th[0]), y1 = std::sin(th[0]);
      const double x2 = std::cos(th[1]), y2 = std::sin(th[1]);
      const double x3 = std::cos(th[2]), y3 = std::sin(th[2]);
      return x1 * x2 * y3 + x2 * x3 * y1 + x3 * x1 * y2;
    }
    case MinimalClass::eight:
      need(2);
      return std::sin(th[0] / 2) * std::sin(th[1] / 2) * std::sin((th[0] + th[1]) / 2);
    case MinimalClass::cherry:
      // edge 0 is the loop, edge 1 the pendant edge
      need(2);
      return std::sin(th[0]) * std::sin(th[1]) + 2 * (1 - std::cos(th[0])) * std::cos(th[1]);
    case MinimalClass::circle:
      need(1);
      return 1 - std::cos(th[0]);
    case MinimalClass::interval:
      need(1);
      return -std::sin(th[0]);
  }
  throw InvalidInput("unknown minimal class");
}

}  // namespace qgraph
