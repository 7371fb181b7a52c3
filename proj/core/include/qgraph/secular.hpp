#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qgraph/graph.hpp"

namespace qgraph {

/// Point on the torus (R/2piZ)^E, stored as unconstrained angles; every
/// consumer is 2pi-periodic in each coordinate.
struct TorusPoint {
  std::vector<double> theta;
};

/// The point [k * l] reached by the length line at wavenumber k.
TorusPoint torus_point(double k, const std::vector<double>& lengths);

/// Secular system of a graph: one continuity row per non-reference edge end
/// and one flux row per vertex, in the half-angle variables
/// xi_e = cos(theta_e/2), eta_e = sin(theta_e/2). Edge e is parametrized over
/// [-l_e/2, l_e/2] with the tail at -l_e/2, so an eigenfunction
/// a_e cos(k t) + b_e sin(k t) has
///   value           a_e xi_e -+ b_e eta_e   (tail / head with -, +)
///   outgoing deriv  a_e eta_e +- b_e xi_e   (divided by k)
/// at the two ends. The determinant is invariant under the half-angle branch
/// choice because flipping (xi_e, eta_e) negates both columns of edge e.
class SecularSystem {
 public:
  int edge_count() const { return edge_count_; }
  int dim() const { return 2 * edge_count_; }

  Eigen::MatrixXd matrix(const TorusPoint& p) const;
  double value(const TorusPoint& p) const;
  Eigen::VectorXd gradient_adjugate(const TorusPoint& p) const;
  Eigen::VectorXd gradient_finite_difference(const TorusPoint& p, double step) const;

  /// max |det| over a fixed probe sample of the torus; tolerance reference.
  double scale() const { return scale_; }

  /// max Frobenius norm of the matrix over the same probe sample; reference
  /// for singular-value tolerances. A same-point sigma_max is useless as a
  /// reference when the whole matrix vanishes at a root (the loop graph at
  /// its doubled eigenvalues), while the generic magnitude stays O(1).
  double matrix_scale() const { return matrix_scale_; }

 private:
  friend SecularSystem build_secular_system(const Graph& g);

  // Coefficients of one matrix entry pair: column 2e gets a_xi*xi + a_eta*eta,
  // column 2e+1 gets b_xi*xi + b_eta*eta.
  struct EntryCoeff {
    int row;
    double a_xi, a_eta, b_xi, b_eta;
  };

  int edge_count_ = 0;
  std::vector<std::vector<EntryCoeff>> per_edge_;
  double scale_ = 1.0;
  double matrix_scale_ = 1.0;
};

SecularSystem build_secular_system(const Graph& g);

double secular_value(const SecularSystem& sys, const TorusPoint& p);

enum class GradientMethod { adjugate, finite_difference };

struct GradientOptions {
  GradientMethod method = GradientMethod::adjugate;
  double fd_step = 1e-6;
};

/// d det / d theta_e via the adjugate form of Jacobi's formula, which stays
/// exact on the zero set where the matrix is singular; central finite
/// differences are available as an independent cross-check.
Eigen::VectorXd secular_gradient(const SecularSystem& sys, const TorusPoint& p,
                                 const GradientOptions& opts = {});

enum class PointClass { regular, singular, off_manifold };

struct ClassifyOptions {
  double value_tol = 1e-8;     // |det| gate, relative to scale()
  double gradient_tol = 1e-8;  // gradient norm gate, relative to scale()
};

PointClass classify_point(const SecularSystem& sys, const TorusPoint& p,
                          const ClassifyOptions& opts = {});

/// Hand-expanded determinants of the five minimal graphs, each equal to the
/// assembled determinant up to one nonzero constant factor.
double closed_form_delta(MinimalClass cls, const TorusPoint& p);

}  // namespace qgraph
