#include <cmath>
#include <doctest.h>
#include <qgraph/rng.hpp>
#include <qgraph/secular.hpp>
#include <qgraph/spectrum.hpp>

#include "test_util.hpp"

using namespace qgraph;
using fixtures::kPi;

namespace {

TorusPoint random_point(Rng& rng, int dim) {
  TorusPoint p;
  for (int e = 0; e < dim; ++e) p.theta.push_back(2 * kPi * rng.uniform());
  return p;
}

// Hand-expanded determinants, written independently of the library versions.
double star3_delta(const TorusPoint& p) {
  const double x1 = std::cos(p.theta[0]), y1 = std::sin(p.theta[0]);
  const double x2 = std::cos(p.theta[1]), y2 = std::sin(p.theta[1]);
  const double x3 = std::cos(p.theta[2]), y3 = std::sin(p.theta[2]);
  return x1 * x2 * y3 + x2 * x3 * y1 + x3 * x1 * y2;
}

double eight_delta(const TorusPoint& p) {
  return std::sin(p.theta[0] / 2) * std::sin(p.theta[1] / 2) *
         std::sin((p.theta[0] + p.theta[1]) / 2);
}

double cherry_delta(const TorusPoint& p) {
  const double t1 = p.theta[0], t2 = p.theta[1];
  return std::sin(t1) * std::sin(t2) + 2 * (1 - std::cos(t1)) * std::cos(t2);
}

/// Ratio of sys.value to `form` stays one constant over random points.
void check_proportional(const MetricGraph& mg, double (*form)(const TorusPoint&),
                        std::uint64_t seed) {
  auto sys = build_secular_system(mg.graph);
  Rng rng(seed);
  double ratio0 = 0;
  double spread = 0;
  for (int i = 0; i < 300; ++i) {
    TorusPoint p = random_point(rng, sys.edge_count());
    const double f = form(p);
    if (std::abs(f) < 1e-6) continue;  // ratio is ill-conditioned near the zero set
    const double r = sys.value(p) / f;
    if (ratio0 == 0)
      ratio0 = r;
    else
      spread = std::max(spread, std::abs(r - ratio0) / std::abs(ratio0));
  }
  CAPTURE(ratio0);
  CHECK(ratio0 != 0);
  CHECK(spread < 1e-10);
}

}  // namespace

TEST_CASE("assembled determinants match hand-expanded closed forms") {
  check_proportional(fixtures::star3(), star3_delta, 11);
  check_proportional(fixtures::eight(), eight_delta, 12);
  check_proportional(fixtures::cherry(), cherry_delta, 13);
  check_proportional(fixtures::interval(), [](const TorusPoint& p) { return -std::sin(p.theta[0]); },
                     14);
  check_proportional(fixtures::circle(), [](const TorusPoint& p) { return 1 - std::cos(p.theta[0]); },
                     15);
}

TEST_CASE("library closed forms agree with the assembled system") {
  struct Row {
    MetricGraph mg;
    MinimalClass cls;
  };
  const Row rows[] = {{fixtures::star3(), MinimalClass::star3},
                      {fixtures::eight(), MinimalClass::eight},
                      {fixtures::cherry(), MinimalClass::cherry},
                      {fixtures::circle(), MinimalClass::circle},
                      {fixtures::interval(), MinimalClass::interval}};
  Rng rng(77);
  for (const Row& row : rows) {
    auto sys = build_secular_system(row.mg.graph);
    double ratio0 = 0;
    for (int i = 0; i < 200; ++i) {
      TorusPoint p = random_point(rng, sys.edge_count());
      const double f = closed_form_delta(row.cls, p);
      if (std::abs(f) < 1e-6) continue;
      const double r = sys.value(p) / f;
      if (ratio0 == 0)
        ratio0 = r;
      else
        CHECK(r == doctest::Approx(ratio0).epsilon(1e-10));
    }
  }
}

TEST_CASE("determinant is 2pi-periodic, so the half-angle branch is immaterial") {
  auto sys = build_secular_system(fixtures::cherry().graph);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    TorusPoint p = random_point(rng, 2);
    TorusPoint q = p;
    q.theta[static_cast<size_t>(i % 2)] += 2 * kPi;  // flips (xi, eta) of that edge
    const double a = sys.value(p);
    const double b = sys.value(q);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
  }
}

TEST_CASE("adjugate gradient matches finite differences") {
  for (const auto& mg : {fixtures::star3(), fixtures::eight(), fixtures::cherry()}) {
    auto sys = build_secular_system(mg.graph);
    Rng rng(31);
    for (int i = 0; i < 30; ++i) {
      TorusPoint p = random_point(rng, sys.edge_count());
      const Eigen::VectorXd ga = sys.gradient_adjugate(p);
      const Eigen::VectorXd gf = sys.gradient_finite_difference(p, 1e-6);
      CHECK((ga - gf).norm() < 1e-6 * std::max(1.0, ga.norm()));
    }
  }
}

TEST_CASE("gradient stays exact on the zero set") {
  // On the manifold the matrix is singular and det*tr(M^-1 dM) would blow
  // up; the adjugate form must still agree with finite differences there.
  auto mg = fixtures::star3();
  auto sys = build_secular_system(mg.graph);
  auto slice = solve_spectrum(mg, 30.0);
  REQUIRE(slice.roots.size() > 5);
  for (size_t j = 0; j < 5; ++j) {
    TorusPoint p = torus_point(slice.roots[j].k, mg.lengths);
    const Eigen::VectorXd ga = secular_gradient(sys, p);
    const Eigen::VectorXd gf =
        secular_gradient(sys, p, {GradientMethod::finite_difference, 1e-6});
    CHECK((ga - gf).norm() < 1e-5 * ga.norm());
    CHECK(ga.norm() > 1e-6 * sys.scale());  // simple root: regular point
  }
}

TEST_CASE("point classification separates regular, singular, off-manifold") {
  auto mg = fixtures::star3();
  auto sys = build_secular_system(mg.graph);

  // Cube vertex where all cos(theta_e) vanish: value and gradient both zero.
  TorusPoint diabolical{{kPi / 2, kPi / 2, kPi / 2}};
  CHECK(classify_point(sys, diabolical) == PointClass::singular);

  auto slice = solve_spectrum(mg, 20.0);
  REQUIRE(!slice.roots.empty());
  CHECK(classify_point(sys, torus_point(slice.roots[0].k, mg.lengths)) == PointClass::regular);

  TorusPoint generic{{0.3, 0.7, 1.1}};
  CHECK(classify_point(sys, generic) == PointClass::off_manifold);
}

TEST_CASE("gradient at roots is parallel to the squared amplitude vector") {
  for (const auto& mg : {fixtures::star3(), fixtures::eight(), fixtures::cherry()}) {
    auto sys = build_secular_system(mg.graph);
    auto slice = solve_spectrum(sys, mg, 60.0);
    int checked = 0;
    for (const auto& root : slice.roots) {
      if (root.degenerate) continue;
      Eigen::VectorXd m(sys.edge_count());
      for (int e = 0; e < sys.edge_count(); ++e) {
        const double a = root.amplitudes[2 * e];
        const double b = root.amplitudes[2 * e + 1];
        m[e] = a * a + b * b;
      }
      const Eigen::VectorXd g = secular_gradient(sys, torus_point(root.k, mg.lengths));
      const double cosine = std::abs(m.dot(g)) / (m.norm() * g.norm());
      CHECK(cosine > 1 - 1e-6);
      ++checked;
    }
    CHECK(checked > 10);
  }
}

TEST_CASE("free function value wrapper and scale are consistent") {
  auto sys = build_secular_system(fixtures::eight().graph);
  CHECK(sys.scale() > 0);
  TorusPoint p{{1.0, 2.0}};
  CHECK(secular_value(sys, p) == sys.value(p));
  CHECK(sys.dim() == 4);
  CHECK(sys.edge_count() == 2);
}

TEST_CASE("dimension mismatch is rejected") {
  auto sys = build_secular_system(fixtures::star3().graph);
  TorusPoint bad{{1.0, 2.0}};
  CHECK_THROWS_AS(sys.value(bad), DimensionMismatch);
}
