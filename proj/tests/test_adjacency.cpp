#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <qgraph/adjacency.hpp>
#include <qgraph/secular.hpp>

#include "test_util.hpp"

using namespace qgraph;
using fixtures::kPi;

namespace {

std::vector<double> sorted_spectrum(const Graph& g) {
  auto mu = adjacency_spectrum(g);
  std::sort(mu.begin(), mu.end());
  return mu;
}

const UnitLine* line_at(const UnitSpectrum& s, double k) {
  for (const auto& line : s.lines)
    if (std::abs(line.k - k) < 1e-9) return &line;
  return nullptr;
}

}  // namespace

TEST_CASE("degree-normalized adjacency eigenvalues of the small graphs") {
  auto star = sorted_spectrum(fixtures::star3().graph);
  REQUIRE(star.size() == 4);
  CHECK(star[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(star[1] == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(star[2] == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(star[3] == doctest::Approx(1.0).epsilon(1e-12));

  auto c3 = sorted_spectrum(fixtures::c3_unit().graph);
  REQUIRE(c3.size() == 3);
  CHECK(c3[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(c3[1] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(c3[2] == doctest::Approx(1.0).epsilon(1e-12));

  auto k4 = sorted_spectrum(fixtures::k4_unit().graph);
  REQUIRE(k4.size() == 4);
  for (int i = 0; i < 3; ++i) CHECK(k4[static_cast<size_t>(i)] == doctest::Approx(-1.0 / 3).epsilon(1e-12));
  CHECK(k4[3] == doctest::Approx(1.0).epsilon(1e-12));

  // Loops count twice on the diagonal and in the degree: the single-vertex
  // eight normalizes to the 1x1 identity.
  auto eight = sorted_spectrum(fixtures::eight().graph);
  REQUIRE(eight.size() == 1);
  CHECK(eight[0] == doctest::Approx(1.0).epsilon(1e-12));

  // Cherry: A = [[2,1],[1,0]], D = diag(3,1), eigenvalues {1, -1/3}.
  auto cherry = sorted_spectrum(fixtures::cherry().graph);
  REQUIRE(cherry.size() == 2);
  CHECK(cherry[0] == doctest::Approx(-1.0 / 3).epsilon(1e-12));
  CHECK(cherry[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unit-length line multiplicities follow the counting rules") {
  // Star: bipartite tree. Lines pi/2 and 3pi/2 from mu = 0 (twice each),
  // zero mode multiplicity 1 + b1 = 1, pi line b1 + 1 = 1.
  auto star = unit_length_spectrum(fixtures::star3().graph);
  CHECK(star.total_multiplicity() == 6);
  REQUIRE(line_at(star, kPi / 2));
  CHECK(line_at(star, kPi / 2)->multiplicity == 2);
  REQUIRE(line_at(star, 3 * kPi / 2));
  CHECK(line_at(star, 3 * kPi / 2)->multiplicity == 2);
  REQUIRE(line_at(star, kPi));
  CHECK(line_at(star, kPi)->multiplicity == 1);
  CHECK(line_at(star, kPi)->source == UnitLine::Source::pi_mode);
  REQUIRE(line_at(star, 0.0));
  CHECK(line_at(star, 0.0)->multiplicity == 1);
  CHECK(line_at(star, 0.0)->source == UnitLine::Source::zero_mode);

  // Triangle: b1 = 1, odd cycle. mu = -1/2 twice gives acos values; the pi
  // line carries b1 - 1 = 0 but is still reported.
  auto c3 = unit_length_spectrum(fixtures::c3_unit().graph);
  CHECK(c3.total_multiplicity() == 6);
  REQUIRE(line_at(c3, std::acos(-0.5)));
  CHECK(line_at(c3, std::acos(-0.5))->multiplicity == 2);
  REQUIRE(line_at(c3, 2 * kPi - std::acos(-0.5)));
  CHECK(line_at(c3, 2 * kPi - std::acos(-0.5))->multiplicity == 2);
  REQUIRE(line_at(c3, 0.0));
  CHECK(line_at(c3, 0.0)->multiplicity == 2);  // 1 + b1
  REQUIRE(line_at(c3, kPi));
  CHECK(line_at(c3, kPi)->multiplicity == 0);

  // K4: b1 = 3, not bipartite. acos(-1/3) lines carry the triple eigenvalue.
  auto k4 = unit_length_spectrum(fixtures::k4_unit().graph);
  CHECK(k4.total_multiplicity() == 12);
  REQUIRE(line_at(k4, std::acos(-1.0 / 3)));
  CHECK(line_at(k4, std::acos(-1.0 / 3))->multiplicity == 3);
  REQUIRE(line_at(k4, kPi));
  CHECK(line_at(k4, kPi)->multiplicity == 2);  // b1 - 1
  REQUIRE(line_at(k4, 0.0));
  CHECK(line_at(k4, 0.0)->multiplicity == 4);  // 1 + b1

  // Eight: the only adjacency eigenvalue is 1, which is excluded; all mass
  // sits on the zero and pi lines.
  auto eight = unit_length_spectrum(fixtures::eight().graph);
  CHECK(eight.total_multiplicity() == 4);
  REQUIRE(line_at(eight, 0.0));
  CHECK(line_at(eight, 0.0)->multiplicity == 3);  // 1 + b1
  REQUIRE(line_at(eight, kPi));
  CHECK(line_at(eight, kPi)->multiplicity == 1);  // b1 - 1
}

TEST_CASE("secular roots confirm the unit-length predictions") {
  for (const auto& mg :
       {fixtures::star3(), fixtures::c3_unit(), fixtures::k4_unit(), fixtures::eight()}) {
    auto sys = build_secular_system(mg.graph);
    auto check = cross_check_unit(mg.graph, sys);
    CAPTURE(mg.graph.edge_count());
    CHECK(check.max_deviation < 1e-9);
    CHECK(check.unmatched.empty());
    int predicted = 0;
    for (const auto& row : check.rows) predicted += row.predicted_multiplicity;
    CHECK(predicted == 2 * mg.graph.edge_count());
  }
}
