#include <cmath>
#include <sstream>

#include "doctest.h"
#include "shapehom/pareto.hpp"

using namespace shapehom;

TEST_CASE("branch weights: corner substitutions") {
  auto w = branch_weights(12, 0.0, 0.0);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(0.0));
  CHECK(w[2] == doctest::Approx(0.0));

  w = branch_weights(12, 0.0, 1.0);
  CHECK(w[0] == doctest::Approx(0.0));
  CHECK(w[1] == doctest::Approx(1.0));
  CHECK(w[2] == doctest::Approx(0.0));

  w = branch_weights(23, 0.1, 0.0);
  CHECK(w[0] == doctest::Approx(0.1));
  CHECK(w[1] == doctest::Approx(0.8));
  CHECK(w[2] == doctest::Approx(0.1));
}

TEST_CASE("branch weights stay in the simplex and are linear in t") {
  for (int branch : {12, 23, 31}) {
    for (double delta : {0.0, 0.1, 0.2, 0.3, 1.0 / 3.0}) {
      for (double t : {0.0, 0.3, 0.77, 1.0}) {
        auto w = branch_weights(branch, delta, t);
        CHECK(w[0] + w[1] + w[2] == doctest::Approx(1.0).epsilon(1e-14));
        for (double wi : w) CHECK(wi >= -1e-15);
      }
      auto w0 = branch_weights(branch, delta, 0.0);
      auto w1 = branch_weights(branch, delta, 1.0);
      auto wm = branch_weights(branch, delta, 0.4);
      for (int i = 0; i < 3; ++i)
        CHECK(wm[i] == doctest::Approx(0.6 * w0[i] + 0.4 * w1[i]).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(branch_weights(13, 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(branch_weights(12, 0.5, 0.0), ConfigError);
}

TEST_CASE("branch endpoints chain around the weight triangle") {
  for (double delta : {0.0, 0.2}) {
    auto e12 = branch_weights(12, delta, 1.0);
    auto s23 = branch_weights(23, delta, 0.0);
    auto e23 = branch_weights(23, delta, 1.0);
    auto s31 = branch_weights(31, delta, 0.0);
    auto e31 = branch_weights(31, delta, 1.0);
    auto s12 = branch_weights(12, delta, 0.0);
    for (int i = 0; i < 3; ++i) {
      CHECK(e12[i] == doctest::Approx(s23[i]));
      CHECK(e23[i] == doctest::Approx(s31[i]));
      CHECK(e31[i] == doctest::Approx(s12[i]));
    }
  }
}

TEST_CASE("export is ordered and counts header plus points") {
  std::vector<ParetoPoint> pts;
  SUBCASE("empty gives a header-only file") {
    std::ostringstream out;
    export_front(pts, out);
    CHECK(out.str() == "branch,delta,t,J1,J2,J3,residual,mesh_file\n");
  }
  SUBCASE("one point gives two lines") {
    ParetoPoint p;
    p.branch = 23;
    p.t = 0.5;
    pts.push_back(p);
    std::ostringstream out;
    export_front(pts, out);
    std::string text = out.str();
    int lines = 0;
    for (char ch : text) lines += ch == '\n';
    CHECK(lines == 2);
  }
  SUBCASE("rows are sorted by delta, branch, t") {
    auto mk = [](int b, double d, double t) {
      ParetoPoint p;
      p.branch = b;
      p.delta = d;
      p.t = t;
      return p;
    };
    pts = {mk(31, 0.1, 0.5), mk(12, 0.0, 1.0), mk(12, 0.0, 0.0),
           mk(23, 0.1, 0.2)};
    std::ostringstream out;
    export_front(pts, out);
    std::string text = out.str();
    CHECK(text.find("12,0,0") < text.find("12,0,1"));
    CHECK(text.find("12,0,1") < text.find("23,"));
    CHECK(text.find("23,") < text.find("31,"));
  }
}

TEST_CASE("equal weights make every branch a single front point") {
  ParetoSpec spec;
  spec.deltas = {1.0 / 3.0};
  spec.initial_mesh = generate_disk(2.5, 0.45);
  spec.newton.iter_max = 30;
  ParetoResult r = trace_front(spec);
  REQUIRE(r.ok);
  REQUIRE(r.traces.size() == 3);
  for (const auto& bt : r.traces) CHECK(bt.trace.accepted_count() <= 1);
  // All points of a branch coincide in objective space.
  for (int branch : {12, 23, 31}) {
    const ParetoPoint* first = nullptr;
    for (const auto& p : r.points) {
      if (p.branch != branch) continue;
      if (!first) {
        first = &p;
        continue;
      }
      CHECK(p.J1 == doctest::Approx(first->J1).epsilon(1e-9));
      CHECK(p.J2 == doctest::Approx(first->J2).epsilon(1e-9));
      CHECK(p.J3 == doctest::Approx(first->J3).epsilon(1e-9));
    }
    CHECK(first != nullptr);
  }
  // Residuals were re-verified against the stationarity solve.
  double perim = boundary_perimeter(spec.initial_mesh);
  for (const auto& p : r.points) CHECK(p.residual <= 1e-10 * (1.0 + perim));
}
