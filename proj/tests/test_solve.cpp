#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "macov/identify.hpp"
#include "macov/lattice.hpp"
#include "macov/solve.hpp"

using namespace macov;

namespace {

std::vector<double> random_coefs(std::mt19937_64& rng, long count) {
  std::normal_distribution<double> nd;
  std::vector<double> a(count);
  for (auto& v : a) v = nd(rng);
  return a;
}

bool same_point_mod_sign(const std::vector<cdouble>& a, const std::vector<cdouble>& b, double tol) {
  std::vector<cdouble> nb(b.size());
  for (size_t i = 0; i < b.size(); ++i) nb[i] = -b[i];
  return points_close(a, b, tol) || points_close(a, nb, tol);
}

bool same_fiber(const Fiber& f, const Fiber& g, double tol) {
  if (f.size() != g.size()) return false;
  std::vector<bool> used(g.size(), false);
  for (const auto& p : f.points) {
    bool hit = false;
    for (size_t j = 0; j < g.size(); ++j) {
      if (used[j]) continue;
      if (same_point_mod_sign(p, g.points[j], tol)) {
        used[j] = true;
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("polynomial parsing and evaluation") {
  PolySystem sys = parse_system_string("3.5 * x1^2 x3 - x2\nx1 + x2 + x3\n");
  REQUIRE(sys.neqs() == 2);
  CHECK(sys.nvars() == 3);
  std::vector<cdouble> z = {cdouble(2), cdouble(1), cdouble(-1)};
  CHECK(sys.equations[0].eval(z) == cdouble(-15.0));
  CHECK(sys.equations[1].eval(z) == cdouble(2.0));
}

TEST_CASE("polynomial derivative") {
  MPoly x = MPoly::variable(2, 0), y = MPoly::variable(2, 1);
  MPoly p = x * x * y + y * cdouble(3.0);  // x^2 y + 3y
  MPoly dx = p.derivative(0);              // 2xy
  std::vector<cdouble> z = {cdouble(2), cdouble(5)};
  CHECK(dx.eval(z) == cdouble(20.0));
  CHECK(p.derivative(1).eval(z) == cdouble(7.0));
}

TEST_CASE("univariate roots") {
  // z^3 - 6z^2 + 11z - 6 = (z-1)(z-2)(z-3)
  MPoly p(1);
  p.add_term(cdouble(1), {3});
  p.add_term(cdouble(-6), {2});
  p.add_term(cdouble(11), {1});
  p.add_term(cdouble(-6), {0});
  SolutionSet roots = univariate_roots(p);
  REQUIRE(roots.points.size() == 3);
  std::vector<double> re;
  for (const auto& s : roots.points) {
    CHECK(std::abs(s.point[0].imag()) < 1e-8);
    re.push_back(s.point[0].real());
  }
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(re[1] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(re[2] == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("total degree homotopy on a decoupled system") {
  PolySystem sys = parse_system_string("x1^2 - 1\nx2^2 - 4\n");
  SolutionSet sols = solve_total_degree(sys);
  CHECK(sols.bezout == 4);
  CHECK(sols.n_converged == 4);
  CHECK(count_distinct(sols) == 4);
  for (const auto& s : sols.points) {
    CHECK(std::abs(std::abs(s.point[0].real()) - 1.0) < 1e-8);
    CHECK(std::abs(std::abs(s.point[1].real()) - 2.0) < 1e-8);
  }
}

TEST_CASE("total degree homotopy with divergent paths") {
  // x y = 1, x + y = 3: Bezout 4, only 2 affine solutions {x,y} = {(3±sqrt5)/2}
  PolySystem sys = parse_system_string("x1 x2 - 1\nx1 + x2 - 3\n");
  SolutionSet sols = solve_total_degree(sys);
  CHECK(count_distinct(sols) == 2);
  for (const auto& s : sols.points) {
    if (!s.converged) continue;
    CHECK(std::abs(s.point[0] * s.point[1] - cdouble(1)) < 1e-8);
  }
}

TEST_CASE("quadratic segment tracking") {
  // P(s): x^2 - (1 + 3 s^2) has start roots +-1 at s=0, targets +-2 at s=1.
  PolySystem p0 = parse_system_string("x1^2 - 1\n");
  PolySystem p1 = parse_system_string("0 * x1\n");
  PolySystem p2 = parse_system_string("0 * x1 - 3\n");
  std::vector<std::vector<cdouble>> starts = {{cdouble(1)}, {cdouble(-1)}};
  SolutionSet sols = solve_poly_path(p0, p1, p2, starts);
  REQUIRE(sols.n_converged == 2);
  std::vector<double> ends;
  for (const auto& s : sols.points) ends.push_back(s.point[0].real());
  std::sort(ends.begin(), ends.end());
  CHECK(ends[0] == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(ends[1] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("newton refinement") {
  PolySystem sys = parse_system_string("x1^2 - 2\n");
  auto z = newton_refine(sys, {cdouble(1.3)});
  CHECK(z[0].real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS(newton_refine(sys, {cdouble(0)}));  // singular Jacobian
}

TEST_CASE("dedup modulo symmetry") {
  std::vector<std::vector<cdouble>> pts = {
      {cdouble(1), cdouble(2)}, {cdouble(-1), cdouble(-2)}, {cdouble(2), cdouble(1)}};
  std::vector<Symmetry> negation = {[](const std::vector<cdouble>& z) {
    std::vector<cdouble> out(z.size());
    for (size_t i = 0; i < z.size(); ++i) out[i] = -z[i];
    return out;
  }};
  CHECK(dedup_points(pts, negation, 1e-6).size() == 2);
}

TEST_CASE("d=1 fiber via spectral factorization") {
  std::mt19937_64 rng(21);
  for (int q = 1; q <= 3; ++q) {
    Order ord({q});
    CoefGrid a(ord, random_coefs(rng, q + 1));
    AcovTable g = gamma_map(a);
    Fiber f = fiber_d1(g);
    CHECK(f.size() == (1u << q));
    // every point maps back to g
    for (const auto& p : f.points) {
      auto gi = gamma_map_complex(ord, p);
      for (size_t t = 0; t < gi.size(); ++t)
        CHECK(std::abs(gi[t] - cdouble(g.values[t])) < 1e-6 * (1 + g.norm()));
    }
  }
}

TEST_CASE("d=1 fiber equals the generic solver") {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 6; ++rep) {
    int q = 1 + rep % 3;
    Order ord({q});
    CoefGrid a(ord, random_coefs(rng, q + 1));
    AcovTable g = gamma_map(a);
    CHECK(same_fiber(fiber_d1(g), fiber_generic(g), 1e-6));
  }
}

TEST_CASE("boundary flag for a unit-circle root") {
  CoefGrid a(Order({1}), {1.0, 1.0});  // theta(x) = 1 + x, root -1
  Fiber f = fiber_d1(gamma_map(a));
  CHECK(f.boundary);
}

TEST_CASE("invertible representative") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    CoefGrid a(Order({2}), random_coefs(rng, 3));
    Fiber f = fiber_d1(gamma_map(a));
    if (f.boundary) continue;
    CoefGrid inv = invertible_representative(f);
    CHECK(inv.values[0] > 0);
    for (const auto& r : ma_polynomial_roots(inv.values)) CHECK(std::abs(r) > 1.0);
    AcovTable gi = gamma_map(inv);
    AcovTable g = gamma_map(a);
    for (size_t t = 0; t < g.values.size(); ++t)
      CHECK(gi.values[t] == doctest::Approx(g.values[t]).epsilon(1e-6));
  }
}

TEST_CASE("ma(1,1) generic fiber is the pair {a, reverse}") {
  std::mt19937_64 rng(24);
  Order ord({1, 1});
  for (int rep = 0; rep < 5; ++rep) {
    CoefGrid a(ord, random_coefs(rng, 4));
    AcovTable g = gamma_map(a);
    Fiber f = fiber_ma11(g);
    REQUIRE(f.size() == 2);
    std::vector<cdouble> ac = canonical_sign({a.values[0], a.values[1], a.values[2], a.values[3]});
    std::vector<cdouble> rc = canonical_sign(reverse_complex(ord, ac));
    bool ok = (same_point_mod_sign(f.points[0], ac, 1e-6) && same_point_mod_sign(f.points[1], rc, 1e-6)) ||
              (same_point_mod_sign(f.points[0], rc, 1e-6) && same_point_mod_sign(f.points[1], ac, 1e-6));
    CHECK(ok);
    CHECK(same_fiber(f, fiber_generic(g), 1e-6));
  }
}

TEST_CASE("ma(1,1) separable fiber has four points") {
  std::mt19937_64 rng(25);
  Order ord({1, 1});
  for (int rep = 0; rep < 3; ++rep) {
    auto u = random_coefs(rng, 2), v = random_coefs(rng, 2);
    CoefGrid a(ord, {u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]});
    Fiber f = fiber_ma11(gamma_map(a));
    CHECK(f.size() == 4);
  }
}

TEST_CASE("q=2 triangular fiber agrees with spectral factorization") {
  std::mt19937_64 rng(26);
  for (int rep = 0; rep < 5; ++rep) {
    CoefGrid a(Order({2}), random_coefs(rng, 3));
    AcovTable g = gamma_map(a);
    CHECK(same_fiber(fiber_ma2_triangular(g), fiber_d1(g), 1e-6));
  }
}

TEST_CASE("canonical sign flips the leading coordinate positive") {
  auto p = canonical_sign({cdouble(-2), cdouble(3)});
  CHECK(p[0].real() == 2);
  CHECK(p[1].real() == -3);
}
