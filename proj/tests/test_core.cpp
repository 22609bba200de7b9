#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "macov/field.hpp"
#include "macov/json_io.hpp"
#include "macov/lattice.hpp"
#include "macov/symbolic.hpp"

using namespace macov;

namespace {

std::vector<double> random_coefs(std::mt19937_64& rng, long count) {
  std::normal_distribution<double> nd;
  std::vector<double> a(count);
  for (auto& v : a) v = nd(rng);
  return a;
}

}  // namespace

TEST_CASE("order counts and canonical half-lags") {
  Order q11({1, 1});
  CHECK(q11.coef_count() == 4);
  CHECK(q11.half_lag_count() == 5);
  std::vector<std::vector<int>> expect = {{0, 0}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};
  CHECK(q11.half_lags() == expect);

  Order q3({3});
  CHECK(q3.coef_count() == 4);
  CHECK(q3.half_lag_count() == 4);

  Order q111({1, 1, 1});
  CHECK(q111.coef_count() == 8);
  CHECK(q111.half_lag_count() == 14);

  CHECK(q11.half_lag_index({1, -1}) == 2);
  CHECK(q11.half_lag_index({-1, 1}) == -1);  // not canonical
  CHECK(is_canonical_half_lag({0, 1}));
  CHECK_FALSE(is_canonical_half_lag({0, -1}));
  CHECK(negate_lag({1, -1}) == std::vector<int>{-1, 1});
}

TEST_CASE("coefficient grid indexing is row-major") {
  Order q({1, 2});
  CoefGrid a(q, {1, 2, 3, 4, 5, 6});
  CHECK(a.at({0, 0}) == 1);
  CHECK(a.at({0, 2}) == 3);
  CHECK(a.at({1, 0}) == 4);
  CHECK(a.at({1, 2}) == 6);
}

TEST_CASE("gamma map golden value") {
  CoefGrid a(Order({1, 1}), {7, -5, 3, 1});
  AcovTable g = gamma_map(a);
  CHECK(g.at({0, 0}) == 84.0);
  CHECK(g.at({0, 1}) == -32.0);
  CHECK(g.at({1, -1}) == -15.0);
  CHECK(g.at({1, 0}) == 16.0);
  CHECK(g.at({1, 1}) == 7.0);
  CHECK(g.at({-1, 1}) == -15.0);  // evenness
  CHECK(g.at({2, 0}) == 0.0);     // outside support
}

TEST_CASE("gamma map invariances") {
  std::mt19937_64 rng(11);
  for (auto qv : {std::vector<int>{2}, {1, 1}, {1, 2}}) {
    Order q(qv);
    for (int rep = 0; rep < 5; ++rep) {
      CoefGrid a(q, random_coefs(rng, q.coef_count()));
      AcovTable g = gamma_map(a);
      AcovTable gr = gamma_map(reverse(a));
      CoefGrid neg = a;
      for (auto& v : neg.values) v = -v;
      AcovTable gn = gamma_map(neg);
      for (size_t t = 0; t < g.values.size(); ++t) {
        CHECK(g.values[t] == doctest::Approx(gr.values[t]).epsilon(1e-12));
        CHECK(g.values[t] == doctest::Approx(gn.values[t]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("gamma monomial counts") {
  Order q({1, 1});
  CHECK(gamma_monomial_count(q, {0, 0}) == 4);
  CHECK(gamma_monomial_count(q, {0, 1}) == 2);
  CHECK(gamma_monomial_count(q, {1, 1}) == 1);
  CHECK(gamma_monomial_count(q, {1, -1}) == 1);
}

TEST_CASE("laurent identity at torus points") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ang(0, 2 * M_PI);
  for (auto qv : {std::vector<int>{1}, {3}, {1, 1}, {1, 1, 1}}) {
    Order q(qv);
    CoefGrid a(q, random_coefs(rng, q.coef_count()));
    AcovTable g = gamma_map(a);
    double scale = 1;
    for (double v : g.values) scale += std::abs(v);
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<cdouble> x(q.dim());
      for (auto& xi : x) xi = std::polar(1.0, ang(rng));
      CHECK(std::abs(laurent_residual(a, g, x)) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("gamma polynomials agree with the numeric map") {
  std::mt19937_64 rng(13);
  Order q({1, 2});
  auto gp = gamma_polynomials(q);
  REQUIRE(static_cast<long>(gp.size()) == q.half_lag_count());
  CoefGrid a(q, random_coefs(rng, q.coef_count()));
  AcovTable g = gamma_map(a);
  std::vector<cdouble> z(a.values.begin(), a.values.end());
  for (size_t t = 0; t < gp.size(); ++t) {
    CHECK(gp[t].eval(z).real() == doctest::Approx(g.values[t]).epsilon(1e-12));
    CHECK(gp[t].eval(z).imag() == doctest::Approx(0.0));
  }
}

TEST_CASE("symbolic determinant") {
  // det [[x, y], [y, x]] = x^2 - y^2
  MPoly x = MPoly::variable(2, 0), y = MPoly::variable(2, 1);
  MPoly d = sym_det({{x, y}, {y, x}});
  std::vector<cdouble> z = {cdouble(3), cdouble(2)};
  CHECK(d.eval(z) == cdouble(5));

  // random constant matrix vs cofactor expansion by hand (3x3)
  std::mt19937_64 rng(14);
  std::normal_distribution<double> nd;
  double m[3][3];
  std::vector<std::vector<MPoly>> sym(3, std::vector<MPoly>(3, MPoly(1)));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      m[i][j] = nd(rng);
      sym[i][j] = MPoly::constant(1, m[i][j]);
    }
  double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  CHECK(sym_det(sym).eval({cdouble(0)}).real() == doctest::Approx(det).epsilon(1e-12));
}

TEST_CASE("quartic vanishes exactly on the variety") {
  std::mt19937_64 rng(15);
  Order q({1, 1});
  for (int rep = 0; rep < 20; ++rep) {
    CoefGrid a(q, random_coefs(rng, 4));
    auto ev = quartic_eval(gamma_map(a));
    CHECK(std::abs(ev.value) <= 1e-8 * ev.scale);
  }
}

TEST_CASE("quartic detects off-variety points") {
  std::mt19937_64 rng(16);
  std::uniform_int_distribution<int> coin(0, 1);
  Order q({1, 1});
  for (int rep = 0; rep < 20; ++rep) {
    CoefGrid a(q, random_coefs(rng, 4));
    AcovTable g = gamma_map(a);
    // a uniform rescale stays on the homogeneous variety: mix the signs
    std::vector<int> sgn(g.values.size());
    for (auto& s : sgn) s = coin(rng);
    if (std::count(sgn.begin(), sgn.end(), sgn[0]) == static_cast<long>(sgn.size())) sgn[0] ^= 1;
    for (size_t t = 0; t < g.values.size(); ++t) g.values[t] *= 1.0 + (sgn[t] ? 0.1 : -0.1);
    auto ev = quartic_eval(g);
    CHECK(std::abs(ev.value) > 1e-4 * ev.scale);
  }
}

TEST_CASE("singular component membership") {
  Order q({1, 1});
  // canonical slot order: g00, g01, g1m1, g10, g11
  // C1: g10 = g01, g00 = 2 g11 + 2 g1m1, 4 g11 g1m1 = g01^2
  AcovTable c1(q, {10, 4, 4, 4, 1});
  CHECK(singular_component_membership(c1).count(SingularComponent::C1) == 1);
  // C2: g10 = -g01, g00 = -2 g11 - 2 g1m1, 4 g11 g1m1 = g01^2
  AcovTable c2(q, {-10, 4, 4, -4, 1});
  CHECK(singular_component_membership(c2).count(SingularComponent::C2) == 1);
  // C3: g11 = g1m1, g00 g1m1 = g10 g01
  AcovTable c3(q, {2, 4, 2, 1, 2});
  CHECK(singular_component_membership(c3).count(SingularComponent::C3) == 1);
  // generic point on none
  CoefGrid a(q, {7, -5, 3, 1});
  CHECK(singular_component_membership(gamma_map(a)).empty());
}

TEST_CASE("simulation matches a direct convolution") {
  Order q({1});
  CoefGrid a(q, {2.0, -0.5});
  std::vector<int> n = {4};
  // noise over [0, 4] row-major: z index 0 is site 0 = 1 - q
  std::vector<double> z = {0.3, -1.2, 0.8, 0.1, 2.0};
  FieldGrid y = simulate_with_noise(a, n, z);
  REQUIRE(y.values.size() == 4);
  for (int t = 1; t <= 4; ++t)
    CHECK(y.at({t}) == doctest::Approx(2.0 * z[t] - 0.5 * z[t - 1]).epsilon(1e-14));
}

TEST_CASE("simulation law of large numbers") {
  Order q({1});
  CoefGrid a(q, {1.0, 0.5});
  FieldGrid y = simulate(a, {100000}, NoiseSpec{42});
  AcovTable g = empirical_acov(y, q);
  // 3-sigma tolerances: sd(gamma_hat_0) ~ sqrt(2 sum gamma^2)/sqrt(n)
  CHECK(std::abs(g.values[0] - 1.25) < 3 * 0.006);
  CHECK(std::abs(g.values[1] - 0.50) < 3 * 0.005);
}

TEST_CASE("empirical autocovariance divisor") {
  Order q({1});
  FieldGrid y({3}, {1.0, 2.0, 3.0});
  AcovTable g = empirical_acov(y, q, false);
  CHECK(g.values[0] == doctest::Approx((1. + 4. + 9.) / 3));
  CHECK(g.values[1] == doctest::Approx((1. * 2 + 2. * 3) / 2));
}

TEST_CASE("field csv round trip") {
  FieldGrid y({2, 3}, {1, 2, 3, 4, 5, 6.5});
  std::stringstream ss;
  write_field_csv(ss, y, "q=1,1");
  FieldGrid back = read_field_csv(ss);
  CHECK(back.extents == y.extents);
  for (size_t i = 0; i < y.values.size(); ++i)
    CHECK(back.values[i] == doctest::Approx(y.values[i]).epsilon(1e-15));
}

TEST_CASE("field binary round trip") {
  FieldGrid y({2, 2, 2}, {1, -2, 3, -4, 5, -6, 7, -8});
  std::stringstream ss;
  write_field_binary(ss, y);
  FieldGrid back = read_field_binary(ss);
  CHECK(back.extents == y.extents);
  CHECK(back.values == y.values);
}

TEST_CASE("pgm header") {
  FieldGrid y({2, 2}, {0, 1, 2, 3});
  std::stringstream ss;
  write_field_pgm(ss, y);
  std::string word;
  ss >> word;
  CHECK(word == "P2");
  int w, h, maxv;
  ss >> w >> h >> maxv;
  CHECK(w == 2);
  CHECK(h == 2);
  CHECK(maxv == 255);
}

TEST_CASE("coefficient json round trip") {
  CoefGrid a(Order({1, 1}), {7, -5, 3, 1.25});
  CoefGrid back = coef_from_json(coef_to_json(a));
  CHECK(back.order == a.order);
  CHECK(back.values == a.values);
}

TEST_CASE("autocovariance json round trip") {
  AcovTable g(Order({2}), {1.5, -0.25, 0.125});
  AcovTable back = acov_from_json(acov_to_json(g));
  CHECK(back.order == g.order);
  CHECK(back.values == g.values);
}

TEST_CASE("proper order predicate") {
  CHECK(CoefGrid(Order({1}), {1, 0.5}).is_proper_order());
  CHECK_FALSE(CoefGrid(Order({1}), {1, 0}).is_proper_order());
  CHECK(CoefGrid(Order({1, 1}), {7, -5, 3, 1}).is_proper_order());
}
