#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "macov/estimate.hpp"
#include "macov/field.hpp"
#include "macov/json_io.hpp"

using namespace macov;

namespace {

std::vector<double> random_coefs(std::mt19937_64& rng, long count) {
  std::normal_distribution<double> nd;
  std::vector<double> a(count);
  for (auto& v : a) v = nd(rng);
  return a;
}

// Dense-oracle log-likelihood from the full covariance matrix.
double loglik_dense(const CoefGrid& a, const MleProblem& p) {
  auto sites = p.sites();
  int m = static_cast<int>(sites.size());
  auto sig = mle_covariance_dense(a, sites);
  Eigen::MatrixXd S(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) S(i, j) = sig[static_cast<size_t>(i) * m + j];
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) y(i) = p.sample.values[i];
  Eigen::VectorXd w = llt.matrixL().solve(y);
  double logdet_half = 0;
  for (int i = 0; i < m; ++i) logdet_half += std::log(llt.matrixL()(i, i));
  return -logdet_half - 0.5 * w.squaredNorm();
}

}  // namespace

TEST_CASE("lse critical system is the gradient of the objective") {
  Order ord({1, 1});
  LseProblem p(ord, AcovTable(ord, {84, -32, -15, 16, 7}));
  PolySystem sys = lse_critical_system(p);
  REQUIRE(sys.neqs() == 4);
  // finite-difference check of 1/2 ||gamma(a) - target||^2 at a random point
  std::vector<double> a = {1.1, -0.3, 0.7, 0.2};
  auto obj = [&](const std::vector<double>& v) {
    AcovTable g = gamma_map(CoefGrid(ord, v));
    double s = 0;
    for (size_t t = 0; t < g.values.size(); ++t) {
      double d = g.values[t] - p.target.values[t];
      s += 0.5 * d * d;
    }
    return s;
  };
  std::vector<cdouble> z(a.begin(), a.end());
  for (int k = 0; k < 4; ++k) {
    double h = 1e-6;
    auto ap = a, am = a;
    ap[k] += h;
    am[k] -= h;
    double fd = (obj(ap) - obj(am)) / (2 * h);
    CHECK(sys.equations[k].eval(z).real() == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("lse projects a point already on the variety to itself") {
  Order ord({1, 1});
  CoefGrid a(ord, {7, -5, 3, 1});
  LseProblem p(ord, gamma_map(a));
  CriticalReport rep = lse_solve(p);
  CHECK(rep.objective <= 1e-6 * (1 + std::sqrt(p.target.norm())));
  const auto& sel = rep.points[rep.selected];
  for (size_t t = 0; t < sel.gamma_image.size(); ++t)
    CHECK(sel.gamma_image[t] == doctest::Approx(p.target.values[t]).epsilon(1e-6));
}

TEST_CASE("ed count for a random generic target") {
  std::mt19937_64 rng(31);
  Order ord({1, 1});
  std::vector<double> g = random_coefs(rng, 5);
  for (auto& v : g) v *= 10;
  g[0] = std::abs(g[0]) + 20;  // keep the target well away from the origin
  LseProblem p(ord, AcovTable(ord, g));
  CHECK(ed_count_ma11(p) == 16);
}

TEST_CASE("banded likelihood equals the dense oracle") {
  std::mt19937_64 rng(32);
  SUBCASE("d=1") {
    Order ord({2});
    CoefGrid truth(ord, {1.0, 0.4, -0.3});
    FieldGrid y = simulate(truth, {12}, NoiseSpec{7});
    MleProblem p(ord, y);
    for (int rep = 0; rep < 5; ++rep) {
      CoefGrid a(ord, random_coefs(rng, 3));
      double lb = mle_loglik(a, p), ld = loglik_dense(a, p);
      if (std::isfinite(lb) || std::isfinite(ld))
        CHECK(lb == doctest::Approx(ld).epsilon(1e-9));
    }
  }
  SUBCASE("d=2") {
    Order ord({1, 1});
    CoefGrid truth(ord, {1.0, 0.5, -0.4, 0.2});
    FieldGrid y = simulate(truth, {3, 4}, NoiseSpec{8});
    MleProblem p(ord, y);
    for (int rep = 0; rep < 5; ++rep) {
      CoefGrid a(ord, random_coefs(rng, 4));
      double lb = mle_loglik(a, p), ld = loglik_dense(a, p);
      if (std::isfinite(lb) || std::isfinite(ld))
        CHECK(lb == doctest::Approx(ld).epsilon(1e-9));
    }
  }
}

TEST_CASE("gradient matches the likelihood surface") {
  Order ord({1});
  CoefGrid truth(ord, {1.0, 0.5});
  FieldGrid y = simulate(truth, {16}, NoiseSpec{9});
  MleProblem p(ord, y);
  CoefGrid a(ord, {0.9, 0.4});
  auto g = mle_grad(a, p);
  for (int k = 0; k < 2; ++k) {
    double h = 1e-5;
    CoefGrid ap = a, am = a;
    ap.values[k] += h;
    am.values[k] -= h;
    double fd = (mle_loglik(ap, p) - mle_loglik(am, p)) / (2 * h);
    CHECK(g[k] == doctest::Approx(fd).epsilon(1e-3));
  }
}

TEST_CASE("local solver improves the likelihood from a nearby start") {
  Order ord({1});
  CoefGrid truth(ord, {1.0, 0.5});
  FieldGrid y = simulate(truth, {64}, NoiseSpec{10});
  MleProblem p(ord, y);
  CoefGrid init(ord, {0.8, 0.3});
  MleLocalResult r = mle_solve_local(p, init);
  CHECK(r.converged);
  CHECK(r.loglik >= mle_loglik(init, p));
  auto g = mle_grad(r.a, p);
  for (double gk : g) CHECK(std::abs(gk) < 1e-5 * (1 + std::abs(r.loglik)));
}

TEST_CASE("exact n=2 classification cases") {
  // W = (y1^2 + y2^2) / (2 y1 y2)
  SUBCASE("W in (0,2): symmetric branch") {
    ExactMa1 r = mle_exact_ma1_n2(1.0, 1.0);
    CHECK(r.case_label == "(2)");
    CHECK(r.a.values[0] == doctest::Approx(std::sqrt(1.0 / 3)).epsilon(1e-12));
    CHECK(r.a.values[1] == doctest::Approx(r.a.values[0]).epsilon(1e-12));
  }
  SUBCASE("W in (-2,0): antisymmetric branch") {
    ExactMa1 r = mle_exact_ma1_n2(1.0, -1.0);
    CHECK(r.case_label == "(3)");
    CHECK(r.a.values[1] == doctest::Approx(-r.a.values[0]).epsilon(1e-12));
  }
  SUBCASE("|W| >= 2: interior branch solves the moment equations") {
    double y1 = 2.0, y2 = 0.3;
    ExactMa1 r = mle_exact_ma1_n2(y1, y2);
    CHECK(r.case_label == "(1)");
    double a0 = r.a.values[0], a1 = r.a.values[1];
    CHECK(a0 * a1 == doctest::Approx(y1 * y2).epsilon(1e-10));
    CHECK(a0 * a0 + a1 * a1 == doctest::Approx((y1 * y1 + y2 * y2) / 2).epsilon(1e-10));
  }
  SUBCASE("degenerate data") {
    ExactMa1 r = mle_exact_ma1_n2(0.0, 1.5);
    CHECK(r.case_label == "degenerate");
    CHECK(r.a.values[0] == doctest::Approx(std::sqrt(1.125)).epsilon(1e-12));
    CHECK(r.a.values[1] == 0.0);
  }
}

TEST_CASE("exact n=2 result is a likelihood stationary point or boundary max") {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 20; ++rep) {
    double y1 = nd(rng), y2 = nd(rng);
    ExactMa1 r = mle_exact_ma1_n2(y1, y2);
    MleProblem p(Order({1}), FieldGrid({2}, {y1, y2}));
    // local polish from the closed form must not improve the likelihood
    MleLocalResult loc = mle_solve_local(p, r.a);
    CHECK(loc.loglik <= r.loglik + 1e-8 * (1 + std::abs(r.loglik)));
  }
}

TEST_CASE("innovations recovers the invertible representative") {
  Order ord({1});
  CoefGrid a(ord, {1.0, 0.5});
  InnovationsResult r = innovations_d1(gamma_map(a), 200);
  CHECK(r.converged);
  CHECK(r.a.values[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.a.values[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("ml degree counts for the smallest samples") {
  std::mt19937_64 rng(34);
  std::normal_distribution<double> nd;
  Order ord({1});
  MlDegree d2 = ml_degree_count(ord, {2}, {nd(rng), nd(rng)});
  CHECK(d2.count == 4);
  CHECK(d2.certified());
  MlDegree d3 = ml_degree_count(ord, {3}, {nd(rng), nd(rng), nd(rng)});
  CHECK(d3.count == 8);
  CHECK(d3.certified());
}

TEST_CASE("score zeros satisfy the finite-difference score") {
  std::mt19937_64 rng(35);
  std::normal_distribution<double> nd;
  Order ord({1});
  std::vector<double> Y = {nd(rng), nd(rng), nd(rng)};
  MlDegree d = ml_degree_count(ord, {3}, Y);
  MleProblem p(ord, FieldGrid({3}, Y));
  int checked = 0;
  for (const auto& z : d.points) {
    if (!point_is_real(z, 1e-8)) continue;
    CoefGrid a(ord, real_part(z));
    if (!std::isfinite(mle_loglik(a, p))) continue;  // not in the PD cone
    auto g = mle_grad(a, p);
    for (double gk : g) CHECK(std::abs(gk) < 1e-4);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("score family homotopy agrees with the local solver") {
  Order ord({1});
  CoefGrid truth(ord, {1.0, 0.5});
  ScoreFamily fam = ml_score_family(ord, {5});
  for (int i = 0; i < 3; ++i) {
    FieldGrid y = simulate(truth, {5}, NoiseSpec{static_cast<std::uint64_t>(200 + i)});
    MleProblem p(ord, y);
    auto r = mle_solve_score(p, fam);
    REQUIRE(r.has_value());
    // the global score optimum is at least as good as a local polish from it
    MleLocalResult loc = mle_solve_local(p, r->a);
    CHECK(loc.loglik <= r->loglik + 1e-6 * (1 + std::abs(r->loglik)));
  }
}

TEST_CASE("report json structure") {
  Order ord({1, 1});
  CoefGrid a(ord, {7, -5, 3, 1});
  LseProblem p(ord, gamma_map(a));
  CriticalReport rep = lse_solve(p);
  std::string js = report_to_json(rep, ord);
  CHECK(js.find("\"critical_points\"") != std::string::npos);
  CHECK(js.find("\"selected\"") != std::string::npos);
  CHECK(js.find("\"path_stats\"") != std::string::npos);
}
