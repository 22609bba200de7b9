#include "macov/identify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "macov/symbolic.hpp"

namespace macov {

namespace {

double cnorm(const std::vector<cdouble>& v) {
  double s = 0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

bool roundtrip_ok(const Order& order, const std::vector<cdouble>& a, const AcovTable& g, double tol) {
  auto ga = gamma_map_complex(order, a);
  double err = 0;
  for (size_t i = 0; i < ga.size(); ++i) err = std::max(err, std::abs(ga[i] - g.values[i]));
  return err <= tol * (1.0 + g.norm());
}

void push_candidate(Fiber& f, std::vector<cdouble> a, const AcovTable& g, double roundtrip_tol,
                    double dedup_tol) {
  if (!roundtrip_ok(f.order, a, g, roundtrip_tol)) return;
  a = canonical_sign(std::move(a));
  for (const auto& p : f.points)
    if (points_close(a, p, dedup_tol)) return;
  f.is_real.push_back(point_is_real(a));
  f.points.push_back(std::move(a));
}

}  // namespace

std::vector<cdouble> canonical_sign(std::vector<cdouble> a) {
  double scale = cnorm(a);
  for (const auto& x : a) {
    if (std::abs(x) > 1e-10 * (1.0 + scale)) {
      bool flip = x.real() < 0 || (x.real() == 0 && x.imag() < 0);
      if (std::abs(x.real()) < 1e-10 * std::abs(x)) flip = x.imag() < 0;
      if (flip)
        for (auto& y : a) y = -y;
      break;
    }
  }
  return a;
}

std::vector<cdouble> ma_polynomial_roots(const std::vector<double>& a) {
  int deg = static_cast<int>(a.size()) - 1;
  double scale = 0;
  for (double c : a) scale = std::max(scale, std::abs(c));
  while (deg > 0 && std::abs(a[deg]) <= 1e-12 * (1.0 + scale)) --deg;
  if (deg == 0) return {};
  MPoly p(1);
  for (int k = 0; k <= deg; ++k) p.add_term(cdouble(a[k]), {k});
  auto sols = univariate_roots(p);
  std::vector<cdouble> roots;
  for (const auto& s : sols.points) roots.push_back(s.point[0]);
  return roots;
}

Fiber fiber_d1(const AcovTable& g, bool complex_fiber, double roundtrip_tol) {
  if (g.order.dim() != 1) throw std::invalid_argument("fiber_d1: d must be 1");
  int q = g.order[0];
  Fiber fib(g.order);

  if (std::abs(g.values[q]) <= 1e-12 * (1.0 + g.norm()))
    throw std::runtime_error("fiber_d1: gamma(q) = 0, not a proper MA(q) table");

  // Laurent polynomial sum gamma(t) x^{q+t}, degree 2q.
  MPoly lp(1);
  for (int t = -q; t <= q; ++t) lp.add_term(cdouble(g.values[std::abs(t)]), {t + q});
  auto rsols = univariate_roots(lp);
  std::vector<cdouble> roots;
  for (const auto& s : rsols.points) roots.push_back(s.point[0]);

  // Pair each root with its reciprocal.
  std::vector<bool> used(roots.size(), false);
  std::vector<cdouble> reps;
  for (int pair = 0; pair < q; ++pair) {
    int best_i = -1;
    double best_mod = -1;
    for (size_t i = 0; i < roots.size(); ++i)
      if (!used[i] && std::abs(roots[i]) > best_mod) {
        best_mod = std::abs(roots[i]);
        best_i = static_cast<int>(i);
      }
    used[best_i] = true;
    int best_j = -1;
    double best_err = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < roots.size(); ++j) {
      if (used[j]) continue;
      double err = std::abs(roots[best_i] * roots[j] - cdouble(1));
      if (err < best_err) {
        best_err = err;
        best_j = static_cast<int>(j);
      }
    }
    used[best_j] = true;
    if (std::abs(std::abs(roots[best_i]) - 1.0) < 1e-7) fib.boundary = true;
    reps.push_back(roots[best_i]);  // |rep| >= 1
  }

  // Enumerate flips (x - alpha) -> (alpha x - 1), i.e. alpha -> 1/alpha.
  for (int subset = 0; subset < (1 << q); ++subset) {
    std::vector<cdouble> chosen(q);
    for (int i = 0; i < q; ++i)
      chosen[i] = (subset >> i) & 1 ? cdouble(1) / reps[i] : reps[i];
    // monic prod (x - r_i)
    std::vector<cdouble> c{cdouble(1)};
    for (const auto& r : chosen) {
      std::vector<cdouble> nc(c.size() + 1, cdouble(0));
      for (size_t k = 0; k < c.size(); ++k) {
        nc[k] += -r * c[k];
        nc[k + 1] += c[k];
      }
      c = std::move(nc);
    }
    auto gc = gamma_map_complex(g.order, c);
    if (std::abs(gc[0]) < 1e-14 * (1.0 + g.norm())) continue;
    cdouble lambda = std::sqrt(cdouble(g.values[0]) / gc[0]);
    for (auto& x : c) x *= lambda;
    push_candidate(fib, std::move(c), g, roundtrip_tol, 1e-6);
  }

  if (!complex_fiber) {
    Fiber real_fib(g.order);
    real_fib.boundary = fib.boundary;
    for (size_t i = 0; i < fib.points.size(); ++i)
      if (fib.is_real[i]) {
        real_fib.points.push_back(fib.points[i]);
        real_fib.is_real.push_back(true);
      }
    return real_fib;
  }
  return fib;
}

Fiber fiber_generic(const AcovTable& g, const FiberOptions& opts) {
  const Order& order = g.order;
  long Q1 = order.coef_count();
  if (Q1 > 9) throw std::runtime_error("fiber_generic: Q+1 > 9 exceeds the path budget");
  long n_eq = order.half_lag_count();

  auto gp = gamma_polynomials(order);
  std::vector<MPoly> full;
  for (long i = 0; i < n_eq; ++i) {
    MPoly f = gp[i];
    f -= MPoly::constant(static_cast<int>(Q1), cdouble(g.values[i]));
    full.push_back(std::move(f));
  }
  PolySystem full_sys{full};

  std::vector<int> chosen_eqs;
  if (n_eq > Q1) {
    // Well-conditioned square subsystem: row selection by pivoted QR of the
    // Jacobian at a random point.
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<cdouble> a0(Q1);
    for (auto& x : a0) x = cdouble(uni(rng), 0);
    Eigen::MatrixXd jt(Q1, n_eq);
    for (long i = 0; i < n_eq; ++i)
      for (long j = 0; j < Q1; ++j)
        jt(j, i) = full[i].derivative(static_cast<int>(j)).eval(a0).real();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jt);
    auto perm = qr.colsPermutation().indices();
    for (long j = 0; j < Q1; ++j) chosen_eqs.push_back(perm(j));
  } else {
    for (long i = 0; i < n_eq; ++i) chosen_eqs.push_back(static_cast<int>(i));
  }

  PolySystem sq;
  for (int i : chosen_eqs) sq.equations.push_back(full[i]);

  TrackOptions topts;
  topts.max_paths = opts.max_paths;
  topts.seed = opts.seed;
  auto sols = solve_total_degree(sq, topts);

  Fiber fib(order);
  for (const auto& s : sols.points) {
    if (!s.converged) continue;
    if (full_sys.residual(s.point) > opts.roundtrip_tol * (1.0 + g.norm())) continue;
    push_candidate(fib, s.point, g, opts.roundtrip_tol, opts.dedup_tol);
  }
  if (fib.points.empty()) throw std::runtime_error("fiber_generic: no solution passes the full system");
  return fib;
}

Fiber fiber_ma11(const AcovTable& g, bool allow_complex) {
  if (!(g.order.dim() == 2 && g.order[0] == 1 && g.order[1] == 1))
    throw std::invalid_argument("fiber_ma11: order must be (1,1)");
  double g00 = g.at({0, 0}), g01 = g.at({0, 1}), g1m1 = g.at({1, -1});
  double g10 = g.at({1, 0}), g11 = g.at({1, 1});
  double scale = g.norm();

  bool separable = singular_component_membership(g, 1e-8).count(SingularComponent::C3) > 0;
  double den = 2.0 * (g11 - g1m1);

  Fiber fib(g.order);
  const double rt_tol = 1e-7;

  if (separable) {
    // theta factors into two linear forms; flips act per factor.
    cdouble S = std::sqrt(cdouble(g00 * g00 - 4.0 * (g01 * g01 + g10 * g10 - 4.0 * g11 * g11)));
    cdouble base = 2.0 * g00 * g00 - 4.0 * (g01 * g01 + g10 * g10);
    cdouble Tp = std::sqrt(2.0 * g00 * S + base);
    cdouble Tm = std::sqrt(-2.0 * g00 * S + base);
    for (int t1 : {1, -1})
      for (int t2 : {1, -1}) {
        cdouble a00 = 0.5 * std::sqrt(cdouble(g00) + S - double(t1) * Tp);
        cdouble a11 = 0.5 * std::sqrt(cdouble(g00) + S + double(t1) * Tp);
        cdouble a01 = 0.5 * std::sqrt(cdouble(g00) - S - double(t2) * Tm);
        cdouble a10 = 0.5 * std::sqrt(cdouble(g00) - S + double(t2) * Tm);
        for (int mask = 0; mask < 8; ++mask) {
          double s01 = (mask & 1) ? -1 : 1, s10 = (mask & 2) ? -1 : 1, s11 = (mask & 4) ? -1 : 1;
          std::vector<cdouble> cand = {a00, s01 * a01, s10 * a10, s11 * a11};
          push_candidate(fib, cand, g, rt_tol, 1e-6);
          // the other preimages: flips of each linear factor
          push_candidate(fib, reverse_axis_complex(g.order, cand, 0), g, rt_tol, 1e-6);
          push_candidate(fib, reverse_axis_complex(g.order, cand, 1), g, rt_tol, 1e-6);
          push_candidate(fib, reverse_complex(g.order, cand), g, rt_tol, 1e-6);
        }
      }
  } else if (std::abs(den) <= 1e-9 * (1.0 + scale)) {
    return fiber_generic(g);
  } else {
    cdouble p = cdouble(g00 * g11 - g01 * g10);
    cdouble r = cdouble(g01 * g10 - g00 * g1m1);
    cdouble D1 = std::sqrt(p * p - 4.0 * g11 * g11 * (g11 - g1m1) * (g11 - g1m1));
    cdouble D2 = std::sqrt(r * r - 4.0 * g1m1 * g1m1 * (g11 - g1m1) * (g11 - g1m1));
    cdouble v00[2] = {(p - D1) / den, (p + D1) / den};
    cdouble v10[2] = {(r - D2) / den, (r + D2) / den};
    for (int b1 = 0; b1 < 2; ++b1)
      for (int b2 = 0; b2 < 2; ++b2) {
        cdouble a00 = std::sqrt(v00[b1]), a11 = std::sqrt(v00[1 - b1]);
        cdouble a10 = std::sqrt(v10[b2]), a01 = std::sqrt(v10[1 - b2]);
        for (int mask = 0; mask < 8; ++mask) {
          double s01 = (mask & 1) ? -1 : 1, s10 = (mask & 2) ? -1 : 1, s11 = (mask & 4) ? -1 : 1;
          push_candidate(fib, {a00, s01 * a01, s10 * a10, s11 * a11}, g, rt_tol, 1e-6);
        }
      }
  }

  if (!allow_complex) {
    Fiber real_fib(g.order);
    for (size_t i = 0; i < fib.points.size(); ++i)
      if (fib.is_real[i]) {
        real_fib.points.push_back(fib.points[i]);
        real_fib.is_real.push_back(true);
      }
    if (real_fib.points.empty()) throw std::runtime_error("fiber_ma11: no real fiber");
    return real_fib;
  }
  if (fib.points.empty()) throw std::runtime_error("fiber_ma11: closed forms produced no preimage");
  return fib;
}

Fiber fiber_ma2_triangular(const AcovTable& g) {
  if (!(g.order.dim() == 1 && g.order[0] == 2))
    throw std::invalid_argument("fiber_ma2_triangular: order must be 2");
  double g0 = g.values[0], g1 = g.values[1], g2 = g.values[2];
  Fiber fib(g.order);
  const double rt_tol = 1e-7;

  cdouble A(g0 + 2 * g2);
  cdouble disc = std::sqrt(A * A - 4.0 * g1 * g1);
  for (int b : {0, 1}) {
    cdouble a1sq = (A + (b ? disc : -disc)) / 2.0;
    for (int sgn : {1, -1}) {
      cdouble a1 = double(sgn) * std::sqrt(a1sq);
      if (std::abs(a1) < 1e-12 * (1.0 + g.norm())) continue;
      cdouble inner = std::sqrt(cdouble(g1 * g1) - 4.0 * a1sq * g2);
      for (int c : {0, 1}) {
        cdouble a0 = (cdouble(g1) + (c ? inner : -inner)) / (2.0 * a1);
        cdouble a2 = (cdouble(g1) - a0 * a1) / a1;
        push_candidate(fib, {a0, a1, a2}, g, rt_tol, 1e-6);
      }
    }
  }
  return fib;
}

CoefGrid invertible_representative(const Fiber& f, double unit_circle_tol) {
  if (f.order.dim() != 1) throw std::invalid_argument("invertible_representative: d must be 1");
  std::optional<CoefGrid> result;
  for (size_t i = 0; i < f.points.size(); ++i) {
    if (!f.is_real[i]) continue;
    std::vector<double> a = real_part(f.points[i]);
    if (a[0] < 0)
      for (auto& x : a) x = -x;
    if (a[0] <= 0) continue;  // a_0 = 0 means a root at the origin
    bool invertible = true;
    for (const auto& r : ma_polynomial_roots(a))
      if (std::abs(r) < 1.0 + unit_circle_tol) {
        invertible = false;
        break;
      }
    if (invertible && !result) result = CoefGrid(f.order, std::move(a));
  }
  if (!result)
    throw std::runtime_error("invertible_representative: no point with all roots outside the unit disk");
  return *result;
}

}  // namespace macov
