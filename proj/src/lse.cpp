#include "macov/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "macov/symbolic.hpp"

namespace macov {

LseProblem::LseProblem(Order ord, AcovTable tgt, std::vector<double> w)
    : order(std::move(ord)), target(std::move(tgt)), weights(std::move(w)) {
  if (!(order == target.order)) throw std::invalid_argument("LseProblem: order mismatch");
  if (weights.empty()) weights.assign(order.half_lag_count(), 1.0);
  if (static_cast<long>(weights.size()) != order.half_lag_count())
    throw std::invalid_argument("LseProblem: weights size");
  for (double w_t : weights)
    if (w_t <= 0) throw std::invalid_argument("LseProblem: weights must be positive");
}

PolySystem lse_critical_system(const LseProblem& p) {
  int nvars = static_cast<int>(p.order.coef_count());
  auto gp = gamma_polynomials(p.order);
  PolySystem sys;
  for (int k = 0; k < nvars; ++k) {
    MPoly eq(nvars);
    for (size_t t = 0; t < gp.size(); ++t) {
      MPoly resid = gp[t] - MPoly::constant(nvars, cdouble(p.target.values[t]));
      eq += (resid * gp[t].derivative(k)) * cdouble(p.weights[t]);
    }
    sys.equations.push_back(std::move(eq));
  }
  return sys;
}

namespace {

double weighted_dist(const LseProblem& p, const std::vector<double>& gamma_a) {
  double s = 0;
  for (size_t t = 0; t < gamma_a.size(); ++t) {
    double d = gamma_a[t] - p.target.values[t];
    s += p.weights[t] * d * d;
  }
  return std::sqrt(s);
}

std::vector<Symmetry> lse_symmetries(const Order& order) {
  return {
      [](const std::vector<cdouble>& z) {
        std::vector<cdouble> out(z.size());
        for (size_t i = 0; i < z.size(); ++i) out[i] = -z[i];
        return out;
      },
      [order](const std::vector<cdouble>& z) { return reverse_complex(order, z); },
  };
}

// Scale below which a critical point is treated as the degenerate a = 0.
double zero_cut(const LseProblem& p) { return 1e-3 * (1.0 + std::sqrt(p.target.norm())); }

std::vector<std::vector<cdouble>> distinct_critical_points(const LseProblem& p,
                                                           const TrackOptions& opts,
                                                           PathStats* stats) {
  PolySystem sys = lse_critical_system(p);
  SolutionSet sols = solve_total_degree(sys, opts);
  if (stats) {
    stats->bezout = sols.bezout;
    stats->converged = sols.n_converged;
    stats->divergent = sols.n_divergent;
    stats->failed = sols.n_failed;
    stats->suspect = sols.n_suspect;
  }

  double cut = zero_cut(p);
  std::vector<std::vector<cdouble>> pts;
  for (const auto& s : sols.points) {
    if (!s.converged) continue;
    double nrm = 0;
    for (const auto& z : s.point) nrm += std::norm(z);
    if (std::sqrt(nrm) <= cut) continue;  // degenerate a = 0 cluster
    pts.push_back(s.point);
  }
  return dedup_points(pts, lse_symmetries(p.order), opts.cluster_tol);
}

// Complex-valued singular-locus membership for critical-point filtering.
bool gamma_on_singular_locus(const std::vector<cdouble>& g, double tol) {
  // order (1,1) canonical slots: (0,0),(0,1),(1,-1),(1,0),(1,1)
  cdouble g00 = g[0], g01 = g[1], g1m1 = g[2], g10 = g[3], g11 = g[4];
  double s = 0;
  for (const auto& x : g) s += std::norm(x);
  s = std::sqrt(s);
  double s1 = tol * s, s2 = tol * s * s;
  bool c1 = std::abs(g10 - g01) <= s1 && std::abs(g00 - 2.0 * g11 - 2.0 * g1m1) <= s1 &&
            std::abs(4.0 * g11 * g1m1 - g01 * g01) <= s2;
  bool c2 = std::abs(g10 + g01) <= s1 && std::abs(g00 + 2.0 * g11 + 2.0 * g1m1) <= s1 &&
            std::abs(4.0 * g11 * g1m1 - g01 * g01) <= s2;
  bool c3 = std::abs(g11 - g1m1) <= s1 && std::abs(g00 * g1m1 - g10 * g01) <= s2;
  return c1 || c2 || c3;
}

}  // namespace

CriticalReport lse_solve(const LseProblem& p, const TrackOptions& opts) {
  if (p.order.coef_count() > 8) throw std::runtime_error("lse_solve: Q+1 > 8 exceeds the budget");
  bool ma11 = p.order.dim() == 2 && p.order[0] == 1 && p.order[1] == 1;
  CriticalReport rep;
  auto pts = distinct_critical_points(p, opts, &rep.stats);

  for (auto& z : pts) {
    CriticalPoint cp;
    cp.a = z;
    cp.is_real = point_is_real(z, opts.real_tol);
    auto gi = gamma_map_complex(p.order, z);
    double gscale = 0;
    for (const auto& g : gi) gscale = std::max(gscale, std::abs(g));
    cp.real_image = true;
    for (const auto& g : gi)
      if (std::abs(g.imag()) > opts.real_tol * (1.0 + gscale)) cp.real_image = false;
    if (ma11) cp.singular_image = gamma_on_singular_locus(gi, 1e-6);
    if (cp.real_image) {
      cp.gamma_image.resize(gi.size());
      for (size_t t = 0; t < gi.size(); ++t) cp.gamma_image[t] = gi[t].real();
      cp.objective = weighted_dist(p, cp.gamma_image);
    }
    rep.points.push_back(std::move(cp));
  }

  // Conjugate pairs share a real gamma image; keep one representative.
  for (size_t i = 0; i < rep.points.size(); ++i) {
    const auto& cp = rep.points[i];
    if (!cp.real_image || cp.singular_image) continue;
    bool dup = false;
    for (int j : rep.real_indices) {
      const auto& prev = rep.points[j].gamma_image;
      double d = 0, s = 0;
      for (size_t t = 0; t < prev.size(); ++t) {
        d = std::max(d, std::abs(prev[t] - cp.gamma_image[t]));
        s = std::max(s, std::abs(prev[t]));
      }
      if (d <= opts.cluster_tol * (1.0 + s)) dup = true;
    }
    if (!dup) rep.real_indices.push_back(static_cast<int>(i));
  }

  if (rep.real_indices.empty()) throw std::runtime_error("lse_solve: no real critical points");
  rep.selected = rep.real_indices.front();
  for (int i : rep.real_indices)
    if (rep.points[i].objective < rep.points[rep.selected].objective) rep.selected = i;
  rep.objective = rep.points[rep.selected].objective;
  return rep;
}

int ed_count_ma11(const LseProblem& p, const TrackOptions& opts) {
  if (!(p.order.dim() == 2 && p.order[0] == 1 && p.order[1] == 1))
    throw std::invalid_argument("ed_count_ma11: order must be (1,1)");
  PathStats stats;
  auto pts = distinct_critical_points(p, opts, &stats);

  int count = 0;
  for (const auto& z : pts) {
    auto g = gamma_map_complex(p.order, z);
    if (gamma_on_singular_locus(g, 1e-6)) continue;
    ++count;
  }
  // Paths ending on the multiple root a = 0 may stall and land in the
  // suspect bin; more than that casts doubt on the count.
  if (stats.suspect > stats.bezout / 4)
    throw std::runtime_error("ed_count_ma11: too many suspect paths to certify a count");
  return count;
}

}  // namespace macov
