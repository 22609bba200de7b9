#include "macov/estimate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "macov/symbolic.hpp"

namespace macov {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<std::vector<int>> lattice_sites(const std::vector<int>& extents) {
  int d = static_cast<int>(extents.size());
  std::vector<std::vector<int>> sites;
  std::vector<int> cur(d, 1);
  while (true) {
    sites.push_back(cur);
    int i = d - 1;
    while (i >= 0 && cur[i] == extents[i]) cur[i--] = 1;
    if (i < 0) break;
    ++cur[i];
  }
  return sites;  // lexicographic by construction
}

// Lower-band Cholesky; returns false if a pivot is not positive.
// band(r, j) holds L[j+r][j], r = 0..bw.
bool banded_cholesky(Eigen::MatrixXd& band, int m, int bw) {
  for (int j = 0; j < m; ++j) {
    for (int r = 0; r <= bw && j + r < m; ++r) {
      int i = j + r;
      double s = band(r, j);
      int k0 = std::max(0, i - bw);
      for (int k = k0; k < j; ++k) {
        int ri = i - k, rj = j - k;
        if (ri <= bw) s -= band(ri, k) * band(rj, k);
      }
      if (r == 0) {
        if (s <= 0 || !std::isfinite(s)) return false;
        band(0, j) = std::sqrt(s);
      } else {
        band(r, j) = s / band(0, j);
      }
    }
  }
  return true;
}

}  // namespace

MleProblem::MleProblem(Order ord, FieldGrid y, double radius)
    : order(std::move(ord)), sample(std::move(y)), box_radius(radius) {
  if (sample.dim() != order.dim()) throw std::invalid_argument("MleProblem: dimension mismatch");
  if (sample.size() < 2) throw std::invalid_argument("MleProblem: sample size must be >= 2");
  if (box_radius <= 0) {
    double m = sample.mean(), s2 = 0;
    for (double v : sample.values) s2 += (v - m) * (v - m);
    box_radius = 10.0 * std::sqrt(s2 / sample.values.size()) + 1.0;
  }
}

std::vector<std::vector<int>> MleProblem::sites() const { return lattice_sites(sample.extents); }

std::vector<double> mle_covariance_dense(const CoefGrid& a, const std::vector<std::vector<int>>& sites) {
  AcovTable g = gamma_map(a);
  int m = static_cast<int>(sites.size());
  int d = a.order.dim();
  std::vector<double> sigma(static_cast<size_t>(m) * m);
  std::vector<int> lag(d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < d; ++k) lag[k] = sites[i][k] - sites[j][k];
      sigma[static_cast<size_t>(i) * m + j] = g.at(lag);
    }
  return sigma;
}

double mle_loglik(const CoefGrid& a, const MleProblem& p) {
  if (!(a.order == p.order)) throw std::invalid_argument("mle_loglik: order mismatch");
  AcovTable g = gamma_map(a);
  auto sites = p.sites();
  int m = static_cast<int>(sites.size());
  int d = p.order.dim();

  // Bandwidth of the lexicographic flattening.
  int bw = 0;
  std::vector<int> lag(d);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < i; ++j) {
      bool support = true;
      for (int k = 0; k < d; ++k) {
        lag[k] = sites[i][k] - sites[j][k];
        if (std::abs(lag[k]) > p.order[k]) support = false;
      }
      if (support) bw = std::max(bw, i - j);
    }
  }

  Eigen::MatrixXd band = Eigen::MatrixXd::Zero(bw + 1, m);
  for (int j = 0; j < m; ++j)
    for (int r = 0; r <= bw && j + r < m; ++r) {
      for (int k = 0; k < d; ++k) lag[k] = sites[j + r][k] - sites[j][k];
      band(r, j) = g.at(lag);
    }

  if (!banded_cholesky(band, m, bw)) return kNegInf;

  // Forward solve L w = Y.
  std::vector<double> w(m);
  double logdet_half = 0, quad = 0;
  for (int i = 0; i < m; ++i) {
    double s = p.sample.values[i];
    int k0 = std::max(0, i - bw);
    for (int k = k0; k < i; ++k) s -= band(i - k, k) * w[k];
    w[i] = s / band(0, i);
    logdet_half += std::log(band(0, i));
    quad += w[i] * w[i];
  }
  return -logdet_half - 0.5 * quad;
}

std::vector<double> mle_grad(const CoefGrid& a, const MleProblem& p) {
  int n = static_cast<int>(a.values.size());
  std::vector<double> grad(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double h = 1e-6 * (1.0 + std::abs(a.values[k]));
    CoefGrid ap = a, am = a;
    ap.values[k] += h;
    am.values[k] -= h;
    double fp = mle_loglik(ap, p), fm = mle_loglik(am, p);
    if (std::isfinite(fp) && std::isfinite(fm)) {
      grad[k] = (fp - fm) / (2 * h);
    } else {
      double f0 = mle_loglik(a, p);
      if (std::isfinite(fp))
        grad[k] = (fp - f0) / h;
      else if (std::isfinite(fm))
        grad[k] = (f0 - fm) / h;
      else
        grad[k] = 0.0;
    }
  }
  return grad;
}

MleLocalResult mle_solve_local(const MleProblem& p, const CoefGrid& init) {
  const int n = static_cast<int>(init.values.size());
  CoefGrid a = init;
  double f = mle_loglik(a, p);
  if (!std::isfinite(f)) throw std::runtime_error("mle_solve_local: infeasible initial point");

  auto clamp_box = [&](CoefGrid& c) {
    for (auto& v : c.values) v = std::clamp(v, -p.box_radius, p.box_radius);
  };

  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);  // inverse Hessian (of -loglik)
  Eigen::VectorXd g(n), g_new(n);
  {
    auto gv = mle_grad(a, p);
    for (int i = 0; i < n; ++i) g(i) = -gv[i];
  }

  bool converged = false;
  for (int it = 0; it < 500; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= 1e-8 * (1.0 + std::abs(f))) {
      converged = true;
      break;
    }
    Eigen::VectorXd dir = -H * g;
    if (g.dot(dir) >= 0) {  // safeguard: reset to steepest descent
      H.setIdentity();
      dir = -g;
    }

    // Backtracking line search on -loglik with Armijo condition.
    double t = 1.0;
    double fmin = -f;  // minimize fmin
    double slope = g.dot(dir);
    CoefGrid a_new = a;
    double f_new = f;
    bool ok = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (int i = 0; i < n; ++i) a_new.values[i] = a.values[i] + t * dir(i);
      clamp_box(a_new);
      double cand = mle_loglik(a_new, p);
      if (std::isfinite(cand) && -cand <= fmin + 1e-4 * t * slope) {
        f_new = cand;
        ok = true;
        break;
      }
      t *= 0.5;
    }
    if (!ok) break;  // line-search failure; return best iterate

    auto gv = mle_grad(a_new, p);
    for (int i = 0; i < n; ++i) g_new(i) = -gv[i];

    Eigen::VectorXd s(n), yv = g_new - g;
    for (int i = 0; i < n; ++i) s(i) = a_new.values[i] - a.values[i];
    double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {  // BFGS update
      Eigen::VectorXd Hy = H * yv;
      double yHy = yv.dot(Hy);
      H += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
           (Hy * s.transpose() + s * Hy.transpose()) / sy;
    }
    a = a_new;
    f = f_new;
    g = g_new;
  }
  return {a, f, converged};
}

ExactMa1 mle_exact_ma1_n2(double y1, double y2) {
  Order ord({1});
  auto loglik_of = [&](const CoefGrid& a) {
    FieldGrid y({2}, {y1, y2});
    MleProblem p(ord, y);
    return mle_loglik(a, p);
  };

  if (y1 * y2 == 0.0) {
    // Degenerate model a0 a1 = 0; variance (Y1^2 + Y2^2)/2 maximizes.
    double v = (y1 * y1 + y2 * y2) / 2.0;
    CoefGrid a(ord, {std::sqrt(v), 0.0});
    return {a, "degenerate", loglik_of(a)};
  }

  double w = (y1 * y1 + y2 * y2) / (2.0 * y1 * y2);
  if (w > -2.0 && w < 0.0) {
    double v = (y1 * y1 + y2 * y2 + y1 * y2) / 3.0;
    CoefGrid a(ord, {std::sqrt(v), -std::sqrt(v)});
    return {a, "(3)", loglik_of(a)};
  }
  if (w > 0.0 && w < 2.0) {
    double v = (y1 * y1 + y2 * y2 - y1 * y2) / 3.0;
    CoefGrid a(ord, {std::sqrt(v), std::sqrt(v)});
    return {a, "(2)", loglik_of(a)};
  }
  // |W| >= 2: group (1), a0 a1 = Y1 Y2 and a0^2 + a1^2 = (Y1^2 + Y2^2)/2.
  double s = (y1 * y1 + y2 * y2) / 2.0;
  double prod = y1 * y2;
  double disc = std::max(0.0, s * s - 4.0 * prod * prod);
  double z_hi = (s + std::sqrt(disc)) / 2.0;
  double a0 = std::sqrt(z_hi);
  double a1 = prod / a0;
  CoefGrid a(ord, {a0, a1});
  return {a, "(1)", loglik_of(a)};
}

// Y-independent symbolic data for one (order, extents) pair: the covariance
// matrix, its determinant and the first cleared-score half t1_k = |Sigma|
// d|Sigma|/da_k. Shared across samples.
struct ScoreCore {
  Order order;
  std::vector<int> extents;
  std::vector<std::vector<int>> sites;
  std::vector<std::vector<MPoly>> sigma;
  std::vector<MPoly> gp;      // gamma polynomials per canonical half-lag
  std::vector<MPoly> dgam;    // dgam[k * nlags + L]
  MPoly det;
  std::vector<MPoly> ddet;
  std::vector<MPoly> t1;
  std::vector<int> pair_lag;  // m*m -> canonical lag index, -1 off support
  int m = 0, nvars = 0;
  long nlags = 0;

  ScoreCore(const Order& ord, const std::vector<int>& ext);
  std::vector<MPoly> cramer_u(const std::vector<cdouble>& Y) const;
  std::vector<MPoly> term2(const std::vector<MPoly>& u, const std::vector<MPoly>& v) const;
  bool genuine(const std::vector<cdouble>& z, const std::vector<MPoly>& t2) const;
};

ScoreCore::ScoreCore(const Order& ord, const std::vector<int>& ext)
    : order(ord), extents(ext), det(0) {
  sites = lattice_sites(extents);
  m = static_cast<int>(sites.size());
  if (m > 16) throw std::invalid_argument("ml_score_system: sample too large for symbolic clearing");
  nvars = static_cast<int>(order.coef_count());
  nlags = order.half_lag_count();
  int d = order.dim();

  gp = gamma_polynomials(order);
  for (int k = 0; k < nvars; ++k)
    for (long L = 0; L < nlags; ++L) dgam.push_back(gp[L].derivative(k));

  MPoly zero(nvars);
  sigma.assign(m, std::vector<MPoly>(m, zero));
  pair_lag.assign(static_cast<size_t>(m) * m, -1);
  std::vector<int> lag(d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      bool support = true;
      for (int k = 0; k < d; ++k) {
        lag[k] = sites[i][k] - sites[j][k];
        if (std::abs(lag[k]) > order[k]) support = false;
      }
      if (!support) continue;
      std::vector<int> c = is_canonical_half_lag(lag) ? lag : negate_lag(lag);
      long L = order.half_lag_index(c);
      pair_lag[static_cast<size_t>(i) * m + j] = static_cast<int>(L);
      sigma[i][j] = gp[L];
    }

  det = sym_det(sigma);
  for (int k = 0; k < nvars; ++k) {
    ddet.push_back(det.derivative(k));
    t1.push_back(det * ddet.back());
  }
}

// u = adj(Sigma) Y via Cramer: u_i = det(Sigma with column i -> Y).
std::vector<MPoly> ScoreCore::cramer_u(const std::vector<cdouble>& Y) const {
  if (static_cast<int>(Y.size()) != m) throw std::invalid_argument("ml_score_system: Y size mismatch");
  std::vector<MPoly> u(m);
  for (int i = 0; i < m; ++i) {
    auto mod = sigma;
    for (int r = 0; r < m; ++r) mod[r][i] = MPoly::constant(nvars, Y[r]);
    u[i] = sym_det(mod);
  }
  return u;
}

// term2_k for the bilinear form u' (dSigma/da_k) v, grouped by lag so the
// derivative of each gamma entry is applied once.
std::vector<MPoly> ScoreCore::term2(const std::vector<MPoly>& u, const std::vector<MPoly>& v) const {
  std::vector<MPoly> w(nlags, MPoly(nvars));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      int L = pair_lag[static_cast<size_t>(i) * m + j];
      if (L >= 0) w[L] += u[i] * v[j];
    }
  std::vector<MPoly> out;
  for (int k = 0; k < nvars; ++k) {
    MPoly t2(nvars);
    for (long L = 0; L < nlags; ++L) t2 += dgam[k * nlags + L] * w[L];
    out.push_back(std::move(t2));
  }
  return out;
}

namespace {

// Sum of |coef| |z|^exps: bound on the evaluation magnitude, hence (times
// machine epsilon) on the roundoff of eval at z.
double abs_eval(const MPoly& p, const std::vector<double>& zabs) {
  double s = 0;
  for (const auto& t : p.terms()) {
    double mterm = std::abs(t.coef);
    for (size_t v = 0; v < zabs.size(); ++v)
      for (int e = 0; e < t.exps[v]; ++e) mterm *= zabs[v];
    s += mterm;
  }
  return s;
}

}  // namespace

// A candidate is a genuine score zero only if |Sigma| is nonzero there and
// each cleared equation vanishes by cancellation of its two sizeable halves.
// The cleared system's artifacts fail one of the two: its |Sigma| = 0
// components evaluate the determinant inside the roundoff floor, and the
// flat basin around the high-multiplicity root a = 0 leaves the halves
// uncancelled. Thresholds are relative to roundoff bounds, not to the point
// scale: genuine zeros with small (but nonzero) |Sigma| are kept.
bool ScoreCore::genuine(const std::vector<cdouble>& z, const std::vector<MPoly>& t2) const {
  std::vector<double> zabs(z.size());
  for (size_t i = 0; i < z.size(); ++i) zabs[i] = std::abs(z[i]);
  cdouble D = det.eval(z);
  if (std::abs(D) <= 1e-10 * abs_eval(det, zabs)) return false;
  for (int k = 0; k < nvars; ++k) {
    cdouble h1 = D * ddet[k].eval(z);
    cdouble h2 = t2[k].eval(z);
    double mag = std::abs(h1) + std::abs(h2);
    double noise = 1e-10 * (abs_eval(t1[k], zabs) + abs_eval(t2[k], zabs));
    if (mag <= noise) continue;  // equation vanishes to working precision
    if (std::abs(h1 - h2) > std::max(1e-6 * mag, noise)) return false;
  }
  return true;
}

namespace {

std::vector<cdouble> complexify(const std::vector<double>& Y) {
  return std::vector<cdouble>(Y.begin(), Y.end());
}

PolySystem score_system_for(const ScoreCore& core, const std::vector<MPoly>& t2) {
  // score_k |Sigma|^2 = -1/2 |Sigma| d|Sigma|/da_k + 1/2 u' (dSigma/da_k) u;
  // scaled by -2 (same zero set).
  PolySystem sys;
  for (int k = 0; k < core.nvars; ++k) sys.equations.push_back(core.t1[k] - t2[k]);
  return sys;
}

// Data segment Y(s) = ya + s (yb - ya): since u is linear in Y the cleared
// system is quadratic in s,
//   eq(z,s) = t1 - term2(u0,u0) - 2s term2(u0,ud) - s^2 term2(ud,ud).
struct DataSegment {
  PolySystem p0, p1, p2;
  std::vector<MPoly> t2_target;  // term2 at the endpoint yb
};

DataSegment make_segment(const ScoreCore& core, const std::vector<cdouble>& ya,
                         const std::vector<cdouble>& yb) {
  auto u0 = core.cramer_u(ya);
  std::vector<cdouble> dY(core.m);
  for (int i = 0; i < core.m; ++i) dY[i] = yb[i] - ya[i];
  auto ud = core.cramer_u(dY);

  auto A = core.term2(u0, u0);
  auto Bh = core.term2(u0, ud);  // term2 is symmetric in (u, v)
  auto C = core.term2(ud, ud);

  DataSegment seg;
  seg.p0 = score_system_for(core, A);
  seg.t2_target.assign(core.nvars, MPoly(core.nvars));
  for (int k = 0; k < core.nvars; ++k) {
    seg.p1.equations.push_back(Bh[k] * cdouble(-2.0));
    seg.p2.equations.push_back(C[k] * cdouble(-1.0));
    seg.t2_target[k] = A[k] + Bh[k] * cdouble(2.0) + C[k];
  }
  return seg;
}

// Tracks the given score zeros at ya along the data segment to yb and keeps
// the endpoints certified as genuine zeros there.
std::vector<std::vector<cdouble>> track_data_segment(const ScoreCore& core,
                                                     const std::vector<cdouble>& ya,
                                                     const std::vector<cdouble>& yb,
                                                     const std::vector<std::vector<cdouble>>& starts,
                                                     const TrackOptions& opts, std::uint64_t seed) {
  DataSegment seg = make_segment(core, ya, yb);
  TrackOptions leg = opts;
  leg.seed = seed;
  SolutionSet res = solve_poly_path(seg.p0, seg.p1, seg.p2, starts, leg);
  std::vector<std::vector<cdouble>> out;
  for (const auto& s : res.points)
    if (s.converged && core.genuine(s.point, seg.t2_target)) out.push_back(s.point);
  return out;
}

bool known_mod_negation(const std::vector<std::vector<cdouble>>& set,
                        const std::vector<cdouble>& z, double tol) {
  std::vector<cdouble> nz(z.size());
  for (size_t i = 0; i < z.size(); ++i) nz[i] = -z[i];
  for (const auto& w : set)
    if (points_close(z, w, tol) || points_close(nz, w, tol)) return true;
  return false;
}

// Score zeros with near-singular Sigma are ill-conditioned: their endpoint
// scatter can exceed the generic cluster tolerance while distinct zeros stay
// orders of magnitude further apart. Dedup with a wider net.
double score_dedup_tol(const TrackOptions& opts) { return std::max(opts.cluster_tol, 1e-4); }

// Total-degree solve of the score system at data y, endpoints certified
// genuine and deduplicated modulo sign.
std::vector<std::vector<cdouble>> genuine_zeros_total(const ScoreCore& core,
                                                      const std::vector<cdouble>& y,
                                                      const TrackOptions& opts) {
  auto u = core.cramer_u(y);
  auto t2 = core.term2(u, u);
  PolySystem sys = score_system_for(core, t2);
  SolutionSet sols = solve_total_degree(sys, opts);
  std::vector<std::vector<cdouble>> pts;
  for (const auto& s : sols.points)
    if (s.converged && core.genuine(s.point, t2)) pts.push_back(s.point);
  std::vector<Symmetry> negation = {[](const std::vector<cdouble>& z) {
    std::vector<cdouble> out(z.size());
    for (size_t i = 0; i < z.size(); ++i) out[i] = -z[i];
    return out;
  }};
  return dedup_points(pts, negation, score_dedup_tol(opts));
}

// The total-degree solve can lose whole solution orbits to path crossings in
// the flat basin around the high-multiplicity root a = 0 once the sample
// grows. Two recovery passes: (a) solve independent generic instances and
// transport their zeros to y0 along data segments - instances lose different
// orbits, so the union saturates; (b) monodromy loops y0 -> y1 -> y0, which
// permute each orbit and pick up stragglers within reached components.
void monodromy_enrich(const ScoreCore& core, const std::vector<cdouble>& y0,
                      std::vector<std::vector<cdouble>>& sols, const TrackOptions& opts) {
  std::mt19937_64 rng(opts.seed ^ 0x6d6f6e6fULL);
  auto normal = [&]() {
    double u1 = ((rng() >> 11) + 1.0) * 0x1.0p-53, u2 = (rng() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };
  double scale = 0;
  for (const auto& y : y0) scale = std::max(scale, std::abs(y));
  if (scale == 0) scale = 1;

  for (int j = 0; j < 2; ++j) {
    std::vector<cdouble> yj(core.m);
    for (auto& y : yj) y = cdouble(normal(), normal()) * scale;
    TrackOptions aux = opts;
    aux.seed = opts.seed + 0xa5a5a5ULL * (j + 1);
    auto pts = genuine_zeros_total(core, yj, aux);
    auto moved = track_data_segment(core, yj, y0, pts, opts, aux.seed ^ 0x3d6ULL);
    for (auto& z : moved)
      if (!known_mod_negation(sols, z, score_dedup_tol(opts))) sols.push_back(std::move(z));
  }

  int stable = 0;
  for (int round = 0; round < 12 && stable < 3; ++round) {
    std::vector<cdouble> y1(core.m);
    for (auto& y : y1) y = cdouble(normal(), normal()) * scale;
    std::uint64_t seed = opts.seed + 0x9e3779b9ULL * (round + 1);
    auto mid = track_data_segment(core, y0, y1, sols, opts, seed);
    if (mid.empty()) {
      ++stable;
      continue;
    }
    auto back = track_data_segment(core, y1, y0, mid, opts, seed ^ 0x5bf0a8ULL);
    bool grew = false;
    for (auto& z : back)
      if (!known_mod_negation(sols, z, score_dedup_tol(opts))) {
        sols.push_back(std::move(z));
        grew = true;
      }
    stable = grew ? 0 : stable + 1;
  }
}

}  // namespace

PolySystem ml_score_system(const Order& order, const std::vector<int>& extents,
                           const std::vector<double>& Y) {
  ScoreCore core(order, extents);
  auto u = core.cramer_u(complexify(Y));
  return score_system_for(core, core.term2(u, u));
}

MlDegree ml_degree_count(const Order& order, const std::vector<int>& extents,
                         const std::vector<double>& Y, const TrackOptions& opts) {
  ScoreCore core(order, extents);
  auto u = core.cramer_u(complexify(Y));
  auto t2 = core.term2(u, u);
  PolySystem sys = score_system_for(core, t2);
  SolutionSet sols = solve_total_degree(sys, opts);

  std::vector<std::vector<cdouble>> pts;
  long remaining_suspect = 0;
  for (const auto& s : sols.points) {
    if (s.converged) {
      if (core.genuine(s.point, t2)) pts.push_back(s.point);
      continue;
    }
    // Suspect endpoint: a Newton polish either lands it on a genuine zero
    // (usually one already counted) or exposes it as a cleared-system
    // artifact; only refinement failures stay uncertified.
    try {
      auto z = newton_refine(sys, s.point);
      if (core.genuine(z, t2)) pts.push_back(std::move(z));
    } catch (const std::exception&) {
      if (core.genuine(s.point, t2))
        ++remaining_suspect;
      // stalls inside the flat a = 0 basin are artifacts, not solutions
    }
  }

  std::vector<Symmetry> negation = {[](const std::vector<cdouble>& z) {
    std::vector<cdouble> out(z.size());
    for (size_t i = 0; i < z.size(); ++i) out[i] = -z[i];
    return out;
  }};
  auto reps = dedup_points(pts, negation, score_dedup_tol(opts));
  if (!reps.empty()) monodromy_enrich(core, complexify(Y), reps, opts);

  MlDegree res;
  res.count = static_cast<int>(reps.size());
  res.suspect = remaining_suspect;
  res.points = std::move(reps);
  return res;
}

ScoreFamily ml_score_family(const Order& order, const std::vector<int>& extents,
                            const TrackOptions& opts) {
  ScoreFamily fam{order, extents, {}, {}, nullptr};
  auto core = std::make_shared<ScoreCore>(order, extents);
  fam.core = core;

  // Generic complex base data; a complex base point keeps the per-sample
  // parameter segments off the discriminant.
  std::mt19937_64 rng(opts.seed ^ 0x594073ULL);
  auto normal = [&]() {
    double u1 = ((rng() >> 11) + 1.0) * 0x1.0p-53, u2 = (rng() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };
  fam.y0.resize(core->m);
  for (auto& y : fam.y0) y = cdouble(normal(), normal());

  // The score system is odd, so zeros come in +-z pairs carrying the same
  // gamma image; one representative per pair is tracked downstream.
  fam.solutions = genuine_zeros_total(*core, fam.y0, opts);
  if (fam.solutions.empty()) throw std::runtime_error("ml_score_family: no base solutions found");
  monodromy_enrich(*core, fam.y0, fam.solutions, opts);
  return fam;
}

std::optional<MleLocalResult> mle_solve_score(const MleProblem& p, const ScoreFamily& fam,
                                              const TrackOptions& opts) {
  if (!(p.order == fam.order) || p.sample.extents != fam.extents)
    throw std::invalid_argument("mle_solve_score: family mismatch");
  const ScoreCore& core = *fam.core;

  DataSegment seg = make_segment(core, fam.y0, complexify(p.sample.values));
  SolutionSet sols = solve_poly_path(seg.p0, seg.p1, seg.p2, fam.solutions, opts);

  std::optional<MleLocalResult> best;
  for (const auto& s : sols.points) {
    if (!s.converged || !core.genuine(s.point, seg.t2_target)) continue;
    if (!point_is_real(s.point, opts.real_tol)) continue;
    CoefGrid a(p.order, real_part(s.point));
    double ll = mle_loglik(a, p);
    if (!std::isfinite(ll)) continue;
    if (!best || ll > best->loglik) best = MleLocalResult{a, ll, true};
  }
  return best;
}

std::optional<MleLocalResult> mle_solve_score(const MleProblem& p, const TrackOptions& opts) {
  std::vector<double> Y = p.sample.values;
  MlDegree deg = ml_degree_count(p.order, p.sample.extents, Y, opts);

  std::optional<MleLocalResult> best;
  for (const auto& z : deg.points) {
    if (!point_is_real(z, opts.real_tol)) continue;
    CoefGrid a(p.order, real_part(z));
    double ll = mle_loglik(a, p);
    if (!std::isfinite(ll)) continue;
    if (!best || ll > best->loglik) best = MleLocalResult{a, ll, true};
  }
  return best;
}

InnovationsResult innovations_d1(const AcovTable& g, int iters) {
  if (g.order.dim() != 1) throw std::invalid_argument("innovations_d1: d must be 1");
  int q = g.order[0];
  auto gamma = [&](int h) { return h <= q ? g.values[h] : 0.0; };

  int M = std::max(iters, q + 1);
  std::vector<std::vector<double>> theta(M + 1);
  std::vector<double> v(M + 1);
  v[0] = gamma(0);
  if (v[0] <= 0) throw std::runtime_error("innovations_d1: gamma not positive definite");

  for (int mi = 1; mi <= M; ++mi) {
    theta[mi].assign(mi + 1, 0.0);
    for (int k = 0; k < mi; ++k) {
      double s = gamma(mi - k);
      for (int j = 0; j < k; ++j) s -= theta[k][k - j] * theta[mi][mi - j] * v[j];
      theta[mi][mi - k] = s / v[k];
    }
    double vm = gamma(0);
    for (int j = 0; j < mi; ++j) vm -= theta[mi][mi - j] * theta[mi][mi - j] * v[j];
    if (vm <= 0 || !std::isfinite(vm)) throw std::runtime_error("innovations_d1: gamma not positive definite");
    v[mi] = vm;
  }

  // a ~ (1, theta_{M,1..q}) rescaled so gamma_map matches gamma(0).
  std::vector<double> a(q + 1);
  a[0] = 1.0;
  double ss = 1.0;
  for (int k = 1; k <= q; ++k) {
    a[k] = theta[M][k];
    ss += a[k] * a[k];
  }
  double lambda = std::sqrt(gamma(0) / ss);
  for (auto& x : a) x *= lambda;

  bool converged = true;
  for (int k = 1; k <= q; ++k)
    if (std::abs(theta[M][k] - theta[M - 1][k]) > 1e-6 * (1.0 + std::abs(theta[M][k]))) converged = false;

  return {CoefGrid(g.order, std::move(a)), converged};
}

}  // namespace macov
