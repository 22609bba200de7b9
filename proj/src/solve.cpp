#include "macov/solve.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <thread>

namespace macov {

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MACOV_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

double vec_norm(const std::vector<cdouble>& z) {
  double s = 0;
  for (const auto& zi : z) s += std::norm(zi);
  return std::sqrt(s);
}

// Flattened system with precomputed Jacobian polynomials and power tables.
struct Compiled {
  int n;
  std::vector<MPoly> eqs;
  std::vector<std::vector<MPoly>> jac;  // jac[i][j] = d eq_i / d z_j
  std::vector<int> maxdeg_per_var;

  explicit Compiled(const PolySystem& sys) : n(sys.nvars()), eqs(sys.equations) {
    jac.resize(eqs.size());
    maxdeg_per_var.assign(n, 0);
    for (size_t i = 0; i < eqs.size(); ++i) {
      jac[i].reserve(n);
      for (int j = 0; j < n; ++j) jac[i].push_back(eqs[i].derivative(j));
      for (const auto& t : eqs[i].terms())
        for (int j = 0; j < n; ++j) maxdeg_per_var[j] = std::max(maxdeg_per_var[j], t.exps[j]);
    }
  }

  void fill_powers(const std::vector<cdouble>& z, std::vector<std::vector<cdouble>>& pw) const {
    pw.resize(n);
    for (int j = 0; j < n; ++j) {
      pw[j].resize(maxdeg_per_var[j] + 1);
      pw[j][0] = cdouble(1);
      for (int e = 1; e <= maxdeg_per_var[j]; ++e) pw[j][e] = pw[j][e - 1] * z[j];
    }
  }

  void eval(const std::vector<cdouble>& z, Eigen::VectorXcd& F) const {
    std::vector<std::vector<cdouble>> pw;
    fill_powers(z, pw);
    F.resize(eqs.size());
    for (size_t i = 0; i < eqs.size(); ++i) F(i) = eqs[i].eval_powers(pw);
  }

  void eval_with_jac(const std::vector<cdouble>& z, Eigen::VectorXcd& F, Eigen::MatrixXcd& J) const {
    std::vector<std::vector<cdouble>> pw;
    fill_powers(z, pw);
    F.resize(eqs.size());
    J.resize(eqs.size(), n);
    for (size_t i = 0; i < eqs.size(); ++i) {
      F(i) = eqs[i].eval_powers(pw);
      for (int j = 0; j < n; ++j) J(i, j) = jac[i][j].eval_powers(pw);
    }
  }
};

enum class PathOutcome { Converged, Divergent, Failed, Suspect };

struct PathResult {
  PathOutcome outcome = PathOutcome::Failed;
  std::vector<cdouble> z;
  double residual = 0;
};

// H(z,s) = (1-s) gamma G(z) + s F(z), start system G_i = z_i^{d_i} - 1.
struct Homotopy {
  const Compiled& target;
  std::vector<int> degs;
  cdouble gamma;

  void eval_start(const std::vector<cdouble>& z, Eigen::VectorXcd& G, Eigen::MatrixXcd& JG) const {
    int n = static_cast<int>(z.size());
    G.resize(n);
    JG.setZero(n, n);
    for (int i = 0; i < n; ++i) {
      cdouble p(1);
      for (int e = 0; e < degs[i] - 1; ++e) p *= z[i];
      JG(i, i) = double(degs[i]) * p;
      G(i) = p * z[i] - cdouble(1);
    }
  }

  void eval(const std::vector<cdouble>& z, double s, Eigen::VectorXcd& H, Eigen::MatrixXcd& JH,
            Eigen::VectorXcd& dHds) const {
    Eigen::VectorXcd F, G;
    Eigen::MatrixXcd JF, JG;
    target.eval_with_jac(z, F, JF);
    eval_start(z, G, JG);
    cdouble w0 = (1.0 - s) * gamma;
    H = w0 * G + s * F;
    JH = w0 * JG + s * JF;
    dHds = F - gamma * G;
  }
};

// Quadratic-in-s segment H(z,t) = P0 + s P1 + s^2 P2 with the complex bend
// s(t) = t + gamma t (1 - t); endpoints s(0) = 0, s(1) = 1.
struct PolyPathHomotopy {
  const Compiled& p0;
  const Compiled& p1;
  const Compiled& p2;
  const Compiled& target;  // compiled P0 + P1 + P2
  std::vector<int> degs;
  cdouble gamma;

  void eval(const std::vector<cdouble>& z, double t, Eigen::VectorXcd& H, Eigen::MatrixXcd& JH,
            Eigen::VectorXcd& dHds) const {
    Eigen::VectorXcd F0, F1, F2;
    Eigen::MatrixXcd J0, J1, J2;
    p0.eval_with_jac(z, F0, J0);
    p1.eval_with_jac(z, F1, J1);
    p2.eval_with_jac(z, F2, J2);
    cdouble s = t + gamma * t * (1.0 - t);
    cdouble dsdt = 1.0 + gamma * (1.0 - 2.0 * t);
    H = F0 + s * F1 + (s * s) * F2;
    JH = J0 + s * J1 + (s * s) * J2;
    dHds = (F1 + 2.0 * s * F2) * dsdt;
  }
};

template <class Hom>
PathResult track_path(const Hom& h, std::vector<cdouble> z, const TrackOptions& opts) {
  const int n = static_cast<int>(z.size());
  double s = 0.0, ds = opts.step_init;
  int streak = 0;
  PathResult res;

  Eigen::VectorXcd H, dHds, F;
  Eigen::MatrixXcd JH;

  while (s < 1.0) {
    double step = std::min(ds, 1.0 - s);
    // Euler predictor
    h.eval(z, s, H, JH, dHds);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(JH);
    Eigen::VectorXcd dz = lu.solve(-dHds * step);
    std::vector<cdouble> zp(n);
    for (int i = 0; i < n; ++i) zp[i] = z[i] + dz(i);
    double s_new = s + step;

    // Newton corrector at fixed s_new. Acceptance is by correction size, not
    // residual: cleared systems have flat regions (high-multiplicity roots)
    // where residuals are tiny far from any path and only the Newton
    // contraction certifies that the tracker is still on its path.
    bool ok = false;
    for (int it = 0; it < 3; ++it) {
      h.eval(zp, s_new, H, JH, dHds);
      Eigen::PartialPivLU<Eigen::MatrixXcd> clu(JH);
      Eigen::VectorXcd upd = clu.solve(H);
      if (!upd.allFinite()) break;
      for (int i = 0; i < n; ++i) zp[i] -= upd(i);
      if (!std::isfinite(vec_norm(zp))) break;
      if (upd.lpNorm<Eigen::Infinity>() <= opts.corrector_tol * (1.0 + vec_norm(zp))) {
        ok = true;
        break;
      }
    }

    if (ok) {
      z = zp;
      s = s_new;
      if (++streak >= 5) {
        ds = std::min(2 * ds, opts.step_max);
        streak = 0;
      }
    } else {
      ds /= 2;
      streak = 0;
      if (ds < opts.step_min) {
        // Paths marching to infinity stall before hitting the blowup bound.
        if (vec_norm(z) > 1e-2 * opts.blowup)
          res.outcome = PathOutcome::Divergent;
        else
          res.outcome = s > 0.999 ? PathOutcome::Suspect : PathOutcome::Failed;
        res.z = z;
        h.target.eval(z, F);
        res.residual = F.lpNorm<Eigen::Infinity>();
        return res;
      }
      continue;
    }

    if (vec_norm(z) > opts.blowup || !std::isfinite(vec_norm(z))) {
      res.outcome = PathOutcome::Divergent;
      return res;
    }
  }

  // Endpoint polish against the target system.
  for (int it = 0; it < 30; ++it) {
    h.target.eval_with_jac(z, F, JH);
    double r = F.lpNorm<Eigen::Infinity>();
    if (r <= opts.endpoint_tol * (1.0 + vec_norm(z))) break;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(JH);
    Eigen::VectorXcd upd = lu.solve(F);
    if (!upd.allFinite()) break;
    for (int i = 0; i < n; ++i) z[i] -= upd(i);
  }
  h.target.eval(z, F);
  res.residual = F.lpNorm<Eigen::Infinity>();
  res.z = z;
  double maxdeg = 1;
  for (int d : h.degs) maxdeg = std::max(maxdeg, double(d));
  double scale = 1.0 + std::pow(vec_norm(z), maxdeg);
  if (!std::isfinite(res.residual) || vec_norm(z) > 1e-2 * opts.blowup) {
    res.outcome = PathOutcome::Divergent;
  } else if (res.residual <= 1e-8 * scale) {
    res.outcome = PathOutcome::Converged;
  } else {
    res.outcome = PathOutcome::Suspect;
  }
  return res;
}

// Tracks every start, then gives unresolved paths two more chances with a
// fresh gamma; a path that stalls near a mid-homotopy singularity for one
// gamma usually tracks cleanly for another.
template <class Hom>
std::vector<PathResult> run_paths(Hom& h, const std::vector<std::vector<cdouble>>& starts,
                                  const TrackOptions& opts, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 2 * M_PI);
  std::vector<PathResult> results(starts.size());
  int nthreads = resolve_threads(opts.threads);

  auto run_subset = [&](const std::vector<size_t>& idx, std::vector<PathResult>& out) {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= idx.size()) break;
        out[i] = track_path(h, starts[idx[i]], opts);
      }
    };
    if (nthreads > 1 && idx.size() > 8) {
      std::vector<std::thread> pool;
      for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    } else {
      worker();
    }
  };

  std::vector<size_t> all(starts.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = i;
  run_subset(all, results);

  auto rank = [](PathOutcome o) {
    switch (o) {
      case PathOutcome::Converged: return 3;
      case PathOutcome::Divergent: return 2;
      case PathOutcome::Suspect: return 1;
      default: return 0;
    }
  };
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<size_t> redo;
    for (size_t i = 0; i < results.size(); ++i)
      if (results[i].outcome == PathOutcome::Failed || results[i].outcome == PathOutcome::Suspect)
        redo.push_back(i);
    if (redo.empty()) break;
    double phi = uni(rng);
    h.gamma = cdouble(std::cos(phi), std::sin(phi));
    std::vector<PathResult> redo_res(redo.size());
    run_subset(redo, redo_res);
    for (size_t i = 0; i < redo.size(); ++i)
      if (rank(redo_res[i].outcome) > rank(results[redo[i]].outcome))
        results[redo[i]] = std::move(redo_res[i]);
  }
  return results;
}

SolutionSet collect_results(std::vector<PathResult>&& results, long bez, const TrackOptions& opts) {
  SolutionSet set;
  set.bezout = bez;
  for (auto& r : results) {
    switch (r.outcome) {
      case PathOutcome::Converged: {
        Solution s;
        s.point = std::move(r.z);
        s.residual = r.residual;
        s.converged = true;
        s.is_real = point_is_real(s.point, opts.real_tol);
        set.points.push_back(std::move(s));
        ++set.n_converged;
        break;
      }
      case PathOutcome::Divergent:
        ++set.n_divergent;
        break;
      case PathOutcome::Failed:
        ++set.n_failed;
        break;
      case PathOutcome::Suspect: {
        // Kept (unconverged) so callers can triage stalled endpoints.
        Solution s;
        s.point = std::move(r.z);
        s.residual = r.residual;
        set.points.push_back(std::move(s));
        ++set.n_suspect;
        break;
      }
    }
  }
  return set;
}

void assign_clusters(SolutionSet& set, double tol) {
  int next = 0;
  std::vector<std::vector<cdouble>> reps;
  for (auto& sol : set.points) {
    int id = -1;
    for (size_t c = 0; c < reps.size(); ++c)
      if (points_close(sol.point, reps[c], tol)) {
        id = static_cast<int>(c);
        break;
      }
    if (id < 0) {
      id = next++;
      reps.push_back(sol.point);
    }
    sol.cluster_id = id;
  }
}

}  // namespace

bool points_close(const std::vector<cdouble>& a, const std::vector<cdouble>& b, double tol) {
  if (a.size() != b.size()) return false;
  double scale = 1.0 + std::max(vec_norm(a), vec_norm(b));
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol * scale) return false;
  return true;
}

bool point_is_real(const std::vector<cdouble>& z, double real_tol) {
  double scale = 1.0 + vec_norm(z);
  for (const auto& zi : z)
    if (std::abs(zi.imag()) > real_tol * scale) return false;
  return true;
}

std::vector<double> real_part(const std::vector<cdouble>& z) {
  std::vector<double> out(z.size());
  for (size_t i = 0; i < z.size(); ++i) out[i] = z[i].real();
  return out;
}

SolutionSet solve_total_degree(const PolySystem& sys, const TrackOptions& opts) {
  if (!sys.square()) throw std::invalid_argument("solve_total_degree: system must be square");
  const int n = sys.nvars();
  long bez = sys.bezout_number();
  if (bez > opts.max_paths) throw std::runtime_error("solve_total_degree: path budget exceeded");

  Compiled target(sys);
  Homotopy h{target, {}, cdouble(0)};
  h.degs.reserve(n);
  for (const auto& p : sys.equations) h.degs.push_back(std::max(p.degree(), 1));

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(0.0, 2 * M_PI);
  double phi = uni(rng);
  h.gamma = cdouble(std::cos(phi), std::sin(phi));

  // Start solutions: all combinations of d_i-th roots of unity.
  std::vector<std::vector<cdouble>> starts;
  starts.reserve(bez);
  std::vector<int> idx(n, 0);
  while (true) {
    std::vector<cdouble> z(n);
    for (int i = 0; i < n; ++i) {
      double ang = 2 * M_PI * idx[i] / h.degs[i];
      z[i] = cdouble(std::cos(ang), std::sin(ang));
    }
    starts.push_back(std::move(z));
    int i = n - 1;
    while (i >= 0 && idx[i] == h.degs[i] - 1) idx[i--] = 0;
    if (i < 0) break;
    ++idx[i];
  }

  SolutionSet set = collect_results(run_paths(h, starts, opts, rng), bez, opts);
  if (set.n_converged == 0 && bez > 0) throw std::runtime_error("solve_total_degree: all paths diverged");
  assign_clusters(set, opts.cluster_tol);
  return set;
}

SolutionSet solve_poly_path(const PolySystem& p0, const PolySystem& p1, const PolySystem& p2,
                            const std::vector<std::vector<cdouble>>& starts,
                            const TrackOptions& opts) {
  if (!p0.square()) throw std::invalid_argument("solve_poly_path: system must be square");
  if (static_cast<long>(starts.size()) > opts.max_paths)
    throw std::runtime_error("solve_poly_path: path budget exceeded");

  PolySystem target_sys;
  for (int i = 0; i < p0.neqs(); ++i)
    target_sys.equations.push_back(p0.equations[i] + p1.equations[i] + p2.equations[i]);

  Compiled c0(p0), c1(p1), c2(p2), ct(target_sys);
  PolyPathHomotopy h{c0, c1, c2, ct, {}, cdouble(0)};
  for (const auto& p : target_sys.equations) h.degs.push_back(std::max(p.degree(), 1));

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(0.0, 2 * M_PI);
  double phi = uni(rng);
  h.gamma = cdouble(std::cos(phi), std::sin(phi));

  SolutionSet set = collect_results(run_paths(h, starts, opts, rng), starts.size(), opts);
  assign_clusters(set, opts.cluster_tol);
  return set;
}

std::vector<cdouble> newton_refine(const PolySystem& sys, std::vector<cdouble> z0, int iters) {
  Compiled c(sys);
  int maxdeg = 1;
  for (const auto& p : sys.equations) maxdeg = std::max(maxdeg, p.degree());
  const double target_tol = 1e-12 * (1.0 + std::pow(vec_norm(z0), maxdeg));

  Eigen::VectorXcd F;
  Eigen::MatrixXcd J;
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < iters; ++it) {
    c.eval_with_jac(z0, F, J);
    double r = F.lpNorm<Eigen::Infinity>();
    if (r <= target_tol) return z0;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(J);
    if (lu.rank() < J.cols()) throw std::runtime_error("newton_refine: singular Jacobian");
    Eigen::VectorXcd upd = lu.solve(F);
    // damped step: halve until the residual decreases
    double lambda = 1.0;
    std::vector<cdouble> znew(z0.size());
    for (int h = 0; h < 8; ++h) {
      for (size_t i = 0; i < z0.size(); ++i) znew[i] = z0[i] - lambda * upd(i);
      c.eval(znew, F);
      if (F.lpNorm<Eigen::Infinity>() < r) break;
      lambda /= 2;
    }
    z0 = znew;
    double rn = F.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(rn) || rn > 1e6 * (best + 1.0)) throw std::runtime_error("newton_refine: divergence");
    best = std::min(best, rn);
  }
  c.eval(z0, F);
  if (F.lpNorm<Eigen::Infinity>() > 1e-10 * (1.0 + std::pow(vec_norm(z0), maxdeg)))
    throw std::runtime_error("newton_refine: did not converge");
  return z0;
}

SolutionSet univariate_roots(const MPoly& p) {
  if (p.nvars() != 1) throw std::invalid_argument("univariate_roots: nvars must be 1");
  if (p.is_zero()) throw std::invalid_argument("univariate_roots: zero polynomial");
  int deg = p.degree();
  if (deg < 1) throw std::invalid_argument("univariate_roots: degree must be >= 1");

  std::vector<cdouble> coefs(deg + 1, cdouble(0));
  for (const auto& t : p.terms()) coefs[t.exps[0]] = t.coef;
  if (std::abs(coefs[deg]) == 0) throw std::invalid_argument("univariate_roots: zero leading coefficient");

  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = cdouble(1);
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -coefs[i] / coefs[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);

  PolySystem sys{{p}};
  SolutionSet set;
  set.bezout = deg;
  for (int i = 0; i < deg; ++i) {
    cdouble r = es.eigenvalues()(i);
    // Newton polish (multiple roots simply stop improving).
    for (int it = 0; it < 20; ++it) {
      cdouble f(0), fp(0), x(1);
      for (int k = 0; k <= deg; ++k) {
        f += coefs[k] * x;
        if (k < deg) fp += coefs[k + 1] * double(k + 1) * x;
        x *= r;
      }
      if (std::abs(fp) < 1e-300) break;
      cdouble step = f / fp;
      r -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
    }
    Solution s;
    s.point = {r};
    s.residual = std::abs(sys.equations[0].eval(s.point));
    s.converged = true;
    s.is_real = std::abs(r.imag()) <= 1e-6 * (1.0 + std::abs(r));
    set.points.push_back(std::move(s));
    ++set.n_converged;
  }
  assign_clusters(set, 1e-6);
  return set;
}

int count_distinct(const SolutionSet& sols, double cluster_tol, const PolySystem* sys) {
  std::vector<std::vector<cdouble>> reps;
  for (const auto& s : sols.points) {
    if (!s.converged) continue;
    std::vector<cdouble> z = s.point;
    if (sys) {
      try {
        z = newton_refine(*sys, z, 30);
      } catch (const std::exception&) {
        // keep the unrefined point; clustering still applies
      }
    }
    bool found = false;
    for (const auto& r : reps)
      if (points_close(z, r, cluster_tol)) {
        found = true;
        break;
      }
    if (!found) reps.push_back(std::move(z));
  }
  return static_cast<int>(reps.size());
}

std::vector<std::vector<cdouble>> dedup_points(const std::vector<std::vector<cdouble>>& pts,
                                               const std::vector<Symmetry>& syms, double tol) {
  std::vector<std::vector<cdouble>> reps;
  for (const auto& p : pts) {
    // orbit of p under the group generated by syms (BFS, capped)
    std::vector<std::vector<cdouble>> orbit{p};
    for (size_t i = 0; i < orbit.size() && orbit.size() < 64; ++i) {
      for (const auto& sym : syms) {
        auto img = sym(orbit[i]);
        bool seen = false;
        for (const auto& o : orbit)
          if (points_close(img, o, tol)) {
            seen = true;
            break;
          }
        if (!seen) orbit.push_back(std::move(img));
      }
    }
    bool dup = false;
    for (const auto& r : reps) {
      for (const auto& o : orbit)
        if (points_close(o, r, tol)) {
          dup = true;
          break;
        }
      if (dup) break;
    }
    if (!dup) reps.push_back(p);
  }
  return reps;
}

}  // namespace macov
