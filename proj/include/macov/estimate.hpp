#ifndef MACOV_ESTIMATE_HPP
#define MACOV_ESTIMATE_HPP

#include <memory>
#include <optional>
#include <string>

#include "macov/field.hpp"
#include "macov/lattice.hpp"
#include "macov/solve.hpp"

namespace macov {

// ---- Least squares projection onto the autocovariance variety ----

struct LseProblem {
  Order order;
  AcovTable target;                      // empirical gamma_hat
  std::vector<double> weights;           // per half-lag, default all 1

  LseProblem(Order ord, AcovTable tgt, std::vector<double> w = {});
};

struct CriticalPoint {
  std::vector<cdouble> a;
  bool is_real = false;         // a itself is real
  bool real_image = false;      // gamma image is real (a may be complex)
  bool singular_image = false;  // gamma image on the singular locus (q=(1,1))
  double objective = 0;                  // ||gamma_a - gamma_hat|| (real images)
  std::vector<double> gamma_image;       // real images only
};

struct PathStats {
  long bezout = 0, converged = 0, divergent = 0, failed = 0, suspect = 0;
};

struct CriticalReport {
  std::vector<CriticalPoint> points;     // distinct mod {a -> -a, reversal}
  // Points with real, nonsingular gamma image, one per distinct image;
  // the selection candidates.
  std::vector<int> real_indices;
  int selected = -1;
  double objective = 0;
  PathStats stats;
};

// First-order conditions of 1/2 sum_t w_t (gamma_a(t) - gamma_hat(t))^2:
// Q+1 cubics in the Q+1 coefficients.
PolySystem lse_critical_system(const LseProblem& p);

CriticalReport lse_solve(const LseProblem& p, const TrackOptions& opts = {});

// Distinct complex critical points mod {sign, reversal}, excluding a = 0
// and points whose gamma-image lies on the singular locus; expected 16.
int ed_count_ma11(const LseProblem& p, const TrackOptions& opts = {});

// ---- Gaussian maximum likelihood ----

struct MleProblem {
  Order order;
  FieldGrid sample;
  double box_radius;  // parameter box [-R, R]^(Q+1); default 10 * sample std

  MleProblem(Order ord, FieldGrid y, double radius = 0);

  std::vector<std::vector<int>> sites() const;  // lexicographic lattice sites
};

// -1/2 log|Sigma| - 1/2 Y' Sigma^-1 Y via banded Cholesky;
// -inf when Sigma(a) is not positive definite.
double mle_loglik(const CoefGrid& a, const MleProblem& p);
// Central finite differences, step 1e-6 (1 + |a_k|).
std::vector<double> mle_grad(const CoefGrid& a, const MleProblem& p);

struct MleLocalResult {
  CoefGrid a;
  double loglik;
  bool converged;
};
MleLocalResult mle_solve_local(const MleProblem& p, const CoefGrid& init);

// Exact MA(1), n=2 MLE classification.
struct ExactMa1 {
  CoefGrid a;
  std::string case_label;  // "(1)", "(2)", "(3)", "degenerate"
  double loglik;
};
ExactMa1 mle_exact_ma1_n2(double y1, double y2);

// Cleared score equations score_k |Sigma|^2 as polynomials in a.
PolySystem ml_score_system(const Order& order, const std::vector<int>& extents,
                           const std::vector<double>& Y);

struct MlDegree {
  int count = 0;        // certified distinct critical points mod sign
  long suspect = 0;     // uncertified paths; interval is [count, count+suspect]
  std::vector<std::vector<cdouble>> points;
  bool certified() const { return suspect == 0; }
};
MlDegree ml_degree_count(const Order& order, const std::vector<int>& extents,
                         const std::vector<double>& Y, const TrackOptions& opts = {});

// MLE for one sample by solving the score system and picking the feasible
// real critical point with the largest likelihood.
std::optional<MleLocalResult> mle_solve_score(const MleProblem& p, const TrackOptions& opts = {});

struct ScoreCore;  // symbolic data shared across samples (internal)

// Score zeros for one generic complex base sample; repeated estimation on
// the same (order, extents) tracks these along a data segment instead of
// rerunning the full total-degree solve per sample.
struct ScoreFamily {
  Order order;
  std::vector<int> extents;
  std::vector<cdouble> y0;
  std::vector<std::vector<cdouble>> solutions;  // one per +-z pair
  std::shared_ptr<const ScoreCore> core;
};
ScoreFamily ml_score_family(const Order& order, const std::vector<int>& extents,
                            const TrackOptions& opts = {});
std::optional<MleLocalResult> mle_solve_score(const MleProblem& p, const ScoreFamily& fam,
                                              const TrackOptions& opts = {});

// ---- Innovations algorithm (d = 1) ----

struct InnovationsResult {
  CoefGrid a;
  bool converged;
};
InnovationsResult innovations_d1(const AcovTable& g, int iters = 50);

// Dense-vs-banded oracle hooks (tests): covariance matrix of the flattened
// sample as a function of a.
std::vector<double> mle_covariance_dense(const CoefGrid& a, const std::vector<std::vector<int>>& sites);

}  // namespace macov

#endif
