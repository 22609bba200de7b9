#ifndef MACOV_SOLVE_HPP
#define MACOV_SOLVE_HPP

#include <cstdint>
#include <functional>

#include "macov/poly.hpp"

namespace macov {

struct TrackOptions {
  long max_paths = 20000;
  double blowup = 1e8;
  double corrector_tol = 1e-8;  // Newton correction size per accepted step
  double endpoint_tol = 1e-12;
  double cluster_tol = 1e-6;
  double real_tol = 1e-6;
  double step_init = 0.05;
  double step_min = 1e-7;
  double step_max = 0.1;
  std::uint64_t seed = 0x6d61636f76ULL;  // fixes the gamma-trick constant
  int threads = 0;                       // 0 = MACOV_THREADS env or hardware
};

// Total-degree homotopy continuation: tracks all Bezout-many paths from
// G_i = z_i^{d_i} - 1 to the target system.
SolutionSet solve_total_degree(const PolySystem& sys, const TrackOptions& opts = {});

// Tracks the given start solutions of P0 along the quadratic segment
// H(z,s) = P0 + s P1 + s^2 P2 (gamma-bent in s) to the target P0 + P1 + P2.
SolutionSet solve_poly_path(const PolySystem& p0, const PolySystem& p1, const PolySystem& p2,
                            const std::vector<std::vector<cdouble>>& starts,
                            const TrackOptions& opts = {});

// Damped Newton refinement; throws on singular Jacobian or divergence.
std::vector<cdouble> newton_refine(const PolySystem& sys, std::vector<cdouble> z0, int iters = 50);

// All complex roots of a univariate polynomial (companion matrix + polish).
SolutionSet univariate_roots(const MPoly& p);

// Points within cluster_tol (relative) are merged; representatives are
// Newton-refined against sys when provided.
int count_distinct(const SolutionSet& sols, double cluster_tol = 1e-6, const PolySystem* sys = nullptr);

// Orbit map for caller-supplied symmetries (e.g. sign flips, reversal).
using Symmetry = std::function<std::vector<cdouble>(const std::vector<cdouble>&)>;

// Deduplicate modulo the group generated by the given symmetries; returns
// one representative per class.
std::vector<std::vector<cdouble>> dedup_points(const std::vector<std::vector<cdouble>>& pts,
                                               const std::vector<Symmetry>& syms, double tol = 1e-6);

bool points_close(const std::vector<cdouble>& a, const std::vector<cdouble>& b, double tol);
bool point_is_real(const std::vector<cdouble>& z, double real_tol = 1e-6);
std::vector<double> real_part(const std::vector<cdouble>& z);

}  // namespace macov

#endif
