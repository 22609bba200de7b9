#ifndef MACOV_IDENTIFY_HPP
#define MACOV_IDENTIFY_HPP

#include <optional>

#include "macov/lattice.hpp"
#include "macov/solve.hpp"

namespace macov {

// All parameter vectors mapping to one autocovariance table. Points are
// sign-canonical: first significant coordinate has positive real part.
struct Fiber {
  Order order;
  std::vector<std::vector<cdouble>> points;
  std::vector<bool> is_real;
  bool boundary = false;  // d=1: a spectral root sat on the unit circle

  explicit Fiber(Order ord) : order(std::move(ord)) {}
  size_t size() const { return points.size(); }
};

struct FiberOptions {
  double roundtrip_tol = 1e-7;
  double dedup_tol = 1e-6;
  long max_paths = 20000;
  std::uint64_t seed = 0x66696265ULL;
};

// Flip sign so the first significant coordinate has positive real part.
std::vector<cdouble> canonical_sign(std::vector<cdouble> a);

// d=1: spectral factorization of sum gamma(t) x^{q+t}, then root flips
// (x - alpha) -> (alpha x - 1) over all subsets; up to 2^q points.
Fiber fiber_d1(const AcovTable& g, bool complex_fiber = true, double roundtrip_tol = 1e-7);

// q=(1,1): radical closed forms, signs resolved against gamma_map; the
// separable (reducible theta) case yields up to 4 points.
Fiber fiber_ma11(const AcovTable& g, bool allow_complex = true);

// q=2 closed form from the triangular elimination system; a0 is solved
// from the quadratic a0^2 a1 - gamma_1 a0 + a1 gamma_2 = 0.
Fiber fiber_ma2_triangular(const AcovTable& g);

// Any order with Q+1 <= 9: numerical solve of gamma_map(a) = g.
Fiber fiber_generic(const AcovTable& g, const FiberOptions& opts = {});

// d=1: the unique real point with all spectral roots strictly outside the
// unit disk, scaled so a_0 > 0. Throws if none qualifies.
CoefGrid invertible_representative(const Fiber& f, double unit_circle_tol = 1e-9);

// Spectral roots of the d=1 moving average polynomial of a real point.
std::vector<cdouble> ma_polynomial_roots(const std::vector<double>& a);

}  // namespace macov

#endif
