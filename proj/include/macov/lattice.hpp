#ifndef MACOV_LATTICE_HPP
#define MACOV_LATTICE_HPP

#include <complex>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace macov {

using cdouble = std::complex<double>;

// Model order q = (q_1,...,q_d), all q_i >= 1.
class Order {
public:
  explicit Order(std::vector<int> q);

  int dim() const { return static_cast<int>(q_.size()); }
  int operator[](int i) const { return q_[i]; }
  const std::vector<int>& q() const { return q_; }

  // Number of coefficients, prod(q_i + 1).
  long coef_count() const;
  // Number of canonical half-lags, (prod(2 q_i + 1) + 1) / 2.
  long half_lag_count() const;

  // All k in [0,q], row-major (last axis fastest).
  const std::vector<std::vector<int>>& coef_indices() const { return coef_idx_; }
  // Canonical half-lags t >= 0 (lex), ascending lexicographic.
  const std::vector<std::vector<int>>& half_lags() const { return half_lags_; }

  long coef_flat_index(const std::vector<int>& k) const;
  // Index of a canonical half-lag; -1 if t is not a canonical half-lag.
  long half_lag_index(const std::vector<int>& t) const;

  bool operator==(const Order& o) const { return q_ == o.q_; }

private:
  std::vector<int> q_;
  std::vector<std::vector<int>> coef_idx_;
  std::vector<std::vector<int>> half_lags_;
};

// t = 0 or first nonzero entry positive.
bool is_canonical_half_lag(const std::vector<int>& t);
std::vector<int> negate_lag(const std::vector<int>& t);

// Real coefficient grid a_k, k in [0,q], row-major.
struct CoefGrid {
  Order order;
  std::vector<double> values;

  CoefGrid(Order ord, std::vector<double> v);
  double at(const std::vector<int>& k) const { return values[order.coef_flat_index(k)]; }

  // Def. of a proper MA(q): each axis i has nonzero coefficients with
  // k_i = 0 and k_i = q_i.
  bool is_proper_order(double tol = 0.0) const;
};

// Half-support autocovariance table in canonical half-lag order.
struct AcovTable {
  Order order;
  std::vector<double> values;

  AcovTable(Order ord, std::vector<double> v);

  // gamma(t) for any t, using gamma(-t) = gamma(t); 0 outside [-q,q].
  double at(const std::vector<int>& t) const;

  double norm() const;
};

// gamma(t) = sum over k with k, k+t in [0,q] of a_k a_{k+t}; sigma^2 = 1.
AcovTable gamma_map(const CoefGrid& a);
// Complex-coefficient variant (no conjugation; the map is bilinear).
std::vector<cdouble> gamma_map_complex(const Order& order, const std::vector<cdouble>& a);

// Index-pair count contributing to gamma(t): prod(q_i - |t_i| + 1).
long gamma_monomial_count(const Order& order, const std::vector<int>& t);

// a'_k = a_{q-k}.
CoefGrid reverse(const CoefGrid& a);
std::vector<cdouble> reverse_complex(const Order& order, const std::vector<cdouble>& a);
// Reverse along a single axis only (used for separable fibers).
std::vector<cdouble> reverse_axis_complex(const Order& order, const std::vector<cdouble>& a, int axis);

// theta(x) theta(x^-1) - sum_t gamma(t) x^t, at x with all x_i != 0.
cdouble laurent_residual(const CoefGrid& a, const AcovTable& g, const std::vector<cdouble>& x);

// The degree-4 defining polynomial of the MA(1,1) variety, evaluated at g.
// Also reports the largest monomial magnitude for relative comparisons.
struct QuarticEval {
  double value;
  double scale;  // max |monomial|
};
QuarticEval quartic_eval(const AcovTable& g);
double quartic_value(const AcovTable& g);

// Membership in the three prime components of the singular locus.
enum class SingularComponent { C1, C2, C3 };
std::set<SingularComponent> singular_component_membership(const AcovTable& g, double tol = 1e-8);

}  // namespace macov

#endif
