#include "macov/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace macov {

namespace {

// Enumerate all integer vectors in [lo, hi], last axis fastest.
std::vector<std::vector<int>> enumerate_box(const std::vector<int>& lo, const std::vector<int>& hi) {
  int d = static_cast<int>(lo.size());
  std::vector<std::vector<int>> out;
  std::vector<int> cur(lo);
  while (true) {
    out.push_back(cur);
    int i = d - 1;
    while (i >= 0 && cur[i] == hi[i]) {
      cur[i] = lo[i];
      --i;
    }
    if (i < 0) break;
    ++cur[i];
  }
  return out;
}

}  // namespace

Order::Order(std::vector<int> q) : q_(std::move(q)) {
  if (q_.empty()) throw std::invalid_argument("Order: d must be >= 1");
  for (int qi : q_)
    if (qi < 1) throw std::invalid_argument("Order: every q_i must be >= 1");

  int d = dim();
  std::vector<int> zero(d, 0);
  coef_idx_ = enumerate_box(zero, q_);

  std::vector<int> lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = -q_[i];
    hi[i] = q_[i];
  }
  for (auto& t : enumerate_box(lo, hi))
    if (is_canonical_half_lag(t)) half_lags_.push_back(t);
  std::sort(half_lags_.begin(), half_lags_.end());
}

long Order::coef_count() const {
  long n = 1;
  for (int qi : q_) n *= qi + 1;
  return n;
}

long Order::half_lag_count() const {
  long n = 1;
  for (int qi : q_) n *= 2 * qi + 1;
  return (n + 1) / 2;
}

long Order::coef_flat_index(const std::vector<int>& k) const {
  long idx = 0;
  for (int i = 0; i < dim(); ++i) {
    if (k[i] < 0 || k[i] > q_[i]) throw std::out_of_range("coef index out of [0,q]");
    idx = idx * (q_[i] + 1) + k[i];
  }
  return idx;
}

long Order::half_lag_index(const std::vector<int>& t) const {
  auto it = std::lower_bound(half_lags_.begin(), half_lags_.end(), t);
  if (it == half_lags_.end() || *it != t) return -1;
  return it - half_lags_.begin();
}

bool is_canonical_half_lag(const std::vector<int>& t) {
  for (int ti : t) {
    if (ti > 0) return true;
    if (ti < 0) return false;
  }
  return true;  // t = 0
}

std::vector<int> negate_lag(const std::vector<int>& t) {
  std::vector<int> m(t.size());
  for (size_t i = 0; i < t.size(); ++i) m[i] = -t[i];
  return m;
}

CoefGrid::CoefGrid(Order ord, std::vector<double> v) : order(std::move(ord)), values(std::move(v)) {
  if (static_cast<long>(values.size()) != order.coef_count())
    throw std::invalid_argument("CoefGrid: shape mismatch");
}

bool CoefGrid::is_proper_order(double tol) const {
  for (int i = 0; i < order.dim(); ++i) {
    bool has_hi = false, has_lo = false;
    for (const auto& k : order.coef_indices()) {
      double v = std::abs(at(k));
      if (v > tol) {
        if (k[i] == order[i]) has_hi = true;
        if (k[i] == 0) has_lo = true;
      }
    }
    if (!has_hi || !has_lo) return false;
  }
  return true;
}

AcovTable::AcovTable(Order ord, std::vector<double> v) : order(std::move(ord)), values(std::move(v)) {
  if (static_cast<long>(values.size()) != order.half_lag_count())
    throw std::invalid_argument("AcovTable: shape mismatch");
}

double AcovTable::at(const std::vector<int>& t) const {
  for (int i = 0; i < order.dim(); ++i)
    if (std::abs(t[i]) > order[i]) return 0.0;
  std::vector<int> c = is_canonical_half_lag(t) ? t : negate_lag(t);
  long idx = order.half_lag_index(c);
  return values[idx];
}

double AcovTable::norm() const {
  double s = 0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

namespace {

// Shared kernel for real and complex coefficients.
template <class Scalar>
std::vector<Scalar> gamma_map_impl(const Order& order, const std::vector<Scalar>& a) {
  int d = order.dim();
  std::vector<Scalar> out;
  out.reserve(order.half_lags().size());
  for (const auto& t : order.half_lags()) {
    Scalar sum{};
    for (const auto& k : order.coef_indices()) {
      std::vector<int> kt(d);
      bool inside = true;
      for (int i = 0; i < d; ++i) {
        kt[i] = k[i] + t[i];
        if (kt[i] < 0 || kt[i] > order[i]) {
          inside = false;
          break;
        }
      }
      if (inside) sum += a[order.coef_flat_index(k)] * a[order.coef_flat_index(kt)];
    }
    out.push_back(sum);
  }
  return out;
}

}  // namespace

AcovTable gamma_map(const CoefGrid& a) {
  return AcovTable(a.order, gamma_map_impl(a.order, a.values));
}

std::vector<cdouble> gamma_map_complex(const Order& order, const std::vector<cdouble>& a) {
  if (static_cast<long>(a.size()) != order.coef_count())
    throw std::invalid_argument("gamma_map_complex: shape mismatch");
  return gamma_map_impl(order, a);
}

long gamma_monomial_count(const Order& order, const std::vector<int>& t) {
  long n = 1;
  for (int i = 0; i < order.dim(); ++i) n *= order[i] - std::abs(t[i]) + 1;
  return n;
}

namespace {

template <class Scalar>
std::vector<Scalar> reverse_impl(const Order& order, const std::vector<Scalar>& a) {
  std::vector<Scalar> out(a.size());
  for (const auto& k : order.coef_indices()) {
    std::vector<int> qk(k.size());
    for (int i = 0; i < order.dim(); ++i) qk[i] = order[i] - k[i];
    out[order.coef_flat_index(k)] = a[order.coef_flat_index(qk)];
  }
  return out;
}

}  // namespace

CoefGrid reverse(const CoefGrid& a) {
  return CoefGrid(a.order, reverse_impl(a.order, a.values));
}

std::vector<cdouble> reverse_complex(const Order& order, const std::vector<cdouble>& a) {
  return reverse_impl(order, a);
}

std::vector<cdouble> reverse_axis_complex(const Order& order, const std::vector<cdouble>& a, int axis) {
  std::vector<cdouble> out(a.size());
  for (const auto& k : order.coef_indices()) {
    std::vector<int> kr = k;
    kr[axis] = order[axis] - k[axis];
    out[order.coef_flat_index(k)] = a[order.coef_flat_index(kr)];
  }
  return out;
}

cdouble laurent_residual(const CoefGrid& a, const AcovTable& g, const std::vector<cdouble>& x) {
  int d = a.order.dim();
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("laurent_residual: x dimension");
  for (const auto& xi : x)
    if (xi == cdouble(0)) throw std::invalid_argument("laurent_residual: x_i = 0");

  auto mono = [&](const std::vector<int>& e) {
    cdouble m(1);
    for (int i = 0; i < d; ++i) m *= std::pow(x[i], e[i]);
    return m;
  };

  cdouble theta(0), theta_inv(0);
  for (const auto& k : a.order.coef_indices()) {
    cdouble m = mono(k);
    theta += a.at(k) * m;
    theta_inv += a.at(k) / m;
  }

  cdouble lau(0);
  for (const auto& t : a.order.half_lags()) {
    cdouble m = mono(t);
    if (a.order.half_lag_index(t) == 0)  // t = 0 counted once
      lau += g.at(t);
    else
      lau += g.at(t) * (m + cdouble(1) / m);
  }
  return theta * theta_inv - lau;
}

QuarticEval quartic_eval(const AcovTable& g) {
  if (!(g.order.dim() == 2 && g.order[0] == 1 && g.order[1] == 1))
    throw std::invalid_argument("quartic_eval: order must be (1,1)");
  double g00 = g.at({0, 0}), g01 = g.at({0, 1}), g1m1 = g.at({1, -1});
  double g10 = g.at({1, 0}), g11 = g.at({1, 1});

  // The 13 integer-coefficient monomials of the defining quartic.
  double terms[] = {
      g10 * g10 * g01 * g01,
      -g00 * g10 * g01 * g11,
      g10 * g10 * g11 * g11,
      g01 * g01 * g11 * g11,
      -g00 * g10 * g01 * g1m1,
      g00 * g00 * g11 * g1m1,
      -2.0 * g10 * g10 * g11 * g1m1,
      -2.0 * g01 * g01 * g11 * g1m1,
      -4.0 * g11 * g11 * g11 * g1m1,
      g10 * g10 * g1m1 * g1m1,
      g01 * g01 * g1m1 * g1m1,
      8.0 * g11 * g11 * g1m1 * g1m1,
      -4.0 * g11 * g1m1 * g1m1 * g1m1,
  };
  QuarticEval ev{0.0, 0.0};
  for (double t : terms) {
    ev.value += t;
    ev.scale = std::max(ev.scale, std::abs(t));
  }
  return ev;
}

double quartic_value(const AcovTable& g) { return quartic_eval(g).value; }

std::set<SingularComponent> singular_component_membership(const AcovTable& g, double tol) {
  if (!(g.order.dim() == 2 && g.order[0] == 1 && g.order[1] == 1))
    throw std::invalid_argument("singular_component_membership: order must be (1,1)");
  double g00 = g.at({0, 0}), g01 = g.at({0, 1}), g1m1 = g.at({1, -1});
  double g10 = g.at({1, 0}), g11 = g.at({1, 1});
  double s = g.norm();
  double s1 = tol * s, s2 = tol * s * s;

  std::set<SingularComponent> out;
  if (std::abs(g10 - g01) <= s1 && std::abs(g00 - 2 * g11 - 2 * g1m1) <= s1 &&
      std::abs(4 * g11 * g1m1 - g01 * g01) <= s2)
    out.insert(SingularComponent::C1);
  if (std::abs(g10 + g01) <= s1 && std::abs(g00 + 2 * g11 + 2 * g1m1) <= s1 &&
      std::abs(4 * g11 * g1m1 - g01 * g01) <= s2)
    out.insert(SingularComponent::C2);
  if (std::abs(g11 - g1m1) <= s1 && std::abs(g00 * g1m1 - g10 * g01) <= s2)
    out.insert(SingularComponent::C3);
  return out;
}

}  // namespace macov
