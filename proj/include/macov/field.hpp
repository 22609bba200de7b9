#ifndef MACOV_FIELD_HPP
#define MACOV_FIELD_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "macov/lattice.hpp"

namespace macov {

// Observed or simulated field values on the lattice {1..n_1} x ... x {1..n_d}.
struct FieldGrid {
  std::vector<int> extents;
  std::vector<double> values;  // row-major, last axis fastest

  FieldGrid(std::vector<int> n, std::vector<double> v);

  int dim() const { return static_cast<int>(extents.size()); }
  long size() const;
  long flat_index(const std::vector<int>& site) const;  // site in {1..n}
  double at(const std::vector<int>& site) const { return values[flat_index(site)]; }
  double mean() const;
};

struct NoiseSpec {
  std::uint64_t seed = 0;
  // kind: gaussian, variance fixed at 1
};

// Standard-normal noise on the enlarged lattice [1-q, n], drawn with
// Box-Muller over mt19937_64 in row-major order.
std::vector<double> draw_noise(const Order& q, const std::vector<int>& n, const NoiseSpec& noise);

// Y_t = sum_k a_k Z_{t-k} on {1..n}^d; Z on [1-q, n] so no edge truncation.
FieldGrid simulate(const CoefGrid& a, const std::vector<int>& n, const NoiseSpec& noise);
// Test hook: same filter applied to caller-supplied noise (row-major over [1-q, n]).
FieldGrid simulate_with_noise(const CoefGrid& a, const std::vector<int>& n, const std::vector<double>& z);

// gamma_hat(t) = (1/|B_{n,t}|) sum_{s in B} Y(t+s) Y(s), divisor prod(n_i - |t_i|).
AcovTable empirical_acov(const FieldGrid& y, const Order& order, bool center = true);

// CSV (d <= 2): header "# q=..., n=..., seed=...", one row per last-axis slice.
void write_field_csv(std::ostream& os, const FieldGrid& y, const std::string& header_extra = "");
FieldGrid read_field_csv(std::istream& is);

// Binary row-major float64 with a 32-byte header, for d >= 3 (d <= 4).
void write_field_binary(std::ostream& os, const FieldGrid& y);
FieldGrid read_field_binary(std::istream& is);

// P2 grayscale, min-max scaled; d = 2 only.
void write_field_pgm(std::ostream& os, const FieldGrid& y);

}  // namespace macov

#endif
