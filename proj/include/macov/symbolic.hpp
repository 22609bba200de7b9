#ifndef MACOV_SYMBOLIC_HPP
#define MACOV_SYMBOLIC_HPP

#include "macov/lattice.hpp"
#include "macov/poly.hpp"

namespace macov {

// gamma(t) as polynomials in the coefficients a (row-major variable order),
// one per canonical half-lag.
std::vector<MPoly> gamma_polynomials(const Order& order);

// Determinant of a square MPoly matrix via Laplace expansion with
// memoization over column subsets (rows expanded top-down).
MPoly sym_det(const std::vector<std::vector<MPoly>>& m);

}  // namespace macov

#endif
