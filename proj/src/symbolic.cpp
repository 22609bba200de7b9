#include "macov/symbolic.hpp"

#include <stdexcept>
#include <unordered_map>

namespace macov {

std::vector<MPoly> gamma_polynomials(const Order& order) {
  int nvars = static_cast<int>(order.coef_count());
  int d = order.dim();
  std::vector<MPoly> out;
  out.reserve(order.half_lags().size());
  for (const auto& t : order.half_lags()) {
    MPoly g(nvars);
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
      if (!inside) continue;
      std::vector<int> e(nvars, 0);
      ++e[order.coef_flat_index(k)];
      ++e[order.coef_flat_index(kt)];
      g.add_term(cdouble(1), std::move(e));
    }
    out.push_back(std::move(g));
  }
  return out;
}

MPoly sym_det(const std::vector<std::vector<MPoly>>& m) {
  int n = static_cast<int>(m.size());
  if (n == 0) throw std::invalid_argument("sym_det: empty matrix");
  if (n > 20) throw std::invalid_argument("sym_det: matrix too large");
  for (const auto& row : m)
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("sym_det: not square");
  int nvars = m[0][0].nvars();

  std::unordered_map<std::uint32_t, MPoly> memo;
  // det of rows (n - popcount(mask))..n-1 over the columns in mask
  auto rec = [&](auto&& self, std::uint32_t mask) -> const MPoly& {
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    int cnt = __builtin_popcount(mask);
    int row = n - cnt;
    MPoly det(nvars);
    if (cnt == 0) {
      det = MPoly::constant(nvars, cdouble(1));
    } else {
      int pos = 0;
      for (int col = 0; col < n; ++col) {
        if (!(mask & (1u << col))) continue;
        if (!m[row][col].is_zero()) {
          const MPoly& sub = self(self, mask & ~(1u << col));
          MPoly contrib = m[row][col] * sub;
          if (pos % 2) det -= contrib;
          else det += contrib;
        }
        ++pos;
      }
    }
    return memo.emplace(mask, std::move(det)).first->second;
  };
  std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
  return rec(rec, full);
}

}  // namespace macov
