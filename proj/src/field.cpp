#include "macov/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace macov {

FieldGrid::FieldGrid(std::vector<int> n, std::vector<double> v)
    : extents(std::move(n)), values(std::move(v)) {
  if (extents.empty()) throw std::invalid_argument("FieldGrid: d must be >= 1");
  long expect = 1;
  for (int e : extents) {
    if (e < 1) throw std::invalid_argument("FieldGrid: extents must be >= 1");
    expect *= e;
  }
  if (static_cast<long>(values.size()) != expect)
    throw std::invalid_argument("FieldGrid: shape mismatch");
  for (double x : values)
    if (!std::isfinite(x)) throw std::invalid_argument("FieldGrid: non-finite value");
}

long FieldGrid::size() const {
  long s = 1;
  for (int e : extents) s *= e;
  return s;
}

long FieldGrid::flat_index(const std::vector<int>& site) const {
  long idx = 0;
  for (int i = 0; i < dim(); ++i) {
    if (site[i] < 1 || site[i] > extents[i]) throw std::out_of_range("FieldGrid: site out of lattice");
    idx = idx * extents[i] + (site[i] - 1);
  }
  return idx;
}

double FieldGrid::mean() const {
  double s = 0;
  for (double v : values) s += v;
  return s / values.size();
}

namespace {

// Box-Muller over mt19937_64; the pair order fixes the seed->stream mapping.
class GaussStream {
public:
  explicit GaussStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = to_unit(rng_());
    } while (u1 <= 0.0);
    u2 = to_unit(rng_());
    double r = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * M_PI * u2;
    spare_ = r * std::sin(ang);
    have_ = true;
    return r * std::cos(ang);
  }

private:
  static double to_unit(std::uint64_t x) { return (x >> 11) * 0x1.0p-53; }
  std::mt19937_64 rng_;
  bool have_ = false;
  double spare_ = 0;
};

void check_extents(const Order& q, const std::vector<int>& n) {
  if (static_cast<int>(n.size()) != q.dim())
    throw std::invalid_argument("simulate: extents dimension mismatch");
  for (int e : n)
    if (e < 1) throw std::invalid_argument("simulate: extents must be >= 1");
}

}  // namespace

std::vector<double> draw_noise(const Order& q, const std::vector<int>& n, const NoiseSpec& noise) {
  check_extents(q, n);
  long total = 1;
  for (int i = 0; i < q.dim(); ++i) total *= n[i] + q[i];
  GaussStream gs(noise.seed);
  std::vector<double> z(total);
  for (auto& v : z) v = gs.next();
  return z;
}

FieldGrid simulate_with_noise(const CoefGrid& a, const std::vector<int>& n, const std::vector<double>& z) {
  const Order& q = a.order;
  check_extents(q, n);
  int d = q.dim();
  std::vector<int> zext(d);
  long ztotal = 1;
  for (int i = 0; i < d; ++i) {
    zext[i] = n[i] + q[i];  // noise sites 1-q_i .. n_i
    ztotal *= zext[i];
  }
  if (static_cast<long>(z.size()) != ztotal)
    throw std::invalid_argument("simulate_with_noise: noise shape mismatch");

  // Noise flat index for site s in [1-q, n]: offset by q.
  auto zidx = [&](const std::vector<int>& s) {
    long idx = 0;
    for (int i = 0; i < d; ++i) idx = idx * zext[i] + (s[i] - 1 + q[i]);
    return idx;
  };

  long total = 1;
  for (int e : n) total *= e;
  std::vector<double> y(total);
  std::vector<int> site(d, 1);
  std::vector<int> sk(d);
  for (long out = 0; out < total; ++out) {
    double sum = 0;
    for (const auto& k : q.coef_indices()) {
      for (int i = 0; i < d; ++i) sk[i] = site[i] - k[i];
      sum += a.values[q.coef_flat_index(k)] * z[zidx(sk)];
    }
    y[out] = sum;
    int i = d - 1;
    while (i >= 0 && site[i] == n[i]) site[i--] = 1;
    if (i >= 0) ++site[i];
  }
  return FieldGrid(n, std::move(y));
}

FieldGrid simulate(const CoefGrid& a, const std::vector<int>& n, const NoiseSpec& noise) {
  return simulate_with_noise(a, n, draw_noise(a.order, n, noise));
}

AcovTable empirical_acov(const FieldGrid& y, const Order& order, bool center) {
  int d = order.dim();
  if (y.dim() != d) throw std::invalid_argument("empirical_acov: dimension mismatch");
  for (int i = 0; i < d; ++i)
    if (y.extents[i] <= order[i])
      throw std::invalid_argument("empirical_acov: every n_i must exceed q_i");

  double mu = center ? y.mean() : 0.0;

  std::vector<double> out;
  out.reserve(order.half_lags().size());
  std::vector<int> s(d), st(d);
  for (const auto& t : order.half_lags()) {
    // B_{n,t}: s with s and s+t inside the lattice
    std::vector<int> lo(d), hi(d);
    long count = 1;
    for (int i = 0; i < d; ++i) {
      lo[i] = std::max(1, 1 - t[i]);
      hi[i] = std::min(y.extents[i], y.extents[i] - t[i]);
      count *= y.extents[i] - std::abs(t[i]);
    }
    double sum = 0;
    s = lo;
    while (true) {
      for (int i = 0; i < d; ++i) st[i] = s[i] + t[i];
      sum += (y.at(st) - mu) * (y.at(s) - mu);
      int i = d - 1;
      while (i >= 0 && s[i] == hi[i]) s[i--] = lo[i];
      if (i < 0) break;
      ++s[i];
    }
    out.push_back(sum / count);
  }
  return AcovTable(order, std::move(out));
}

void write_field_csv(std::ostream& os, const FieldGrid& y, const std::string& header_extra) {
  if (y.dim() > 2) throw std::invalid_argument("write_field_csv: d <= 2 only");
  os << "# n=";
  for (int i = 0; i < y.dim(); ++i) os << (i ? "x" : "") << y.extents[i];
  if (!header_extra.empty()) os << ", " << header_extra;
  os << "\n";
  os.precision(17);
  long cols = y.dim() == 2 ? y.extents[1] : y.extents[0];
  long rows = static_cast<long>(y.values.size()) / cols;
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (c) os << ",";
      os << y.values[r * cols + c];
    }
    os << "\n";
  }
}

FieldGrid read_field_csv(std::istream& is) {
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("read_field_csv: no data");
  size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols) throw std::runtime_error("read_field_csv: ragged rows");
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  if (rows.size() == 1)
    return FieldGrid({static_cast<int>(cols)}, std::move(flat));
  if (cols == 1) {
    return FieldGrid({static_cast<int>(rows.size())}, std::move(flat));
  }
  return FieldGrid({static_cast<int>(rows.size()), static_cast<int>(cols)}, std::move(flat));
}

namespace {
constexpr char kMagic[8] = {'M', 'A', 'C', 'O', 'V', 'F', '6', '4'};
}

void write_field_binary(std::ostream& os, const FieldGrid& y) {
  if (y.dim() > 4) throw std::invalid_argument("write_field_binary: d <= 4 only");
  char header[32] = {};
  std::memcpy(header, kMagic, 8);
  std::uint32_t version = 1, d = y.dim();
  std::memcpy(header + 8, &version, 4);
  std::memcpy(header + 12, &d, 4);
  for (int i = 0; i < y.dim(); ++i) {
    std::uint32_t e = y.extents[i];
    std::memcpy(header + 16 + 4 * i, &e, 4);
  }
  os.write(header, 32);
  os.write(reinterpret_cast<const char*>(y.values.data()), y.values.size() * sizeof(double));
}

FieldGrid read_field_binary(std::istream& is) {
  char header[32];
  is.read(header, 32);
  if (is.gcount() != 32 || std::memcmp(header, kMagic, 8) != 0)
    throw std::runtime_error("read_field_binary: bad header");
  std::uint32_t version, d;
  std::memcpy(&version, header + 8, 4);
  std::memcpy(&d, header + 12, 4);
  if (version != 1 || d < 1 || d > 4) throw std::runtime_error("read_field_binary: unsupported format");
  std::vector<int> n(d);
  long total = 1;
  for (std::uint32_t i = 0; i < d; ++i) {
    std::uint32_t e;
    std::memcpy(&e, header + 16 + 4 * i, 4);
    n[i] = static_cast<int>(e);
    total *= n[i];
  }
  std::vector<double> v(total);
  is.read(reinterpret_cast<char*>(v.data()), total * sizeof(double));
  if (is.gcount() != static_cast<std::streamsize>(total * sizeof(double)))
    throw std::runtime_error("read_field_binary: truncated data");
  return FieldGrid(std::move(n), std::move(v));
}

void write_field_pgm(std::ostream& os, const FieldGrid& y) {
  if (y.dim() != 2) throw std::invalid_argument("write_field_pgm: d = 2 only");
  double lo = *std::min_element(y.values.begin(), y.values.end());
  double hi = *std::max_element(y.values.begin(), y.values.end());
  double range = hi > lo ? hi - lo : 1.0;
  os << "P2\n" << y.extents[1] << " " << y.extents[0] << "\n255\n";
  for (int r = 0; r < y.extents[0]; ++r) {
    for (int c = 0; c < y.extents[1]; ++c) {
      if (c) os << " ";
      os << static_cast<int>(std::lround(255.0 * (y.values[long(r) * y.extents[1] + c] - lo) / range));
    }
    os << "\n";
  }
}

}  // namespace macov
