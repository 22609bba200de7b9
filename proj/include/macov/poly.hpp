#ifndef MACOV_POLY_HPP
#define MACOV_POLY_HPP

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace macov {

using cdouble = std::complex<double>;

// Dense-exponent multivariate polynomial over C.
class MPoly {
public:
  struct Term {
    cdouble coef;
    std::vector<int> exps;
  };

  explicit MPoly(int nvars = 0) : nvars_(nvars) {}
  static MPoly constant(int nvars, cdouble c);
  static MPoly variable(int nvars, int index, int power = 1);

  int nvars() const { return nvars_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;  // max total degree, -1 for the zero polynomial

  void add_term(cdouble coef, std::vector<int> exps);

  MPoly operator+(const MPoly& o) const;
  MPoly operator-(const MPoly& o) const;
  MPoly operator*(const MPoly& o) const;
  MPoly operator*(cdouble c) const;
  MPoly& operator+=(const MPoly& o);
  MPoly& operator-=(const MPoly& o);

  MPoly derivative(int var) const;
  cdouble eval(const std::vector<cdouble>& z) const;
  // Evaluation using a per-variable power table powers[v][e] = z_v^e.
  cdouble eval_powers(const std::vector<std::vector<cdouble>>& powers) const;

  std::string str(const std::vector<std::string>& names = {}) const;

private:
  int nvars_;
  std::vector<Term> terms_;  // invariant: unique exps, nonzero coefs
  void normalize(std::map<std::vector<int>, cdouble>&& acc);
};

struct PolySystem {
  std::vector<MPoly> equations;

  int nvars() const { return equations.empty() ? 0 : equations.front().nvars(); }
  int neqs() const { return static_cast<int>(equations.size()); }
  bool square() const { return neqs() == nvars(); }
  // Product of equation degrees; throws on overflow past 2^62.
  long bezout_number() const;

  std::vector<cdouble> eval(const std::vector<cdouble>& z) const;
  // residual = max equation magnitude at z
  double residual(const std::vector<cdouble>& z) const;
};

struct Solution {
  std::vector<cdouble> point;
  double residual = 0.0;
  bool converged = false;
  int cluster_id = -1;
  bool is_real = false;
};

struct SolutionSet {
  std::vector<Solution> points;
  long bezout = 0;
  long n_converged = 0;
  long n_divergent = 0;
  long n_failed = 0;
  long n_suspect = 0;
};

// One polynomial per line, terms like "3.5 * x1^2 x3 - x2", '#' comments.
PolySystem parse_system(std::istream& in);
PolySystem parse_system_string(const std::string& text);

}  // namespace macov

#endif
