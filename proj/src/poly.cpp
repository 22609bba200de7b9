#include "macov/poly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace macov {

MPoly MPoly::constant(int nvars, cdouble c) {
  MPoly p(nvars);
  p.add_term(c, std::vector<int>(nvars, 0));
  return p;
}

MPoly MPoly::variable(int nvars, int index, int power) {
  MPoly p(nvars);
  std::vector<int> e(nvars, 0);
  e[index] = power;
  p.add_term(cdouble(1), std::move(e));
  return p;
}

int MPoly::degree() const {
  int d = -1;
  for (const auto& t : terms_) {
    int td = 0;
    for (int e : t.exps) td += e;
    d = std::max(d, td);
  }
  return d;
}

void MPoly::add_term(cdouble coef, std::vector<int> exps) {
  if (static_cast<int>(exps.size()) != nvars_) throw std::invalid_argument("MPoly: exps size");
  if (coef == cdouble(0)) return;
  for (auto& t : terms_) {
    if (t.exps == exps) {
      t.coef += coef;
      if (t.coef == cdouble(0)) {
        t = terms_.back();
        terms_.pop_back();
      }
      return;
    }
  }
  terms_.push_back({coef, std::move(exps)});
}

void MPoly::normalize(std::map<std::vector<int>, cdouble>&& acc) {
  terms_.clear();
  for (auto& [e, c] : acc)
    if (c != cdouble(0)) terms_.push_back({c, e});
}

MPoly MPoly::operator+(const MPoly& o) const {
  MPoly r = *this;
  r += o;
  return r;
}

MPoly MPoly::operator-(const MPoly& o) const {
  MPoly r = *this;
  r -= o;
  return r;
}

MPoly& MPoly::operator+=(const MPoly& o) {
  for (const auto& t : o.terms_) add_term(t.coef, t.exps);
  return *this;
}

MPoly& MPoly::operator-=(const MPoly& o) {
  for (const auto& t : o.terms_) add_term(-t.coef, t.exps);
  return *this;
}

MPoly MPoly::operator*(const MPoly& o) const {
  std::map<std::vector<int>, cdouble> acc;
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) {
      std::vector<int> e(nvars_);
      for (int i = 0; i < nvars_; ++i) e[i] = a.exps[i] + b.exps[i];
      acc[std::move(e)] += a.coef * b.coef;
    }
  MPoly r(nvars_);
  r.normalize(std::move(acc));
  return r;
}

MPoly MPoly::operator*(cdouble c) const {
  MPoly r(nvars_);
  if (c == cdouble(0)) return r;
  for (const auto& t : terms_) r.terms_.push_back({t.coef * c, t.exps});
  return r;
}

MPoly MPoly::derivative(int var) const {
  MPoly r(nvars_);
  for (const auto& t : terms_) {
    if (t.exps[var] == 0) continue;
    std::vector<int> e = t.exps;
    cdouble c = t.coef * double(e[var]);
    --e[var];
    r.terms_.push_back({c, std::move(e)});
  }
  return r;
}

cdouble MPoly::eval(const std::vector<cdouble>& z) const {
  cdouble sum(0);
  for (const auto& t : terms_) {
    cdouble m = t.coef;
    for (int i = 0; i < nvars_; ++i)
      for (int e = 0; e < t.exps[i]; ++e) m *= z[i];
    sum += m;
  }
  return sum;
}

cdouble MPoly::eval_powers(const std::vector<std::vector<cdouble>>& powers) const {
  cdouble sum(0);
  for (const auto& t : terms_) {
    cdouble m = t.coef;
    for (int i = 0; i < nvars_; ++i)
      if (t.exps[i]) m *= powers[i][t.exps[i]];
    sum += m;
  }
  return sum;
}

std::string MPoly::str(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  auto sorted = terms_;
  std::sort(sorted.begin(), sorted.end(),
            [](const Term& a, const Term& b) { return a.exps > b.exps; });
  for (const auto& t : sorted) {
    double re = t.coef.real(), im = t.coef.imag();
    if (!first) os << (re < 0 && im == 0 ? " - " : " + ");
    double c = (!first && re < 0 && im == 0) ? -re : re;
    first = false;
    if (im != 0)
      os << "(" << re << (im < 0 ? "" : "+") << im << "i)";
    else
      os << c;
    for (int i = 0; i < nvars_; ++i) {
      if (!t.exps[i]) continue;
      os << " * ";
      if (static_cast<int>(names.size()) > i)
        os << names[i];
      else
        os << "x" << (i + 1);
      if (t.exps[i] > 1) os << "^" << t.exps[i];
    }
  }
  return os.str();
}

long PolySystem::bezout_number() const {
  long b = 1;
  for (const auto& p : equations) {
    int d = std::max(p.degree(), 0);
    if (d > 0 && b > (long(1) << 62) / d) throw std::overflow_error("bezout_number overflow");
    b *= std::max(d, 1);
  }
  return b;
}

std::vector<cdouble> PolySystem::eval(const std::vector<cdouble>& z) const {
  std::vector<cdouble> out;
  out.reserve(equations.size());
  for (const auto& p : equations) out.push_back(p.eval(z));
  return out;
}

double PolySystem::residual(const std::vector<cdouble>& z) const {
  double r = 0;
  for (const auto& p : equations) r = std::max(r, std::abs(p.eval(z)));
  return r;
}

namespace {

struct Parser {
  const std::string& s;
  size_t pos = 0;
  int max_var = 0;

  explicit Parser(const std::string& str) : s(str) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool parse_number(double& out) {
    skip_ws();
    size_t start = pos;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
    bool digits = false;
    while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) {
      digits = std::isdigit(static_cast<unsigned char>(s[pos])) || digits;
      ++pos;
    }
    if (!digits) {
      pos = start;
      return false;
    }
    if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
      size_t ep = pos + 1;
      if (ep < s.size() && (s[ep] == '+' || s[ep] == '-')) ++ep;
      if (ep < s.size() && std::isdigit(static_cast<unsigned char>(s[ep]))) {
        pos = ep;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      }
    }
    out = std::stod(s.substr(start, pos - start));
    return true;
  }

  // term := [number] ['*'] (x<i>['^'<e>] ['*'?])*
  bool parse_term(double sign, std::vector<std::pair<double, std::vector<std::pair<int, int>>>>& terms) {
    skip_ws();
    if (pos >= s.size()) return false;
    double coef = 1.0;
    bool saw_any = false;
    double num;
    if (parse_number(num)) {
      coef = num;
      saw_any = true;
    }
    std::vector<std::pair<int, int>> vars;
    while (true) {
      skip_ws();
      if (pos < s.size() && s[pos] == '*') {
        ++pos;
        skip_ws();
      }
      if (pos < s.size() && (s[pos] == 'x' || s[pos] == 'X')) {
        ++pos;
        size_t vstart = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == vstart) throw std::runtime_error("parse_system: expected variable index after 'x'");
        int vi = std::stoi(s.substr(vstart, pos - vstart));
        if (vi < 1) throw std::runtime_error("parse_system: variable indices start at 1");
        max_var = std::max(max_var, vi);
        int e = 1;
        skip_ws();
        if (pos < s.size() && s[pos] == '^') {
          ++pos;
          skip_ws();
          size_t estart = pos;
          while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
          if (pos == estart) throw std::runtime_error("parse_system: expected exponent after '^'");
          e = std::stoi(s.substr(estart, pos - estart));
        }
        vars.emplace_back(vi - 1, e);
        saw_any = true;
        continue;
      }
      break;
    }
    if (!saw_any) throw std::runtime_error("parse_system: empty term");
    terms.emplace_back(sign * coef, std::move(vars));
    return true;
  }
};

}  // namespace

PolySystem parse_system(std::istream& in) {
  PolySystem sys;
  std::vector<std::vector<std::pair<double, std::vector<std::pair<int, int>>>>> all_terms;
  int max_var = 0;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) continue;

    Parser p(line);
    std::vector<std::pair<double, std::vector<std::pair<int, int>>>> terms;
    double sign = 1.0;
    p.skip_ws();
    if (p.pos < line.size() && (line[p.pos] == '+' || line[p.pos] == '-')) {
      if (line[p.pos] == '-') sign = -1.0;
      ++p.pos;
    }
    while (true) {
      if (!p.parse_term(sign, terms)) break;
      p.skip_ws();
      if (p.pos >= line.size()) break;
      if (line[p.pos] == '+')
        sign = 1.0;
      else if (line[p.pos] == '-')
        sign = -1.0;
      else
        throw std::runtime_error("parse_system: unexpected character '" + std::string(1, line[p.pos]) + "'");
      ++p.pos;
    }
    max_var = std::max(max_var, p.max_var);
    all_terms.push_back(std::move(terms));
  }

  for (auto& terms : all_terms) {
    MPoly poly(max_var);
    for (auto& [c, vars] : terms) {
      std::vector<int> e(max_var, 0);
      for (auto& [vi, ex] : vars) e[vi] += ex;
      poly.add_term(cdouble(c), std::move(e));
    }
    sys.equations.push_back(std::move(poly));
  }
  return sys;
}

PolySystem parse_system_string(const std::string& text) {
  std::istringstream in(text);
  return parse_system(in);
}

}  // namespace macov
