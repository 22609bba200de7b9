#include "macov/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace macov {

std::string json_num(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("json_num: non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::string num_array(const std::vector<double>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += json_num(v[i]);
  }
  return s + "]";
}

std::string int_array(const std::vector<int>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s + "]";
}

std::vector<int> get_q(const nlohmann::json& j) {
  if (!j.contains("q") || !j["q"].is_array()) throw std::invalid_argument("json: missing \"q\" array");
  std::vector<int> q;
  for (const auto& x : j["q"]) q.push_back(x.get<int>());
  return q;
}

std::vector<double> get_nums(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array())
    throw std::invalid_argument(std::string("json: missing \"") + key + "\" array");
  std::vector<double> v;
  for (const auto& x : j[key]) v.push_back(x.get<double>());
  return v;
}

}  // namespace

std::string coef_to_json(const CoefGrid& a) {
  return "{\"q\": " + int_array(a.order.q()) + ", \"a\": " + num_array(a.values) + "}";
}

CoefGrid coef_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  return CoefGrid(Order(get_q(j)), get_nums(j, "a"));
}

std::string acov_to_json(const AcovTable& g, bool with_lags) {
  std::string s = "{\"q\": " + int_array(g.order.q()) + ", \"gamma\": " + num_array(g.values);
  if (with_lags) {
    s += ", \"lags\": [";
    const auto& lags = g.order.half_lags();
    for (size_t i = 0; i < lags.size(); ++i) {
      if (i) s += ", ";
      s += int_array(lags[i]);
    }
    s += "]";
  }
  return s + "}";
}

AcovTable acov_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  return AcovTable(Order(get_q(j)), get_nums(j, "gamma"));
}

namespace {

std::string complex_point_json(const Order& order, const std::vector<cdouble>& z, bool real) {
  std::string s = "{\"q\": " + int_array(order.q());
  std::vector<double> re(z.size()), im(z.size());
  for (size_t i = 0; i < z.size(); ++i) {
    re[i] = z[i].real();
    im[i] = z[i].imag();
  }
  if (real) return s + ", \"a\": " + num_array(re) + "}";
  return s + ", \"a_re\": " + num_array(re) + ", \"a_im\": " + num_array(im) + "}";
}

}  // namespace

std::string fiber_to_json(const Fiber& f, int invertible_index) {
  std::string s = "{\"points\": [";
  for (size_t i = 0; i < f.points.size(); ++i) {
    if (i) s += ", ";
    s += complex_point_json(f.order, f.points[i], f.is_real[i]);
  }
  s += "], \"real\": [";
  for (size_t i = 0; i < f.is_real.size(); ++i) {
    if (i) s += ", ";
    s += f.is_real[i] ? "true" : "false";
  }
  s += "], \"invertible_index\": ";
  s += invertible_index >= 0 ? std::to_string(invertible_index) : "null";
  if (f.boundary) s += ", \"boundary\": true";
  return s + "}";
}

std::string report_to_json(const CriticalReport& rep, const Order& order) {
  std::string s = "{\"critical_points\": [";
  for (size_t i = 0; i < rep.points.size(); ++i) {
    const auto& cp = rep.points[i];
    if (i) s += ", ";
    s += "{\"a\": " + complex_point_json(order, cp.a, cp.is_real);
    if (cp.real_image) {
      s += ", \"objective\": " + json_num(cp.objective);
      s += ", \"gamma\": " + num_array(cp.gamma_image);
    }
    if (cp.singular_image) s += ", \"singular\": true";
    s += "}";
  }
  s += "], \"real_indices\": [";
  for (size_t i = 0; i < rep.real_indices.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(rep.real_indices[i]);
  }
  s += "], \"selected\": ";
  if (rep.selected >= 0) {
    const auto& cp = rep.points[rep.selected];
    s += "{\"index\": " + std::to_string(rep.selected);
    if (cp.is_real) s += ", \"a\": " + num_array(real_part(cp.a));
    s += ", \"gamma\": " + num_array(cp.gamma_image) + "}";
  } else {
    s += "null";
  }
  s += ", \"objective\": " + json_num(rep.objective);
  s += ", \"path_stats\": {\"bezout\": " + std::to_string(rep.stats.bezout) +
       ", \"converged\": " + std::to_string(rep.stats.converged) +
       ", \"divergent\": " + std::to_string(rep.stats.divergent) +
       ", \"failed\": " + std::to_string(rep.stats.failed) +
       ", \"suspect\": " + std::to_string(rep.stats.suspect) + "}";
  return s + "}";
}

std::string slurp(std::istream& is) {
  std::ostringstream ss;
  ss << is.rdbuf();
  if (is.bad()) throw std::runtime_error("read failed");
  return ss.str();
}

std::string slurp_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return slurp(f);
}

void spit_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace macov
