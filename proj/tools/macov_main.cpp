#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "macov/estimate.hpp"
#include "macov/field.hpp"
#include "macov/identify.hpp"
#include "macov/json_io.hpp"
#include "macov/lattice.hpp"
#include "macov/solve.hpp"

using namespace macov;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

bool has_suffix(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

FieldGrid read_field(const std::string& path) {
  if (has_suffix(path, ".bin")) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open " + path);
    return read_field_binary(f);
  }
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open " + path);
  return read_field_csv(f);
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text << "\n";
  } else {
    spit_file(out_path, text + "\n");
  }
}

struct SimulateArgs {
  std::string q, a_file, a_inline, n, out, pgm_out;
  std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateArgs& args) {
  std::vector<int> n = parse_int_list(args.n);
  CoefGrid a = args.a_file.empty()
                   ? CoefGrid(Order(parse_int_list(args.q)), parse_double_list(args.a_inline))
                   : coef_from_json(slurp_file(args.a_file));
  if (static_cast<int>(n.size()) != a.order.dim())
    throw std::invalid_argument("simulate: n and q dimension mismatch");
  for (int i = 0; i < a.order.dim(); ++i)
    if (n[i] <= a.order[i]) throw std::invalid_argument("simulate: each n_i must exceed q_i");

  FieldGrid y = simulate(a, n, NoiseSpec{args.seed});
  std::string extra = "seed=" + std::to_string(args.seed);
  if (a.order.dim() <= 2) {
    std::ofstream f(args.out);
    if (!f) throw std::invalid_argument("cannot open " + args.out + " for writing");
    write_field_csv(f, y, extra);
  } else {
    std::ofstream f(args.out, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open " + args.out + " for writing");
    write_field_binary(f, y);
  }
  if (!args.pgm_out.empty()) {
    std::ofstream f(args.pgm_out);
    if (!f) throw std::invalid_argument("cannot open " + args.pgm_out + " for writing");
    write_field_pgm(f, y);
  }
  return 0;
}

struct AcfArgs {
  std::string in, q, out;
  bool no_center = false;
};

int cmd_acf(const AcfArgs& args) {
  FieldGrid y = read_field(args.in);
  Order order(parse_int_list(args.q));
  AcovTable g = empirical_acov(y, order, !args.no_center);
  emit(args.out, acov_to_json(g));
  return 0;
}

struct InvertArgs {
  std::string in, out, method = "auto";
  bool real_only = false;
};

int cmd_invert(const InvertArgs& args) {
  AcovTable g = acov_from_json(slurp_file(args.in));
  Fiber f(g.order);
  std::string method = args.method;
  if (method == "auto") {
    if (g.order.dim() == 1)
      method = "d1";
    else if (g.order.dim() == 2 && g.order[0] == 1 && g.order[1] == 1)
      method = "ma11";
    else
      method = "generic";
  }
  if (method == "d1")
    f = fiber_d1(g, !args.real_only);
  else if (method == "ma11")
    f = fiber_ma11(g, !args.real_only);
  else if (method == "ma2")
    f = fiber_ma2_triangular(g);
  else if (method == "generic")
    f = fiber_generic(g);
  else
    throw std::invalid_argument("invert: unknown method " + method);

  int inv_idx = -1;
  if (g.order.dim() == 1) {
    try {
      CoefGrid rep = invertible_representative(f);
      for (size_t i = 0; i < f.points.size(); ++i) {
        if (!f.is_real[i]) continue;
        if (points_close(f.points[i], canonical_sign(
                std::vector<cdouble>(rep.values.begin(), rep.values.end())), 1e-8))
          inv_idx = static_cast<int>(i);
      }
    } catch (const std::runtime_error&) {
      inv_idx = -1;
    }
  }
  emit(args.out, fiber_to_json(f, inv_idx));
  return 0;
}

struct EstimateArgs {
  std::string in, q, out, method = "lse";
  long max_paths = 20000;
  double box_radius = 0;
};

int cmd_estimate(const EstimateArgs& args) {
  Order order(parse_int_list(args.q));
  TrackOptions opts;
  opts.max_paths = args.max_paths;

  if (args.method == "lse") {
    AcovTable target = has_suffix(args.in, ".json")
                           ? acov_from_json(slurp_file(args.in))
                           : empirical_acov(read_field(args.in), order);
    if (!(target.order == order)) throw std::invalid_argument("estimate: order mismatch with input");
    CriticalReport rep = lse_solve(LseProblem(order, target), opts);
    emit(args.out, report_to_json(rep, order));
    return 0;
  }

  if (args.method == "mle") {
    FieldGrid y = read_field(args.in);
    MleProblem p(order, y, args.box_radius);
    MleLocalResult res{CoefGrid(order, std::vector<double>(order.coef_count(), 0.0)), 0, false};
    std::string how;
    if (order.dim() == 1 && order[0] == 1 && y.size() == 2) {
      ExactMa1 e = mle_exact_ma1_n2(y.values[0], y.values[1]);
      res = {e.a, e.loglik, true};
      how = "\"exact\", \"case\": \"" + e.case_label + "\"";
    } else if (order.dim() == 1 && order[0] == 1 && y.size() <= 8) {
      auto sc = mle_solve_score(p, opts);
      if (!sc) throw std::runtime_error("estimate: no feasible score critical point");
      res = *sc;
      how = "\"score\"";
    } else {
      CoefGrid init = order.dim() == 1
                          ? innovations_d1(empirical_acov(y, order), 50).a
                          : [&] {
                              AcovTable g = empirical_acov(y, order);
                              CriticalReport rep = lse_solve(LseProblem(order, g), opts);
                              return CoefGrid(order, real_part(rep.points[rep.selected].a));
                            }();
      res = mle_solve_local(p, init);
      how = "\"local\"";
    }
    std::string s = "{\"a\": [";
    for (size_t i = 0; i < res.a.values.size(); ++i) {
      if (i) s += ", ";
      s += json_num(res.a.values[i]);
    }
    s += "], \"loglik\": " + json_num(res.loglik);
    s += ", \"converged\": " + std::string(res.converged ? "true" : "false");
    s += ", \"method\": " + how + "}";
    emit(args.out, s);
    return 0;
  }
  throw std::invalid_argument("estimate: unknown method " + args.method);
}

struct MemberArgs {
  std::string in, out;
  double tol = 1e-8;
};

int cmd_member(const MemberArgs& args) {
  AcovTable g = acov_from_json(slurp_file(args.in));
  if (!(g.order.dim() == 2 && g.order[0] == 1 && g.order[1] == 1))
    throw std::invalid_argument("member: only order q=(1,1) has a known defining quartic");
  QuarticEval qe = quartic_eval(g);
  bool on = std::abs(qe.value) <= args.tol * (1.0 + qe.scale);
  auto comps = singular_component_membership(g, args.tol);

  std::string names;
  for (auto c : comps) {
    if (!names.empty()) names += ",";
    names += c == SingularComponent::C1 ? "C1" : (c == SingularComponent::C2 ? "C2" : "C3");
  }
  std::printf("on variety: %s; singular components: %s\n", on ? "yes" : "no",
              names.empty() ? "none" : names.c_str());

  if (!args.out.empty()) {
    std::string s = "{\"on_variety\": " + std::string(on ? "true" : "false");
    s += ", \"quartic_value\": " + json_num(qe.value);
    s += ", \"quartic_scale\": " + json_num(qe.scale);
    s += ", \"singular_components\": [";
    bool first = true;
    for (auto c : comps) {
      if (!first) s += ", ";
      first = false;
      s += c == SingularComponent::C1 ? "\"C1\"" : (c == SingularComponent::C2 ? "\"C2\"" : "\"C3\"");
    }
    s += "]}";
    emit(args.out, s);
  }
  return 0;
}

struct SolveArgs {
  std::string in, out;
  long max_paths = 20000;
  std::uint64_t seed = 0x6d61636f76ULL;
};

int cmd_solve(const SolveArgs& args) {
  std::ifstream f(args.in);
  if (!f) throw std::invalid_argument("cannot open " + args.in);
  PolySystem sys = parse_system(f);
  TrackOptions opts;
  opts.max_paths = args.max_paths;
  opts.seed = args.seed;
  SolutionSet sols = solve_total_degree(sys, opts);

  std::string s = "{\"bezout\": " + std::to_string(sols.bezout);
  s += ", \"converged\": " + std::to_string(sols.n_converged);
  s += ", \"divergent\": " + std::to_string(sols.n_divergent);
  s += ", \"failed\": " + std::to_string(sols.n_failed);
  s += ", \"suspect\": " + std::to_string(sols.n_suspect);
  s += ", \"solutions\": [";
  bool first = true;
  for (const auto& sol : sols.points) {
    if (!sol.converged) continue;
    if (!first) s += ", ";
    first = false;
    s += "{\"z_re\": [";
    for (size_t i = 0; i < sol.point.size(); ++i) {
      if (i) s += ", ";
      s += json_num(sol.point[i].real());
    }
    s += "], \"z_im\": [";
    for (size_t i = 0; i < sol.point.size(); ++i) {
      if (i) s += ", ";
      s += json_num(sol.point[i].imag());
    }
    s += "], \"residual\": " + json_num(sol.residual) + "}";
  }
  s += "]}";
  emit(args.out, s);
  return 0;
}

struct MlDegreeArgs {
  std::string q = "1", n;
  std::uint64_t seed = 7;
  long max_paths = 20000;
};

int cmd_mldegree(const MlDegreeArgs& args) {
  Order order(parse_int_list(args.q));
  std::vector<int> extents = parse_int_list(args.n);
  if (static_cast<int>(extents.size()) != order.dim())
    throw std::invalid_argument("mldegree: n and q dimension mismatch");

  // Generic sample drawn from the documented noise stream.
  long m = 1;
  for (int e : extents) m *= e;
  std::vector<double> Y = draw_noise(order, extents, NoiseSpec{args.seed});
  Y.resize(m);

  TrackOptions opts;
  opts.max_paths = args.max_paths;
  MlDegree deg = ml_degree_count(order, extents, Y, opts);
  std::printf("ml degree count: %d (suspect paths: %ld)%s\n", deg.count, deg.suspect,
              deg.certified() ? "" : "  [interval, not certified]");

  PolySystem sys = ml_score_system(order, extents, Y);
  for (size_t i = 0; i < deg.points.size(); ++i)
    std::printf("  point %zu: residual %.3e\n", i, sys.residual(deg.points[i]));
  return 0;
}

struct EdCountArgs {
  std::string q = "1,1";
  std::uint64_t seed = 7;
  long max_paths = 20000;
};

// Stretch experiment: distinct LSE critical points for a random target.
// Counts are logged for inspection, never asserted.
int cmd_edcount(const EdCountArgs& args) {
  Order order(parse_int_list(args.q));
  if (order.coef_count() > 8)
    throw std::invalid_argument("edcount: Q+1 > 8 exceeds the path budget");

  std::vector<double> raw = draw_noise(order, std::vector<int>(order.dim(), 1), NoiseSpec{args.seed});
  raw.resize(order.half_lag_count());
  AcovTable target(order, raw);
  LseProblem p(order, target);

  TrackOptions opts;
  opts.max_paths = args.max_paths;

  if (order.dim() == 2 && order[0] == 1 && order[1] == 1) {
    int c = ed_count_ma11(p, opts);
    std::printf("ed count (singular images excluded): %d\n", c);
    return 0;
  }
  CriticalReport rep = lse_solve(p, opts);
  std::printf("distinct critical points mod symmetry: %zu (bezout %ld, suspect %ld)\n",
              rep.points.size(), rep.stats.bezout, rep.stats.suspect);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"macov: autocovariance analysis for moving-average random fields"};
  app.require_subcommand(1);
  bool json_errors = false;
  app.add_flag("--json-errors", json_errors, "emit failures as JSON on stderr");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "simulate an MA(q) field");
  c_sim->add_option("--q", sim.q, "order, comma separated (with --a)");
  c_sim->add_option("--a-file", sim.a_file, "coefficient JSON file");
  c_sim->add_option("--a", sim.a_inline, "coefficients, comma separated (with --q)");
  c_sim->add_option("--n", sim.n, "grid extents, comma separated")->required();
  c_sim->add_option("--seed", sim.seed, "noise seed");
  c_sim->add_option("--out", sim.out, "output field file (.csv or .bin)")->required();
  c_sim->add_option("--pgm", sim.pgm_out, "also write a PGM heatmap (d=2)");

  AcfArgs acf;
  auto* c_acf = app.add_subcommand("acf", "empirical autocovariance of a field");
  c_acf->add_option("--in", acf.in, "field file (.csv or .bin)")->required();
  c_acf->add_option("--q", acf.q, "order, comma separated")->required();
  c_acf->add_option("--out", acf.out, "output JSON (default stdout)");
  c_acf->add_flag("--no-center", acf.no_center, "skip mean subtraction");

  InvertArgs inv;
  auto* c_inv = app.add_subcommand("invert", "fiber of the autocovariance map");
  c_inv->add_option("--in", inv.in, "autocovariance JSON")->required();
  c_inv->add_option("--out", inv.out, "output JSON (default stdout)");
  c_inv->add_option("--method", inv.method, "auto|d1|ma11|ma2|generic");
  c_inv->add_flag("--real-only", inv.real_only, "drop complex fiber points");

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "parameter estimation");
  c_est->add_option("--in", est.in, "field file or autocovariance JSON")->required();
  c_est->add_option("--q", est.q, "order, comma separated")->required();
  c_est->add_option("--method", est.method, "lse|mle");
  c_est->add_option("--out", est.out, "output JSON (default stdout)");
  c_est->add_option("--max-paths", est.max_paths, "homotopy path budget");
  c_est->add_option("--box-radius", est.box_radius, "MLE parameter box radius");

  MemberArgs mem;
  auto* c_mem = app.add_subcommand("member", "variety membership for q=(1,1)");
  c_mem->add_option("--in", mem.in, "autocovariance JSON")->required();
  c_mem->add_option("--out", mem.out, "optional JSON report");
  c_mem->add_option("--tol", mem.tol, "relative tolerance");

  SolveArgs slv;
  auto* c_slv = app.add_subcommand("solve", "solve a polynomial system from a text file");
  c_slv->add_option("--in", slv.in, "system file, one polynomial per line")->required();
  c_slv->add_option("--out", slv.out, "output JSON (default stdout)");
  c_slv->add_option("--max-paths", slv.max_paths, "path budget");
  c_slv->add_option("--seed", slv.seed, "gamma-trick seed");

  MlDegreeArgs mld;
  auto* c_mld = app.add_subcommand("mldegree", "ML degree count for random data");
  c_mld->add_option("--q", mld.q, "order, comma separated");
  c_mld->add_option("--n", mld.n, "sample extents, comma separated")->required();
  c_mld->add_option("--seed", mld.seed, "data seed");
  c_mld->add_option("--max-paths", mld.max_paths, "path budget");

  EdCountArgs edc;
  auto* c_edc = app.add_subcommand("edcount", "LSE critical-point count experiment");
  c_edc->add_option("--q", edc.q, "order, comma separated");
  c_edc->add_option("--seed", edc.seed, "target seed");
  c_edc->add_option("--max-paths", edc.max_paths, "path budget");

  CLI11_PARSE(app, argc, argv);

  auto fail = [&](const char* kind, const std::string& what, int code) {
    if (json_errors)
      std::fprintf(stderr, "{\"error\": \"%s\", \"message\": \"%s\"}\n", kind, what.c_str());
    else
      std::fprintf(stderr, "macov: %s\n", what.c_str());
    return code;
  };

  try {
    if (c_sim->parsed()) return cmd_simulate(sim);
    if (c_acf->parsed()) return cmd_acf(acf);
    if (c_inv->parsed()) return cmd_invert(inv);
    if (c_est->parsed()) return cmd_estimate(est);
    if (c_mem->parsed()) return cmd_member(mem);
    if (c_slv->parsed()) return cmd_solve(slv);
    if (c_mld->parsed()) return cmd_mldegree(mld);
    if (c_edc->parsed()) return cmd_edcount(edc);
  } catch (const std::invalid_argument& e) {
    return fail("validation", e.what(), 2);
  } catch (const std::runtime_error& e) {
    return fail("solver", e.what(), 3);
  }
  return 0;
}
