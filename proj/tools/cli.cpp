#include "naesat/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "naesat/auxiliary.hpp"
#include "naesat/errors.hpp"
#include "naesat/experiments.hpp"
#include "naesat/frozen.hpp"
#include "naesat/graphs.hpp"
#include "naesat/moments.hpp"
#include "naesat/naesat_core.hpp"
#include "naesat/recursions.hpp"
#include "naesat/rng.hpp"

#ifndef NAESAT_VERSION
#define NAESAT_VERSION "0.1.0"
#endif

namespace naesat::cli {

using json = nlohmann::ordered_json;

const char* version() { return NAESAT_VERSION; }

namespace {

struct Params {
  std::string verb;
  std::optional<int> k;
  std::string d;
  std::optional<int> n;
  int trials = 100;
  std::uint64_t seed = 1;
  std::optional<long> bits;
  std::string tol;
  std::string format = "json";
  std::string in, out;
  double t = 0.1;
  std::string eps = "0.01";
  std::string eta;
  bool no_pairs = false;
  int threads = 1;
};

std::string num(const Real& x) { return x.str(); }

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json reals(const auto& xs) {
  json a = json::array();
  for (const auto& x : xs) a.push_back(num(x));
  return a;
}

json matrix(const Matrix& M) {
  json a = json::array();
  for (std::size_t i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < M.cols(); ++j) row.push_back(num(M(i, j)));
    a.push_back(row);
  }
  return a;
}

json by_spin(const std::array<Real, kSpins>& h) {
  json o = json::object();
  for (int s = 0; s < kSpins; ++s) o[spin_name(static_cast<Spin>(s))] = num(h[s]);
  return o;
}

json by_rf(const std::array<Real, kRF>& g) {
  json o = json::object();
  for (int r = 0; r < kRF; ++r) o[rf_name(static_cast<RF>(r))] = num(g[r]);
  return o;
}

json by_pair(const std::array<Real, kPairs>& q) {
  static const char* names[3] = {"0", "1", "f"};
  json o = json::object();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) o[std::string(names[a]) + names[b]] = num(q[pair_index(a, b)]);
  return o;
}

std::string bits_string(const std::vector<std::uint8_t>& x) {
  std::string s;
  for (auto b : x) s.push_back(b == kFree ? 'f' : static_cast<char>('0' + b));
  return s;
}

int need_k(const Params& p) {
  if (!p.k) throw InputError("--k is required");
  if (*p.k < 3) throw InputError("k must be at least 3");
  return *p.k;
}

Real need_d(const Params& p) {
  if (p.d.empty()) throw InputError("--d is required");
  Real d(p.d);
  if (!d.is_finite()) throw InputError("--d must be a number");
  return d;
}

int need_int_d(const Params& p) {
  Real d = need_d(p);
  if (!(floor(d) == d) || d < Real(2) || d > Real(1 << 30)) throw InputError("--d must be an integer >= 2 here");
  return static_cast<int>(d.to_double());
}

std::vector<int> int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    long v = std::strtol(item.c_str(), &end, 10);
    if (item.empty() || *end != '\0') throw InputError("bad integer list: " + s);
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw InputError("empty integer list");
  return out;
}

Instance need_instance(const Params& p) {
  if (p.in.empty()) throw InputError("--in is required");
  return read_instance(p.in);
}

json scalar_json(const ScalarState& s) {
  return json{{"q", num(s.q)},         {"v", num(s.v)},         {"q_free", num(s.q_free)},
              {"v_rig", num(s.v_rig)}, {"residual", num(s.residual)}, {"iterations", s.iterations}};
}

Real tol_of(const Params& p, int k) { return p.tol.empty() ? default_tol(k) : Real(p.tol); }

json do_threshold(const Params& p) {
  const int k = need_k(p);
  Thresholds th = thresholds(k);
  DStar ds = find_d_star(k, tol_of(p, k));
  json r;
  r["d_star"] = num(ds.d_star);
  r["d_lbd"] = num(th.d_lbd);
  r["d_ubd"] = num(th.d_ubd);
  r["d_fm"] = num(th.d_fm);
  r["q"] = num(ds.scalar.q);
  r["v"] = num(ds.scalar.v);
  r["q_free"] = num(ds.scalar.q_free);
  r["phi_star"] = num(ds.phi_star);
  r["residual"] = num(ds.scalar.residual);
  r["bisections"] = ds.iterations;
  r["bracket_width"] = num(ds.bracket_width);
  return r;
}

json do_fixedpoint(const Params& p) {
  const int k = need_k(p);
  const Real d = need_d(p);
  FixedPoint fp = solve_fixed_point(k, d, tol_of(p, k), 10000);
  json r;
  r["scalar"] = scalar_json(fp.scalar);
  r["rf"] = {{"gdot", by_rf(fp.rf.gdot)}, {"ghat", by_rf(fp.rf.ghat)}, {"residual", num(fp.rf.residual)}};
  r["law"] = {{"hdot", by_spin(fp.law.hdot)},
              {"hhat", by_spin(fp.law.hhat)},
              {"residual", num(bethe_residual(k, d, fp.law))}};
  return r;
}

json do_rate(const Params& p) {
  const int k = need_k(p);
  const int d = need_int_d(p);
  const Real tol = tol_of(p, k);
  FixedPoint fp = solve_fixed_point(k, Real(d), tol, 10000);
  EmpiricalMeasure m = empirical_from_law(k, d, fp.law, tol);
  RatePoint rp = phi_bethe(m, tol);
  Normalizers nz = normalizers(fp);
  const Real star = phi_star_explicit(fp.scalar);
  const Real first = phi_first(k, Real(d));
  json r;
  r["scalar"] = scalar_json(fp.scalar);
  r["phi_star"] = num(star);
  r["phi_bethe"] = num(rp.phi);
  r["phi_normalizers"] = num(*rp.bethe_normalizer_form);
  r["phi_g"] = num(nz.phi_g);
  r["phi_first"] = num(first);
  r["gap_minus_q_free"] = num(first - star - fp.scalar.q_free);
  r["zdot_bar"] = num(*rp.zdot_bar);
  r["zhat_bar"] = num(*rp.zhat_bar);
  r["z_bar"] = num(*rp.z_bar);
  r["complete_enumeration"] = m.complete;
  if (rp.log_prefactor) r["log_prefactor"] = num(*rp.log_prefactor);
  if (rp.dimension) r["dimension"] = num(*rp.dimension);
  r["vh"] = reals(m.vh);
  return r;
}

json do_hessian(const Params& p) {
  const int k = need_k(p);
  const int d = need_int_d(p);
  const Real tol = tol_of(p, k);
  FixedPoint fp = solve_fixed_point(k, Real(d), tol, 10000);
  EmpiricalMeasure m = empirical_from_law(k, d, fp.law, tol);
  SpectralReport rep = transition_matrices(m, !p.no_pairs);
  HessianVerdict v = hessian_definiteness(rep);
  ExplicitTables et = explicit_tables(fp.scalar);
  json r;
  r["eig_Mdot"] = reals(rep.eig_Mdot);
  r["lambda"] = num(et.lambda);
  r["stochastic_error"] = num(rep.stochastic_error);
  r["reversibility_error"] = num(rep.reversibility_error);
  r["sigma_min"] = reals(v.sigma_min);
  r["nonsingular"] = v.nonsingular;
  if (v.nonsingular) {
    r["F_asymmetry"] = num(v.F_asymmetry);
    r["F_product_form_error"] = num(v.F_product_form_error);
    r["F_restricted"] = reals(v.F_restricted);
    r["hessian_max"] = num(v.hessian_max);
    r["negative_definite"] = v.negative_definite;
    if (rep.with_pairs) {
      r["F2_asymmetry"] = num(v.F2_asymmetry);
      r["hessian2_max"] = num(v.hessian2_max);
      r["pair_negative_definite"] = v.pair_negative_definite;
    }
  }
  r["Mdot"] = matrix(rep.Mdot);
  r["Mhat"] = matrix(rep.Mhat);
  return r;
}

json do_pair(const Params& p) {
  const int k = need_k(p);
  const int d = need_int_d(p);
  const Real tol = tol_of(p, k);
  FixedPoint fp = solve_fixed_point(k, Real(d), tol, 10000);
  PairState init = pair_perturbed(fp.scalar, Real(p.eps));
  PairState ps = pair_iterate(k, Real(d), init, tol, 10000);
  PairState prod = pair_product(fp.scalar);
  Real dist(0);
  for (int i = 0; i < kPairs; ++i) dist = max(dist, abs(ps.qdot[i] - prod.qdot[i]));
  PairRate pr = pair_rate(k, d, fp, ps, tol);
  json r;
  r["init_in_regime"] = init.in_regime;
  r["iterations"] = ps.iterations;
  r["residual"] = num(ps.residual);
  r["distance_to_product"] = num(dist);
  r["qdot"] = by_pair(ps.qdot);
  r["qhat"] = by_pair(ps.qhat);
  r["phi_star"] = num(pr.phi_star);
  r["phi_pair_product"] = num(pr.product);
  if (pr.product_literal_sum) r["phi_pair_product_literal_sum"] = num(*pr.product_literal_sum);
  r["phi_pair_identical0"] = num(pr.identical0);
  r["phi_pair_identical1"] = num(pr.identical1);
  return r;
}

json do_solve(const Params& p) {
  Instance inst = need_instance(p);
  DecideResult dr = decide(inst.graph, inst.literals);
  json r;
  r["n"] = inst.graph.n();
  r["m"] = inst.graph.m();
  r["sat"] = dr.sat;
  r["nodes"] = dr.nodes;
  if (dr.sat) r["witness"] = bits_string(dr.witness);
  if (inst.graph.n() <= 20) r["count"] = count_solutions(inst.graph, inst.literals).Z;
  return r;
}

json do_coarsen(const Params& p) {
  Instance inst = need_instance(p);
  DecideResult dr = decide(inst.graph, inst.literals);
  json r;
  r["sat"] = dr.sat;
  if (dr.sat) {
    FrozenConfig fc = coarsen(inst.graph, inst.literals, dr.witness);
    r["x"] = bits_string(dr.witness);
    r["eta"] = bits_string(fc.eta);
    r["free_count"] = fc.free_count;
    r["valid_frozen"] = is_valid_frozen(inst.graph, inst.literals, fc.eta);
  }
  return r;
}

json do_enumerate(const Params& p) {
  Instance inst = need_instance(p);
  const auto& g = inst.graph;
  const auto& L = inst.literals;
  TruncationPolicy pol = TruncationPolicy::unrestricted();
  FrozenEnumeration fe = enumerate_frozen(g, L, pol);
  json r;
  r["solutions"] = count_solutions(g, L).Z;
  r["frozen"] = fe.configs.size();
  r["aux"] = aux_partition(g, L, pol).count;
  json configs = json::array();
  for (const auto& c : fe.configs)
    configs.push_back({{"eta", bits_string(c.eta)}, {"cluster_size", cluster_preimage(g, L, c.eta).size()}});
  r["configs"] = configs;
  return r;
}

json do_complete(const Params& p) {
  Instance inst = need_instance(p);
  const auto& g = inst.graph;
  const auto& L = inst.literals;
  std::vector<std::uint8_t> eta;
  if (!p.eta.empty()) {
    if (p.eta.size() != static_cast<std::size_t>(g.n())) throw InputError("--eta must have one symbol per variable");
    for (char c : p.eta) {
      if (c == '0' || c == '1') {
        eta.push_back(static_cast<std::uint8_t>(c - '0'));
      } else if (c == 'f') {
        eta.push_back(kFree);
      } else {
        throw InputError("--eta symbols must be 0, 1 or f");
      }
    }
  } else {
    DecideResult dr = decide(g, L);
    if (!dr.sat) throw InputError("instance is unsatisfiable and no --eta was given");
    eta = coarsen(g, L, dr.witness).eta;
  }
  CompletionResult cr = complete_to_solution(g, L, eta, p.seed);
  json r;
  r["eta"] = bits_string(eta);
  r["ok"] = cr.ok;
  if (cr.ok) {
    r["x"] = bits_string(cr.x);
    r["is_solution"] = is_nae_solution(g, L, cr.x);
  } else {
    r["reason"] = cr.reason;
    r["component_vars"] = cr.component_vars;
    r["component_clauses"] = cr.component_clauses;
  }
  return r;
}

ExperimentOptions experiment_options(const Params& p) {
  ExperimentOptions o;
  o.threads = p.threads;
  return o;
}

void experiment_meta(json& r, const char* schema) {
  r["schema_id"] = schema;
  r["regime"] = kRegimeLabel;
}

json do_sweep(const Params& p) {
  if (!p.k) throw InputError("--k is required");
  if (!p.n) throw InputError("--n is required");
  if (p.d.empty()) throw InputError("--d is required (comma-separated list)");
  SweepResult s = sat_sweep(*p.k, int_list(p.d), *p.n, p.trials, p.seed, experiment_options(p));
  json r;
  experiment_meta(r, kSweepSchema);
  json rows = json::array();
  for (const auto& row : s.rows) {
    json o;
    o["k"] = row.k;
    o["d"] = row.d;
    o["n"] = row.n;
    o["trials"] = row.trials;
    o["sat_fraction"] = num(row.sat_fraction);
    o["budget_exhausted"] = row.budget_exhausted;
    o["mean_Z"] = row.mean_Z ? json(num(*row.mean_Z)) : json(nullptr);
    o["mean_free_density"] = row.mean_free_density ? json(num(*row.mean_free_density)) : json(nullptr);
    rows.push_back(o);
  }
  r["rows"] = rows;
  return r;
}

json do_survival(const Params& p) {
  if (!p.k) throw InputError("--k is required");
  if (!p.n) throw InputError("--n is required");
  SurvivalEstimate s =
      simulate_coarsening_survival(*p.k, need_int_d(p), *p.n, p.t, p.trials, p.seed, experiment_options(p));
  json r;
  experiment_meta(r, kSurvivalSchema);
  r["iterations_target"] = s.iterations_target;
  r["survived"] = s.survived;
  r["survival"] = num(s.survival);
  r["theta"] = num(s.theta);
  r["log_bound"] = num(s.log_bound);
  return r;
}

json do_density(const Params& p) {
  if (!p.k) throw InputError("--k is required");
  if (!p.n) throw InputError("--n is required");
  FreeDensityHistogram h = free_density_histogram(*p.k, need_int_d(p), *p.n, p.trials, p.seed, experiment_options(p));
  json r;
  experiment_meta(r, kDensitySchema);
  r["counts"] = h.counts;
  r["sampled"] = h.sampled;
  r["empty"] = h.empty;
  r["mean_beta"] = h.mean_beta ? json(num(*h.mean_beta)) : json(nullptr);
  r["reference"] = num(h.reference);
  r["reference_ratio"] = h.reference_ratio ? json(num(*h.reference_ratio)) : json(nullptr);
  return r;
}

json do_sample_ez(const Params& p) {
  if (!p.k) throw InputError("--k is required");
  if (!p.n) throw InputError("--n is required");
  Real d = need_d(p);
  if (!(floor(d) == d) || d < Real(0)) throw InputError("--d must be a nonnegative integer here");
  SampleEZ s = sample_EZ(*p.k, static_cast<int>(d.to_double()), *p.n, p.trials, p.seed, experiment_options(p));
  json r;
  experiment_meta(r, kSampleZSchema);
  r["m"] = s.m;
  r["mean"] = num(s.mean);
  r["stddev"] = num(s.stddev);
  r["ci_low"] = num(s.ci_low);
  r["ci_high"] = num(s.ci_high);
  r["expected"] = num(s.expected);
  r["covers"] = s.covers;
  return r;
}

// Flattens nested objects into dotted keys; arrays become ';'-joined values.
void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    return;
  }
  if (j.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) s += ';';
      s += j[i].is_string() ? j[i].get<std::string>() : j[i].dump();
    }
    out.emplace_back(prefix, s);
    return;
  }
  out.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
}

std::string render(const json& doc, const std::string& format) {
  if (format == "json") return doc.dump(2) + "\n";
  std::string s;
  if (format == "csv" && doc["result"].contains("rows")) {
    const json& rows = doc["result"]["rows"];
    bool header = false;
    for (const auto& row : rows) {
      std::vector<std::pair<std::string, std::string>> kv;
      flatten(row, "", kv);
      if (!header) {
        for (std::size_t i = 0; i < kv.size(); ++i) s += (i ? "," : "") + kv[i].first;
        s += ",schema_id,seed,version\n";
        header = true;
      }
      for (std::size_t i = 0; i < kv.size(); ++i) s += (i ? "," : "") + kv[i].second;
      s += "," + doc["result"]["schema_id"].get<std::string>() + "," + doc["params"]["seed"].dump() + "," +
           doc["version"].get<std::string>() + "\n";
    }
    return s;
  }
  std::vector<std::pair<std::string, std::string>> kv;
  flatten(doc, "", kv);
  if (format == "csv") {
    s = "key,value\n";
    for (const auto& [k, v] : kv) s += k + "," + v + "\n";
  } else {
    for (const auto& [k, v] : kv) s += k + ": " + v + "\n";
  }
  return s;
}

json params_json(const Params& p, long bits) {
  json j;
  j["k"] = p.k ? json(*p.k) : json(nullptr);
  j["d"] = p.d.empty() ? json(nullptr) : json(p.d);
  j["n"] = p.n ? json(*p.n) : json(nullptr);
  j["trials"] = p.trials;
  j["seed"] = p.seed;
  j["precision_bits"] = bits;
  j["tol"] = p.tol.empty() ? json(nullptr) : json(p.tol);
  j["format"] = p.format;
  j["in"] = p.in.empty() ? json(nullptr) : json(p.in);
  j["out"] = p.out.empty() ? json(nullptr) : json(p.out);
  j["t"] = num(p.t);
  j["eps"] = p.eps;
  j["eta"] = p.eta.empty() ? json(nullptr) : json(p.eta);
  j["no_pairs"] = p.no_pairs;
  j["threads"] = p.threads;
  return j;
}

long precision_for(const Params& p) {
  if (p.bits) return *p.bits;
  if (const char* env = std::getenv("NAESAT_PRECISION_BITS")) {
    char* end = nullptr;
    long b = std::strtol(env, &end, 10);
    if (*env == '\0' || *end != '\0' || b < 16) throw InputError("NAESAT_PRECISION_BITS must be an integer >= 16");
    return b;
  }
  return p.k && *p.k >= 3 ? default_precision_bits(*p.k) : 128;
}

void write_output(const Params& p, const std::string& text, std::ostream& out) {
  if (p.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(p.out, std::ios::binary);
  if (!f) throw ParseError(ParseErrorKind::Io, "cannot open " + p.out);
  f << text;
  if (!f) throw ParseError(ParseErrorKind::Io, "write failed for " + p.out);
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, std::function<json(const Params&)>> verbs = {
      {"threshold", do_threshold}, {"fixedpoint", do_fixedpoint}, {"rate", do_rate},
      {"hessian", do_hessian},     {"pair", do_pair},             {"solve", do_solve},
      {"coarsen", do_coarsen},     {"enumerate", do_enumerate},   {"complete", do_complete},
      {"sweep", do_sweep},         {"survival", do_survival},     {"density", do_density},
      {"sample-ez", do_sample_ez}};

  Params p;
  CLI::App app{"NAE-SAT satisfiability threshold toolkit", "naesat"};
  app.set_version_flag("--version", std::string(version()));
  app.add_option("verb", p.verb,
                 "threshold|fixedpoint|rate|hessian|pair|gen|solve|coarsen|enumerate|complete|sweep|survival|"
                 "density|sample-ez")
      ->required();
  app.add_option("--k", p.k, "clause size");
  app.add_option("--d", p.d, "variable degree (real for fixedpoint; comma list for sweep)");
  app.add_option("--n", p.n, "number of variables");
  app.add_option("--trials", p.trials, "Monte Carlo trials");
  app.add_option("--seed", p.seed, "master seed");
  app.add_option("--precision-bits", p.bits, "mantissa bits (default 4k+64 or NAESAT_PRECISION_BITS)");
  app.add_option("--tol", p.tol, "iteration tolerance (default 2^-(2k+40))");
  app.add_option("--format", p.format, "json|csv|text")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--in", p.in, "instance file");
  app.add_option("--out", p.out, "output file (gen: instance file)");
  app.add_option("--t", p.t, "survival target fraction t");
  app.add_option("--eps", p.eps, "pair perturbation size");
  app.add_option("--eta", p.eta, "frozen configuration for complete, e.g. 01f0");
  app.add_flag("--no-pairs", p.no_pairs, "hessian: skip the pair matrices");
  app.add_option("--threads", p.threads, "worker threads for experiments");

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  if (!args.empty()) args.pop_back();
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    const long bits = precision_for(p);
    if (bits < 16) throw InputError("--precision-bits must be at least 16");
    PrecisionGuard guard(bits);
    if (!p.tol.empty() && !(Real(p.tol) > Real(0))) throw InputError("--tol must be positive");

    json doc;
    doc["tool"] = "naesat";
    doc["version"] = version();
    doc["verb"] = p.verb;
    doc["params"] = params_json(p, bits);

    if (p.verb == "gen") {
      if (!p.k || !p.n || p.d.empty()) throw InputError("gen needs --n, --d and --k");
      const int d = static_cast<int>(int_list(p.d).at(0));
      FactorGraph g = generate_graph(*p.n, d, *p.k, derive_seed(p.seed, 0));
      LiteralAssignment L = generate_literals(g, derive_seed(p.seed, 1));
      if (p.out.empty()) {
        out << serialize(g, L);
        return kExitOk;
      }
      write_instance(p.out, g, L);
      doc["result"] = {{"path", p.out}, {"n", g.n()}, {"m", g.m()}, {"simple", g.is_simple()}};
      out << render(doc, p.format);
      return kExitOk;
    }

    auto it = verbs.find(p.verb);
    if (it == verbs.end()) throw InputError("unknown verb '" + p.verb + "'");
    doc["result"] = it->second(p);
    write_output(p, render(doc, p.format), out);
    return kExitOk;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NonConvergence& e) {
    err << "non-convergence: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ConsistencyError& e) {
    err << "consistency failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace naesat::cli
