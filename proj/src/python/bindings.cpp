#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <variant>

#include "naesat/auxiliary.hpp"
#include "naesat/cli.hpp"
#include "naesat/errors.hpp"
#include "naesat/experiments.hpp"
#include "naesat/frozen.hpp"
#include "naesat/graphs.hpp"
#include "naesat/moments.hpp"
#include "naesat/naesat_core.hpp"
#include "naesat/recursions.hpp"
#include "naesat/rng.hpp"

namespace py = pybind11;
using namespace naesat;

namespace {

using Number = std::variant<long long, double, std::string>;

Real to_real(const Number& x) {
  if (auto* i = std::get_if<long long>(&x)) return Real(*i);
  if (auto* f = std::get_if<double>(&x)) return Real(*f);
  return Real(std::get<std::string>(x));
}

long bits_for(int k, std::optional<long> bits) { return bits ? *bits : (k >= 3 ? default_precision_bits(k) : 128); }

py::object fraction(const mpq_class& q) {
  py::object F = py::module_::import("fractions").attr("Fraction");
  return F(py::int_(py::str(q.get_num().get_str())), py::int_(py::str(q.get_den().get_str())));
}

py::dict scalar_dict(const ScalarState& s) {
  py::dict r;
  r["k"] = s.k;
  r["d"] = s.d.str();
  r["q"] = s.q.str();
  r["v"] = s.v.str();
  r["q_free"] = s.q_free.str();
  r["v_rig"] = s.v_rig.str();
  r["residual"] = s.residual.str();
  r["iterations"] = s.iterations;
  return r;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Random regular NAE-SAT: instances, solvers, frozen model and threshold numerics";

  py::register_exception<SizeGuardError>(m, "SizeGuardError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);
  py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_RuntimeError);

  m.def("version", [] { return std::string(cli::version()); });

  py::class_<Instance>(m, "Instance")
      .def_property_readonly("n", [](const Instance& i) { return i.graph.n(); })
      .def_property_readonly("m", [](const Instance& i) { return i.graph.m(); })
      .def_property_readonly("d", [](const Instance& i) { return i.graph.d(); })
      .def_property_readonly("k", [](const Instance& i) { return i.graph.k(); })
      .def_property_readonly("clause_vars", [](const Instance& i) { return i.graph.clause_var_list(); })
      .def_property_readonly("literals", [](const Instance& i) { return i.literals.bits; })
      .def("is_simple", [](const Instance& i) { return i.graph.is_simple(); })
      .def("serialize", [](const Instance& i) { return serialize(i.graph, i.literals); })
      .def(py::self == py::self)
      .def("__repr__", [](const Instance& i) {
        std::ostringstream os;
        os << "Instance(n=" << i.graph.n() << ", m=" << i.graph.m() << ", d=" << i.graph.d() << ", k=" << i.graph.k()
           << ")";
        return os.str();
      });

  m.def(
      "make_instance",
      [](int n, int d, int k, std::vector<int> clause_vars, std::vector<std::uint8_t> literals) {
        Instance inst;
        inst.graph = FactorGraph::from_clause_vars(n, d, k, std::move(clause_vars));
        if (literals.size() != static_cast<std::size_t>(inst.graph.edges()))
          throw InputError("make_instance: one literal per clause slot expected");
        inst.literals.bits = std::move(literals);
        return inst;
      },
      py::arg("n"), py::arg("d"), py::arg("k"), py::arg("clause_vars"), py::arg("literals"));
  m.def(
      "generate_instance",
      [](int n, int d, int k, std::uint64_t seed) {
        Instance inst;
        inst.graph = generate_graph(n, d, k, derive_seed(seed, 0));
        inst.literals = generate_literals(inst.graph, derive_seed(seed, 1));
        return inst;
      },
      py::arg("n"), py::arg("d"), py::arg("k"), py::arg("seed"));
  m.def("parse_instance", [](const std::string& text) { return parse(text); });
  m.def("read_instance", &read_instance);
  m.def("write_instance",
        [](const std::string& path, const Instance& i) { write_instance(path, i.graph, i.literals); });

  m.def(
      "count_solutions",
      [](const Instance& i, int limit_n) { return count_solutions(i.graph, i.literals, limit_n).Z; },
      py::arg("instance"), py::arg("limit_n") = 30);
  m.def(
      "list_solutions",
      [](const Instance& i, int limit_n) { return count_solutions(i.graph, i.literals, limit_n, true).solutions; },
      py::arg("instance"), py::arg("limit_n") = 24);
  m.def(
      "decide",
      [](const Instance& i, std::uint64_t node_budget) -> std::optional<Assignment> {
        DecideResult r = decide(i.graph, i.literals, {node_budget});
        if (!r.sat) return std::nullopt;
        return r.witness;
      },
      py::arg("instance"), py::arg("node_budget") = 10'000'000,
      "A satisfying assignment, or None when the instance is unsatisfiable.");
  m.def("is_nae_solution", [](const Instance& i, const Assignment& x) { return is_nae_solution(i.graph, i.literals, x); });
  m.def("expected_z", [](int n, int m_, int k) { return fraction(expected_Z(n, m_, k).exact); });

  m.attr("FREE") = static_cast<int>(kFree);
  m.def("coarsen", [](const Instance& i, const Assignment& x) { return coarsen(i.graph, i.literals, x).eta; });
  m.def("is_valid_frozen",
        [](const Instance& i, const std::vector<std::uint8_t>& eta) { return is_valid_frozen(i.graph, i.literals, eta); });
  m.def(
      "enumerate_frozen",
      [](const Instance& i, bool truncated) {
        const TruncationPolicy p = truncated ? TruncationPolicy::standard(i.graph.k()) : TruncationPolicy::unrestricted();
        std::vector<std::vector<std::uint8_t>> out;
        for (auto& f : enumerate_frozen(i.graph, i.literals, p).configs) out.push_back(std::move(f.eta));
        return out;
      },
      py::arg("instance"), py::arg("truncated") = false);
  m.def("cluster_preimage", [](const Instance& i, const std::vector<std::uint8_t>& eta) {
    return cluster_preimage(i.graph, i.literals, eta);
  });
  m.def(
      "aux_count",
      [](const Instance& i, bool truncated) {
        const TruncationPolicy p = truncated ? TruncationPolicy::standard(i.graph.k()) : TruncationPolicy::unrestricted();
        return aux_partition(i.graph, i.literals, p).count;
      },
      py::arg("instance"), py::arg("truncated") = false);
  m.def(
      "complete_to_solution",
      [](const Instance& i, const std::vector<std::uint8_t>& eta, std::uint64_t seed) {
        CompletionResult r = complete_to_solution(i.graph, i.literals, eta, seed);
        py::dict d;
        d["ok"] = r.ok;
        d["x"] = r.x;
        d["component_vars"] = r.component_vars;
        d["component_clauses"] = r.component_clauses;
        d["reason"] = r.reason;
        return d;
      },
      py::arg("instance"), py::arg("eta"), py::arg("seed") = 0);

  m.def(
      "thresholds",
      [](int k, std::optional<long> bits) {
        PrecisionGuard g(bits_for(k, bits));
        Thresholds t = thresholds(k);
        py::dict r;
        r["d_fm"] = t.d_fm.str();
        r["d_lbd"] = t.d_lbd.str();
        r["d_ubd"] = t.d_ubd.str();
        return r;
      },
      py::arg("k"), py::arg("bits") = py::none());
  m.def(
      "fixed_point",
      [](int k, const Number& d, std::optional<long> bits) {
        PrecisionGuard g(bits_for(k, bits));
        return scalar_dict(iterate_qv(k, to_real(d)));
      },
      py::arg("k"), py::arg("d"), py::arg("bits") = py::none());
  m.def(
      "phi_star",
      [](int k, const Number& d, std::optional<long> bits) {
        PrecisionGuard g(bits_for(k, bits));
        return phi_star(k, to_real(d), default_tol(k)).phi.str();
      },
      py::arg("k"), py::arg("d"), py::arg("bits") = py::none());
  m.def(
      "d_star",
      [](int k, std::optional<long> bits) {
        PrecisionGuard g(bits_for(k, bits));
        DStar s = find_d_star(k, default_tol(k));
        py::dict r;
        r["d_star"] = s.d_star.str();
        r["phi_star"] = s.phi_star.str();
        r["iterations"] = s.iterations;
        r["bracket_width"] = s.bracket_width.str();
        return r;
      },
      py::arg("k"), py::arg("bits") = py::none());

  m.def(
      "sat_sweep",
      [](int k, const std::vector<int>& d_list, int n, int trials, std::uint64_t seed, int threads) {
        ExperimentOptions opt;
        opt.threads = threads;
        py::list rows;
        for (const auto& r : sat_sweep(k, d_list, n, trials, seed, opt).rows) {
          py::dict d;
          d["k"] = r.k;
          d["d"] = r.d;
          d["n"] = r.n;
          d["trials"] = r.trials;
          d["sat"] = r.sat;
          d["budget_exhausted"] = r.budget_exhausted;
          d["sat_fraction"] = r.sat_fraction;
          d["mean_Z"] = r.mean_Z;
          d["mean_free_density"] = r.mean_free_density;
          rows.append(d);
        }
        return rows;
      },
      py::arg("k"), py::arg("d_list"), py::arg("n"), py::arg("trials"), py::arg("seed") = 1, py::arg("threads") = 1);
  m.def(
      "coarsening_survival",
      [](int k, int d, int n, double t, int trials, std::uint64_t seed) {
        SurvivalEstimate s = simulate_coarsening_survival(k, d, n, t, trials, seed);
        py::dict r;
        r["iterations_target"] = s.iterations_target;
        r["survived"] = s.survived;
        r["survival"] = s.survival;
        r["theta"] = s.theta;
        r["log_bound"] = s.log_bound;
        r["lengths"] = s.lengths;
        return r;
      },
      py::arg("k"), py::arg("d"), py::arg("n"), py::arg("t"), py::arg("trials"), py::arg("seed") = 1);
  m.def(
      "sample_ez",
      [](int k, int d, int n, int trials, std::uint64_t seed) {
        SampleEZ s = sample_EZ(k, d, n, trials, seed);
        py::dict r;
        r["m"] = s.m;
        r["mean"] = s.mean;
        r["stddev"] = s.stddev;
        r["ci_low"] = s.ci_low;
        r["ci_high"] = s.ci_high;
        r["expected"] = s.expected.to_double();
        r["covers"] = s.covers;
        return r;
      },
      py::arg("k"), py::arg("d"), py::arg("n"), py::arg("trials"), py::arg("seed") = 1);

  m.def(
      "cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "naesat");
        std::ostringstream out, err;
        int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one CLI verb in-process; returns (exit_code, stdout, stderr).");
}
