#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "mrjsim/discretization.hpp"
#include "mrjsim/dominance.hpp"
#include "mrjsim/engine.hpp"
#include "mrjsim/error.hpp"
#include "mrjsim/experiment.hpp"
#include "mrjsim/trace.hpp"

namespace py = pybind11;
using namespace mrjsim;

namespace {

using OptionDict = std::map<std::size_t, int>;

OptionDict to_dict(const ServiceOption& m) {
  OptionDict d;
  for (const auto& [t, c] : m.entries()) d[t] = c;
  return d;
}

ServiceOption from_dict(const OptionDict& d) {
  std::vector<ServiceOption::Entry> e(d.begin(), d.end());
  return ServiceOption(std::move(e));
}

CandidateSet candidate_set(const std::string& kind, const std::vector<int>& k, std::size_t cap) {
  const Grid g(k);
  if (kind == "full") return enumerate_candidates(g, cap);
  if (kind == "2j") return efficient_set_2J(g);
  if (kind == "2b") return efficient_set_2B(g);
  if (kind == "xp") return efficient_set_XP(g, cap);
  throw ConfigError("set: expected full, 2j, 2b or xp");
}

py::dict result_dict(const SimResult& r) {
  py::dict d;
  d["mean_response_time"] = r.mean_response_time;
  d["arrivals"] = r.arrivals;
  d["completed"] = r.completed;
  d["max_queue"] = r.max_queue;
  d["in_system"] = r.in_system;
  d["unstable"] = r.unstable;
  d["cutoff"] = r.cutoff;
  d["end_time"] = r.end_time;
  d["wall_seconds"] = r.wall_seconds;
  d["seed"] = r.seed;
  return d;
}

py::dict row_dict(const ResultRow& r) {
  py::dict d;
  d["policy"] = r.policy;
  d["distribution"] = r.distribution;
  d["lambda"] = r.lambda;
  d["rho"] = r.rho;
  d["K"] = r.K;
  d["seed"] = r.seed;
  d["n_jobs"] = r.n_jobs;
  d["mean_response_time"] = r.mean_response_time;
  d["max_queue_len"] = r.max_queue_len;
  d["unstable"] = r.unstable;
  d["error"] = r.error;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multiresource-job queue simulator and stability toolkit";

  static py::exception<Error> error(m, "Error");
  static py::exception<EnumerationTooLarge> too_large(m, "EnumerationTooLarge", error.ptr());
  static py::exception<ConstructionInfeasible> infeasible(m, "ConstructionInfeasible", error.ptr());
  static py::exception<MassOverflow> overflow(m, "MassOverflow", error.ptr());
  static py::exception<NoStableK> no_k(m, "NoStableK", error.ptr());
  static py::exception<NotStabilizable> not_stab(m, "NotStabilizable", error.ptr());
  static py::exception<TraceError> trace_error(m, "TraceError", error.ptr());
  static py::exception<ConfigError> config_error(m, "ConfigError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const EnumerationTooLarge& e) {
      too_large(e.what());
    } catch (const ConstructionInfeasible& e) {
      infeasible(e.what());
    } catch (const MassOverflow& e) {
      overflow(e.what());
    } catch (const NoStableK& e) {
      no_k(e.what());
    } catch (const NotStabilizable& e) {
      not_stab(e.what());
    } catch (const TraceError& e) {
      trace_error(e.what());
    } catch (const ConfigError& e) {
      config_error(e.what());
    } catch (const Error& e) {
      error(e.what());
    }
  });

  py::class_<RequirementDist>(m, "Distribution")
      .def(py::init([](const std::string& spec) { return parse_distribution(spec); }), py::arg("spec"))
      .def_property_readonly("name", &RequirementDist::name)
      .def_property_readonly("dimension", &RequirementDist::dimension)
      .def("mean", &RequirementDist::mean)
      .def("sample", [](const RequirementDist& d, std::size_t n, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<std::vector<double>> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
          const auto r = d.sample(rng);
          out.emplace_back(r.values().begin(), r.values().end());
        }
        return out;
      }, py::arg("n"), py::arg("seed") = 1)
      .def("bucket_probabilities", [](const RequirementDist& d, const std::vector<int>& k) {
        return bucket_probabilities(d, Grid(k));
      }, py::arg("K"))
      .def("__repr__", [](const RequirementDist& d) { return "Distribution('" + d.name() + "')"; });

  m.def("job_type", [](const std::vector<int>& k, const std::vector<double>& v) { return Grid(k).job_type(v); },
        py::arg("K"), py::arg("requirement"));
  m.def("type_coords", [](const std::vector<int>& k, std::size_t t) { return Grid(k).coords(t); }, py::arg("K"),
        py::arg("type"));

  m.def("candidate_set", [](const std::string& kind, const std::vector<int>& k, std::size_t cap) {
    std::vector<OptionDict> out;
    for (const auto& o : candidate_set(kind, k, cap).options) out.push_back(to_dict(o));
    return out;
  }, py::arg("kind"), py::arg("K"), py::arg("cap") = kDefaultEnumerationCap,
        "Options as {type index: count} dicts; kind is full, 2j, 2b or xp.");
  m.def("is_feasible", [](const OptionDict& o, const std::vector<int>& k) { return is_feasible(from_dict(o), Grid(k)); },
        py::arg("option"), py::arg("K"));

  m.def("arrival_rates", [](const RequirementDist& d, double lambda, const std::vector<int>& k) {
    return arrival_rate_vector(ArrivalSpec(lambda, d), Grid(k)).rates;
  }, py::arg("dist"), py::arg("lam"), py::arg("K"));
  m.def("max_dominance", [](const std::vector<double>& rates, const std::vector<int>& k, const std::string& kind,
                            std::size_t cap) {
    const auto set = candidate_set(kind, k, cap);
    const auto lp = max_dominance_lp(RateVector{Grid(k), rates}, set, cap);
    py::dict d;
    d["delta"] = lp.delta;
    std::vector<OptionDict> opts;
    for (const auto& o : lp.mix.options) opts.push_back(to_dict(o));
    d["options"] = opts;
    d["weights"] = lp.mix.weights;
    return d;
  }, py::arg("rates"), py::arg("K"), py::arg("kind") = "full", py::arg("cap") = 100'000);
  m.def("construction_delta", [](const RequirementDist& dist, double lambda, int K, const std::string& family,
                                 double epsilon) {
    const Grid g({K});
    const auto rates = arrival_rate_vector(ArrivalSpec(lambda, dist), g);
    ServiceMix mix;
    if (family == "2j") {
      mix = construct_beta_2J(rates, epsilon);
    } else if (family == "2b") {
      mix = construct_beta_2B(bucket_probabilities(dist, g), lambda, epsilon, dist.max_mean());
    } else {
      throw ConfigError("family: expected 2j or 2b");
    }
    return check_dominance(mix, rates).delta;
  }, py::arg("dist"), py::arg("lam"), py::arg("K"), py::arg("family"), py::arg("epsilon") = kDefaultEpsilon);

  m.def("select_k_2b", &select_K_2B, py::arg("lam"), py::arg("mean"));
  m.def("select_k_2j", &select_K_2J, py::arg("lam"), py::arg("d") = 1, py::arg("uniform") = true);
  m.def("select_k_2j_lipschitz", &select_K_2J_lipschitz, py::arg("lam"), py::arg("d"), py::arg("lipschitz"),
        py::arg("epsilon") = kDefaultEpsilon);
  m.def("lipschitz_sup_bound", &lipschitz_sup_bound, py::arg("lipschitz"), py::arg("d"));
  m.def("known_stability_boundary", &known_stability_boundary, py::arg("dist"));

  m.def("simulate", [](const RequirementDist& dist, double lambda, const std::string& policy, int K, std::size_t jobs,
                       std::uint64_t seed, double theta, double epsilon, double queue_cutoff, double mrt_cutoff) {
    SimConfig c;
    c.arrival = ArrivalSpec(lambda, dist);
    c.policy = PolicySpec{policy, K, theta, epsilon};
    if (!is_known_policy(policy)) throw ConfigError("policy: unknown policy \"" + policy + "\"");
    c.jobs = jobs;
    c.seed = seed;
    c.queue_cutoff = queue_cutoff;
    c.mrt_cutoff = mrt_cutoff;
    SimResult r;
    {
      py::gil_scoped_release release;
      r = run_simulation(c);
    }
    return result_dict(r);
  }, py::arg("dist"), py::arg("lam"), py::arg("policy"), py::arg("K") = 0, py::arg("jobs") = kDefaultJobs,
        py::arg("seed") = 1, py::arg("theta") = kDefaultSwitchRate, py::arg("epsilon") = kDefaultEpsilon,
        py::arg("queue_cutoff") = kDefaultQueueCutoff, py::arg("mrt_cutoff") = kDefaultMrtCutoff);

  m.def("run_experiment", [](const std::string& distribution, const std::vector<std::string>& policies,
                             const std::vector<double>& lambdas, const std::vector<double>& rhos,
                             std::optional<double> lambda_star, int K, std::size_t jobs, std::uint64_t seed,
                             unsigned workers) {
    ExperimentConfig c;
    c.distribution = distribution;
    c.policies = policies;
    c.lambdas = lambdas;
    c.rhos = rhos;
    c.lambda_star = lambda_star;
    c.K = K;
    c.jobs = jobs;
    c.seed = seed;
    c.workers = workers;
    std::vector<ResultRow> rows;
    {
      py::gil_scoped_release release;
      rows = run_experiment(c);
    }
    py::list out;
    for (const auto& r : rows) out.append(row_dict(r));
    return out;
  }, py::arg("distribution"), py::arg("policies"), py::arg("lambdas") = std::vector<double>{},
        py::arg("rhos") = std::vector<double>{}, py::arg("lambda_star") = std::nullopt, py::arg("K") = 0,
        py::arg("jobs") = kDefaultJobs, py::arg("seed") = 1, py::arg("workers") = 1);

  m.def("nearest_rank_quantile", &nearest_rank_quantile, py::arg("values"), py::arg("q"));
  m.def("normalize_trace", [](const std::vector<double>& values, double quantile) {
    const auto n = normalize_trace(values, quantile);
    py::dict d;
    d["values"] = n.values;
    d["scale"] = n.scale;
    d["dropped"] = n.dropped;
    d["original"] = n.original;
    return d;
  }, py::arg("values"), py::arg("quantile") = kDefaultQuantile);
  m.def("parse_trace", [](const std::string& text, const std::string& column) {
    return parse_trace(text, column).values;
  }, py::arg("text"), py::arg("column") = "0");
}
