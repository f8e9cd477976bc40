#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "matchlab/analytics.hpp"
#include "matchlab/error.hpp"
#include "matchlab/experiment.hpp"
#include "matchlab/io.hpp"
#include "matchlab/matching.hpp"
#include "matchlab/policies.hpp"
#include "matchlab/random_models.hpp"

namespace py = pybind11;
namespace ml = matchlab;

namespace {

ml::ModelParams make_params(int n, std::optional<double> p, std::optional<double> c, std::optional<ml::Weight> R) {
  if (p.has_value() == c.has_value()) throw ml::ValidationError("give exactly one of p and c");
  return p ? ml::ModelParams::with_p(n, *p, R) : ml::ModelParams::with_c(n, *c, R);
}

py::list pairs_of(const ml::Matching& m) {
  py::list out;
  for (const auto& p : m.pairs()) out.append(py::make_tuple(p.offline, p.online, p.weight));
  return out;
}

py::dict stats_dict(const ml::ExperimentStats& s) {
  py::dict d;
  d["trials"] = s.trials;
  d["mean_alg"] = s.mean_alg;
  d["mean_opt"] = s.mean_opt;
  d["mean_ratio"] = s.mean_ratio;
  d["std_err"] = s.std_err;
  d["mean_of_ratios"] = s.mean_of_ratios;
  d["ratio_of_means"] = s.ratio_of_means;
  d["zero_opt_trials"] = s.zero_opt_trials;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "matchlab core: random type-graph models, offline matchers, online policies, analytics";

  auto validation = py::register_exception<ml::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ml::NumericError>(m, "NumericError", PyExc_ArithmeticError);
  (void)validation;

  py::class_<ml::TypeGraph>(m, "TypeGraph")
      .def(py::init<int, int, bool>(), py::arg("n_offline"), py::arg("num_types"), py::arg("weighted") = false)
      .def_property_readonly("n_offline", &ml::TypeGraph::n_offline)
      .def_property_readonly("num_types", &ml::TypeGraph::num_types)
      .def_property_readonly("weighted", &ml::TypeGraph::weighted)
      .def("add_edge", &ml::TypeGraph::add_edge, py::arg("type"), py::arg("offline"), py::arg("weight") = 1)
      .def("normalize", &ml::TypeGraph::normalize)
      .def("validate", &ml::TypeGraph::validate)
      .def("edge_count", &ml::TypeGraph::edge_count)
      .def("neighbors",
           [](const ml::TypeGraph& g, ml::TypeId t) {
             py::list out;
             for (const auto& nb : g.neighbors(t)) out.append(py::make_tuple(nb.offline, nb.weight));
             return out;
           })
      .def("to_text", [](const ml::TypeGraph& g) {
        std::ostringstream os;
        ml::write_instance(os, {g, ml::ArrivalSequence::from_list({}, g.num_types()), "-", std::nullopt});
        return os.str();
      });

  m.def(
      "gen_type_graph",
      [](int n, std::optional<double> p, std::optional<double> c, std::optional<ml::Weight> R, std::uint64_t key) {
        return ml::gen_type_graph(make_params(n, p, c, R), key);
      },
      py::arg("n"), py::kw_only(), py::arg("p") = py::none(), py::arg("c") = py::none(), py::arg("R") = py::none(),
      py::arg("key") = 0, "G_{n,n,p} type graph, weighted when R is given");

  m.def(
      "sample_arrivals",
      [](const ml::TypeGraph& g, const std::string& model, std::uint64_t key) {
        const auto kind = ml::model_kind_from_string(model);
        ml::ArrivalSequence seq;
        switch (kind) {
          case ml::ModelKind::kKnownIid: seq = ml::sample_known_iid(g, g.num_types(), key); break;
          case ml::ModelKind::kRtpam: seq = ml::sample_rtpam_counts(g, key); break;
          case ml::ModelKind::kRtpamThreeStep: seq = ml::sample_rtpam_threestep(g, key); break;
          case ml::ModelKind::kPoissonArrivals: seq = ml::sample_poisson_arrivals(g, key); break;
          case ml::ModelKind::kGnnpOnline: seq = ml::sequential_arrivals(g); break;
        }
        return seq.arrivals;
      },
      py::arg("graph"), py::arg("model") = "known_iid", py::arg("key") = 0, "arrival type ids for a type graph");

  m.def("max_weight_matching", [](const ml::TypeGraph& g) { return pairs_of(ml::max_weight_matching(g)); },
        "list of (offline, type, weight)");
  m.def("max_cardinality_matching", [](const ml::TypeGraph& g) { return pairs_of(ml::max_cardinality_matching(g)); });
  m.def("offline_optimum", [](const ml::TypeGraph& g, std::vector<ml::TypeId> arrivals) {
    return ml::offline_optimum(g, ml::ArrivalSequence::from_list(std::move(arrivals), g.num_types()));
  });

  m.def(
      "run_policy",
      [](const ml::TypeGraph& g, std::vector<ml::TypeId> arrivals, const std::string& alg) {
        const auto seq = ml::ArrivalSequence::from_list(std::move(arrivals), g.num_types());
        ml::Matching result;
        switch (ml::algorithm_from_string(alg)) {
          case ml::Algorithm::kGreedy: result = ml::run_greedy(g, seq, ml::GreedyRule::kMaxWeight).matching; break;
          case ml::Algorithm::kGreedyFd: result = ml::run_greedy_fd(g, seq).matching; break;
          case ml::Algorithm::kOneSm: result = ml::run_one_sm(g, seq).matching; break;
          case ml::Algorithm::kSfd: result = ml::run_sfd(g, seq).matching; break;
        }
        return pairs_of(result);
      },
      py::arg("graph"), py::arg("arrivals"), py::arg("alg") = "greedy",
      "online policy result as (offline, arrival_index, weight) pairs");

  m.def(
      "run_experiment",
      [](const std::string& model, int n, std::optional<double> p, std::optional<double> c,
         std::optional<ml::Weight> R, const std::string& alg, std::int64_t trials, std::uint64_t seed,
         const std::string& ratio_mode, const std::string& zero_opt, int threads) {
        ml::ExperimentConfig cfg;
        cfg.model = ml::model_kind_from_string(model);
        cfg.params = make_params(n, p, c, R);
        cfg.algorithm = ml::algorithm_from_string(alg);
        cfg.trials = trials;
        cfg.seed = ml::Seed{seed};
        cfg.ratio_mode = ml::ratio_mode_from_string(ratio_mode);
        cfg.zero_opt = ml::zero_opt_rule_from_string(zero_opt);
        cfg.threads = threads;
        ml::ExperimentStats stats;
        {
          py::gil_scoped_release release;
          stats = ml::run_experiment(cfg);
        }
        return stats_dict(stats);
      },
      py::arg("model"), py::arg("n"), py::kw_only(), py::arg("p") = py::none(), py::arg("c") = py::none(),
      py::arg("R") = py::none(), py::arg("alg") = "greedy", py::arg("trials") = 100, py::arg("seed") = 1,
      py::arg("ratio_mode") = "mean_of_ratios", py::arg("zero_opt") = "zero", py::arg("threads") = 1);

  m.def(
      "estimate_perfect_matching",
      [](int n, double p, std::int64_t trials, std::uint64_t seed) {
        const auto e = ml::estimate_perfect_matching(n, p, trials, seed);
        py::dict d;
        d["pm_freq"] = e.pm_freq;
        d["mindeg_freq"] = e.mindeg_freq;
        d["pm_se"] = e.pm_se;
        d["mindeg_se"] = e.mindeg_se;
        return d;
      },
      py::arg("n"), py::arg("p"), py::arg("trials") = 100, py::arg("seed") = 1);

  m.def("bessel_i", [](int k, double x) { return ml::bessel_i(k, x); });
  m.def("marcum_q", [](int n, double a, double b) { return ml::marcum_q(n, a, b); });
  m.def("h_closed", [](double x) { return ml::h_closed(x); });
  m.def("h_oracle", [](double x) { return ml::h_oracle(x); });
  m.def("greedy_fraction_gnnp", &ml::greedy_fraction_gnnp);
  m.def("greedy_fraction_rtpam", [](double c) { return ml::greedy_fraction_rtpam(c); });
  m.def("opt_upper_rtpam", [](double c) { return ml::opt_upper_rtpam(c); });
  m.def("ratio_lower_rtpam", [](double c) { return ml::ratio_lower_rtpam(c); });
  m.def("perfect_matching_limit", &ml::perfect_matching_limit);
  m.def("bb_upper_bound", [](double c) {
    const auto r = ml::bb_upper_bound(c);
    py::dict d;
    d["gamma_star_lower"] = r.fixed_point.gamma_star_lower;
    d["gamma_star_upper"] = r.fixed_point.gamma_star_upper;
    d["residual"] = r.fixed_point.residual;
    d["iterations"] = r.fixed_point.iterations;
    d["bound"] = r.value;
    return d;
  });
  m.def(
      "minimize_ratio",
      [](double c_lo, double c_hi, const std::string& curve) {
        ml::MinimizerResult r;
        {
          py::gil_scoped_release release;
          r = curve == "gnnp" ? ml::minimize_ratio_gnnp(c_lo, c_hi) : ml::minimize_ratio(c_lo, c_hi);
        }
        py::dict d;
        d["c_star"] = r.c_star;
        d["ratio_star"] = r.ratio_star;
        d["grid_points"] = r.grid_points;
        d["tolerance"] = r.tolerance;
        d["at_boundary"] = r.at_boundary;
        return d;
      },
      py::arg("c_lo") = 0.05, py::arg("c_hi") = 10.0, py::arg("curve") = "rtpam");
  m.def(
      "min_ber_sum_expectation",
      [](std::vector<double> p, int k) { return ml::min_ber_sum_expectation({std::move(p), k}); }, py::arg("p"),
      py::arg("k"));
}
