// Copyright 2026 The anytime-sched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <sstream>
#include <tuple>

#include "anytime/experiment.hpp"
#include "anytime/oracle.hpp"

namespace py = pybind11;
using namespace anytime;

namespace {

QuantConfig quant_of(std::optional<double> delta, std::optional<double> epsilon) {
  if (delta && epsilon) throw std::invalid_argument("give delta or epsilon, not both");
  return epsilon ? QuantConfig::from_epsilon(*epsilon)
                 : QuantConfig::fixed(delta.value_or(0.1));
}

}  // namespace

PYBIND11_MODULE(_anytime, m) {
  m.doc() = "Depth planning and simulation for multi-exit inference jobs";

  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<InstanceTooLargeError>(m, "InstanceTooLargeError", PyExc_ValueError);

  py::class_<PlanTask>(m, "PlanTask")
      .def(py::init([](JobId id, double deadline, std::vector<double> wcet,
                       std::vector<double> rewards, int mandatory) {
             return make_plan_task(id, deadline, wcet, rewards, mandatory);
           }),
           py::arg("id"), py::arg("deadline"), py::arg("wcet"), py::arg("rewards"),
           py::arg("mandatory") = 1)
      .def_readwrite("id", &PlanTask::id)
      .def_readwrite("deadline", &PlanTask::deadline)
      .def_readwrite("cum_exec", &PlanTask::cum_exec)
      .def_readwrite("mandatory", &PlanTask::mandatory)
      .def_readwrite("done", &PlanTask::done)
      .def_readwrite("gain", &PlanTask::gain)
      .def_property_readonly("num_stages", &PlanTask::num_stages)
      .def("__repr__", [](const PlanTask& t) {
        std::ostringstream s;
        s << "PlanTask(id=" << t.id << ", deadline=" << t.deadline
          << ", stages=" << t.num_stages() << ")";
        return s.str();
      });

  py::class_<DepthPlan>(m, "DepthPlan")
      .def_readonly("ids", &DepthPlan::ids)
      .def_readonly("depth", &DepthPlan::depth)
      .def_readonly("quantized_reward", &DepthPlan::quantized_reward)
      .def_readonly("predicted_reward", &DepthPlan::predicted_reward);

  py::class_<OracleResult>(m, "OracleResult")
      .def_readonly("feasible", &OracleResult::feasible)
      .def_readonly("reward", &OracleResult::reward)
      .def_readonly("depth", &OracleResult::depth)
      .def_readonly("examined", &OracleResult::examined);

  m.def("quantize", &quantize, py::arg("reward"), py::arg("delta"));

  m.def(
      "plan",
      [](std::vector<PlanTask> tasks, double now, std::optional<double> delta,
         std::optional<double> epsilon, const std::string& drop) {
        std::sort(tasks.begin(), tasks.end(), [](const PlanTask& a, const PlanTask& b) {
          return std::tie(a.deadline, a.id) < std::tie(b.deadline, b.id);
        });
        const double d = resolve_delta(quant_of(delta, epsilon), tasks, now);
        return extract_plan(build_table(tasks, d, now, parse_drop_mode(drop)), tasks);
      },
      py::arg("tasks"), py::arg("now") = 0.0, py::arg("delta") = py::none(),
      py::arg("epsilon") = py::none(), py::arg("drop_mode") = "allow",
      "Depth per task (ranked by deadline) maximizing quantized reward.");

  m.def(
      "brute_force",
      [](const std::vector<PlanTask>& tasks, double now, const std::string& drop,
         std::uint64_t cap) { return brute_force(tasks, now, parse_drop_mode(drop), cap); },
      py::arg("tasks"), py::arg("now") = 0.0, py::arg("drop_mode") = "allow",
      py::arg("cap") = kDefaultOracleCap);

  m.def(
      "predict_next",
      [](const std::string& model, double r, double p_cur, double p_next,
         std::optional<double> oracle_next) {
        return predict_next(parse_utility_model(model), r, p_cur, p_next, oracle_next);
      },
      py::arg("model"), py::arg("r_cur"), py::arg("p_cur"), py::arg("p_next"),
      py::arg("oracle_next") = py::none());

  m.def(
      "profile_wcet",
      [](const std::vector<std::vector<double>>& samples, const std::string& bound) {
        return profile_wcet(samples, parse_wcet_bound(bound));
      },
      py::arg("samples"), py::arg("bound") = "ci99");

  py::class_<TraceLibrary>(m, "TraceLibrary")
      .def_readonly("num_classes", &TraceLibrary::num_classes)
      .def_readonly("num_stages", &TraceLibrary::num_stages)
      .def_readonly("stage_wcet", &TraceLibrary::stage_wcet)
      .def_property_readonly("num_records",
                             [](const TraceLibrary& l) { return l.records.size(); })
      .def("save", [](const TraceLibrary& l, const std::filesystem::path& p) {
        save_trace(p, l);
      });

  m.def("load_trace", &load_trace, py::arg("path"));
  m.def(
      "synth_library",
      [](int stages, int classes, std::size_t records, std::vector<double> wcet,
         const std::string& family, std::uint64_t seed) {
        SynthOptions o;
        o.num_stages = stages;
        o.num_classes = classes;
        o.records = records;
        o.stage_wcet = std::move(wcet);
        o.family = parse_curve_family(family);
        o.seed = seed;
        return synth_library(o);
      },
      py::arg("stages") = 3, py::arg("classes") = 10, py::arg("records") = 1000,
      py::arg("wcet") = std::vector<double>{}, py::arg("family") = "saturating",
      py::arg("seed") = 1);

  m.def(
      "simulate",
      [](const TraceLibrary& lib, const std::string& policy, int clients,
         double d_lower, double d_upper, std::size_t jobs, std::uint64_t seed,
         std::optional<double> delta, std::optional<double> epsilon,
         const std::string& drop, const std::string& cost, const std::string& arrival,
         double rate, double cpu_overhead) {
        WorkloadSpec w;
        w.clients = clients;
        w.d_lower = d_lower;
        w.d_upper = d_upper;
        w.requests = jobs;
        w.seed = seed;
        w.arrival = parse_arrival_mode(arrival);
        w.poisson_rate = rate;
        SimConfig s;
        s.prior = 1.0 / lib.num_classes;
        s.cost.mode = parse_cost_mode(cost);
        s.cpu_overhead = cpu_overhead;
        s.seed = seed;
        const Policy p = make_policy(policy, quant_of(delta, epsilon), parse_drop_mode(drop));
        py::gil_scoped_release release;
        const SimReport r = run(generate(w, lib), p, s);
        py::gil_scoped_acquire acquire;
        py::dict d;
        d["policy"] = r.policy;
        d["jobs"] = r.jobs;
        d["accuracy"] = r.accuracy;
        d["accuracy_non_missed"] = r.accuracy_non_missed;
        d["miss_rate"] = r.miss_rate;
        d["mean_depth"] = r.mean_depth;
        d["scheduler_overhead_fraction"] = r.scheduler_overhead_fraction;
        d["makespan"] = r.makespan;
        d["scheduler_time"] = r.scheduler_time;
        d["busy_time"] = r.busy_time;
        d["adjusted_deadline_violations"] = r.adjusted_deadline_violations;
        d["planner_invocations"] = r.planner_invocations;
        d["rows_rebuilt"] = r.rows_rebuilt;
        d["reassignments"] = r.reassignments;
        return d;
      },
      py::arg("library"), py::arg("policy") = "planner-exp", py::arg("clients") = 20,
      py::arg("d_lower") = 0.01, py::arg("d_upper") = 0.3, py::arg("jobs") = 2000,
      py::arg("seed") = 1, py::arg("delta") = py::none(), py::arg("epsilon") = py::none(),
      py::arg("drop_mode") = "allow", py::arg("cost") = "modeled",
      py::arg("arrival") = "closed", py::arg("rate") = 100.0,
      py::arg("cpu_overhead") = 0.0);
}
