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

#include "cli_app.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "anytime/experiment.hpp"
#include "anytime/format.hpp"

namespace anytime::cli {

namespace {

struct Options {
  std::vector<std::string> policies{"planner-exp"};
  int k = 20;
  double dl = 0.01;
  double du = 0.3;
  double delta = 0.1;
  std::optional<double> epsilon;
  std::string trace;
  std::uint64_t library_seed = 1;
  std::uint64_t seed = 1;
  int reps = 1;
  std::string out;
  std::string drop_mode = "allow";
  std::size_t jobs = 2000;
  std::string arrival = "closed";
  double rate = 100.0;
  std::string cost = "modeled";
  double cost_invocation = SchedulerCost{}.per_invocation;
  double cost_unit = SchedulerCost{}.per_unit;
  std::optional<double> prior;
  double cpu_overhead = 0.0;
  double jitter = 0.0;
  unsigned threads = 1;

  // simulate
  std::string jobs_out;
  // sweep
  std::string axis = "k";
  std::vector<double> values;
  // validate
  std::size_t instances = 1000;
  std::vector<double> epsilons{0.1, 0.25, 0.5};
  // gen-trace
  std::size_t records = 1000;
  int stages = 3;
  int classes = 10;
  std::vector<double> wcet;
  std::string family = "saturating";
  // profile
  std::string samples;
  std::string bound = "ci99";
};

QuantConfig quant_of(const Options& o) {
  return o.epsilon ? QuantConfig::from_epsilon(*o.epsilon)
                   : QuantConfig::fixed(o.delta);
}

WorkloadSpec workload_of(const Options& o, std::uint64_t seed) {
  WorkloadSpec w;
  w.clients = o.k;
  w.d_lower = o.dl;
  w.d_upper = o.du;
  w.requests = o.jobs;
  w.seed = seed;
  w.arrival = parse_arrival_mode(o.arrival);
  w.poisson_rate = o.rate;
  return w;
}

SimConfig sim_of(const Options& o, const TraceLibrary& lib, std::uint64_t seed) {
  SimConfig s;
  s.cpu_overhead = o.cpu_overhead;
  s.prior = o.prior ? *o.prior : 1.0 / static_cast<double>(lib.num_classes);
  s.cost.mode = parse_cost_mode(o.cost);
  s.cost.per_invocation = o.cost_invocation;
  s.cost.per_unit = o.cost_unit;
  s.jitter = o.jitter;
  s.seed = seed;
  return s;
}

TraceLibrary library_of(const Options& o) {
  if (!o.trace.empty()) return load_trace(o.trace);
  SynthOptions synth;
  synth.seed = o.library_seed;
  return synth_library(synth);
}

// Results are rendered completely before anything is written, so a failed
// run never leaves a partial file behind.
void emit(const Options& o, const std::string& text, std::ostream& out,
          const std::string& manifest) {
  if (o.out.empty() || o.out == "-") {
    out << text;
    return;
  }
  {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + o.out);
    f << text;
  }
  if (!manifest.empty()) {
    std::ofstream m(o.out + ".manifest", std::ios::binary);
    if (!m) throw std::runtime_error("cannot write " + o.out + ".manifest");
    m << manifest;
  }
}

int cmd_simulate(const Options& o, std::ostream& out, const std::string& manifest) {
  const TraceLibrary lib = library_of(o);
  std::vector<SimulateRun> runs;
  SimReport last;
  for (int rep = 0; rep < o.reps; ++rep) {
    const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(rep);
    const WorkloadSpec spec = workload_of(o, seed);
    const Workload w = generate(spec, lib);
    for (const std::string& name : o.policies) {
      const Policy policy = make_policy(name, quant_of(o), parse_drop_mode(o.drop_mode));
      SimulateRun r;
      r.policy = name;
      r.workload = spec;
      r.delta = o.epsilon ? 0.0 : o.delta;
      r.report = run(w, policy, sim_of(o, lib, seed));
      last = r.report;
      runs.push_back(std::move(r));
    }
  }
  std::ostringstream text;
  write_simulate_csv(text, runs);
  if (!o.jobs_out.empty()) {
    if (runs.size() != 1) {
      throw std::invalid_argument("--jobs-out needs exactly one policy and one replication");
    }
    std::ofstream f(o.jobs_out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + o.jobs_out);
    write_jobs_csv(f, last);
  }
  emit(o, text.str(), out, manifest);
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out, const std::string& manifest) {
  const TraceLibrary lib = library_of(o);
  ExperimentPlan plan;
  plan.axis = parse_sweep_axis(o.axis);
  plan.values = o.values;
  plan.policies = o.policies;
  plan.workload = workload_of(o, o.seed);
  plan.sim = sim_of(o, lib, o.seed);
  plan.quant = quant_of(o);
  plan.drop = parse_drop_mode(o.drop_mode);
  plan.replications = o.reps;
  plan.seed_base = o.seed;
  const std::vector<SweepRow> rows = run_experiment(plan, lib, o.threads);
  std::ostringstream text;
  write_sweep_csv(text, rows);
  emit(o, text.str(), out, manifest);
  return 0;
}

int cmd_validate(const Options& o, std::ostream& out) {
  FptasOptions f;
  f.instances = o.instances;
  f.epsilons = o.epsilons;
  f.seed = o.seed;
  const FptasSummary s = validate_fptas(f);
  std::ostringstream text;
  text << "checked,bound_violations,infeasible_plans,worst_ratio\n"
       << s.checked << ',' << s.bound_violations << ',' << s.infeasible_plans
       << ',' << format_double(s.worst_ratio) << '\n';
  emit(o, text.str(), out, "");
  return s.bound_violations == 0 && s.infeasible_plans == 0 ? 0 : 1;
}

int cmd_gen_trace(const Options& o, std::ostream& out) {
  SynthOptions s;
  s.num_stages = o.stages;
  s.num_classes = o.classes;
  s.records = o.records;
  s.stage_wcet = o.wcet;
  s.family = parse_curve_family(o.family);
  s.seed = o.seed;
  if (!s.stage_wcet.empty() && static_cast<int>(s.stage_wcet.size()) != s.num_stages) {
    throw std::invalid_argument("--wcet needs one value per stage");
  }
  std::ostringstream text;
  write_trace(text, synth_library(s));
  emit(o, text.str(), out, "");
  return 0;
}

int cmd_profile(const Options& o, std::ostream& out) {
  std::ifstream in(o.samples);
  if (!in) throw std::runtime_error("cannot open samples file " + o.samples);
  const std::vector<double> wcet = profile_wcet(read_samples(in), parse_wcet_bound(o.bound));
  std::ostringstream text;
  text << "wcet=";
  for (std::size_t i = 0; i < wcet.size(); ++i) {
    if (i) text << ',';
    text << format_double(wcet[i]);
  }
  text << '\n';
  emit(o, text.str(), out, "");
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  Options o;
  CLI::App app{"Scheduling and simulation of anytime (multi-exit) inference jobs",
               "anytime-sched"};
  app.set_config("--config", "", "Read options from a file of key = value lines");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--policy", o.policies,
                 "planner-exp|planner-max|planner-lin|planner-oracle|edf|lcf|rr")
      ->delimiter(',');
  app.add_option("--k", o.k, "Concurrent clients")->check(CLI::PositiveNumber);
  app.add_option("--dl", o.dl, "Minimum relative deadline (s)");
  app.add_option("--du", o.du, "Maximum relative deadline (s)");
  app.add_option("--delta", o.delta, "Reward quantization step");
  app.add_option("--epsilon", o.epsilon, "Derive delta = epsilon * R / N instead");
  app.add_option("--trace", o.trace, "Trace library (default: synthetic)");
  app.add_option("--library-seed", o.library_seed, "Seed of the default synthetic library");
  app.add_option("--seed", o.seed, "Base seed");
  app.add_option("--reps", o.reps, "Replications")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "Output file (default: stdout)");
  app.add_option("--drop-mode", o.drop_mode, "allow|mandatory");
  app.add_option("--jobs", o.jobs, "Requests per run");
  app.add_option("--arrival", o.arrival, "closed|poisson");
  app.add_option("--rate", o.rate, "Poisson arrival rate (1/s)");
  app.add_option("--cost", o.cost, "Scheduler cost: modeled|none|measured");
  app.add_option("--cost-invocation", o.cost_invocation, "Modeled cost per scheduler call (s)");
  app.add_option("--cost-unit", o.cost_unit, "Modeled cost per unit of planner work (s)");
  app.add_option("--prior", o.prior, "Confidence before any stage (default 1/classes)");
  app.add_option("--cpu-overhead", o.cpu_overhead, "CPU time subtracted from deadlines (s)");
  app.add_option("--jitter", o.jitter, "Stage time fraction shaved at random, [0,1)");
  app.add_option("--threads", o.threads, "Parallel runs for sweep");

  CLI::App* simulate = app.add_subcommand("simulate", "Run one simulation per policy and seed");
  simulate->add_option("--jobs-out", o.jobs_out, "Per-job outcome CSV");

  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one parameter across policies");
  sweep->add_option("--axis", o.axis, "k|du|dl|delta")->required();
  sweep->add_option("--values", o.values, "Comma-separated axis values")
      ->delimiter(',')
      ->required();

  CLI::App* validate = app.add_subcommand("validate", "Planner vs brute-force bound suite");
  validate->add_option("--instances", o.instances, "Random instances");
  validate->add_option("--epsilons", o.epsilons, "Approximation parameters")->delimiter(',');

  CLI::App* gen = app.add_subcommand("gen-trace", "Write a synthetic trace library");
  gen->add_option("--records", o.records, "Records");
  gen->add_option("--stages", o.stages, "Stages per record");
  gen->add_option("--classes", o.classes, "Number of classes");
  gen->add_option("--wcet", o.wcet, "Per-stage wcet (s)")->delimiter(',');
  gen->add_option("--family", o.family, "saturating|linear");

  CLI::App* profile = app.add_subcommand("profile", "Per-stage wcet from timing samples");
  profile->add_option("--samples", o.samples, "One line of samples per stage")->required();
  profile->add_option("--bound", o.bound, "ci99|p99");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (simulate->parsed() || sweep->parsed()) {
      if (o.dl > o.du) throw std::invalid_argument("--dl must not exceed --du");
      const std::string manifest = app.config_to_str(true, false);
      return simulate->parsed() ? cmd_simulate(o, out, manifest)
                                : cmd_sweep(o, out, manifest);
    }
    if (validate->parsed()) return cmd_validate(o, out);
    if (gen->parsed()) return cmd_gen_trace(o, out);
    if (profile->parsed()) return cmd_profile(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace anytime::cli
