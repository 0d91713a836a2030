#include "corrsched/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "corrsched/descent.hpp"
#include "corrsched/heuristics.hpp"
#include "corrsched/io.hpp"
#include "corrsched/objective.hpp"
#include "corrsched/rng.hpp"
#include "corrsched/solver.hpp"

namespace corrsched::bench {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kLayoutTag = 0x4C;
constexpr std::uint64_t kActivationTag = 0x41;
constexpr std::uint64_t kHeuristicTag = 0x48;

// Runs fn(0..count-1) on up to `threads` workers; results must be written by index.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

Assignment identity_assignment(std::size_t n) {
  Assignment a;
  a.channel_of.resize(n);
  std::iota(a.channel_of.begin(), a.channel_of.end(), 0);
  return a;
}

std::vector<double> values_as_double(const json& v, const char* field) {
  if (!v.is_array() || v.empty()) {
    throw ParseError(fmt::format("field '{}' must be a non-empty array of numbers", field));
  }
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ParseError(fmt::format("field '{}' must hold numbers", field));
    out.push_back(x.get<double>());
  }
  return out;
}

std::size_t as_count(double x, const char* what) {
  if (!(x >= 1.0) || x != static_cast<double>(static_cast<std::size_t>(x))) {
    throw ValidationError(fmt::format("{} must be a positive integer, got {}", what, x));
  }
  return static_cast<std::size_t>(x);
}

std::string_view sweep_name(SweepVariable s) {
  switch (s) {
    case SweepVariable::kDevices:
      return "N";
    case SweepVariable::kChannels:
      return "L";
    case SweepVariable::kLambda:
      return "lambda";
  }
  return "?";
}

}  // namespace

Experiment parse_experiment(std::string_view name) {
  if (name == "anytime") return Experiment::kAnytime;
  if (name == "bound") return Experiment::kBound;
  if (name == "vs-L") return Experiment::kVsChannels;
  if (name == "vs-lambda") return Experiment::kVsLambda;
  throw ValidationError(fmt::format("unknown experiment '{}'", name));
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kExact:
      return "exact";
    case Method::kKMedoids:
      return "kmedoids";
    case Method::kKMedoidsPlusPlus:
      return "kmedoids-pp";
    case Method::kDescentPolished:
      return "descent-polished";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kExact, Method::kKMedoids, Method::kKMedoidsPlusPlus,
                   Method::kDescentPolished}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError(fmt::format("unknown method '{}'", name));
}

std::vector<std::size_t> ExperimentSpec::device_grid() const {
  if (sweep != SweepVariable::kDevices) return {devices};
  std::vector<std::size_t> out;
  for (double v : values) out.push_back(as_count(v, "device count"));
  return out;
}

std::vector<std::size_t> ExperimentSpec::channel_grid() const {
  if (sweep != SweepVariable::kChannels) return channels;
  std::vector<std::size_t> out;
  for (double v : values) out.push_back(as_count(v, "channel count"));
  return out;
}

std::vector<double> ExperimentSpec::lambda_grid() const {
  if (sweep != SweepVariable::kLambda) return {lambda};
  return values;
}

ExperimentSpec parse_spec(const json& doc) {
  if (!doc.is_object()) throw ParseError("experiment spec must be a JSON object");
  static const std::vector<std::string> known{
      "sweep", "values",   "devices", "channels", "density", "lambda",  "steps",
      "seed",  "gap",      "time_limit", "methods", "trials", "restarts", "threads"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ParseError(fmt::format("unknown field '{}'", key));
    }
  }

  ExperimentSpec spec;
  const auto sweep = doc.find("sweep");
  if (sweep == doc.end() || !sweep->is_string()) throw ParseError("missing field 'sweep'");
  const std::string s = sweep->get<std::string>();
  if (s == "N") {
    spec.sweep = SweepVariable::kDevices;
  } else if (s == "L") {
    spec.sweep = SweepVariable::kChannels;
  } else if (s == "lambda") {
    spec.sweep = SweepVariable::kLambda;
  } else {
    throw ParseError(fmt::format("field 'sweep' must be N, L or lambda, got '{}'", s));
  }
  const auto values = doc.find("values");
  if (values == doc.end()) throw ParseError("missing field 'values'");
  spec.values = values_as_double(*values, "values");

  auto number = [&](const char* field, auto& target) {
    const auto it = doc.find(field);
    if (it == doc.end()) return;
    if (!it->is_number()) throw ParseError(fmt::format("field '{}' must be a number", field));
    using T = std::decay_t<decltype(target)>;
    if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_unsigned()) {
        throw ParseError(fmt::format("field '{}' must be a non-negative integer", field));
      }
    }
    target = it->template get<T>();
  };
  number("devices", spec.devices);
  number("density", spec.density);
  number("lambda", spec.lambda);
  number("steps", spec.steps);
  number("seed", spec.seed);
  number("gap", spec.gap);
  number("trials", spec.trials);
  number("restarts", spec.restarts);
  number("threads", spec.threads);
  if (const auto it = doc.find("time_limit"); it != doc.end() && !it->is_null()) {
    if (!it->is_number()) throw ParseError("field 'time_limit' must be a number");
    spec.time_limit = it->get<double>();
  }
  if (const auto it = doc.find("channels"); it != doc.end()) {
    spec.channels.clear();
    if (it->is_number()) {
      spec.channels.push_back(as_count(it->get<double>(), "channel count"));
    } else {
      for (double v : values_as_double(*it, "channels")) {
        spec.channels.push_back(as_count(v, "channel count"));
      }
    }
  }
  if (const auto it = doc.find("methods"); it != doc.end()) {
    if (!it->is_array() || it->empty()) throw ParseError("field 'methods' must be a non-empty array");
    spec.methods.clear();
    for (const auto& m : *it) {
      if (!m.is_string()) throw ParseError("field 'methods' must hold strings");
      spec.methods.push_back(parse_method(m.get<std::string>()));
    }
  }
  if (spec.trials == 0) throw ValidationError("trials must be at least 1");
  if (spec.restarts == 0) throw ValidationError("restarts must be at least 1");
  if (spec.steps == 0) throw ValidationError("steps must be at least 1");
  if (!(spec.gap >= 0.0)) throw ValidationError("gap must be non-negative");
  spec.device_grid();
  spec.channel_grid();
  return spec;
}

nlohmann::ordered_json to_json(const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["sweep"] = sweep_name(spec.sweep);
  j["values"] = spec.values;
  j["devices"] = spec.devices;
  j["channels"] = spec.channels;
  j["density"] = spec.density;
  j["lambda"] = spec.lambda;
  j["steps"] = spec.steps;
  j["seed"] = spec.seed;
  j["gap"] = spec.gap;
  j["time_limit"] = spec.time_limit ? nlohmann::ordered_json(*spec.time_limit) : nullptr;
  auto methods = nlohmann::ordered_json::array();
  for (Method m : spec.methods) methods.push_back(to_string(m));
  j["methods"] = std::move(methods);
  j["trials"] = spec.trials;
  j["restarts"] = spec.restarts;
  j["threads"] = spec.threads;
  return j;
}

Instance make_instance(const ExperimentSpec& spec, std::size_t n, double lambda,
                       std::size_t trial) {
  DeviceLayout layout = generate_layout(n, spec.density, derive_seed(spec.seed, trial, kLayoutTag ^ (n << 8)));
  SimulationSpec sim;
  sim.steps = spec.steps;
  sim.seed = derive_seed(spec.seed, trial, kActivationTag ^ (n << 8));
  sim.threads = 1;
  JointActivationMatrix a = estimate_joint_activation(layout, ActivationModel(lambda), sim);
  return {std::move(layout), std::move(a)};
}

MethodRun run_method(const ExperimentSpec& spec, Method method, const JointActivationMatrix& a,
                     std::size_t n_channels, std::size_t trial) {
  const auto start = Clock::now();
  MethodRun out;
  const std::size_t n = a.dim();
  const std::uint64_t seed = derive_seed(spec.seed, trial, kHeuristicTag);

  if (method == Method::kExact) {
    SolverOptions opts;
    opts.gap_tolerance = spec.gap;
    opts.time_limit = spec.time_limit;
    SolverResult r = solve_exact(a, n_channels, opts);
    out.assignment = std::move(r.assignment);
    for (const auto& e : r.incumbent_log) out.trail.emplace_back(e.elapsed_s, e.objective);
    out.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
  }

  if (n_channels >= n) {
    out.assignment = identity_assignment(n);
  } else {
    const auto kind = method == Method::kKMedoids ? ClusteringMethod::kKMedoids
                                                  : ClusteringMethod::kKMedoidsPlusPlus;
    out.assignment = best_of_restarts(a, n_channels, kind, seed, spec.restarts).assignment;
    if (method == Method::kDescentPolished) {
      out.assignment = coordinate_descent(a, out.assignment, n_channels);
    }
  }
  out.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
  out.trail.emplace_back(out.elapsed_s, pairwise_bound(a, out.assignment, n_channels));
  return out;
}

std::vector<AnytimeRow> run_anytime(const ExperimentSpec& spec) {
  struct Task {
    std::size_t n, l, trial;
  };
  std::vector<Task> tasks;
  for (std::size_t n : spec.device_grid()) {
    for (std::size_t l : spec.channel_grid()) {
      for (std::size_t t = 0; t < spec.trials; ++t) tasks.push_back({n, l, t});
    }
  }
  const double lambda = spec.lambda_grid().front();
  std::vector<std::vector<AnytimeRow>> per_task(tasks.size());
  parallel_for(tasks.size(), spec.threads, [&](std::size_t k) {
    const Task& task = tasks[k];
    const Instance inst = make_instance(spec, task.n, lambda, task.trial);
    for (Method m : spec.methods) {
      const MethodRun run = run_method(spec, m, inst.matrix, task.l, task.trial);
      for (const auto& [t, obj] : run.trail) {
        per_task[k].push_back({task.n, task.l, task.trial, m, t, obj});
      }
    }
  });
  std::vector<AnytimeRow> rows;
  for (auto& chunk : per_task) rows.insert(rows.end(), chunk.begin(), chunk.end());
  return rows;
}

std::vector<BoundRow> run_bound_tightness(const ExperimentSpec& spec) {
  struct Task {
    std::size_t n, l, trial;
  };
  std::vector<Task> tasks;
  for (std::size_t n : spec.device_grid()) {
    for (std::size_t l : spec.channel_grid()) {
      for (std::size_t t = 0; t < spec.trials; ++t) tasks.push_back({n, l, t});
    }
  }
  const double lambda = spec.lambda_grid().front();
  std::vector<BoundRow> rows(tasks.size());
  parallel_for(tasks.size(), spec.threads, [&](std::size_t k) {
    const Task& task = tasks[k];
    const Instance inst = make_instance(spec, task.n, lambda, task.trial);
    const MethodRun run = run_method(spec, Method::kExact, inst.matrix, task.l, task.trial);
    const CollisionReport rep = network_collision_probability(inst.matrix, run.assignment, task.l);
    rows[k] = {task.n, task.l, task.trial, rep.network_average, rep.pairwise_bound};
  });
  return rows;
}

namespace {

std::vector<CurveRow> run_curve(const ExperimentSpec& spec, bool over_lambda) {
  const std::size_t n = spec.device_grid().front();
  const auto ls = spec.channel_grid();
  const auto lambdas = spec.lambda_grid();
  const std::vector<double> xs =
      over_lambda ? lambdas : std::vector<double>(ls.begin(), ls.end());

  struct Task {
    std::size_t x, trial;
  };
  std::vector<Task> tasks;
  for (std::size_t x = 0; x < xs.size(); ++x) {
    for (std::size_t t = 0; t < spec.trials; ++t) tasks.push_back({x, t});
  }
  // results[task][method] = (P_c, F)
  std::vector<std::vector<std::pair<double, double>>> results(tasks.size());
  parallel_for(tasks.size(), spec.threads, [&](std::size_t k) {
    const Task& task = tasks[k];
    const double lambda = over_lambda ? xs[task.x] : lambdas.front();
    const std::size_t l = over_lambda ? ls.front() : ls[task.x];
    const Instance inst = make_instance(spec, n, lambda, task.trial);
    for (Method m : spec.methods) {
      const MethodRun run = run_method(spec, m, inst.matrix, l, task.trial);
      const CollisionReport rep = network_collision_probability(inst.matrix, run.assignment, l);
      results[k].emplace_back(rep.network_average, rep.pairwise_bound);
    }
  });

  std::vector<CurveRow> rows;
  for (std::size_t x = 0; x < xs.size(); ++x) {
    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
      CurveRow row{xs[x], spec.methods[mi], 0.0, 0.0};
      for (std::size_t t = 0; t < spec.trials; ++t) {
        const auto& [pc, f] = results[x * spec.trials + t][mi];
        row.p_c += pc;
        row.f += f;
      }
      row.p_c /= static_cast<double>(spec.trials);
      row.f /= static_cast<double>(spec.trials);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace

std::vector<CurveRow> run_pc_vs_channels(const ExperimentSpec& spec) {
  return run_curve(spec, false);
}

std::vector<CurveRow> run_pc_vs_lambda(const ExperimentSpec& spec) {
  return run_curve(spec, true);
}

std::string anytime_csv(const std::vector<AnytimeRow>& rows) {
  std::string out = "n,l,trial,method,elapsed_s,objective\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.n, r.l, r.trial, to_string(r.method),
                       io::format_double(r.elapsed_s), io::format_double(r.objective));
  }
  return out;
}

std::string bound_csv(const std::vector<BoundRow>& rows) {
  std::string out = "n,l,trial,p_c,f\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", r.n, r.l, r.trial, io::format_double(r.p_c),
                       io::format_double(r.f));
  }
  return out;
}

std::string curve_csv(const std::vector<CurveRow>& rows, std::string_view x_name) {
  std::string out = fmt::format("{},method,p_c,f\n", x_name);
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{}\n", io::format_double(r.x), to_string(r.method),
                       io::format_double(r.p_c), io::format_double(r.f));
  }
  return out;
}

ExperimentOutput run_experiment(Experiment experiment, const ExperimentSpec& spec) {
  ExperimentOutput out;
  for (std::size_t n : spec.device_grid()) {
    for (std::size_t l : spec.channel_grid()) {
      if (l >= n) {
        out.warnings.push_back(fmt::format(
            "L = {} >= N = {}: every device can have its own channel, optimum is 0", l, n));
      }
    }
  }
  switch (experiment) {
    case Experiment::kAnytime:
      out.file_name = "anytime.csv";
      out.csv = anytime_csv(run_anytime(spec));
      break;
    case Experiment::kBound:
      out.file_name = "bound.csv";
      out.csv = bound_csv(run_bound_tightness(spec));
      break;
    case Experiment::kVsChannels:
      out.file_name = "vs_L.csv";
      out.csv = curve_csv(run_pc_vs_channels(spec), "l");
      break;
    case Experiment::kVsLambda:
      out.file_name = "vs_lambda.csv";
      out.csv = curve_csv(run_pc_vs_lambda(spec), "lambda");
      break;
  }
  return out;
}

}  // namespace corrsched::bench
