#include "corrsched/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "corrsched/bench.hpp"
#include "corrsched/descent.hpp"
#include "corrsched/errors.hpp"
#include "corrsched/heuristics.hpp"
#include "corrsched/io.hpp"
#include "corrsched/linearize.hpp"
#include "corrsched/objective.hpp"
#include "corrsched/sim.hpp"
#include "corrsched/solver.hpp"

namespace corrsched::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct Globals {
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  std::string format = "json";
  unsigned threads = 0;
};

struct Context {
  Globals g;
  std::ostream& out;
  std::ostream& err;

  std::uint64_t seed(std::uint64_t fallback = 0) const {
    if (g.seed) return *g.seed;
    if (const char* env = std::getenv("CORRSCHED_SEED"); env && *env) {
      try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used, 0);
        if (used == std::string_view(env).size()) return v;
      } catch (const std::exception&) {
      }
      throw ValidationError(fmt::format("CORRSCHED_SEED is not an unsigned integer: '{}'", env));
    }
    return fallback;
  }
  bool csv() const { return g.format == "csv"; }
  void log(std::string_view msg) const {
    if (!g.quiet) err << msg << '\n';
  }
  void emit(const ojson& doc) const { out << doc.dump(2) << '\n'; }
};

std::string pc_f_csv(const CollisionReport& r) {
  std::string s = "p_c,f";
  for (std::size_t j = 0; j < r.per_channel.size(); ++j) s += fmt::format(",p_{}", j);
  s += fmt::format("\n{},{}", io::format_double(r.network_average),
                   io::format_double(r.pairwise_bound));
  for (double p : r.per_channel) s += "," + io::format_double(p);
  return s + "\n";
}

void append_csv_row(const fs::path& path, const CollisionReport& r, std::string_view source) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream f(path, std::ios::app);
  if (!f) throw Error(fmt::format("cannot open '{}' for appending", path.string()));
  if (fresh) f << "source,channels,p_c,f\n";
  f << source << ',' << r.per_channel.size() << ',' << io::format_double(r.network_average)
    << ',' << io::format_double(r.pairwise_bound) << '\n';
}

// Hard schedule from --schedule or --assignment.
Assignment load_hard(const std::string& schedule, const std::string& assignment,
                     std::size_t& n_channels) {
  if (!assignment.empty()) {
    Assignment a = io::load_assignment(assignment);
    if (n_channels == 0) {
      n_channels = a.channel_of.empty()
                       ? 1
                       : *std::max_element(a.channel_of.begin(), a.channel_of.end()) + 1;
    }
    check_assignment(a, n_channels);
    return a;
  }
  const ScheduleMatrix e = io::load_schedule(schedule);
  if (!e.is_hard()) throw ValidationError("schedule is not hard (entries must be 0 or 1)");
  if (n_channels != 0 && n_channels != e.cols()) {
    throw ShapeError(fmt::format("--channels {} does not match schedule width {}", n_channels,
                                 e.cols()));
  }
  n_channels = e.cols();
  return schedule_to_assignment(e);
}

void check_dims(const JointActivationMatrix& a, std::size_t n) {
  if (a.dim() != n) {
    throw ShapeError(fmt::format("matrix has {} devices but schedule has {}", a.dim(), n));
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{{}, out, err};
  CLI::App app{"Channel scheduling under correlated device activation", "corrsched"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults; flags override it");
  app.add_option("--seed", ctx.g.seed, "64-bit seed (fallback: CORRSCHED_SEED)");
  app.add_flag("--quiet", ctx.g.quiet, "Suppress diagnostics on stderr");
  app.add_option("--format", ctx.g.format, "Report format on stdout")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", ctx.g.threads, "Worker threads (0 = all cores)");

  std::function<int()> run;
  auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  // sim
  std::size_t devices = 0;
  double density = kDefaultDensity;
  double lambda = kDefaultLambda;
  double steps = static_cast<double>(kDefaultSteps);
  std::string out_matrix, out_layout;
  CLI::App* sim = sub("sim", "Simulate alarms and estimate the joint activation matrix");
  sim->add_option("--devices", devices, "Number of devices")->required()->check(CLI::PositiveNumber);
  sim->add_option("--density", density, "Devices per square meter")->capture_default_str();
  sim->add_option("--lambda", lambda, "Activation mean-scaling distance (m)")->capture_default_str();
  sim->add_option("--steps", steps, "Alarm steps")->capture_default_str();
  sim->add_option("--out-matrix", out_matrix, "Write the matrix (.json or .csv)");
  sim->add_option("--out-layout", out_layout, "Write the layout CSV and its JSON sidecar");
  sim->callback([&] {
    run = [&] {
      if (!(steps >= 1.0) || steps != static_cast<double>(static_cast<std::uint64_t>(steps))) {
        throw ValidationError(fmt::format("--steps must be a positive integer, got {}", steps));
      }
      const std::uint64_t seed = ctx.seed();
      const ActivationModel model(lambda);
      const DeviceLayout layout = generate_layout(devices, density, seed);
      SimulationSpec spec{static_cast<std::uint64_t>(steps), seed, ctx.g.threads};
      ctx.log(fmt::format("simulating {} steps for {} devices (R = {:.4f} m)", spec.steps,
                          devices, layout.region_radius));
      const JointActivationMatrix a = estimate_joint_activation(layout, model, spec);
      if (!out_matrix.empty()) io::save_matrix(out_matrix, a);
      if (!out_layout.empty()) io::save_layout(out_layout, layout);
      if (ctx.csv()) {
        out << io::format_matrix_csv(a);
        return kExitOk;
      }
      ojson j;
      j["devices"] = devices;
      j["density"] = density;
      j["lambda"] = lambda;
      j["steps"] = spec.steps;
      j["seed"] = seed;
      j["region_radius"] = layout.region_radius;
      j["matrix"] = ojson::parse(io::format_matrix_json(a));
      ctx.emit(j);
      return kExitOk;
    };
  });

  // eval
  std::string matrix_path, schedule_path, assignment_path, append_csv;
  std::size_t channels = 0;
  CLI::App* eval = sub("eval", "Collision probability and pairwise bound of a schedule");
  eval->add_option("--matrix", matrix_path, "Joint activation matrix")->required();
  auto* eval_sched = eval->add_option("--schedule", schedule_path, "Schedule matrix (soft or hard)");
  auto* eval_assign = eval->add_option("--assignment", assignment_path, "Assignment CSV");
  eval_sched->excludes(eval_assign);
  eval->add_option("--channels", channels, "Channel count for --assignment");
  eval->add_option("--append-csv", append_csv, "Append a summary row to this CSV");
  eval->callback([&] {
    run = [&] {
      if (schedule_path.empty() && assignment_path.empty()) {
        throw ValidationError("eval needs --schedule or --assignment");
      }
      const JointActivationMatrix a = io::load_matrix(matrix_path);
      CollisionReport r;
      if (!assignment_path.empty()) {
        const Assignment x = load_hard("", assignment_path, channels);
        check_dims(a, x.size());
        r = network_collision_probability(a, x, channels);
      } else {
        const ScheduleMatrix e = io::load_schedule(schedule_path);
        check_dims(a, e.rows());
        r = network_collision_probability(a, e);
      }
      if (!append_csv.empty()) {
        append_csv_row(append_csv, r, assignment_path.empty() ? schedule_path : assignment_path);
      }
      if (ctx.csv()) {
        out << pc_f_csv(r);
      } else {
        ctx.emit(io::to_json(r));
      }
      return kExitOk;
    };
  });

  // descend
  std::size_t max_sweeps = 100;
  std::string out_path;
  CLI::App* descend = sub("descend", "Coordinate descent from a hard schedule");
  descend->add_option("--matrix", matrix_path, "Joint activation matrix")->required();
  auto* d_sched = descend->add_option("--schedule", schedule_path, "Hard schedule matrix");
  auto* d_assign = descend->add_option("--assignment", assignment_path, "Assignment CSV");
  d_sched->excludes(d_assign);
  descend->add_option("--channels", channels, "Channel count for --assignment");
  descend->add_option("--max-sweeps", max_sweeps, "Sweep limit")->capture_default_str();
  descend->add_option("--out", out_path, "Write the improved assignment CSV");
  descend->callback([&] {
    run = [&] {
      if (schedule_path.empty() && assignment_path.empty()) {
        throw ValidationError("descend needs --schedule or --assignment");
      }
      const JointActivationMatrix a = io::load_matrix(matrix_path);
      const Assignment start = load_hard(schedule_path, assignment_path, channels);
      check_dims(a, start.size());
      DescentStats stats;
      const Assignment best = coordinate_descent(a, start, channels, max_sweeps, &stats);
      if (!out_path.empty()) io::save_assignment(out_path, best);
      if (ctx.csv()) {
        out << io::format_assignment_csv(best);
        return kExitOk;
      }
      ojson j;
      j["objective_before"] = pairwise_bound(a, start, channels);
      j["objective"] = pairwise_bound(a, best, channels);
      j["sweeps"] = stats.sweeps;
      j["moves"] = stats.moves;
      j["assignment"] = io::to_json(best);
      ctx.emit(j);
      return kExitOk;
    };
  });

  // export
  bool reduced = false;
  CLI::App* exp = sub("export", "Write the linearized 0-1 program in LP format");
  exp->add_option("--matrix", matrix_path, "Joint activation matrix")->required();
  exp->add_option("--channels", channels, "Number of channels")->required()->check(CLI::PositiveNumber);
  exp->add_option("--out", out_path, "Output .lp file")->required();
  exp->add_flag("--reduced", reduced, "Drop the indicator variables and their rows");
  exp->callback([&] {
    run = [&] {
      const JointActivationMatrix a = io::load_matrix(matrix_path);
      const PILPModel m =
          build_pilp(a, channels, reduced ? GateEncoding::kReduced : GateEncoding::kFull);
      io::write_file(out_path, export_lp(m));
      const auto binaries = std::count_if(m.variables.begin(), m.variables.end(),
                                          [](const Variable& v) { return v.kind == VarKind::kBinary; });
      if (ctx.csv()) {
        out << "path,variables,binaries,constraints\n"
            << fmt::format("{},{},{},{}\n", out_path, m.variables.size(), binaries,
                           m.constraints.size());
        return kExitOk;
      }
      ojson j;
      j["path"] = out_path;
      j["encoding"] = reduced ? "reduced" : "full";
      j["variables"] = m.variables.size();
      j["binaries"] = binaries;
      j["constraints"] = m.constraints.size();
      ctx.emit(j);
      return kExitOk;
    };
  });

  // solve
  double gap = kDefaultGapTolerance;
  std::optional<double> time_limit;
  std::optional<std::uint64_t> node_limit;
  bool brute = false;
  std::string warm_start, log_incumbents;
  CLI::App* solve = sub("solve", "Exact channel assignment by branch-and-bound");
  solve->add_option("--matrix", matrix_path, "Joint activation matrix")->required();
  solve->add_option("--channels", channels, "Number of channels")->required()->check(CLI::PositiveNumber);
  solve->add_option("--gap", gap, "Relative gap tolerance")->capture_default_str()->check(CLI::NonNegativeNumber);
  solve->add_option("--time-limit", time_limit, "Seconds")->check(CLI::NonNegativeNumber);
  solve->add_option("--node-limit", node_limit, "Maximum explored nodes");
  solve->add_flag("--brute-force", brute, "Exhaustive enumeration instead of branch-and-bound");
  solve->add_option("--warm-start", warm_start, "Initial incumbent (assignment CSV)");
  solve->add_option("--log-incumbents", log_incumbents, "Write elapsed_s,objective CSV");
  solve->add_option("--out", out_path, "Write the best assignment CSV");
  solve->callback([&] {
    run = [&] {
      const JointActivationMatrix a = io::load_matrix(matrix_path);
      SolverResult r;
      if (brute) {
        r = brute_force(a, channels);
      } else {
        SolverOptions opts;
        opts.gap_tolerance = gap;
        opts.time_limit = time_limit;
        opts.node_limit = node_limit;
        if (!warm_start.empty()) {
          Assignment w = io::load_assignment(warm_start);
          check_dims(a, w.size());
          check_assignment(w, channels);
          opts.initial_incumbent = std::move(w);
        }
        r = solve_exact(a, channels, opts);
      }
      if (!out_path.empty()) io::save_assignment(out_path, r.assignment);
      if (!log_incumbents.empty()) {
        std::string csv = "elapsed_s,objective\n";
        for (const auto& e : r.incumbent_log) {
          csv += io::format_double(e.elapsed_s) + "," + io::format_double(e.objective) + "\n";
        }
        io::write_file(log_incumbents, csv);
      }
      ctx.log(fmt::format("{}: F = {} after {} nodes", io::to_string(r.status),
                          io::format_double(r.objective), r.nodes_explored));
      if (ctx.csv()) {
        out << io::format_assignment_csv(r.assignment);
      } else {
        ctx.emit(io::to_json(r));
      }
      return r.hit_limit() ? kExitLimit : kExitOk;
    };
  });

  // cluster
  std::string method = "kmedoids-pp";
  std::string dissimilarity = "A";
  std::size_t restarts = 1;
  std::size_t max_iter = kDefaultMaxIter;
  CLI::App* cluster = sub("cluster", "K-Medoids channel assignment");
  cluster->add_option("--matrix", matrix_path, "Joint activation matrix")->required();
  cluster->add_option("--channels", channels, "Number of channels")->required()->check(CLI::PositiveNumber);
  cluster->add_option("--method", method, "Seeding")->capture_default_str()
      ->check(CLI::IsMember({"kmedoids", "kmedoids-pp"}));
  cluster->add_option("--restarts", restarts, "Seeded restarts; best F kept")->capture_default_str()
      ->check(CLI::PositiveNumber);
  cluster->add_option("--dissimilarity", dissimilarity, "Device dissimilarity")->capture_default_str()
      ->check(CLI::IsMember({"A", "one-minus-A"}));
  cluster->add_option("--max-iter", max_iter, "Sweep limit per run")->capture_default_str();
  cluster->add_option("--out", out_path, "Write the assignment CSV");
  cluster->callback([&] {
    run = [&] {
      const JointActivationMatrix a = io::load_matrix(matrix_path);
      if (channels > a.dim()) {
        throw ValidationError(fmt::format("--channels {} exceeds the {} devices", channels, a.dim()));
      }
      const std::uint64_t seed = ctx.seed();
      const ClusteringResult c = best_of_restarts(a, channels, parse_clustering_method(method), seed,
                                                  restarts, max_iter,
                                                  parse_dissimilarity(dissimilarity));
      if (!out_path.empty()) io::save_assignment(out_path, c.assignment);
      if (ctx.csv()) {
        out << io::format_assignment_csv(c.assignment);
        return kExitOk;
      }
      const CollisionReport r = network_collision_probability(a, c.assignment, channels);
      ojson j;
      j["method"] = method;
      j["seed"] = seed;
      j["objective"] = r.pairwise_bound;
      j["network_average"] = r.network_average;
      j["medoids"] = c.state.medoids;
      j["medoid_cost"] = c.state.cost;
      j["sweeps"] = c.state.sweeps;
      j["assignment"] = io::to_json(c.assignment);
      ctx.emit(j);
      return kExitOk;
    };
  });

  // bench
  std::string experiment, spec_path, out_dir;
  CLI::App* bench_cmd = sub("bench", "Desk-scale experiments; writes one CSV");
  bench_cmd->add_option("--experiment", experiment, "Experiment")
      ->required()
      ->check(CLI::IsMember({"anytime", "bound", "vs-L", "vs-lambda"}));
  bench_cmd->add_option("--spec", spec_path, "Experiment spec JSON")->required();
  bench_cmd->add_option("--out", out_dir, "Output directory");
  bench_cmd->callback([&] {
    run = [&] {
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(io::read_file(spec_path));
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(fmt::format("{}: {}", spec_path, e.what()));
      }
      bench::ExperimentSpec spec = bench::parse_spec(doc);
      if (ctx.g.seed || std::getenv("CORRSCHED_SEED")) {
        if (!doc.contains("seed")) spec.seed = ctx.seed();
      }
      if (!doc.contains("threads")) spec.threads = ctx.g.threads;
      const auto result = bench::run_experiment(bench::parse_experiment(experiment), spec);
      for (const auto& w : result.warnings) ctx.err << "warning: " << w << '\n';
      std::string path;
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        path = (fs::path(out_dir) / result.file_name).string();
        io::write_file(path, result.csv);
      }
      if (ctx.csv()) {
        out << result.csv;
        return kExitOk;
      }
      ojson j;
      j["experiment"] = experiment;
      j["file"] = path.empty() ? ojson(nullptr) : ojson(path);
      j["rows"] = std::count(result.csv.begin(), result.csv.end(), '\n') - 1;
      j["warnings"] = result.warnings;
      j["spec"] = bench::to_json(spec);
      ctx.emit(j);
      return kExitOk;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitError;
  }
  if (!run) {
    err << app.help();
    return kExitError;
  }
  try {
    return run();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace corrsched::cli
