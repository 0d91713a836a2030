// Acceptance checks, one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "corrsched/bench.hpp"
#include "corrsched/descent.hpp"
#include "corrsched/heuristics.hpp"
#include "corrsched/io.hpp"
#include "corrsched/linearize.hpp"
#include "corrsched/objective.hpp"
#include "corrsched/sim.hpp"
#include "corrsched/solver.hpp"
#include "oracles.hpp"

using namespace corrsched;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back(what);
    }
  }
};

double seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.check(false, fmt::format("exception: {}", e.what()));
  }
  const double took = seconds(t0);
  o.check(took <= limit_s, fmt::format("runtime {:.1f}s exceeds {:.0f}s", took, limit_s));
  if (!o.pass) ++failures;
  std::printf("criterion %d: %s  %s (%.2fs)\n", id, o.pass ? "PASS" : "FAIL", title, took);
  const std::size_t shown = std::min<std::size_t>(o.notes.size(), 8);
  for (std::size_t k = 0; k < shown; ++k) std::printf("    %s\n", o.notes[k].c_str());
  if (o.notes.size() > shown) std::printf("    ... %zu more\n", o.notes.size() - shown);
  std::fflush(stdout);
}

bench::ExperimentSpec shipped(const char* name) {
  const auto doc = nlohmann::json::parse(
      io::read_file(std::string(CORRSCHED_BENCH_SPECS) + "/" + name));
  return bench::parse_spec(doc);
}

// Drops the elapsed_s column of the anytime CSV.
std::string without_elapsed(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k == 4) continue;
      out += cells[k];
      out += k + 1 < cells.size() ? "," : "";
    }
    out += "\n";
  }
  return out;
}

struct BenchRun {
  std::map<std::string, bench::ExperimentOutput> outputs;
  std::vector<bench::CurveRow> vs_l;
  std::vector<bench::CurveRow> vs_lambda;
  double seconds = 0.0;
};

BenchRun run_bench_suite() {
  BenchRun r;
  const auto t0 = Clock::now();
  r.outputs["anytime"] = bench::run_experiment(bench::Experiment::kAnytime, shipped("anytime.json"));
  r.outputs["bound"] = bench::run_experiment(bench::Experiment::kBound, shipped("bound.json"));
  const auto vs_l_spec = shipped("vs_L.json");
  r.vs_l = bench::run_pc_vs_channels(vs_l_spec);
  r.outputs["vs-L"] = {"vs_L.csv", bench::curve_csv(r.vs_l, "l"), {}};
  const auto vs_lambda_spec = shipped("vs_lambda.json");
  r.vs_lambda = bench::run_pc_vs_lambda(vs_lambda_spec);
  r.outputs["vs-lambda"] = {"vs_lambda.csv", bench::curve_csv(r.vs_lambda, "lambda"), {}};
  r.seconds = seconds(t0);
  return r;
}

}  // namespace

int main() {
  report(1, "exact solver equals brute force on 500 random instances", 60, [] {
    Outcome o;
    std::mt19937_64 g(20240601);
    int bit_equal = 0;
    for (int t = 0; t < 500; ++t) {
      const std::size_t n = 2 + g() % 9;
      const std::size_t l = 2 + g() % 3;
      const auto a = oracle::random_matrix(n, g);
      SolverOptions opts;
      opts.gap_tolerance = 0.0;
      const double exact = solve_exact(a, l, opts).objective;
      const double brute = brute_force(a, l).objective;
      if (exact == brute) {
        ++bit_equal;
      } else {
        o.check(std::abs(exact - brute) <= 1e-12 * std::max(std::abs(brute), 1e-300),
                fmt::format("instance {} (N={}, L={}): exact {} vs brute {}", t, n, l, exact, brute));
      }
    }
    o.notes.push_back(fmt::format("{} / 500 bit-equal", bit_equal));
    return o;
  });

  report(2, "pairwise bound dominates P_c; relative gap non-increasing in L", 30, [] {
    Outcome o;
    std::mt19937_64 g(7);
    double worst = INFINITY;
    for (int t = 0; t < 1000; ++t) {
      const std::size_t n = 2 + g() % 11;
      const std::size_t l = 1 + g() % 4;
      const auto a = oracle::random_matrix(n, g);
      const auto e = oracle::random_schedule(n, l, g);
      const auto r = network_collision_probability(a, e);
      worst = std::min(worst, r.pairwise_bound - r.network_average);
      o.check(r.pairwise_bound - r.network_average >= -1e-12,
              fmt::format("instance {}: F {} < P_c {}", t, r.pairwise_bound, r.network_average));
    }
    o.notes.push_back(fmt::format("min slack {:.3g}", worst));
    // Bound-tightness grid: mean of (F - P_c) / F over trials per (N, L); 0 when F = 0.
    const auto spec = shipped("bound.json");
    std::map<std::pair<std::size_t, std::size_t>, std::pair<double, int>> rel;
    for (const auto& row : bench::run_bound_tightness(spec)) {
      o.check(row.f - row.p_c >= -1e-12, fmt::format("grid row N={} L={}: F < P_c", row.n, row.l));
      auto& cell = rel[{row.n, row.l}];
      cell.first += row.f > 0 ? (row.f - row.p_c) / row.f : 0.0;
      cell.second += 1;
    }
    for (std::size_t n : spec.device_grid()) {
      double prev = INFINITY;
      for (std::size_t l : spec.channel_grid()) {
        const auto& cell = rel[{n, l}];
        const double mean = cell.first / cell.second;
        o.check(mean <= prev + 1e-12,
                fmt::format("N={}: relative gap rises from {:.4f} to {:.4f} at L={}", n, prev, mean, l));
        prev = mean;
      }
    }
    return o;
  });

  report(3, "rounding never increases F and is idempotent", 30, [] {
    Outcome o;
    std::mt19937_64 g(11);
    for (int t = 0; t < 1000; ++t) {
      const std::size_t n = 2 + g() % 11;
      const std::size_t l = 1 + g() % 5;
      const auto a = oracle::random_matrix(n, g);
      const auto e = oracle::random_schedule(n, l, g, 0.1);
      const Assignment x = round_to_hard(a, e);
      o.check(pairwise_bound(a, x, l) <= pairwise_bound(a, e) + 1e-12,
              fmt::format("instance {}: F rose from {} to {}", t, pairwise_bound(a, e),
                          pairwise_bound(a, x, l)));
      o.check(round_to_hard(a, assignment_to_schedule(x, l)) == x,
              fmt::format("instance {}: rounding not idempotent", t));
    }
    return o;
  });

  report(4, "linearized program reproduces F on every hard assignment", 20, [] {
    Outcome o;
    const bool bits[2] = {false, true};
    for (bool e1 : bits) {
      for (bool e2 : bits) {
        const double z = verify_gate(e1, e2);
        o.check(z == std::max(double(e1) + double(e2) - 1.0, 0.0),
                fmt::format("gate({}, {}) = {}", e1, e2, z));
      }
    }
    std::mt19937_64 g(5);
    std::size_t points = 0;
    for (std::size_t n = 2; n <= 6; ++n) {
      for (std::size_t l = 1; l <= 3; ++l) {
        const auto a = oracle::random_matrix(n, g);
        const PILPModel m = build_pilp(a, l);
        o.check(m.variables.size() == l * n * n,
                fmt::format("N={} L={}: {} variables, expected {}", n, l, m.variables.size(), l * n * n));
        Assignment x;
        x.channel_of.assign(n, 0);
        for (;;) {
          ++points;
          const auto r = evaluate_pilp_point(m, gate_completion(m, x, l));
          const double f = pairwise_bound(a, x, l);
          o.check(r.feasible, fmt::format("N={} L={}: infeasible point ({})", n, l, r.violation));
          o.check(std::abs(r.objective - f) <= 1e-12,
                  fmt::format("N={} L={}: objective {} vs F {}", n, l, r.objective, f));
          std::size_t i = 0;
          while (i < n && ++x.channel_of[i] == l) x.channel_of[i++] = 0;
          if (i == n) break;
        }
      }
    }
    o.notes.push_back(fmt::format("{} assignments checked", points));
    return o;
  });

  report(5, "trace form equals pairwise bound on 100 random instances", 30, [] {
    Outcome o;
    std::mt19937_64 g(13);
    for (int t = 0; t < 100; ++t) {
      const std::size_t n = 2 + g() % 14;
      const std::size_t l = 1 + g() % 5;
      const auto a = oracle::random_matrix(n, g);
      const auto e = oracle::random_schedule(n, l, g);
      const double f = pairwise_bound(a, e);
      const double tr = trace_objective(a, e);
      o.check(std::abs(tr - f) <= 1e-12 * std::max(std::abs(f), 1e-300),
              fmt::format("instance {}: trace {} vs F {}", t, tr, f));
    }
    return o;
  });

  report(6, "simulation matches quadrature; quadrature monotone in lambda", 120, [] {
    Outcome o;
    const DeviceLayout layout = io::load_layout(oracle::fixture("layout3.csv"));
    const ActivationModel model(3.0);
    const std::uint64_t steps = 1'000'000;
    const auto est = estimate_joint_activation(layout, model, {steps, 2024, 0});
    const auto quad = quadrature_joint_activation(layout, model, 1024);
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t k = 0; k < 3; ++k) {
        const double p = quad(i, k);
        const double se = std::sqrt(p * (1 - p) / static_cast<double>(steps));
        worst = std::max(worst, std::abs(est(i, k) - p) / se);
        o.check(std::abs(est(i, k) - p) <= 3 * se,
                fmt::format("entry ({}, {}): estimate {} vs quadrature {} (se {:.2g})", i, k,
                            est(i, k), p, se));
      }
    }
    o.notes.push_back(fmt::format("largest deviation {:.2f} standard errors", worst));
    Eigen::MatrixXd prev;
    for (int lambda = 1; lambda <= 6; ++lambda) {
      const auto q = quadrature_joint_activation(layout, ActivationModel(lambda), 1024).off_diagonal();
      if (prev.size() != 0) {
        o.check((q.array() >= prev.array()).all(),
                fmt::format("off-diagonal decreased between lambda {} and {}", lambda - 1, lambda));
      }
      prev = q;
    }
    return o;
  });

  BenchRun first;
  report(7, "trends: P_c vs L, P_c vs lambda, exact <= heuristic", 600, [&] {
    Outcome o;
    // (a) exact optimum on every fixture, L = 2..9
    for (const char* name : {"a8.json", "a10.json", "a12.json", "a14.json"}) {
      const auto a = io::load_matrix(oracle::fixture(name));
      SolverOptions opts;
      opts.gap_tolerance = 0.0;
      double prev_pc = INFINITY, prev_f = INFINITY;
      for (std::size_t l = 2; l <= 9; ++l) {
        const auto r = solve_exact(a, l, opts);
        const double pc = network_collision_probability(a, r.assignment, l).network_average;
        o.check(pc <= prev_pc + 1e-12,
                fmt::format("(a) {}: exact P_c rises from {:.6f} to {:.6f} at L={}", name, prev_pc, pc, l));
        if (l > 2) {
          const double cap = prev_f * static_cast<double>(l - 1) / static_cast<double>(l);
          o.check(r.objective <= cap + 1e-12,
                  fmt::format("(a) {}: F*_{} = {:.6f} above F*_{}(L-1)/L = {:.6f}", name, l,
                              r.objective, l - 1, cap));
        }
        prev_pc = pc;
        prev_f = r.objective;
      }
    }

    first = run_bench_suite();
    o.notes.push_back(fmt::format("bench suite {:.1f}s", first.seconds));
    o.check(first.seconds <= 600, "bench suite over 10 minutes");

    auto series = [](const std::vector<bench::CurveRow>& rows, bench::Method m) {
      std::vector<bench::CurveRow> out;
      for (const auto& r : rows) {
        if (r.method == m) out.push_back(r);
      }
      return out;
    };
    const auto exact_l = series(first.vs_l, bench::Method::kExact);
    for (std::size_t k = 1; k < exact_l.size(); ++k) {
      o.check(exact_l[k].p_c <= exact_l[k - 1].p_c + 1e-12,
              fmt::format("(a) vs-L: mean exact P_c rises at L={}", exact_l[k].x));
    }
    // (b) non-decreasing in lambda for every method
    for (const auto m : shipped("vs_lambda.json").methods) {
      const auto s = series(first.vs_lambda, m);
      for (std::size_t k = 1; k < s.size(); ++k) {
        o.check(s[k].p_c + 1e-12 >= s[k - 1].p_c,
                fmt::format("(b) {}: P_c falls from {:.6f} to {:.6f} at lambda={}",
                            bench::to_string(m), s[k - 1].p_c, s[k].p_c, s[k].x));
      }
    }
    // (c) exact <= heuristic pointwise on both curves
    for (const auto* rows : {&first.vs_l, &first.vs_lambda}) {
      const char* axis = rows == &first.vs_l ? "L" : "lambda";
      const auto ex = series(*rows, bench::Method::kExact);
      for (const auto& r : *rows) {
        if (r.method == bench::Method::kExact) continue;
        for (const auto& e : ex) {
          if (e.x != r.x) continue;
          o.check(e.p_c <= r.p_c + 1e-12,
                  fmt::format("(c) {}={}: exact P_c {:.6f} above {} P_c {:.6f} (F {:.6f} vs {:.6f})",
                              axis, r.x, e.p_c, bench::to_string(r.method), r.p_c, e.f, r.f));
        }
      }
    }
    return o;
  });

  report(8, "identical seeds give identical matrices, assignments and CSVs", 600, [&] {
    Outcome o;
    const DeviceLayout layout = generate_layout(12, kDefaultDensity, 31);
    const SimulationSpec spec{100'000, 32, 0};
    const auto a1 = estimate_joint_activation(layout, ActivationModel(3), spec);
    const auto a2 = estimate_joint_activation(generate_layout(12, kDefaultDensity, 31),
                                              ActivationModel(3), spec);
    o.check(io::format_matrix_json(a1) == io::format_matrix_json(a2), "matrices differ");
    SolverOptions opts;
    opts.gap_tolerance = 0.0;
    o.check(io::format_assignment_csv(solve_exact(a1, 3, opts).assignment) ==
                io::format_assignment_csv(solve_exact(a2, 3, opts).assignment),
            "exact assignments differ");
    for (auto m : {ClusteringMethod::kKMedoids, ClusteringMethod::kKMedoidsPlusPlus}) {
      o.check(best_of_restarts(a1, 3, m, 5, 10).assignment ==
                  best_of_restarts(a2, 3, m, 5, 10).assignment,
              fmt::format("{} assignments differ", to_string(m)));
    }
    if (first.outputs.empty()) first = run_bench_suite();
    const BenchRun second = run_bench_suite();
    for (const auto& [name, out] : first.outputs) {
      const std::string x = name == "anytime" ? without_elapsed(out.csv) : out.csv;
      const std::string y =
          name == "anytime" ? without_elapsed(second.outputs.at(name).csv) : second.outputs.at(name).csv;
      o.check(x == y, fmt::format("{} CSV differs between runs", name));
    }
    return o;
  });

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
