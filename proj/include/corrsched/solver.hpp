#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "corrsched/model.hpp"

namespace corrsched {

inline constexpr double kDefaultGapTolerance = 0.01;
inline constexpr double kGapEpsilon = 1e-12;
// Largest symmetry-reduced search space brute_force() accepts.
inline constexpr double kBruteForceLimit = 1e8;

// Called at every explored node with the partial assignment (kUnassigned for
// devices not yet placed) and the node's lower bound on F.
inline constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
using NodeObserver = std::function<void(std::span<const std::size_t>, double)>;

struct SolverOptions {
  double gap_tolerance = kDefaultGapTolerance;
  std::optional<double> time_limit;  // seconds
  std::optional<std::uint64_t> node_limit;
  std::optional<Assignment> initial_incumbent;
  // Device branching order. Defaults to descending row sums of A.
  std::optional<std::vector<std::size_t>> branching_order;
  NodeObserver on_node;
};

struct IncumbentEntry {
  double elapsed_s = 0.0;
  double objective = 0.0;
};

enum class Termination { kOptimal, kTimeLimit, kNodeLimit };

struct SolverResult {
  Assignment assignment;
  double objective = 0.0;
  double lower_bound = 0.0;
  double gap = 0.0;  // (objective - lower_bound) / max(objective, 1e-12)
  std::uint64_t nodes_explored = 0;
  std::vector<IncumbentEntry> incumbent_log;  // strictly decreasing objectives
  Termination status = Termination::kOptimal;

  bool hit_limit() const { return status != Termination::kOptimal; }
};

// Number of assignments enumerated by brute_force, i.e. set partitions of N
// devices into at most L labelled-by-first-use channels.
double symmetry_reduced_count(std::size_t n, std::size_t n_channels);

// Exhaustive enumeration over restricted-growth assignments (device 0 on
// channel 0; each device uses at most one channel beyond the highest so far).
// Returns the lexicographically smallest optimum. Throws ResourceError when
// the reduced space exceeds kBruteForceLimit.
SolverResult brute_force(const JointActivationMatrix& a, std::size_t n_channels);

// Depth-first branch-and-bound on the assignment formulation.
SolverResult solve_exact(const JointActivationMatrix& a, std::size_t n_channels,
                         const SolverOptions& opts = {});

// Runs solve_exact under `orderings` branching orders (the default order plus
// seeded shuffles) on up to `threads` threads and keeps the best result.
SolverResult solve_portfolio(const JointActivationMatrix& a, std::size_t n_channels,
                             const SolverOptions& opts, std::size_t orderings,
                             unsigned threads, std::uint64_t seed);

// K-Medoids with K-Means++ seeding, polished by coordinate descent, then used
// as the warm start of solve_exact.
SolverResult heuristic_then_exact(const JointActivationMatrix& a, std::size_t n_channels,
                                  SolverOptions opts = {}, std::uint64_t seed = 0);

}  // namespace corrsched
