#include "corrsched/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "corrsched/descent.hpp"
#include "corrsched/heuristics.hpp"
#include "corrsched/objective.hpp"
#include "corrsched/rng.hpp"

namespace corrsched {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double gap_of(double objective, double lower_bound) {
  return (objective - lower_bound) / std::max(objective, kGapEpsilon);
}

std::vector<std::size_t> default_order(const JointActivationMatrix& a) {
  const std::size_t n = a.dim();
  std::vector<double> weight(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) weight[i] += a(i, k);
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return weight[x] > weight[y]; });
  return order;
}

void check_order(const std::vector<std::size_t>& order, std::size_t n) {
  std::vector<bool> seen(n, false);
  if (order.size() != n) throw ValidationError("branching order must list every device once");
  for (const std::size_t i : order) {
    if (i >= n || seen[i]) throw ValidationError("branching order must list every device once");
    seen[i] = true;
  }
}

// Depth-first search over partial assignments in branching order.
class BranchAndBound {
 public:
  BranchAndBound(const JointActivationMatrix& a, std::size_t n_channels,
                 const SolverOptions& opts, std::vector<std::size_t> order)
      : a_(a),
        n_(a.dim()),
        l_(n_channels),
        opts_(opts),
        order_(std::move(order)),
        channel_of_(n_, kUnassigned),
        load_(n_ + 1, std::vector<double>(n_ * n_channels, 0.0)),
        start_(Clock::now()) {}

  SolverResult run() {
    if (opts_.initial_incumbent) {
      const Assignment& warm = *opts_.initial_incumbent;
      if (warm.size() != n_) throw ShapeError("initial incumbent has the wrong device count");
      check_assignment(warm, l_);
      offer(warm.channel_of);
    }
    dfs(0, 0, 0.0);
    if (best_.empty()) offer(greedy());

    SolverResult out;
    out.assignment.channel_of = best_;
    out.objective = incumbent_;
    out.nodes_explored = nodes_;
    out.incumbent_log = std::move(log_);
    out.status = status_;
    out.lower_bound = std::min({incumbent_, pruned_min_, open_min_});
    out.gap = gap_of(out.objective, out.lower_bound);
    return out;
  }

 private:
  double* load_row(std::size_t level, std::size_t device) {
    return load_[level].data() + device * l_;
  }

  void offer(const std::vector<std::size_t>& candidate) {
    const double f = hard_pairwise_bound(a_, candidate, l_);
    if (best_.empty() || f < incumbent_) {
      incumbent_ = f;
      best_ = candidate;
      log_.push_back({seconds_since(start_), f});
    }
  }

  // Stopped before the first leaf: place devices in branching order on their
  // cheapest channel so a limit still returns a feasible assignment.
  std::vector<std::size_t> greedy() const {
    std::vector<std::size_t> channel_of(n_, kUnassigned);
    std::vector<double> load(n_ * l_, 0.0);
    for (const std::size_t device : order_) {
      const double* row = load.data() + device * l_;
      const std::size_t j = static_cast<std::size_t>(std::min_element(row, row + l_) - row);
      channel_of[device] = j;
      for (std::size_t k = 0; k < n_; ++k) {
        if (k != device) load[k * l_ + j] += a_(k, device);
      }
    }
    return channel_of;
  }

  bool limit_reached() {
    if (opts_.node_limit && nodes_ >= *opts_.node_limit) {
      status_ = Termination::kNodeLimit;
      return true;
    }
    if (opts_.time_limit && (nodes_ & 1023) == 0 && seconds_since(start_) >= *opts_.time_limit) {
      status_ = Termination::kTimeLimit;
      return true;
    }
    return false;
  }

  // Lower bound on F over completions of the first `depth` devices in order.
  double node_bound(std::size_t depth, std::size_t opened, double cost) {
    double sum = cost;
    if (opened >= l_) {
      for (std::size_t p = depth; p < n_; ++p) {
        const double* row = load_row(depth, order_[p]);
        sum += *std::min_element(row, row + l_);
      }
    }
    return sum / static_cast<double>(l_);
  }

  void dfs(std::size_t depth, std::size_t opened, double cost) {
    ++nodes_;
    const double bound = node_bound(depth, opened, cost);
    if (opts_.on_node) opts_.on_node(channel_of_, bound);
    if (depth == n_) {
      offer(channel_of_);
      return;
    }
    if (!best_.empty() && bound >= incumbent_ * (1.0 - opts_.gap_tolerance)) {
      pruned_min_ = std::min(pruned_min_, bound);
      return;
    }
    if (aborted_ || limit_reached()) {
      aborted_ = true;
      open_min_ = std::min(open_min_, bound);
      return;
    }

    const std::size_t device = order_[depth];
    const double* row = load_row(depth, device);
    const std::size_t max_channel = std::min(opened, l_ - 1);
    std::vector<std::size_t> children(max_channel + 1);
    std::iota(children.begin(), children.end(), 0);
    std::stable_sort(children.begin(), children.end(),
                     [&](std::size_t x, std::size_t y) { return row[x] < row[y]; });

    for (const std::size_t j : children) {
      if (aborted_) {
        open_min_ = std::min(open_min_, bound);
        break;
      }
      const double step = row[j];
      load_[depth + 1] = load_[depth];
      for (std::size_t k = 0; k < n_; ++k) {
        if (k != device) load_row(depth + 1, k)[j] += a_(k, device);
      }
      channel_of_[device] = j;
      dfs(depth + 1, std::max(opened, j + 1), cost + step);
      channel_of_[device] = kUnassigned;
    }
  }

  const JointActivationMatrix& a_;
  std::size_t n_;
  std::size_t l_;
  const SolverOptions& opts_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> channel_of_;
  // load_[depth][k * L + j]: sum of A[k, m] over devices m placed on channel j
  // among the first `depth` devices in branching order.
  std::vector<std::vector<double>> load_;
  Clock::time_point start_;

  std::vector<std::size_t> best_;
  double incumbent_ = std::numeric_limits<double>::infinity();
  double pruned_min_ = std::numeric_limits<double>::infinity();
  double open_min_ = std::numeric_limits<double>::infinity();
  std::uint64_t nodes_ = 0;
  std::vector<IncumbentEntry> log_;
  Termination status_ = Termination::kOptimal;
  bool aborted_ = false;
};

// Stirling numbers of the second kind, summed for k = 1..min(n, L).
double stirling_partition_count(std::size_t n, std::size_t l) {
  std::vector<double> row(l + 1, 0.0);
  row[0] = 1.0;  // S(0, 0)
  for (std::size_t m = 1; m <= n; ++m) {
    for (std::size_t k = std::min(m, l); k >= 1; --k) {
      row[k] = static_cast<double>(k) * row[k] + row[k - 1];
    }
    row[0] = 0.0;
  }
  double total = 0.0;
  for (std::size_t k = 1; k <= l; ++k) total += row[k];
  return total;
}

}  // namespace

double symmetry_reduced_count(std::size_t n, std::size_t n_channels) {
  if (n == 0) return 1.0;
  return stirling_partition_count(n, n_channels);
}

SolverResult brute_force(const JointActivationMatrix& a, std::size_t n_channels) {
  if (n_channels == 0) throw ValidationError("n_channels must be at least 1");
  const std::size_t n = a.dim();
  const double count = symmetry_reduced_count(n, n_channels);
  if (count > kBruteForceLimit) {
    throw ResourceError(fmt::format(
        "brute force over {} devices and {} channels needs {:.3g} evaluations (limit {:.0e})", n,
        n_channels, count, kBruteForceLimit));
  }
  const auto start = Clock::now();
  SolverResult out;
  if (n == 0) return out;

  // Restricted-growth strings in lexicographic order; incremental pair cost
  // filters leaves before the canonical evaluation.
  std::vector<std::size_t> channel_of(n, 0);
  std::vector<std::size_t> highest(n, 0);  // highest channel among devices 0..i
  std::vector<double> partial(n + 1, 0.0);
  double best_f = std::numeric_limits<double>::infinity();
  double best_partial = std::numeric_limits<double>::infinity();
  std::uint64_t leaves = 0;

  auto extend = [&](std::size_t i) {
    double add = 0.0;
    for (std::size_t k = 0; k < i; ++k) {
      if (channel_of[k] == channel_of[i]) add += a(k, i);
    }
    partial[i + 1] = partial[i] + add;
    highest[i] = i == 0 ? channel_of[i] : std::max(highest[i - 1], channel_of[i]);
  };
  for (std::size_t i = 0; i < n; ++i) extend(i);

  while (true) {
    ++leaves;
    const double p = partial[n];
    if (p <= best_partial * (1.0 + 1e-9) + 1e-300) {
      const double f = hard_pairwise_bound(a, channel_of, n_channels);
      if (f < best_f) {
        best_f = f;
        best_partial = std::min(best_partial, p);
        out.assignment.channel_of = channel_of;
        out.incumbent_log.push_back({seconds_since(start), f});
      }
    }
    // Next restricted-growth string.
    std::size_t i = n;
    while (i-- > 1) {
      const std::size_t cap = std::min(highest[i - 1] + 1, n_channels - 1);
      if (channel_of[i] < cap) break;
    }
    if (i == 0 || i >= n) break;
    ++channel_of[i];
    extend(i);
    for (std::size_t k = i + 1; k < n; ++k) {
      channel_of[k] = 0;
      extend(k);
    }
  }

  out.objective = best_f;
  out.lower_bound = best_f;
  out.gap = 0.0;
  out.nodes_explored = leaves;
  return out;
}

SolverResult solve_exact(const JointActivationMatrix& a, std::size_t n_channels,
                         const SolverOptions& opts) {
  if (n_channels == 0) throw ValidationError("n_channels must be at least 1");
  if (!(opts.gap_tolerance >= 0.0)) throw ValidationError("gap_tolerance must be non-negative");
  const std::size_t n = a.dim();
  if (n == 0) return {};
  std::vector<std::size_t> order = opts.branching_order ? *opts.branching_order : default_order(a);
  check_order(order, n);
  return BranchAndBound(a, n_channels, opts, std::move(order)).run();
}

SolverResult solve_portfolio(const JointActivationMatrix& a, std::size_t n_channels,
                             const SolverOptions& opts, std::size_t orderings,
                             unsigned threads, std::uint64_t seed) {
  orderings = std::max<std::size_t>(orderings, 1);
  std::vector<std::vector<std::size_t>> orders;
  orders.push_back(opts.branching_order ? *opts.branching_order : default_order(a));
  for (std::size_t r = 1; r < orderings; ++r) {
    auto order = orders.front();
    Rng rng(derive_seed(seed, r));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    orders.push_back(std::move(order));
  }

  std::vector<SolverResult> results(orders.size());
  auto run = [&](std::size_t r) {
    SolverOptions local = opts;
    local.branching_order = orders[r];
    local.on_node = nullptr;
    results[r] = solve_exact(a, n_channels, local);
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(orders.size())));
  if (threads == 1) {
    for (std::size_t r = 0; r < orders.size(); ++r) run(r);
  } else {
    for (std::size_t base = 0; base < orders.size(); base += threads) {
      std::vector<std::jthread> pool;
      for (std::size_t r = base; r < std::min(orders.size(), base + threads); ++r) {
        pool.emplace_back(run, r);
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    if (results[r].objective < results[best].objective) best = r;
  }
  SolverResult out = results[best];
  // Any run that finished proves its own bound; the tightest one is valid for all.
  for (const auto& r : results) out.lower_bound = std::max(out.lower_bound, r.lower_bound);
  out.lower_bound = std::min(out.lower_bound, out.objective);
  out.gap = gap_of(out.objective, out.lower_bound);
  return out;
}

SolverResult heuristic_then_exact(const JointActivationMatrix& a, std::size_t n_channels,
                                  SolverOptions opts, std::uint64_t seed) {
  const std::size_t n = a.dim();
  Assignment warm;
  if (n_channels >= n) {
    warm.channel_of.resize(n);
    std::iota(warm.channel_of.begin(), warm.channel_of.end(), 0);
  } else {
    warm = kmedoids_pp(a, n_channels, seed).assignment;
    warm = coordinate_descent(a, warm, n_channels);
  }
  opts.initial_incumbent = std::move(warm);
  return solve_exact(a, n_channels, opts);
}

}  // namespace corrsched
