#include "corrsched/heuristics.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "corrsched/objective.hpp"
#include "corrsched/rng.hpp"

namespace corrsched {

namespace {

constexpr std::uint64_t kUniformInitSalt = 0x4B4D45444F494453ULL;
constexpr std::uint64_t kPlusPlusSalt = 0x4B4D45414E53502BULL;

double dissimilarity(const JointActivationMatrix& a, Dissimilarity d, std::size_t i,
                     std::size_t k) {
  if (i == k) return 0.0;
  return d == Dissimilarity::kJointActivation ? a(i, k) : 1.0 - a(i, k);
}

void check_sizes(std::size_t n, std::size_t n_channels) {
  if (n_channels == 0) throw ValidationError("n_channels must be at least 1");
  if (n_channels > n) {
    throw ValidationError(
        fmt::format("cannot pick {} medoids from {} devices", n_channels, n));
  }
}

}  // namespace

Dissimilarity parse_dissimilarity(std::string_view name) {
  if (name == "A") return Dissimilarity::kJointActivation;
  if (name == "one-minus-A") return Dissimilarity::kOneMinusJointActivation;
  throw ValidationError(fmt::format("unknown dissimilarity '{}'", name));
}

ClusteringMethod parse_clustering_method(std::string_view name) {
  if (name == "kmedoids") return ClusteringMethod::kKMedoids;
  if (name == "kmedoids-pp") return ClusteringMethod::kKMedoidsPlusPlus;
  throw ValidationError(fmt::format("unknown clustering method '{}'", name));
}

std::string_view to_string(ClusteringMethod method) {
  return method == ClusteringMethod::kKMedoids ? "kmedoids" : "kmedoids-pp";
}

std::vector<std::size_t> uniform_init(std::size_t n, std::size_t n_channels, std::uint64_t seed) {
  check_sizes(n, n_channels);
  Rng rng(mix64(seed ^ kUniformInitSalt));
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  // Partial Fisher-Yates.
  for (std::size_t j = 0; j < n_channels; ++j) {
    std::swap(pool[j], pool[j + rng.below(n - j)]);
  }
  pool.resize(n_channels);
  return pool;
}

std::vector<std::size_t> kmeanspp_init(const JointActivationMatrix& a, std::size_t n_channels,
                                       std::uint64_t seed, Dissimilarity d) {
  const std::size_t n = a.dim();
  check_sizes(n, n_channels);
  Rng rng(mix64(seed ^ kPlusPlusSalt));
  std::vector<std::size_t> medoids{rng.below(n)};
  std::vector<bool> chosen(n, false);
  chosen[medoids.front()] = true;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

  while (medoids.size() < n_channels) {
    const std::size_t last = medoids.back();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], dissimilarity(a, d, i, last));
      if (!chosen[i]) total += nearest[i] * nearest[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        const double w = nearest[i] * nearest[i];
        if (w == 0.0) continue;
        acc += w;
        pick = i;
        if (target < acc) break;
      }
    } else {
      std::size_t slot = rng.below(n - medoids.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        if (slot == 0) {
          pick = i;
          break;
        }
        --slot;
      }
    }
    chosen[pick] = true;
    medoids.push_back(pick);
  }
  return medoids;
}

ClusteringResult kmedoids_from(const JointActivationMatrix& a, std::vector<std::size_t> medoids,
                               std::size_t max_iter, Dissimilarity d) {
  const std::size_t n = a.dim();
  const std::size_t l = medoids.size();
  check_sizes(n, l);
  {
    auto sorted = medoids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.back() >= n) {
      throw ValidationError("medoids must be distinct device indices");
    }
  }

  MedoidState state;
  state.assignment.channel_of.assign(n, 0);

  auto assign_step = [&] {
    // Lowest-index medoid wins ties.
    std::vector<std::size_t> slot_order(l);
    for (std::size_t j = 0; j < l; ++j) slot_order[j] = j;
    std::sort(slot_order.begin(), slot_order.end(),
              [&](std::size_t x, std::size_t y) { return medoids[x] < medoids[y]; });
    std::vector<std::size_t> own_slot(n, l);
    for (std::size_t j = 0; j < l; ++j) own_slot[medoids[j]] = j;

    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (own_slot[i] != l) {
        state.assignment.channel_of[i] = own_slot[i];
        continue;
      }
      std::size_t best = slot_order.front();
      double best_d = dissimilarity(a, d, i, medoids[best]);
      for (const std::size_t j : slot_order) {
        const double dij = dissimilarity(a, d, i, medoids[j]);
        if (dij < best_d) {
          best = j;
          best_d = dij;
        }
      }
      state.assignment.channel_of[i] = best;
      cost += best_d;
    }
    state.cost = cost;
    state.cost_history.push_back(cost);
  };

  for (std::size_t sweep = 0; sweep < std::max<std::size_t>(max_iter, 1); ++sweep) {
    ++state.sweeps;
    assign_step();
    bool changed = false;
    const auto members = channel_members(state.assignment, l);
    for (std::size_t j = 0; j < l; ++j) {
      auto within = [&](std::size_t c) {
        double s = 0.0;
        for (const std::size_t k : members[j]) s += dissimilarity(a, d, c, k);
        return s;
      };
      double best = within(medoids[j]);
      std::size_t best_member = medoids[j];
      for (const std::size_t c : members[j]) {  // ascending device order
        const double s = within(c);
        if (s < best) {
          best = s;
          best_member = c;
        }
      }
      if (best_member != medoids[j]) {
        medoids[j] = best_member;
        changed = true;
      }
    }
    if (!changed) break;
    if (sweep + 1 == max_iter) assign_step();
  }
  state.medoids = std::move(medoids);
  ClusteringResult out{state.assignment, std::move(state)};
  return out;
}

ClusteringResult kmedoids(const JointActivationMatrix& a, std::size_t n_channels,
                          std::uint64_t seed, std::size_t max_iter, Dissimilarity d) {
  return kmedoids_from(a, uniform_init(a.dim(), n_channels, seed), max_iter, d);
}

ClusteringResult kmedoids_pp(const JointActivationMatrix& a, std::size_t n_channels,
                             std::uint64_t seed, std::size_t max_iter, Dissimilarity d) {
  return kmedoids_from(a, kmeanspp_init(a, n_channels, seed, d), max_iter, d);
}

ClusteringResult best_of_restarts(const JointActivationMatrix& a, std::size_t n_channels,
                                  ClusteringMethod method, std::uint64_t seed,
                                  std::size_t restarts, std::size_t max_iter, Dissimilarity d) {
  if (restarts == 0) throw ValidationError("restarts must be at least 1");
  std::optional<ClusteringResult> best;
  double best_f = 0.0;
  for (std::size_t r = 0; r < restarts; ++r) {
    const std::uint64_t run_seed = restarts == 1 ? seed : derive_seed(seed, r);
    ClusteringResult run = method == ClusteringMethod::kKMedoids
                               ? kmedoids(a, n_channels, run_seed, max_iter, d)
                               : kmedoids_pp(a, n_channels, run_seed, max_iter, d);
    const double f = pairwise_bound(a, run.assignment, n_channels);
    if (!best || f < best_f) {
      best = std::move(run);
      best_f = f;
    }
  }
  return std::move(*best);
}

}  // namespace corrsched
