#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "corrsched/model.hpp"

namespace corrsched {

// Dissimilarity between devices i != k used by the medoid heuristics. Low
// joint activation means "close": such devices may share a channel.
enum class Dissimilarity { kJointActivation, kOneMinusJointActivation };

Dissimilarity parse_dissimilarity(std::string_view name);  // "A" | "one-minus-A"

enum class ClusteringMethod { kKMedoids, kKMedoidsPlusPlus };

ClusteringMethod parse_clustering_method(std::string_view name);  // "kmedoids" | "kmedoids-pp"
std::string_view to_string(ClusteringMethod method);

inline constexpr std::size_t kDefaultMaxIter = 100;

struct MedoidState {
  std::vector<std::size_t> medoids;  // medoids[j] is the medoid of channel j
  Assignment assignment;
  double cost = 0.0;                 // sum_i d(i, medoid of i)
  std::size_t sweeps = 0;
  std::vector<double> cost_history;  // cost after each assignment step
};

struct ClusteringResult {
  Assignment assignment;
  MedoidState state;
};

// K-Means++ seeding. First medoid uniform; each further medoid drawn with
// probability proportional to D(i)^2, D(i) being the dissimilarity to the
// nearest chosen medoid; uniform over unchosen devices when all D(i) are 0.
std::vector<std::size_t> kmeanspp_init(const JointActivationMatrix& a, std::size_t n_channels,
                                       std::uint64_t seed,
                                       Dissimilarity d = Dissimilarity::kJointActivation);

// L distinct devices drawn uniformly at random.
std::vector<std::size_t> uniform_init(std::size_t n, std::size_t n_channels, std::uint64_t seed);

// Alternating K-Medoids from the given medoids. Assignment step: nearest
// medoid, ties to the lowest-index medoid; a medoid always keeps itself.
// Update step: a member replaces its cluster's medoid only if its summed
// dissimilarity to the cluster is strictly smaller (lowest index among the
// best). Stops when no medoid changes or after max_iter sweeps.
ClusteringResult kmedoids_from(const JointActivationMatrix& a, std::vector<std::size_t> medoids,
                               std::size_t max_iter = kDefaultMaxIter,
                               Dissimilarity d = Dissimilarity::kJointActivation);

ClusteringResult kmedoids(const JointActivationMatrix& a, std::size_t n_channels,
                          std::uint64_t seed, std::size_t max_iter = kDefaultMaxIter,
                          Dissimilarity d = Dissimilarity::kJointActivation);

ClusteringResult kmedoids_pp(const JointActivationMatrix& a, std::size_t n_channels,
                             std::uint64_t seed, std::size_t max_iter = kDefaultMaxIter,
                             Dissimilarity d = Dissimilarity::kJointActivation);

// Runs `restarts` seeded runs (seed derived per restart) and keeps the one
// with the smallest pairwise bound F, earliest restart on ties.
ClusteringResult best_of_restarts(const JointActivationMatrix& a, std::size_t n_channels,
                                  ClusteringMethod method, std::uint64_t seed,
                                  std::size_t restarts, std::size_t max_iter = kDefaultMaxIter,
                                  Dissimilarity d = Dissimilarity::kJointActivation);

}  // namespace corrsched
