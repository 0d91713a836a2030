#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "corrsched/model.hpp"
#include "corrsched/sim.hpp"

namespace corrsched {

// P_j = 1 - prod over pairs i1 < i2 of (1 - A[i1,i2] e[i1,j] e[i2,j]).
// Evaluated as -expm1(sum log1p(-term)).
double channel_collision_probability(const JointActivationMatrix& a, const ScheduleMatrix& e,
                                     std::size_t channel);

// Per-channel P_j, their mean P_c, and the pairwise bound F(E).
CollisionReport network_collision_probability(const JointActivationMatrix& a,
                                              const ScheduleMatrix& e);
CollisionReport network_collision_probability(const JointActivationMatrix& a,
                                              const Assignment& assignment,
                                              std::size_t n_channels);

// F(E) = (1/L) sum_j sum_{i1<i2} A[i1,i2] e[i1,j] e[i2,j]. May exceed 1.
// Summed pair by pair (i1, i2 lexicographic) with the channel sum innermost,
// so relabelling channels never changes the result.
double pairwise_bound(const JointActivationMatrix& a, const ScheduleMatrix& e);

// F for a hard schedule. Sums in the same order as the soft overload, so
// pairwise_bound(a, x, L) == pairwise_bound(a, assignment_to_schedule(x, L))
// bit for bit.
double pairwise_bound(const JointActivationMatrix& a, const Assignment& assignment,
                      std::size_t n_channels);

// Unchecked hard-schedule F used in inner loops; same summation order.
double hard_pairwise_bound(const JointActivationMatrix& a, std::span<const std::size_t> channel_of,
                           std::size_t n_channels);

// (1/2L) Tr(E^T Â E), Â = A with zero diagonal.
double trace_objective(const JointActivationMatrix& a, const ScheduleMatrix& e);

struct EmpiricalCollisionRates {
  std::vector<double> per_channel;
  double network_average = 0.0;
  std::uint64_t rounds = 0;
};

// Simulates alarm rounds and counts, per channel, the rounds in which at
// least two assigned devices were active. Round k uses Rng::stream(seed, k).
EmpiricalCollisionRates monte_carlo_collision_rate(const DeviceLayout& layout,
                                                   const ActivationModel& model,
                                                   const Assignment& assignment,
                                                   std::size_t n_channels,
                                                   std::uint64_t rounds, std::uint64_t seed);

}  // namespace corrsched
