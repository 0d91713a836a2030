#include "corrsched/objective.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace corrsched {

namespace {

void check_shapes(const JointActivationMatrix& a, const ScheduleMatrix& e) {
  if (a.dim() != e.rows()) {
    throw ShapeError(fmt::format("matrix has {} devices but schedule has {} rows", a.dim(),
                                 e.rows()));
  }
  if (e.cols() == 0) throw ShapeError("schedule has no channels");
}

}  // namespace

double channel_collision_probability(const JointActivationMatrix& a, const ScheduleMatrix& e,
                                     std::size_t channel) {
  check_shapes(a, e);
  if (channel >= e.cols()) {
    throw ValidationError(fmt::format("channel {} out of range [0, {})", channel, e.cols()));
  }
  const std::size_t n = a.dim();
  double log_survival = 0.0;
  for (std::size_t i1 = 0; i1 < n; ++i1) {
    const double e1 = e(i1, channel);
    if (e1 == 0.0) continue;
    for (std::size_t i2 = i1 + 1; i2 < n; ++i2) {
      const double term = a(i1, i2) * e1 * e(i2, channel);
      if (term != 0.0) log_survival += std::log1p(-term);
    }
  }
  return -std::expm1(log_survival);
}

double pairwise_bound(const JointActivationMatrix& a, const ScheduleMatrix& e) {
  check_shapes(a, e);
  const std::size_t n = a.dim();
  const std::size_t l = e.cols();
  double total = 0.0;
  for (std::size_t i1 = 0; i1 < n; ++i1) {
    for (std::size_t i2 = i1 + 1; i2 < n; ++i2) {
      double overlap = 0.0;
      for (std::size_t j = 0; j < l; ++j) overlap += a(i1, i2) * e(i1, j) * e(i2, j);
      total += overlap;
    }
  }
  return total / static_cast<double>(l);
}

double pairwise_bound(const JointActivationMatrix& a, const Assignment& assignment,
                      std::size_t n_channels) {
  if (a.dim() != assignment.size()) {
    throw ShapeError(fmt::format("matrix has {} devices but assignment has {}", a.dim(),
                                 assignment.size()));
  }
  check_assignment(assignment, n_channels);
  return hard_pairwise_bound(a, assignment.channel_of, n_channels);
}

double hard_pairwise_bound(const JointActivationMatrix& a, std::span<const std::size_t> channel_of,
                           std::size_t n_channels) {
  const std::size_t n = channel_of.size();
  double total = 0.0;
  for (std::size_t i1 = 0; i1 < n; ++i1) {
    for (std::size_t i2 = i1 + 1; i2 < n; ++i2) {
      if (channel_of[i1] == channel_of[i2]) total += a(i1, i2);
    }
  }
  return total / static_cast<double>(n_channels);
}

double trace_objective(const JointActivationMatrix& a, const ScheduleMatrix& e) {
  check_shapes(a, e);
  const Eigen::MatrixXd& sched = e.entries();
  const double trace = (sched.transpose() * a.off_diagonal() * sched).trace();
  return trace / (2.0 * static_cast<double>(e.cols()));
}

CollisionReport network_collision_probability(const JointActivationMatrix& a,
                                              const ScheduleMatrix& e) {
  CollisionReport report;
  report.per_channel.reserve(e.cols());
  double sum = 0.0;
  for (std::size_t j = 0; j < e.cols(); ++j) {
    report.per_channel.push_back(channel_collision_probability(a, e, j));
    sum += report.per_channel.back();
  }
  report.network_average = sum / static_cast<double>(e.cols());
  report.pairwise_bound = pairwise_bound(a, e);
  return report;
}

CollisionReport network_collision_probability(const JointActivationMatrix& a,
                                              const Assignment& assignment,
                                              std::size_t n_channels) {
  return network_collision_probability(a, assignment_to_schedule(assignment, n_channels));
}

EmpiricalCollisionRates monte_carlo_collision_rate(const DeviceLayout& layout,
                                                   const ActivationModel& model,
                                                   const Assignment& assignment,
                                                   std::size_t n_channels,
                                                   std::uint64_t rounds, std::uint64_t seed) {
  if (assignment.size() != layout.size()) {
    throw ShapeError("assignment and layout disagree on the device count");
  }
  if (rounds == 0) throw ValidationError("rounds must be at least 1");
  check_assignment(assignment, n_channels);

  std::vector<std::uint64_t> collisions(n_channels, 0);
  std::vector<std::size_t> active_on(n_channels, 0);
  for (std::uint64_t k = 0; k < rounds; ++k) {
    Rng rng = Rng::stream(seed, k);
    std::fill(active_on.begin(), active_on.end(), 0);
    for (const std::size_t i : activation_round(layout, model, rng)) {
      ++active_on[assignment.channel_of[i]];
    }
    for (std::size_t j = 0; j < n_channels; ++j) {
      if (active_on[j] >= 2) ++collisions[j];
    }
  }

  EmpiricalCollisionRates out;
  out.rounds = rounds;
  double sum = 0.0;
  for (std::size_t j = 0; j < n_channels; ++j) {
    out.per_channel.push_back(static_cast<double>(collisions[j]) / static_cast<double>(rounds));
    sum += out.per_channel.back();
  }
  out.network_average = sum / static_cast<double>(n_channels);
  return out;
}

}  // namespace corrsched
