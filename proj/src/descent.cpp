#include "corrsched/descent.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace corrsched {

namespace {

std::size_t lowest_argmin(const std::vector<double>& costs) {
  return static_cast<std::size_t>(std::min_element(costs.begin(), costs.end()) -
                                  costs.begin());
}

bool row_is_one_hot(const Eigen::MatrixXd& e, Eigen::Index i) {
  Eigen::Index ones = 0;
  for (Eigen::Index j = 0; j < e.cols(); ++j) {
    if (e(i, j) == 1.0) {
      ++ones;
    } else if (e(i, j) != 0.0) {
      return false;
    }
  }
  return ones == 1;
}

}  // namespace

DeviceChannelCost device_costs(const JointActivationMatrix& a, const Eigen::MatrixXd& e,
                               std::size_t device) {
  const std::size_t n = a.dim();
  if (static_cast<std::size_t>(e.rows()) != n) {
    throw ShapeError(fmt::format("matrix has {} devices but schedule has {} rows", n, e.rows()));
  }
  if (device >= n) throw ValidationError(fmt::format("device {} out of range", device));
  DeviceChannelCost out{device, std::vector<double>(static_cast<std::size_t>(e.cols()), 0.0)};
  for (std::size_t k = 0; k < n; ++k) {
    if (k == device) continue;
    const double weight = a(device, k);
    if (weight == 0.0) continue;
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
      out.costs[static_cast<std::size_t>(j)] += weight * e(static_cast<Eigen::Index>(k), j);
    }
  }
  return out;
}

DeviceChannelCost device_costs(const JointActivationMatrix& a, const ScheduleMatrix& e,
                               std::size_t device) {
  return device_costs(a, e.entries(), device);
}

Assignment round_to_hard(const JointActivationMatrix& a, const ScheduleMatrix& e) {
  Eigen::MatrixXd work = e.entries();
  Assignment out;
  out.channel_of.resize(e.rows());
  for (std::size_t i = 0; i < e.rows(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    if (row_is_one_hot(work, row)) {
      Eigen::Index j = 0;
      work.row(row).maxCoeff(&j);
      out.channel_of[i] = static_cast<std::size_t>(j);
      continue;
    }
    const std::size_t best = lowest_argmin(device_costs(a, work, i).costs);
    work.row(row).setZero();
    work(row, static_cast<Eigen::Index>(best)) = 1.0;
    out.channel_of[i] = best;
  }
  return out;
}

Assignment coordinate_descent(const JointActivationMatrix& a, const Assignment& start,
                              std::size_t n_channels, std::size_t max_sweeps,
                              DescentStats* stats) {
  const std::size_t n = a.dim();
  if (start.size() != n) {
    throw ShapeError(fmt::format("matrix has {} devices but assignment has {}", n, start.size()));
  }
  check_assignment(start, n_channels);

  Assignment current = start;
  DescentStats local;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    ++local.sweeps;
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> costs(n_channels, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        if (k != i) costs[current.channel_of[k]] += a(i, k);
      }
      const std::size_t best = lowest_argmin(costs);
      if (costs[best] < costs[current.channel_of[i]]) {
        current.channel_of[i] = best;
        ++local.moves;
        moved = true;
      }
    }
    if (!moved) break;
  }
  if (stats != nullptr) *stats = local;
  return current;
}

}  // namespace corrsched
