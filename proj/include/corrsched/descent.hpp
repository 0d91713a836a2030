#pragma once

#include <cstddef>
#include <vector>

#include "corrsched/model.hpp"

namespace corrsched {

// Per-channel cost of one device against the rest of a schedule:
// costs[j] = sum over k != device of A[device,k] * e[k,j].
// Moving the device's whole probability mass onto channel j changes L*F by
// costs[j] minus its current weighted cost.
struct DeviceChannelCost {
  std::size_t device = 0;
  std::vector<double> costs;
};

DeviceChannelCost device_costs(const JointActivationMatrix& a, const Eigen::MatrixXd& e,
                               std::size_t device);
DeviceChannelCost device_costs(const JointActivationMatrix& a, const ScheduleMatrix& e,
                               std::size_t device);

// Rounds a soft schedule to a hard one without increasing F. Devices are
// visited in ascending order; each soft row is replaced by a one-hot row at
// the argmin of its costs against the current (partly rounded) matrix, ties to
// the lowest channel. Rows that are already one-hot are kept.
Assignment round_to_hard(const JointActivationMatrix& a, const ScheduleMatrix& e);

struct DescentStats {
  std::size_t sweeps = 0;
  std::size_t moves = 0;
};

// Single-device improvement on a hard schedule. A device moves only when its
// argmin channel (lowest index among minimizers) is strictly cheaper than its
// current one. Stops after a sweep with no move, or after max_sweeps sweeps.
Assignment coordinate_descent(const JointActivationMatrix& a, const Assignment& start,
                              std::size_t n_channels, std::size_t max_sweeps = 100,
                              DescentStats* stats = nullptr);

}  // namespace corrsched
