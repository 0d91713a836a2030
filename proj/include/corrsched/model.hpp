#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "corrsched/errors.hpp"

namespace corrsched {

// Absolute tolerance on schedule row sums.
inline constexpr double kRowSumTolerance = 1e-9;

struct NetworkConfig {
  std::size_t n_devices = 1;
  std::size_t n_channels = 1;

  NetworkConfig(std::size_t devices, std::size_t channels);

  // True when L >= N, where every device can get its own channel.
  bool trivially_separable() const { return n_channels >= n_devices; }
};

// Symmetric N x N matrix of pairwise joint activation probabilities.
//
// Off-diagonal entry (i, k) is the probability that devices i and k are
// active in the same time step. The diagonal holds each device's marginal
// activation probability; it is informational and never enters an objective.
//
// Construction only checks that the matrix is square. Use validate_matrix()
// or JointActivationMatrix::checked() to enforce the probability invariants.
// A matrix whose diagonal is all zero is treated as having no marginals.
class JointActivationMatrix {
 public:
  JointActivationMatrix() = default;
  explicit JointActivationMatrix(Eigen::MatrixXd entries);

  // Throws ValidationError listing the first violation if any invariant fails.
  static JointActivationMatrix checked(Eigen::MatrixXd entries);

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  double operator()(std::size_t i, std::size_t k) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  }
  double marginal(std::size_t i) const { return (*this)(i, i); }
  const Eigen::MatrixXd& entries() const { return entries_; }

  // Copy with the diagonal set to zero.
  Eigen::MatrixXd off_diagonal() const;

 private:
  Eigen::MatrixXd entries_;
};

// N x L row-stochastic matrix of channel-selection probabilities.
class ScheduleMatrix {
 public:
  ScheduleMatrix() = default;
  // Throws ValidationError naming the offending row when an entry is outside
  // [0, 1] or a row does not sum to 1 within kRowSumTolerance.
  explicit ScheduleMatrix(Eigen::MatrixXd entries);

  std::size_t rows() const { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(entries_.cols()); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& entries() const { return entries_; }

  // Every entry is exactly 0 or 1.
  bool is_hard() const;

 private:
  Eigen::MatrixXd entries_;
};

// Hard schedule: one 0-based channel index per device.
struct Assignment {
  std::vector<std::size_t> channel_of;

  std::size_t size() const { return channel_of.size(); }
  bool operator==(const Assignment&) const = default;
};

struct CollisionReport {
  std::vector<double> per_channel;  // P_j
  double network_average = 0.0;     // P_c
  double pairwise_bound = 0.0;      // F(E), unclamped
};

struct Violation {
  std::size_t row = 0;
  std::size_t col = 0;
  std::string rule;  // "range", "symmetry", "consistency"
  std::string message;
};

// Lists every invariant violation of `a`. Each unordered pair is reported at
// most once per rule, at (min, max) index order.
std::vector<Violation> validate_matrix(const JointActivationMatrix& a);

ScheduleMatrix assignment_to_schedule(const Assignment& a, std::size_t n_channels);

// Requires a binary schedule with unit row sums.
Assignment schedule_to_assignment(const ScheduleMatrix& e);

// Throws ValidationError if any channel index is >= n_channels.
void check_assignment(const Assignment& a, std::size_t n_channels);

// Devices on each channel; the lists partition {0..N-1}.
std::vector<std::vector<std::size_t>> channel_members(const Assignment& a,
                                                      std::size_t n_channels);

}  // namespace corrsched
