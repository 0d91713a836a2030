#include "corrsched/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace corrsched {

namespace {

bool is_probability(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

}  // namespace

NetworkConfig::NetworkConfig(std::size_t devices, std::size_t channels)
    : n_devices(devices), n_channels(channels) {
  if (devices == 0) throw ValidationError("n_devices must be at least 1");
  if (channels == 0) throw ValidationError("n_channels must be at least 1");
}

JointActivationMatrix::JointActivationMatrix(Eigen::MatrixXd entries)
    : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw ShapeError(fmt::format("joint activation matrix must be square, got {}x{}",
                                 entries_.rows(), entries_.cols()));
  }
}

JointActivationMatrix JointActivationMatrix::checked(Eigen::MatrixXd entries) {
  JointActivationMatrix a(std::move(entries));
  auto violations = validate_matrix(a);
  if (!violations.empty()) throw ValidationError(violations.front().message);
  return a;
}

Eigen::MatrixXd JointActivationMatrix::off_diagonal() const {
  Eigen::MatrixXd hat = entries_;
  hat.diagonal().setZero();
  return hat;
}

ScheduleMatrix::ScheduleMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      const double x = entries_(i, j);
      if (!is_probability(x)) {
        throw ValidationError(fmt::format(
            "schedule row {}: entry {} = {} is not a probability in [0, 1]", i, j, x));
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ValidationError(
          fmt::format("schedule row {}: entries sum to {:.17g}, expected 1", i, sum));
    }
  }
}

bool ScheduleMatrix::is_hard() const {
  return (entries_.array() == 0.0 || entries_.array() == 1.0).all();
}

std::vector<Violation> validate_matrix(const JointActivationMatrix& a) {
  std::vector<Violation> out;
  const std::size_t n = a.dim();
  // An all-zero diagonal carries no marginals; the consistency rule is skipped.
  const bool has_marginals = n > 0 && (a.entries().diagonal().array() != 0.0).any();
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_probability(a(i, i))) {
      out.push_back({i, i, "range",
                     fmt::format("entry ({}, {}) = {} is not a probability in [0, 1]", i, i,
                                 a(i, i))});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const double upper = a(i, k);
      const double lower = a(k, i);
      if (!is_probability(upper) || !is_probability(lower)) {
        out.push_back({i, k, "range",
                       fmt::format("entry ({}, {}) = {} / ({}, {}) = {} is not a probability "
                                   "in [0, 1]",
                                   i, k, upper, k, i, lower)});
        continue;
      }
      if (upper != lower) {
        out.push_back({i, k, "symmetry",
                       fmt::format("entry ({}, {}) = {} differs from ({}, {}) = {}", i, k,
                                   upper, k, i, lower)});
      }
      const double marginal = std::min(a(i, i), a(k, k));
      if (has_marginals && std::max(upper, lower) > marginal) {
        out.push_back({i, k, "consistency",
                       fmt::format("joint entry ({}, {}) = {} exceeds marginal {}", i, k,
                                   std::max(upper, lower), marginal)});
      }
    }
  }
  return out;
}

void check_assignment(const Assignment& a, std::size_t n_channels) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.channel_of[i] >= n_channels) {
      throw ValidationError(fmt::format("device {} assigned to channel {}, but only {} channels",
                                        i, a.channel_of[i], n_channels));
    }
  }
}

ScheduleMatrix assignment_to_schedule(const Assignment& a, std::size_t n_channels) {
  check_assignment(a, n_channels);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.size()),
                                            static_cast<Eigen::Index>(n_channels));
  for (std::size_t i = 0; i < a.size(); ++i) {
    e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a.channel_of[i])) = 1.0;
  }
  return ScheduleMatrix(std::move(e));
}

Assignment schedule_to_assignment(const ScheduleMatrix& e) {
  Assignment out;
  out.channel_of.resize(e.rows());
  for (std::size_t i = 0; i < e.rows(); ++i) {
    std::size_t ones = 0;
    for (std::size_t j = 0; j < e.cols(); ++j) {
      const double x = e(i, j);
      if (x == 1.0) {
        out.channel_of[i] = j;
        ++ones;
      } else if (x != 0.0) {
        ones = 2;
        break;
      }
    }
    if (ones != 1) {
      throw ValidationError(fmt::format("schedule row {} is not a hard assignment", i));
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> channel_members(const Assignment& a,
                                                      std::size_t n_channels) {
  check_assignment(a, n_channels);
  std::vector<std::vector<std::size_t>> members(n_channels);
  for (std::size_t i = 0; i < a.size(); ++i) members[a.channel_of[i]].push_back(i);
  return members;
}

}  // namespace corrsched
