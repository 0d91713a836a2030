#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "corrsched/model.hpp"
#include "corrsched/rng.hpp"

namespace corrsched {

inline constexpr double kDefaultDensity = 0.2;        // devices per square meter
inline constexpr double kDefaultLambda = 3.0;         // meters
inline constexpr std::uint64_t kDefaultSteps = 1'000'000;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

// Devices placed in a disk centered at the origin.
struct DeviceLayout {
  std::vector<Point> positions;
  double region_radius = 0.0;  // meters
  double density = kDefaultDensity;

  std::size_t size() const { return positions.size(); }
};

// Radius of the disk holding n devices at the given density: sqrt(n / (density * pi)).
double region_radius_for(std::size_t n, double density);

// Alarm model: one epicenter per step, uniform in the deployment disk;
// device i activates independently with probability exp(-d_i / lambda).
struct ActivationModel {
  double lambda = kDefaultLambda;

  explicit ActivationModel(double mean_scaling = kDefaultLambda);
  double activation_probability(double dist) const;
};

struct SimulationSpec {
  std::uint64_t steps = kDefaultSteps;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // 0 = hardware concurrency; the result never depends on it
};

// Uniform point in the disk of the given radius by polar inverse transform.
Point sample_in_disk(double radius, Rng& rng);

DeviceLayout generate_layout(std::size_t n, double density, std::uint64_t seed);

// Layout from explicit coordinates. Throws ValidationError if a point lies
// outside the disk.
DeviceLayout make_layout(std::vector<Point> positions, double region_radius, double density);

// Indices of devices activated by one alarm drawn from `rng`.
std::vector<std::size_t> activation_round(const DeviceLayout& layout,
                                          const ActivationModel& model, Rng& rng);

// Empirical joint activation frequencies. Step k draws from Rng::stream(seed, k).
JointActivationMatrix estimate_joint_activation(const DeviceLayout& layout,
                                                const ActivationModel& model,
                                                const SimulationSpec& spec);

// Deterministic reference for estimate_joint_activation: midpoint quadrature of
//   A_ik = (1/|disk|) * integral over the disk of f(d_i(p)) f(d_k(p)) dp
// on a resolution x resolution grid, keeping cells whose center is in the disk.
JointActivationMatrix quadrature_joint_activation(const DeviceLayout& layout,
                                                  const ActivationModel& model,
                                                  std::size_t grid_resolution);

}  // namespace corrsched
