#include "corrsched/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include <fmt/format.h>

namespace corrsched {

namespace {

constexpr std::uint64_t kLayoutSalt = 0x4C41594F55540000ULL;  // "LAYOUT"

unsigned resolve_threads(unsigned requested, std::uint64_t work_items) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::uint64_t>(t, std::max<std::uint64_t>(1, work_items)));
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double region_radius_for(std::size_t n, double density) {
  if (!(density > 0.0)) throw ValidationError("density must be positive");
  return std::sqrt(static_cast<double>(n) / (density * std::numbers::pi));
}

ActivationModel::ActivationModel(double mean_scaling) : lambda(mean_scaling) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ValidationError(fmt::format("lambda must be positive, got {}", lambda));
  }
}

double ActivationModel::activation_probability(double dist) const {
  return std::exp(-dist / lambda);
}

Point sample_in_disk(double radius, Rng& rng) {
  const double r = radius * std::sqrt(rng.uniform());
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

DeviceLayout generate_layout(std::size_t n, double density, std::uint64_t seed) {
  if (n == 0) throw ValidationError("layout needs at least one device");
  DeviceLayout layout;
  layout.density = density;
  layout.region_radius = region_radius_for(n, density);
  Rng rng(mix64(seed ^ kLayoutSalt));
  layout.positions.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    layout.positions.push_back(sample_in_disk(layout.region_radius, rng));
  }
  return layout;
}

DeviceLayout make_layout(std::vector<Point> positions, double region_radius, double density) {
  if (!(region_radius > 0.0)) throw ValidationError("region_radius must be positive");
  if (!(density > 0.0)) throw ValidationError("density must be positive");
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (std::hypot(positions[i].x, positions[i].y) > region_radius * (1.0 + 1e-12)) {
      throw ValidationError(
          fmt::format("device {} at ({}, {}) lies outside the disk of radius {}", i,
                      positions[i].x, positions[i].y, region_radius));
    }
  }
  return DeviceLayout{std::move(positions), region_radius, density};
}

std::vector<std::size_t> activation_round(const DeviceLayout& layout,
                                          const ActivationModel& model, Rng& rng) {
  const Point epicenter = sample_in_disk(layout.region_radius, rng);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const double p = model.activation_probability(distance(layout.positions[i], epicenter));
    if (rng.uniform() < p) active.push_back(i);
  }
  return active;
}

JointActivationMatrix estimate_joint_activation(const DeviceLayout& layout,
                                                const ActivationModel& model,
                                                const SimulationSpec& spec) {
  if (spec.steps == 0) throw ValidationError("steps must be at least 1");
  const std::size_t n = layout.size();
  const unsigned threads = resolve_threads(spec.threads, spec.steps);

  // Integer counts per worker; summing them is order-independent.
  std::vector<std::vector<std::uint64_t>> counts(threads, std::vector<std::uint64_t>(n * n, 0));
  auto work = [&](unsigned t) {
    auto& local = counts[t];
    const std::uint64_t begin = spec.steps * t / threads;
    const std::uint64_t end = spec.steps * (t + 1) / threads;
    for (std::uint64_t step = begin; step < end; ++step) {
      Rng rng = Rng::stream(spec.seed, step);
      const auto active = activation_round(layout, model, rng);
      for (std::size_t a = 0; a < active.size(); ++a) {
        const std::size_t i = active[a];
        local[i * n + i] += 1;
        for (std::size_t b = a + 1; b < active.size(); ++b) local[i * n + active[b]] += 1;
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  const double steps = static_cast<double>(spec.steps);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i; k < n; ++k) {
      std::uint64_t total = 0;
      for (const auto& local : counts) total += local[i * n + k];
      const double freq = static_cast<double>(total) / steps;
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = freq;
      a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = freq;
    }
  }
  return JointActivationMatrix(std::move(a));
}

JointActivationMatrix quadrature_joint_activation(const DeviceLayout& layout,
                                                  const ActivationModel& model,
                                                  std::size_t grid_resolution) {
  if (grid_resolution < 64) throw ValidationError("grid_resolution must be at least 64");
  const std::size_t n = layout.size();
  const double radius = layout.region_radius;
  const double h = 2.0 * radius / static_cast<double>(grid_resolution);

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
  Eigen::VectorXd marginal = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd f(static_cast<Eigen::Index>(n));
  std::size_t cells = 0;
  for (std::size_t a = 0; a < grid_resolution; ++a) {
    const double x = -radius + (static_cast<double>(a) + 0.5) * h;
    // Row accumulator keeps the summation error per row small.
    Eigen::MatrixXd row = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(n));
    Eigen::VectorXd row_marginal = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t b = 0; b < grid_resolution; ++b) {
      const double y = -radius + (static_cast<double>(b) + 0.5) * h;
      if (x * x + y * y > radius * radius) continue;
      ++cells;
      for (std::size_t i = 0; i < n; ++i) {
        f(static_cast<Eigen::Index>(i)) =
            model.activation_probability(distance(layout.positions[i], {x, y}));
      }
      row.selfadjointView<Eigen::Upper>().rankUpdate(f);
      row_marginal += f;
    }
    sum += row;
    marginal += row_marginal;
  }
  Eigen::MatrixXd a = sum.selfadjointView<Eigen::Upper>();
  a.diagonal() = marginal;
  a /= static_cast<double>(cells);
  return JointActivationMatrix(std::move(a));
}

}  // namespace corrsched
