#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "corrsched/model.hpp"
#include "corrsched/sim.hpp"

namespace corrsched::bench {

enum class Experiment { kAnytime, kBound, kVsChannels, kVsLambda };
enum class SweepVariable { kDevices, kChannels, kLambda };
enum class Method { kExact, kKMedoids, kKMedoidsPlusPlus, kDescentPolished };

Experiment parse_experiment(std::string_view name);  // anytime | bound | vs-L | vs-lambda
std::string_view to_string(Method m);
Method parse_method(std::string_view name);

// Desk-scale experiment description. The sweep variable takes `values`; the
// other two axes come from the fixed parameters (`channels` may list several
// channel counts for the bound-tightness grid).
struct ExperimentSpec {
  SweepVariable sweep = SweepVariable::kDevices;
  std::vector<double> values;
  std::size_t devices = 12;
  std::vector<std::size_t> channels{3};
  double density = kDefaultDensity;
  double lambda = kDefaultLambda;
  std::uint64_t steps = 100'000;
  std::uint64_t seed = 1;
  double gap = 0.0;
  std::optional<double> time_limit;
  std::vector<Method> methods{Method::kExact, Method::kKMedoidsPlusPlus};
  std::size_t trials = 5;
  std::size_t restarts = 10;
  unsigned threads = 1;

  std::vector<std::size_t> device_grid() const;
  std::vector<std::size_t> channel_grid() const;
  std::vector<double> lambda_grid() const;
};

// Field-for-field JSON mapping; unknown fields are rejected.
ExperimentSpec parse_spec(const nlohmann::json& doc);
nlohmann::ordered_json to_json(const ExperimentSpec& spec);

// The simulated instance for one grid point. The layout depends on
// (seed, trial, N) only, and the activation stream on (seed, trial, N) only,
// so instances at different lambda share common random numbers.
struct Instance {
  DeviceLayout layout;
  JointActivationMatrix matrix;
};
Instance make_instance(const ExperimentSpec& spec, std::size_t n, double lambda,
                       std::size_t trial);

// Assignment produced by a method on one instance, with its wall time.
struct MethodRun {
  Assignment assignment;
  double elapsed_s = 0.0;
  std::vector<std::pair<double, double>> trail;  // (elapsed_s, objective)
};
MethodRun run_method(const ExperimentSpec& spec, Method method, const JointActivationMatrix& a,
                     std::size_t n_channels, std::size_t trial);

struct AnytimeRow {
  std::size_t n = 0;
  std::size_t l = 0;
  std::size_t trial = 0;
  Method method = Method::kExact;
  double elapsed_s = 0.0;
  double objective = 0.0;
};

struct BoundRow {
  std::size_t n = 0;
  std::size_t l = 0;
  std::size_t trial = 0;
  double p_c = 0.0;
  double f = 0.0;
};

// One row per (sweep value, method): means over trials.
struct CurveRow {
  double x = 0.0;  // L or lambda
  Method method = Method::kExact;
  double p_c = 0.0;
  double f = 0.0;
};

std::vector<AnytimeRow> run_anytime(const ExperimentSpec& spec);
std::vector<BoundRow> run_bound_tightness(const ExperimentSpec& spec);
std::vector<CurveRow> run_pc_vs_channels(const ExperimentSpec& spec);
std::vector<CurveRow> run_pc_vs_lambda(const ExperimentSpec& spec);

std::string anytime_csv(const std::vector<AnytimeRow>& rows);
std::string bound_csv(const std::vector<BoundRow>& rows);
std::string curve_csv(const std::vector<CurveRow>& rows, std::string_view x_name);

// Runs one experiment and returns (file name, CSV text).
struct ExperimentOutput {
  std::string file_name;
  std::string csv;
  std::vector<std::string> warnings;
};
ExperimentOutput run_experiment(Experiment experiment, const ExperimentSpec& spec);

}  // namespace corrsched::bench
