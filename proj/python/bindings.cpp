#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "corrsched/cli.hpp"
#include "corrsched/descent.hpp"
#include "corrsched/errors.hpp"
#include "corrsched/heuristics.hpp"
#include "corrsched/io.hpp"
#include "corrsched/linearize.hpp"
#include "corrsched/objective.hpp"
#include "corrsched/sim.hpp"
#include "corrsched/solver.hpp"

namespace py = pybind11;
using namespace corrsched;

namespace {

JointActivationMatrix matrix(const Eigen::MatrixXd& a, bool validate) {
  return validate ? JointActivationMatrix::checked(a) : JointActivationMatrix(a);
}

Assignment assignment(const std::vector<std::size_t>& channel_of) { return Assignment{channel_of}; }

py::dict report_dict(const CollisionReport& r) {
  py::dict d;
  d["per_channel"] = r.per_channel;
  d["network_average"] = r.network_average;
  d["pairwise_bound"] = r.pairwise_bound;
  return d;
}

py::dict result_dict(const SolverResult& r) {
  py::dict d;
  d["assignment"] = r.assignment.channel_of;
  d["objective"] = r.objective;
  d["lower_bound"] = r.lower_bound;
  d["gap"] = r.gap;
  d["nodes_explored"] = r.nodes_explored;
  d["status"] = std::string(io::to_string(r.status));
  py::list log;
  for (const auto& e : r.incumbent_log) log.append(py::make_tuple(e.elapsed_s, e.objective));
  d["incumbent_log"] = log;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Channel scheduling under correlated device activation";

  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", base.ptr());

  m.def(
      "validate_matrix",
      [](const Eigen::MatrixXd& a) {
        py::list out;
        for (const auto& v : validate_matrix(JointActivationMatrix(a))) {
          out.append(py::make_tuple(v.row, v.col, v.rule, v.message));
        }
        return out;
      },
      py::arg("a"));

  m.def(
      "collision_report",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& e, bool validate) {
        return report_dict(network_collision_probability(matrix(a, validate), ScheduleMatrix(e)));
      },
      py::arg("a"), py::arg("schedule"), py::arg("validate") = true);

  m.def(
      "pairwise_bound",
      [](const Eigen::MatrixXd& a, const std::vector<std::size_t>& channel_of, std::size_t l,
         bool validate) { return pairwise_bound(matrix(a, validate), assignment(channel_of), l); },
      py::arg("a"), py::arg("assignment"), py::arg("channels"), py::arg("validate") = true);

  m.def(
      "trace_objective",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& e, bool validate) {
        return trace_objective(matrix(a, validate), ScheduleMatrix(e));
      },
      py::arg("a"), py::arg("schedule"), py::arg("validate") = true);

  m.def(
      "round_to_hard",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& e, bool validate) {
        return round_to_hard(matrix(a, validate), ScheduleMatrix(e)).channel_of;
      },
      py::arg("a"), py::arg("schedule"), py::arg("validate") = true);

  m.def(
      "coordinate_descent",
      [](const Eigen::MatrixXd& a, const std::vector<std::size_t>& start, std::size_t l,
         std::size_t max_sweeps, bool validate) {
        return coordinate_descent(matrix(a, validate), assignment(start), l, max_sweeps).channel_of;
      },
      py::arg("a"), py::arg("start"), py::arg("channels"), py::arg("max_sweeps") = 100,
      py::arg("validate") = true);

  m.def(
      "solve_exact",
      [](const Eigen::MatrixXd& a, std::size_t l, double gap, std::optional<double> time_limit,
         std::optional<std::uint64_t> node_limit, bool validate) {
        SolverOptions opts;
        opts.gap_tolerance = gap;
        opts.time_limit = time_limit;
        opts.node_limit = node_limit;
        const auto jm = matrix(a, validate);
        SolverResult r;
        {
          py::gil_scoped_release release;
          r = solve_exact(jm, l, opts);
        }
        return result_dict(r);
      },
      py::arg("a"), py::arg("channels"), py::arg("gap") = kDefaultGapTolerance,
      py::arg("time_limit") = py::none(), py::arg("node_limit") = py::none(),
      py::arg("validate") = true);

  m.def(
      "brute_force",
      [](const Eigen::MatrixXd& a, std::size_t l, bool validate) {
        return result_dict(brute_force(matrix(a, validate), l));
      },
      py::arg("a"), py::arg("channels"), py::arg("validate") = true);

  m.def(
      "cluster",
      [](const Eigen::MatrixXd& a, std::size_t l, const std::string& method, std::uint64_t seed,
         std::size_t restarts, const std::string& dissimilarity, bool validate) {
        const auto r = best_of_restarts(matrix(a, validate), l, parse_clustering_method(method), seed,
                                        restarts, kDefaultMaxIter, parse_dissimilarity(dissimilarity));
        py::dict d;
        d["assignment"] = r.assignment.channel_of;
        d["medoids"] = r.state.medoids;
        d["cost"] = r.state.cost;
        d["cost_history"] = r.state.cost_history;
        return d;
      },
      py::arg("a"), py::arg("channels"), py::arg("method") = "kmedoids-pp", py::arg("seed") = 0,
      py::arg("restarts") = 1, py::arg("dissimilarity") = "A", py::arg("validate") = true);

  m.def(
      "simulate",
      [](std::size_t n, double density, double lambda, std::uint64_t steps, std::uint64_t seed,
         unsigned threads) {
        const DeviceLayout layout = generate_layout(n, density, seed);
        JointActivationMatrix a;
        {
          py::gil_scoped_release release;
          a = estimate_joint_activation(layout, ActivationModel(lambda), {steps, seed, threads});
        }
        Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), 2);
        for (std::size_t i = 0; i < n; ++i) {
          pts(static_cast<Eigen::Index>(i), 0) = layout.positions[i].x;
          pts(static_cast<Eigen::Index>(i), 1) = layout.positions[i].y;
        }
        return py::make_tuple(a.entries(), pts, layout.region_radius);
      },
      py::arg("devices"), py::arg("density") = kDefaultDensity, py::arg("lambda_") = kDefaultLambda,
      py::arg("steps") = kDefaultSteps, py::arg("seed") = 0, py::arg("threads") = 1);

  m.def(
      "quadrature",
      [](const Eigen::MatrixXd& points, double region_radius, double lambda, std::size_t resolution) {
        std::vector<Point> pts;
        for (Eigen::Index i = 0; i < points.rows(); ++i) pts.push_back({points(i, 0), points(i, 1)});
        const DeviceLayout layout = make_layout(std::move(pts), region_radius, kDefaultDensity);
        return quadrature_joint_activation(layout, ActivationModel(lambda), resolution).entries();
      },
      py::arg("points"), py::arg("region_radius"), py::arg("lambda_") = kDefaultLambda,
      py::arg("resolution") = 256);

  m.def("region_radius", &region_radius_for, py::arg("devices"), py::arg("density") = kDefaultDensity);

  m.def(
      "export_lp",
      [](const Eigen::MatrixXd& a, std::size_t l, bool reduced, bool validate) {
        return export_lp(build_pilp(matrix(a, validate), l,
                                    reduced ? GateEncoding::kReduced : GateEncoding::kFull));
      },
      py::arg("a"), py::arg("channels"), py::arg("reduced") = false, py::arg("validate") = true);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::dispatch(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
