#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corrsched/model.hpp"

namespace corrsched {

// Solver-agnostic 0-1 linear program for channel assignment.
//
// For every pair i1 < i2 and channel j the product e[i1,j] e[i2,j] is replaced
// by z = max(e[i1,j] + e[i2,j] - 1, 0), enforced by the gate rows
//   cover: e[i1,j] + e[i2,j] - z <= 1
//   znn:   z >= 0
//   link:  z + y - e[i1,j] - e[i2,j] <= 0
//   ind:   z - y <= 0
// with y binary and z in [0, 1]. The objective is (1/L) sum A[i1,i2] z.
//
// Full encoding: L*N^2 variables (N*L e, L*N(N-1)/2 z, L*N(N-1)/2 y),
// N assignment rows, 4 rows per (pair, channel).
// Reduced encoding drops y together with the link and ind rows.

enum class VarKind { kBinary, kContinuous };
enum class Sense { kLessEqual, kEqual, kGreaterEqual };
enum class GateEncoding { kFull, kReduced };

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = 1.0;
};

struct Term {
  std::size_t var = 0;
  double coef = 0.0;

  bool operator==(const Term&) const = default;
};

struct LinearConstraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;

  bool operator==(const LinearConstraint&) const = default;
};

class PILPModel {
 public:
  std::vector<Variable> variables;
  std::vector<LinearConstraint> constraints;
  std::vector<Term> objective;  // minimized

  std::size_t add_variable(Variable v);
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;  // throws ValidationError

 private:
  std::map<std::string, std::size_t, std::less<>> index_;
};

bool operator==(const Variable& a, const Variable& b);
bool operator==(const PILPModel& a, const PILPModel& b);

std::string e_name(std::size_t device, std::size_t channel);
std::string z_name(std::size_t i1, std::size_t i2, std::size_t channel);
std::string y_name(std::size_t i1, std::size_t i2, std::size_t channel);

PILPModel build_pilp(const JointActivationMatrix& a, std::size_t n_channels,
                     GateEncoding encoding = GateEncoding::kFull);

// Enumerates y in {0, 1} and intersects the z ranges allowed by the full gate
// rows for fixed binary e1, e2. Returns the single feasible z value; throws
// ValidationError if z is not forced to one value.
double verify_gate(bool e1, bool e2);

struct PointEvaluation {
  bool feasible = false;
  double objective = 0.0;
  std::string violation;  // first violated rule, empty when feasible
};

// Checks bounds, integrality of binaries, and every row within 1e-9.
PointEvaluation evaluate_pilp_point(const PILPModel& m, std::span<const double> point);
// Name-keyed overload; throws ValidationError naming a missing variable.
PointEvaluation evaluate_pilp_point(const PILPModel& m,
                                    const std::map<std::string, double>& point);

// e from the assignment; z and y set to e1*e2 (the gate value) for every
// (pair, channel) present in the model.
std::vector<double> gate_completion(const PILPModel& m, const Assignment& assignment,
                                    std::size_t n_channels);

// LP text format: Minimize / Subject To / Bounds / Binaries / End.
// Deterministic ordering; coefficients written with 17 significant digits.
std::string export_lp(const PILPModel& m);

// Reads the dialect written by export_lp back into a model. Variable order is
// taken from the Bounds section.
PILPModel parse_lp(std::string_view text);

}  // namespace corrsched
