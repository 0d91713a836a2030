#include "corrsched/linearize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace corrsched {

namespace {

constexpr double kFeasibilityTolerance = 1e-9;
constexpr std::size_t kTermsPerLine = 6;

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

const char* sense_token(Sense s) {
  switch (s) {
    case Sense::kLessEqual:
      return "<=";
    case Sense::kEqual:
      return "=";
    case Sense::kGreaterEqual:
      return ">=";
  }
  return "?";
}

// " + 3 x - 2 y" wrapped onto continuation lines.
void write_terms(std::ostringstream& out, const PILPModel& m, const std::vector<Term>& terms) {
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (t > 0 && t % kTermsPerLine == 0) out << "\n  ";
    const double c = terms[t].coef;
    const std::string& name = m.variables[terms[t].var].name;
    if (t == 0) {
      out << ' ' << format_number(c) << ' ' << name;
    } else if (std::signbit(c)) {
      out << " - " << format_number(-c) << ' ' << name;
    } else {
      out << " + " << format_number(c) << ' ' << name;
    }
  }
}

double row_activity(const LinearConstraint& row, std::span<const double> point) {
  double lhs = 0.0;
  for (const Term& t : row.terms) lhs += t.coef * point[t.var];
  return lhs;
}

bool row_satisfied(Sense sense, double lhs, double rhs) {
  switch (sense) {
    case Sense::kLessEqual:
      return lhs <= rhs + kFeasibilityTolerance;
    case Sense::kEqual:
      return std::abs(lhs - rhs) <= kFeasibilityTolerance;
    case Sense::kGreaterEqual:
      return lhs >= rhs - kFeasibilityTolerance;
  }
  return false;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct PendingRow {
  std::string name;
  std::vector<std::string_view> tokens;
  std::size_t line = 0;
};

}  // namespace

std::size_t PILPModel::add_variable(Variable v) {
  const std::size_t idx = variables.size();
  if (!index_.emplace(v.name, idx).second) {
    throw ValidationError(fmt::format("duplicate variable '{}'", v.name));
  }
  variables.push_back(std::move(v));
  return idx;
}

std::optional<std::size_t> PILPModel::find(std::string_view name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t PILPModel::index_of(std::string_view name) const {
  const auto idx = find(name);
  if (!idx) throw ValidationError(fmt::format("unknown variable '{}'", name));
  return *idx;
}

bool operator==(const Variable& a, const Variable& b) {
  return a.name == b.name && a.kind == b.kind && a.lower == b.lower && a.upper == b.upper;
}

bool operator==(const PILPModel& a, const PILPModel& b) {
  return a.variables == b.variables && a.constraints == b.constraints &&
         a.objective == b.objective;
}

std::string e_name(std::size_t device, std::size_t channel) {
  return fmt::format("e_{}_{}", device, channel);
}
std::string z_name(std::size_t i1, std::size_t i2, std::size_t channel) {
  return fmt::format("z_{}_{}_{}", i1, i2, channel);
}
std::string y_name(std::size_t i1, std::size_t i2, std::size_t channel) {
  return fmt::format("y_{}_{}_{}", i1, i2, channel);
}

PILPModel build_pilp(const JointActivationMatrix& a, std::size_t n_channels,
                     GateEncoding encoding) {
  if (n_channels == 0) throw ValidationError("n_channels must be at least 1");
  const std::size_t n = a.dim();
  const bool full = encoding == GateEncoding::kFull;
  PILPModel m;

  std::vector<std::size_t> e(n * n_channels);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n_channels; ++j) {
      e[i * n_channels + j] = m.add_variable({e_name(i, j), VarKind::kBinary, 0.0, 1.0});
    }
  }
  const std::size_t pairs = n * (n - 1) / 2;
  std::vector<std::size_t> z(pairs * n_channels);
  std::vector<std::size_t> y(full ? pairs * n_channels : 0);
  std::size_t p = 0;
  for (std::size_t i1 = 0; i1 < n; ++i1) {
    for (std::size_t i2 = i1 + 1; i2 < n; ++i2, ++p) {
      for (std::size_t j = 0; j < n_channels; ++j) {
        z[p * n_channels + j] =
            m.add_variable({z_name(i1, i2, j), VarKind::kContinuous, 0.0, 1.0});
      }
    }
  }
  if (full) {
    p = 0;
    for (std::size_t i1 = 0; i1 < n; ++i1) {
      for (std::size_t i2 = i1 + 1; i2 < n; ++i2, ++p) {
        for (std::size_t j = 0; j < n_channels; ++j) {
          y[p * n_channels + j] = m.add_variable({y_name(i1, i2, j), VarKind::kBinary, 0.0, 1.0});
        }
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    LinearConstraint row{fmt::format("assign_{}", i), {}, Sense::kEqual, 1.0};
    for (std::size_t j = 0; j < n_channels; ++j) row.terms.push_back({e[i * n_channels + j], 1.0});
    m.constraints.push_back(std::move(row));
  }

  const double scale = 1.0 / static_cast<double>(n_channels);
  p = 0;
  for (std::size_t i1 = 0; i1 < n; ++i1) {
    for (std::size_t i2 = i1 + 1; i2 < n; ++i2, ++p) {
      for (std::size_t j = 0; j < n_channels; ++j) {
        const std::size_t e1 = e[i1 * n_channels + j];
        const std::size_t e2 = e[i2 * n_channels + j];
        const std::size_t zv = z[p * n_channels + j];
        const std::string tag = fmt::format("{}_{}_{}", i1, i2, j);
        m.objective.push_back({zv, a(i1, i2) * scale});
        m.constraints.push_back(
            {"cover_" + tag, {{e1, 1.0}, {e2, 1.0}, {zv, -1.0}}, Sense::kLessEqual, 1.0});
        m.constraints.push_back({"znn_" + tag, {{zv, 1.0}}, Sense::kGreaterEqual, 0.0});
        if (full) {
          const std::size_t yv = y[p * n_channels + j];
          m.constraints.push_back({"link_" + tag,
                                   {{zv, 1.0}, {yv, 1.0}, {e1, -1.0}, {e2, -1.0}},
                                   Sense::kLessEqual,
                                   0.0});
          m.constraints.push_back({"ind_" + tag, {{zv, 1.0}, {yv, -1.0}}, Sense::kLessEqual, 0.0});
        }
      }
    }
  }
  return m;
}

double verify_gate(bool e1, bool e2) {
  const PILPModel m = build_pilp(JointActivationMatrix(Eigen::MatrixXd::Zero(2, 2)), 1);
  const std::size_t zv = m.index_of(z_name(0, 1, 0));
  const std::size_t yv = m.index_of(y_name(0, 1, 0));
  std::vector<double> point(m.variables.size(), 0.0);
  point[m.index_of(e_name(0, 0))] = e1 ? 1.0 : 0.0;
  point[m.index_of(e_name(1, 0))] = e2 ? 1.0 : 0.0;

  std::optional<double> forced_lo;
  std::optional<double> forced_hi;
  for (const double y : {0.0, 1.0}) {
    point[yv] = y;
    double lo = m.variables[zv].lower;
    double hi = m.variables[zv].upper;
    for (const LinearConstraint& row : m.constraints) {
      double zc = 0.0;
      double rest = 0.0;
      for (const Term& t : row.terms) {
        if (t.var == zv) {
          zc += t.coef;
        } else {
          rest += t.coef * point[t.var];
        }
      }
      if (zc == 0.0) continue;  // rows without z (assignment) do not constrain the gate
      const double bound = (row.rhs - rest) / zc;
      const bool upper = (row.sense == Sense::kLessEqual) == (zc > 0.0);
      if (row.sense == Sense::kEqual) {
        lo = std::max(lo, bound);
        hi = std::min(hi, bound);
      } else if (upper) {
        hi = std::min(hi, bound);
      } else {
        lo = std::max(lo, bound);
      }
    }
    if (lo > hi) continue;
    forced_lo = forced_lo ? std::min(*forced_lo, lo) : lo;
    forced_hi = forced_hi ? std::max(*forced_hi, hi) : hi;
  }
  if (!forced_lo) throw ValidationError("gate is infeasible");
  if (*forced_lo != *forced_hi) {
    throw ValidationError(
        fmt::format("gate leaves z free in [{}, {}] for e = ({}, {})", *forced_lo, *forced_hi,
                    e1, e2));
  }
  return *forced_lo;
}

PointEvaluation evaluate_pilp_point(const PILPModel& m, std::span<const double> point) {
  if (point.size() != m.variables.size()) {
    throw ValidationError(fmt::format("point has {} values but the model has {} variables",
                                      point.size(), m.variables.size()));
  }
  PointEvaluation out;
  for (const Term& t : m.objective) out.objective += t.coef * point[t.var];
  for (std::size_t v = 0; v < m.variables.size(); ++v) {
    const Variable& var = m.variables[v];
    const double x = point[v];
    if (!std::isfinite(x) || x < var.lower - kFeasibilityTolerance ||
        x > var.upper + kFeasibilityTolerance) {
      out.violation = fmt::format("bound on {} violated by value {}", var.name, x);
      return out;
    }
    if (var.kind == VarKind::kBinary && std::abs(x - std::round(x)) > kFeasibilityTolerance) {
      out.violation = fmt::format("binary {} has fractional value {}", var.name, x);
      return out;
    }
  }
  for (const LinearConstraint& row : m.constraints) {
    const double lhs = row_activity(row, point);
    if (!row_satisfied(row.sense, lhs, row.rhs)) {
      out.violation =
          fmt::format("row {}: {} {} {} fails", row.name, lhs, sense_token(row.sense), row.rhs);
      return out;
    }
  }
  out.feasible = true;
  return out;
}

PointEvaluation evaluate_pilp_point(const PILPModel& m,
                                    const std::map<std::string, double>& point) {
  std::vector<double> dense(m.variables.size(), 0.0);
  for (std::size_t v = 0; v < m.variables.size(); ++v) {
    const auto it = point.find(m.variables[v].name);
    if (it == point.end()) {
      throw ValidationError(fmt::format("point is missing variable '{}'", m.variables[v].name));
    }
    dense[v] = it->second;
  }
  return evaluate_pilp_point(m, dense);
}

std::vector<double> gate_completion(const PILPModel& m, const Assignment& assignment,
                                    std::size_t n_channels) {
  check_assignment(assignment, n_channels);
  const std::size_t n = assignment.size();
  std::vector<double> point(m.variables.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    point[m.index_of(e_name(i, assignment.channel_of[i]))] = 1.0;
  }
  for (std::size_t i1 = 0; i1 < n; ++i1) {
    for (std::size_t i2 = i1 + 1; i2 < n; ++i2) {
      if (assignment.channel_of[i1] != assignment.channel_of[i2]) continue;
      const std::size_t j = assignment.channel_of[i1];
      point[m.index_of(z_name(i1, i2, j))] = 1.0;
      if (const auto yv = m.find(y_name(i1, i2, j))) point[*yv] = 1.0;
    }
  }
  return point;
}

std::string export_lp(const PILPModel& m) {
  std::ostringstream out;
  out << "\\ channel assignment 0-1 program\n";
  out << "Minimize\n obj:";
  write_terms(out, m, m.objective);
  out << "\nSubject To\n";
  for (const LinearConstraint& row : m.constraints) {
    out << ' ' << row.name << ':';
    write_terms(out, m, row.terms);
    out << ' ' << sense_token(row.sense) << ' ' << format_number(row.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const Variable& v : m.variables) {
    out << ' ' << format_number(v.lower) << " <= " << v.name << " <= " << format_number(v.upper)
        << '\n';
  }
  out << "Binaries\n";
  for (const Variable& v : m.variables) {
    if (v.kind == VarKind::kBinary) out << ' ' << v.name << '\n';
  }
  out << "End\n";
  return out.str();
}

PILPModel parse_lp(std::string_view text) {
  enum class Section { kNone, kObjective, kConstraints, kBounds, kBinaries, kEnd };
  Section section = Section::kNone;
  std::vector<PendingRow> rows;
  std::optional<PendingRow> objective;
  PILPModel m;
  std::vector<std::string> binaries;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size() && section != Section::kEnd) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.front() == '\\') continue;
    const auto tokens = split_ws(line);
    if (tokens.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    const bool indented = std::isspace(static_cast<unsigned char>(line.front())) != 0;
    if (!indented) {
      if (line == "Minimize") {
        section = Section::kObjective;
      } else if (line == "Subject To") {
        section = Section::kConstraints;
      } else if (line == "Bounds") {
        section = Section::kBounds;
      } else if (line == "Binaries") {
        section = Section::kBinaries;
      } else if (line == "End") {
        section = Section::kEnd;
      } else {
        throw ParseError(fmt::format("line {}: unknown section '{}'", line_no, line));
      }
      continue;
    }

    switch (section) {
      case Section::kObjective:
      case Section::kConstraints: {
        auto begin = tokens.begin();
        if (tokens.front().back() == ':') {
          PendingRow row{std::string(tokens.front().substr(0, tokens.front().size() - 1)), {},
                         line_no};
          if (section == Section::kObjective) {
            objective = std::move(row);
          } else {
            rows.push_back(std::move(row));
          }
          ++begin;
        }
        PendingRow* target = section == Section::kObjective
                                 ? (objective ? &*objective : nullptr)
                                 : (rows.empty() ? nullptr : &rows.back());
        if (target == nullptr) {
          throw ParseError(fmt::format("line {}: terms before a row name", line_no));
        }
        target->tokens.insert(target->tokens.end(), begin, tokens.end());
        break;
      }
      case Section::kBounds: {
        if (tokens.size() != 5 || tokens[1] != "<=" || tokens[3] != "<=") {
          throw ParseError(fmt::format("line {}: expected 'lo <= name <= hi'", line_no));
        }
        const auto lo = parse_double(tokens[0]);
        const auto hi = parse_double(tokens[4]);
        if (!lo || !hi) throw ParseError(fmt::format("line {}: bad bound value", line_no));
        m.add_variable({std::string(tokens[2]), VarKind::kContinuous, *lo, *hi});
        break;
      }
      case Section::kBinaries:
        for (auto t : tokens) binaries.emplace_back(t);
        break;
      default:
        throw ParseError(fmt::format("line {}: content outside a section", line_no));
    }
  }
  if (section != Section::kEnd) throw ParseError("missing End section");

  for (const auto& name : binaries) {
    const auto idx = m.find(name);
    if (!idx) throw ParseError(fmt::format("binary '{}' has no bounds entry", name));
    m.variables[*idx].kind = VarKind::kBinary;
  }

  // Tokens: [sign] coef name ... sense rhs
  auto parse_terms = [&](const PendingRow& row, std::size_t count) {
    std::vector<Term> terms;
    double sign = 1.0;
    std::optional<double> coef;
    for (std::size_t t = 0; t < count; ++t) {
      const std::string_view tok = row.tokens[t];
      if (tok == "+") {
        sign = 1.0;
      } else if (tok == "-") {
        sign = -1.0;
      } else if (const auto v = parse_double(tok)) {
        coef = *v;
      } else {
        const auto idx = m.find(tok);
        if (!idx) {
          throw ParseError(
              fmt::format("line {}: row '{}' uses unknown variable '{}'", row.line, row.name, tok));
        }
        terms.push_back({*idx, sign * coef.value_or(1.0)});
        sign = 1.0;
        coef.reset();
      }
    }
    return terms;
  };

  if (!objective) throw ParseError("missing objective");
  m.objective = parse_terms(*objective, objective->tokens.size());
  for (const PendingRow& row : rows) {
    if (row.tokens.size() < 2) {
      throw ParseError(fmt::format("line {}: row '{}' is incomplete", row.line, row.name));
    }
    const std::string_view sense_tok = row.tokens[row.tokens.size() - 2];
    Sense sense;
    if (sense_tok == "<=") {
      sense = Sense::kLessEqual;
    } else if (sense_tok == ">=") {
      sense = Sense::kGreaterEqual;
    } else if (sense_tok == "=") {
      sense = Sense::kEqual;
    } else {
      throw ParseError(fmt::format("line {}: row '{}' has no sense", row.line, row.name));
    }
    const auto rhs = parse_double(row.tokens.back());
    if (!rhs) throw ParseError(fmt::format("line {}: row '{}' has a bad rhs", row.line, row.name));
    m.constraints.push_back({row.name, parse_terms(row, row.tokens.size() - 2), sense, *rhs});
  }
  return m;
}

}  // namespace corrsched
