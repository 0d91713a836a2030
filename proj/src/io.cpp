#include "corrsched/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace corrsched::io {

namespace {

using json = nlohmann::json;

struct CsvLine {
  std::size_t number = 0;  // 1-based
  std::vector<std::string_view> fields;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Non-empty lines split on commas.
std::vector<CsvLine> split_csv(std::string_view text) {
  std::vector<CsvLine> out;
  std::size_t pos = 0;
  std::size_t number = 0;
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++number;
    if (line.empty()) continue;
    CsvLine row{number, {}};
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      row.fields.push_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    out.push_back(std::move(row));
  }
  return out;
}

double parse_number(std::string_view s, std::size_t line, std::size_t column) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(fmt::format("line {}, column {}: '{}' is not a number", line, column, s));
  }
  return v;
}

std::size_t parse_index(std::string_view s, std::size_t line, std::string_view field) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(
        fmt::format("line {}: field '{}' = '{}' is not a non-negative integer", line, field, s));
  }
  return v;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
}

const json& require(const json& doc, const char* field) {
  if (!doc.is_object()) throw ParseError("document must be a JSON object");
  const auto it = doc.find(field);
  if (it == doc.end()) throw ParseError(fmt::format("missing field '{}'", field));
  return *it;
}

std::size_t require_size(const json& doc, const char* field) {
  const json& v = require(doc, field);
  if (!v.is_number_unsigned()) {
    throw ParseError(fmt::format("field '{}' must be a non-negative integer", field));
  }
  return v.get<std::size_t>();
}

double require_number(const json& doc, const char* field) {
  const json& v = require(doc, field);
  if (!v.is_number()) throw ParseError(fmt::format("field '{}' must be a number", field));
  return v.get<double>();
}

Eigen::MatrixXd json_rows(const json& entries, std::size_t rows, std::size_t cols) {
  if (!entries.is_array() || entries.size() != rows) {
    throw ParseError(fmt::format("field 'entries' must be an array of {} rows", rows));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = entries[i];
    if (!row.is_array() || row.size() != cols) {
      throw ParseError(fmt::format("field 'entries[{}]' must hold {} numbers", i, cols));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (!row[j].is_number()) {
        throw ParseError(fmt::format("field 'entries[{}][{}]' is not a number", i, j));
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  return m;
}

Eigen::MatrixXd csv_rows(std::string_view text) {
  const auto lines = split_csv(text);
  if (lines.empty()) throw ParseError("empty document");
  const std::size_t cols = lines.front().fields.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(lines.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const CsvLine& line = lines[i];
    if (line.fields.size() != cols) {
      throw ParseError(fmt::format("line {}: expected {} values, found {}", line.number, cols,
                                   line.fields.size()));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_number(line.fields[j], line.number, j + 1);
    }
  }
  return m;
}

JointActivationMatrix finish_matrix(Eigen::MatrixXd m, bool validate) {
  return validate ? JointActivationMatrix::checked(std::move(m))
                  : JointActivationMatrix(std::move(m));
}

std::string format_rows_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

bool has_json_extension(const std::filesystem::path& path) { return path.extension() == ".json"; }

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

JointActivationMatrix parse_matrix_json(std::string_view text, bool validate) {
  const json doc = parse_json(text);
  const std::size_t dim = require_size(doc, "dim");
  return finish_matrix(json_rows(require(doc, "entries"), dim, dim), validate);
}

JointActivationMatrix parse_matrix_csv(std::string_view text, bool validate) {
  Eigen::MatrixXd m = csv_rows(text);
  if (m.rows() != m.cols()) {
    throw ShapeError(fmt::format("matrix CSV has {} rows of {} values; expected a square matrix",
                                 m.rows(), m.cols()));
  }
  return finish_matrix(std::move(m), validate);
}

std::string format_matrix_json(const JointActivationMatrix& a) {
  const Eigen::MatrixXd& m = a.entries();
  std::string out = fmt::format("{{\n  \"dim\": {},\n  \"entries\": [", a.dim());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += i == 0 ? "\n    [" : ",\n    [";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ", ";
      out += format_double(m(i, j));
    }
    out += ']';
  }
  out += m.rows() == 0 ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

std::string format_matrix_csv(const JointActivationMatrix& a) { return format_rows_csv(a.entries()); }

ScheduleMatrix parse_schedule_csv(std::string_view text) { return ScheduleMatrix(csv_rows(text)); }

ScheduleMatrix parse_schedule_json(std::string_view text) {
  const json doc = parse_json(text);
  const std::size_t rows = require_size(doc, "rows");
  const std::size_t cols = require_size(doc, "cols");
  return ScheduleMatrix(json_rows(require(doc, "entries"), rows, cols));
}

std::string format_schedule_csv(const ScheduleMatrix& e) { return format_rows_csv(e.entries()); }

Assignment parse_assignment_csv(std::string_view text) {
  const auto lines = split_csv(text);
  if (lines.empty()) throw ParseError("empty assignment document");
  const auto& header = lines.front();
  if (header.fields.size() != 2 || header.fields[0] != "device" || header.fields[1] != "channel") {
    throw ParseError(fmt::format("line {}: expected header 'device,channel'", header.number));
  }
  Assignment out;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const CsvLine& line = lines[r];
    if (line.fields.size() != 2) {
      throw ParseError(fmt::format("line {}: expected 2 fields, found {}", line.number,
                                   line.fields.size()));
    }
    const std::size_t device = parse_index(line.fields[0], line.number, "device");
    if (device != out.size()) {
      throw ParseError(fmt::format("line {}: expected device {}, found {}", line.number,
                                   out.size(), device));
    }
    out.channel_of.push_back(parse_index(line.fields[1], line.number, "channel"));
  }
  return out;
}

std::string format_assignment_csv(const Assignment& a) {
  std::string out = "device,channel\n";
  for (std::size_t i = 0; i < a.size(); ++i) out += fmt::format("{},{}\n", i, a.channel_of[i]);
  return out;
}

DeviceLayout parse_layout(std::string_view csv, std::string_view sidecar_json) {
  const json side = parse_json(sidecar_json);
  const double radius = require_number(side, "region_radius");
  const double density = require_number(side, "density");

  const auto lines = split_csv(csv);
  if (lines.empty() || lines.front().fields.size() != 3 || lines.front().fields[0] != "device" ||
      lines.front().fields[1] != "x" || lines.front().fields[2] != "y") {
    throw ParseError("line 1: expected header 'device,x,y'");
  }
  std::vector<Point> positions;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const CsvLine& line = lines[r];
    if (line.fields.size() != 3) {
      throw ParseError(fmt::format("line {}: expected 3 fields, found {}", line.number,
                                   line.fields.size()));
    }
    const std::size_t device = parse_index(line.fields[0], line.number, "device");
    if (device != positions.size()) {
      throw ParseError(fmt::format("line {}: expected device {}, found {}", line.number,
                                   positions.size(), device));
    }
    positions.push_back({parse_number(line.fields[1], line.number, 2),
                         parse_number(line.fields[2], line.number, 3)});
  }
  return make_layout(std::move(positions), radius, density);
}

std::string format_layout_csv(const DeviceLayout& layout) {
  std::string out = "device,x,y\n";
  for (std::size_t i = 0; i < layout.size(); ++i) {
    out += fmt::format("{},{},{}\n", i, format_double(layout.positions[i].x),
                       format_double(layout.positions[i].y));
  }
  return out;
}

std::string format_layout_sidecar(const DeviceLayout& layout) {
  return fmt::format("{{\n  \"region_radius\": {},\n  \"density\": {}\n}}\n",
                     format_double(layout.region_radius), format_double(layout.density));
}

std::filesystem::path sidecar_path(const std::filesystem::path& layout_csv) {
  auto p = layout_csv;
  p.replace_extension(".json");
  if (p == layout_csv) p += ".json";
  return p;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << content;
}

JointActivationMatrix load_matrix(const std::filesystem::path& path, bool validate) {
  const std::string text = read_file(path);
  return has_json_extension(path) ? parse_matrix_json(text, validate)
                                  : parse_matrix_csv(text, validate);
}

void save_matrix(const std::filesystem::path& path, const JointActivationMatrix& a) {
  write_file(path, has_json_extension(path) ? format_matrix_json(a) : format_matrix_csv(a));
}

ScheduleMatrix load_schedule(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  return has_json_extension(path) ? parse_schedule_json(text) : parse_schedule_csv(text);
}

Assignment load_assignment(const std::filesystem::path& path) {
  return parse_assignment_csv(read_file(path));
}

void save_assignment(const std::filesystem::path& path, const Assignment& a) {
  write_file(path, format_assignment_csv(a));
}

DeviceLayout load_layout(const std::filesystem::path& csv_path) {
  return parse_layout(read_file(csv_path), read_file(sidecar_path(csv_path)));
}

void save_layout(const std::filesystem::path& csv_path, const DeviceLayout& layout) {
  write_file(csv_path, format_layout_csv(layout));
  write_file(sidecar_path(csv_path), format_layout_sidecar(layout));
}

nlohmann::ordered_json to_json(const CollisionReport& report) {
  nlohmann::ordered_json j;
  j["per_channel"] = report.per_channel;
  j["network_average"] = report.network_average;
  j["pairwise_bound"] = report.pairwise_bound;
  return j;
}

nlohmann::ordered_json to_json(const Assignment& a) { return a.channel_of; }

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kOptimal:
      return "optimal";
    case Termination::kTimeLimit:
      return "time_limit";
    case Termination::kNodeLimit:
      return "node_limit";
  }
  return "unknown";
}

nlohmann::ordered_json to_json(const SolverResult& result) {
  nlohmann::ordered_json j;
  j["objective"] = result.objective;
  j["lower_bound"] = result.lower_bound;
  j["gap"] = result.gap;
  j["status"] = to_string(result.status);
  j["nodes_explored"] = result.nodes_explored;
  j["assignment"] = to_json(result.assignment);
  auto log = nlohmann::ordered_json::array();
  for (const auto& entry : result.incumbent_log) {
    log.push_back({{"elapsed_s", entry.elapsed_s}, {"objective", entry.objective}});
  }
  j["incumbent_log"] = std::move(log);
  return j;
}

}  // namespace corrsched::io
