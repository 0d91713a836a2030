#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "corrsched/model.hpp"
#include "corrsched/sim.hpp"
#include "corrsched/solver.hpp"

namespace corrsched::io {

// Probabilities are written with 17 significant digits so doubles round-trip.
std::string format_double(double x);

// Matrix documents: JSON {"dim": N, "entries": [[...], ...]} or CSV with N
// rows of N comma-separated values (diagonal included).
JointActivationMatrix parse_matrix_json(std::string_view text, bool validate = true);
JointActivationMatrix parse_matrix_csv(std::string_view text, bool validate = true);
std::string format_matrix_json(const JointActivationMatrix& a);
std::string format_matrix_csv(const JointActivationMatrix& a);

// Schedule documents: CSV with N rows of L values, or
// JSON {"rows": N, "cols": L, "entries": [[...], ...]}.
ScheduleMatrix parse_schedule_csv(std::string_view text);
ScheduleMatrix parse_schedule_json(std::string_view text);
std::string format_schedule_csv(const ScheduleMatrix& e);

// Assignment documents: CSV with header "device,channel", one row per device
// in ascending device order.
Assignment parse_assignment_csv(std::string_view text);
std::string format_assignment_csv(const Assignment& a);

// Layout documents: CSV "device,x,y" plus a JSON sidecar
// {"region_radius": R, "density": rho}.
DeviceLayout parse_layout(std::string_view csv, std::string_view sidecar_json);
std::string format_layout_csv(const DeviceLayout& layout);
std::string format_layout_sidecar(const DeviceLayout& layout);
std::filesystem::path sidecar_path(const std::filesystem::path& layout_csv);

// File helpers. The format is chosen by extension (.json, otherwise CSV).
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
JointActivationMatrix load_matrix(const std::filesystem::path& path, bool validate = true);
void save_matrix(const std::filesystem::path& path, const JointActivationMatrix& a);
ScheduleMatrix load_schedule(const std::filesystem::path& path);
Assignment load_assignment(const std::filesystem::path& path);
void save_assignment(const std::filesystem::path& path, const Assignment& a);
DeviceLayout load_layout(const std::filesystem::path& csv_path);
void save_layout(const std::filesystem::path& csv_path, const DeviceLayout& layout);

// Report objects.
nlohmann::ordered_json to_json(const CollisionReport& report);
nlohmann::ordered_json to_json(const SolverResult& result);
nlohmann::ordered_json to_json(const Assignment& a);
std::string_view to_string(Termination t);

}  // namespace corrsched::io
