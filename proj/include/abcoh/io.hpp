#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "abcoh/bochner.hpp"
#include "abcoh/cohomology.hpp"

namespace abcoh {

using ojson = nlohmann::ordered_json;

// --- group descriptors: {"free_rank": d, "torsion": [n1, ...]} ---
GroupDescriptor group_from_json(const ojson& j);
ojson group_to_json(const GroupDescriptor& g);

// --- measures ---
// Input spec:
//   {"group": {...},          (optional when a group is supplied externally)
//    "atoms": [{"theta": [...], "torsion": [...], "weight": w}, ...],
//    "density": {"kind": "poisson"|"uniform_arc"|"uniform"|"table"|"mixture",
//                ... params ..., "weight": w},
//    "grid_size": M}
// The loaded measure is normalized to total mass 1; the factor that was
// divided out is reported alongside.
struct LoadedMeasure {
    DualMeasure measure;
    double normalization = 1.0;
};
LoadedMeasure measure_from_json(const ojson& j,
                                const std::optional<GroupDescriptor>& group = {});
// Emits the grid as an explicit table so the file round-trips bit-exactly.
ojson measure_to_json(const DualMeasure& mu);

// --- positive definite functions ---
// {"group": {...}, "window_radius": N,
//  "values": [{"x": [...], "t": [...], "re": a, "im": b}, ...]}
PdFunction function_from_json(const ojson& j);
ojson function_to_json(const PdFunction& phi);

// --- classification reports ---
const char* verdict_name(Verdict v);
ojson report_to_json(const ClassificationReport& report, double normalization,
                     const std::string& witness_csv = "");

// --- CSV artifacts (deterministic %.17g formatting) ---
void write_cocycle_csv(const std::filesystem::path& path, const Cocycle& b);
Cocycle cocycle_from_csv(const std::filesystem::path& path, DualMeasure measure);

void write_residual_csv(const std::filesystem::path& path,
                        const std::vector<ApproxStage>& stages);
void write_shells_csv(const std::filesystem::path& path,
                      const std::vector<Shell>& shells);
void write_obstruction_csv(const std::filesystem::path& path,
                           const ShellCocycle& sc);
// Measured translate-defect sums over the boxes K_l, l = 1..max_box:
// columns l, tail_sum (max over x in K_l of sum_{n>=l}), tail_limit,
// total_sum, total_limit.
void write_defect_csv(const std::filesystem::path& path, const ShellCocycle& sc,
                      int max_box);

// File helpers.
ojson read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const ojson& j);
std::string format_double(double v);

}  // namespace abcoh
