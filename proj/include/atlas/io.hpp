#ifndef ATLAS_IO_HPP
#define ATLAS_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "atlas/geom.hpp"
#include "atlas/integrate.hpp"
#include "atlas/localbif.hpp"
#include "atlas/mesh.hpp"
#include "atlas/sweep.hpp"

#include <json.hpp>

namespace atlas::io {

// All writers go through a temp file + rename, so outputs never appear
// partially written.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// OBJ subset: `v x y z`, `f i j k` (1-based), sharp-fold polylines as `l`
// lines grouped under `g sharp-fold`. Vertices carry 17 significant digits.
std::string mesh_to_obj(const SurfaceMesh& mesh);
SurfaceMesh mesh_from_obj(const std::string& text);  // throws std::runtime_error on bad input
void write_mesh(const std::filesystem::path& path, const SurfaceMesh& mesh);
SurfaceMesh read_mesh(const std::filesystem::path& path);

// Polyline CSV: `curve_id,seq,x,y,z` with one `# curve <id> closed=... role=...`
// comment per curve. Extra comment lines (e.g. continuation singular-point
// reports) may be appended by callers.
std::string polylines_to_csv(const std::vector<Polyline3>& lines);
std::vector<Polyline3> polylines_from_csv(const std::string& text);
void write_polylines(const std::filesystem::path& path, const std::vector<Polyline3>& lines);
std::vector<Polyline3> read_polylines(const std::filesystem::path& path);

// Trajectory CSV: header `t,x,y,z`, 17 significant digits, LF endings.
std::string trajectory_to_csv(const Trajectory& traj);
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);

// Continuation curve as polyline CSV (first three extended coordinates,
// zero-padded below dimension three) with termination and singular-point
// reports appended as `#` comment lines.
std::string continuation_to_csv(const ContinuationCurve& curve);
void write_continuation(const std::filesystem::path& path, const ContinuationCurve& curve);

// Spike grid CSV: `p1,p2,class,spikes,period` plus `#` metadata lines that
// make the file self-describing for the boundary command.
std::string grid_to_csv(const SpikeGrid& grid);
SpikeGrid grid_from_csv(const std::string& text);
void write_grid(const std::filesystem::path& path, const SpikeGrid& grid);
SpikeGrid read_grid(const std::filesystem::path& path);

// Color-mapped renderings of a spike grid (blue = 0 spikes through brown,
// darkest brown = chaotic/unresolved).
std::string grid_to_ppm(const SpikeGrid& grid);   // binary P6
std::string grid_to_svg(const SpikeGrid& grid);
void write_grid_ppm(const std::filesystem::path& path, const SpikeGrid& grid);
void write_grid_svg(const std::filesystem::path& path, const SpikeGrid& grid);
int ppm_distinct_colors(const std::string& ppm);

// JSON reports with stable field names; eps values survive round-trips.
nlohmann::json morse_report_json(const MorseReport& report);
nlohmann::json folds_json(const std::vector<FoldPoint>& folds);
nlohmann::json cusps_json(const FoldSet& set);
nlohmann::json reeb_json(const ReebGraph& graph);
nlohmann::json topology_json(const TopologyClass& cls);

}  // namespace atlas::io

#endif
