#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "sineflow/geometry.hpp"

namespace sineflow {

using json = nlohmann::json;

// CSV: optional "# closed=true|false" comment, header "x,y", one row per vertex.
void write_polyline_csv(std::ostream& os, const Polyline& p);
Polyline read_polyline_csv(std::istream& is);

json polyline_to_json(const Polyline& p);
Polyline polyline_from_json(const json& j);

// Dispatches on extension (.csv or .json).
void save_polyline(const std::filesystem::path& path, const Polyline& p);
Polyline load_polyline(const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

// Shortest decimal form that round-trips.
std::string format_double(double v);

}  // namespace sineflow
