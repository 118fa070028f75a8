#include "sineflow/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sineflow/error.hpp"

namespace sineflow {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) fail(ErrorKind::InvalidInput, "cannot format number");
  return std::string(buf, end);
}

void write_polyline_csv(std::ostream& os, const Polyline& p) {
  os << "# closed=" << (p.closed() ? "true" : "false") << "\n";
  os << "x,y\n";
  for (const auto& v : p.vertices()) os << format_double(v.x) << ',' << format_double(v.y) << '\n';
}

Polyline read_polyline_csv(std::istream& is) {
  std::string line;
  bool closed = false;
  bool header = false;
  std::vector<Point2> pts;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("closed=true") != std::string::npos) closed = true;
      continue;
    }
    if (!header) {
      header = true;
      if (line.find_first_of("xX") != std::string::npos) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail(ErrorKind::InvalidInput, "malformed CSV row: " + line);
    try {
      pts.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidInput, "malformed CSV row: " + line);
    }
  }
  return Polyline(std::move(pts), closed);
}

json polyline_to_json(const Polyline& p) {
  json verts = json::array();
  for (const auto& v : p.vertices()) verts.push_back({v.x, v.y});
  return {{"closed", p.closed()}, {"vertices", std::move(verts)}};
}

Polyline polyline_from_json(const json& j) {
  try {
    std::vector<Point2> pts;
    for (const auto& v : j.at("vertices")) pts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    return Polyline(std::move(pts), j.value("closed", false));
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("malformed polyline JSON: ") + e.what());
  }
}

void save_polyline(const std::filesystem::path& path, const Polyline& p) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::InvalidInput, "cannot write " + path.string());
  if (path.extension() == ".json")
    os << polyline_to_json(p).dump() << '\n';
  else
    write_polyline_csv(os, p);
}

Polyline load_polyline(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::InvalidInput, "cannot read " + path.string());
  if (path.extension() == ".json") return polyline_from_json(json::parse(is));
  return read_polyline_csv(is);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::InvalidInput, "cannot read " + path.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::InvalidInput, "cannot write " + path.string());
  os << j.dump(2) << '\n';
}

}  // namespace sineflow
