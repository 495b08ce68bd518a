#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sspinv/error.hpp"
#include "sspinv/profile.hpp"
#include "sspinv/spatiotemporal.hpp"

namespace sspinv::io {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Strict finite number parse; NaN and Inf are rejected.
inline double parseNumber(std::string_view text, std::string_view what) {
  const std::string buf(trim(text));
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size())
    throw DataError("cannot parse " + std::string(what) + ": '" + buf + "'");
  if (!std::isfinite(v)) throw DataError(std::string(what) + " is not finite: '" + buf + "'");
  return v;
}

inline std::vector<std::string_view> splitCsv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string formatNumber(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// Profile CSV:
//   # id=<id>
//   # lon=<deg, east positive>
//   # lat=<deg>
//   # day=<1..366>
//   depth_m,speed_mps
//   0,1540.1
//   ...
inline SoundSpeedProfile readProfileCsv(std::istream& in, const std::string& source = "<stream>") {
  std::string id;
  GeoPoint loc;
  int day = 1;
  std::vector<double> depths, speeds;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    auto view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      view.remove_prefix(1);
      view = trim(view);
      const auto eq = view.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = trim(view.substr(0, eq));
      const auto value = trim(view.substr(eq + 1));
      if (key == "id") id = std::string(value);
      else if (key == "lon") loc.longitude = parseNumber(value, "lon");
      else if (key == "lat") loc.latitude = parseNumber(value, "lat");
      else if (key == "day") day = static_cast<int>(parseNumber(value, "day"));
      continue;
    }
    if (view.starts_with("depth")) continue;
    const auto cells = splitCsv(view);
    if (cells.size() != 2)
      throw DataError(source + ":" + std::to_string(lineNo) + ": expected depth_m,speed_mps");
    depths.push_back(parseNumber(cells[0], "depth"));
    speeds.push_back(parseNumber(cells[1], "speed"));
  }
  return SoundSpeedProfile(std::move(depths), std::move(speeds), loc, day, std::move(id));
}

inline SoundSpeedProfile readProfileCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open profile file " + path.string());
  return readProfileCsv(in, path.string());
}

inline void writeProfileCsv(std::ostream& out, const SoundSpeedProfile& p) {
  out << "# id=" << p.id() << '\n'
      << "# lon=" << formatNumber(p.location().longitude) << '\n'
      << "# lat=" << formatNumber(p.location().latitude) << '\n'
      << "# day=" << p.dayOfYear() << '\n'
      << "depth_m,speed_mps\n";
  for (std::size_t i = 0; i < p.size(); ++i)
    out << formatNumber(p.depths()[i]) << ',' << formatNumber(p.speeds()[i]) << '\n';
}

inline void writeProfileCsv(const std::filesystem::path& path, const SoundSpeedProfile& p) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write profile file " + path.string());
  writeProfileCsv(out, p);
}

// Every *.csv in a directory, sorted by file name.
inline std::vector<SoundSpeedProfile> readProfileDirectory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<SoundSpeedProfile> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(readProfileCsv(f));
  return out;
}

// Cluster manifest: [{"clusterId": 0, "memberIds": ["a", "b"]}, ...]
inline nlohmann::json clusterManifestToJson(std::span<const ProfileCluster> clusters) {
  auto arr = nlohmann::json::array();
  for (const auto& c : clusters) arr.push_back({{"clusterId", c.id}, {"memberIds", c.members}});
  return arr;
}

inline std::vector<ProfileCluster> clusterManifestFromJson(const nlohmann::json& j) {
  if (!j.is_array()) throw DataError("cluster manifest must be a JSON array");
  std::vector<ProfileCluster> out;
  for (const auto& e : j) {
    ProfileCluster c;
    c.id = e.at("clusterId").get<int>();
    c.members = e.at("memberIds").get<std::vector<std::string>>();
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace sspinv::io
