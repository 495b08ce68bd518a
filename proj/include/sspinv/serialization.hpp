#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sspinv/error.hpp"
#include "sspinv/linalg.hpp"
#include "sspinv/network.hpp"
#include "sspinv/profile_io.hpp"
#include "sspinv/ray.hpp"

namespace sspinv::io {

// Observation CSV:
//   # pings=30
//   # receivers=4
//   # sigma=0.0001
//   # seed=17
//   ping,receiver,time_s
//   0,0,2.4183...
// Rows may come in any order but must cover every (ping, receiver) once.
struct ObservationFile {
  TravelTimeObservation observation;
  double noiseSigma = 0.0;
  std::uint64_t seed = 0;
};

inline void writeObservationCsv(std::ostream& out, const TravelTimeObservation& o, double sigma, std::uint64_t seed) {
  o.validate();
  out << "# pings=" << o.pingCount << '\n'
      << "# receivers=" << o.receiverCount << '\n'
      << "# sigma=" << formatNumber(sigma) << '\n'
      << "# seed=" << seed << '\n'
      << "ping,receiver,time_s\n";
  for (std::size_t r = 0; r < o.receiverCount; ++r)
    for (std::size_t p = 0; p < o.pingCount; ++p) out << p << ',' << r << ',' << formatNumber(o.at(p, r)) << '\n';
}

inline void writeObservationCsv(const std::filesystem::path& path, const TravelTimeObservation& o, double sigma,
                                std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write observation file " + path.string());
  writeObservationCsv(out, o, sigma, seed);
}

inline ObservationFile readObservationCsv(std::istream& in, const std::string& source = "<stream>") {
  ObservationFile f;
  bool havePings = false, haveReceivers = false;
  struct Row {
    std::size_t ping, receiver;
    double time;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t lineNo = 0;
  auto count = [&](std::string_view v, const char* what) {
    const double d = parseNumber(v, what);
    if (d < 0.0 || d != static_cast<double>(static_cast<std::size_t>(d)))
      throw DataError(source + ":" + std::to_string(lineNo) + ": " + what + " must be a non-negative integer");
    return static_cast<std::size_t>(d);
  };
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
      if (key == "pings") {
        f.observation.pingCount = count(value, "pings");
        havePings = true;
      } else if (key == "receivers") {
        f.observation.receiverCount = count(value, "receivers");
        haveReceivers = true;
      } else if (key == "sigma") {
        f.noiseSigma = parseNumber(value, "sigma");
      } else if (key == "seed") {
        f.seed = std::stoull(std::string(value));
      }
      continue;
    }
    if (view.starts_with("ping")) continue;
    const auto cells = splitCsv(view);
    if (cells.size() != 3) throw DataError(source + ":" + std::to_string(lineNo) + ": expected ping,receiver,time_s");
    rows.push_back({count(cells[0], "ping"), count(cells[1], "receiver"), parseNumber(cells[2], "time")});
  }
  if (!havePings || !haveReceivers) throw DataError(source + ": missing '# pings=' or '# receivers=' header");
  auto& o = f.observation;
  o.times.assign(o.pingCount * o.receiverCount, 0.0);
  std::vector<bool> seen(o.times.size(), false);
  for (const auto& r : rows) {
    if (r.ping >= o.pingCount || r.receiver >= o.receiverCount) throw ShapeError(source + ": index outside the header's counts");
    const auto k = r.receiver * o.pingCount + r.ping;
    if (seen[k]) throw DataError(source + ": duplicate row for ping " + std::to_string(r.ping));
    seen[k] = true;
    o.times[k] = r.time;
  }
  if (rows.size() != o.times.size()) throw ShapeError(source + ": observation is missing rows");
  o.validate();
  return f;
}

inline ObservationFile readObservationCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open observation file " + path.string());
  return readObservationCsv(in, path.string());
}

inline nlohmann::json matrixToJson(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

inline Matrix matrixFromJson(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw ShapeError("empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw ShapeError("ragged matrix rows");
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

inline nlohmann::json standardizerToJson(const Standardizer& s) {
  return {{"inputMean", s.inputMean}, {"inputStd", s.inputStd}, {"labelMean", s.labelMean}, {"labelStd", s.labelStd}};
}

inline Standardizer standardizerFromJson(const nlohmann::json& j) {
  Standardizer s;
  s.inputMean = j.at("inputMean").get<std::vector<double>>();
  s.inputStd = j.at("inputStd").get<std::vector<double>>();
  s.labelMean = j.at("labelMean").get<double>();
  s.labelStd = j.at("labelStd").get<double>();
  if (s.inputMean.size() != s.inputStd.size()) throw ShapeError("standardizer lengths differ");
  return s;
}

// Checkpoint JSON: {config, seed, grid, standardizer, W_h, W_o}.
struct Checkpoint {
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::vector<double> grid;  // depth of each network output
  Standardizer standardizer;
  NetworkParams params;
};

inline nlohmann::json checkpointToJson(const Checkpoint& c) {
  return {{"config", c.config},
          {"seed", c.seed},
          {"grid", c.grid},
          {"standardizer", standardizerToJson(c.standardizer)},
          {"W_h", matrixToJson(c.params.hidden)},
          {"W_o", matrixToJson(c.params.output)}};
}

inline Checkpoint checkpointFromJson(const nlohmann::json& j) {
  try {
    Checkpoint c;
    c.config = j.value("config", nlohmann::json::object());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.grid = j.at("grid").get<std::vector<double>>();
    c.standardizer = standardizerFromJson(j.at("standardizer"));
    c.params.hidden = matrixFromJson(j.at("W_h"));
    c.params.output = matrixFromJson(j.at("W_o"));
    if (c.params.output.cols() != c.params.hidden.rows() + 1) throw ShapeError("W_o does not match W_h");
    if (c.params.hidden.cols() != c.standardizer.inputMean.size() + 1)
      throw ShapeError("W_h does not match the standardizer");
    if (c.grid.size() != c.params.output.rows()) throw ShapeError("grid length != output size");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

inline nlohmann::json readJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + " is not valid JSON: " + e.what());
  }
}

inline void writeJsonFile(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace sspinv::io
