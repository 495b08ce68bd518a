#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sspinv/benchmark.hpp"
#include "sspinv/error.hpp"

namespace sspinv {

// What the figures need: truth, one inverted profile per method and the mean
// per-epoch task loss of the learning methods.
struct PlotInput {
  std::vector<double> grid;
  std::vector<double> truth;
  std::vector<std::pair<std::string, std::vector<double>>> estimates;
  std::vector<std::pair<std::string, std::vector<double>>> loss;
};

// Example estimate: the first successful repetition of each method.
inline PlotInput plotInputOf(const ExperimentReport& r) {
  PlotInput in{r.grid, r.truth, {}, {}};
  for (const auto& m : r.methods) {
    for (const auto& rep : r.runs) {
      const auto it = rep.runs.find(m.method);
      if (it != rep.runs.end() && it->second.rmse) {
        in.estimates.emplace_back(methodName(m.method), it->second.estimate);
        break;
      }
    }
    if (!m.meanLossHistory.empty()) in.loss.emplace_back(methodName(m.method), m.meanLossHistory);
  }
  return in;
}

inline nlohmann::json plotInputToJson(const PlotInput& in) {
  nlohmann::json est = nlohmann::json::object(), loss = nlohmann::json::object();
  for (const auto& [k, v] : in.estimates) est[k] = v;
  for (const auto& [k, v] : in.loss) loss[k] = v;
  return {{"grid", in.grid}, {"truth", in.truth}, {"exampleEstimates", est}, {"meanLossHistory", loss}};
}

// Timing lives only under the top-level "timing" key so that two runs can be
// compared byte for byte after dropping it.
inline nlohmann::json reportToJson(const ExperimentReport& r, bool includeTiming = true) {
  nlohmann::json j;
  j["repetitions"] = r.repetitions;
  j["masterSeed"] = r.masterSeed;
  j["seeds"] = r.seeds;
  auto bands = nlohmann::json::array();
  for (const auto& b : r.bands) bands.push_back({{"label", b.label}, {"top", b.top}, {"bottom", b.bottom}});
  j["bands"] = bands;
  j["grid"] = r.grid;
  j["truth"] = r.truth;

  auto methods = nlohmann::json::array();
  for (const auto& m : r.methods)
    methods.push_back({{"method", methodName(m.method)},
                       {"successes", m.successes},
                       {"failures", m.failures},
                       {"averageRmse", m.averageRmse},
                       {"bandRmse", m.bandRmse},
                       {"meanLossHistory", m.meanLossHistory}});
  j["methods"] = methods;

  auto comps = nlohmann::json::array();
  for (const auto& c : r.comparisons)
    comps.push_back({{"better", methodName(c.better)},
                     {"other", methodName(c.other)},
                     {"wins", c.wins},
                     {"trials", c.trials},
                     {"pValue", c.pValue}});
  j["signTests"] = comps;

  auto runs = nlohmann::json::array();
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    nlohmann::json rec{{"repetition", i}, {"seed", r.runs[i].seed}};
    for (const auto& [m, run] : r.runs[i].runs) {
      nlohmann::json mr;
      if (run.rmse) {
        mr["averageRmse"] = run.rmse->average;
        mr["bandRmse"] = run.rmse->perBand;
      } else {
        mr["error"] = run.error;
      }
      rec[methodName(m)] = mr;
    }
    runs.push_back(rec);
  }
  j["runs"] = runs;
  j["plot"] = plotInputToJson(plotInputOf(r));

  if (includeTiming) {
    nlohmann::json t;
    for (const auto& m : r.methods) t[methodName(m.method)] = m.inversionSeconds;
    j["timing"] = {{"inversionSecondsMedian", t}};
  }
  return j;
}

inline nlohmann::json maskTiming(nlohmann::json j) {
  j.erase("timing");
  return j;
}

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

// Accuracy table: one column per method, rows "Average RMSE" then each band.
inline std::string accuracyMarkdown(const ExperimentReport& r) {
  std::ostringstream os;
  os << "| Methods |";
  for (const auto& m : r.methods) os << ' ' << methodName(m.method) << " (m/s) |";
  os << "\n|---|";
  for (std::size_t i = 0; i < r.methods.size(); ++i) os << "---|";
  os << "\n| Average RMSE |";
  for (const auto& m : r.methods) os << ' ' << (m.successes ? detail::fixed(m.averageRmse, 4) : "n/a") << " |";
  os << '\n';
  for (std::size_t b = 0; b < r.bands.size(); ++b) {
    os << "| " << r.bands[b].label << " |";
    for (const auto& m : r.methods) os << ' ' << (m.successes ? detail::fixed(m.bandRmse[b], 4) : "n/a") << " |";
    os << '\n';
  }
  return os.str();
}

inline std::string timingMarkdown(const ExperimentReport& r) {
  std::ostringstream os;
  os << "| Methods |";
  for (const auto& m : r.methods) os << ' ' << methodName(m.method) << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < r.methods.size(); ++i) os << "---|";
  os << "\n| Inversion stage (s) |";
  for (const auto& m : r.methods) os << ' ' << detail::fixed(m.inversionSeconds, 6) << " |";
  os << '\n';
  return os.str();
}

inline std::string reportMarkdown(const ExperimentReport& r) {
  std::ostringstream os;
  os << "# Inversion benchmark\n\n"
     << r.repetitions << " repetitions, master seed " << r.masterSeed << ".\n\n"
     << "## RMSE of inverted profiles\n\n"
     << accuracyMarkdown(r) << "\n## Time efficiency\n\n"
     << timingMarkdown(r);
  bool anyFailures = false;
  for (const auto& m : r.methods) anyFailures = anyFailures || m.failures > 0;
  if (anyFailures) {
    os << "\nFailed repetitions (excluded from the averages):";
    for (const auto& m : r.methods) os << ' ' << methodName(m.method) << '=' << m.failures;
    os << '\n';
  }
  if (!r.comparisons.empty()) {
    os << "\n## Sign tests (one-sided, lower RMSE wins)\n\n| Pair | Wins | Trials | p |\n|---|---|---|---|\n";
    for (const auto& c : r.comparisons)
      os << "| " << methodName(c.better) << " < " << methodName(c.other) << " | " << c.wins << " | " << c.trials << " | "
         << detail::fixed(c.pValue, 4) << " |\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Plot data: CSV series plus a bare SVG line chart for each.

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

inline const char* seriesColour(std::size_t i) {
  static const char* colours[] = {"#000000", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  return colours[i % 6];
}

}  // namespace detail

// `flipY` draws y downward (depth axes).
inline std::string renderSvg(const std::vector<Series>& series, const std::string& title, const std::string& xLabel,
                             const std::string& yLabel, bool flipY) {
  const double W = 640, H = 480, L = 70, R = 20, T = 40, B = 60;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) {
    const double f = (y - y0) / (y1 - y0);
    return flipY ? T + f * (H - T - B) : H - B - f * (H - T - B);
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n"
     << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"#888\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\" font-size=\"13\">" << xLabel
     << "</text>\n"
     << "<text x=\"18\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
     << H / 2 << ")\">" << yLabel << "</text>\n";
  os << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"11\">" << detail::fixed(x0, 2) << "</text>\n"
     << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\" font-size=\"11\">"
     << detail::fixed(x1, 2) << "</text>\n"
     << "<text x=\"" << L - 4 << "\" y=\"" << py(y0) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
     << detail::fixed(y0, 1) << "</text>\n"
     << "<text x=\"" << L - 4 << "\" y=\"" << py(y1) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
     << detail::fixed(y1, 1) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    os << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << detail::seriesColour(k) << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) os << detail::fixed(px(s.x[i]), 2) << ',' << detail::fixed(py(s.y[i]), 2) << ' ';
    os << "\"/>\n<text x=\"" << W - R - 110 << "\" y=\"" << T + 18 + 16 * k << "\" font-size=\"12\" fill=\""
       << detail::seriesColour(k) << "\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

struct PlotFiles {
  std::filesystem::path profilesCsv, lossCsv, profilesSvg, lossSvg;
};

// Reads the plot section of a saved report.
inline PlotInput plotInputFromReportJson(const nlohmann::json& j) {
  try {
    const auto& p = j.at("plot");
    PlotInput in;
    in.grid = p.at("grid").get<std::vector<double>>();
    in.truth = p.at("truth").get<std::vector<double>>();
    if (in.grid.size() != in.truth.size()) throw ShapeError("plot grid and truth differ in length");
    for (const auto& [k, v] : p.at("exampleEstimates").items()) {
      in.estimates.emplace_back(k, v.get<std::vector<double>>());
      if (in.estimates.back().second.size() != in.grid.size()) throw ShapeError("estimate length != grid length");
    }
    for (const auto& [k, v] : p.at("meanLossHistory").items()) in.loss.emplace_back(k, v.get<std::vector<double>>());
    return in;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("report has no usable plot section: ") + e.what());
  }
}

inline PlotFiles emitPlotData(const PlotInput& in, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
  PlotFiles f{dir / "profiles.csv", dir / "loss.csv", dir / "profiles.svg", dir / "loss.svg"};
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw DataError("cannot write " + p.string());
    return out;
  };

  std::vector<Series> profiles{{"truth", in.truth, in.grid}};
  for (const auto& [name, est] : in.estimates) profiles.push_back({name, est, in.grid});
  {
    auto out = open(f.profilesCsv);
    out << "depth_m";
    for (const auto& s : profiles) out << ',' << s.name;
    out << '\n';
    for (std::size_t i = 0; i < in.grid.size(); ++i) {
      out << in.grid[i];
      for (const auto& s : profiles) out << ',' << detail::fixed(s.x[i], 6);
      out << '\n';
    }
  }
  open(f.profilesSvg) << renderSvg(profiles, "Inverted profile", "sound speed (m/s)", "depth (m)", true);

  std::vector<Series> loss;
  std::size_t epochs = 0;
  for (const auto& [name, l] : in.loss) {
    Series s{name, {}, l};
    for (std::size_t e = 0; e < l.size(); ++e) s.x.push_back(static_cast<double>(e + 1));
    epochs = std::max(epochs, l.size());
    loss.push_back(std::move(s));
  }
  {
    auto out = open(f.lossCsv);
    out << "epoch";
    for (const auto& s : loss) out << ',' << s.name;
    out << '\n';
    for (std::size_t e = 0; e < epochs; ++e) {
      out << e + 1;
      for (const auto& s : loss) out << ',' << (e < s.y.size() ? detail::fixed(s.y[e], 8) : "");
      out << '\n';
    }
  }
  open(f.lossSvg) << renderSvg(loss, "Task training loss", "epoch", "loss", false);
  return f;
}

inline PlotFiles emitPlotData(const ExperimentReport& r, const std::filesystem::path& dir) {
  return emitPlotData(plotInputOf(r), dir);
}

}  // namespace sspinv
