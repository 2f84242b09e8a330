/**
 * @file io.hpp
 * @brief Model files (JSON) and two-column signal files (CSV).
 *
 * Model file layout:
 *   { "format_version": 1, "degree": ..., "knot_param": ...,
 *     "input_lags": [...], "output_lags": [...],
 *     "regressor_order": "inputs_then_outputs",
 *     "scaling": {"u_min", "u_max", "y_min", "y_max"},
 *     "ranks": [1, r_1, ..., 1], "canonical_site": p or null,
 *     "cores": [{"shape": [r_prev, k, r_next], "values": [...]}, ...] }
 * Core values are listed in first-index-fastest order. Doubles are written in
 * their shortest round-trip decimal form, so save/load is value-exact.
 *
 * Signal file layout: header `u,y`, then one `u,y` sample per line.
 */

#pragma once

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "tnbs/bspline.hpp"
#include "tnbs/error.hpp"
#include "tnbs/model.hpp"
#include "tnbs/tensor_train.hpp"

namespace tnbs {

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json model_to_json(const TnbsModel& model) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["degree"] = model.basis().degree();
  j["knot_param"] = model.basis().knot_param();
  j["input_lags"] = model.lags().input_lags;
  j["output_lags"] = model.lags().output_lags;
  j["regressor_order"] = "inputs_then_outputs";
  const Scaling& s = model.scaling();
  j["scaling"] = {{"u_min", s.u_min}, {"u_max", s.u_max}, {"y_min", s.y_min}, {"y_max", s.y_max}};
  j["ranks"] = model.weights().ranks();
  const auto site = model.weights().canonical_site();
  j["canonical_site"] = site ? nlohmann::json(*site) : nlohmann::json(nullptr);
  nlohmann::json cores = nlohmann::json::array();
  for (const DenseTensor& c : model.weights().cores()) {
    cores.push_back({{"shape", c.shape()}, {"values", std::vector<double>(c.values().begin(), c.values().end())}});
  }
  j["cores"] = std::move(cores);
  return j;
}

inline TnbsModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != kModelFormatVersion) {
      throw InputError("unsupported model format version " + j.at("format_version").dump());
    }
    if (j.contains("regressor_order") && j.at("regressor_order") != "inputs_then_outputs") {
      throw InputError("unsupported regressor order " + j.at("regressor_order").dump());
    }
    BasisConfig basis = make_basis(j.at("degree").get<int>(), j.at("knot_param").get<int>());
    LagSpec lags{j.at("input_lags").get<std::vector<std::size_t>>(), j.at("output_lags").get<std::vector<std::size_t>>()};
    const auto& s = j.at("scaling");
    Scaling scaling{s.at("u_min").get<double>(), s.at("u_max").get<double>(), s.at("y_min").get<double>(),
                    s.at("y_max").get<double>()};
    std::vector<DenseTensor> cores;
    for (const auto& c : j.at("cores")) {
      cores.emplace_back(c.at("shape").get<Shape>(), c.at("values").get<std::vector<double>>());
    }
    std::optional<std::size_t> site;
    if (j.contains("canonical_site") && !j.at("canonical_site").is_null()) {
      site = j.at("canonical_site").get<std::size_t>();
    }
    TensorTrain weights(std::move(cores), site);
    if (j.contains("ranks") && j.at("ranks").get<std::vector<std::size_t>>() != weights.ranks()) {
      throw InputError("model file ranks do not match the core shapes");
    }
    return TnbsModel(std::move(basis), std::move(lags), std::move(weights), scaling);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  } catch (const DimensionError& e) {
    throw InputError(std::string("inconsistent model file: ") + e.what());
  } catch (const ConfigError& e) {
    throw InputError(std::string("invalid model file: ") + e.what());
  }
}

/// Writes through a temporary file so a failed write never leaves a partial file behind.
inline void write_text_atomically(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!out) throw InputError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot move model file into place at " + path.string());
  }
}

inline void save_model(const TnbsModel& model, const std::filesystem::path& path) {
  write_text_atomically(path, model_to_json(model).dump(1) + "\n");
}

inline TnbsModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("model file " + path.string() + " is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

// --- signals ---------------------------------------------------------------

struct SignalPair {
  Signal u;
  Signal y;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw InputError("line " + std::to_string(line) + ": cannot parse number '" + std::string(field) + "'");
  }
  if (!std::isfinite(v)) throw InputError("line " + std::to_string(line) + ": non-finite value");
  return v;
}

}  // namespace detail

inline SignalPair parse_signal_csv(std::istream& in) {
  SignalPair out;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    if (!header_seen) {
      if (row != "u,y") throw InputError("line " + std::to_string(lineno) + ": expected header 'u,y'");
      header_seen = true;
      continue;
    }
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      throw InputError("line " + std::to_string(lineno) + ": expected exactly two columns");
    }
    out.u.push_back(detail::parse_number(row.substr(0, comma), lineno));
    out.y.push_back(detail::parse_number(row.substr(comma + 1), lineno));
  }
  if (!header_seen) throw InputError("signal file is empty");
  if (out.u.empty()) throw InputError("signal file has no samples");
  return out;
}

inline SignalPair read_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open data file " + path.string());
  try {
    return parse_signal_csv(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string signal_csv(std::span<const double> u, std::span<const double> y) {
  if (u.size() != y.size()) throw DimensionError("signal columns differ in length");
  std::string out = "u,y\n";
  for (std::size_t n = 0; n < u.size(); ++n) out += format_double(u[n]) + "," + format_double(y[n]) + "\n";
  return out;
}

inline void write_signal_csv(const std::filesystem::path& path, std::span<const double> u, std::span<const double> y) {
  write_text_atomically(path, signal_csv(u, y));
}

}  // namespace tnbs
