#pragma once

#include "wulff/config.hpp"
#include "wulff/stability.hpp"

#include <json.hpp>

#include <span>
#include <string>

namespace wulff {

inline constexpr const char* tool_name = "wulffcheck";
inline constexpr const char* tool_version = "0.1.0";

/// OFF mesh of an n = 2 immersion: quads between neighboring grid rows, and
/// one polygon per chart pole for sphere charts. Faces are oriented outward.
void write_off(const SampledImmersion& imm, const std::string& path);

/// CSV with columns chart,i,j[,k],value (one row per node).
void write_field_csv(const SampledImmersion& imm, std::span<const double> field, const std::string& path);

/// CSV with columns chart,i,j[,k],x0,...,xn of node positions.
void write_positions_csv(const SampledImmersion& imm, const std::string& path);

/// Writes JSON with a trailing newline (2-space indent, keys in insertion order).
void write_json(const nlohmann::ordered_json& j, const std::string& path);

/// Header shared by all reports: tool, version, config hash, resolution.
nlohmann::ordered_json report_header(const RunConfig& cfg, const std::string& command);

nlohmann::ordered_json to_json(const StabilityReport& rep);

/// Creates a directory (and parents) if missing.
void ensure_directory(const std::string& path);

} // namespace wulff
