#pragma once

#include "wulff/anisotropy.hpp"
#include "wulff/geometry.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wulff {

struct AnisotropySpec {
    std::string kind = "isotropic";   ///< isotropic | quadric | pnorm | dip
    std::vector<std::vector<double>> q; ///< quadric matrix; default diag(4, 1, ..., 1)
    int p = 4;
    double blend = 1.0;
    std::vector<double> axis;          ///< dip axis; default e_0
    double depth = 0.1;
    double width = 0.5;
};

struct SurfaceSpec {
    std::string kind = "sphere";       ///< sphere | ellipsoid | wulff | torus
    double radius = 1.0;
    std::vector<double> semi_axes;     ///< default (1.5, 1, 0.75[, 1.25])
    double scale = 1.0;
    double major = 2.0;
    double minor = 1.0;
    std::vector<double> translation;
    std::optional<AnisotropySpec> model; ///< Wulff model, defaults to the run anisotropy
};

struct ProblemSpec {
    int r = 0;
    int s = 0;
    std::vector<double> a{1.0};
};

struct RunConfig {
    int n = 2;
    int resolution = 32;
    std::string out = "out";
    int workers = 1;
    std::uint64_t seed = 12345;
    int samples = 1000;
    SurfaceSpec surface;
    AnisotropySpec anisotropy;
    ProblemSpec problem;
    std::vector<std::string> suites;
    std::map<std::string, double> tolerances;
    double tol_scale = 1.0;

    /// Tolerance `name` times tol_scale, with the given default.
    double tolerance(const std::string& name, double fallback) const;
};

/// Suites understood by the verify command.
const std::vector<std::string>& known_suites();

/// Parses and validates a JSON config. Unknown keys raise InputError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
void validate_config(const RunConfig& cfg);

/// Canonical JSON form of a config (ordered keys).
nlohmann::ordered_json config_to_json(const RunConfig& cfg);
/// FNV-1a 64-bit hash of the canonical config dump, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

AnisotropyModel make_model(const AnisotropySpec& spec, int n);
ChartMap make_surface(const SurfaceSpec& spec, const AnisotropyModel& run_model, int n);

} // namespace wulff
