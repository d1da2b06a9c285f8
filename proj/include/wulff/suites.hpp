#pragma once

#include "wulff/config.hpp"

#include <json.hpp>

#include <string>

namespace wulff {

struct SuiteResult {
    std::string name;
    bool passed = true;
    nlohmann::ordered_json details;
};

/// Runs one verification suite on the configured surface and anisotropy.
/// Surface suites use the resolution pair (N/2, N), or (N, 2N) when
/// N/2 < 16, and report the observed convergence order.
SuiteResult run_suite(const std::string& name, const RunConfig& cfg);

/// Convergence rule shared by the surface suites: passes when the fine
/// residual is at the floor or the coarse/fine ratio is at least `ratio`.
bool refines(double coarse, double fine, double floor, double ratio = 3.5);

/// log2(coarse / fine), or null when either value is at the floor.
nlohmann::ordered_json order_estimate(double coarse, double fine, double floor);

} // namespace wulff
