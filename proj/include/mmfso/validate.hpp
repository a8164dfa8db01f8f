#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mmfso/mc.hpp"
#include "mmfso/scenario.hpp"

namespace mmfso {

struct CheckResult {
    std::string name;   // "cellular_cdf", "fso_moment", ...
    std::string point;  // where it was evaluated, e.g. "x = 3.2 (p = 0.25)"
    double analytic = 0.0;
    double reference = 0.0;   // Monte-Carlo estimate or exact oracle
    double half_width = 0.0;  // 95% half-width of the reference; 0 for exact oracles
    double tolerance = 0.0;   // allowed |analytic - reference|
    bool pass = false;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool passed() const;
    const CheckResult* first_failure() const;
};

// Analytic-against-simulation checks on the scenario's base configuration
// (no series, no sweep): cellular, FSO and SNDR cdfs and the outage identity
// at five quantiles each, cellular and FSO moments, and, when the selection
// degenerates (M = k = 1, rho = 1, no interference), the cellular cdf
// against the Gamma cdf to 1e-6. Monte-Carlo checks pass within three
// 95% half-widths.
ValidationReport run_validation(const Scenario& scenario, const McOptions& options = {});

void print_validation(std::ostream& out, const ValidationReport& report);

}  // namespace mmfso
