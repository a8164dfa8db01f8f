#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mmfso/mc.hpp"
#include "mmfso/scenario.hpp"

namespace mmfso {

struct ResultRow {
    std::string sweep_var;
    double value = 0.0;
    std::string metric;  // "metric" or "metric@series-label"
    Estimate estimate;
};

// One row per grid point, series and metric, in that nesting order. The
// whole grid is checked before anything is computed. Monte-Carlo streams
// are keyed by (point, series, metric) so the output does not depend on
// the worker count. Failures name the grid point: ConfigError for a point
// whose parameters are rejected, NumericError for a failed evaluation.
std::vector<ResultRow> run_sweep(const Scenario& scenario, const McOptions& options = {});

// Header "sweep_var,value,metric,estimate,half_width_95,n,tag"; numbers
// as %.17g, LF line endings.
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
// {"rows": [{...}, ...]} with the same fields.
void write_json(std::ostream& out, const std::vector<ResultRow>& rows);

}  // namespace mmfso
