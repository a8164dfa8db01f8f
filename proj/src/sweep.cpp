#include "mmfso/sweep.hpp"

#include <cmath>
#include <numbers>

#include "mmfso/errors.hpp"

namespace mmfso {

namespace {

struct PointContext {
    const PointConfig& pc;
    const E2eSystem& sys;
    const McSettings& mc;
    const McOptions& opts;
    std::uint64_t stream;
};

RngSpec rng_for(const PointContext& c) { return {c.mc.seed, c.stream}; }

Estimate exact(const Evaluated& e) { return Estimate::exact(e.value, e.tag); }

Estimate complement(Estimate e) {
    e.mean = 1.0 - e.mean;
    return e;
}

// Converts a rate in nats/s/Hz to the configured output units.
Estimate in_rate_units(Estimate e, const PointConfig& pc) {
    double f = 1.0;
    if (pc.rate_units == "bits" || pc.rate_units == "bits_per_s") f /= std::numbers::ln2;
    if (pc.rate_units == "nats_per_s" || pc.rate_units == "bits_per_s") f *= pc.bandwidth_hz;
    e.mean *= f;
    e.half_width_95 *= f;
    return e;
}

Estimate evaluate(const std::string& metric, const PointContext& c) {
    const auto& sys = c.sys;
    const auto& pc = c.pc;
    const double varpi = sys.varpi();
    if (metric == "outage") return exact(sys.outage(pc.beta));
    if (metric == "outage_mc") return sys.outage_mc({pc.beta}, c.mc.samples, rng_for(c), c.opts).front();
    if (metric == "outage_asymptote") return Estimate::exact(sys.outage_asymptote(pc.beta));
    if (metric == "coverage") return complement(exact(sys.outage(pc.beta)));
    if (metric == "coverage_mc") return complement(sys.outage_mc({pc.beta}, c.mc.samples, rng_for(c), c.opts).front());
    if (metric == "cellular_cdf") return exact(sys.cellular_cdf(pc.beta));
    if (metric == "cellular_coverage") return complement(exact(sys.cellular_cdf(pc.beta)));
    if (metric == "cellular_coverage_mc") {
        const double beta = pc.beta;
        return estimate([&](Rng& g) { return sys.cellular().sample(g) > beta ? 1.0 : 0.0; }, c.mc.samples,
                        rng_for(c), c.opts);
    }
    if (metric == "sndr_cdf") return exact(sys.sndr_cdf(pc.beta));
    if (metric == "error_prob")
        return pc.quadrature_error_prob ? exact(sys.error_prob_quadrature(pc.modulation))
                                        : sys.error_prob(pc.modulation, c.mc.samples, rng_for(c), c.opts);
    if (metric == "error_prob_mc") return sys.error_prob(pc.modulation, c.mc.samples, rng_for(c), c.opts);
    if (metric == "error_prob_quad") return exact(sys.error_prob_quadrature(pc.modulation));
    if (metric == "rate" || metric == "rate_c1" || metric == "rate_c2") {
        const RateBreakdown r = sys.rate();
        const double v = metric == "rate" ? r.c : metric == "rate_c1" ? r.c1 : r.c2;
        return in_rate_units(Estimate::exact(v, metric == "rate_c2" ? Tag::Analytic : r.tag), pc);
    }
    if (metric == "rate_mc") return in_rate_units(sys.rate_per_realization_mc(c.mc.samples, rng_for(c), c.opts), pc);
    if (metric == "rate_c2_mc")
        return in_rate_units(c2_rate_mc(sys.kappa(), varpi, sys.fso(), c.mc.samples, rng_for(c), c.opts), pc);
    if (metric == "rate_c2_approx") return in_rate_units(Estimate::exact(c2_approx(sys.kappa(), varpi, sys.fso())), pc);
    if (metric == "rate_c2_jensen") return in_rate_units(Estimate::exact(c2_jensen(sys.kappa(), varpi, sys.fso())), pc);
    if (metric == "rate_c2_ceiling") return in_rate_units(Estimate::exact(c2_ceiling(sys.kappa(), varpi)), pc);
    if (metric == "rate_coverage") return exact(sys.rate_coverage(pc.target_rate, pc.bandwidth_hz));
    if (metric == "rate_coverage_mc") {
        const double thr = E2eSystem::rate_threshold(pc.target_rate, pc.bandwidth_hz);
        if (std::isinf(thr)) return Estimate::exact(0.0);
        // P[gamma >= thr] = 1 - P[gamma < thr]; the estimator counts gamma >= thr directly.
        return estimate(
            [&](Rng& g) {
                const auto [a, b] = sys.sample(g);
                return e2e_sindr(a, b) >= thr ? 1.0 : 0.0;
            },
            c.mc.samples, rng_for(c), c.opts);
    }
    if (metric == "diversity_gain") return Estimate::exact(sys.diversity_gain());
    if (metric == "kappa") return Estimate::exact(sys.kappa());
    throw ConfigError("unknown metric '" + metric + "'");
}

}  // namespace

std::vector<ResultRow> run_sweep(const Scenario& scenario, const McOptions& options) {
    const SweepSpec spec = scenario.sweep();
    const McSettings mc = scenario.mc();
    McOptions opts = options;
    opts.chunk_size = mc.chunk_size;
    const auto& series = scenario.series();
    const std::size_t n_series = series.empty() ? 1 : series.size();

    std::vector<ResultRow> rows;
    rows.reserve(spec.values.size() * n_series * spec.metrics.size());
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        const double x = spec.values[i];
        for (std::size_t s = 0; s < n_series; ++s) {
            const int sidx = series.empty() ? -1 : static_cast<int>(s);
            const std::string at = spec.var + " = " + format_number(x) +
                                   (series.empty() ? "" : " (series " + series[s].label + ")");
            try {
                const PointConfig pc = scenario.point(sidx, x);
                const E2eSystem sys(pc.system);
                for (std::size_t m = 0; m < spec.metrics.size(); ++m) {
                    const std::string& metric = spec.metrics[m];
                    opts.context = at + ", metric " + metric;
                    const std::uint64_t stream = (static_cast<std::uint64_t>(i) << 32) |
                                                 (static_cast<std::uint64_t>(s) << 16) | static_cast<std::uint64_t>(m);
                    const PointContext ctx{pc, sys, mc, opts, stream};
                    ResultRow row;
                    row.sweep_var = spec.var;
                    row.value = x;
                    row.metric = series.empty() ? metric : metric + "@" + series[s].label;
                    row.estimate = evaluate(metric, ctx);
                    if (std::isnan(row.estimate.mean))
                        throw NumericError("metric " + metric + " evaluated to NaN");
                    rows.push_back(std::move(row));
                }
            } catch (const ConfigError& e) {
                throw ConfigError("at " + at + ": " + e.what());
            } catch (const NumericError& e) {
                throw NumericError("at " + at + ": " + e.what());
            }
        }
    }
    return rows;
}

}  // namespace mmfso
