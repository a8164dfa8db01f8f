#include "mmfso/validate.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <ostream>

#include <boost/math/special_functions/gamma.hpp>

#include "mmfso/errors.hpp"

namespace mmfso {

namespace {

constexpr double kCiMultiple = 3.0;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// x with cdf(x) = p, by bracketing and bisection in log x.
double quantile(const std::function<double(double)>& cdf, double p) {
    double lo = 1.0, hi = 1.0;
    for (int i = 0; i < 200 && cdf(lo) >= p; ++i) lo *= 0.1;
    for (int i = 0; i < 200 && cdf(hi) < p; ++i) hi *= 10.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = std::sqrt(lo * hi);
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

class Checker {
public:
    Checker(const McSettings& mc, const McOptions& opts) : mc_(mc), opts_(opts) {}

    ValidationReport report;

    // Analytic cdf against the empirical cdf of `draw` at five quantiles.
    void cdf_check(const std::string& name, const std::function<double(double)>& cdf,
                   const std::function<double(Rng&)>& draw) {
        const std::vector<double> probs{0.05, 0.25, 0.5, 0.75, 0.95};
        std::vector<double> xs;
        for (double p : probs) xs.push_back(quantile(cdf, p));
        McOptions o = opts_;
        o.context = "validate " + name;
        const auto est = estimate_many(
            [&](Rng& g, double* out) {
                const double v = draw(g);
                for (std::size_t i = 0; i < xs.size(); ++i) out[i] = v <= xs[i] ? 1.0 : 0.0;
            },
            xs.size(), mc_.samples, {mc_.seed, ++stream_}, o);
        for (std::size_t i = 0; i < xs.size(); ++i)
            add_mc(name, "x = " + fmt(xs[i]) + " (p = " + fmt(probs[i]) + ")", cdf(xs[i]), est[i]);
    }

    void moment_check(const std::string& name, double t, double analytic, const std::function<double(Rng&)>& draw) {
        McOptions o = opts_;
        o.context = "validate " + name;
        const auto est = estimate([&](Rng& g) { return std::pow(draw(g), t); }, mc_.samples, {mc_.seed, ++stream_}, o);
        add_mc(name, "t = " + fmt(t), analytic, est);
    }

    void add_exact(const std::string& name, const std::string& point, double analytic, double oracle, double tol) {
        report.checks.push_back({name, point, analytic, oracle, 0.0, tol, std::abs(analytic - oracle) <= tol});
    }

private:
    void add_mc(const std::string& name, const std::string& point, double analytic, const Estimate& e) {
        const double tol = kCiMultiple * e.half_width_95;
        report.checks.push_back({name, point, analytic, e.mean, e.half_width_95, tol,
                                 std::isfinite(analytic) && std::abs(analytic - e.mean) <= tol});
    }

    McSettings mc_;
    McOptions opts_;
    std::uint64_t stream_ = 0;
};

}  // namespace

bool ValidationReport::passed() const { return first_failure() == nullptr; }

const CheckResult* ValidationReport::first_failure() const {
    for (const auto& c : checks)
        if (!c.pass) return &c;
    return nullptr;
}

ValidationReport run_validation(const Scenario& scenario, const McOptions& options) {
    const PointConfig pc = scenario.point(-1, std::nullopt);
    const McSettings mc = scenario.mc();
    McOptions opts = options;
    opts.chunk_size = mc.chunk_size;
    const E2eSystem sys(pc.system);
    const CellularLink& cell = sys.cellular();
    const FsoHop& hop = sys.fso();
    const double kappa = sys.kappa();

    Checker ck(mc, opts);
    ck.cdf_check("cellular_cdf", [&](double x) { return cell.cdf(x); }, [&](Rng& g) { return cell.sample(g); });
    ck.cdf_check("fso_cdf", [&](double x) { return hop.cdf(x); }, [&](Rng& g) { return hop.sample(g); });
    ck.cdf_check("sndr_cdf", [&](double x) { return sys.sndr_cdf(x).value; },
                 [&](Rng& g) { return sndr_map(hop.sample(g), kappa); });
    ck.cdf_check("outage_identity", [&](double x) { return sys.outage(x).value; }, [&](Rng& g) {
        const auto [a, b] = sys.sample(g);
        return e2e_sindr(a, b);
    });

    const double p = cell.p_los();
    for (double t : {0.5, 1.0}) {
        const double m = p * (p > 0.0 ? cell.los().moment(t).value : 0.0) +
                         (1.0 - p) * (p < 1.0 ? cell.nlos().moment(t).value : 0.0);
        ck.moment_check("cellular_moment", t, m, [&](Rng& g) { return cell.sample(g); });
    }
    // Keep the variance of gamma^t finite: 2 t r must stay below xi^2.
    const double t_fso = std::min(1.0, 0.25 * hop.xi() * hop.xi() / hop.r());
    ck.moment_check("fso_moment", t_fso, hop.moment(t_fso), [&](Rng& g) { return hop.sample(g); });

    const auto& prs = pc.system.prs;
    if (prs.M == 1 && prs.k == 1 && prs.resolved_rho() == 1.0 && pc.system.interference.mz == 0) {
        const double nm = pc.system.cellular.nm();
        const double g_los = cell.los().gamma_bar(), g_nlos = cell.nlos().gamma_bar();
        auto gamma_cdf = [&](double x) {
            const double a = p > 0.0 ? boost::math::gamma_p(nm, x * nm / g_los) : 0.0;
            const double b = p < 1.0 ? boost::math::gamma_p(nm, x * nm / g_nlos) : 0.0;
            return p * a + (1.0 - p) * b;
        };
        for (int i = 1; i <= 20; ++i) {
            const double q = (i - 0.5) / 20.0;
            const double x = quantile(gamma_cdf, q);
            ck.add_exact("reduction", "x = " + fmt(x) + " (p = " + fmt(q) + ")", cell.cdf(x), gamma_cdf(x), 1e-6);
        }
    }
    return ck.report;
}

void print_validation(std::ostream& out, const ValidationReport& report) {
    out << std::left << std::setw(18) << "check" << std::setw(28) << "point" << std::setw(16) << "analytic"
        << std::setw(16) << "reference" << std::setw(14) << "|diff|" << std::setw(14) << "tolerance" << "result\n";
    for (const auto& c : report.checks) {
        out << std::left << std::setw(18) << c.name << std::setw(28) << c.point << std::setw(16) << fmt(c.analytic)
            << std::setw(16) << fmt(c.reference) << std::setw(14) << fmt(std::abs(c.analytic - c.reference))
            << std::setw(14) << fmt(c.tolerance) << (c.pass ? "pass" : "FAIL")
            << '\n';
    }
    std::size_t failed = 0;
    for (const auto& c : report.checks) failed += c.pass ? 0 : 1;
    out << report.checks.size() - failed << " of " << report.checks.size() << " checks passed\n";
}

}  // namespace mmfso
