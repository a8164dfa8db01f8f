#include "mmfso/e2e.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "mmfso/diag.hpp"
#include "mmfso/errors.hpp"
#include "mmfso/quad.hpp"

namespace mmfso {

namespace {

bool is_power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

int log2_int(int n) {
    int l = 0;
    while ((1 << l) < n) ++l;
    return l;
}

}  // namespace

double ModulationScheme::conditional(double gamma) const {
    double s = 0.0;
    for (double qk : q) s += boost::math::gamma_q(tau, qk * std::max(gamma, 0.0));
    return 0.5 * delta * s;
}

ModulationScheme ModulationScheme::ook() { return {"OOK", 1.0, 0.5, {0.5}, Detection::IMDD}; }

ModulationScheme ModulationScheme::bpsk() { return {"BPSK", 1.0, 0.5, {1.0}, Detection::Heterodyne}; }

ModulationScheme ModulationScheme::mpsk(int order) {
    if (!is_power_of_two(order)) throw ConfigError("M-PSK order must be a power of two >= 2");
    ModulationScheme m;
    m.name = std::to_string(order) + "-PSK";
    m.delta = 2.0 / std::max(log2_int(order), 2);
    m.tau = 0.5;
    const int v = std::max(order / 4, 1);
    m.q.clear();
    for (int k = 1; k <= v; ++k) {
        const double s = std::sin((2.0 * k - 1.0) * std::numbers::pi / order);
        m.q.push_back(s * s);
    }
    m.detection = Detection::Heterodyne;
    return m;
}

ModulationScheme ModulationScheme::mqam(int order) {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
    if (!is_power_of_two(order) || side * side != order || order < 4)
        throw ConfigError("M-QAM order must be an even power of two >= 4");
    ModulationScheme m;
    m.name = std::to_string(order) + "-QAM";
    m.delta = 4.0 / log2_int(order) * (1.0 - 1.0 / side);
    m.tau = 0.5;
    m.q.clear();
    for (int k = 1; k <= side / 2; ++k) m.q.push_back(3.0 * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (2.0 * (order - 1.0)));
    m.detection = Detection::Heterodyne;
    return m;
}

ModulationScheme ModulationScheme::parse(const std::string& name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    s.erase(std::remove(s.begin(), s.end(), '-'), s.end());
    if (s == "ook") return ook();
    if (s == "bpsk") return bpsk();
    if (s == "qpsk") return mpsk(4);
    auto order_before = [&](const std::string& suffix) -> int {
        if (s.size() <= suffix.size() || s.compare(s.size() - suffix.size(), suffix.size(), suffix) != 0) return 0;
        const std::string digits = s.substr(0, s.size() - suffix.size());
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit) || digits.size() > 6) return 0;
        return std::stoi(digits);
    };
    if (int m = order_before("psk")) return mpsk(m);
    if (int m = order_before("qam")) return mqam(m);
    throw ConfigError("unknown modulation '" + name + "'");
}

double e2e_sindr(double gamma_eff, double gamma_ni) { return std::min(gamma_eff, gamma_ni); }

double combine_outage(double f1, double f2) { return f1 + f2 - f1 * f2; }

E2eSystem::E2eSystem(const E2eConfig& cfg)
    : cfg_(cfg), cell_(cfg.cellular, cfg.prs, cfg.interference), hop_(cfg.fso), bp_(bussgang(cfg.hpa)) {
    if (!(bp_.kappa >= 1.0)) {
        std::ostringstream os;
        os << "hpa: kappa = " << bp_.kappa << " must be at least 1";
        throw ConfigError(os.str());
    }
}

Evaluated E2eSystem::sndr_cdf(double beta) const { return mmfso::sndr_cdf(beta, bp_.kappa, hop_); }

Evaluated E2eSystem::outage(double beta, double abs_tol) const {
    if (!(beta > 0.0)) return {0.0, Tag::Analytic};
    const auto f1 = cellular_cdf(beta, abs_tol);
    const auto f2 = sndr_cdf(beta);
    return {combine_outage(f1.value, f2.value), worst(f1.tag, f2.tag)};
}

double E2eSystem::outage_asymptote(double beta) const {
    if (!(beta > 0.0)) return 0.0;
    if (hop_.mu_r() < 1e3) warn("outage_asymptote: mu_r below 30 dB, expansion may not hold");
    const double k1 = bp_.kappa - 1.0;
    const double f2 = k1 > 0.0 && beta * k1 >= 1.0 ? 1.0 : hop_.cdf_leading(beta / (1.0 - k1 * beta));
    return f2 + cell_.cdf_leading(beta);
}

double E2eSystem::diversity_gain() const {
    const double g = cfg_.prs.resolved_rho() >= 1.0 ? cfg_.cellular.nm() : 1.0;
    return std::min(g, hop_.diversity_order());
}

std::pair<double, double> E2eSystem::sample(Rng& rng) const {
    const double eff = cell_.sample(rng);
    const double ni = sndr_map(hop_.sample(rng), bp_.kappa);
    return {eff, ni};
}

std::vector<Estimate> E2eSystem::outage_mc(const std::vector<double>& betas, std::uint64_t samples,
                                           const RngSpec& rng, const McOptions& opts) const {
    return estimate_many(
        [&](Rng& g, double* out) {
            const auto [a, b] = sample(g);
            const double v = e2e_sindr(a, b);
            for (std::size_t i = 0; i < betas.size(); ++i) out[i] = v <= betas[i] ? 1.0 : 0.0;
        },
        betas.size(), samples, rng, opts);
}

Estimate E2eSystem::error_prob(const ModulationScheme& mod, std::uint64_t samples, const RngSpec& rng,
                               const McOptions& opts) const {
    return estimate(
        [&](Rng& g) {
            const auto [a, b] = sample(g);
            return mod.conditional(e2e_sindr(a, b));
        },
        samples, rng, opts);
}

Evaluated E2eSystem::error_prob_quadrature(const ModulationScheme& mod) const {
    // With g(x) = Q(tau, q x), E[g(X)] = E[F_X(W)] for W ~ Gamma(tau, 1/q).
    // The substitution w = t^2 removes the t^{2 tau - 1} endpoint behaviour.
    Tag tag = Tag::Analytic;
    double total = 0.0;
    for (double qk : mod.q) {
        const double lg = std::lgamma(mod.tau);
        auto f = [&](double t) {
            if (t <= 0.0) return 0.0;
            const double w = t * t;
            const auto o = outage(w, 1e-12);
            tag = worst(tag, o.tag);
            return 2.0 * std::exp(mod.tau * std::log(qk) + (2.0 * mod.tau - 1.0) * std::log(t) - qk * w - lg) * o.value;
        };
        const double u = 1.0 / std::sqrt(qk);
        total += integrate_pieces(f, {0.0, 0.05 * u, 0.2 * u, 0.5 * u, u, 2.0 * u, 4.0 * u, 9.0 * u}, 1e-8).value;
    }
    return {0.5 * mod.delta * total, tag};
}

RateBreakdown E2eSystem::rate() const {
    const auto c1 = cell_.rate_c1();
    RateBreakdown r;
    r.c1 = c1.value;
    r.c2 = c2_rate(bp_.kappa, varpi(), hop_);
    r.c = std::min(r.c1, r.c2);
    r.tag = c1.tag;
    return r;
}

Estimate E2eSystem::rate_per_realization_mc(std::uint64_t samples, const RngSpec& rng, const McOptions& opts) const {
    const double w = varpi();
    return estimate(
        [&](Rng& g) {
            const auto [a, b] = sample(g);
            return std::min(std::log1p(a), std::log1p(w * b));
        },
        samples, rng, opts);
}

double E2eSystem::rate_threshold(double target_rate, double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw ConfigError("rate_coverage: bandwidth must be positive");
    if (!(target_rate >= 0.0)) throw ConfigError("rate_coverage: target rate must be non-negative");
    return std::expm1(target_rate / bandwidth_hz);
}

Evaluated E2eSystem::rate_coverage(double target_rate, double bandwidth_hz) const {
    const double thr = rate_threshold(target_rate, bandwidth_hz);
    if (std::isinf(thr)) return {0.0, Tag::Analytic};
    const auto o = outage(thr);
    return {1.0 - o.value, o.tag};
}

}  // namespace mmfso
