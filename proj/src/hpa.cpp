#include "mmfso/hpa.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "mmfso/errors.hpp"
#include "mmfso/quad.hpp"
#include "mmfso/specfun.hpp"

namespace mmfso {

namespace {

constexpr double kNegTol = 1e-12;

double clamp_variance(double v, double scale) {
    if (v < 0.0) {
        if (v < -kNegTol * std::max(scale, 1.0))
            throw NumericError("hpa: distortion variance evaluated negative (" + std::to_string(v) + ")");
        return 0.0;
    }
    return v;
}

BussgangParams finish(const HpaConfig& cfg, double zeta, double var) {
    BussgangParams bp;
    bp.zeta = zeta;
    bp.sigma_varsigma_sq = clamp_variance(var, cfg.sigma_r * cfg.sigma_r);
    const bool explicit_gain = cfg.gain && cfg.sigma1_sq;
    bp.gain_power = explicit_gain ? (*cfg.gain) * (*cfg.gain) * (*cfg.sigma1_sq) : cfg.sigma_r * cfg.sigma_r;
    bp.kappa = 1.0 + bp.sigma_varsigma_sq / (zeta * zeta * bp.gain_power);
    return bp;
}

void require(const HpaConfig& cfg, HpaModel m, const char* op) {
    cfg.validate();
    if (cfg.model != m) throw ConfigError(std::string("hpa: ") + op + " called for model " + to_string(cfg.model));
}

// Integral of S(x) w(x) dx over (0, inf) for the optical SNR survival S.
double survival_integral(const FsoHop& hop, const std::function<double(double)>& weight) {
    const auto& table = hop.survival_table();
    double sum = integrate(weight, 0.0, table.x_min, 1e-10).value;
    for (const auto& node : table.nodes) sum += node.weight * weight(node.x);
    return sum;
}

// Above this power back-off the TWTA/SSPA closed forms lose all digits to
// cancellation (the variance is O(1/u^2) built from O(u) terms); their
// asymptotic expansions in w = 1/u are used instead.
constexpr double kAsymptoticU = 100.0;
constexpr int kTerms = 24;

// d(u) = 1 - u e^u E1(u) = sum_{k>=1} (-1)^{k+1} k! w^k; c[k] holds the
// coefficient of w^k.
std::vector<double> d_coeffs() {
    std::vector<double> c(kTerms + 3, 0.0);
    double f = 1.0;
    for (int k = 1; k < static_cast<int>(c.size()); ++k) {
        f *= k;
        c[k] = (k % 2 == 1) ? f : -f;
    }
    return c;
}

double coeff(const std::vector<double>& c, int k) {
    return k >= 0 && k < static_cast<int>(c.size()) ? c[k] : 0.0;
}

double horner(const std::vector<double>& c, double w) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * w + *it;
    return v;
}

// TWTA: zeta = u d, variance / sigma_r^2 = u(1-d) - u^2 d - u^2 d^2.
std::pair<double, double> twta_asymptotic(double u) {
    const auto c = d_coeffs();
    const double w = 1.0 / u;
    std::vector<double> zeta(kTerms), var(kTerms);
    for (int n = 0; n < kTerms; ++n) {
        zeta[n] = coeff(c, n + 1);
        double conv = 0.0;
        for (int i = 1; i <= n + 1; ++i) conv += coeff(c, i) * coeff(c, n + 2 - i);
        var[n] = -coeff(c, n + 1) - coeff(c, n + 2) - conv;
    }
    return {horner(zeta, w), horner(var, w)};
}

// SSPA: with s = sqrt(pi) x erfcx(x) = sum_k (-1)^k (2k-1)!! / 2^k w^k,
// zeta = 1/w - (1/w - 1/2) s, so zeta_n = -s_{n+1} + s_n / 2,
// variance / sigma_r^2 = u d - zeta^2.
std::pair<double, double> sspa_asymptotic(double u) {
    const auto c = d_coeffs();
    std::vector<double> sc(kTerms + 2, 0.0);
    double t = 1.0;
    sc[0] = 1.0;
    for (int k = 1; k < static_cast<int>(sc.size()); ++k) {
        t *= -(2.0 * k - 1.0) / 2.0;
        sc[k] = t;
    }
    const double w = 1.0 / u;
    std::vector<double> zeta(kTerms), var(kTerms);
    for (int n = 0; n < kTerms; ++n) zeta[n] = -coeff(sc, n + 1) + 0.5 * coeff(sc, n);
    for (int n = 0; n < kTerms; ++n) {
        double sq = 0.0;
        for (int i = 0; i <= n; ++i) sq += zeta[i] * zeta[n - i];
        var[n] = coeff(c, n + 1) - sq;
    }
    return {horner(zeta, w), horner(var, w)};
}

}  // namespace

HpaModel parse_hpa_model(const std::string& name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "ideal" || s == "none") return HpaModel::Ideal;
    if (s == "sel") return HpaModel::SEL;
    if (s == "twta") return HpaModel::TWTA;
    if (s == "sspa") return HpaModel::SSPA;
    throw ConfigError("hpa: unknown model '" + name + "' (expected ideal, sel, twta or sspa)");
}

std::string to_string(HpaModel model) {
    switch (model) {
        case HpaModel::Ideal: return "ideal";
        case HpaModel::SEL: return "sel";
        case HpaModel::TWTA: return "twta";
        case HpaModel::SSPA: return "sspa";
    }
    return "?";
}

void HpaConfig::validate() const {
    if (!(a_sat > 0.0) || !std::isfinite(a_sat)) throw ConfigError("hpa: A_sat must be positive");
    if (!(sigma_r > 0.0) || !std::isfinite(sigma_r)) throw ConfigError("hpa: sigma_r must be positive");
    if (gain && !(*gain > 0.0)) throw ConfigError("hpa: G must be positive");
    if (sigma1_sq && !(*sigma1_sq > 0.0)) throw ConfigError("hpa: sigma1^2 must be positive");
    if (kappa && !(*kappa >= 1.0)) throw ConfigError("hpa: kappa must be >= 1");
}

HpaConfig HpaConfig::with_ibo(HpaModel model, double ibo) {
    HpaConfig c;
    c.model = model;
    c.sigma_r = 1.0;
    c.a_sat = ibo;
    c.validate();
    return c;
}

BussgangParams sel_params(const HpaConfig& cfg) {
    require(cfg, HpaModel::SEL, "sel_params");
    const double x = cfg.ibo(), u = x * x;
    const double zeta = -std::expm1(-u) + 0.5 * std::sqrt(std::numbers::pi) * x * std::erfc(x);
    const double s2 = cfg.sigma_r * cfg.sigma_r;
    return finish(cfg, zeta, s2 * (-std::expm1(-u) - zeta * zeta));
}

BussgangParams twta_params(const HpaConfig& cfg) {
    require(cfg, HpaModel::TWTA, "twta_params");
    const double x = cfg.ibo(), u = x * x;
    const double s2 = cfg.sigma_r * cfg.sigma_r;
    if (u >= kAsymptoticU) {
        const auto [zeta, var] = twta_asymptotic(u);
        return finish(cfg, zeta, s2 * var);
    }
    const double e1 = exp_e1_scaled(u);  // -e^u Ei(-u)
    const double zeta = u * (1.0 - u * e1);
    return finish(cfg, zeta, s2 * (u * u * ((1.0 + u) * e1 - 1.0) - zeta * zeta));
}

BussgangParams sspa_params(const HpaConfig& cfg) {
    require(cfg, HpaModel::SSPA, "sspa_params");
    const double x = cfg.ibo(), u = x * x;
    const double s2 = cfg.sigma_r * cfg.sigma_r;
    if (u >= kAsymptoticU) {
        const auto [zeta, var] = sspa_asymptotic(u);
        return finish(cfg, zeta, s2 * var);
    }
    const double zeta = 0.5 * x * (2.0 * x - std::sqrt(std::numbers::pi) * erfcx(x) * (2.0 * u - 1.0));
    const double e1 = exp_e1_scaled(u);
    return finish(cfg, zeta, s2 * (u * (1.0 - u * e1) - zeta * zeta));
}

BussgangParams bussgang(const HpaConfig& cfg) {
    cfg.validate();
    BussgangParams bp;
    switch (cfg.model) {
        case HpaModel::Ideal: bp = BussgangParams{}; break;
        case HpaModel::SEL: bp = sel_params(cfg); break;
        case HpaModel::TWTA: bp = twta_params(cfg); break;
        case HpaModel::SSPA: bp = sspa_params(cfg); break;
    }
    if (cfg.kappa) {
        // Pinned kappa: express it as pure distortion power on a unit gain block.
        bp.zeta = 1.0;
        bp.gain_power = 1.0;
        bp.sigma_varsigma_sq = *cfg.kappa - 1.0;
        bp.kappa = *cfg.kappa;
    }
    return bp;
}

double kappa(const BussgangParams& bp, double gain, double sigma1_sq) {
    if (!(bp.zeta > 0.0)) throw NumericError("kappa: zeta must be positive");
    if (!(gain > 0.0) || !(sigma1_sq > 0.0)) throw ConfigError("kappa: G and sigma1^2 must be positive");
    return 1.0 + bp.sigma_varsigma_sq / (bp.zeta * bp.zeta * gain * gain * sigma1_sq);
}

double sndr_map(double gamma_r, double kappa) {
    if (std::isinf(gamma_r)) return kappa > 1.0 ? 1.0 / (kappa - 1.0) : gamma_r;
    return gamma_r / ((kappa - 1.0) * gamma_r + 1.0);
}

double distort_sample(double signal_snr, const BussgangParams& bp) {
    if (bp.sigma_varsigma_sq == 0.0) return signal_snr;
    // Gain-block output power P with noise P / gamma; the HPA passes zeta^2 of
    // both and adds sigma_varsigma^2 of distortion.
    const double p = bp.gain_power;
    const double signal = bp.zeta * bp.zeta * p;
    const double noise = bp.zeta * bp.zeta * p / signal_snr;
    return signal / (noise + bp.sigma_varsigma_sq);
}

Evaluated sndr_cdf(double x, double kappa, const FsoHop& hop) {
    if (!(x > 0.0)) return {0.0, Tag::Analytic};
    const double k1 = kappa - 1.0;
    if (k1 > 0.0 && x * k1 >= 1.0) return {1.0, Tag::Analytic};
    return hop.cdf_eval(x / (1.0 - k1 * x));
}

double c2_rate(double kappa, double varpi, const FsoHop& hop) {
    // E[log(1 + varpi g_ni)] = int S_r(x) varpi / ((k x + 1)(k x + 1 + varpi x)) dx
    const double k1 = kappa - 1.0;
    return survival_integral(hop, [&](double x) {
        const double d = k1 * x + 1.0;
        return varpi / (d * (d + varpi * x));
    });
}

Estimate c2_rate_mc(double kappa, double varpi, const FsoHop& hop, std::uint64_t samples,
                    const RngSpec& rng, const McOptions& opts) {
    return estimate([&](Rng& g) { return std::log1p(varpi * sndr_map(hop.sample(g), kappa)); }, samples,
                    rng, opts);
}

double mean_sndr(double kappa, const FsoHop& hop) {
    if (kappa == 1.0) return hop.gamma_bar();
    const double k1 = kappa - 1.0;
    return survival_integral(hop, [&](double x) {
        const double d = k1 * x + 1.0;
        return 1.0 / (d * d);
    });
}

double c2_approx(double kappa, double varpi, const FsoHop& hop) {
    const double g = hop.gamma_bar();
    return std::log1p(varpi * g / ((kappa - 1.0) * g + 1.0));
}

double c2_jensen(double kappa, double varpi, const FsoHop& hop) {
    return std::log1p(varpi * mean_sndr(kappa, hop));
}

double c2_ceiling(double kappa, double varpi) {
    if (kappa <= 1.0) return std::numeric_limits<double>::infinity();
    return std::log1p(varpi / (kappa - 1.0));
}

}  // namespace mmfso
