#include "mmfso/fso.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>

#include "mmfso/diag.hpp"
#include "mmfso/errors.hpp"
#include "mmfso/quad.hpp"
#include "mmfso/specfun.hpp"

namespace mmfso {

namespace {

constexpr int kMaxOrder = 64;

double db_km_to_neper_m(double db_km) { return db_km * std::log(10.0) / 10.0 / 1000.0; }

}  // namespace

void FsoConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError(std::string("fso: ") + name + " must be positive and finite");
    };
    positive(lambda_m, "lambda");
    positive(aperture_m, "aperture radius");
    positive(theta_rad, "divergence angle");
    positive(l2_m, "link length");
    positive(sigma_s_m, "jitter standard deviation");
    positive(omega0_m, "beam waist");
    positive(eta, "eta");
    positive(sigma2_sq, "noise variance");
    if (!(cn2 >= 0.0)) throw ConfigError("fso: Cn2 must be non-negative");
    if (!(atten_db_km >= 0.0)) throw ConfigError("fso: attenuation must be non-negative");
    if (f0_m == 0.0 || std::isnan(f0_m)) throw ConfigError("fso: curvature radius F0 must be non-zero");
    if (r != 1 && r != 2) throw ConfigError("fso: detection order r must be 1 or 2");
    if (mu_r && !(*mu_r > 0.0)) throw ConfigError("fso: mu_r must be positive");
    if (xi && !(*xi > 0.0)) throw ConfigError("fso: xi must be positive");
    positive(dgg.alpha1, "alpha1");
    positive(dgg.alpha2, "alpha2");
    positive(dgg.m1, "m1");
    positive(dgg.m2, "m2");
    positive(dgg.omega1, "Omega1");
    positive(dgg.omega2, "Omega2");
}

std::pair<int, int> rationalize(double x, int max_den) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("rationalize: positive finite value required");
    // Continued-fraction convergents plus the admissible semiconvergents.
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double rem = x;
    int best_num = static_cast<int>(std::llround(x)), best_den = 1;
    double best_err = std::abs(x - best_num);
    for (int it = 0; it < 40; ++it) {
        const double a = std::floor(rem);
        const long long ai = static_cast<long long>(a);
        for (long long t = std::max<long long>(1, (ai + 1) / 2); t <= ai; ++t) {
            const long long hn = t * h1 + h0, kn = t * k1 + k0;
            if (kn > max_den) break;
            const double err = std::abs(x - static_cast<double>(hn) / kn);
            if (err < best_err - 1e-15) {
                best_err = err;
                best_num = static_cast<int>(hn);
                best_den = static_cast<int>(kn);
            }
        }
        const long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        const double frac = rem - a;
        if (frac < 1e-12) break;
        rem = 1.0 / frac;
    }
    if (best_num <= 0) throw ConfigError("rationalize: value too small for the denominator cap");
    const int g = std::gcd(best_num, best_den);
    return {best_num / g, best_den / g};
}

RationalShape rationalize_shape(const DggParams& dgg, int max_den) {
    const auto [n1, d1] = rationalize(dgg.alpha1, max_den);
    const auto [n2, d2] = rationalize(dgg.alpha2, max_den);
    RationalShape s;
    s.n = std::lcm(n1, n2);
    s.q = s.n / n1 * d1;  // alpha1 = n / q
    s.p = s.n / n2 * d2;  // alpha2 = n / p
    s.alpha1 = static_cast<double>(s.n) / s.q;
    s.alpha2 = static_cast<double>(s.n) / s.p;
    if (s.p + s.q + 1 > kMaxOrder) {
        std::ostringstream msg;
        msg << "fso: alpha1/alpha2 rationalize to " << s.n << "/" << s.q << " and " << s.n << "/"
            << s.p << ", Meijer-G order " << s.p + s.q + 1 << " exceeds " << kMaxOrder;
        throw ConfigError(msg.str());
    }
    return s;
}

double path_loss(const FsoConfig& cfg) {
    const double geometric = std::numbers::pi * cfg.aperture_m * cfg.aperture_m /
                             std::pow(cfg.theta_rad * cfg.l2_m, 2.0);
    return geometric * std::exp(-db_km_to_neper_m(cfg.atten_db_km) * cfg.l2_m);
}

PointingGeometry beam_geometry(const FsoConfig& cfg) {
    if (!(cfg.omega0_m > 0.0)) throw ConfigError("fso: beam waist must be positive");
    if (cfg.f0_m == 0.0) throw ConfigError("fso: curvature radius F0 must be non-zero");
    PointingGeometry g;
    const double k = 2.0 * std::numbers::pi / cfg.lambda_m;
    g.sigma_rytov_sq = 1.23 * cfg.cn2 * std::pow(cfg.l2_m, 11.0 / 6.0) * std::pow(k, 7.0 / 6.0);
    g.theta0 = std::isinf(cfg.f0_m) ? 1.0 : 1.0 - cfg.l2_m / cfg.f0_m;
    g.lambda0 = 2.0 * cfg.l2_m / (k * cfg.omega0_m * cfg.omega0_m);
    const double denom = g.theta0 * g.theta0 + g.lambda0 * g.lambda0;
    g.lambda1 = g.lambda0 / denom;
    g.omega_z = cfg.omega0_m *
                std::sqrt(denom * (1.0 + 1.63 * std::pow(g.sigma_rytov_sq, 1.2) * g.lambda1));
    g.v = std::sqrt(std::numbers::pi) * cfg.aperture_m / (std::sqrt(2.0) * g.omega_z);
    const double erfv = std::erf(g.v);
    g.a0 = erfv * erfv;
    // omega_zeq^2 = omega_z^2 sqrt(pi) erf(v) / (2 v exp(-v^2))
    const double log_ratio = std::log(std::sqrt(std::numbers::pi) * erfv / (2.0 * g.v)) + g.v * g.v;
    g.omega_zeq = g.omega_z * std::exp(0.5 * log_ratio);
    g.xi = g.omega_zeq / (2.0 * cfg.sigma_s_m);
    return g;
}

double sample_pointing(const PointingGeometry& geom, double sigma_s, Rng& rng) {
    // Rayleigh radius by inversion; 1 - U keeps the log argument in (0, 1].
    const double u = 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double r2 = -2.0 * sigma_s * sigma_s * std::log(u);
    return geom.a0 * std::exp(-2.0 * r2 / (geom.omega_zeq * geom.omega_zeq));
}

double sample_turbulence(const DggParams& dgg, Rng& rng) {
    const double g1 = std::gamma_distribution<double>(dgg.m1, 1.0)(rng);
    const double g2 = std::gamma_distribution<double>(dgg.m2, 1.0)(rng);
    const double ix = std::pow(dgg.omega1 * g1 / dgg.m1, 1.0 / dgg.alpha1);
    const double iy = std::pow(dgg.omega2 * g2 / dgg.m2, 1.0 / dgg.alpha2);
    return ix * iy;
}

double unified_snr(double iz, const FsoConfig& cfg) {
    if (!(iz >= 0.0)) throw NumericError("unified_snr: negative irradiance");
    return std::pow(cfg.eta * iz, cfg.r) / cfg.sigma2_sq;
}

double varpi_for(int r) { return r == 1 ? 1.0 : std::numbers::e / (2.0 * std::numbers::pi); }

struct FsoHop::TableCache {
    std::once_flag once;
    SurvivalTable table;
};

FsoHop::FsoHop(const FsoConfig& cfg) : cfg_(cfg), table_(std::make_shared<TableCache>()) {
    cfg_.validate();
    geom_ = beam_geometry(cfg_);
    if (cfg_.xi) {
        geom_.xi = *cfg_.xi;
        cfg_.sigma_s_m = geom_.omega_zeq / (2.0 * geom_.xi);
    }
    shape_ = rationalize_shape(cfg_.dgg);
    dgg_ = cfg_.dgg;
    if (std::abs(shape_.alpha1 / dgg_.alpha1 - 1.0) > 1e-9 ||
        std::abs(shape_.alpha2 / dgg_.alpha2 - 1.0) > 1e-9) {
        if (std::abs(shape_.alpha1 / dgg_.alpha1 - 1.0) > 5e-3 ||
            std::abs(shape_.alpha2 / dgg_.alpha2 - 1.0) > 5e-3) {
            std::ostringstream msg;
            msg << "fso: alpha1, alpha2 snapped to " << shape_.alpha1 << ", " << shape_.alpha2;
            warn(msg.str());
        }
    }
    dgg_.alpha1 = shape_.alpha1;
    dgg_.alpha2 = shape_.alpha2;
    if (cfg_.normalize_turbulence) {
        auto mean_factor = [](double omega, double m, double alpha) {
            return std::pow(omega / m, 1.0 / alpha) * std::exp(std::lgamma(m + 1.0 / alpha) - std::lgamma(m));
        };
        dgg_.omega1 *= std::pow(1.0 / mean_factor(dgg_.omega1, dgg_.m1, dgg_.alpha1), dgg_.alpha1);
        dgg_.omega2 *= std::pow(1.0 / mean_factor(dgg_.omega2, dgg_.m2, dgg_.alpha2), dgg_.alpha2);
    }

    il_ = path_loss(cfg_);
    mean_w_ = mellin_w(1.0);
    // E[I_z] = I_l A0 E[I_a] xi^2/(xi^2+1) = I_l A0 E[W]
    mean_iz_ = il_ * geom_.a0 * mean_w_;
    if (cfg_.mu_r)
        mu_r_ = *cfg_.mu_r * (cfg_.apply_path_loss ? std::pow(il_, cfg_.r) : 1.0);
    else
        mu_r_ = std::pow(cfg_.eta * mean_iz_, cfg_.r) / cfg_.sigma2_sq;
    log_k_ = std::log(mu_r_) - cfg_.r * std::log(mean_w_);

    const int p = shape_.p, q = shape_.q, n = shape_.n;
    const double xi2 = geom_.xi * geom_.xi;
    const double m1 = dgg_.m1, m2 = dgg_.m2;
    log_lambda_ = q * std::log(q * dgg_.omega1 / m1) + p * std::log(p * dgg_.omega2 / m2);
    a_ = xi2 / n * std::pow(2.0 * std::numbers::pi, 1.0 - 0.5 * (p + q)) * std::pow(q, m1 - 0.5) *
         std::pow(p, m2 - 0.5) / (std::tgamma(m1) * std::tgamma(m2));

    std::vector<double> b;
    for (int k = 0; k < q; ++k) b.push_back((m1 + k) / q);
    for (int k = 0; k < p; ++k) b.push_back((m2 + k) / p);
    const double c = xi2 / n;
    b.push_back(c);
    const int big_q = static_cast<int>(b.size());

    pdf_spec_ = {big_q, 0, {c + 1.0}, b};
    cdf_spec_ = {big_q, 1, {1.0, c + 1.0}, b};
    cdf_spec_.b.push_back(0.0);
    surv_spec_ = {big_q + 1, 0, {c + 1.0, 1.0}, {}};
    surv_spec_.b.push_back(0.0);
    for (double v : b) surv_spec_.b.push_back(v);
}

double FsoHop::log_mellin_w(double s) const {
    const double xi2 = geom_.xi * geom_.xi;
    const double lim = std::min({xi2, dgg_.m1 * dgg_.alpha1, dgg_.m2 * dgg_.alpha2});
    if (!(s > -lim)) throw NumericError("fso: moment of order " + std::to_string(s) + " diverges");
    const double lx = s / dgg_.alpha1 * std::log(dgg_.omega1 / dgg_.m1) + std::lgamma(dgg_.m1 + s / dgg_.alpha1) -
                      std::lgamma(dgg_.m1);
    const double ly = s / dgg_.alpha2 * std::log(dgg_.omega2 / dgg_.m2) + std::lgamma(dgg_.m2 + s / dgg_.alpha2) -
                      std::lgamma(dgg_.m2);
    return lx + ly + std::log(xi2 / (xi2 + s));
}

double FsoHop::mellin_w(double s) const { return std::exp(log_mellin_w(s)); }

bool FsoHop::tail_negligible(double x) const {
    // Markov: P[gamma > x] <= E[gamma^t] / x^t for every t > 0.
    const double lx = std::log(x);
    for (double t = 1.0; t <= 256.0; t *= 2.0)
        if (t * (log_k_ - lx) + log_mellin_w(cfg_.r * t) < std::log(1e-18)) return true;
    return false;
}

double FsoHop::gamma_bar() const { return moment(1.0); }

double FsoHop::scintillation_index() const { return mellin_w(2.0) / (mean_w_ * mean_w_) - 1.0; }

double FsoHop::moment(double t) const {
    return std::exp(t * log_k_) * mellin_w(cfg_.r * t);
}

double FsoHop::log_argument(double x) const {
    // z = (x / K)^{n/r} / lambda
    return static_cast<double>(shape_.n) / cfg_.r * (std::log(x) - log_k_) - log_lambda_;
}

double FsoHop::cdf_numeric(double x) const {
    // P[W <= w] = E[min(1, w/(I_x I_y))^{xi^2}], expectation over the two
    // Gamma variates in quantile coordinates.
    const double w = std::exp((std::log(x) - log_k_) / cfg_.r);
    const double xi2 = geom_.xi * geom_.xi;
    auto ix_of = [&](double u) {
        return std::pow(dgg_.omega1 / dgg_.m1 * boost::math::gamma_p_inv(dgg_.m1, u), 1.0 / dgg_.alpha1);
    };
    auto iy_of = [&](double u) {
        return std::pow(dgg_.omega2 / dgg_.m2 * boost::math::gamma_p_inv(dgg_.m2, u), 1.0 / dgg_.alpha2);
    };
    auto outer = [&](double u1) {
        if (u1 <= 0.0 || u1 >= 1.0) return u1 <= 0.0 ? 1.0 : 0.0;
        const double ix = ix_of(u1);
        auto inner = [&](double u2) {
            if (u2 <= 0.0) return 1.0;
            if (u2 >= 1.0) return 0.0;
            const double t = w / (ix * iy_of(u2));
            return t >= 1.0 ? 1.0 : std::pow(t, xi2);
        };
        return integrate(inner, 0.0, 1.0, 1e-9, 12).value;
    };
    return integrate(outer, 0.0, 1.0, 1e-8, 12).value;
}

Evaluated FsoHop::cdf_eval(double x) const {
    if (!(x > 0.0)) return {0.0, Tag::Analytic};
    if (std::isinf(x) || tail_negligible(x)) return {1.0, Tag::Analytic};
    const double lz = log_argument(x);
    double value;
    Tag tag = Tag::Analytic;
    try {
        value = a_ * meijer_g_eval(cdf_spec_, lz).value;
        if (value > 0.5) value = 1.0 - a_ * meijer_g_eval(surv_spec_, lz).value;
    } catch (const ConvergenceError&) {
        value = cdf_numeric(x);
        tag = Tag::NumericFallback;
    }
    if (value < -1e-6 || value > 1.0 + 1e-6) {
        std::ostringstream msg;
        msg << "fso cdf at " << x << " evaluated to " << value << "; clamped";
        warn(msg.str());
    }
    return {std::clamp(value, 0.0, 1.0), tag};
}

double FsoHop::survival(double x) const {
    if (!(x > 0.0)) return 1.0;
    if (std::isinf(x) || tail_negligible(x)) return 0.0;
    const double lz = log_argument(x);
    try {
        const double f = a_ * meijer_g_eval(cdf_spec_, lz).value;
        if (f < 0.5) return std::clamp(1.0 - f, 0.0, 1.0);
        return std::clamp(a_ * meijer_g_eval(surv_spec_, lz).value, 0.0, 1.0);
    } catch (const ConvergenceError&) {
        return std::clamp(1.0 - cdf_numeric(x), 0.0, 1.0);
    }
}

Evaluated FsoHop::pdf_eval(double x) const {
    if (!(x > 0.0)) return {0.0, Tag::Analytic};
    // Far past the mode the density is nonincreasing, so x f(x) <= 2 S(x/2).
    if (std::isinf(x) || tail_negligible(0.5 * x)) return {0.0, Tag::Analytic};
    const double lz = log_argument(x);
    try {
        const double g = meijer_g_eval(pdf_spec_, lz).value;
        return {std::max(0.0, a_ * shape_.n / (cfg_.r * x) * g), Tag::Analytic};
    } catch (const ConvergenceError&) {
        const double h = 1e-4 * x;
        return {std::max(0.0, (cdf(x + h) - cdf(x - h)) / (2.0 * h)), Tag::NumericFallback};
    }
}

double FsoHop::cdf_leading(double x) const {
    if (!(x > 0.0)) return 0.0;
    return a_ * meijer_g_leading(cdf_spec_, log_argument(x));
}

double FsoHop::diversity_order() const {
    const double xi2 = geom_.xi * geom_.xi;
    return std::min({xi2, dgg_.m1 * dgg_.alpha1, dgg_.m2 * dgg_.alpha2}) / cfg_.r;
}

const FsoHop::SurvivalTable& FsoHop::survival_table() const {
    std::call_once(table_->once, [this] {
        // Unit-width panels in log x with 15-point Gauss-Legendre. Below
        // mu e^-40 the cdf is < 1e-12 for every admissible diversity order
        // used here; above mu e^12 the survival is below double precision.
        using GL = boost::math::quadrature::gauss<double, 15>;
        const double center = std::log(mu_r_);
        const double lo = center - 40.0, hi = center + 12.0;
        SurvivalTable t;
        t.x_min = std::exp(lo);
        const auto& abscissa = GL::abscissa();
        const auto& weights = GL::weights();
        for (double a = lo; a < hi - 1e-9; a += 1.0) {
            const double mid = a + 0.5;
            auto add = [&](double u, double w) {
                const double x = std::exp(u);
                const double s = survival(x);
                if (s > 0.0) t.nodes.push_back({x, 0.5 * w * x * s});
            };
            add(mid, weights[0]);
            for (std::size_t i = 1; i < abscissa.size(); ++i) {
                add(mid - 0.5 * abscissa[i], weights[i]);
                add(mid + 0.5 * abscissa[i], weights[i]);
            }
        }
        table_->table = std::move(t);
    });
    return table_->table;
}

double FsoHop::sample_iz(Rng& rng) const {
    return il_ * sample_turbulence(dgg_, rng) * sample_pointing(geom_, cfg_.sigma_s_m, rng);
}

double FsoHop::sample(Rng& rng) const {
    const double ratio = sample_iz(rng) / mean_iz_;
    return cfg_.r == 1 ? mu_r_ * ratio : mu_r_ * ratio * ratio;
}

}  // namespace mmfso
