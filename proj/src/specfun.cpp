#include "mmfso/specfun.hpp"

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <utility>

#include "mmfso/errors.hpp"

namespace mmfso {

namespace {

void require_finite(double x, const char* who) {
    if (!std::isfinite(x)) throw NumericError(std::string(who) + ": non-finite argument");
}

// Large-x expansion of exp(-x) I_nu(x).
double bessel_i_scaled_asymptotic(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 30; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(next) > std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

double bessel_j0(double x) {
    require_finite(x, "bessel_j0");
    return std::cyl_bessel_j(0.0, std::abs(x));
}

double bessel_i(double nu, double x) {
    require_finite(x, "bessel_i");
    if (nu < 0.0 || x < 0.0) throw NumericError("bessel_i: requires nu >= 0 and x >= 0");
    if (x > 700.0) throw NumericError("bessel_i: overflow, use bessel_i_scaled");
    const double v = std::cyl_bessel_i(nu, x);
    if (!std::isfinite(v)) throw NumericError("bessel_i: overflow, use bessel_i_scaled");
    return v;
}

double bessel_i_scaled(double nu, double x) {
    require_finite(x, "bessel_i_scaled");
    if (nu < 0.0 || x < 0.0) throw NumericError("bessel_i_scaled: requires nu >= 0 and x >= 0");
    if (x < 500.0) return std::exp(-x) * std::cyl_bessel_i(nu, x);
    return bessel_i_scaled_asymptotic(nu, x);
}

double erf(double x) { return std::erf(x); }
double erfc(double x) { return std::erfc(x); }

double erfcx(double x) {
    if (x < 25.0) return std::exp(x * x) * std::erfc(x);
    const double inv2 = 1.0 / (2.0 * x * x);
    // 1 - 1/(2x^2) + 3/(4x^4) - 15/(8x^6) + 105/(16x^8)
    const double series = 1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2 * (1.0 - 7.0 * inv2)));
    return series / (x * std::sqrt(std::numbers::pi));
}

double exp_integral_ei(double x) {
    require_finite(x, "exp_integral_ei");
    if (x == 0.0) throw NumericError("exp_integral_ei: x = 0 is a logarithmic singularity");
    return boost::math::expint(x);
}

double exp_e1_scaled(double u) {
    if (!(u > 0.0)) throw NumericError("exp_e1_scaled: requires u > 0");
    if (u < 600.0) return std::exp(u) * boost::math::expint(1, u);
    // e^u E1(u) ~ (1/u) sum_k (-1)^k k! / u^k
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 20; ++k) {
        term *= -static_cast<double>(k) / u;
        sum += term;
    }
    return sum / u;
}

double upper_incomplete_gamma(double tau, double x) {
    if (!(tau > 0.0) || !(x >= 0.0) || !std::isfinite(tau))
        throw NumericError("upper_incomplete_gamma: requires tau > 0, x >= 0");
    if (std::isinf(x)) return 0.0;
    return boost::math::tgamma(tau, x);
}

const std::vector<double>& phi_polynomial(int j, int m) {
    if (j < 0 || m < 0) throw NumericError("phi_polynomial: negative order");
    thread_local std::map<std::pair<int, int>, std::vector<double>> cache;
    const auto key = std::make_pair(j, m);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    std::vector<double> inv_fact(static_cast<std::size_t>(m) + 1);
    inv_fact[0] = 1.0;
    for (int t = 1; t <= m; ++t) inv_fact[t] = inv_fact[t - 1] / t;

    // Phi(i, j, m) = sum_{t} Phi(t, j-1, m) / (i-t)!, t in [max(0, i-m), min(i, (j-1)m)]
    std::vector<double> poly{1.0};
    for (int level = 1; level <= j; ++level) {
        std::vector<double> next(static_cast<std::size_t>(level) * m + 1, 0.0);
        for (std::size_t t = 0; t < poly.size(); ++t)
            for (int d = 0; d <= m; ++d) next[t + d] += poly[t] * inv_fact[d];
        poly = std::move(next);
    }
    return cache.emplace(key, std::move(poly)).first->second;
}

const std::vector<double>& log_phi_polynomial(int j, int m) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    if (j < 0 || m < 0) throw NumericError("log_phi_polynomial: negative order");
    thread_local std::map<std::pair<int, int>, std::vector<double>> cache;
    const auto key = std::make_pair(j, m);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    // P_l(i) = Phi(i, l, m) i! / l^i is the probability that i balls thrown
    // uniformly into l bins leave every bin with at most m; it obeys
    // P_l(i) = sum_d C(i, d) ((l-1)/l)^{i-d} (1/l)^d P_{l-1}(i-d), d <= m.
    std::vector<double> prob{1.0};
    for (int level = 1; level <= j; ++level) {
        const double log_stay = level > 1 ? std::log((level - 1.0) / level) : -kInf;
        const double log_new = -std::log(static_cast<double>(level));
        std::vector<double> next(static_cast<std::size_t>(level) * m + 1, 0.0);
        for (std::size_t i = 0; i < next.size(); ++i) {
            double acc = 0.0;
            for (int d = 0; d <= m && d <= static_cast<int>(i); ++d) {
                const std::size_t src = i - static_cast<std::size_t>(d);
                if (src >= prob.size() || prob[src] == 0.0) continue;
                const double rest = static_cast<double>(src);
                const double log_w = std::lgamma(i + 1.0) - std::lgamma(d + 1.0) - std::lgamma(rest + 1.0) +
                                     (rest > 0 ? rest * log_stay : 0.0) + d * log_new;
                acc += std::exp(log_w) * prob[src];
            }
            next[i] = acc;
        }
        prob = std::move(next);
    }
    std::vector<double> out(prob.size());
    for (std::size_t i = 0; i < prob.size(); ++i)
        out[i] = prob[i] > 0.0 ? std::log(prob[i]) + (j > 0 ? i * std::log(static_cast<double>(j)) : 0.0) -
                                     std::lgamma(i + 1.0)
                               : -kInf;
    return cache.emplace(key, std::move(out)).first->second;
}

double phi_coeff(int i, int j, int m) {
    if (i < 0 || j < 0 || m < 0 || i > j * m) return 0.0;
    return phi_polynomial(j, m)[static_cast<std::size_t>(i)];
}

namespace {

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// log(sin(pi z)) without overflow for large |Im z|.
std::complex<double> log_sin_pi(std::complex<double> z) {
    const double pi = std::numbers::pi;
    const std::complex<double> i(0.0, 1.0);
    if (std::abs(z.imag()) < 15.0) return std::log(std::sin(pi * z));
    if (z.imag() > 0.0) {
        // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
        return std::log(0.5 * i) - i * pi * z + std::log(1.0 - std::exp(2.0 * i * pi * z));
    }
    // sin(pi z) = (-i/2) e^{i pi z} (1 - e^{-2 i pi z})
    return std::log(-0.5 * i) + i * pi * z + std::log(1.0 - std::exp(-2.0 * i * pi * z));
}

}  // namespace

std::complex<double> log_gamma(std::complex<double> z) {
    const double pi = std::numbers::pi;
    if (z.real() < 0.5) {
        // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return std::log(pi) - log_sin_pi(z) - log_gamma(1.0 - z);
    }
    z -= 1.0;
    std::complex<double> x = kLanczos[0];
    for (int k = 1; k < 9; ++k) x += kLanczos[k] / (z + static_cast<double>(k));
    const std::complex<double> t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

double log_abs_gamma(double x, int* sign) {
    if (x <= 0.0 && x == std::floor(x)) {
        if (sign) *sign = 0;
        return std::numeric_limits<double>::infinity();
    }
    int s = 1;
    const double v = boost::math::lgamma(x, &s);
    if (sign) *sign = s;
    return v;
}

}  // namespace mmfso
