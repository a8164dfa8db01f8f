#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mmfso/cellular.hpp"
#include "mmfso/errors.hpp"
#include "mmfso/quad.hpp"

using namespace mmfso;

namespace {

// Regularized lower incomplete gamma by its power series (x moderate).
double gamma_p_series(double a, double x) {
    if (x <= 0.0) return 0.0;
    double term = std::exp(a * std::log(x) - x - std::lgamma(a + 1.0));
    double sum = term;
    for (int n = 1; n < 5000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

double gamma_pdf(double a, double scale, double x) {
    if (x <= 0.0) return 0.0;
    return std::exp((a - 1.0) * std::log(x / scale) - x / scale - std::lgamma(a)) / scale;
}

// P(at least k of M i.i.d. draws fall below a point with cdf value f).
double order_stat_cdf(int M, int k, double f) {
    double s = 0.0;
    for (int i = k; i <= M; ++i)
        s += std::exp(std::lgamma(M + 1.0) - std::lgamma(i + 1.0) - std::lgamma(M - i + 1.0)) * std::pow(f, i) *
             std::pow(1.0 - f, M - i);
    return s;
}

double ks_statistic(std::vector<double> v, const std::function<double(double)>& cdf) {
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = cdf(v[i]);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

double empirical(const std::vector<double>& sorted, double x) {
    return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) / sorted.size();
}

PrsSelection prs(int M, int k, double rho) {
    PrsSelection s;
    s.M = M;
    s.k = k;
    s.rho = rho;
    return s;
}

InterferenceConfig interferers(int mz, double gz = 1.5848931924611136) {
    InterferenceConfig c;
    c.mz = mz;
    c.gamma_z_bar = gz;
    return c;
}

std::vector<double> draw(const EffSinrStats& st, int n, std::uint64_t seed, PairSampler mode = PairSampler::Auto) {
    Rng rng(seed);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = st.sample(rng, mode);
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("path gain and noise power") {
    const CellularConfig cfg;
    const double fspl = 20.0 * std::log10(4.0 * std::numbers::pi * 50.0 * 30e9 / 3e8);
    CHECK(fspl == doctest::Approx(95.9636).epsilon(1e-6));
    CHECK(path_gain_db(cfg, 0.0, 50.0) == doctest::Approx(8.0 - fspl).epsilon(1e-12));
    CHECK(path_gain_db(cfg, 0.0, 50.0) == doctest::Approx(-87.96).epsilon(1e-4));
    CHECK(path_gain_db(cfg, 0.0, 50.0) - path_gain_db(cfg, 2.0, 50.0) == doctest::Approx(100.0).epsilon(1e-12));

    CellularConfig doubled = cfg;
    doubled.fc_hz *= 2.0;
    CHECK(path_gain_db(cfg, 2.0, 50.0) - path_gain_db(doubled, 2.0, 50.0) == doctest::Approx(6.0206).epsilon(1e-5));

    CellularConfig expo = cfg;
    expo.pathloss_term = PathlossTerm::Exponent;
    CHECK(path_gain_db(expo, 0.0, 50.0) - path_gain_db(expo, 2.0, 50.0) == doctest::Approx(20.0 * std::log10(50.0)));

    CHECK(noise_power_dbm(cfg) == doctest::Approx(10.0 * std::log10(7e8) - 142.0).epsilon(1e-12));
    CHECK(noise_power_dbm(cfg) == doctest::Approx(-53.549).epsilon(1e-5));
    CellularConfig nf = cfg;
    nf.nf_db = 3.0;
    CHECK(noise_power_dbm(nf) - noise_power_dbm(cfg) == doctest::Approx(3.0));
    CellularConfig wide = cfg;
    wide.b_hz *= 10.0;
    CHECK(noise_power_dbm(wide) - noise_power_dbm(cfg) == doctest::Approx(10.0));
}

TEST_CASE("jakes correlation and blockage probability") {
    CHECK(jakes_rho(30.0, 0.0) == 1.0);
    CHECK(std::abs(jakes_rho(1.0, 2.404825557695773 / (2.0 * std::numbers::pi))) < 1e-12);
    const double x = 2.0 * std::numbers::pi * 30.0 * 1e-3;
    double series = 0.0, term = 1.0;
    for (int k = 0; k < 30; ++k) {
        series += term;
        term *= -(x * x / 4.0) / ((k + 1.0) * (k + 1.0));
    }
    CHECK(jakes_rho(30.0, 1e-3) == doctest::Approx(series).epsilon(1e-13));
    CHECK(jakes_rho(30.0, 1e-3) == doctest::Approx(0.99114).epsilon(1e-5));

    PrsSelection s = prs(4, 2, 0.2);
    s.fd_hz = 30.0;
    s.td_s = 1e-3;
    CHECK(s.resolved_rho() == doctest::Approx(series).epsilon(1e-13));

    CHECK(p_los(0.0, 63.0) == 1.0);
    CHECK(p_los(63.0, 63.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(p_los(100.0, 200.0) == doctest::Approx(0.6065).epsilon(1e-4));
    CHECK(p_los(100.0, 63.0) == doctest::Approx(0.2043).epsilon(1e-3));

    CHECK(effective_sinr(5.0, 0.0) == 5.0);
    CHECK(effective_sinr(5.0, 4.0) == 1.0);
    CHECK(blockage_mixed_cdf(1.0, 0.3, 0.9) == 0.3);
    CHECK(blockage_mixed_cdf(0.5, 0.2, 0.8) == doctest::Approx(0.5));
    for (double p : {0.0, 0.1, 0.37, 0.9, 1.0}) {
        const double m = blockage_mixed_cdf(p, 0.25, 0.6);
        CHECK(m >= 0.25);
        CHECK(m <= 0.6);
    }
}

TEST_CASE("correlated pair sampler") {
    SUBCASE("perfect correlation repeats the draw") {
        Rng rng(1);
        for (auto mode : {PairSampler::Branch, PairSampler::Mixture}) {
            const auto p = sample_correlated_snr_pair(1.0, 4.0, 3.0, rng, mode);
            CHECK(p.outdated == doctest::Approx(p.updated).epsilon(1e-14));
        }
    }
    SUBCASE("marginals are Gamma(Nm, gamma_bar / Nm)") {
        const int n = 1000000;
        for (auto [nm, mode] : {std::pair{4.0, PairSampler::Branch}, std::pair{64.0, PairSampler::Mixture},
                                std::pair{2.5, PairSampler::Branch}}) {
            Rng rng(11);
            std::vector<double> xs(n), ys(n);
            for (int i = 0; i < n; ++i) {
                const auto p = sample_correlated_snr_pair(0.64, nm, 5.0, rng, mode);
                xs[i] = p.outdated;
                ys[i] = p.updated;
            }
            const double theta = 5.0 / nm;
            auto cdf = [&](double v) { return gamma_p_series(nm, v / theta); };
            CHECK(ks_statistic(xs, cdf) < 0.002);
            CHECK(ks_statistic(ys, cdf) < 0.002);
        }
    }
    SUBCASE("power correlation equals rho for both constructions") {
        const int n = 1000000;
        for (double rho : {0.0, 0.64}) {
            for (auto mode : {PairSampler::Branch, PairSampler::Mixture}) {
                Rng rng(5);
                double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
                for (int i = 0; i < n; ++i) {
                    const auto p = sample_correlated_snr_pair(rho, 4.0, 1.0, rng, mode);
                    sx += p.outdated;
                    sy += p.updated;
                    sxx += p.outdated * p.outdated;
                    syy += p.updated * p.updated;
                    sxy += p.outdated * p.updated;
                }
                const double mx = sx / n, my = sy / n;
                const double corr = (sxy / n - mx * my) / std::sqrt((sxx / n - mx * mx) * (syy / n - my * my));
                // Standard error of a sample correlation is below 1/sqrt(n).
                CHECK(std::abs(corr - rho) < 4.0 / std::sqrt(static_cast<double>(n)));
            }
        }
    }
    SUBCASE("branch construction needs half-integer Nm") {
        Rng rng(1);
        CHECK_THROWS_AS(sample_correlated_snr_pair(0.5, 2.3, 1.0, rng, PairSampler::Branch), ConfigError);
    }
}

TEST_CASE("PRS selection") {
    const std::vector<SnrPair> one{{2.0, 3.0}};
    CHECK(prs_select(1, 1, one).updated == 3.0);

    const std::vector<SnrPair> pairs{{3.0, 30.0}, {1.0, 10.0}, {2.0, 20.0}, {1.0, 11.0}};
    CHECK(prs_select(4, 1, pairs).updated == 10.0);  // tie at 1.0: lower index first
    CHECK(prs_select(4, 2, pairs).updated == 11.0);
    CHECK(prs_select(4, 4, pairs).updated == 30.0);
    CHECK_THROWS_AS(prs_select(4, 5, pairs), ConfigError);
    CHECK_THROWS_AS(prs_select(3, 1, pairs), ConfigError);

    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<SnrPair> ps(6);
        double best = 0.0;
        for (auto& p : ps) {
            p = sample_correlated_snr_pair(1.0, 2.0, 1.0, rng);
            best = std::max(best, p.updated);
        }
        CHECK(prs_select(6, 6, ps).updated == best);
    }

    // Stale feedback loses selection gain.
    auto mean_selected = [](double rho) {
        Rng r(17);
        const int n = 1000000;
        double s = 0.0, s2 = 0.0;
        std::vector<SnrPair> ps(10);
        for (int i = 0; i < n; ++i) {
            for (auto& p : ps) p = sample_correlated_snr_pair(rho, 4.0, 1.0, r, PairSampler::Mixture);
            const double v = prs_select(10, 10, ps).updated;
            s += v;
            s2 += v * v;
        }
        const double m = s / n;
        return std::pair{m, std::sqrt((s2 / n - m * m) / n)};
    };
    const auto [m_hi, se_hi] = mean_selected(0.9);
    const auto [m_lo, se_lo] = mean_selected(0.1);
    CHECK(m_hi - m_lo > 5.0 * std::hypot(se_hi, se_lo));
}

TEST_CASE("interference sampler") {
    Rng rng(9);
    CHECK(sample_interference(interferers(0), rng) == 0.0);

    const int n = 1000000;
    for (auto mode : {InterferenceMean::PerInterferer, InterferenceMean::Aggregate}) {
        InterferenceConfig ic = interferers(3, 2.0);
        ic.mean_mode = mode;
        const double scale = mode == InterferenceMean::Aggregate ? 2.0 / 3.0 : 2.0;
        std::vector<double> z(n);
        double s = 0.0;
        for (auto& v : z) s += v = sample_interference(ic, rng);
        const double mean = 3.0 * scale;
        const double se = std::sqrt(3.0) * scale / std::sqrt(static_cast<double>(n));
        CHECK(std::abs(s / n - mean) < 4.0 * se);
        CHECK(ks_statistic(z, [&](double v) { return gamma_p_series(3.0, v / scale); }) < 0.002);
    }

    InterferenceConfig pc = interferers(3, 2.0);
    pc.poisson_count = true;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += sample_interference(pc, rng);
    // Compound Poisson: mean Mz gz.
    CHECK(s / n == doctest::Approx(6.0).epsilon(0.01));
}

TEST_CASE("selection mixture bookkeeping") {
    const EffSinrStats st(4.0, 3.0, prs(6, 4, 0.6), interferers(0));
    REQUIRE(st.has_closed_form());
    double total = 0.0;
    for (const auto& b : st.blocks()) {
        double w = 0.0;
        for (double v : b.weights) {
            CHECK(v >= 0.0);
            w += v;
        }
        CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
        total += b.coef;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reduction to the Gamma law") {
    // One candidate, perfect feedback, no interference.
    for (double nm : {1.0, 4.0, 64.0}) {
        const EffSinrStats st(2.0, nm, prs(1, 1, 1.0), interferers(0));
        const double theta = 2.0 / nm;
        for (int i = 1; i <= 20; ++i) {
            const double x = 0.2 * i * 2.0 * (nm < 8 ? 1.0 : 0.4) + (nm < 8 ? 0.0 : 1.2);
            CHECK(std::abs(st.cdf(x) - gamma_p_series(nm, x / theta)) < 1e-6);
        }
    }
    // With a single candidate the updated SNR keeps its marginal whatever rho is.
    const EffSinrStats st(2.0, 4.0, prs(1, 1, 0.3), interferers(0));
    for (double x : {0.3, 1.0, 2.0, 5.0}) CHECK(st.cdf(x) == doctest::Approx(gamma_p_series(4.0, 2.0 * x)).epsilon(1e-10));
}

TEST_CASE("perfect-feedback order statistic") {
    for (auto [M, k, nm] : {std::tuple{10, 10, 2.0}, std::tuple{5, 2, 4.0}, std::tuple{8, 5, 1.0}}) {
        const EffSinrStats st(3.0, nm, prs(M, k, 1.0), interferers(0));
        const double theta = 3.0 / nm;
        for (double x : {0.01, 0.1, 0.5, 1.0, 3.0, 6.0, 12.0}) {
            const double oracle = order_stat_cdf(M, k, gamma_p_series(nm, x / theta));
            const auto e = st.cdf_eval(x);
            CHECK(e.value == doctest::Approx(oracle).epsilon(1e-7));
        }
    }
    // Deep lower tail: the alternating sum cancels and the numeric route answers.
    const EffSinrStats st(3.0, 2.0, prs(10, 10, 1.0), interferers(0));
    const auto e = st.cdf_eval(1e-3);
    CHECK(e.tag == Tag::NumericFallback);
    CHECK(e.value == doctest::Approx(order_stat_cdf(10, 10, gamma_p_series(2.0, 1e-3 / 1.5))).epsilon(1e-6));
}

TEST_CASE("interference averaging matches direct quadrature") {
    // M = k = 1, rho = 1: F(x) = E_Z[P(Nm, x (1 + Z) / theta)].
    for (auto mode : {InterferenceMean::PerInterferer, InterferenceMean::Aggregate}) {
        InterferenceConfig ic = interferers(3, 1.5);
        ic.mean_mode = mode;
        const double s = ic.scale();
        const EffSinrStats st(5.0, 4.0, prs(1, 1, 1.0), ic);
        for (double x : {0.05, 0.3, 1.0, 4.0}) {
            auto f = [&](double z) { return gamma_p_series(4.0, x * (1.0 + z) / 1.25) * gamma_pdf(3.0, s, z); };
            const double oracle = integrate_pieces(f, {0.0, s, 3.0 * s, 10.0 * s, 40.0 * s, 200.0 * s}, 1e-12).value;
            CHECK(st.cdf(x) == doctest::Approx(oracle).epsilon(1e-8));
        }
    }
}

TEST_CASE("effective SINR cdf against Monte Carlo") {
    const EffSinrStats st(10.0, 4.0, prs(10, 8, 0.7), interferers(3));
    const auto v = draw(st, 1000000, 21);
    const double median = v[v.size() / 2];
    // Binomial standard error of the empirical median's cdf value is 5e-4.
    CHECK(std::abs(st.cdf(median) - 0.5) < 3.0 * 5e-4 + 1e-6);
    for (double q : {0.001, 0.05, 0.3, 0.8, 0.99}) {
        const double x = v[static_cast<std::size_t>(q * v.size())];
        const double se = std::sqrt(q * (1.0 - q) / v.size());
        CHECK(std::abs(st.cdf(x) - q) < 4.0 * se + 1e-6);
    }
    // The mixture sampler draws the same law.
    const auto w = draw(st, 200000, 22, PairSampler::Mixture);
    for (double x : {1.0, 2.0, 4.0}) CHECK(std::abs(empirical(w, x) - st.cdf(x)) < 0.005);
}

TEST_CASE("large antenna arrays and many interferers") {
    const EffSinrStats st(10.0, 64.0, prs(10, 10, 0.9), interferers(3));
    const auto v = draw(st, 200000, 5);
    for (double q : {0.01, 0.5, 0.95}) {
        const double x = v[static_cast<std::size_t>(q * v.size())];
        const double se = std::sqrt(q * (1.0 - q) / v.size());
        CHECK(std::abs(st.cdf(x) - q) < 4.0 * se);
    }
    // Random interferer count.
    InterferenceConfig pc = interferers(3);
    pc.poisson_count = true;
    const EffSinrStats sp(10.0, 4.0, prs(6, 3, 0.5), pc);
    const auto u = draw(sp, 400000, 6);
    for (double x : {0.5, 2.0, 6.0}) CHECK(std::abs(empirical(u, x) - sp.cdf(x)) < 0.004);
}

TEST_CASE("non-integer Nm uses the numeric route") {
    const EffSinrStats st(4.0, 2.5, prs(4, 3, 0.6), interferers(1));
    CHECK_FALSE(st.has_closed_form());
    const auto v = draw(st, 400000, 8);
    for (double x : {0.3, 1.0, 3.0}) {
        const auto e = st.cdf_eval(x);
        CHECK(e.tag == Tag::NumericFallback);
        CHECK(std::abs(e.value - empirical(v, x)) < 0.004);
    }
    double m = 0.0;
    for (double x : v) m += x;
    CHECK(st.moment(1.0).value == doctest::Approx(m / v.size()).epsilon(0.01));
}

TEST_CASE("cdf shape and pdf consistency") {
    const EffSinrStats st(5.0, 3.0, prs(7, 4, 0.8), interferers(2));
    CHECK(st.cdf(0.0) == 0.0);
    CHECK(st.cdf(1e4) == doctest::Approx(1.0).epsilon(1e-12));
    double prev = 0.0;
    for (int i = 1; i <= 200; ++i) {
        const double c = st.cdf(0.05 * i);
        CHECK(c >= prev - 1e-15);
        prev = c;
    }
    for (auto [a, b] : {std::pair{0.1, 0.5}, std::pair{0.5, 2.0}, std::pair{2.0, 9.0}}) {
        const double area = integrate([&](double x) { return st.pdf(x); }, a, b, 1e-12).value;
        CHECK(area == doctest::Approx(st.cdf(b) - st.cdf(a)).epsilon(1e-9));
    }
}

TEST_CASE("moments") {
    const EffSinrStats st(5.0, 2.0, prs(5, 3, 0.5), interferers(2));
    for (double p : {1.0, 2.0, 0.5, -0.5}) {
        const double quad =
            integrate_pieces([&](double x) { return std::pow(x, p) * st.pdf(x); }, {0.0, 0.5, 2.0, 8.0, 30.0, 200.0}, 1e-11)
                .value;
        CHECK(st.moment(p).value == doctest::Approx(quad).epsilon(1e-7));
    }
    // Without selection or interference: Gamma moments.
    const EffSinrStats plain(5.0, 3.0, prs(1, 1, 0.4), interferers(0));
    CHECK(plain.moment(1.0).value == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(plain.moment(2.0).value == doctest::Approx(25.0 * 4.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(plain.moment(-3.0), NumericError);
}

TEST_CASE("achievable rate") {
    SUBCASE("closed form against quadrature of the pdf") {
        for (int mz : {2, 0}) {
            const EffSinrStats st(10.0, 2.0, prs(5, 3, 0.5), interferers(mz));
            const auto r = st.rate_c1();
            CHECK(r.tag == Tag::Analytic);
            const double quad = integrate_pieces([&](double x) { return std::log1p(x) * st.pdf(x); },
                                                 {0.0, 1.0, 5.0, 20.0, 80.0, 400.0, 4000.0}, 1e-11)
                                    .value;
            CHECK(std::abs(r.value - quad) / quad < 1e-4);
        }
    }
    SUBCASE("large arrays use the survival integral") {
        const EffSinrStats st(10.0, 64.0, prs(10, 10, 0.9), interferers(3));
        const auto r = st.rate_c1();
        CHECK(r.tag == Tag::NumericFallback);
        const auto v = draw(st, 200000, 4);
        double s = 0.0, s2 = 0.0;
        for (double x : v) {
            s += std::log1p(x);
            s2 += std::log1p(x) * std::log1p(x);
        }
        const double m = s / v.size();
        const double se = std::sqrt((s2 / v.size() - m * m) / v.size());
        CHECK(std::abs(r.value - m) < 4.0 * se);
    }
    SUBCASE("low-SNR expansion") {
        const EffSinrStats st(0.01, 2.0, prs(5, 3, 0.5), interferers(2));
        const double e = st.rate_c1_low_snr();
        CHECK(std::abs(st.rate_c1().value - e) / e < 0.02);
    }
    SUBCASE("Jensen bound") {
        for (double gb : {0.1, 1.0, 10.0, 100.0}) {
            for (double rho : {0.0, 0.5, 1.0}) {
                const EffSinrStats st(gb, 2.0, prs(4, 2, rho), interferers(1));
                CHECK(st.rate_c1().value <= st.rate_c1_jensen() + 1e-9);
            }
        }
    }
}

TEST_CASE("small-argument behaviour") {
    for (double rho : {0.5, 1.0}) {
        const EffSinrStats st(3.0, 2.0, prs(4, 2, rho), interferers(1));
        CHECK(st.diversity_order() == (rho < 1.0 ? 2.0 : 4.0));
        const double x = 1e-3;
        CHECK(st.cdf(x) / st.cdf_leading(x) == doctest::Approx(1.0).epsilon(0.02));
        CHECK(st.cdf(x / 10) / st.cdf_leading(x / 10) == doctest::Approx(1.0).epsilon(0.003));
    }
}

TEST_CASE("LOS and NLOS mixture") {
    CellularConfig cfg;
    cfg.n_antennas = 2;
    cfg.gamma_bar = 100.0;
    cfg.alpha_los = 2.0;
    cfg.alpha_nlos = 2.1;  // 5 dB weaker NLOS at L1 = 50 m
    const auto [los, nlos] = average_snrs(cfg);
    CHECK(los == 100.0);
    CHECK(nlos == doctest::Approx(100.0 * std::pow(10.0, -0.5)).epsilon(1e-12));

    const CellularLink link(cfg, prs(4, 3, 0.8), interferers(1));
    CHECK(link.p_los() == doctest::Approx(std::exp(-50.0 / 63.0)));
    for (double x : {1.0, 10.0, 50.0}) {
        const double mixed = link.p_los() * link.los().cdf(x) + (1.0 - link.p_los()) * link.nlos().cdf(x);
        CHECK(link.cdf(x) == doctest::Approx(mixed).epsilon(1e-14));
    }

    CellularConfig forced = cfg;
    forced.p_los = 1.0;
    const CellularLink always(forced, prs(4, 3, 0.8), interferers(1));
    CHECK(always.cdf(10.0) == always.los().cdf(10.0));

    CellularConfig budget;
    budget.tx_power_dbm = 30.0;
    const double snr_db = 30.0 + path_gain_db(budget, 2.0, 50.0) - noise_power_dbm(budget);
    CHECK(10.0 * std::log10(average_snrs(budget).first) == doctest::Approx(snr_db).epsilon(1e-12));

    // Blocked draws follow the mixture.
    Rng rng(2);
    std::vector<double> v(200000);
    for (auto& x : v) x = link.sample(rng);
    std::sort(v.begin(), v.end());
    for (double x : {5.0, 20.0, 60.0}) CHECK(std::abs(empirical(v, x) - link.cdf(x)) < 0.005);
}

TEST_CASE("configuration errors") {
    CHECK_THROWS_AS(EffSinrStats(1.0, 2.0, prs(3, 4, 0.5), interferers(0)), ConfigError);
    CHECK_THROWS_AS(EffSinrStats(1.0, 2.0, prs(3, 0, 0.5), interferers(0)), ConfigError);
    CHECK_THROWS_AS(EffSinrStats(1.0, 2.0, prs(3, 2, 1.5), interferers(0)), ConfigError);
    CHECK_THROWS_AS(EffSinrStats(-1.0, 2.0, prs(3, 2, 0.5), interferers(0)), ConfigError);
    CHECK_THROWS_AS(EffSinrStats(1.0, 2.0, prs(3, 2, 0.5), interferers(-1)), ConfigError);
    PrsSelection far = prs(3, 2, 0.5);
    far.fd_hz = 100.0;
    far.td_s = 0.005;  // J0(pi) < 0
    CHECK_THROWS_AS(far.validate(), ConfigError);
    CellularConfig cfg;
    cfg.n_antennas = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = CellularConfig{};
    cfg.m = 0.3;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = CellularConfig{};
    cfg.b_hz = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
