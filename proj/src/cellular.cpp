#include "mmfso/cellular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mmfso/diag.hpp"
#include "mmfso/errors.hpp"
#include "mmfso/meijer_g.hpp"
#include "mmfso/quad.hpp"
#include "mmfso/specfun.hpp"
#include "mmfso/summation.hpp"

namespace mmfso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSpeedOfLight = 3e8;
constexpr double kEps = std::numeric_limits<double>::epsilon();
// An alternating sum that has lost more than this factor is not trusted.
constexpr double kMaxCancellation = 1e10;
// Gamma(a) overflows a little above 170, and the rate kernel with it.
constexpr int kMaxMeijerShape = 150;
// Meijer-G calls allowed for one rate evaluation.
constexpr double kMeijerBudget = 6000.0;

double lfact(int n) {
    thread_local std::vector<double> table{0.0};
    while (static_cast<int>(table.size()) <= n) table.push_back(table.back() + std::log(static_cast<double>(table.size())));
    return table[static_cast<std::size_t>(n)];
}

double lchoose(int n, int k) { return lfact(n) - lfact(k) - lfact(n - k); }

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

// Interferer count law: list of (count, probability).
std::vector<std::pair<int, double>> count_law(const InterferenceConfig& icfg) {
    if (icfg.mz == 0 || icfg.gamma_z_bar == 0.0) return {{0, 1.0}};
    if (!icfg.poisson_count) return {{icfg.mz, 1.0}};
    const double mean = icfg.mz;
    const int hi = static_cast<int>(mean + 12.0 * std::sqrt(mean) + 20.0);
    std::vector<std::pair<int, double>> out;
    for (int n = 0; n <= hi; ++n) {
        const double p = std::exp(-mean + n * std::log(mean) - lfact(n));
        if (p > 1e-300) out.emplace_back(n, p);
    }
    return out;
}

// Law of U = Poisson(lambda) + NegBin(n, p) mixed over the interferer
// count, with p = lambda s / (1 + lambda s). Averaging a Gamma(a, c) tail
// over the interference Z ~ Gamma(n, s) gives P(Gamma(a, c) <= x (1 + Z)) =
// P(U >= a) with lambda = x / c. All quantities are sums of positive terms.
struct MixedPoisson {
    std::vector<double> pmf;    // P(U = u), u = 0..A
    std::vector<double> lower;  // P(U < a), a = 0..A+1
    std::vector<double> upper;  // P(U >= a), a = 0..A+1
};

MixedPoisson mixed_poisson(double lambda, double s, const std::vector<std::pair<int, double>>& counts, int A) {
    const auto n_u = static_cast<std::size_t>(A) + 1;
    std::vector<double> pois(n_u, 0.0);
    if (lambda == 0.0) {
        pois[0] = 1.0;
    } else {
        const double ll = std::log(lambda);
        for (std::size_t u = 0; u < n_u; ++u) pois[u] = std::exp(-lambda + u * ll - lfact(static_cast<int>(u)));
    }
    // Upper Poisson tail q[m] = P(Pois >= m), m = 0..A+1, filled downwards.
    std::vector<double> q(n_u + 1, 0.0);
    q[n_u] = lambda == 0.0 ? 0.0 : boost::math::gamma_p(static_cast<double>(n_u), lambda);
    for (std::size_t m = n_u; m-- > 0;) q[m] = q[m + 1] + pois[m];

    MixedPoisson out;
    out.pmf.assign(n_u, 0.0);
    double tail = 0.0;  // P(U >= A+1)
    std::vector<double> nb(n_u);
    for (const auto& [n, prob] : counts) {
        const double ls = lambda * s;
        if (n == 0 || ls == 0.0) {
            for (std::size_t u = 0; u < n_u; ++u) out.pmf[u] += prob * pois[u];
            tail += prob * q[n_u];
            continue;
        }
        const double log_p = std::log(ls) - std::log1p(ls);
        const double log_q = -std::log1p(ls);
        for (std::size_t v = 0; v < n_u; ++v)
            nb[v] = std::exp(std::lgamma(v + static_cast<double>(n)) - std::lgamma(static_cast<double>(n)) -
                             lfact(static_cast<int>(v)) + n * log_q + v * log_p);
        for (std::size_t u = 0; u < n_u; ++u) {
            double acc = 0.0;
            for (std::size_t v = 0; v <= u; ++v) acc += nb[v] * pois[u - v];
            out.pmf[u] += prob * acc;
        }
        double t = boost::math::ibeta(static_cast<double>(n_u), static_cast<double>(n), std::exp(log_p));
        for (std::size_t v = 0; v < n_u; ++v) t += nb[v] * q[n_u - v];
        tail += prob * t;
    }
    out.lower.assign(n_u + 1, 0.0);
    out.upper.assign(n_u + 1, 0.0);
    for (std::size_t a = 1; a <= n_u; ++a) out.lower[a] = out.lower[a - 1] + out.pmf[a - 1];
    out.upper[n_u] = tail;
    for (std::size_t a = n_u; a-- > 0;) out.upper[a] = out.upper[a + 1] + out.pmf[a];
    return out;
}

// E[h(X_(k))] for the k-th smallest of M i.i.d. Gamma(nm, theta) draws,
// integrated over the uniform order statistic in logit coordinates so that
// mass deep in either tail is resolved.
double order_stat_integral(int k, int M, double nm, double theta, const std::function<double(double)>& h) {
    const double log_b = std::lgamma(k) + std::lgamma(M - k + 1.0) - std::lgamma(M + 1.0);
    auto f = [&](double t) {
        const double log_u = -std::log1p(std::exp(-t));
        const double log_v = -std::log1p(std::exp(t));  // log(1 - u)
        const double log_w = k * log_u + (M - k + 1.0) * log_v - log_b;
        if (log_w < -745.0) return 0.0;
        const double q = t < 0.0 ? boost::math::gamma_p_inv(nm, std::exp(log_u)) : boost::math::gamma_q_inv(nm, std::exp(log_v));
        return std::exp(log_w) * h(theta * q);
    };
    static const std::vector<double> breaks{-700, -400, -200, -100, -50, -25, -12, -6, -3, 0, 3, 6, 12, 25, 40};
    return integrate_pieces(f, breaks, 1e-10).value;
}

double log_gamma_ratio_moment(double a, double p) { return std::lgamma(a + p) - std::lgamma(a); }

}  // namespace

void CellularConfig::validate() const {
    auto bad = [](const std::string& what) { throw ConfigError("cellular: " + what); };
    if (!(fc_hz > 0)) bad("fc must be positive");
    if (n_antennas < 1) bad("N must be at least 1");
    if (!(m >= 0.5)) bad("Nakagami m must be at least 0.5");
    if (!(b_hz > 0)) bad("bandwidth must be positive");
    if (!(l1_m > 0)) bad("L1 must be positive");
    if (!(mu_block_m > 0)) bad("mu_block must be positive");
    if (p_los && !(*p_los >= 0.0 && *p_los <= 1.0)) bad("p_los must lie in [0, 1]");
    if (gamma_bar && !(*gamma_bar > 0.0 && std::isfinite(*gamma_bar))) bad("gamma_bar must be positive");
    if (alpha_los > alpha_nlos) warn("cellular: alpha_los exceeds alpha_nlos");
}

double PrsSelection::resolved_rho() const {
    if (fd_hz && td_s) return jakes_rho(*fd_hz, *td_s);
    return rho;
}

void PrsSelection::validate() const {
    if (M < 1) throw ConfigError("prs: M must be at least 1");
    if (k < 1 || k > M) throw ConfigError("prs: k must satisfy 1 <= k <= M");
    if (fd_hz.has_value() != td_s.has_value()) throw ConfigError("prs: fd and Td must be given together");
    if (fd_hz && (*fd_hz < 0 || *td_s < 0)) throw ConfigError("prs: fd and Td must be non-negative");
    const double r = resolved_rho();
    if (!(r >= 0.0 && r <= 1.0)) {
        std::ostringstream os;
        os << "prs: correlation " << r << " outside [0, 1]";
        throw ConfigError(os.str());
    }
}

double InterferenceConfig::scale() const {
    if (mean_mode == InterferenceMean::Aggregate) return mz > 0 ? gamma_z_bar / mz : 0.0;
    return gamma_z_bar;
}

void InterferenceConfig::validate() const {
    if (mz < 0) throw ConfigError("interference: Mz must be non-negative");
    if (!(gamma_z_bar >= 0.0) || !std::isfinite(gamma_z_bar)) throw ConfigError("interference: gamma_z_bar must be non-negative");
}

double path_gain_db(const CellularConfig& cfg, double alpha, double l1_m) {
    if (!(l1_m > 0)) throw ConfigError("path_gain_db: L1 must be positive");
    const double free_space = 20.0 * std::log10(4.0 * M_PI * l1_m * cfg.fc_hz / kSpeedOfLight);
    const double extra = cfg.pathloss_term == PathlossTerm::Literal ? alpha * l1_m : 10.0 * alpha * std::log10(l1_m);
    return cfg.gt_db + cfg.gr_db - free_space - extra;
}

double noise_power_dbm(const CellularConfig& cfg) {
    if (!(cfg.b_hz > 0)) throw ConfigError("noise_power_dbm: bandwidth must be positive");
    return 10.0 * std::log10(cfg.b_hz) + cfg.n0_dbm_hz + cfg.nf_db;
}

double jakes_rho(double fd_hz, double td_s) { return bessel_j0(2.0 * M_PI * fd_hz * td_s); }

double p_los(double d_m, double mu_m) {
    if (!(d_m >= 0) || !(mu_m > 0)) throw ConfigError("p_los: need d >= 0 and mu > 0");
    return std::exp(-d_m / mu_m);
}

std::pair<double, double> average_snrs(const CellularConfig& cfg) {
    const double offset_db = path_gain_db(cfg, cfg.alpha_nlos, cfg.l1_m) - path_gain_db(cfg, cfg.alpha_los, cfg.l1_m);
    double los;
    if (cfg.gamma_bar) {
        los = *cfg.gamma_bar;
    } else {
        los = std::pow(10.0, (cfg.tx_power_dbm + path_gain_db(cfg, cfg.alpha_los, cfg.l1_m) - noise_power_dbm(cfg)) / 10.0);
    }
    return {los, los * std::pow(10.0, offset_db / 10.0)};
}

SnrPair sample_correlated_snr_pair(double rho, double nm, double gamma_bar, Rng& rng, PairSampler mode) {
    const double theta = gamma_bar / nm;
    const double twice = 2.0 * nm;
    const bool branch_ok = is_integer(twice);
    if (mode == PairSampler::Branch && !branch_ok)
        throw ConfigError("sample_correlated_snr_pair: branch sampler needs 2 Nm integer");
    const bool use_branch = mode == PairSampler::Branch || (mode == PairSampler::Auto && branch_ok && nm <= 8.0);
    if (use_branch) {
        // Real Gaussian components of variance 1/2; each complex branch is two
        // of them. The updated gain is sqrt(rho) h + sqrt(1 - rho) w.
        std::normal_distribution<double> g(0.0, std::sqrt(0.5));
        const double a = std::sqrt(rho);
        const double b = std::sqrt(1.0 - rho);
        const int comps = static_cast<int>(std::lround(twice));
        double x = 0.0, y = 0.0;
        for (int i = 0; i < comps; ++i) {
            const double h = g(rng);
            const double hu = a * h + b * g(rng);
            x += h * h;
            y += hu * hu;
        }
        return {theta * x, theta * y};
    }
    std::gamma_distribution<double> gx(nm, theta);
    const double x = gx(rng);
    if (rho >= 1.0) return {x, x};
    const double c1 = (1.0 - rho) * theta;
    const double mean_k = rho * x / c1;
    std::uint64_t k = 0;
    if (mean_k > 0.0) k = std::poisson_distribution<std::uint64_t>(mean_k)(rng);
    std::gamma_distribution<double> gy(nm + static_cast<double>(k), c1);
    return {x, gy(rng)};
}

SnrPair prs_select(int M, int k, const std::vector<SnrPair>& pairs) {
    if (static_cast<int>(pairs.size()) != M) throw ConfigError("prs_select: expected M pairs");
    if (k < 1 || k > M) throw ConfigError("prs_select: rank k out of range");
    std::vector<int> idx(static_cast<std::size_t>(M));
    std::iota(idx.begin(), idx.end(), 0);
    std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), [&](int a, int b) {
        const double xa = pairs[static_cast<std::size_t>(a)].outdated;
        const double xb = pairs[static_cast<std::size_t>(b)].outdated;
        return xa < xb || (xa == xb && a < b);
    });
    return pairs[static_cast<std::size_t>(idx[static_cast<std::size_t>(k - 1)])];
}

double sample_interference(const InterferenceConfig& icfg, Rng& rng) {
    int n = icfg.mz;
    if (icfg.poisson_count && n > 0) n = static_cast<int>(std::poisson_distribution<int>(icfg.mz)(rng));
    if (n == 0 || icfg.gamma_z_bar == 0.0) return 0.0;
    return std::gamma_distribution<double>(n, icfg.scale())(rng);
}

double effective_sinr(double updated, double interference) { return updated / (interference + 1.0); }

EffSinrStats::EffSinrStats(double gamma_bar, double nm, const PrsSelection& sel, const InterferenceConfig& icfg)
    : gamma_bar_(gamma_bar), nm_(nm), sel_(sel), icfg_(icfg) {
    if (!(gamma_bar > 0.0) || !std::isfinite(gamma_bar)) throw ConfigError("cellular: gamma_bar must be positive");
    if (!(nm >= 0.5)) throw ConfigError("cellular: Nm must be at least 0.5");
    sel_.validate();
    icfg_.validate();
    rho_ = sel_.resolved_rho();
    closed_ = is_integer(nm_);
    if (!closed_) return;

    const int nmi = static_cast<int>(std::lround(nm_));
    const int M = sel_.M, k = sel_.k;
    const double theta = gamma_bar_ / nm_;
    const double log_kc = std::log(static_cast<double>(k)) + lchoose(M, k);
    for (int n = 0; n < k; ++n) {
        const int j = M - k + n;
        Block blk;
        blk.coef = (n % 2 ? -1.0 : 1.0) * std::exp(log_kc + lchoose(k - 1, n)) / (j + 1.0);
        blk.scale = theta * (1.0 + j * (1.0 - rho_)) / (j + 1.0);
        // Minimum of j + 1 outdated SNRs as a Gamma(Nm + i, theta / (j + 1)) mixture.
        const auto& lphi = log_phi_polynomial(j, nmi - 1);
        std::vector<double> logw(lphi.size());
        double top = -kInf;
        for (std::size_t i = 0; i < lphi.size(); ++i) {
            logw[i] = lphi[i] + std::lgamma(i + nm_) - std::lgamma(nm_) - (i + nm_ - 1.0) * std::log(j + 1.0);
            top = std::max(top, logw[i]);
        }
        // Thin each shape Nm + i into Nm + t, t ~ Binomial(i, 1 - r).
        const double r = (1.0 - rho_) * theta / blk.scale;
        std::vector<double> w(lphi.size(), 0.0);
        if (r <= 0.0) {
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(logw[i]);
        } else if (r >= 1.0) {
            w.assign(1, 1.0);
        } else {
            const double lr = std::log(r), l1r = std::log1p(-r);
            for (std::size_t i = 0; i < w.size(); ++i) {
                if (logw[i] < top - 745.0) continue;
                for (std::size_t t = 0; t <= i; ++t)
                    w[t] += std::exp(logw[i] + lchoose(static_cast<int>(i), static_cast<int>(t)) + t * l1r +
                                     (i - t) * lr);
            }
        }
        while (w.size() > 1 && w.back() < 1e-300) w.pop_back();
        blk.weights = std::move(w);
        blocks_.push_back(std::move(blk));
    }
}

double EffSinrStats::z_expectation(const std::function<double(double)>& g) const {
    const double s = icfg_.scale();
    double total = 0.0;
    for (const auto& [n, prob] : count_law(icfg_)) {
        if (n == 0) {
            total += prob * g(0.0);
            continue;
        }
        const double lg = std::lgamma(static_cast<double>(n));
        auto f = [&](double z) {
            if (z <= 0.0) return n == 1 ? g(0.0) / s : 0.0;
            return g(z) * std::exp((n - 1.0) * std::log(z / s) - z / s - lg) / s;
        };
        const double mean = n * s;
        total += prob * integrate_pieces(f, {0.0, 0.25 * mean, mean, 3.0 * mean, kInf}, 1e-11).value;
    }
    return total;
}

EffSinrStats::TailSums EffSinrStats::tail_sums(double x) const {
    const auto counts = count_law(icfg_);
    const double s = icfg_.scale();
    const int nmi = static_cast<int>(std::lround(nm_));
    CompensatedSum lo, up;
    for (const auto& blk : blocks_) {
        const int A = nmi + static_cast<int>(blk.weights.size()) - 1;
        const auto mp = mixed_poisson(x / blk.scale, s, counts, A);
        double part_lo = 0.0, part_up = 0.0;
        for (std::size_t t = 0; t < blk.weights.size(); ++t) {
            const auto a = static_cast<std::size_t>(nmi) + t;
            part_lo += blk.weights[t] * mp.upper[a];
            part_up += blk.weights[t] * mp.lower[a];
        }
        lo.add(blk.coef * part_lo);
        up.add(blk.coef * part_up);
    }
    return {{lo.value(), lo.abs_sum()}, {up.value(), up.abs_sum()}};
}

EffSinrStats::Sums EffSinrStats::density_sum(double x) const {
    const auto counts = count_law(icfg_);
    const double s = icfg_.scale();
    const int nmi = static_cast<int>(std::lround(nm_));
    CompensatedSum acc;
    for (const auto& blk : blocks_) {
        const int A = nmi + static_cast<int>(blk.weights.size()) - 1;
        const auto mp = mixed_poisson(x / blk.scale, s, counts, A);
        double part = 0.0;
        for (std::size_t t = 0; t < blk.weights.size(); ++t) {
            const auto a = static_cast<std::size_t>(nmi) + t;
            part += blk.weights[t] * static_cast<double>(a) * mp.pmf[a];
        }
        acc.add(blk.coef * part / x);
    }
    return {acc.value(), acc.abs_sum()};
}

double EffSinrStats::cdf_numeric(double x) const {
    const int M = sel_.M, k = sel_.k;
    const double theta = gamma_bar_ / nm_;

    if (rho_ >= 1.0) {
        return z_expectation([&](double z) {
            const double f = boost::math::gamma_p(nm_, x * (1.0 + z) / theta);
            return boost::math::ibeta(k, M - k + 1, f);
        });
    }

    const double c1 = (1.0 - rho_) * theta;
    const double x_hi = theta * boost::math::gamma_q_inv(nm_, 1e-18);
    const double mean_k_hi = rho_ * x_hi / c1;
    const int k_max = static_cast<int>(mean_k_hi + 12.0 * std::sqrt(mean_k_hi) + 30.0);

    if (closed_ && k_max <= 4000) {
        // Given the outdated SNR, the updated one is a Poisson(rho X / c1)
        // mixture of Gamma(Nm + K, c1) laws; their interference averages come
        // from one table.
        const int nmi = static_cast<int>(std::lround(nm_));
        const auto mp = mixed_poisson(x / c1, icfg_.scale(), count_law(icfg_), nmi + k_max);
        auto cond = [&](double xo) {
            const double mk = rho_ * xo / c1;
            const int lo = std::max(0, static_cast<int>(mk - 12.0 * std::sqrt(mk) - 20.0));
            const int hi = std::min(k_max, static_cast<int>(mk + 12.0 * std::sqrt(mk) + 20.0));
            double acc = 0.0;
            const double lmk = mk > 0 ? std::log(mk) : 0.0;
            for (int kk = lo; kk <= hi; ++kk) {
                const double pk = mk > 0 ? std::exp(-mk + kk * lmk - lfact(kk)) : (kk == 0 ? 1.0 : 0.0);
                acc += pk * mp.upper[static_cast<std::size_t>(nmi + kk)];
            }
            return acc;
        };
        return order_stat_integral(k, M, nm_, theta, cond);
    }

    return z_expectation([&](double z) {
        const double y = x * (1.0 + z);
        return order_stat_integral(k, M, nm_, theta, [&](double xo) {
            const boost::math::non_central_chi_squared_distribution<double> d(2.0 * nm_, 2.0 * rho_ * xo / c1);
            return boost::math::cdf(d, 2.0 * y / c1);
        });
    });
}

Evaluated EffSinrStats::cdf_eval(double x, double abs_tol) const {
    if (!(x > 0.0)) return {0.0, Tag::Analytic};
    if (std::isinf(x)) return {1.0, Tag::Analytic};
    double value = std::numeric_limits<double>::quiet_NaN();
    Tag tag = Tag::Analytic;
    if (closed_) {
        const auto [lo, up] = tail_sums(x);
        // Pick the representation with the smaller rounding error.
        const bool use_lower = lo.abs_sum <= up.abs_sum;
        value = use_lower ? lo.value : 1.0 - up.value;
        const double abs_used = use_lower ? lo.abs_sum : up.abs_sum;
        const bool relative_ok = abs_used <= kMaxCancellation * std::abs(value) || abs_used <= 1e-280;
        const bool absolute_ok = abs_tol > 0.0 && kEps * abs_used <= abs_tol;
        if (!std::isfinite(value) || !(relative_ok || absolute_ok)) value = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(value)) {
        value = cdf_numeric(x);
        tag = Tag::NumericFallback;
    }
    if (value < -1e-6 || value > 1.0 + 1e-6) {
        std::ostringstream os;
        os << "cellular cdf " << value << " at x = " << x << " clamped to [0, 1]";
        warn(os.str());
    }
    return {std::clamp(value, 0.0, 1.0), tag};
}

Evaluated EffSinrStats::pdf_eval(double x) const {
    if (!(x > 0.0) || std::isinf(x)) return {0.0, Tag::Analytic};
    if (closed_) {
        const auto d = density_sum(x);
        if (std::isfinite(d.value) && d.value >= 0.0 && d.abs_sum <= kMaxCancellation * std::abs(d.value))
            return {d.value, Tag::Analytic};
        if (std::isfinite(d.value) && d.abs_sum == 0.0) return {0.0, Tag::Analytic};
    }
    const double h = 1e-4 * x;
    const double v = (cdf_numeric(x + h) - cdf_numeric(x - h)) / (2.0 * h);
    return {std::max(v, 0.0), Tag::NumericFallback};
}

Evaluated EffSinrStats::moment(double p) const {
    if (!(p > -nm_)) throw NumericError("cellular moment: order must exceed -Nm");
    const double theta = gamma_bar_ / nm_;
    double ey = std::numeric_limits<double>::quiet_NaN();
    Tag tag = Tag::Analytic;
    if (closed_) {
        const int nmi = static_cast<int>(std::lround(nm_));
        CompensatedSum acc;
        for (const auto& blk : blocks_) {
            double part = 0.0;
            for (std::size_t t = 0; t < blk.weights.size(); ++t) {
                if (blk.weights[t] == 0.0) continue;
                part += blk.weights[t] * std::exp(p * std::log(blk.scale) + log_gamma_ratio_moment(nmi + static_cast<double>(t), p));
            }
            acc.add(blk.coef * part);
        }
        if (acc.value() > 0.0 && acc.abs_sum() <= kMaxCancellation * acc.value()) ey = acc.value();
    }
    if (!std::isfinite(ey)) {
        // E[Y^p] = int over the selected outdated SNR of E[Y^p | X].
        const int M = sel_.M, k = sel_.k;
        const double c1 = (1.0 - rho_) * theta;
        auto cond = [&](double xo) {
            if (rho_ >= 1.0) return std::pow(xo, p);
            const double mk = rho_ * xo / c1;
            const int lo = std::max(0, static_cast<int>(mk - 12.0 * std::sqrt(mk) - 20.0));
            const int hi = static_cast<int>(mk + 12.0 * std::sqrt(mk) + 20.0);
            double acc = 0.0;
            for (int kk = lo; kk <= hi; ++kk) {
                const double lp = mk > 0 ? -mk + kk * std::log(mk) - lfact(kk) : (kk == 0 ? 0.0 : -kInf);
                acc += std::exp(lp + p * std::log(c1) + log_gamma_ratio_moment(nm_ + kk, p));
            }
            return acc;
        };
        ey = order_stat_integral(k, M, nm_, theta, cond);
        tag = Tag::NumericFallback;
    }
    const double ez = z_expectation([p](double z) { return std::pow(1.0 + z, -p); });
    return {ey * ez, tag};
}

double EffSinrStats::rate_c1_low_snr() const { return moment(1.0).value; }

double EffSinrStats::rate_c1_jensen() const { return std::log1p(moment(1.0).value); }

Evaluated EffSinrStats::rate_c1() const {
    if (closed_) {
        const int nmi = static_cast<int>(std::lround(nm_));
        std::size_t terms = 0;
        int a_max = 0;
        for (const auto& blk : blocks_) {
            terms += blk.weights.size();
            a_max = std::max(a_max, nmi + static_cast<int>(blk.weights.size()) - 1);
        }
        const bool no_z = count_law(icfg_).front().first == 0 && count_law(icfg_).size() == 1;
        // The interference average needs on the order of a few hundred nodes.
        const double calls = static_cast<double>(terms) * (no_z ? 1.0 : 300.0);
        if (a_max <= kMaxMeijerShape && calls <= kMeijerBudget) {
            try {
                double worst_cancel = 0.0;
                auto given_z = [&](double z) {
                    CompensatedSum acc;
                    for (const auto& blk : blocks_) {
                        const double lb = std::log(blk.scale / (1.0 + z));
                        double part = 0.0;
                        for (std::size_t t = 0; t < blk.weights.size(); ++t) {
                            if (blk.weights[t] == 0.0) continue;
                            const double a = nmi + static_cast<double>(t);
                            const MeijerGSpec spec{1, 3, {1.0 - a, 1.0, 1.0}, {1.0, 0.0}};
                            part += blk.weights[t] * meijer_g_eval(spec, lb).value / std::tgamma(a);
                        }
                        acc.add(blk.coef * part);
                    }
                    if (acc.value() > 0.0) worst_cancel = std::max(worst_cancel, acc.abs_sum() / acc.value());
                    return acc.value();
                };
                const double v = no_z ? given_z(0.0) : z_expectation(given_z);
                if (std::isfinite(v) && v >= 0.0 && worst_cancel <= 1e6) return {v, Tag::Analytic};
            } catch (const NumericError&) {
                // fall through to the survival integral
            }
        }
    }
    // E[log(1 + X)] = int S(x) / (1 + x) dx.
    const double mean = moment(1.0).value;
    auto f = [&](double x) { return (1.0 - cdf_eval(x, 1e-13).value) / (1.0 + x); };
    const double v =
        integrate_pieces(f, {0.0, 0.1 * mean, 0.5 * mean, mean, 2.0 * mean, 8.0 * mean, kInf}, 1e-9, 14).value;
    return {v, Tag::NumericFallback};
}

double EffSinrStats::diversity_order() const { return rho_ >= 1.0 ? sel_.k * nm_ : nm_; }

double EffSinrStats::cdf_leading(double x) const {
    if (!(x > 0.0)) return 0.0;
    const int M = sel_.M, k = sel_.k;
    const double theta = gamma_bar_ / nm_;
    const double d = diversity_order();
    double log_c;
    if (rho_ >= 1.0) {
        log_c = lchoose(M, k) - k * (std::lgamma(nm_ + 1.0) + nm_ * std::log(theta));
    } else {
        // Near zero, Y | X has density y^{Nm-1} exp(-rho X / c1) / (Gamma(Nm) c1^Nm).
        const double c1 = (1.0 - rho_) * theta;
        const double lap = order_stat_integral(k, M, nm_, theta, [&](double xo) { return std::exp(-rho_ * xo / c1); });
        log_c = std::log(lap) - std::lgamma(nm_ + 1.0) - nm_ * std::log(c1);
    }
    // E[(1 + Z)^d], in logs because d can be several hundred.
    const double s = icfg_.scale();
    double log_ez = -kInf;
    for (const auto& [n, prob] : count_law(icfg_)) {
        double term;
        if (n == 0) {
            term = 0.0;
        } else {
            auto expo = [&](double z) { return d * std::log1p(z) + (n - 1.0) * std::log(z) - z / s; };
            // The exponent peaks where d/(1+z) + (n-1)/z = 1/s.
            const double bq = 1.0 - s * (d + n - 1.0);
            const double zpk = 0.5 * (-bq + std::sqrt(bq * bq + 4.0 * s * (n - 1.0)));
            const double shift = expo(std::max(zpk, 1e-300));
            auto f = [&](double z) { return z <= 0.0 ? 0.0 : std::exp(expo(z) - shift); };
            const double width = std::max(s * std::sqrt(d + n) + s, 1e-3);
            const double zc = std::max(zpk, 0.0);
            const double integral =
                integrate_pieces(f, {0.0, std::max(zc - 4 * width, 0.5 * zc), zc + 1e-12, zc + 4 * width, kInf}, 1e-10).value;
            term = std::log(integral) + shift - std::lgamma(static_cast<double>(n)) - n * std::log(s);
        }
        const double lt = std::log(prob) + term;
        log_ez = std::max(log_ez, lt) + std::log1p(std::exp(-std::abs(log_ez - lt)));
    }
    return std::exp(log_c + d * std::log(x) + log_ez);
}

double EffSinrStats::sample(Rng& rng, PairSampler mode) const {
    thread_local std::vector<SnrPair> pairs;
    pairs.resize(static_cast<std::size_t>(sel_.M));
    for (auto& pr : pairs) pr = sample_correlated_snr_pair(rho_, nm_, gamma_bar_, rng, mode);
    const SnrPair chosen = prs_select(sel_.M, sel_.k, pairs);
    return effective_sinr(chosen.updated, sample_interference(icfg_, rng));
}

double blockage_mixed_cdf(double p, double f_los, double f_nlos) { return p * f_los + (1.0 - p) * f_nlos; }

namespace {

double resolve_p_los(const CellularConfig& cfg) {
    cfg.validate();
    return cfg.p_los ? *cfg.p_los : p_los(cfg.l1_m, cfg.mu_block_m);
}

}  // namespace

CellularLink::CellularLink(const CellularConfig& cfg, const PrsSelection& sel, const InterferenceConfig& icfg)
    : cfg_(cfg),
      p_los_(resolve_p_los(cfg)),
      los_(average_snrs(cfg).first, cfg.nm(), sel, icfg),
      nlos_(average_snrs(cfg).second, cfg.nm(), sel, icfg) {}

Evaluated CellularLink::cdf_eval(double x, double abs_tol) const {
    if (p_los_ >= 1.0) return los_.cdf_eval(x, abs_tol);
    if (p_los_ <= 0.0) return nlos_.cdf_eval(x, abs_tol);
    const auto a = los_.cdf_eval(x, abs_tol);
    const auto b = nlos_.cdf_eval(x, abs_tol);
    return {blockage_mixed_cdf(p_los_, a.value, b.value), worst(a.tag, b.tag)};
}

double CellularLink::cdf_leading(double x) const {
    if (p_los_ >= 1.0) return los_.cdf_leading(x);
    if (p_los_ <= 0.0) return nlos_.cdf_leading(x);
    return blockage_mixed_cdf(p_los_, los_.cdf_leading(x), nlos_.cdf_leading(x));
}

Evaluated CellularLink::rate_c1() const {
    if (p_los_ >= 1.0) return los_.rate_c1();
    if (p_los_ <= 0.0) return nlos_.rate_c1();
    const auto a = los_.rate_c1();
    const auto b = nlos_.rate_c1();
    return {p_los_ * a.value + (1.0 - p_los_) * b.value, worst(a.tag, b.tag)};
}

double CellularLink::sample(Rng& rng, PairSampler mode) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng) < p_los_ ? los_.sample(rng, mode) : nlos_.sample(rng, mode);
}

}  // namespace mmfso
