#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mmfso/mc.hpp"
#include "mmfso/tag.hpp"

namespace mmfso {

// How the alpha term of the path gain is applied: as printed (alpha * L1 dB)
// or as a distance exponent (10 alpha log10 L1 dB).
enum class PathlossTerm { Literal, Exponent };

struct CellularConfig {
    double fc_hz = 30e9;
    double gt_db = 4.0;
    double gr_db = 4.0;
    int n_antennas = 64;
    double m = 1.0;  // Nakagami shape of each antenna branch
    double n0_dbm_hz = -142.0;
    double nf_db = 0.0;
    double b_hz = 700e6;
    double l1_m = 50.0;
    double alpha_los = 2.0;
    double alpha_nlos = 4.0;
    double mu_block_m = 63.0;
    std::optional<double> p_los;         // overrides exp(-L1 / mu_block)
    std::optional<double> gamma_bar;     // LOS average SNR (linear); else from the link budget
    double tx_power_dbm = 30.0;          // used only when gamma_bar is absent
    PathlossTerm pathloss_term = PathlossTerm::Literal;

    double nm() const { return n_antennas * m; }
    void validate() const;  // hard errors; alpha ordering only warns
};

struct PrsSelection {
    int M = 10;
    int k = 10;
    double rho = 0.9;
    // When both are set, rho = J0(2 pi fd Td) replaces the value above.
    std::optional<double> fd_hz;
    std::optional<double> td_s;

    double resolved_rho() const;
    void validate() const;
};

enum class InterferenceMean { PerInterferer, Aggregate };

struct InterferenceConfig {
    int mz = 3;
    double gamma_z_bar = 1.5848931924611136;  // 2 dB
    // PerInterferer: Z ~ Gamma(Mz, gamma_z_bar); Aggregate: Gamma(Mz, gamma_z_bar / Mz).
    InterferenceMean mean_mode = InterferenceMean::PerInterferer;
    // Draw the interferer count per realization from Poisson(Mz).
    bool poisson_count = false;

    double scale() const;
    void validate() const;
};

enum class PairSampler { Auto, Branch, Mixture };

double path_gain_db(const CellularConfig& cfg, double alpha, double l1_m);
double noise_power_dbm(const CellularConfig& cfg);
double jakes_rho(double fd_hz, double td_s);
double p_los(double d_m, double mu_m);
// Average LOS and NLOS SNRs (linear).
std::pair<double, double> average_snrs(const CellularConfig& cfg);

// Outdated/updated SNR pair with Gamma(Nm, gamma_bar/Nm) marginals and power
// correlation rho, built from correlated complex branch gains.
struct SnrPair {
    double outdated;
    double updated;
};
SnrPair sample_correlated_snr_pair(double rho, double nm, double gamma_bar, Rng& rng,
                                   PairSampler mode = PairSampler::Auto);
// Rank k (1-based, ascending by the outdated SNR); ties go to the lower index.
SnrPair prs_select(int M, int k, const std::vector<SnrPair>& pairs);
double sample_interference(const InterferenceConfig& icfg, Rng& rng);
double effective_sinr(double updated, double interference);

// Law of the effective SINR of one LOS state: the updated SNR of the PRS
// selected base station divided by one plus the aggregate interference.
class EffSinrStats {
public:
    EffSinrStats(double gamma_bar, double nm, const PrsSelection& sel, const InterferenceConfig& icfg);

    double gamma_bar() const { return gamma_bar_; }
    double nm() const { return nm_; }
    const PrsSelection& selection() const { return sel_; }
    const InterferenceConfig& interference() const { return icfg_; }
    bool has_closed_form() const { return closed_; }

    // The closed form is kept when its rounding error is small relative to
    // the cdf value. A positive abs_tol also keeps it when the absolute
    // rounding error is below abs_tol, which is all an integrand needs.
    Evaluated cdf_eval(double x, double abs_tol = 0.0) const;
    double cdf(double x) const { return cdf_eval(x).value; }
    Evaluated pdf_eval(double x) const;
    double pdf(double x) const { return pdf_eval(x).value; }
    // E[gamma_eff^p]; p > -Nm.
    Evaluated moment(double p) const;

    // Ergodic rate E[log(1 + gamma_eff)] in nats/s/Hz.
    Evaluated rate_c1() const;
    double rate_c1_low_snr() const;  // E[gamma_eff]
    double rate_c1_jensen() const;   // log(1 + E[gamma_eff])

    // Leading small-x term c x^d of the cdf and its exponent d.
    double cdf_leading(double x) const;
    double diversity_order() const;

    double sample(Rng& rng, PairSampler mode = PairSampler::Auto) const;

    // Mixture view used by the closed forms, exposed for tests: for each
    // j-block a signed coefficient, a Gamma scale, and non-negative weights
    // over shapes Nm + t.
    struct Block {
        double coef;
        double scale;
        std::vector<double> weights;
    };
    const std::vector<Block>& blocks() const { return blocks_; }

private:
    struct Sums {
        double value;
        double abs_sum;
    };
    struct TailSums {
        Sums lower;  // P(gamma_eff <= x)
        Sums upper;  // P(gamma_eff > x)
    };
    TailSums tail_sums(double x) const;
    Sums density_sum(double x) const;
    double cdf_numeric(double x) const;
    double z_expectation(const std::function<double(double)>& g) const;

    double gamma_bar_;
    double nm_;
    PrsSelection sel_;
    double rho_;
    InterferenceConfig icfg_;
    bool closed_ = false;
    std::vector<Block> blocks_;
};

// Cellular hop with the LOS/NLOS mixture.
class CellularLink {
public:
    CellularLink(const CellularConfig& cfg, const PrsSelection& sel, const InterferenceConfig& icfg);

    const CellularConfig& config() const { return cfg_; }
    double p_los() const { return p_los_; }
    const EffSinrStats& los() const { return los_; }
    const EffSinrStats& nlos() const { return nlos_; }

    Evaluated cdf_eval(double x, double abs_tol = 0.0) const;
    double cdf(double x) const { return cdf_eval(x).value; }
    double cdf_leading(double x) const;
    Evaluated rate_c1() const;
    double sample(Rng& rng, PairSampler mode = PairSampler::Auto) const;

private:
    CellularConfig cfg_;
    double p_los_;
    EffSinrStats los_;
    EffSinrStats nlos_;
};

// p F_los + (1 - p) F_nlos.
double blockage_mixed_cdf(double p_los, double f_los, double f_nlos);

}  // namespace mmfso
