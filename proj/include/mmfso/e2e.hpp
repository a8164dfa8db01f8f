#pragma once

#include <string>
#include <vector>

#include "mmfso/cellular.hpp"
#include "mmfso/fso.hpp"
#include "mmfso/hpa.hpp"
#include "mmfso/mc.hpp"
#include "mmfso/tag.hpp"

namespace mmfso {

enum class Detection { Heterodyne, IMDD };

// Conditional error probability delta / (2 Gamma(tau)) sum_k Gamma(tau, q_k gamma).
struct ModulationScheme {
    std::string name;
    double delta = 1.0;
    double tau = 0.5;
    std::vector<double> q{1.0};
    Detection detection = Detection::Heterodyne;

    int v() const { return static_cast<int>(q.size()); }
    double conditional(double gamma) const;

    static ModulationScheme ook();
    static ModulationScheme bpsk();
    static ModulationScheme mpsk(int order);
    static ModulationScheme mqam(int order);
    // "ook", "bpsk", "8psk", "16qam", ...
    static ModulationScheme parse(const std::string& name);
};

struct E2eConfig {
    CellularConfig cellular;
    PrsSelection prs;
    InterferenceConfig interference;
    FsoConfig fso;
    HpaConfig hpa;
};

double e2e_sindr(double gamma_eff, double gamma_ni);
// F1 + F2 - F1 F2.
double combine_outage(double f1, double f2);

struct RateBreakdown {
    double c1 = 0.0;
    double c2 = 0.0;
    double c = 0.0;  // min(c1, c2)
    Tag tag = Tag::Analytic;
};

// The DF-relayed hybrid: cellular access hop followed by the FSO backhaul
// with a Bussgang-linearized amplifier.
class E2eSystem {
public:
    explicit E2eSystem(const E2eConfig& cfg);

    const E2eConfig& config() const { return cfg_; }
    const CellularLink& cellular() const { return cell_; }
    const FsoHop& fso() const { return hop_; }
    const BussgangParams& hpa() const { return bp_; }
    double kappa() const { return bp_.kappa; }
    double varpi() const { return varpi_for(cfg_.fso.r); }

    Evaluated cellular_cdf(double beta, double abs_tol = 0.0) const { return cell_.cdf_eval(beta, abs_tol); }
    Evaluated sndr_cdf(double beta) const;
    // abs_tol as in EffSinrStats::cdf_eval.
    Evaluated outage(double beta, double abs_tol = 0.0) const;
    // Sum of the leading small-argument terms of both hops; warns below
    // mu_r = 30 dB where the expansion is not meant to hold.
    double outage_asymptote(double beta) const;
    // min(G, min(xi^2, m1 alpha1, m2 alpha2) / r) with G = Nm for rho = 1 and 1 otherwise.
    double diversity_gain() const;

    // Average error probability. The default is a Monte-Carlo expectation;
    // error_prob_quadrature integrates the conditional error probability
    // against the closed-form outage instead.
    Estimate error_prob(const ModulationScheme& mod, std::uint64_t samples, const RngSpec& rng,
                        const McOptions& opts = {}) const;
    Evaluated error_prob_quadrature(const ModulationScheme& mod) const;

    // Ergodic rates of both hops (nats/s/Hz) and their minimum.
    RateBreakdown rate() const;
    // E[min(log(1 + gamma_eff), log(1 + varpi gamma_ni))] per realization.
    Estimate rate_per_realization_mc(std::uint64_t samples, const RngSpec& rng, const McOptions& opts = {}) const;

    // P[gamma_e2e >= e^{r/B} - 1] for a target rate r in nats/s and bandwidth B in Hz.
    Evaluated rate_coverage(double target_rate, double bandwidth_hz) const;
    static double rate_threshold(double target_rate, double bandwidth_hz);

    // One draw of (gamma_eff, gamma_ni).
    std::pair<double, double> sample(Rng& rng) const;
    // P[min(gamma_eff, gamma_ni) <= beta] for each beta, from one set of draws.
    std::vector<Estimate> outage_mc(const std::vector<double>& betas, std::uint64_t samples, const RngSpec& rng,
                                    const McOptions& opts = {}) const;

private:
    E2eConfig cfg_;
    CellularLink cell_;
    FsoHop hop_;
    BussgangParams bp_;
};

}  // namespace mmfso
