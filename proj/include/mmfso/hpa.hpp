#pragma once

#include <optional>
#include <string>

#include "mmfso/fso.hpp"
#include "mmfso/mc.hpp"
#include "mmfso/tag.hpp"

namespace mmfso {

enum class HpaModel { Ideal, SEL, TWTA, SSPA };

HpaModel parse_hpa_model(const std::string& name);  // case-insensitive; ConfigError otherwise
std::string to_string(HpaModel model);

// sigma_r is the RMS input amplitude, so ibo() = A_sat / sigma_r is the
// amplitude back-off and A_sat^2 / sigma_r^2 the power back-off.
struct HpaConfig {
    HpaModel model = HpaModel::Ideal;
    double a_sat = 1.0;
    double sigma_r = 1.0;
    // kappa = 1 + sigma_varsigma^2 / (zeta^2 G^2 sigma1^2); when gain or
    // sigma1_sq is absent, G^2 sigma1^2 = sigma_r^2 is assumed.
    std::optional<double> gain;
    std::optional<double> sigma1_sq;
    std::optional<double> kappa;  // pins kappa directly, bypassing the model

    double ibo() const { return a_sat / sigma_r; }
    void validate() const;
    static HpaConfig with_ibo(HpaModel model, double ibo);
};

struct BussgangParams {
    double zeta = 1.0;
    double sigma_varsigma_sq = 0.0;
    double kappa = 1.0;
    double gain_power = 1.0;  // G^2 sigma1^2 used for kappa
};

BussgangParams sel_params(const HpaConfig& cfg);
BussgangParams twta_params(const HpaConfig& cfg);
BussgangParams sspa_params(const HpaConfig& cfg);
// Dispatches on the model and honours a pinned kappa.
BussgangParams bussgang(const HpaConfig& cfg);

double kappa(const BussgangParams& bp, double gain, double sigma1_sq);

// gamma / ((kappa - 1) gamma + 1)
double sndr_map(double gamma_r, double kappa);
// Per-sample Bussgang model: signal scaled by zeta^2, distortion power added
// to the noise. Agrees in law with sndr_map.
double distort_sample(double signal_snr, const BussgangParams& bp);

Evaluated sndr_cdf(double x, double kappa, const FsoHop& hop);

// Backhaul rates in nats. varpi is 1 (heterodyne) or e/(2 pi) (IM/DD).
double c2_rate(double kappa, double varpi, const FsoHop& hop);
Estimate c2_rate_mc(double kappa, double varpi, const FsoHop& hop, std::uint64_t samples,
                    const RngSpec& rng, const McOptions& opts = {});
double c2_approx(double kappa, double varpi, const FsoHop& hop);
double c2_jensen(double kappa, double varpi, const FsoHop& hop);
double mean_sndr(double kappa, const FsoHop& hop);  // E[gamma_ni]
// log(1 + varpi / (kappa - 1)); +inf when kappa = 1.
double c2_ceiling(double kappa, double varpi);

}  // namespace mmfso
