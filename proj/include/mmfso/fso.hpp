#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "mmfso/mc.hpp"
#include "mmfso/meijer_g.hpp"
#include "mmfso/tag.hpp"

namespace mmfso {

// Double generalized Gamma turbulence: I_a = I_x I_y with
// I_x^alpha1 ~ Gamma(m1, Omega1/m1) and I_y^alpha2 ~ Gamma(m2, Omega2/m2).
struct DggParams {
    double alpha1 = 2.169;
    double alpha2 = 1.0;
    double m1 = 0.55;
    double m2 = 2.35;
    double omega1 = 1.5793;
    double omega2 = 0.9671;
};

struct FsoConfig {
    double lambda_m = 1550e-9;
    double aperture_m = 0.05;    // receiver aperture radius a
    double theta_rad = 10e-3;    // divergence angle
    double atten_db_km = 0.43;
    double cn2 = 5e-14;
    double l2_m = 500.0;
    double sigma_s_m = 0.05;     // jitter standard deviation
    double omega0_m = 0.025;     // transmit beam waist
    double f0_m = std::numeric_limits<double>::infinity();  // curvature radius; inf = collimated
    int r = 2;                   // 1 heterodyne, 2 IM/DD
    double eta = 1.0;
    double sigma2_sq = 1e-7;
    std::optional<double> mu_r;  // average electrical SNR (linear); absent = absolute mode
    // With mu_r given, scale it by I_l^r so that attenuation and beam spread
    // lower the average SNR instead of being absorbed into mu_r.
    bool apply_path_loss = false;
    std::optional<double> xi;    // pointing coefficient override
    DggParams dgg;
    bool normalize_turbulence = false;

    void validate() const;
};

struct PointingGeometry {
    double sigma_rytov_sq = 0.0;
    double theta0 = 1.0;
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double omega_z = 0.0;
    double v = 0.0;
    double a0 = 1.0;
    double omega_zeq = 0.0;
    double xi = 1.0;
};

// alpha1 = n/q and alpha2 = n/p with integers, as used by the Meijer-G forms.
struct RationalShape {
    int p = 1;
    int q = 1;
    int n = 1;
    double alpha1 = 1.0;
    double alpha2 = 1.0;
};

// Best rational approximation with denominator <= max_den.
std::pair<int, int> rationalize(double x, int max_den = 20);
RationalShape rationalize_shape(const DggParams& dgg, int max_den = 20);

// Deterministic Beer-Lambert loss times the geometric spread factor.
double path_loss(const FsoConfig& cfg);
PointingGeometry beam_geometry(const FsoConfig& cfg);

// A0 exp(-2 R^2 / omega_zeq^2) with R ~ Rayleigh(sigma_s).
double sample_pointing(const PointingGeometry& geom, double sigma_s, Rng& rng);
double sample_turbulence(const DggParams& dgg, Rng& rng);
double unified_snr(double iz, const FsoConfig& cfg);

// Rate constant of the backhaul: 1 for heterodyne, e/(2 pi) for IM/DD.
double varpi_for(int r);

// The optical hop with all derived quantities resolved. gamma_r is
// mu_r (I_z / E[I_z])^r.
class FsoHop {
public:
    explicit FsoHop(const FsoConfig& cfg);

    const FsoConfig& config() const { return cfg_; }
    const PointingGeometry& geometry() const { return geom_; }
    const RationalShape& shape() const { return shape_; }
    const DggParams& dgg() const { return dgg_; }
    int r() const { return cfg_.r; }
    double xi() const { return geom_.xi; }
    double mu_r() const { return mu_r_; }
    double path_gain() const { return il_; }
    double mean_iz() const { return mean_iz_; }
    double gamma_bar() const;           // E[gamma_r]
    double scintillation_index() const; // E[I_z^2]/E[I_z]^2 - 1

    double cdf(double x) const { return cdf_eval(x).value; }
    Evaluated cdf_eval(double x) const;
    double survival(double x) const;
    double pdf(double x) const { return pdf_eval(x).value; }
    Evaluated pdf_eval(double x) const;
    // E[gamma_r^t]; throws NumericError where the moment diverges.
    double moment(double t) const;
    // Leading-order small-x behaviour of the cdf (sum of the first residues).
    double cdf_leading(double x) const;
    // Exponent of the cdf near zero: min(xi^2, m1 alpha1, m2 alpha2) / r.
    double diversity_order() const;

    // Quadrature nodes for integrals of the form int_0^inf S(x) w(x) dx with
    // S the survival function: sum weight * w(x) over the nodes plus the
    // head int_0^{x_min} w(x) dx, on which S = 1 to double precision.
    // Built once per hop on first use (thread-safe) and shared by copies.
    struct SurvivalNode {
        double x;
        double weight;  // quadrature weight times x S(x)
    };
    struct SurvivalTable {
        double x_min = 0.0;
        std::vector<SurvivalNode> nodes;
    };
    const SurvivalTable& survival_table() const;

    double sample_iz(Rng& rng) const;
    double sample(Rng& rng) const;

    // Meijer-G pieces, exposed for tests.
    const MeijerGSpec& cdf_spec() const { return cdf_spec_; }
    double log_argument(double x) const;  // log z(x)
    double prefactor() const { return a_; }

private:
    double mellin_w(double s) const;  // E[W^s], W = I_x I_y (I_p / A0)
    double log_mellin_w(double s) const;
    // True when a moment bound puts P[gamma_r > x] below 1e-18.
    bool tail_negligible(double x) const;
    double cdf_numeric(double x) const;

    FsoConfig cfg_;
    PointingGeometry geom_;
    RationalShape shape_;
    DggParams dgg_;  // snapped shapes, optionally normalized scales
    double il_ = 1.0;
    double mean_w_ = 1.0;
    double mean_iz_ = 1.0;
    double mu_r_ = 1.0;
    double log_k_ = 0.0;       // gamma = K W^r
    double log_lambda_ = 0.0;
    double a_ = 1.0;
    MeijerGSpec pdf_spec_, cdf_spec_, surv_spec_;
    struct TableCache;
    std::shared_ptr<TableCache> table_;
};

}  // namespace mmfso
