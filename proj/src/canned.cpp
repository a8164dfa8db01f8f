#include "mmfso/canned.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mmfso/errors.hpp"

namespace mmfso {

namespace {

std::vector<CannedScenario> make_canned() {
    std::vector<CannedScenario> list;

    list.push_back({"default", "tabulated parameters, outage against the SINDR threshold", R"(
name = "default"

[sweep]
var = "beta_db"
values = [-10.0, -5.0, 0.0, 5.0, 10.0]
metrics = ["outage", "outage_mc"]
)", {}});

    list.push_back({"reduction", "single candidate, full correlation, no interference: Gamma cdf", R"(
name = "reduction"

[cellular]
p_los = 1.0
gamma_bar_db = 10.0

[prs]
M = 1
k = 1
rho = 1.0

[interference]
mz = 0

[sweep]
var = "beta_db"
start = -10.0
stop = 15.0
points = 6
metrics = ["cellular_cdf"]
)", {}});

    list.push_back({"fig5a", "outage against beta for rho in {0.1, 0.9} and k in {1, M}, SEL with IM/DD", R"(
name = "fig5a"

[cellular]
p_los = 1.0
gamma_bar_db = 10.0

[fso]
detection = "imdd"
mu_r_db = 30.0

[hpa]
model = "sel"
ibo = 2.0

[sweep]
var = "beta_db"
start = -20.0
stop = 10.0
points = 16
metrics = ["outage", "outage_mc"]

[[series]]
label = "rho=0.1;k=1"
prs = { rho = 0.1, k = 1 }

[[series]]
label = "rho=0.1;k=10"
prs = { rho = 0.1, k = 10 }

[[series]]
label = "rho=0.9;k=1"
prs = { rho = 0.9, k = 1 }

[[series]]
label = "rho=0.9;k=10"
prs = { rho = 0.9, k = 10 }
)", {"cellular.p_los", "cellular.gamma_bar_db", "fso.mu_r_db", "hpa.ibo"}});

    list.push_back({"fig5b", "error probability against the average SNR per modulation, ideal hardware", R"(
name = "fig5b"

[cellular]
p_los = 1.0

[fso]
detection = "heterodyne"

[hpa]
model = "ideal"

[sweep]
var = "gamma_bar_db"
couple = ["mu_r_db"]
start = -10.0
stop = 30.0
points = 9
metrics = ["error_prob"]

[[series]]
label = "bpsk"
e2e = { modulation = "bpsk" }

[[series]]
label = "qpsk"
e2e = { modulation = "qpsk" }

[[series]]
label = "16qam"
e2e = { modulation = "16qam" }

[[series]]
label = "64qam"
e2e = { modulation = "64qam" }
)", {"cellular.p_los", "sweep.couple"}});

    list.push_back({"fig6a", "outage against mu_r for weather attenuation and pointing jitter, SSPA with heterodyne", R"(
name = "fig6a"

[cellular]
p_los = 1.0
gamma_bar_db = 40.0

[fso]
detection = "heterodyne"
apply_path_loss = true

[hpa]
model = "sspa"
ibo = 6.0

[e2e]
beta_db = 0.0

[sweep]
var = "mu_r_db"
start = 20.0
stop = 80.0
points = 13
metrics = ["outage"]

[[series]]
label = "clear;sigma_s=0.05"
fso = { atten_db_km = 0.43, sigma_s_m = 0.05 }

[[series]]
label = "haze;sigma_s=0.05"
fso = { atten_db_km = 4.2, sigma_s_m = 0.05 }

[[series]]
label = "clear;sigma_s=0.1"
fso = { atten_db_km = 0.43, sigma_s_m = 0.1 }

[[series]]
label = "clear;sigma_s=0.2"
fso = { atten_db_km = 0.43, sigma_s_m = 0.2 }
)", {"cellular.p_los", "cellular.gamma_bar_db", "hpa.ibo", "e2e.beta_db", "fso.apply_path_loss"}});

    list.push_back({"fig6b", "outage against beta per amplifier model at IBO = 2", R"(
name = "fig6b"

[cellular]
p_los = 1.0
gamma_bar_db = 30.0

[fso]
mu_r_db = 30.0

[hpa]
ibo = 2.0

[sweep]
var = "beta_db"
start = -10.0
stop = 35.0
points = 10
metrics = ["outage"]

[[series]]
label = "ideal"
hpa = { model = "ideal" }

[[series]]
label = "sel"
hpa = { model = "sel" }

[[series]]
label = "twta"
hpa = { model = "twta" }

[[series]]
label = "sspa"
hpa = { model = "sspa" }
)", {"cellular.p_los", "cellular.gamma_bar_db", "fso.mu_r_db"}});

    list.push_back({"fig7a", "outage against the cellular average SNR per amplifier model at IBO = 2", R"(
name = "fig7a"

[cellular]
p_los = 1.0

[fso]
mu_r_db = 30.0

[hpa]
ibo = 2.0

[e2e]
beta_db = 10.0

[sweep]
var = "gamma_bar_db"
start = 0.0
stop = 60.0
points = 13
metrics = ["outage", "outage_mc"]

[[series]]
label = "ideal"
hpa = { model = "ideal" }

[[series]]
label = "sel"
hpa = { model = "sel" }

[[series]]
label = "twta"
hpa = { model = "twta" }

[[series]]
label = "sspa"
hpa = { model = "sspa" }
)", {"cellular.p_los", "fso.mu_r_db", "e2e.beta_db"}});

    list.push_back({"fig7b", "cellular rate against distance, mmWave against sub-6 GHz (N = 4, B = 10 MHz)", R"(
name = "fig7b"

[cellular]
snr_mode = "link_budget"
pathloss_term = "exponent"
tx_power_dbm = 30.0

[e2e]
rate_units = "nats_per_s"

[sweep]
var = "l1_m"
start = 50.0
stop = 1000.0
points = 20
metrics = ["rate_c1"]

[[series]]
label = "mmwave"
cellular = { fc_ghz = 30.0, n_antennas = 64, b_mhz = 700.0 }

[[series]]
label = "sub6"
cellular = { fc_ghz = 3.5, n_antennas = 4, b_mhz = 10.0 }
)", {"cellular.pathloss_term", "cellular.tx_power_dbm"}});

    list.push_back({"fig8a", "backhaul rate against mu_r over an IBO grid with approximation, Jensen bound and ceiling", R"(
name = "fig8a"

[fso]
detection = "imdd"

[hpa]
model = "twta"

[sweep]
var = "mu_r_db"
start = 0.0
stop = 60.0
points = 13
metrics = ["rate_c2", "rate_c2_approx", "rate_c2_jensen", "rate_c2_ceiling"]

[[series]]
label = "ideal"
hpa = { model = "ideal" }

[[series]]
label = "ibo=1"
hpa = { ibo = 1.0 }

[[series]]
label = "ibo=2"
hpa = { ibo = 2.0 }

[[series]]
label = "ibo=4"
hpa = { ibo = 4.0 }
)", {"hpa.model"}});

    list.push_back({"fig8b", "cellular coverage against the SINR threshold for blockage parameters 5, 63 and 200 m", R"(
name = "fig8b"

[sweep]
var = "beta_db"
start = -25.0
stop = 5.0
points = 7
metrics = ["cellular_coverage", "cellular_coverage_mc"]

[[series]]
label = "mu=5"
cellular = { mu_block_m = 5.0 }

[[series]]
label = "mu=63"
cellular = { mu_block_m = 63.0 }

[[series]]
label = "mu=200"
cellular = { mu_block_m = 200.0 }
)", {}});

    list.push_back({"fig9a", "rate coverage against the target rate for Mz in {1, 3, 6}", R"(
name = "fig9a"

[cellular]
p_los = 0.1
pathloss_term = "exponent"
gamma_bar_db = 30.0
alpha_nlos = 3.0

[sweep]
var = "target_rate"
start = 0.25e9
stop = 3.0e9
points = 12
metrics = ["rate_coverage"]

[[series]]
label = "mz=1"
interference = { mz = 1 }

[[series]]
label = "mz=3"
interference = { mz = 3 }

[[series]]
label = "mz=6"
interference = { mz = 6 }
)", {"cellular.p_los", "cellular.pathloss_term", "cellular.gamma_bar_db", "cellular.alpha_nlos"}});

    list.push_back({"fig9b", "rate coverage against the target rate for NLOS exponents 2.5 and 3.5 at p_los = 0.1", R"(
name = "fig9b"

[cellular]
p_los = 0.1
pathloss_term = "exponent"
gamma_bar_db = 35.0

[sweep]
var = "target_rate"
start = 0.25e9
stop = 3.0e9
points = 12
metrics = ["rate_coverage"]

[[series]]
label = "alpha_nlos=2.5"
cellular = { alpha_nlos = 2.5 }

[[series]]
label = "alpha_nlos=3.5"
cellular = { alpha_nlos = 3.5 }
)", {"cellular.pathloss_term", "cellular.gamma_bar_db"}});

    return list;
}

std::string num(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

std::string default_text(const std::string& path) {
    const SchemaKey* k = find_schema_key(path);
    return num(k->fallback.get<double>());
}

struct TableRow {
    std::string text;  // "fc = 30 GHz"
    std::string what;
    std::string source;
};

void print_rows(std::ostream& out, const std::string& title, const std::vector<TableRow>& rows) {
    out << title << '\n';
    for (const auto& r : rows)
        out << "  " << std::left << std::setw(24) << r.text << std::setw(34) << r.what << '[' << r.source << "]\n";
    out << '\n';
}

TableRow keyed(const std::string& symbol, const std::string& path, const std::string& unit, const std::string& what) {
    const SchemaKey* k = find_schema_key(path);
    std::string value = k->fallback.is_number_integer() ? std::to_string(k->fallback.get<long long>()) : default_text(path);
    return {symbol + " = " + value + (unit.empty() ? "" : " " + unit), what, path + "; " + k->origin};
}

}  // namespace

const std::vector<CannedScenario>& canned_scenarios() {
    static const std::vector<CannedScenario> list = make_canned();
    return list;
}

const CannedScenario* find_canned(const std::string& name) {
    for (const auto& c : canned_scenarios())
        if (c.name == name) return &c;
    return nullptr;
}

Scenario load_canned(const std::string& name) {
    const CannedScenario* c = find_canned(name);
    if (!c) throw ConfigError("unknown canned scenario '" + name + "'");
    return Scenario::from_toml(c->toml, "canned:" + name, "canned " + name, c->unverified);
}

void print_tables(std::ostream& out) {
    print_rows(out, "Cellular system parameters",
               {keyed("fc", "cellular.fc_ghz", "GHz", "carrier frequency"),
                keyed("Gt", "cellular.gt_db", "dB", "transmit antenna element gain"),
                keyed("Gr", "cellular.gr_db", "dB", "receive antenna element gain"),
                keyed("N", "cellular.n_antennas", "", "number of BS antennas"),
                keyed("N0", "cellular.n0_dbm_hz", "dBm/Hz", "noise spectral density"),
                keyed("Nf", "cellular.nf_db", "dB", "noise figure"),
                keyed("B", "cellular.b_mhz", "MHz", "bandwidth"),
                {"c = 3e8 m/s", "speed of light", "constant; default: cellular table"},
                keyed("L1", "cellular.l1_m", "m", "link distance")});

    out << "Modulation parameters\n";
    auto scheme_row = [&](const std::string& name, const std::string& delta, const std::string& tau,
                          const std::string& q, const std::string& v, const std::string& det) {
        out << "  " << std::left << std::setw(7) << name << std::setw(30) << "delta=" + delta << std::setw(10)
            << "tau=" + tau << std::setw(28) << "q=" + q << std::setw(16) << "v=" + v << std::setw(12) << det
            << "[default: modulation table]\n";
    };
    const auto ook = ModulationScheme::ook();
    const auto bpsk = ModulationScheme::bpsk();
    scheme_row("OOK", num(ook.delta), num(ook.tau), num(ook.q.front()), std::to_string(ook.v()), "IM/DD");
    scheme_row("BPSK", num(bpsk.delta), num(bpsk.tau), num(bpsk.q.front()), std::to_string(bpsk.v()), "heterodyne");
    scheme_row("M-PSK", "2/max(log2 M, 2)", "0.5", "sin^2((2k-1) pi/M)", "max(M/4, 1)", "heterodyne");
    scheme_row("M-QAM", "4/log2 M (1 - 1/sqrt M)", "0.5", "3(2k-1)^2/(2(M-1))", "sqrt(M)/2", "heterodyne");
    out << '\n';

    print_rows(out, "FSO sub-system parameters",
               {keyed("lambda2", "fso.lambda_nm", "nm", "wavelength"),
                keyed("a", "fso.aperture_cm", "cm", "receiver aperture radius"),
                keyed("theta", "fso.theta_mrad", "mrad", "divergence angle"),
                keyed("sigma2^2", "fso.sigma2_sq", "A/Hz", "noise variance"),
                keyed("sigma", "fso.atten_db_km", "dB/km", "weather attenuation"),
                keyed("Cn2", "fso.cn2", "m^-2/3", "refractive index structure"),
                keyed("L2", "fso.l2_m", "m", "link length")});

    out << "Other defaults\n";
    for (const auto& k : scenario_schema()) {
        if (k.origin == "default: cellular table" || k.origin == "default: FSO table") continue;
        const std::string value = k.fallback.is_null() ? "(unset)" : k.fallback.is_number_float() ? num(k.fallback.get<double>()) : k.fallback.dump();
        const std::string left = k.path + " = " + value;
        out << "  " << std::left << std::setw(std::max<int>(34, static_cast<int>(left.size()) + 2)) << left
            << std::setw(std::max<int>(70, static_cast<int>(k.note.size()) + 2)) << k.note << '[' << k.origin << "]\n";
    }
    out << "\nCanned scenarios\n";
    for (const auto& c : canned_scenarios()) out << "  " << std::left << std::setw(10) << c.name << c.summary << '\n';
}

}  // namespace mmfso
