#include "mmfso/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "toml.hpp"

#include "mmfso/errors.hpp"

namespace mmfso {

namespace {

constexpr const char* kCellTable = "default: cellular table";
constexpr const char* kFsoTable = "default: FSO table";
constexpr const char* kAssumed = "default: assumed";
constexpr const char* kGuess = "default: assumed (unverified)";
constexpr const char* kUnset = "unset";

const double kInf = std::numeric_limits<double>::infinity();

using K = ValueKind;

std::vector<SchemaKey> make_schema() {
    const Json none;
    return {
        {"cellular.fc_ghz", K::Real, 30.0, kCellTable, "carrier frequency fc, GHz"},
        {"cellular.gt_db", K::Real, 4.0, kCellTable, "transmit element gain Gt, dB"},
        {"cellular.gr_db", K::Real, 4.0, kCellTable, "receive element gain Gr, dB"},
        {"cellular.n_antennas", K::Integer, 64, kCellTable, "BS antennas N"},
        {"cellular.nakagami_m", K::Real, 1.0, kGuess, "Nakagami shape m per antenna"},
        {"cellular.n0_dbm_hz", K::Real, -142.0, kCellTable, "noise spectral density N0, dBm/Hz"},
        {"cellular.nf_db", K::Real, 0.0, kCellTable, "noise figure Nf, dB"},
        {"cellular.b_mhz", K::Real, 700.0, kCellTable, "bandwidth B, MHz"},
        {"cellular.l1_m", K::Real, 50.0, kCellTable, "link distance L1, m"},
        {"cellular.snr_mode", K::Text, "given", kAssumed,
         "average SNR source: gamma_bar_db, or the link budget from tx_power_dbm", {"given", "link_budget"}},
        {"cellular.gamma_bar_db", K::Real, 20.0, kGuess, "LOS average SNR, dB"},
        {"cellular.tx_power_dbm", K::Real, 30.0, kGuess, "UE transmit power, dBm (link_budget mode)"},
        {"cellular.pathloss_term", K::Text, "literal", kAssumed,
         "alpha term of the path gain: alpha*L1 dB or 10 alpha log10(L1) dB", {"literal", "exponent"}},
        {"cellular.alpha_los", K::Real, 2.0, kGuess, "LOS pathloss exponent"},
        {"cellular.alpha_nlos", K::Real, 4.0, kGuess, "NLOS pathloss exponent"},
        {"cellular.mu_block_m", K::Real, 63.0, kGuess, "blockage parameter mu, m"},
        {"cellular.p_los", K::Real, none, kUnset, "LOS probability; overrides exp(-L1/mu)"},
        {"prs.M", K::Integer, 10, kGuess, "candidate base stations M"},
        {"prs.k", K::Integer, 10, kGuess, "selected rank k (k = M is the best)"},
        {"prs.rho", K::Real, 0.9, kGuess, "outdated/updated CSI power correlation"},
        {"prs.fd_hz", K::Real, none, kUnset, "Doppler frequency, Hz (with td_s replaces rho)"},
        {"prs.td_s", K::Real, none, kUnset, "feedback delay, s"},
        {"interference.mz", K::Integer, 3, kGuess, "number of interferers Mz"},
        {"interference.gamma_z_bar_db", K::Real, 2.0, kGuess, "average SNR per interferer, dB"},
        {"interference.mean_mode", K::Text, "per_interferer", kAssumed,
         "gamma_z_bar is per interferer or the aggregate mean", {"per_interferer", "aggregate"}},
        {"interference.poisson_count", K::Boolean, false, kAssumed, "draw the interferer count from Poisson(Mz)"},
        {"fso.lambda_nm", K::Real, 1550.0, kFsoTable, "wavelength lambda2, nm"},
        {"fso.aperture_cm", K::Real, 5.0, kFsoTable, "receiver aperture radius a, cm"},
        {"fso.theta_mrad", K::Real, 10.0, kFsoTable, "divergence angle theta, mrad"},
        {"fso.sigma2_sq", K::Real, 1e-7, kFsoTable, "noise variance sigma2^2, A/Hz"},
        {"fso.atten_db_km", K::Real, 0.43, kFsoTable, "weather attenuation, dB/km"},
        {"fso.cn2", K::Real, 5e-14, kFsoTable, "refractive index structure constant Cn2, m^-2/3"},
        {"fso.l2_m", K::Real, 500.0, kFsoTable, "link length L2, m"},
        {"fso.sigma_s_m", K::Real, 0.05, kGuess, "pointing jitter standard deviation, m"},
        {"fso.omega0_m", K::Real, 0.025, kGuess, "transmit beam waist, m"},
        {"fso.f0_m", K::Real, kInf, kAssumed, "radius of curvature, m (inf: collimated)"},
        {"fso.eta", K::Real, 1.0, kAssumed, "electro-optical conversion coefficient"},
        {"fso.detection", K::Text, "imdd", kAssumed, "detection technique", {"imdd", "heterodyne"}},
        {"fso.snr_mode", K::Text, "given", kAssumed,
         "average SNR source: mu_r_db, or absolute powers (eta, sigma2_sq)", {"given", "absolute"}},
        {"fso.mu_r_db", K::Real, 30.0, kGuess, "average electrical SNR mu_r, dB"},
        {"fso.apply_path_loss", K::Boolean, false, kAssumed, "scale mu_r by the path loss"},
        {"fso.xi", K::Real, none, kUnset, "pointing coefficient override"},
        {"fso.normalize_turbulence", K::Boolean, false, kAssumed, "rescale the turbulence to unit mean"},
        {"fso.dgg.alpha1", K::Real, 2.169, kGuess, "large-scale shape alpha1"},
        {"fso.dgg.alpha2", K::Real, 1.0, kGuess, "small-scale shape alpha2"},
        {"fso.dgg.m1", K::Real, 0.55, kGuess, "large-scale shape m1"},
        {"fso.dgg.m2", K::Real, 2.35, kGuess, "small-scale shape m2"},
        {"fso.dgg.omega1", K::Real, 1.5793, kGuess, "large-scale scale Omega1"},
        {"fso.dgg.omega2", K::Real, 0.9671, kGuess, "small-scale scale Omega2"},
        {"hpa.model", K::Text, "ideal", kAssumed, "amplifier model", {"ideal", "sel", "twta", "sspa"}},
        {"hpa.ibo", K::Real, none, kUnset, "input back-off A_sat/sigma_r (sets a_sat)"},
        {"hpa.ibo_db", K::Real, none, kUnset, "input back-off, dB: 20 log10(A_sat/sigma_r)"},
        {"hpa.a_sat", K::Real, 1.0, kAssumed, "saturation amplitude A_sat"},
        {"hpa.sigma_r", K::Real, 1.0, kAssumed, "RMS input amplitude sigma_r"},
        {"hpa.gain", K::Real, none, kUnset, "relay gain G"},
        {"hpa.sigma1_sq", K::Real, none, kUnset, "gain block input power sigma1^2"},
        {"hpa.kappa", K::Real, none, kUnset, "distortion factor; pins kappa directly"},
        {"e2e.beta_db", K::Real, 0.0, kAssumed, "SINDR threshold beta, dB"},
        {"e2e.modulation", K::Text, "bpsk", kAssumed, "ook, bpsk, qpsk, <M>psk or <M>qam"},
        {"e2e.target_rate_nats_s", K::Real, 1e9, kGuess, "rate coverage target, nats/s"},
        {"e2e.error_prob_method", K::Text, "mc", kAssumed, "error probability evaluation",
         {"mc", "quadrature"}},
        {"e2e.rate_units", K::Text, "nats", kAssumed,
         "rate output units; *_per_s multiply by the cellular bandwidth",
         {"nats", "bits", "nats_per_s", "bits_per_s"}},
        {"sweep.var", K::Text, none, kUnset, "swept variable"},
        {"sweep.values", K::RealList, Json::array(), kAssumed, "grid (or start, stop, points)"},
        {"sweep.metrics", K::TextList, Json::array({"outage"}), kAssumed, "metrics per grid point"},
        {"sweep.couple", K::TextList, Json::array(), kAssumed, "variables set to the swept value as well"},
        {"mc.samples", K::Integer, 1000000, kAssumed, "Monte-Carlo samples per estimate"},
        {"mc.seed", K::Integer, 1, kAssumed, "base seed"},
        {"mc.chunk_size", K::Integer, 1 << 14, kAssumed, "samples per chunk"},
    };
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

bool is_section(const std::string& path) {
    const std::string prefix = path + ".";
    for (const auto& k : scenario_schema())
        if (k.path.compare(0, prefix.size(), prefix) == 0) return true;
    return false;
}

std::string suggestion(const std::string& path) {
    std::string best;
    std::size_t best_d = 3;
    for (const auto& k : scenario_schema()) {
        const std::size_t d = edit_distance(path, k.path);
        if (d < best_d) {
            best_d = d;
            best = k.path;
        }
    }
    return best.empty() ? "" : " (did you mean '" + best + "'?)";
}

bool safe_label(const std::string& s) {
    if (s.empty() || s.size() > 64) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || std::string("_.+-=/:;").find(c) != std::string::npos;
    });
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Scenario text as a JSON tree plus the source line of every node.
struct RawTree {
    Json root;
    std::map<std::string, int> lines;
};

std::string child_path(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

Json toml_node(const toml::node& n, const std::string& path, std::map<std::string, int>& lines,
               const std::string& source) {
    lines[path] = static_cast<int>(n.source().begin.line);
    if (const auto* t = n.as_table()) {
        Json o = Json::object();
        for (auto&& [k, v] : *t) {
            const std::string key(k.str());
            o[key] = toml_node(v, child_path(path, key), lines, source);
        }
        return o;
    }
    if (const auto* a = n.as_array()) {
        Json arr = Json::array();
        std::size_t i = 0;
        for (auto&& v : *a) arr.push_back(toml_node(v, path + "[" + std::to_string(i++) + "]", lines, source));
        return arr;
    }
    if (const auto* v = n.as_integer()) return v->get();
    if (const auto* v = n.as_floating_point()) return v->get();
    if (const auto* v = n.as_boolean()) return v->get();
    if (const auto* v = n.as_string()) return v->get();
    throw ConfigError(source + ":" + std::to_string(lines[path]) + ": " + path + ": unsupported value type",
                      lines[path]);
}

RawTree parse_toml_text(const std::string& text, const std::string& source) {
    RawTree raw;
    toml::table tbl;
    try {
        tbl = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        const int line = static_cast<int>(e.source().begin.line);
        throw ConfigError(source + ":" + std::to_string(line) + ": " + std::string(e.description()), line);
    }
    raw.root = toml_node(tbl, "", raw.lines, source);
    raw.lines.erase("");
    return raw;
}

}  // namespace

const std::vector<SchemaKey>& scenario_schema() {
    static const std::vector<SchemaKey> schema = make_schema();
    return schema;
}

const SchemaKey* find_schema_key(const std::string& path) {
    for (const auto& k : scenario_schema())
        if (k.path == path) return &k;
    return nullptr;
}

const std::vector<std::string>& sweep_variables() {
    static const std::vector<std::string> v{"mu_r_db", "gamma_bar_db", "beta_db", "ibo",        "ibo_db",
                                            "rho",     "Mz",           "mu_block", "target_rate", "l1_m"};
    return v;
}

const std::vector<std::string>& sweep_metrics() {
    static const std::vector<std::string> m{
        "outage",          "outage_mc",         "outage_asymptote", "coverage",       "coverage_mc",
        "cellular_cdf",    "cellular_coverage", "cellular_coverage_mc", "sndr_cdf",   "error_prob",
        "error_prob_mc",   "error_prob_quad",   "rate",             "rate_c1",        "rate_c2",
        "rate_mc",         "rate_c2_mc",        "rate_c2_approx",   "rate_c2_jensen", "rate_c2_ceiling",
        "rate_coverage",   "rate_coverage_mc",  "diversity_gain",   "kappa"};
    return m;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

class Ingest {
public:
    Ingest(const RawTree& raw, std::string source, std::string origin, const std::vector<std::string>& unverified,
           bool json)
        : raw_(raw), source_(std::move(source)), origin_(std::move(origin)),
          unverified_(unverified.begin(), unverified.end()), json_(json) {}

    std::string name;
    Json values = Json::object();
    Json provenance = Json::object();
    std::vector<SeriesSpec> series;

    void run() {
        if (!raw_.root.is_object()) fail("", "the scenario must be a table of sections");
        Json recorded;
        Json range = Json::object();
        for (const auto& [key, node] : raw_.root.items()) {
            if (key == "name") {
                if (!node.is_string()) fail(key, "expected a string");
                name = node.get<std::string>();
            } else if (key == "description") {
                if (!node.is_string()) fail(key, "expected a string");
            } else if (key == "provenance" && json_) {
                recorded = node;
            } else if (key == "series") {
                read_series(node);
            } else if (is_section(key)) {
                walk(node, key, values, true, range);
            } else {
                fail(key, "unknown section" + suggestion(key));
            }
        }
        expand_range(range);
        for (const auto& k : scenario_schema()) {
            if (values.contains(k.path)) {
                provenance[k.path] = unverified_.count(k.path) ? origin_ + " (unverified guess)" : origin_;
            } else {
                provenance[k.path] = k.fallback.is_null() ? std::string(kUnset) : k.origin;
            }
        }
        if (!recorded.is_null()) {
            if (!recorded.is_object()) fail("provenance", "expected a table of labels");
            for (const auto& [path, label] : recorded.items()) {
                if (!find_schema_key(path)) fail("provenance." + path, "unknown key");
                if (!label.is_string()) fail("provenance." + path, "expected a string");
                provenance[path] = label;
            }
        }
        Json ordered = Json::object();
        for (const auto& k : scenario_schema()) ordered[k.path] = values.contains(k.path) ? values[k.path] : k.fallback;
        values = std::move(ordered);
    }

private:
    [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
        const auto it = raw_.lines.find(path);
        if (it != raw_.lines.end())
            throw ConfigError(source_ + ":" + std::to_string(it->second) + ": " + path + ": " + msg, it->second);
        throw ConfigError(source_ + ": " + (path.empty() ? "" : path + ": ") + msg);
    }

    // `path` is the scenario key; `where` the location used for diagnostics.
    Json coerce(const Json& v, const SchemaKey& key, const std::string& where) const {
        if (v.is_null()) {
            if (!key.fallback.is_null()) fail(where, "may not be null");
            return v;
        }
        auto real = [&](const Json& x) -> double {
            if (x.is_number()) return x.get<double>();
            if (x.is_string()) {
                const std::string s = lower(x.get<std::string>());
                if (s == "inf" || s == "+inf") return kInf;
                if (s == "-inf") return -kInf;
            }
            fail(where, "expected a number");
        };
        switch (key.kind) {
            case K::Real: return real(v);
            case K::Integer:
                if (v.is_number_integer()) return v;
                if (v.is_number_float()) {
                    const double d = v.get<double>();
                    if (std::floor(d) == d && std::abs(d) < 9.0e15) return static_cast<std::int64_t>(d);
                }
                fail(where, "expected an integer");
            case K::Boolean:
                if (!v.is_boolean()) fail(where, "expected true or false");
                return v;
            case K::Text: {
                if (!v.is_string()) fail(where, "expected a string");
                if (!key.choices.empty() &&
                    std::find(key.choices.begin(), key.choices.end(), v.get<std::string>()) == key.choices.end()) {
                    std::string list;
                    for (const auto& c : key.choices) list += (list.empty() ? "" : ", ") + c;
                    fail(where, "'" + v.get<std::string>() + "' is not one of " + list);
                }
                return v;
            }
            case K::RealList: {
                if (!v.is_array()) fail(where, "expected an array of numbers");
                Json out = Json::array();
                for (const auto& x : v) out.push_back(real(x));
                return out;
            }
            case K::TextList: {
                if (!v.is_array()) fail(where, "expected an array of strings");
                for (const auto& x : v)
                    if (!x.is_string()) fail(where, "expected an array of strings");
                return v;
            }
        }
        return v;
    }

    void walk(const Json& node, const std::string& prefix, Json& out, bool allow_run_sections, Json& range,
              const std::string& where_prefix = "") {
        const std::string here = where_prefix.empty() ? prefix : where_prefix + "." + prefix;
        if (!node.is_object()) fail(here, "expected a table");
        for (const auto& [k, v] : node.items()) {
            const std::string path = prefix + "." + k;
            const std::string where = here + "." + k;
            if (!allow_run_sections && (path.rfind("sweep.", 0) == 0 || path.rfind("mc.", 0) == 0))
                fail(where, "series may not override sweep or mc settings");
            if (v.is_object()) {
                if (!is_section(path)) fail(where, "unknown section" + suggestion(path));
                walk(v, path, out, allow_run_sections, range, where_prefix);
                continue;
            }
            if (prefix == "sweep" && (k == "start" || k == "stop" || k == "points")) {
                range[k] = v;
                continue;
            }
            const SchemaKey* key = find_schema_key(path);
            if (!key) fail(where, "unknown key" + suggestion(path));
            out[path] = coerce(v, *key, where);
        }
    }

    void expand_range(const Json& range) {
        if (range.empty()) return;
        for (const char* k : {"start", "stop", "points"})
            if (!range.contains(k)) fail("sweep", std::string("start, stop and points must be given together (missing ") + k + ")");
        if (values.contains("sweep.values")) fail("sweep.values", "give either values or start/stop/points");
        if (!range["start"].is_number() || !range["stop"].is_number()) fail("sweep.start", "expected numbers");
        if (!range["points"].is_number_integer() || range["points"].get<std::int64_t>() < 1 ||
            range["points"].get<std::int64_t>() > 100000)
            fail("sweep.points", "expected an integer between 1 and 100000");
        const double a = range["start"].get<double>(), b = range["stop"].get<double>();
        const auto n = range["points"].get<std::int64_t>();
        Json grid = Json::array();
        for (std::int64_t i = 0; i < n; ++i) grid.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
        values["sweep.values"] = grid;
    }

    void read_series(const Json& node) {
        if (!node.is_array()) fail("series", "expected an array of tables");
        std::set<std::string> labels;
        for (std::size_t i = 0; i < node.size(); ++i) {
            const std::string at = "series[" + std::to_string(i) + "]";
            const Json& s = node[i];
            if (!s.is_object()) fail(at, "expected a table");
            SeriesSpec spec;
            spec.overrides = Json::object();
            bool has_label = false;
            for (const auto& [k, v] : s.items()) {
                if (k == "label") {
                    if (!v.is_string() || !safe_label(v.get<std::string>()))
                        fail(at + ".label", "labels use letters, digits and _.+-=/:; only (at most 64)");
                    spec.label = v.get<std::string>();
                    has_label = true;
                } else if (is_section(k)) {
                    Json unused = Json::object();
                    walk(v, k, spec.overrides, false, unused, at);
                } else {
                    fail(at + "." + k, "unknown section" + suggestion(k));
                }
            }
            if (!has_label) fail(at, "a series needs a label");
            if (!labels.insert(spec.label).second) fail(at + ".label", "duplicate label '" + spec.label + "'");
            series.push_back(std::move(spec));
        }
    }

    const RawTree& raw_;
    std::string source_;
    std::string origin_;
    std::set<std::string> unverified_;
    bool json_;
};

double get_real(const Json& flat, const std::string& path) { return flat.at(path).get<double>(); }

std::optional<double> get_opt_real(const Json& flat, const std::string& path) {
    const Json& v = flat.at(path);
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

int get_int(const Json& flat, const std::string& path) {
    const Json& v = flat.at(path);
    if (v.is_number_unsigned() ? v.get<std::uint64_t>() > 1000000000u
                               : std::abs(v.get<std::int64_t>()) > 1000000000)
        throw ConfigError(path + ": value out of range");
    return static_cast<int>(v.get<std::int64_t>());
}

std::string get_text(const Json& flat, const std::string& path) { return flat.at(path).get<std::string>(); }

Json nested(const Json& flat) {
    Json out = Json::object();
    for (const auto& [path, v] : flat.items()) {
        Json* node = &out;
        std::size_t start = 0;
        for (std::size_t dot; (dot = path.find('.', start)) != std::string::npos; start = dot + 1) {
            Json& child = (*node)[path.substr(start, dot - start)];
            if (child.is_null()) child = Json::object();
            node = &child;
        }
        Json value = v;
        if (v.is_number_float() && std::isinf(v.get<double>())) value = v.get<double>() > 0 ? "inf" : "-inf";
        if (v.is_array())
            for (auto& x : value)
                if (x.is_number_float() && std::isinf(x.get<double>())) x = x.get<double>() > 0 ? "inf" : "-inf";
        (*node)[path.substr(start)] = value;
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot read scenario file");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string stem_of(const std::string& path) {
    std::string base = path.substr(path.find_last_of('/') == std::string::npos ? 0 : path.find_last_of('/') + 1);
    const auto dot = base.find_last_of('.');
    return dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
}

// Applies one swept value to a flat value set.
void apply_variable(Json& flat, const std::string& var, double x) {
    auto need_unset = [&](const std::string& path, const std::string& why) {
        if (!flat.at(path).is_null()) throw ConfigError("sweep over " + var + " has no effect while " + path + " is set" + why);
    };
    auto need_text = [&](const std::string& path, const std::string& v) {
        if (get_text(flat, path) != v) throw ConfigError("sweep over " + var + " needs " + path + " = \"" + v + "\"");
    };
    if (var == "mu_r_db") {
        need_text("fso.snr_mode", "given");
        flat["fso.mu_r_db"] = x;
    } else if (var == "gamma_bar_db") {
        need_text("cellular.snr_mode", "given");
        flat["cellular.gamma_bar_db"] = x;
    } else if (var == "beta_db") {
        flat["e2e.beta_db"] = x;
    } else if (var == "ibo") {
        need_unset("hpa.kappa", "");
        flat["hpa.ibo"] = x;
        flat["hpa.ibo_db"] = nullptr;
    } else if (var == "ibo_db") {
        need_unset("hpa.kappa", "");
        flat["hpa.ibo_db"] = x;
        flat["hpa.ibo"] = nullptr;
    } else if (var == "rho") {
        need_unset("prs.fd_hz", " (rho then follows from fd and Td)");
        flat["prs.rho"] = x;
    } else if (var == "Mz") {
        if (!(x >= 0.0) || std::floor(x) != x || x > 1e6) throw ConfigError("sweep over Mz needs non-negative integers");
        flat["interference.mz"] = static_cast<std::int64_t>(x);
    } else if (var == "mu_block") {
        need_unset("cellular.p_los", "");
        flat["cellular.mu_block_m"] = x;
    } else if (var == "target_rate") {
        flat["e2e.target_rate_nats_s"] = x;
    } else if (var == "l1_m") {
        flat["cellular.l1_m"] = x;
    } else {
        throw ConfigError("unknown sweep variable '" + var + "'");
    }
}

// Scenario paths written by each sweep variable.
std::vector<std::string> variable_paths(const std::string& var) {
    if (var == "mu_r_db") return {"fso.mu_r_db"};
    if (var == "gamma_bar_db") return {"cellular.gamma_bar_db"};
    if (var == "beta_db") return {"e2e.beta_db"};
    if (var == "ibo" || var == "ibo_db") return {"hpa.ibo", "hpa.ibo_db", "hpa.a_sat"};
    if (var == "rho") return {"prs.rho"};
    if (var == "Mz") return {"interference.mz"};
    if (var == "mu_block") return {"cellular.mu_block_m"};
    if (var == "target_rate") return {"e2e.target_rate_nats_s"};
    if (var == "l1_m") return {"cellular.l1_m"};
    return {};
}

}  // namespace

Scenario Scenario::from_toml(const std::string& text, const std::string& source, const std::string& origin,
                             const std::vector<std::string>& unverified) {
    const RawTree raw = parse_toml_text(text, source);
    Ingest in(raw, source, origin, unverified, false);
    in.run();
    Scenario s;
    s.name_ = in.name.empty() ? stem_of(source) : in.name;
    s.source_ = source;
    s.values_ = std::move(in.values);
    s.provenance_ = std::move(in.provenance);
    s.series_ = std::move(in.series);
    s.lines_ = raw.lines;
    s.check();
    return s;
}

Scenario Scenario::from_json(const std::string& text, const std::string& source) {
    RawTree raw;
    try {
        raw.root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(source + ": " + e.what());
    }
    Ingest in(raw, source, kFromFile, {}, true);
    in.run();
    Scenario s;
    s.name_ = in.name.empty() ? stem_of(source) : in.name;
    s.source_ = source;
    s.values_ = std::move(in.values);
    s.provenance_ = std::move(in.provenance);
    s.series_ = std::move(in.series);
    s.check();
    return s;
}

Scenario Scenario::load(const std::string& path) {
    const std::string text = read_file(path);
    const bool json = path.size() >= 5 && lower(path.substr(path.size() - 5)) == ".json";
    return json ? from_json(text, path) : from_toml(text, path);
}

Json Scenario::value(const std::string& path) const {
    if (!values_.contains(path)) throw ConfigError("unknown key '" + path + "'");
    return values_.at(path);
}

std::string Scenario::where(const std::string& path) const {
    const auto it = lines_.find(path);
    if (it != lines_.end()) return source_ + ":" + std::to_string(it->second) + ": " + path;
    return source_ + ": " + path;
}

void Scenario::set(const std::string& path, const Json& v, const std::string& origin) {
    const SchemaKey* key = find_schema_key(path);
    if (!key) throw ConfigError("unknown key '" + path + "'");
    const Json old = values_[path];
    const Json old_origin = provenance_[path];
    RawTree raw;
    raw.root = Json::object();
    // Route the value through the same coercion as file input.
    Json section = Json::object();
    section[path.substr(path.find_last_of('.') + 1)] = v;
    Json tree = section;
    for (std::string prefix = path.substr(0, path.find_last_of('.'));;) {
        const auto dot = prefix.find_last_of('.');
        Json up = Json::object();
        up[dot == std::string::npos ? prefix : prefix.substr(dot + 1)] = tree;
        tree = up;
        if (dot == std::string::npos) break;
        prefix = prefix.substr(0, dot);
    }
    raw.root = tree;
    Ingest in(raw, origin, origin, {}, false);
    in.run();
    values_[path] = in.values[path];
    provenance_[path] = origin;
    try {
        check();
    } catch (...) {
        values_[path] = old;
        provenance_[path] = old_origin;
        throw;
    }
}

Json Scenario::sidecar() const {
    Json out = nested(values_);
    Json full = Json::object();
    full["name"] = name_;
    for (auto& [k, v] : out.items()) full[k] = v;
    Json series = Json::array();
    for (const auto& s : series_) {
        Json o = nested(s.overrides);
        Json entry = Json::object();
        entry["label"] = s.label;
        for (auto& [k, v] : o.items()) entry[k] = v;
        series.push_back(entry);
    }
    full["series"] = series;
    full["provenance"] = provenance_;
    return full;
}

McSettings Scenario::mc() const {
    McSettings m;
    auto u64 = [&](const std::string& path, std::uint64_t min) {
        const Json& v = values_.at(path);
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)
            throw ConfigError(where(path) + ": must be non-negative");
        const auto x = v.get<std::uint64_t>();
        if (x < min) throw ConfigError(where(path) + ": must be at least " + std::to_string(min));
        return x;
    };
    m.samples = u64("mc.samples", 1000);
    m.seed = u64("mc.seed", 0);
    m.chunk_size = u64("mc.chunk_size", 1);
    return m;
}

SweepSpec Scenario::sweep() const {
    SweepSpec s;
    if (values_.at("sweep.var").is_null()) throw ConfigError(where("sweep.var") + ": no sweep variable given");
    s.var = values_.at("sweep.var").get<std::string>();
    const auto& vars = sweep_variables();
    if (std::find(vars.begin(), vars.end(), s.var) == vars.end())
        throw ConfigError(where("sweep.var") + ": unknown sweep variable '" + s.var + "'");
    for (const auto& x : values_.at("sweep.values")) s.values.push_back(x.get<double>());
    if (s.values.empty()) throw ConfigError(where("sweep.values") + ": empty sweep grid");
    for (double x : s.values)
        if (!std::isfinite(x)) throw ConfigError(where("sweep.values") + ": grid values must be finite");
    for (const auto& m : values_.at("sweep.metrics")) s.metrics.push_back(m.get<std::string>());
    if (s.metrics.empty()) throw ConfigError(where("sweep.metrics") + ": no metrics requested");
    std::set<std::string> seen;
    for (const auto& m : s.metrics) {
        const auto& all = sweep_metrics();
        if (std::find(all.begin(), all.end(), m) == all.end())
            throw ConfigError(where("sweep.metrics") + ": unknown metric '" + m + "'");
        if (!seen.insert(m).second) throw ConfigError(where("sweep.metrics") + ": duplicate metric '" + m + "'");
    }
    for (const auto& c : values_.at("sweep.couple")) {
        const std::string v = c.get<std::string>();
        if (std::find(vars.begin(), vars.end(), v) == vars.end() || v == s.var)
            throw ConfigError(where("sweep.couple") + ": '" + v + "' cannot be coupled to " + s.var);
        s.couple.push_back(v);
    }
    std::vector<std::string> swept_paths = variable_paths(s.var);
    for (const auto& c : s.couple)
        for (const auto& p : variable_paths(c)) swept_paths.push_back(p);
    for (const auto& sr : series_)
        for (const auto& p : swept_paths)
            if (sr.overrides.contains(p))
                throw ConfigError(source_ + ": series '" + sr.label + "' sets " + p + ", which the sweep overwrites");
    // Reject the whole grid before any computation.
    const int n_series = series_.empty() ? 1 : static_cast<int>(series_.size());
    for (double x : s.values)
        for (int i = 0; i < n_series; ++i) {
            try {
                point(series_.empty() ? -1 : i, x);
            } catch (const ConfigError& e) {
                throw ConfigError(source_ + ": at " + s.var + " = " + format_number(x) +
                                  (series_.empty() ? "" : " (series " + series_[i].label + ")") + ": " + e.what());
            }
        }
    return s;
}

Json Scenario::point_values(int series, std::optional<double> sweep_value) const {
    Json flat = values_;
    if (series >= 0) {
        if (series >= static_cast<int>(series_.size())) throw ConfigError("series index out of range");
        for (const auto& [p, v] : series_[series].overrides.items()) flat[p] = v;
    }
    if (sweep_value) {
        const std::string var = values_.at("sweep.var").is_null() ? "" : values_.at("sweep.var").get<std::string>();
        apply_variable(flat, var, *sweep_value);
        for (const auto& c : values_.at("sweep.couple")) apply_variable(flat, c.get<std::string>(), *sweep_value);
    }
    return flat;
}

PointConfig Scenario::point(int series, std::optional<double> sweep_value) const {
    return build(point_values(series, sweep_value));
}

PointConfig Scenario::build(const Json& f) {
    PointConfig pc;
    auto& cell = pc.system.cellular;
    cell.fc_hz = get_real(f, "cellular.fc_ghz") * 1e9;
    cell.gt_db = get_real(f, "cellular.gt_db");
    cell.gr_db = get_real(f, "cellular.gr_db");
    cell.n_antennas = get_int(f, "cellular.n_antennas");
    cell.m = get_real(f, "cellular.nakagami_m");
    cell.n0_dbm_hz = get_real(f, "cellular.n0_dbm_hz");
    cell.nf_db = get_real(f, "cellular.nf_db");
    cell.b_hz = get_real(f, "cellular.b_mhz") * 1e6;
    cell.l1_m = get_real(f, "cellular.l1_m");
    if (get_text(f, "cellular.snr_mode") == "given") cell.gamma_bar = db_to_linear(get_real(f, "cellular.gamma_bar_db"));
    cell.tx_power_dbm = get_real(f, "cellular.tx_power_dbm");
    cell.pathloss_term = get_text(f, "cellular.pathloss_term") == "exponent" ? PathlossTerm::Exponent : PathlossTerm::Literal;
    cell.alpha_los = get_real(f, "cellular.alpha_los");
    cell.alpha_nlos = get_real(f, "cellular.alpha_nlos");
    cell.mu_block_m = get_real(f, "cellular.mu_block_m");
    cell.p_los = get_opt_real(f, "cellular.p_los");
    if (cell.p_los && !(*cell.p_los >= 0.0 && *cell.p_los <= 1.0)) throw ConfigError("cellular.p_los must lie in [0, 1]");
    cell.validate();

    auto& prs = pc.system.prs;
    prs.M = get_int(f, "prs.M");
    prs.k = get_int(f, "prs.k");
    prs.rho = get_real(f, "prs.rho");
    prs.fd_hz = get_opt_real(f, "prs.fd_hz");
    prs.td_s = get_opt_real(f, "prs.td_s");
    prs.validate();

    auto& ifc = pc.system.interference;
    ifc.mz = get_int(f, "interference.mz");
    ifc.gamma_z_bar = db_to_linear(get_real(f, "interference.gamma_z_bar_db"));
    ifc.mean_mode = get_text(f, "interference.mean_mode") == "aggregate" ? InterferenceMean::Aggregate
                                                                          : InterferenceMean::PerInterferer;
    ifc.poisson_count = f.at("interference.poisson_count").get<bool>();
    ifc.validate();

    auto& fso = pc.system.fso;
    fso.lambda_m = get_real(f, "fso.lambda_nm") * 1e-9;
    fso.aperture_m = get_real(f, "fso.aperture_cm") * 1e-2;
    fso.theta_rad = get_real(f, "fso.theta_mrad") * 1e-3;
    fso.sigma2_sq = get_real(f, "fso.sigma2_sq");
    fso.atten_db_km = get_real(f, "fso.atten_db_km");
    fso.cn2 = get_real(f, "fso.cn2");
    fso.l2_m = get_real(f, "fso.l2_m");
    fso.sigma_s_m = get_real(f, "fso.sigma_s_m");
    fso.omega0_m = get_real(f, "fso.omega0_m");
    fso.f0_m = get_real(f, "fso.f0_m");
    fso.eta = get_real(f, "fso.eta");
    fso.r = get_text(f, "fso.detection") == "heterodyne" ? 1 : 2;
    if (get_text(f, "fso.snr_mode") == "given") fso.mu_r = db_to_linear(get_real(f, "fso.mu_r_db"));
    fso.apply_path_loss = f.at("fso.apply_path_loss").get<bool>();
    if (fso.apply_path_loss && !fso.mu_r) throw ConfigError("fso.apply_path_loss needs fso.snr_mode = \"given\"");
    fso.xi = get_opt_real(f, "fso.xi");
    fso.normalize_turbulence = f.at("fso.normalize_turbulence").get<bool>();
    fso.dgg.alpha1 = get_real(f, "fso.dgg.alpha1");
    fso.dgg.alpha2 = get_real(f, "fso.dgg.alpha2");
    fso.dgg.m1 = get_real(f, "fso.dgg.m1");
    fso.dgg.m2 = get_real(f, "fso.dgg.m2");
    fso.dgg.omega1 = get_real(f, "fso.dgg.omega1");
    fso.dgg.omega2 = get_real(f, "fso.dgg.omega2");
    for (double v : {fso.dgg.alpha1, fso.dgg.alpha2, fso.dgg.m1, fso.dgg.m2, fso.dgg.omega1, fso.dgg.omega2})
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("fso.dgg: shape and scale parameters must be positive");
    fso.validate();

    auto& hpa = pc.system.hpa;
    hpa.model = parse_hpa_model(get_text(f, "hpa.model"));
    hpa.sigma_r = get_real(f, "hpa.sigma_r");
    hpa.a_sat = get_real(f, "hpa.a_sat");
    const auto ibo = get_opt_real(f, "hpa.ibo");
    const auto ibo_db = get_opt_real(f, "hpa.ibo_db");
    if (ibo && ibo_db) throw ConfigError("hpa.ibo and hpa.ibo_db are mutually exclusive");
    if (ibo) hpa.a_sat = *ibo * hpa.sigma_r;
    if (ibo_db) hpa.a_sat = std::pow(10.0, *ibo_db / 20.0) * hpa.sigma_r;
    hpa.gain = get_opt_real(f, "hpa.gain");
    hpa.sigma1_sq = get_opt_real(f, "hpa.sigma1_sq");
    hpa.kappa = get_opt_real(f, "hpa.kappa");
    hpa.validate();
    const double kappa = bussgang(hpa).kappa;
    if (!(kappa >= 1.0)) throw ConfigError("hpa: kappa = " + format_number(kappa) + " must be at least 1");

    pc.beta = db_to_linear(get_real(f, "e2e.beta_db"));
    pc.modulation = ModulationScheme::parse(get_text(f, "e2e.modulation"));
    pc.target_rate = get_real(f, "e2e.target_rate_nats_s");
    if (!(pc.target_rate >= 0.0) || !std::isfinite(pc.target_rate))
        throw ConfigError("e2e.target_rate_nats_s must be non-negative and finite");
    pc.bandwidth_hz = cell.b_hz;
    pc.quadrature_error_prob = get_text(f, "e2e.error_prob_method") == "quadrature";
    pc.rate_units = get_text(f, "e2e.rate_units");
    return pc;
}

void Scenario::check() const {
    mc();
    const auto& vars = sweep_variables();
    const auto& metrics = sweep_metrics();
    const Json& var = values_.at("sweep.var");
    if (!var.is_null() && std::find(vars.begin(), vars.end(), var.get<std::string>()) == vars.end())
        throw ConfigError(where("sweep.var") + ": unknown sweep variable '" + var.get<std::string>() + "'");
    for (const auto& m : values_.at("sweep.metrics"))
        if (std::find(metrics.begin(), metrics.end(), m.get<std::string>()) == metrics.end())
            throw ConfigError(where("sweep.metrics") + ": unknown metric '" + m.get<std::string>() + "'");
    const int n_series = series_.empty() ? 1 : static_cast<int>(series_.size());
    for (int i = 0; i < n_series; ++i) {
        try {
            point(series_.empty() ? -1 : i, std::nullopt);
        } catch (const ConfigError& e) {
            // Module checks name their section ("hpa: ..."); point at its table.
            const std::string msg = e.what();
            const std::string section = msg.substr(0, msg.find(':'));
            std::string at = source_;
            if (series_.empty()) {
                const auto it = lines_.find(section);
                if (it != lines_.end()) at += ":" + std::to_string(it->second);
            } else {
                at += ": series '" + series_[i].label + "'";
            }
            throw ConfigError(at + ": " + msg);
        }
    }
}

}  // namespace mmfso
