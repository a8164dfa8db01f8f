#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmfso/e2e.hpp"

namespace mmfso {

using Json = nlohmann::ordered_json;

enum class ValueKind { Real, Integer, Boolean, Text, RealList, TextList };

// One scenario key. Keys are addressed by dotted paths such as
// "cellular.fc_ghz" or "fso.dgg.alpha1"; the unit is part of the name.
struct SchemaKey {
    std::string path;
    ValueKind kind;
    Json fallback;       // null: unset unless given
    std::string origin;  // provenance label of the fallback
    std::string note;
    std::vector<std::string> choices{};  // allowed values of a Text key; empty = free
};

const std::vector<SchemaKey>& scenario_schema();
const SchemaKey* find_schema_key(const std::string& path);

// Provenance labels.
inline constexpr const char* kFromFile = "scenario file";
inline constexpr const char* kFromCli = "command line";

struct SeriesSpec {
    std::string label;
    Json overrides;  // flat: path -> value
};

struct SweepSpec {
    std::string var;
    std::vector<double> values;
    std::vector<std::string> metrics;
    std::vector<std::string> couple;  // further variables set to the same value
};

struct McSettings {
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 1;
    std::uint64_t chunk_size = 1u << 14;
};

// Everything one grid point needs, in linear units.
struct PointConfig {
    E2eConfig system;
    double beta = 1.0;
    double target_rate = 0.0;  // nats/s
    double bandwidth_hz = 0.0;
    ModulationScheme modulation;
    bool quadrature_error_prob = false;
    std::string rate_units = "nats";
};

const std::vector<std::string>& sweep_variables();
const std::vector<std::string>& sweep_metrics();

class Scenario {
public:
    // `origin` labels the keys given in the text; keys listed in `unverified`
    // get "<origin> (unverified guess)".
    static Scenario from_toml(const std::string& text, const std::string& source,
                              const std::string& origin = kFromFile,
                              const std::vector<std::string>& unverified = {});
    // Accepts a plain scenario or a sidecar written by sidecar(); recorded
    // provenance labels are kept.
    static Scenario from_json(const std::string& text, const std::string& source);
    // Dispatches on the extension: ".json" is JSON, anything else TOML.
    static Scenario load(const std::string& path);

    const std::string& name() const { return name_; }
    const std::string& source() const { return source_; }
    const Json& values() const { return values_; }
    const Json& provenance() const { return provenance_; }
    const std::vector<SeriesSpec>& series() const { return series_; }
    Json value(const std::string& path) const;

    // Replaces one value (e.g. from a command-line flag) and re-checks.
    void set(const std::string& path, const Json& value, const std::string& origin);

    // Resolved scenario with provenance; from_json(sidecar().dump()) gives
    // back the same scenario.
    Json sidecar() const;

    McSettings mc() const;
    // Throws ConfigError for a missing variable, an empty grid or unknown metrics.
    SweepSpec sweep() const;

    // Flat values of one series (-1: no series) with the sweep value applied.
    Json point_values(int series, std::optional<double> sweep_value) const;
    PointConfig point(int series, std::optional<double> sweep_value) const;
    static PointConfig build(const Json& flat);

private:
    void check() const;
    std::string where(const std::string& path) const;

    std::string name_;
    std::string source_;
    Json values_ = Json::object();
    Json provenance_ = Json::object();
    std::vector<SeriesSpec> series_;
    std::map<std::string, int> lines_;
};

// "1e-07", "30", "inf": %.17g with explicit infinities.
std::string format_number(double x);

}  // namespace mmfso
