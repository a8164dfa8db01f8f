#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "mmfso/canned.hpp"
#include "mmfso/errors.hpp"
#include "mmfso/scenario.hpp"
#include "mmfso/sweep.hpp"
#include "mmfso/validate.hpp"

namespace {

using namespace mmfso;

enum Exit { kOk = 0, kValidateFailed = 1, kConfig = 2, kNumeric = 3 };

struct RunFlags {
    std::string scenario = "default";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::string out;
    std::string format = "csv";
};

Scenario open_scenario(const RunFlags& f) {
    Scenario s = [&] {
        if (std::filesystem::exists(f.scenario)) return Scenario::load(f.scenario);
        if (find_canned(f.scenario)) return load_canned(f.scenario);
        throw ConfigError(f.scenario + ": no such scenario file or canned scenario");
    }();
    if (f.seed) s.set("mc.seed", *f.seed, kFromCli);
    if (f.samples) s.set("mc.samples", *f.samples, kFromCli);
    return s;
}

std::string sidecar_path(const std::string& out) {
    std::filesystem::path p(out);
    p.replace_extension();
    return p.string() + ".config.json";
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError(path + ": cannot open for writing");
    os << text;
    if (!os) throw ConfigError(path + ": write failed");
}

int count_defaults(const Scenario& s) {
    int n = 0;
    for (const auto& [path, label] : s.provenance().items()) {
        const std::string l = label.get<std::string>();
        n += l.rfind("default", 0) == 0 ? 1 : 0;
    }
    return n;
}

int cmd_sweep(const RunFlags& f) {
    const Scenario s = open_scenario(f);
    const auto rows = run_sweep(s);
    std::ostringstream os;
    if (f.format == "json") write_json(os, rows);
    else write_csv(os, rows);
    if (f.out.empty()) {
        std::cout << os.str();
        std::cerr << "note: " << count_defaults(s) << " keys use defaults; --out also writes the resolved scenario\n";
    } else {
        const std::string side = sidecar_path(f.out);
        write_file(f.out, os.str());
        write_file(side, s.sidecar().dump(2) + "\n");
        std::cerr << "wrote " << rows.size() << " rows to " << f.out << "; resolved scenario with provenance ("
                  << count_defaults(s) << " keys from defaults) in " << side << '\n';
    }
    return kOk;
}

int cmd_validate(const RunFlags& f) {
    const Scenario s = open_scenario(f);
    const ValidationReport report = run_validation(s);
    print_validation(std::cout, report);
    if (const CheckResult* bad = report.first_failure()) {
        std::cerr << "validate: check " << bad->name << " failed at " << bad->point << '\n';
        return kValidateFailed;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mmWave cellular uplink with FSO backhaul: analytic and Monte-Carlo evaluation"};
    app.require_subcommand(1);
    RunFlags flags;

    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("scenario", flags.scenario, "scenario file (TOML, or JSON sidecar) or canned scenario name")
            ->capture_default_str();
        cmd->add_option("--seed", flags.seed, "base seed (u64)");
        cmd->add_option("--samples", flags.samples, "Monte-Carlo samples per estimate (>= 1000)");
    };
    CLI::App* sweep = app.add_subcommand("sweep", "run the scenario's sweep and write plot-ready rows");
    add_run_flags(sweep);
    sweep->add_option("--out", flags.out, "output file; the resolved scenario goes to <stem>.config.json");
    sweep->add_option("--format", flags.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    CLI::App* validate = app.add_subcommand("validate", "cross-check closed forms against Monte-Carlo");
    add_run_flags(validate);
    CLI::App* tables = app.add_subcommand("tables", "print the parameter tables and defaults with provenance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*sweep) return cmd_sweep(flags);
        if (*validate) return cmd_validate(flags);
        if (*tables) {
            print_tables(std::cout);
            return kOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumeric;
    }
    return kOk;
}
