#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mmfso/scenario.hpp"

namespace mmfso {

struct CannedScenario {
    std::string name;
    std::string summary;
    std::string toml;
    // Keys whose values are guesses where the figure leaves them open.
    std::vector<std::string> unverified;
};

// "default", "reduction" and the figure scenarios fig5a ... fig9b.
const std::vector<CannedScenario>& canned_scenarios();
const CannedScenario* find_canned(const std::string& name);
// ConfigError for unknown names.
Scenario load_canned(const std::string& name);

// The cellular, modulation and FSO parameter tables with provenance,
// followed by the remaining defaults and the canned scenario list.
void print_tables(std::ostream& out);

}  // namespace mmfso
