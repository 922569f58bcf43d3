#pragma once

// Staged execution: solve, assemble, verify, annulus. Produces the JSON
// report; all sample placement is seeded from the config hash.

#include "selfsim/annulus.hpp"
#include "selfsim/assembler.hpp"
#include "selfsim/config.hpp"
#include "selfsim/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace selfsim {

// Seed of one named check: FNV-1a of the name, started from the config hash.
std::uint64_t check_seed(const RunConfig& config, const std::string& name);

struct Verification {
    std::vector<CheckRecord> checks;
    DecayTable decay;
    nlohmann::json constants;
    nlohmann::json timing;

    bool pass() const;
};

// Runs every check against an assembled potential.
Verification verify(const GluedPotential& glued, const RunConfig& config);

nlohmann::json record_json(const CheckRecord& r);
nlohmann::json config_json(const RunConfig& config);

// Keys: config, constants, checks, decay, timing, pass.
nlohmann::json make_report(const RunConfig& config, const Verification& v);

// The report without its timing block, serialized; equal for equal configs.
std::string deterministic_text(const nlohmann::json& report);

}  // namespace selfsim
