#pragma once

// Binary field storage with checksums, and CSV export of sampled fields.

#include "selfsim/annulus.hpp"
#include "selfsim/assembler.hpp"
#include "selfsim/config.hpp"

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace selfsim {

// Missing, unreadable or corrupt stored data.
class IntegrityError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

void save_field(const Field& field, const std::filesystem::path& path);
Field load_field(const std::filesystem::path& path);

// Writes upper.field, lower.field, green.field and manifest.json.
void save_models(const GluedPotential& glued, const RunConfig& config, const std::filesystem::path& dir);
// Rebuilds the potential from stored fields; the manifest must match the config.
GluedPotential load_models(const std::filesystem::path& dir, const RunConfig& config);

enum class ExportKind { Upper, Lower, Glued, Annulus };

ExportKind parse_export_kind(const std::string& name);

// Strip fields: header x,y,value, one row per lattice node (the lower field
// in actual coordinates, y <= 0). Annulus: re,im,value on a polar lattice.
// Returns the number of data rows.
std::size_t export_csv(const GluedPotential& glued, ExportKind kind, const std::filesystem::path& path,
                       double epsilon, int radial = 65, int angular = 512);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::array<double, 3>> rows;
};

CsvTable import_csv(const std::filesystem::path& path);

}  // namespace selfsim
