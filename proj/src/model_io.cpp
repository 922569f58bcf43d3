#include "selfsim/model_io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace selfsim {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t hash = seed;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= p[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

namespace {

constexpr char kMagic[8] = {'S', 'S', 'F', 'I', 'E', 'L', 'D', '1'};

class Writer {
public:
    template <typename T>
    void put(const T& v) {
        const auto* p = reinterpret_cast<const char*>(&v);
        bytes_.insert(bytes_.end(), p, p + sizeof(T));
    }
    void put_bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const char*>(data);
        bytes_.insert(bytes_.end(), p, p + n);
    }
    const std::vector<char>& bytes() const { return bytes_; }

private:
    std::vector<char> bytes_;
};

class Reader {
public:
    Reader(const std::vector<char>& bytes, std::string name) : bytes_(bytes), name_(std::move(name)) {}
    template <typename T>
    T get() {
        T v;
        get_bytes(&v, sizeof(T));
        return v;
    }
    void get_bytes(void* out, std::size_t n) {
        if (pos_ + n > bytes_.size()) throw IntegrityError(name_ + ": truncated field file");
        std::memcpy(out, bytes_.data() + pos_, n);
        pos_ += n;
    }

private:
    const std::vector<char>& bytes_;
    std::string name_;
    std::size_t pos_ = 0;
};

std::vector<char> read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IntegrityError("cannot read " + path.string());
    return std::vector<char>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_all(const fs::path& path, const std::vector<char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IntegrityError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IntegrityError("write failed for " + path.string());
}

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

json model_key(const RunConfig& c) {
    return json{{"h", "1/" + std::to_string(c.cells_per_unit)},
                {"n_max", c.n_max},
                {"tol", c.tol},
                {"value_floor", c.value_floor},
                {"stencil", stencil_name(c.stencil)},
                {"omega", c.omega}};
}

void append(std::string& line, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    line.append(buf, res.ptr);
}

void write_row(std::ofstream& out, double a, double b, double c) {
    std::string line;
    append(line, a);
    line += ',';
    append(line, b);
    line += ',';
    append(line, c);
    line += '\n';
    out << line;
}

}  // namespace

void save_field(const Field& field, const fs::path& path) {
    const Grid& g = field.grid();
    Writer w;
    w.put_bytes(kMagic, sizeof kMagic);
    w.put(g.x0);
    w.put(g.y0);
    w.put(g.h);
    w.put(static_cast<std::int32_t>(g.nx));
    w.put(static_cast<std::int32_t>(g.ny));
    w.put(static_cast<std::int32_t>(g.periodic_x ? 1 : 0));
    w.put(field.residual());
    w.put(static_cast<std::int32_t>(field.iterations()));
    w.put(static_cast<std::uint32_t>(field.origin().size()));
    w.put_bytes(field.origin().data(), field.origin().size());
    w.put(static_cast<std::uint64_t>(field.values().size()));
    w.put_bytes(field.values().data(), field.values().size() * sizeof(double));
    std::vector<char> bytes = w.bytes();
    const std::uint64_t sum = fnv1a(bytes.data(), bytes.size());
    const auto* p = reinterpret_cast<const char*>(&sum);
    bytes.insert(bytes.end(), p, p + sizeof sum);
    write_all(path, bytes);
}

Field load_field(const fs::path& path) {
    const std::vector<char> bytes = read_all(path);
    const std::string name = path.filename().string();
    if (bytes.size() < sizeof kMagic + sizeof(std::uint64_t)) throw IntegrityError(name + ": file too short");
    std::uint64_t stored;
    std::memcpy(&stored, bytes.data() + bytes.size() - sizeof stored, sizeof stored);
    if (fnv1a(bytes.data(), bytes.size() - sizeof stored) != stored) throw IntegrityError(name + ": checksum mismatch");
    Reader r(bytes, name);
    char magic[8];
    r.get_bytes(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw IntegrityError(name + ": not a field file");
    Grid g;
    g.x0 = r.get<double>();
    g.y0 = r.get<double>();
    g.h = r.get<double>();
    g.nx = r.get<std::int32_t>();
    g.ny = r.get<std::int32_t>();
    g.periodic_x = r.get<std::int32_t>() != 0;
    const double residual = r.get<double>();
    const int iterations = r.get<std::int32_t>();
    std::string origin(r.get<std::uint32_t>(), '\0');
    r.get_bytes(origin.data(), origin.size());
    const auto count = r.get<std::uint64_t>();
    if (g.nx <= 0 || g.ny <= 0 || count != g.size()) throw IntegrityError(name + ": inconsistent lattice size");
    std::vector<double> values(count);
    r.get_bytes(values.data(), count * sizeof(double));
    Field f(g, std::move(values), std::move(origin));
    f.set_solve_info(residual, iterations);
    return f;
}

void save_models(const GluedPotential& glued, const RunConfig& config, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IntegrityError("cannot create " + dir.string() + ": " + ec.message());
    json files = json::object();
    const std::pair<const char*, const Field*> items[] = {
        {"upper.field", &glued.upper().base},
        {"lower.field", &glued.lower().base},
        {"green.field", &glued.upper().green.green->regular_field()}};
    for (const auto& [name, field] : items) {
        save_field(*field, dir / name);
        const std::vector<char> bytes = read_all(dir / name);
        files[name] = hex(fnv1a(bytes.data(), bytes.size()));
    }
    const json manifest{{"model", model_key(config)}, {"files", files}};
    std::ofstream out(dir / "manifest.json");
    if (!out) throw IntegrityError("cannot write manifest in " + dir.string());
    out << manifest.dump(2) << "\n";
}

GluedPotential load_models(const fs::path& dir, const RunConfig& config) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw IntegrityError("missing manifest.json in " + dir.string());
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw IntegrityError(std::string("corrupt manifest: ") + e.what());
    }
    if (!manifest.contains("model") || !manifest.contains("files")) throw IntegrityError("incomplete manifest");
    if (manifest["model"] != model_key(config)) {
        throw ConfigError("stored models were built with " + manifest["model"].dump() + ", config asks for " +
                          model_key(config).dump());
    }
    std::vector<Field> fields;
    for (const char* name : {"upper.field", "lower.field", "green.field"}) {
        if (!manifest["files"].contains(name)) throw IntegrityError(std::string("manifest lacks ") + name);
        const std::vector<char> bytes = read_all(dir / name);
        if (hex(fnv1a(bytes.data(), bytes.size())) != manifest["files"][name].get<std::string>()) {
            throw IntegrityError(std::string(name) + ": checksum differs from manifest");
        }
        fields.push_back(load_field(dir / name));
    }
    return assemble_from_fields(std::move(fields[0]), std::move(fields[1]), std::move(fields[2]),
                                assembly_options(config));
}

ExportKind parse_export_kind(const std::string& name) {
    if (name == "upper") return ExportKind::Upper;
    if (name == "lower") return ExportKind::Lower;
    if (name == "glued") return ExportKind::Glued;
    if (name == "annulus") return ExportKind::Annulus;
    throw ConfigError("unknown export '" + name + "' (upper, lower, glued, annulus)");
}

std::size_t export_csv(const GluedPotential& glued, ExportKind kind, const fs::path& path, double epsilon,
                       int radial, int angular) {
    std::ofstream out(path);
    if (!out) throw IntegrityError("cannot write " + path.string());
    std::size_t rows = 0;
    switch (kind) {
        case ExportKind::Upper:
        case ExportKind::Lower: {
            const bool lower = kind == ExportKind::Lower;
            const Field& f = glued.model(lower ? Half::Lower : Half::Upper).base;
            const Grid& g = f.grid();
            out << "x,y,value\n";
            for (int j = 0; j < g.ny; ++j) {
                for (int i = 0; i < g.nx; ++i, ++rows) write_row(out, g.x(i), lower ? -g.y(j) : g.y(j), f.at(i, j));
            }
            break;
        }
        case ExportKind::Glued: {
            const int m = glued.cells_per_unit();
            const auto top = lattice_index(kStripHeight, m);
            out << "x,y,value\n";
            for (auto j = -top; j <= top; ++j) {
                for (int i = 0; i < m; ++i, ++rows) {
                    const Point z{static_cast<double>(i) / m, static_cast<double>(j) / m};
                    write_row(out, z.real(), z.imag(), glued.evaluate(z));
                }
            }
            break;
        }
        case ExportKind::Annulus: {
            const AnnulusPotential pot(glued, epsilon);
            out << "re,im,value\n";
            for (int a = 0; a < radial; ++a) {
                const double r = 1.0 + static_cast<double>(a) / (radial - 1);
                for (int b = 0; b < angular; ++b, ++rows) {
                    const Point zeta = std::polar(r, 2.0 * std::numbers::pi * b / angular);
                    write_row(out, zeta.real(), zeta.imag(), pot.evaluate(zeta));
                }
            }
            break;
        }
    }
    if (!out) throw IntegrityError("write failed for " + path.string());
    return rows;
}

CsvTable import_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IntegrityError("cannot read " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw IntegrityError("empty csv " + path.string());
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    while (std::getline(in, line)) {
        std::array<double, 3> row{};
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int c = 0; c < 3; ++c) {
            const auto res = std::from_chars(p, end, row[c]);
            if (res.ec != std::errc()) throw IntegrityError("malformed csv row: " + line);
            p = res.ptr + (c < 2 ? 1 : 0);
        }
        t.rows.push_back(row);
    }
    return t;
}

}  // namespace selfsim
