#include "selfsim/cli.hpp"
#include "selfsim/config.hpp"
#include "selfsim/model_io.hpp"

#include "small_model.hpp"

#include <doctest.h>

#include <cstring>
#include <fstream>
#include <sstream>

using namespace selfsim;
using testing_support::small_config;
using testing_support::small_model;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("selfsim_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void flip_byte(const fs::path& p, std::size_t offset) {
    std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
    f.seekg(static_cast<std::streamoff>(offset));
    char c;
    f.get(c);
    f.seekp(static_cast<std::streamoff>(offset));
    f.put(static_cast<char>(c ^ 0x5a));
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parsing") {
    const RunConfig c = parse("# comment\nh = 1/960\nn_max = 3  # trailing\nepsilon = 0.3\nstencil = 9-point\n");
    CHECK(c.cells_per_unit == 960);
    CHECK(c.n_max == 3);
    CHECK(c.epsilon == 0.3);
    CHECK(c.stencil == Stencil::NinePoint);
    CHECK(parse("h = 0.0025\n").cells_per_unit == 400);
    CHECK_THROWS_AS(parse("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("h = 2/480\n"), ConfigError);
    CHECK_THROWS_AS(parse("n_max = four\n"), ConfigError);
    CHECK_THROWS_AS(parse("n_max\n"), ConfigError);
}

TEST_CASE("validation") {
    CHECK_NOTHROW(validate(RunConfig{}));
    CHECK(lattice_multiple(4) == 480);
    RunConfig deep;
    deep.n_max = 6;
    try {
        validate(deep);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("resolution bound") != std::string::npos);
    }
    RunConfig pow2;
    pow2.cells_per_unit = 512;
    CHECK_THROWS_AS(validate(pow2), ConfigError);
    RunConfig eps;
    eps.epsilon = 1.0;
    CHECK_THROWS_AS(validate(eps), ConfigError);
}

TEST_CASE("canonical text and hash") {
    RunConfig a, b;
    b.output_dir = "elsewhere";
    CHECK(canonical_text(a) == canonical_text(b));
    CHECK(config_hash(a) == config_hash(b));
    b.line_samples = 512;
    CHECK(config_hash(a) != config_hash(b));
    // the canonical text parses back to the same config
    CHECK(canonical_text(parse(canonical_text(b))) == canonical_text(b));
    CHECK(format_double(0.1) == "0.1");
}

}

TEST_SUITE("model_io") {

TEST_CASE("field round trip and integrity") {
    const fs::path dir = scratch("field");
    const Field& f = small_model().upper().base;
    save_field(f, dir / "u.field");
    const Field g = load_field(dir / "u.field");
    CHECK(g.grid() == f.grid());
    CHECK(g.values() == f.values());
    CHECK(g.iterations() == f.iterations());
    CHECK(g.residual() == f.residual());
    CHECK(g.origin() == f.origin());
    flip_byte(dir / "u.field", 200);
    CHECK_THROWS_AS(load_field(dir / "u.field"), IntegrityError);
    fs::resize_file(dir / "u.field", 10);
    CHECK_THROWS_AS(load_field(dir / "u.field"), IntegrityError);
    CHECK_THROWS_AS(load_field(dir / "missing.field"), IntegrityError);
}

TEST_CASE("models round trip") {
    const fs::path dir = scratch("models");
    const GluedPotential& g = small_model();
    save_models(g, small_config(), dir);
    const GluedPotential r = load_models(dir, small_config());
    CHECK(r.upper().M == g.upper().M);
    CHECK(r.lower().t == g.lower().t);
    CHECK(r.lower().beta == g.lower().beta);
    for (Point z : {Point{0.3, 1.31}, Point{0.71, -1.32}, Point{0.1, 1.0}, Point{0.42, 0.27}}) {
        CHECK(r.evaluate(z) == g.evaluate(z));
    }
    RunConfig other = small_config();
    other.n_max = 1;
    CHECK_THROWS_AS(load_models(dir, other), ConfigError);
    // sampling settings do not touch the stored fields
    RunConfig sampling = small_config();
    sampling.line_samples = 512;
    CHECK_NOTHROW(load_models(dir, sampling));
    flip_byte(dir / "lower.field", 300);
    CHECK_THROWS_AS(load_models(dir, small_config()), IntegrityError);
    fs::remove(dir / "manifest.json");
    CHECK_THROWS_AS(load_models(dir, small_config()), IntegrityError);
}

TEST_CASE("csv exports") {
    const fs::path dir = scratch("csv");
    const GluedPotential& g = small_model();
    const int m = g.cells_per_unit();

    const std::size_t n_glued = export_csv(g, ExportKind::Glued, dir / "glued.csv", 0.4);
    CHECK(n_glued == static_cast<std::size_t>(m) * (2 * 160 + 1));
    const CsvTable t = import_csv(dir / "glued.csv");
    CHECK(t.header == std::vector<std::string>{"x", "y", "value"});
    REQUIRE(t.rows.size() == n_glued);
    std::size_t zeros = 0;
    for (const auto& row : t.rows) {
        REQUIRE(g.evaluate({row[0], row[1]}) == row[2]);
        if (row[1] == 0.0) {
            CHECK(row[2] == 0.0);
            ++zeros;
        }
    }
    CHECK(zeros == static_cast<std::size_t>(m));

    const std::size_t n_upper = export_csv(g, ExportKind::Upper, dir / "upper.csv", 0.4);
    CHECK(n_upper == g.upper().base.grid().size());
    const CsvTable lower_t = [&] {
        export_csv(g, ExportKind::Lower, dir / "lower.csv", 0.4);
        return import_csv(dir / "lower.csv");
    }();
    CHECK(lower_t.rows.size() == g.lower().base.grid().size());
    for (const auto& row : lower_t.rows) CHECK(row[1] <= 0.0);

    const std::size_t n_ann = export_csv(g, ExportKind::Annulus, dir / "annulus.csv", 0.4, 9, 64);
    CHECK(n_ann == 9 * 64);
    const CsvTable a = import_csv(dir / "annulus.csv");
    CHECK(a.header == std::vector<std::string>{"re", "im", "value"});
    const AnnulusPotential pot(g, 0.4);
    for (const auto& row : a.rows) REQUIRE(pot.evaluate({row[0], row[1]}) == row[2]);

    CHECK(parse_export_kind("annulus") == ExportKind::Annulus);
    CHECK_THROWS_AS(parse_export_kind("sideways"), ConfigError);
}

}

TEST_SUITE("cli") {

TEST_CASE("exit codes for bad input") {
    const fs::path dir = scratch("cli");
    {
        std::ofstream(dir / "deep.cfg") << "n_max = 6\n";
    }
    const std::string cfg = (dir / "deep.cfg").string();
    std::vector<std::string> args{"selfsim", "run", "--config", cfg, "--out", (dir / "out").string()};
    std::vector<char*> argv;
    for (auto& s : args) argv.push_back(s.data());
    CHECK(cli_main(static_cast<int>(argv.size()), argv.data()) == kExitConfig);

    std::vector<std::string> bad{"selfsim", "run"};
    std::vector<char*> argv2;
    for (auto& s : bad) argv2.push_back(s.data());
    CHECK(cli_main(static_cast<int>(argv2.size()), argv2.data()) == kExitConfig);

    std::vector<std::string> missing{"selfsim", "verify", "--config", cfg, "--models", (dir / "none").string()};
    {
        std::ofstream(dir / "deep.cfg") << "h = 1/120\nn_max = 2\nmajorant_levels = 2\n";
    }
    std::vector<char*> argv3;
    for (auto& s : missing) argv3.push_back(s.data());
    CHECK(cli_main(static_cast<int>(argv3.size()), argv3.data()) == kExitIntegrity);
}

}
