#include "selfsim/cli.hpp"

#include "selfsim/model_io.hpp"
#include "selfsim/pipeline.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace selfsim {

namespace fs = std::filesystem;

namespace {

RunConfig read_config(const std::string& path) {
    RunConfig c = path.empty() ? RunConfig{} : load_config(path);
    validate(c);
    return c;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IntegrityError("cannot create " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path);
    if (!out) throw IntegrityError("cannot write " + path.string());
    out << text;
    if (!out) throw IntegrityError("write failed for " + path.string());
}

void print_summary(const Verification& v) {
    for (const CheckRecord& r : v.checks) {
        std::printf("%-22s %-40s margin %.6e  tol %.3e\n", verdict_name(r.verdict()), r.name.c_str(), r.worst_margin,
                    r.tolerance);
    }
    std::printf("c = %.6e (2 M~ = %.6e)\n", v.decay.c, v.decay.c_predicted);
    std::printf("overall: %s\n", v.pass() ? "PASS" : "FAIL");
}

int finish(const RunConfig& config, const Verification& v, double build_seconds, const fs::path& report_path) {
    nlohmann::json report = make_report(config, v);
    report["timing"]["build"] = build_seconds;
    write_text(report_path, report.dump(2) + "\n");
    print_summary(v);
    std::printf("report: %s\n", report_path.string().c_str());
    return v.pass() ? kExitOk : kExitCheck;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const char* export_name(ExportKind k) {
    switch (k) {
        case ExportKind::Upper: return "upper";
        case ExportKind::Lower: return "lower";
        case ExportKind::Glued: return "glued";
        case ExportKind::Annulus: return "annulus";
    }
    return "";
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Self-similar subharmonic function on a strip: construction and verification"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool no_export = false;
    auto* run = app.add_subcommand("run", "solve, assemble, verify and write the report, models and exports");
    run->add_option("--config", config_path, "configuration file (key = value)")->required();
    run->add_option("--out", out_dir, "output directory (default: output_dir of the config)");
    run->add_flag("--no-export", no_export, "skip the CSV exports");

    std::string models_dir;
    std::string report_path;
    auto* ver = app.add_subcommand("verify", "re-run the checks against stored models");
    ver->add_option("--config", config_path, "configuration file")->required();
    ver->add_option("--models", models_dir, "directory written by run (models/)")->required();
    ver->add_option("--out", report_path, "report path (default: <models>/verify_report.json)");

    std::string which;
    std::string export_path;
    auto* exp = app.add_subcommand("export", "write one field as CSV");
    exp->add_option("--which", which, "upper, lower, glued or annulus")->required();
    exp->add_option("--out", export_path, "CSV file")->required();
    exp->add_option("--config", config_path, "configuration file (defaults when absent)");
    exp->add_option("--models", models_dir, "stored models; solved afresh when absent");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) {
            const RunConfig config = read_config(config_path);
            const fs::path out = out_dir.empty() ? fs::path(config.output_dir) : fs::path(out_dir);
            const auto start = std::chrono::steady_clock::now();
            const GluedPotential glued = build_glued(assembly_options(config));
            const double build_seconds = seconds_since(start);
            save_models(glued, config, out / "models");
            if (!no_export) {
                for (ExportKind k : {ExportKind::Upper, ExportKind::Lower, ExportKind::Glued, ExportKind::Annulus}) {
                    export_csv(glued, k, out / (std::string(export_name(k)) + ".csv"), config.epsilon);
                }
            }
            const Verification v = verify(glued, config);
            return finish(config, v, build_seconds, out / "report.json");
        }
        if (*ver) {
            const RunConfig config = read_config(config_path);
            const auto start = std::chrono::steady_clock::now();
            const GluedPotential glued = load_models(models_dir, config);
            const double build_seconds = seconds_since(start);
            const Verification v = verify(glued, config);
            const fs::path path = report_path.empty() ? fs::path(models_dir) / "verify_report.json" : fs::path(report_path);
            return finish(config, v, build_seconds, path);
        }
        const ExportKind kind = parse_export_kind(which);
        const RunConfig config = read_config(config_path);
        std::optional<GluedPotential> glued;
        if (models_dir.empty()) glued.emplace(build_glued(assembly_options(config)));
        else glued.emplace(load_models(models_dir, config));
        const std::size_t rows = export_csv(*glued, kind, export_path, config.epsilon);
        std::printf("%zu rows written to %s\n", rows, export_path.c_str());
        return kExitOk;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    } catch (const IntegrityError& e) {
        std::fprintf(stderr, "integrity error: %s\n", e.what());
        return kExitIntegrity;
    } catch (const GridAlignmentError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }
}

}  // namespace selfsim
