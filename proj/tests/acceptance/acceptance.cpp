// Acceptance criteria 1-10. Each criterion prints its measurements and one
// line "criterion N: PASS" or "criterion N: FAIL".
//
//   acceptance --setup --work DIR        solve and store the h = 1/480 and
//                                        h = 1/960 models used below
//   acceptance --criterion N --work DIR  run one criterion (0 runs all)

#include "selfsim/annulus.hpp"
#include "selfsim/assembler.hpp"
#include "selfsim/cli.hpp"
#include "selfsim/config.hpp"
#include "selfsim/model_io.hpp"
#include "selfsim/pipeline.hpp"

#include "../oracles/green_series.hpp"
#include "../oracles/walk_on_spheres.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace selfsim;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path g_work;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunConfig config_480() { return RunConfig{}; }

// Constants and line integrals do not depend on the corner windows.
RunConfig config_960() {
    RunConfig c;
    c.cells_per_unit = 960;
    c.corner_refinement = 1;
    return c;
}

GluedPotential load(const std::string& name, const RunConfig& c) { return load_models(g_work / name, c); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

bool report(int n, bool ok) {
    std::printf("criterion %d: %s\n", n, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
    return ok;
}

void show(const CheckRecord& r) {
    std::printf("  %-40s %-22s margin %.4e tol %.3e samples %zu violations %zu\n", r.name.c_str(),
                verdict_name(r.verdict()), r.worst_margin, r.tolerance, r.samples, r.violations);
}

bool clean(const CheckRecord& r) { return r.pass() && r.violations == 0; }

// ---------------------------------------------------------------------------

bool criterion1() {
    // 4/3 must be a lattice line: 258 is the nearest multiple of 3 above 256
    const int m = 258;
    DirichletProblem problem = make_half_strip_problem(make_period_cell(Half::Upper, -1), m);
    // the default linear guess is already the answer; start from zero instead
    for (std::size_t k = 0; k < problem.values.size(); ++k) {
        if (problem.roles[k] == NodeRole::Interior) problem.values[k] = 0.0;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const Field f = solve_dirichlet(problem, SolverOptions{});
    const double secs = seconds_since(t0);
    const Grid& g = f.grid();
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) worst = std::max(worst, std::abs(f.at(i, j) - 0.75 * g.y(j)));
    std::printf("  h = 1/%d, max node error %.3e, %d iterations, %.2f s\n", m, worst, f.iterations(), secs);
    return report(1, worst <= 1e-6 && secs <= 30.0);
}

bool criterion2() {
    const int m = 480;
    const double h = 1.0 / m;
    const auto t0 = std::chrono::steady_clock::now();
    const GreenFunction green = green_square(m, SolverOptions{});
    std::vector<Point> probes{{0.15, 0.1}};
    Rng rng(2024);
    while (probes.size() < 20) {
        const Point w{rng.uniform(-0.29, 0.29), rng.uniform(-0.29, 0.29)};
        if (std::abs(w) >= 0.1) probes.push_back(w);
    }
    bool ok = true;
    double worst_ratio = 0.0;
    for (Point w : probes) {
        const oracle::SeriesValue s = oracle::green_series(w.real(), w.imag(), 0.6, 4001);
        const double err = std::abs(green.value(w) - s.value);
        const double tol = 5 * h * h + s.tail;
        worst_ratio = std::max(worst_ratio, err / tol);
        ok = ok && err <= tol;
    }
    const double secs = seconds_since(t0);
    std::printf("  20 probes, worst error / (5h^2 + tail) = %.3f, %.2f s\n", worst_ratio, secs);
    return report(2, ok && secs <= 60.0);
}

bool criterion3() {
    const GluedPotential g = load("m480", config_480());
    const Field& base = g.upper().base;
    const double h = g.h();
    const oracle::PerforatedStrip strip(g.n_max());
    const Point probes[] = {{0.5, 0.675}, {0.5, 0.9}, {0.1, 1.32}, {0.5, 1.2}, {0.2, 0.6}};
    bool ok = true;
    std::uint64_t seed = 77;
    for (Point p : probes) {
        if (strip.inside_square(p.real(), p.imag()) || locate_square(p, {Family::SPlus}, g.n_max())) {
            std::printf("  probe (%g, %g) is not in the perforated domain\n", p.real(), p.imag());
            ok = false;
            continue;
        }
        const oracle::WosEstimate e = strip.estimate(p.real(), p.imag(), 1000000, 1e-7, seed++);
        const double u = base.interpolate(p.real(), p.imag());
        const double bound = 3 * e.sigma + 10 * h * h;
        std::printf("  (%g, %g): grid %.6f  walks %.6f +- %.6f  |diff| %.2e  bound %.2e\n", p.real(), p.imag(), u,
                    e.mean, e.sigma, std::abs(u - e.mean), bound);
        ok = ok && std::abs(u - e.mean) <= bound;
    }
    return report(3, ok);
}

bool criterion4() {
    const GluedPotential a = load("m480", config_480());
    const GluedPotential b = load("m960", config_960());
    struct Item {
        const char* name;
        double coarse, fine;
    };
    const Item items[] = {{"M", a.upper().M, b.upper().M},         {"M1", a.lower().M, b.lower().M},
                          {"t", a.upper().t, b.upper().t},         {"beta", a.upper().beta, b.upper().beta},
                          {"beta1", a.lower().beta, b.lower().beta}, {"t1", a.lower().t, b.lower().t}};
    bool ok = a.upper().M > 1 && a.lower().M > 1 && b.upper().M > 1 && b.lower().M > 1;
    for (const Item& it : items) {
        const double r = rel(it.coarse, it.fine);
        std::printf("  %-5s h=1/480 %.6e  h=1/960 %.6e  rel %.3e\n", it.name, it.coarse, it.fine, r);
        if (std::string(it.name) != "t1") ok = ok && r <= 0.01;
    }
    return report(4, ok);
}

bool criterion5() {
    const RunConfig c = config_480();
    const GluedPotential g = load("m480", c);
    const std::size_t n = 10000;
    bool ok = true;
    auto run = [&](const std::string& seed_name, const std::function<CheckRecord(Rng&)>& f) {
        Rng rng(check_seed(c, seed_name));
        const CheckRecord r = f(rng);
        show(r);
        ok = ok && clean(r) && r.samples >= n;
    };
    run("periodicity", [&](Rng& r) { return check_periodicity(g, n, r); });
    run("intermediate", [&](Rng& r) { return check_intermediate_suite(g, n, r); });
    run("selfsimilarity", [&](Rng& r) { return check_selfsimilarity(g, n, r); });
    run("negative", [&](Rng& r) { return check_negative_bounds(g, Half::Upper, n, r); });
    run("u1negative", [&](Rng& r) { return check_negative_bounds(g, Half::Lower, n, r); });
    return report(5, ok);
}

bool criterion6() {
    const RunConfig c = config_480();
    const GluedPotential g = load("m480", c);
    SubharmonicOptions so;
    Rng rng(check_seed(c, "subharmonic"));
    const auto recs = check_subharmonic(g, so, rng);
    bool ok = true;
    std::size_t points = 0;
    for (const CheckRecord& r : recs) {
        show(r);
        ok = ok && clean(r);
        points += r.samples / so.radii_cells.size();
    }
    std::printf("  %zu points x radii {2h,4h,8h}\n", points);
    ok = ok && points >= 10000;
    double prev = INFINITY;
    for (int n = 0; n <= 3; ++n) {
        const MajorantResult m = check_majorant(g, n, assembly_options(c).solver);
        show(m.dominates);
        show(m.axis);
        std::printf("  sup|v_%d - u| = %.6e\n", n, m.sup_difference);
        ok = ok && clean(m.dominates) && m.axis.worst_margin > 0.0 && m.sup_difference < prev;
        prev = m.sup_difference;
    }
    return report(6, ok);
}

bool criterion7() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    for (int n = 0; n <= 6; ++n) ok = ok && projection_covers_period(n).covered;
    Rng rng(7);
    Rational worst{1000};
    for (int s = 0; s < 10000; ++s) {
        const int n = static_cast<int>(rng.integer(0, 6));
        const double x0 = rng.uniform();
        const Rational bound = Rational(4, 7) / Rational(std::int64_t{1} << n);
        const Rational ratio = line_intersection_length(x0, n) / bound;
        worst = std::min(worst, ratio);
    }
    const double secs = seconds_since(t0);
    std::printf("  exact cover n <= 6: %s; min chord / ((4/7) 2^-n) over 10^4 lines = %s; %.3f s\n",
                ok ? "yes" : "no", (std::to_string(worst.numerator()) + "/" + std::to_string(worst.denominator())).c_str(),
                secs);
    return report(7, ok && worst >= Rational(1) && secs <= 1.0);
}

bool criterion8() {
    const RunConfig c = config_480();
    const GluedPotential g = load("m480", c);
    Rng r1(check_seed(c, "decay lines"));
    const DecayTable t = decay_table(g, decay_lines(c.n_max, 256, r1), 0.1);
    bool ok = t.chords_ok && t.ordered && t.c > 1.0;
    for (const DecayRow& row : t.rows) {
        std::printf("  n=%d  a_n %.4e  0.9 bound %.4e  %s\n", row.n, row.a_n, 0.9 * row.bound, row.pass ? "ok" : "FAILS");
        ok = ok && row.pass;
    }
    Rng r2(check_seed(c, "decay lines"));
    const DecayTable t2 = decay_table(g, decay_lines(c.n_max, 512, r2), 0.1);
    const RunConfig cf = config_960();
    const GluedPotential gf = load("m960", cf);
    Rng r3(check_seed(c, "decay lines"));
    const DecayTable tf = decay_table(gf, decay_lines(c.n_max, 256, r3), 0.1);
    std::printf("  c = %.6e (256 lines), %.6e (512 lines), %.6e (h = 1/960); 2M~ = %.4e\n", t.c, t2.c, tf.c,
                t.c_predicted);
    ok = ok && rel(t2.c, t.c) <= 0.05 && rel(tf.c, t.c) <= 0.05;
    return report(8, ok);
}

bool criterion9() {
    const RunConfig c = config_480();
    const GluedPotential g = load("m480", c);
    Rng rl(check_seed(c, "decay lines"));
    const DecayTable t = decay_table(g, decay_lines(c.n_max, c.line_samples, rl), c.slack);
    const AnnulusPotential pot(g, c.epsilon);
    std::printf("  sup w = %.6e  inf w = %.6e  a_out = %.4f  lambda = %.5f\n", pot.sup(), pot.inf(), pot.a_out(),
                pot.lambda());
    bool ok = std::isfinite(pot.sup()) && std::isfinite(pot.inf());
    Rng rs(check_seed(c, "annulus subharmonic"));
    bool rays = false;
    for (const CheckRecord& r : check_annulus_subharmonic(pot, 2000, 64, rs)) {
        show(r);
        ok = ok && clean(r);
        rays = rays || r.name.find("interface") != std::string::npos;
    }
    Rng rc(check_seed(c, "components"));
    for (const CheckRecord& r : check_components(pot, 2000, rc)) {
        show(r);
        ok = ok && clean(r);
    }
    const PropertyTwo p = check_property_ii(pot, t.c, 50, 0.1);
    show(p.record);
    show(p.consistency);
    std::size_t radii = 0;
    for (const PropertyTwoRow& row : p.rows) radii += row.n == 0;
    ok = ok && rays && radii == 50 && clean(p.record) && clean(p.consistency) && g.n_max() >= 4;
    return report(9, ok);
}

// --- criterion 10: the command line contract -------------------------------

std::string g_cli;

struct Outcome {
    int code = -1;
    std::string err;
};

Outcome cli(const std::string& args) {
    const fs::path err = g_work / "stderr.txt";
    const std::string cmd = "\"" + g_cli + "\" " + args + " > /dev/null 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(err);
    o.err.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return o;
}

fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = g_work / name;
    std::ofstream(p) << text;
    return p;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

bool criterion10() {
    bool ok = true;
    auto expect = [&](const char* what, bool cond) {
        std::printf("  %-58s %s\n", what, cond ? "ok" : "FAILS");
        ok = ok && cond;
    };
    const fs::path def = write_config("default.cfg", "# defaults\nh = 1/480\n");
    const std::string a = (g_work / "runA").string(), b = (g_work / "runB").string();
    fs::remove_all(a);
    fs::remove_all(b);

    const Outcome ra = cli("run --config \"" + def.string() + "\" --out \"" + a + "\"");
    expect("run (defaults) exits 0", ra.code == 0);
    const Outcome rb = cli("run --config \"" + def.string() + "\" --out \"" + b + "\" --no-export");
    expect("second run exits 0", rb.code == 0);
    if (ra.code != 0 || rb.code != 0) return report(10, false);

    const json ja = read_json(fs::path(a) / "report.json");
    const json jb = read_json(fs::path(b) / "report.json");
    expect("identical configs give identical reports (modulo timing)", deterministic_text(ja) == deterministic_text(jb));
    for (const char* key : {"config", "constants", "checks", "decay", "pass", "timing"}) {
        if (!ja.contains(key)) expect((std::string("report has key ") + key).c_str(), false);
    }
    const json& first = ja["checks"].front();
    expect("check records carry name, margin, tolerance, pass, witness",
           first.contains("name") && first.contains("margin") && first.contains("tolerance") && first.contains("pass") &&
               first.contains("witness"));
    expect("exports written", fs::exists(fs::path(a) / "glued.csv") && fs::exists(fs::path(a) / "annulus.csv") &&
                                  fs::exists(fs::path(a) / "upper.csv") && fs::exists(fs::path(a) / "lower.csv"));

    const fs::path vrep = g_work / "verifyA.json";
    const Outcome va = cli("verify --config \"" + def.string() + "\" --models \"" + a + "/models\" --out \"" +
                           vrep.string() + "\"");
    expect("verify exits 0", va.code == 0);
    if (va.code == 0) {
        const json jv = read_json(vrep);
        expect("run then verify: byte-identical check section", jv["checks"].dump() == ja["checks"].dump());
    }

    const fs::path dbl = write_config("lines512.cfg", "h = 1/480\nline_samples = 512\n");
    const fs::path vrep2 = g_work / "verify512.json";
    const Outcome v2 = cli("verify --config \"" + dbl.string() + "\" --models \"" + a + "/models\" --out \"" +
                           vrep2.string() + "\"");
    if (v2.code == 0 || v2.code == 3) {
        const json j2 = read_json(vrep2);
        std::map<std::string, bool> flags;
        for (const json& r : ja["checks"]) flags[r["name"].get<std::string>()] = r["pass"].get<bool>();
        bool same = j2["checks"].size() == ja["checks"].size();
        for (const json& r : j2["checks"]) same = same && flags.count(r["name"]) && flags[r["name"]] == r["pass"].get<bool>();
        const double c1 = ja["decay"]["c"].get<double>(), c2 = j2["decay"]["c"].get<double>();
        std::printf("  c = %.6e (256 lines)  %.6e (512 lines)\n", c1, c2);
        expect("doubled line samples: same pass flags", same);
        expect("doubled line samples: c within 5%", rel(c2, c1) <= 0.05);
    } else {
        expect("verify with doubled line samples runs", false);
    }

    const fs::path tampered = g_work / "tampered";
    fs::remove_all(tampered);
    fs::copy(fs::path(a) / "models", tampered);
    {
        std::fstream f(tampered / "upper.field", std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(4096);
        f.put('\x7f');
    }
    const Outcome vt = cli("verify --config \"" + def.string() + "\" --models \"" + tampered.string() + "\"");
    expect("tampered model file exits 4 (checksum)", vt.code == kExitIntegrity && vt.err.find("checksum") != std::string::npos);

    const fs::path deep = write_config("deep.cfg", "h = 1/480\nn_max = 6\n");
    const Outcome rd = cli("run --config \"" + deep.string() + "\" --out \"" + (g_work / "deep").string() + "\"");
    expect("h too coarse for N_max = 6 exits 1 naming the bound",
           rd.code == kExitConfig && rd.err.find("resolution bound") != std::string::npos);

    const fs::path stall = write_config("stall.cfg", "h = 1/480\ntol = 1e-30\nmax_iterations = 10\n");
    const Outcome rs = cli("run --config \"" + stall.string() + "\" --out \"" + (g_work / "stall").string() + "\"");
    expect("tol = 1e-30 with 10 iterations exits 2", rs.code == kExitSolver);

    // without the corner windows the sub-mean test fails at the reentrant corners
    const fs::path nopatch = write_config("nopatch.cfg", "h = 1/480\ncorner_refinement = 1\n");
    const Outcome rf = cli("run --config \"" + nopatch.string() + "\" --out \"" + (g_work / "nopatch").string() +
                           "\" --no-export");
    expect("a failing check exits 3", rf.code == kExitCheck);

    return report(10, ok);
}

void setup() {
    fs::create_directories(g_work);
    for (const auto& [name, cfg] : {std::pair{"m480", config_480()}, std::pair{"m960", config_960()}}) {
        const auto t0 = std::chrono::steady_clock::now();
        const GluedPotential g = build_glued(assembly_options(cfg));
        save_models(g, cfg, g_work / name);
        std::printf("stored %s (%.1f s)\n", name, seconds_since(t0));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int criterion = 0;
    bool do_setup = false;
    std::string work;
    app.add_option("--criterion", criterion, "criterion number, 0 for all")->check(CLI::Range(0, 10));
    app.add_flag("--setup", do_setup, "solve and store the models");
    app.add_option("--work", work, "working directory")->required();
    app.add_option("--cli", g_cli, "path of the selfsim executable");
    CLI11_PARSE(app, argc, argv);
    g_work = work;
    try {
        if (do_setup) {
            setup();
            return 0;
        }
        const std::function<bool()> all[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                             criterion6, criterion7, criterion8, criterion9, criterion10};
        bool ok = true;
        for (int n = 1; n <= 10; ++n) {
            if (criterion == 0 || criterion == n) ok = all[n - 1]() && ok;
        }
        return ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::printf("error: %s\n", e.what());
        if (criterion > 0) report(criterion, false);
        return 1;
    }
}
