#include "selfsim/pipeline.hpp"

#include "selfsim/model_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace selfsim {

using nlohmann::json;

namespace {

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

CheckRecord flag_record(const std::string& name, const std::string& quantifier) {
    CheckRecord r;
    r.name = name;
    r.quantifier = quantifier;
    return r;
}

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

Point square_center(const SquareSpec& s) {
    const ExactPoint c = s.center();
    return {to_double(c.re), to_double(c.im)};
}

// Margin of a strict inequality m > 0: zero is moved just below zero.
double strict(double m) { return m > 0.0 ? m : std::nextafter(std::min(m, 0.0), -1.0); }

void geometry_checks(const RunConfig& config, std::vector<CheckRecord>& out) {
    CheckRecord disjoint = flag_record("squares disjoint", "all pairs of S squares, levels <= n_max, both halves");
    for (Family f : {Family::SPlus, Family::SMinus}) {
        const DisjointResult d = check_disjoint(config.n_max, {f});
        disjoint.add(d.disjoint ? 1.0 : -1.0, d.witness ? square_center(d.witness->first) : Point{});
    }
    out.push_back(disjoint);

    const int depth = std::max(6, config.n_max);
    CheckRecord cover = flag_record("projection cover", "levels 0.." + std::to_string(depth) + ", exact intervals");
    for (int n = 0; n <= depth; ++n) {
        const CoverResult c = projection_covers_period(n);
        cover.add(c.covered ? 1.0 : -1.0, {c.gap_start ? to_double(*c.gap_start) : 0.0, 0.0});
    }
    out.push_back(cover);

    // relative excess of the chord length over (4/7) 2^-n
    CheckRecord chord = flag_record("chord length", "random x0 in [0,1) per level 0.." + std::to_string(depth));
    Rng rng(check_seed(config, chord.name));
    for (int s = 0; s < config.inequality_samples; ++s) {
        const int n = static_cast<int>(rng.integer(0, depth));
        const double x0 = rng.uniform();
        const Rational bound = Rational(4, 7) / Rational(std::int64_t{1} << n);
        chord.add(to_double((line_intersection_length(x0, n) - bound) / bound), {x0, static_cast<double>(n)});
    }
    out.push_back(chord);
}

json half_constants(const HalfStripModel& m) {
    return json{{"t", m.t},
                {"M", m.M},
                {"beta", m.beta},
                {"inf_du_dn", m.derivatives.inf_du_dn},
                {"sup_dG_dn", m.derivatives.sup_dg_dn},
                {"green_min_K", m.green_min_k},
                {"iterations", m.base.iterations()},
                {"residual", m.base.residual()}};
}

}  // namespace

std::uint64_t check_seed(const RunConfig& config, const std::string& name) {
    return fnv1a(name.data(), name.size(), config_hash(config));
}

bool Verification::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& r) { return r.pass(); });
}

Verification verify(const GluedPotential& glued, const RunConfig& config) {
    Verification v;
    Stopwatch clock;
    const auto count = static_cast<std::size_t>(config.inequality_samples);
    auto rng_for = [&](const std::string& name) { return Rng(check_seed(config, name)); };

    geometry_checks(config, v.checks);
    v.timing["geometry"] = clock.lap();

    {
        CheckRecord c = flag_record("constants", "M - 1, M1 - 1, t, t1, beta, beta1 > 0");
        for (const HalfStripModel* m : {&glued.upper(), &glued.lower()}) {
            c.add(strict(m->M - 1.0), {});
            c.add(strict(m->t), {});
            c.add(strict(m->beta), {});
        }
        v.checks.push_back(c);
    }

    {
        Rng r = rng_for("periodicity");
        v.checks.push_back(check_periodicity(glued, count, r));
    }
    {
        Rng r = rng_for("intermediate");
        v.checks.push_back(check_intermediate_suite(glued, count, r));
    }
    {
        Rng r = rng_for("selfsimilarity");
        v.checks.push_back(check_selfsimilarity(glued, count, r));
    }
    {
        Rng r = rng_for("negative");
        v.checks.push_back(check_negative_bounds(glued, Half::Upper, count, r));
    }
    {
        Rng r = rng_for("u1negative");
        v.checks.push_back(check_negative_bounds(glued, Half::Lower, count, r));
    }
    {
        Rng r = rng_for("sign structure");
        v.checks.push_back(check_sign_structure(glued, count, r));
    }
    {
        Rng r = rng_for("continuity");
        v.checks.push_back(check_continuity(glued, count, r));
    }
    v.timing["inequalities"] = clock.lap();

    {
        SubharmonicOptions so;
        so.circle_samples = config.circle_samples;
        so.domain_points = static_cast<std::size_t>(config.domain_points);
        so.square_points = static_cast<std::size_t>(config.square_points);
        so.boundary_points = static_cast<std::size_t>(config.boundary_points);
        so.axis_points = static_cast<std::size_t>(config.axis_points);
        Rng r = rng_for("subharmonic");
        for (auto& rec : check_subharmonic(glued, so, r)) v.checks.push_back(std::move(rec));
    }
    v.timing["subharmonic"] = clock.lap();

    {
        const SolverOptions solver = assembly_options(config).solver;
        CheckRecord decreasing = flag_record("majorant decreasing", "sup|v_n - u| strictly decreasing in n");
        std::vector<double> sups;
        json sup_json = json::array();
        for (int n = 0; n <= config.majorant_levels; ++n) {
            MajorantResult m = check_majorant(glued, n, solver);
            v.checks.push_back(std::move(m.dominates));
            v.checks.push_back(std::move(m.axis));
            if (!sups.empty()) {
                decreasing.add(strict(sups.back() - m.sup_difference), {static_cast<double>(n), 0.0});
            }
            sups.push_back(m.sup_difference);
            sup_json.push_back(m.sup_difference);
        }
        if (sups.size() > 1) v.checks.push_back(decreasing);
        v.constants["majorant_sup_difference"] = sup_json;
    }
    v.timing["majorants"] = clock.lap();

    {
        Rng r = rng_for("decay lines");
        const auto lines = decay_lines(config.n_max, static_cast<std::size_t>(config.line_samples), r);
        v.decay = decay_table(glued, lines, config.slack);
        CheckRecord bound = flag_record("decay bound", "relative excess of a_n over (1 - slack) bound, n <= n_max");
        for (const DecayRow& row : v.decay.rows) {
            const double target = row.bound * (1.0 - config.slack);
            bound.add((row.a_n - target) / target, {row.worst_x0, static_cast<double>(row.n)});
        }
        v.checks.push_back(bound);
        CheckRecord shape = flag_record("decay lines", "chord length and E_n <= K_n <= 0 on every line");
        shape.add(v.decay.chords_ok ? 1.0 : -1.0, {});
        shape.add(v.decay.ordered ? 1.0 : -1.0, {});
        v.checks.push_back(shape);
        CheckRecord base = flag_record("decay base", "c > 1");
        base.add(strict(v.decay.c - 1.0), {});
        v.checks.push_back(base);
    }
    v.timing["decay"] = clock.lap();

    {
        const AnnulusPotential pot(glued, config.epsilon);
        CheckRecord bounded = flag_record("annulus bounded", "sup w and inf w finite, inf w <= 0");
        const double sup_w = pot.sup();
        const double inf_w = pot.inf();
        bounded.add(std::isfinite(sup_w) && std::isfinite(inf_w) && inf_w <= 0.0 ? 1.0 : -1.0, {});
        v.checks.push_back(bounded);

        PropertyTwo p2 = check_property_ii(pot, v.decay.c, config.radii_samples, config.slack);
        v.checks.push_back(p2.record);
        v.checks.push_back(p2.consistency);
        Rng rc = rng_for("components");
        for (auto& rec : check_components(pot, static_cast<std::size_t>(config.annulus_samples), rc)) {
            v.checks.push_back(std::move(rec));
        }
        Rng rs = rng_for("annulus subharmonic");
        for (auto& rec : check_annulus_subharmonic(pot, static_cast<std::size_t>(config.annulus_samples),
                                                   config.circle_samples, rs)) {
            v.checks.push_back(std::move(rec));
        }
        v.checks.push_back(check_chart_agreement(pot, static_cast<std::size_t>(config.annulus_samples)));

        json rows = json::array();
        for (const PropertyTwoRow& row : p2.rows) {
            rows.push_back(json{{"r", row.r}, {"n", row.n}, {"integral", row.integral}, {"delta", row.delta},
                                {"pass", row.pass}});
        }
        v.constants["a_out"] = pot.a_out();
        v.constants["lambda"] = pot.lambda();
        v.constants["sup_w"] = sup_w;
        v.constants["inf_w"] = inf_w;
        v.constants["interface_slope"] = pot.slope().sup_inner;
        v.constants["property_ii"] = rows;
    }
    v.timing["annulus"] = clock.lap();

    const HalfStripModel& up = glued.upper();
    const HalfStripModel& lo = glued.lower();
    v.constants["t"] = up.t;
    v.constants["M"] = up.M;
    v.constants["beta"] = up.beta;
    v.constants["t1"] = lo.t;
    v.constants["M1"] = lo.M;
    v.constants["beta1"] = lo.beta;
    v.constants["beta_tilde"] = glued.beta_min();
    v.constants["M_tilde"] = glued.M_max();
    v.constants["c"] = v.decay.c;
    v.constants["c_predicted"] = v.decay.c_predicted;
    v.constants["green_cap"] = up.green.cap;
    v.constants["value_resolution"] = glued.resolution();
    v.constants["upper"] = half_constants(up);
    v.constants["lower"] = half_constants(lo);
    return v;
}

json record_json(const CheckRecord& r) {
    return json{{"name", r.name},
                {"quantifier", r.quantifier},
                {"margin", r.worst_margin},
                {"tolerance", r.tolerance},
                {"pass", r.pass()},
                {"verdict", verdict_name(r.verdict())},
                {"witness", json::array({r.witness.real(), r.witness.imag()})},
                {"samples", r.samples},
                {"violations", r.violations}};
}

json config_json(const RunConfig& c) {
    json j;
    std::istringstream in(canonical_text(c));
    for (std::string line; std::getline(in, line);) {
        const auto eq = line.find(" = ");
        j[line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["hash"] = hex(config_hash(c));
    return j;
}

json make_report(const RunConfig& config, const Verification& v) {
    json checks = json::array();
    for (const CheckRecord& r : v.checks) checks.push_back(record_json(r));
    json rows = json::array();
    for (const DecayRow& row : v.decay.rows) {
        rows.push_back(json{{"n", row.n}, {"a_n", row.a_n}, {"bound", row.bound}, {"worst_x0", row.worst_x0},
                            {"pass", row.pass}});
    }
    json decay{{"rows", rows},
               {"c", v.decay.c},
               {"c_predicted", v.decay.c_predicted},
               {"lines", v.decay.lines},
               {"anomalies", v.decay.anomalies}};
    return json{{"config", config_json(config)},
                {"constants", v.constants},
                {"checks", checks},
                {"decay", decay},
                {"timing", v.timing},
                {"pass", v.pass()}};
}

std::string deterministic_text(const json& report) {
    json copy = report;
    copy.erase("timing");
    return copy.dump(2);
}

}  // namespace selfsim
