// kpzlab: exponent queries, spectrum tables, simulation campaigns and the
// verification suite.  Exit codes: 0 ok, 1 usage, 2 domain error,
// 3 verification failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "kpzlab/errors.hpp"
#include "kpzlab/harmonic.hpp"
#include "kpzlab/manifest.hpp"
#include "kpzlab/models.hpp"
#include "kpzlab/percsim.hpp"
#include "kpzlab/slesim.hpp"
#include "kpzlab/spectra.hpp"
#include "kpzlab/verify.hpp"
#include "kpzlab/walksim.hpp"

using namespace kpz;

namespace {

constexpr int exit_usage = 1, exit_domain = 2, exit_verify = 3;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ModelFlags {
    std::optional<double> c, kappa, g, q, n;
    std::string phase;
    bool tricritical = false;

    void add(CLI::App* app) {
        auto oc = app->add_option("--c", c, "central charge");
        auto ok = app->add_option("--kappa", kappa, "SLE parameter");
        auto og = app->add_option("--g", g, "Coulomb-gas coupling");
        auto oq = app->add_option("--Q", q, "Potts state number");
        auto on = app->add_option("--N", n, "O(N) loop fugacity");
        std::vector<CLI::Option*> all{oc, ok, og, oq, on};
        for (auto* a : all)
            for (auto* b : all)
                if (a != b) a->excludes(b);
        app->add_option("--phase", phase, "dilute or dense, for --c and --N")->check(CLI::IsMember({"dilute", "dense"}));
        app->add_flag("--tricritical", tricritical, "tricritical Potts branch, for --Q");
    }

    bool given() const { return c || kappa || g || q || n; }

    std::optional<Phase> parsed_phase() const {
        if (phase.empty()) return std::nullopt;
        return phase == "dense" ? Phase::Dense : Phase::Dilute;
    }

    ModelPoint model() const {
        if (c) return model_point(ByCentralCharge{*c, parsed_phase()});
        if (kappa) return model_point(ByKappa{*kappa});
        if (g) return model_point(ByCoupling{*g});
        if (q) return model_point(ByPotts{*q, tricritical ? PottsBranch::Tricritical : PottsBranch::Critical});
        if (n) {
            if (!parsed_phase()) throw UsageError("--N needs --phase dilute|dense");
            return model_point(ByLoopFugacity{*n, *parsed_phase()});
        }
        throw UsageError("a model selector is required: one of --c, --kappa, --g, --Q, --N");
    }

    // kappa or c, defaulting when no selector is given
    double kappa_or(double fallback) const { return kappa ? *kappa : given() ? model().kappa : fallback; }
    double c_or(double fallback) const { return c ? *c : given() ? model().c : fallback; }
};

Json model_json(const ModelPoint& m) {
    Json j{{"c", m.c}, {"gamma", m.gamma}, {"gamma_dual", m.gamma_dual}, {"g", m.g}, {"kappa", m.kappa},
           {"phase", to_string(m.phase)}};
    if (m.n_loop) j["N"] = *m.n_loop;
    if (m.q_potts) j["Q"] = *m.q_potts;
    return j;
}

struct OutputFlags {
    std::string out;
    std::string format;
    std::uint64_t seed = 0;
    unsigned threads = 0;

    void add(CLI::App* app, const std::string& default_format, bool seeded) {
        format = default_format;
        app->add_option("--out", out, "output path prefix");
        app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        if (seeded) {
            app->add_option("--seed", seed, "64-bit seed");
            app->add_option("--threads", threads, "worker threads (0: available parallelism)");
        }
    }
};

std::string command_line(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        std::string a = argv[i];
        s += a.find_first_of(" \t\"'") == std::string::npos ? a : Json(a).dump();
    }
    return s;
}

// every option of the subcommand with its given or default value
Json echo_options(const CLI::App* app) {
    Json j = Json::object();
    for (const auto* o : app->get_options()) {
        const std::string name = o->get_single_name();
        if (name.empty() || name == "help") continue;
        if (o->count() == 0) {
            if (!o->get_default_str().empty()) j[name] = o->get_default_str();
            continue;
        }
        const auto& r = o->results();
        if (r.size() == 1) j[name] = r[0];
        else j[name] = r;
    }
    return j;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

class Emitter {
public:
    Emitter(RunManifest m) : manifest_(std::move(m)), t0_(std::chrono::steady_clock::now()) {}

    RunManifest& manifest() { return manifest_; }

    // JSON documents carry the manifest; a CSV file gets a sibling
    // <prefix>.manifest.json (on stdout, the manifest goes to stderr)
    void emit(const OutputFlags& f, Json doc, const CsvTable& csv, bool both_with_prefix = false) {
        manifest_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        doc["manifest"] = manifest_.to_json();
        const bool json = f.format == "json";
        if (f.out.empty()) {
            if (json) {
                std::cout << dump_json(doc) << "\n";
            } else {
                std::cout << csv.str();
                std::cerr << dump_json(manifest_.to_json()) << "\n";
            }
            return;
        }
        if (json || both_with_prefix) write_file(f.out + ".json", dump_json(doc) + "\n");
        if (!json || both_with_prefix) {
            write_file(f.out + ".csv", csv.str());
            write_file(f.out + ".manifest.json", dump_json(manifest_.to_json()) + "\n");
        }
    }

private:
    RunManifest manifest_;
    std::chrono::steady_clock::time_point t0_;
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("not a number list: " + s);
        }
    }
    if (v.empty()) throw UsageError("empty list");
    return v;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> v;
    for (double x : parse_list(s)) {
        if (x != std::floor(x)) throw UsageError("not an integer list: " + s);
        v.push_back(int(x));
    }
    return v;
}

// --- exponents -----------------------------------------------------------------

const std::vector<std::string> selectors{"zeta", "packet", "copolymer", "perc", "watermelon", "dims", "sle-moment",
                                         "disconnection", "double-sided", "winding", "sde", "kac", "cpa"};

struct ExponentArgs {
    std::string selector;
    ModelFlags model;
    OutputFlags out;
    double L = 1, n = 0, n1 = 0, n2 = 0, xa = 0, xb = 0, p = 1, q = 1;
    int l = 1, k = 1, j = 0, sides = 1, pinched = 0;
    std::string packets, legs, frame = "planar";
    bool boundary = false, subtracted = false;
};

struct Answer {
    Json values = Json::object();
    std::string formula;
    Json model;
};

Answer exponent(const ExponentArgs& a) {
    const Locus locus = a.boundary ? Locus::Boundary : Locus::Bulk;
    auto whole = [](double x, const char* name) {
        if (x != std::floor(x)) throw UsageError(std::string(name) + " must be an integer here");
        return int(x);
    };
    Answer r;
    const auto& s = a.selector;
    if (s == "zeta") {
        if (!a.packets.empty()) {
            const auto counts = parse_int_list(a.packets);
            r.values["zeta"] = packet_zeta(counts, locus);
            r.formula = a.boundary ? "U(sum of U^-1(n_i)) over packets" : "V(sum of U^-1(n_i)) over packets";
        } else {
            r.values["zeta"] = brownian_zeta(a.L, locus);
            r.formula = a.boundary ? "L(1 + 2L)/3" : "(4L^2 - 1)/24";
        }
    } else if (s == "packet") {
        if (a.packets.empty()) throw UsageError("packet needs --packets n1,n2,...");
        r.values["zeta"] = packet_zeta(parse_int_list(a.packets), locus);
        r.formula = a.boundary ? "U(sum of U^-1(n_i))" : "V(sum of U^-1(n_i))";
    } else if (s == "copolymer") {
        StarSpec star;
        star.strands = whole(a.L, "--L");
        star.locus = locus;
        star.pinched_pairs = a.pinched;
        if (!a.legs.empty()) {
            std::stringstream in(a.legs);
            std::string item;
            while (std::getline(in, item, ',')) {
                const auto colon = item.find(':');
                if (colon == std::string::npos) throw UsageError("--legs takes n:m pairs, e.g. 1:0,0:1");
                star.packets.push_back({std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1))});
            }
        }
        r.values["x"] = copolymer_star(star);
        r.formula = a.boundary ? "U(sum of U^-1 over RW and SAW legs)" : "2V(sum of U^-1 over RW and SAW legs)";
    } else if (s == "perc") {
        r.values["x"] = perc_crossing(a.l, locus);
        r.formula = a.boundary ? "l(l + 1)/6" : "(l^2 - 1)/12";
    } else if (s == "watermelon") {
        const auto m = a.model.model();
        const Frame fr = a.frame == "qg" ? Frame::QuantumGravity : Frame::Planar;
        const auto w = watermelon(m, whole(a.L, "--L"), locus, fr);
        r.values["x"] = w.value;
        if (w.dual) r.values["dual"] = *w.dual;
        r.model = model_json(m);
        r.formula = a.boundary ? "L-leg boundary weight h(L+1, 1)" : "L-leg bulk dimension 2h(L/2, 0)";
    } else if (s == "dims") {
        const auto m = a.model.model();
        const auto d = geometry_dims(m);
        r.values["d_hull"] = d.d_hull;
        r.values["d_ep"] = d.d_ep;
        r.values["d_sc"] = d.d_sc;
        r.model = model_json(m);
        r.formula = "D_H = 1 + kappa/8, D_EP = 1 + 2/kappa (dual), D_SC = 2 - x_4";
    } else if (s == "sle-moment") {
        const double k = a.model.kappa_or(6);
        r.values["x"] = sle_star_moment(k, whole(a.L, "--L"), a.n, locus, a.subtracted);
        r.formula = "x(L ^ n) of L SLE strands and n Brownian paths";
    } else if (s == "disconnection") {
        const double k = a.model.kappa_or(6);
        r.values["x"] = sle_disconnection(k, whole(a.L, "--L"), a.sides == 2 ? Sides::Two : Sides::One, locus);
        r.formula = "limit n -> n* of the star moment exponent";
    } else if (s == "double-sided") {
        const double k = a.model.kappa_or(6);
        r.values["x"] = sle_double_sided(k, whole(a.L, "--L"), a.n1, a.n2, locus);
        r.formula = "x(n1 ^ L ^ n2)";
    } else if (s == "winding") {
        const double k = a.model.kappa_or(6);
        r.values["coefficient"] = winding_variance_coeff(k, a.k, a.j);
        r.formula = "kappa / k(j)^2";
    } else if (s == "sde") {
        const double k = a.model.kappa_or(6);
        r.values["x"] = sde_exponent(k, a.xa, a.xb, locus);
        r.formula = "short-distance exponent of two fused operators";
    } else if (s == "kac") {
        const double k = a.model.kappa_or(6);
        r.values["weight"] = a.frame == "qg" ? sle_kac_qg_weight(k, {a.p, a.q}) : sle_kac_weight(k, {a.p, a.q});
        r.formula = a.frame == "qg" ? "quantum-gravity Kac weight" : "h(p, q) at kappa";
    } else if (s == "cpa") {
        r.values["beta"] = cpa_beta(a.model.c_or(0));
        r.formula = "D(2)/D(0)";
    } else {
        std::string list;
        for (const auto& x : selectors) list += (list.empty() ? "" : ", ") + x;
        throw UsageError("unknown selector '" + s + "'; choose one of " + list);
    }
    return r;
}

int cmd_exponents(ExponentArgs& a, CLI::App* sub, const std::string& cmd) {
    Emitter e(start_manifest(cmd));
    e.manifest().parameters = echo_options(sub);
    const auto r = exponent(a);
    Json doc{{"selector", a.selector}};
    for (auto it = r.values.begin(); it != r.values.end(); ++it) doc[it.key()] = it.value();
    doc["formula"] = r.formula;
    if (!r.model.is_null()) doc["model"] = r.model;
    CsvTable csv{{"name", "value"}, {}};
    for (auto it = r.values.begin(); it != r.values.end(); ++it) csv.add({it.key(), it.value().get<double>()});
    e.emit(a.out, doc, csv);
    return 0;
}

// --- spectra -------------------------------------------------------------------

struct SpectraArgs {
    std::string kind;
    ModelFlags model;
    OutputFlags out;
    std::optional<double> at;  // --n or --alpha: a single abscissa
    std::optional<double> from, to;
    int points = 201;
    double lambda = 0.0, R = 1e3;
    int m = 2;
    std::string poly_kind = "generic";
};

double derivative(const std::function<double(double)>& f, double x) {
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    try {
        return (f(x + h) - f(x - h)) / (2 * h);
    } catch (const std::exception&) {
        try {
            return (f(x + h) - f(x)) / h;
        } catch (const std::exception&) {
            return std::nan("");
        }
    }
}

int cmd_spectra(SpectraArgs& a, CLI::App* sub, const std::string& cmd) {
    Emitter e(start_manifest(cmd));
    e.manifest().parameters = echo_options(sub);
    const double c = a.model.c_or(0.0);
    const double nstar = moment_floor(c);
    std::function<double(double)> f, df;
    std::string xname;
    double lo = 0, hi = 0;
    const double l = a.lambda;
    if (a.kind == "tau" || a.kind == "D") {
        xname = "n";
        lo = nstar + 1e-3, hi = 10;
        if (a.kind == "tau") f = [c](double n) { return mf_tau(c, n); }, df = [c](double n) { return mf_alpha(c, n); };
        else f = [c](double n) { return mf_dimension(c, n); };
    } else if (a.kind == "f" || a.kind == "mixed") {
        xname = "alpha";
        lo = 0.5 * (1 + l * l) + 0.01, hi = 20;
        if (a.kind == "f") f = [c](double x) { return mf_spectrum(c, x); };
        else f = [c, l](double x) { return mixed_spectrum(c, x, l); };
    } else if (a.kind == "wedge") {
        xname = "theta";
        lo = 0.01, hi = 2 * std::numbers::pi / (1 + l * l) - 0.01;
        f = [c, l](double t) { return wedge_spectrum(c, t, l); };
    } else if (a.kind == "poly") {
        xname = "alpha";
        lo = 0.5 * a.m * (1 + l * l) + 0.01, hi = 20;
        const PolyKind pk = a.poly_kind == "brownian" ? PolyKind::BrownianCut
                            : a.poly_kind == "saw"    ? PolyKind::SAWStar
                                                      : PolyKind::Generic;
        const int m = a.m;
        if (m < 1) throw UsageError("--m must be >= 1");
        // m arms sharing the same exponent
        f = [c, l, m, pk](double x) {
            const std::vector<double> alphas(std::size_t(m), x);
            return poly_spectrum(c, alphas, l, pk);
        };
    } else if (a.kind == "density") {
        xname = "alpha";
        lo = 0.51, hi = 20;
        const double R = a.R;
        f = [c, R](double x) { return alpha_density(c, x, R); };
    } else {
        throw UsageError("unknown spectrum '" + a.kind + "'; choose one of tau, D, f, mixed, wedge, poly, density");
    }
    if (!df) df = [f](double x) { return derivative(f, x); };

    std::vector<double> xs;
    if (a.at) {
        xs.push_back(*a.at);
    } else {
        lo = a.from.value_or(lo), hi = a.to.value_or(hi);
        if (a.points < 2 || !(hi > lo)) throw UsageError("need --points >= 2 and --to > --from");
        for (int i = 0; i < a.points; ++i) xs.push_back(lo + (hi - lo) * i / (a.points - 1));
    }
    CsvTable csv{{xname, a.kind, "derivative"}, {}};
    Json rows = Json::array();
    for (double x : xs) {
        double v = 0;
        try {
            v = f(x);
        } catch (const DomainError& err) {
            throw DomainError(xname + " = " + format_number(x) + ": " + err.what());
        }
        const double d = df(x);
        csv.add({x, v, d});
        rows.push_back(Json::array({x, v, d}));
    }
    Json doc{{"kind", a.kind}, {"c", c}, {"columns", Json::array({xname, a.kind, "derivative"})}, {"rows", rows}};
    if (a.kind == "mixed" || a.kind == "wedge" || a.kind == "poly") doc["lambda"] = l;
    e.emit(a.out, doc, csv);
    return 0;
}

// --- sim -----------------------------------------------------------------------

struct SimArgs {
    std::string kind;
    ModelFlags model;
    OutputFlags out;
    // walk
    std::string packets = "1,1";
    bool half_plane = false;
    std::int64_t tmax = 100000, samples = 100000;
    std::optional<double> tmin;
    // perc / harmonic
    int side = 1024;
    std::size_t clusters = 200, fields = 20;
    std::uint64_t walkers = 1000000;
    std::string radii, orders;
    int pbm = 0;
    // sle
    std::size_t traces = 200, steps = 1 << 14;
    double dt = 0, s_min = 0, s_max = 0;
    bool chordal = false, gaussian = false, box = false;
    std::size_t dump_trace = 0;
};

int cmd_sim(SimArgs& a, CLI::App* sub, const std::string& cmd) {
    Emitter e(start_manifest(cmd));
    e.manifest().parameters = echo_options(sub);
    e.manifest().seeds = {a.out.seed};
    const unsigned threads = a.out.threads;
    Json doc{{"kind", a.kind}};
    CsvTable csv;
    if (a.kind == "walk") {
        WalkConfig w;
        w.packet_counts = parse_int_list(a.packets);
        w.geometry = a.half_plane ? Geometry::HalfPlane : Geometry::Plane;
        w.max_time = a.tmax;
        w.samples = a.samples;
        w.seed = a.out.seed;
        w.threads = threads;
        const auto curve = simulate_survival(w);
        csv.header = {"t", "survivors", "total"};
        for (std::size_t i = 0; i < curve.times.size(); ++i) csv.add({curve.times[i], curve.alive_counts[i], curve.total});
        const double t1 = a.tmin.value_or(double(a.tmax) / 64);
        const auto fit = fit_exponent(curve, t1, double(a.tmax));
        const Locus locus = a.half_plane ? Locus::Boundary : Locus::Bulk;
        doc["fit"] = to_json(fit);
        // survival exponent: zeta in the plane, half the boundary exponent in the half plane
        const double z = packet_zeta(w.packet_counts, locus);
        doc["theory"] = a.half_plane ? z / 2 : z;
        doc["geometry"] = to_string(w.geometry);
    } else if (a.kind == "perc") {
        PercConfig p;
        p.side = a.side;
        p.clusters = a.clusters;
        p.seed = a.out.seed;
        p.threads = threads;
        const auto s = run_perc_study(p);
        csv.header = {"sample_id", "radius_of_gyration", "hull_length", "ep_length"};
        for (std::size_t i = 0; i < s.records.size(); ++i) {
            const auto& r = s.records[i];
            csv.add({std::int64_t(i), r.radius_of_gyration, std::int64_t(r.hull_length), std::int64_t(r.ep_sites)});
        }
        doc["fields"] = s.fields;
        doc["clusters"] = s.records.size();
        doc["accessibility_rule"] = accessibility_rule;
        doc["hull_fit"] = to_json(s.hull_fit);
        doc["ep_fit"] = to_json(s.ep_fit);
        doc["theory"] = {{"d_hull", 1.75}, {"d_ep", 4.0 / 3}};
        if (a.pbm > 0 && !a.out.out.empty()) {
            std::vector<std::uint64_t> done;
            for (const auto& r : s.records) {
                if (int(done.size()) >= a.pbm) break;
                if (std::find(done.begin(), done.end(), r.field) != done.end()) continue;
                done.push_back(r.field);
                write_file(a.out.out + ".field" + std::to_string(r.field) + ".pbm",
                           to_pbm(sample_field(p.side, field_seed(p.seed, r.field))));
            }
        }
    } else if (a.kind == "sle") {
        SleConfig s;
        s.kappa = a.model.kappa_or(6);
        s.steps = a.steps;
        s.dt = a.dt;
        s.kind = a.chordal ? LoewnerKind::Chordal : LoewnerKind::Radial;
        s.traces = a.traces;
        s.mode = a.gaussian ? DriveMode::Gaussian : DriveMode::Binomial;
        s.seed = a.out.seed;
        s.threads = threads;
        const auto traces = sample_traces(s);
        WindingOptions wo;
        if (!a.chordal) wo.s_max = 0.25, wo.s_min = std::ldexp(1.0, -18);
        if (a.s_max > 0) wo.s_max = a.s_max;
        if (a.s_min > 0) wo.s_min = a.s_min;
        const auto w = winding_statistics(traces, wo);
        doc["kappa"] = s.kappa;
        doc["loewner"] = to_string(s.kind);
        doc["winding"] = {{"scales", w.scales},
                          {"means", w.means},
                          {"variances", w.variances},
                          {"samples", w.samples},
                          {"slope", to_json(w.slope)},
                          {"mean_slope", to_json(w.mean_slope)},
                          {"lags", w.lags},
                          {"lag_variances", w.lag_variances},
                          {"increment_slope", to_json(w.increment_slope)}};
        doc["theory"] = {{"winding_slope", s.kappa}, {"dimension", std::min(2.0, 1 + s.kappa / 8)}};
        if (a.box) doc["box_dimension"] = to_json(trace_dimension(traces));
        if (a.dump_trace >= traces.size()) throw UsageError("--trace index beyond the number of traces");
        const auto& t = traces[a.dump_trace];
        csv.header = {"t", "re", "im"};
        for (std::size_t k = 0; k < t.points.size(); ++k) csv.add({t.capacities[k], t.points[k].real(), t.points[k].imag()});
    } else if (a.kind == "harmonic") {
        HarmonicConfig h;
        h.side = a.side;
        h.fields = a.fields;
        h.walkers = a.walkers;
        if (!a.radii.empty()) h.radii = parse_list(a.radii);
        if (!a.orders.empty()) h.orders = parse_list(a.orders);
        h.seed = a.out.seed;
        h.threads = threads;
        const auto s = run_harmonic_study(h);
        csv.header = {"r", "n", "Z_n"};
        for (std::size_t i = 0; i < h.radii.size(); ++i)
            for (std::size_t o = 0; o < h.orders.size(); ++o) {
                double z = 0;
                for (const auto& t : s.tables) z += t.values[i][o];
                csv.add({h.radii[i], h.orders[o], z / double(s.tables.size())});
            }
        Json est = Json::array();
        for (const auto& t : s.estimates) {
            const double d = mf_dimension(0, t.order);
            Json row{{"n", t.order}, {"tau", to_json(t.tau)}, {"d_mc", t.dimension}, {"d_mc_stderr", t.dimension_error}};
            row["d_theory"] = d;
            row["residual"] = std::isnan(t.dimension) ? Json(nullptr) : Json(t.dimension - d);
            est.push_back(row);
        }
        doc["fields"] = s.fields;
        doc["walkers"] = s.walkers;
        doc["absorbed"] = s.absorbed;
        doc["estimates"] = est;
    } else {
        throw UsageError("unknown simulation '" + a.kind + "'; choose one of walk, perc, sle, harmonic");
    }
    e.emit(a.out, doc, csv, true);
    return 0;
}

// --- verify --------------------------------------------------------------------

struct VerifyArgs {
    std::string tier = "all", budget = "full", format = "text";
    std::uint64_t seed = 42;
    unsigned threads = 0;
    std::vector<int> only;
    std::string out;
};

int cmd_verify(VerifyArgs& a, CLI::App* sub, const std::string& cmd) {
    Emitter e(start_manifest(cmd));
    e.manifest().parameters = echo_options(sub);
    e.manifest().seeds = {a.seed};
    VerifyOptions o;
    o.tier = a.tier == "exact" ? VerifyTier::Exact : a.tier == "mc" ? VerifyTier::Mc : VerifyTier::All;
    o.budget = a.budget == "fast" ? Budget::Fast : Budget::Full;
    o.seed = a.seed;
    o.threads = a.threads;
    o.only = a.only;
    const bool text = a.format == "text";
    const auto results = run_verification(o, [&](const CriterionResult& r) {
        if (text) std::cout << summary_line(r) << std::endl;
    });
    bool ok = true;
    Json list = Json::array();
    CsvTable csv{{"id", "title", "tier", "pass", "seconds"}, {}};
    for (const auto& r : results) {
        ok = ok && r.pass;
        list.push_back(to_json(r));
        csv.add({std::int64_t(r.id), r.title, std::string(r.monte_carlo ? "mc" : "exact"),
                 std::string(r.pass ? "pass" : "fail"), r.seconds});
    }
    Json doc{{"tier", to_string(o.tier)}, {"budget", to_string(o.budget)}, {"pass", ok}, {"criteria", list}};
    if (!text) {
        OutputFlags f;
        f.format = a.format;
        f.out = a.out;
        e.emit(f, doc, csv);
    } else if (!a.out.empty()) {
        OutputFlags f;
        f.format = "json";
        f.out = a.out;
        e.emit(f, doc, csv);
    }
    return ok ? 0 : exit_verify;
}

void print_error(const char* type, const std::string& message) {
    std::cerr << dump_json(Json{{"error", {{"type", type}, {"message", message}}}}) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-gravity exponents, multifractal spectra and their Monte Carlo checks"};
    app.set_version_flag("--version", std::string(library_version()) + " (" + library_git_describe() + ")");
    app.set_config("--config", "", "TOML or INI file with option values");
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    ExponentArgs ex;
    auto* sx = app.add_subcommand("exponents", "closed-form exponents");
    sx->add_option("selector", ex.selector, "zeta, packet, copolymer, perc, watermelon, dims, sle-moment, "
                                            "disconnection, double-sided, winding, sde, kac, cpa")
        ->required();
    ex.model.add(sx);
    ex.out.add(sx, "json", false);
    sx->add_option("--L", ex.L, "strands (Brownian paths for zeta)");
    sx->add_option("--l", ex.l, "crossing paths (perc)");
    sx->add_option("--n", ex.n, "Brownian moment order");
    sx->add_option("--n1", ex.n1);
    sx->add_option("--n2", ex.n2);
    sx->add_option("--k", ex.k, "strands (winding)");
    sx->add_option("--j", ex.j, "pinched pairs (winding)");
    sx->add_option("--sides", ex.sides, "1 or 2 (disconnection)")->check(CLI::IsMember({1, 2}));
    sx->add_option("--xa", ex.xa);
    sx->add_option("--xb", ex.xb);
    sx->add_option("--p", ex.p, "Kac index p");
    sx->add_option("--q", ex.q, "Kac index q");
    sx->add_option("--packets", ex.packets, "packet sizes, e.g. 2,1");
    sx->add_option("--legs", ex.legs, "copolymer packets as RW:SAW pairs, e.g. 1:0,0:1");
    sx->add_option("--pinched", ex.pinched);
    sx->add_option("--frame", ex.frame, "planar or qg")->check(CLI::IsMember({"planar", "qg"}));
    sx->add_flag("--boundary", ex.boundary);
    sx->add_flag("--subtracted", ex.subtracted);

    SpectraArgs sp;
    auto* ss = app.add_subcommand("spectra", "multifractal curves");
    ss->add_option("kind", sp.kind, "tau, D, f, mixed, wedge, poly, density")->required();
    sp.model.add(ss);
    sp.out.add(ss, "csv", false);
    auto* on = ss->add_option("--n", sp.at, "single moment order (tau, D)");
    ss->add_option("--alpha", sp.at, "single abscissa (f, mixed, poly, density)")->excludes(on);
    ss->add_option("--from", sp.from);
    ss->add_option("--to", sp.to);
    ss->add_option("--points", sp.points);
    ss->add_option("--lambda", sp.lambda, "rotation rate");
    ss->add_option("--R", sp.R, "scale ratio (density)");
    ss->add_option("--m", sp.m, "arms (poly)");
    ss->add_option("--poly-kind", sp.poly_kind)->check(CLI::IsMember({"generic", "brownian", "saw"}));

    SimArgs sm;
    auto* si = app.add_subcommand("sim", "Monte Carlo campaigns");
    si->add_option("kind", sm.kind, "walk, perc, sle, harmonic")->required();
    sm.model.add(si);
    sm.out.add(si, "json", true);
    si->add_option("--packets", sm.packets, "walk packet sizes");
    si->add_flag("--half-plane", sm.half_plane);
    si->add_option("--tmax", sm.tmax);
    si->add_option("--tmin", sm.tmin, "fit window start (default tmax/64)");
    si->add_option("--samples", sm.samples, "walk samples, or clusters for perc");
    si->add_option("--side", sm.side);
    si->add_option("--fields", sm.fields, "harmonic fields");
    si->add_option("--walkers", sm.walkers, "walkers per harmonic field");
    si->add_option("--radii", sm.radii, "harmonic ball radii, e.g. 4,8,16,32,64");
    si->add_option("--orders", sm.orders, "harmonic moment orders");
    si->add_option("--pbm", sm.pbm, "write this many percolation fields as PBM (needs --out)");
    si->add_option("--traces", sm.traces);
    si->add_option("--steps", sm.steps);
    si->add_option("--dt", sm.dt, "capacity step (0: default)");
    si->add_option("--s-min", sm.s_min);
    si->add_option("--s-max", sm.s_max);
    si->add_option("--trace", sm.dump_trace, "trace written to the CSV");
    si->add_flag("--chordal", sm.chordal, "chordal instead of radial traces");
    si->add_flag("--gaussian", sm.gaussian, "Gaussian drive increments");
    si->add_flag("--box", sm.box, "also fit the box-counting dimension");

    VerifyArgs vr;
    auto* sv = app.add_subcommand("verify", "acceptance criteria");
    sv->add_option("tier", vr.tier, "exact, mc or all")->check(CLI::IsMember({"exact", "mc", "all"}));
    sv->add_option("--budget", vr.budget)->check(CLI::IsMember({"fast", "full"}));
    sv->add_option("--seed", vr.seed);
    sv->add_option("--threads", vr.threads);
    sv->add_option("--only", vr.only, "criterion ids");
    sv->add_option("--format", vr.format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
    sv->add_option("--out", vr.out, "output path prefix");

    // CLI11 exits 0 on --help and --version, 1 on parse errors (the usage code)
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    const std::string cmd = command_line(argc, argv);
    try {
        if (*sx) return cmd_exponents(ex, sx, cmd);
        if (*ss) return cmd_spectra(sp, ss, cmd);
        if (*si) return cmd_sim(sm, si, cmd);
        if (*sv) return cmd_verify(vr, sv, cmd);
    } catch (const UsageError& e) {
        print_error("usage", e.what());
        return exit_usage;
    } catch (const ConfigError& e) {
        print_error("config", e.what());
        return exit_usage;
    } catch (const AmbiguityError& e) {
        print_error("ambiguity", e.what());
        return exit_domain;
    } catch (const MomentOutOfRange& e) {
        print_error("moment_out_of_range", e.what());
        return exit_domain;
    } catch (const DomainError& e) {
        print_error("domain", e.what());
        return exit_domain;
    } catch (const RangeError& e) {
        print_error("range", e.what());
        return exit_domain;
    } catch (const std::exception& e) {
        print_error("runtime", e.what());
        return exit_domain;
    }
    return exit_usage;
}
