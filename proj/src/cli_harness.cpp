#include "virlab/cli_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "virlab/diff_group.hpp"
#include "virlab/functionals.hpp"
#include "virlab/perturb_virasoro.hpp"
#include "virlab/reparam.hpp"
#include "virlab/stationary.hpp"

namespace virlab::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

struct Config {
    json doc;        // normalized echo
    GridSpec grid{101, 401, 1.0, 15.0};
    std::string family = "gaussian_loop";
    double amplitude = 0.1;
    double ramp_b = 0.15;
    std::uint64_t seed = 1;
    SeminormOrder order{1, 2, 1};
    int a = 1;
    std::vector<double> epsilons;
    // saddle options
    double saddle_amplitude = 0.1;
    int saddle_max_iter = 500;
    double saddle_tol = 1e-8;
    // cocycle options
    int co_n = 3001;
    double co_xmax = 10.0;
    int co_seeds = 20;
};

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return j;
}

template <class T>
T get_or(const json& j, const char* key, T def) {
    if (!j.contains(key)) return def;
    try {
        return j.at(key).get<T>();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

Config parse_config(const json& j, std::optional<std::uint64_t> seed_override) {
    Config c;
    try {
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            c.grid = GridSpec(get_or(g, "n_t", 101), get_or(g, "n_x", 401),
                              get_or(g, "T", 1.0), get_or(g, "x_max", 15.0));
        }
        if (j.contains("path")) {
            const json& p = j.at("path");
            c.family = get_or<std::string>(p, "family", "gaussian_loop");
            c.amplitude = get_or(p, "amplitude", 0.1);
            c.ramp_b = get_or(p, "b", 0.15);
            c.seed = get_or<std::uint64_t>(p, "seed", 1);
        }
        if (j.contains("order")) {
            const json& o = j.at("order");
            c.order = SeminormOrder(get_or(o, "k", 1), get_or(o, "m", 2), get_or(o, "n", 1));
        }
        c.a = get_or(j, "a", 1);
        if (c.a < 1) throw ConfigError("a must be a positive integer");
        if (j.contains("epsilons")) {
            c.epsilons = j.at("epsilons").get<std::vector<double>>();
            for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
                if (!(c.epsilons[i] > 0.0)) throw ConfigError("epsilons must be positive");
                if (i > 0 && !(c.epsilons[i] < c.epsilons[i - 1]))
                    throw ConfigError("epsilons must be strictly decreasing");
            }
        }
        if (j.contains("saddle")) {
            const json& s = j.at("saddle");
            c.saddle_amplitude = get_or(s, "target_amplitude", 0.1);
            c.saddle_max_iter = get_or(s, "max_iter", 500);
            c.saddle_tol = get_or(s, "tol", 1e-8);
        }
        if (j.contains("cocycle")) {
            const json& s = j.at("cocycle");
            c.co_n = get_or(s, "n_x", 3001);
            c.co_xmax = get_or(s, "x_max", 10.0);
            c.co_seeds = get_or(s, "seeds", 20);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InvariantError& e) {
        throw ConfigError(std::string("config invalid: ") + e.what());
    }
    if (seed_override) c.seed = *seed_override;

    // normalized echo with all defaults explicit
    c.doc = json{{"grid", {{"n_t", c.grid.n_t}, {"n_x", c.grid.n_x}, {"T", c.grid.T}, {"x_max", c.grid.x_max}}},
                 {"path", {{"family", c.family}, {"amplitude", c.amplitude}, {"b", c.ramp_b}, {"seed", c.seed}}},
                 {"order", {{"k", c.order.k}, {"m", c.order.m}, {"n", c.order.n}}},
                 {"a", c.a},
                 {"epsilons", c.epsilons},
                 {"saddle", {{"target_amplitude", c.saddle_amplitude}, {"max_iter", c.saddle_max_iter}, {"tol", c.saddle_tol}}},
                 {"cocycle", {{"n_x", c.co_n}, {"x_max", c.co_xmax}, {"seeds", c.co_seeds}}}};
    return c;
}

DiffPath make_path(const Config& c) {
    if (c.family == "gaussian_loop") return gaussian_loop_path(c.grid, c.amplitude);
    if (c.family == "gaussian_ramp") return gaussian_ramp_path(c.grid, c.amplitude, c.ramp_b);
    if (c.family == "random") return random_path(c.grid, c.seed);
    throw ConfigError("unknown path family: " + c.family);
}

std::vector<double> linear_alpha(const GridSpec& g) {
    std::vector<double> a(g.n_t);
    for (int i = 0; i < g.n_t; ++i) a[i] = g.t(i);
    return a;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + p.string());
    out << content;
    if (!out) throw ConfigError("write failed: " + p.string());
}

// ------------------------------- SVG plot -----------------------------------

struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> pts;  // (eps, value), all positive
};

std::string svg_loglog(const std::vector<SvgSeries>& series) {
    const double W = 640, H = 480, ml = 70, mr = 20, mt = 20, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (auto [e, v] : s.pts) {
            if (!(e > 0.0) || !(v > 0.0)) continue;
            xmin = std::min(xmin, e); xmax = std::max(xmax, e);
            ymin = std::min(ymin, v); ymax = std::max(ymax, v);
        }
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    if (!(xmin < xmax) || !(ymin <= ymax)) {
        os << "</svg>\n";
        return os.str();
    }
    if (ymin == ymax) ymax = ymin * 10.0;
    const double lx0 = std::log10(xmin), lx1 = std::log10(xmax);
    const double ly0 = std::log10(ymin), ly1 = std::log10(ymax);
    auto X = [&](double e) { return ml + (std::log10(e) - lx0) / (lx1 - lx0) * (W - ml - mr); };
    auto Y = [&](double v) { return H - mb - (std::log10(v) - ly0) / (ly1 - ly0) * (H - mt - mb); };
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (W - ml - mr)
       << "\" height=\"" << (H - mt - mb) << "\" fill=\"none\" stroke=\"black\"/>\n";
    // decade gridlines
    for (int d = int(std::ceil(lx0 - 1e-9)); d <= int(std::floor(lx1 + 1e-9)); ++d) {
        const double x = X(std::pow(10.0, d));
        os << "<line data-decade-x=\"" << d << "\" x1=\"" << fmt(x) << "\" y1=\"" << mt
           << "\" x2=\"" << fmt(x) << "\" y2=\"" << (H - mb) << "\" stroke=\"#cccccc\"/>\n";
    }
    for (int d = int(std::ceil(ly0 - 1e-9)); d <= int(std::floor(ly1 + 1e-9)); ++d) {
        const double y = Y(std::pow(10.0, d));
        os << "<line data-decade-y=\"" << d << "\" x1=\"" << ml << "\" y1=\"" << fmt(y)
           << "\" x2=\"" << (W - mr) << "\" y2=\"" << fmt(y) << "\" stroke=\"#cccccc\"/>\n";
    }
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    int ci = 0;
    for (const auto& s : series) {
        std::ostringstream pl;
        for (auto [e, v] : s.pts) {
            if (!(e > 0.0) || !(v > 0.0)) continue;
            pl << fmt(X(e)) << "," << fmt(Y(v)) << " ";
        }
        os << "<polyline fill=\"none\" stroke=\"" << colors[ci % 4] << "\" points=\"" << pl.str()
           << "\"/>\n";
        for (auto [e, v] : s.pts) {
            if (!(e > 0.0) || !(v > 0.0)) continue;
            os << "<circle data-series=\"" << s.name << "\" data-eps=\"" << fmt(e)
               << "\" data-value=\"" << fmt(v) << "\" cx=\"" << fmt(X(e)) << "\" cy=\""
               << fmt(Y(v)) << "\" r=\"3\" fill=\"" << colors[ci % 4] << "\"/>\n";
        }
        ++ci;
    }
    os << "<text x=\"" << (W / 2) << "\" y=\"" << (H - 10) << "\">eps (log)</text>\n";
    os << "</svg>\n";
    return os.str();
}

// ------------------------------ subcommands ----------------------------------

struct Outputs {
    std::string csv;
    json summary;
    std::vector<SvgSeries> svg;
};

Outputs run_energy(const Config& c) {
    DiffPath p = make_path(c);
    VirasoroPath vp(p, linear_alpha(c.grid));
    const double E = energy_diff(p);
    const double C = central_defect(p);
    const double L = length_diff(p);
    const double EV = energy_virasoro(vp);
    Outputs o;
    o.csv = "energy,central_defect,length,energy_virasoro\n" + fmt(E) + "," + fmt(C) + "," +
            fmt(L) + "," + fmt(EV) + "\n";
    o.summary = json{{"energy", E}, {"central_defect", C}, {"length", L}, {"energy_virasoro", EV}};
    return o;
}

Outputs run_perturb(const Config& c) {
    DiffPath p = make_path(c);
    Outputs o;
    std::ostringstream csv;
    csv << "eps,delta_e,closeness,predicted,ratio,endpoint_residual_0,endpoint_residual_T\n";
    std::vector<std::pair<double, double>> de_pts, cl_pts;
    json rows = json::array();
    for (double eps : c.epsilons) {
        PerturbationReport r = perturb(p, c.order, eps, c.a);
        csv << fmt(eps) << "," << fmt(r.delta_e) << "," << fmt(r.closeness) << ","
            << fmt(r.predicted) << "," << fmt(r.ratio) << "," << fmt(r.endpoint_residual_0) << ","
            << fmt(r.endpoint_residual_T) << "\n";
        de_pts.push_back({eps, r.delta_e});
        cl_pts.push_back({eps, r.closeness});
        rows.push_back(json{{"eps", eps},
                            {"delta_e", r.delta_e},
                            {"delta_e_native", r.delta_e_native},
                            {"closeness", r.closeness},
                            {"predicted", r.predicted},
                            {"ratio", r.ratio},
                            {"mu", r.mu},
                            {"refine_factor", r.refine_factor},
                            {"site", {{"t0", p.grid.t(r.site.it0)}, {"x0", p.grid.x(r.site.ix0)}, {"sign", r.site.sign}, {"delta", r.site.delta}}}});
    }
    o.csv = csv.str();
    o.summary["rows"] = rows;
    if (de_pts.size() >= 2) {
        o.summary["slope_delta_e"] = fit_loglog_slope(de_pts);
        o.summary["slope_closeness"] = fit_loglog_slope(cl_pts);
        double dmin = 1e300, dmax = 0.0;
        for (auto [e, v] : cl_pts) {
            const double r = v / std::pow(e, c.a);
            dmin = std::min(dmin, r);
            dmax = std::max(dmax, r);
        }
        o.summary["closeness_over_eps_a_min"] = dmin;
        o.summary["closeness_over_eps_a_max"] = dmax;
    }
    if (!c.epsilons.empty())
        o.summary["threshold_eps"] = energy_decrease_threshold(p, c.order, c.a);
    o.svg = {{"delta_e", de_pts}, {"closeness", cl_pts}};
    return o;
}

Outputs run_virasoro(const Config& c) {
    DiffPath p = make_path(c);
    VirasoroPath vp(p, linear_alpha(c.grid));
    Outputs o;
    std::ostringstream csv;
    csv << "eps,stage1_saving,stage2_disturbance,evir_before,evir_after,evir_drop,lambda,"
           "lambda_residual,beta_endpoint_residual,closeness_path,closeness_alpha\n";
    std::vector<std::pair<double, double>> s1_pts, s2_pts;
    json rows = json::array();
    for (double eps : c.epsilons) {
        VirasoroPerturbationReport r = perturb_virasoro(vp, c.order, eps);
        csv << fmt(eps) << "," << fmt(r.stage1_saving) << "," << fmt(r.stage2_disturbance) << ","
            << fmt(r.evir_before) << "," << fmt(r.evir_after) << ","
            << fmt(r.evir_before - r.evir_after) << "," << fmt(r.lambda) << ","
            << fmt(r.lambda_residual) << "," << fmt(r.beta_endpoint_residual) << ","
            << fmt(r.closeness_path) << "," << fmt(r.closeness_alpha) << "\n";
        s1_pts.push_back({eps, r.stage1_saving});
        s2_pts.push_back({eps, r.stage2_disturbance});
        rows.push_back(json{{"eps", eps},
                            {"stage1_saving", r.stage1_saving},
                            {"stage2_disturbance", r.stage2_disturbance},
                            {"evir_drop", r.evir_before - r.evir_after},
                            {"lambda", r.lambda},
                            {"beta_endpoint_residual", r.beta_endpoint_residual},
                            {"defect_term_residual", r.defect_term_residual},
                            {"disturbance_over_eps_pow", r.stage2_disturbance / std::pow(eps, 2.0 * c.order.m + 1.5)}});
    }
    o.csv = csv.str();
    o.summary["rows"] = rows;
    if (s1_pts.size() >= 2) o.summary["slope_stage1_saving"] = fit_loglog_slope(s1_pts);
    o.svg = {{"stage1_saving", s1_pts}, {"stage2_disturbance", s2_pts}};
    return o;
}

Outputs run_length(const Config& c) {
    DiffPath p = make_path(c);
    Outputs o;
    std::ostringstream csv;
    csv << "eps,length_before,length_after,l2_psi,e_psi_g_over_t,e_psi_t_over_t,e_phi_f_over_t,"
           "l2_phi_f,l2_phi,closeness\n";
    json rows = json::array();
    std::vector<std::pair<double, double>> drop_pts;
    for (double eps : c.epsilons) {
        LengthReport r = reduce_length(p, c.order, eps);
        csv << fmt(eps) << "," << fmt(r.length_before) << "," << fmt(r.length_after) << ","
            << fmt(r.l2_psi) << "," << fmt(r.e_psi_g_over_t) << "," << fmt(r.e_psi_t_over_t) << ","
            << fmt(r.e_phi_f_over_t) << "," << fmt(r.l2_phi_f) << "," << fmt(r.l2_phi) << ","
            << fmt(r.closeness) << "\n";
        drop_pts.push_back({eps, r.length_before - r.length_after});
        rows.push_back(json{{"eps", eps},
                            {"length_drop", r.length_before - r.length_after},
                            {"chain_slack_psi_g", r.e_psi_t_over_t - r.e_psi_g_over_t},
                            {"strict_gap", r.e_phi_f_over_t - r.e_psi_t_over_t}});
    }
    ConstantSpeedResult cs = constant_speed(p);
    o.summary["speed_rel_std"] = cs.speed_rel_std;
    const double Ecs = energy_diff(cs.path), Lcs = length_diff(cs.path);
    o.summary["te_minus_l2_rel"] = (p.grid.T * Ecs - Lcs * Lcs) / (Lcs * Lcs);
    o.summary["rows"] = rows;
    o.csv = csv.str();
    o.svg = {{"length_drop", drop_pts}};
    return o;
}

Outputs run_saddle(const Config& c) {
    Diffeo1D id(c.grid.n_x, c.grid.x_max);
    Diffeo1D target(c.grid.n_x, c.grid.x_max);
    for (int i = 0; i < c.grid.n_x; ++i) {
        const double x = target.x(i);
        target.u[i] = c.saddle_amplitude * std::exp(-x * x);
    }
    target.validate();
    DiffPath init = linear_path(id, target, c.grid);
    CriticalPathResult cp = find_critical_path(id, target, init, c.saddle_max_iter, c.saddle_tol);
    Outputs o;
    std::ostringstream csv;
    csv << "eps,delta_e,predicted,ratio,closeness\n";
    json rows = json::array();
    for (double eps : c.epsilons) {
        SaddleReport r = verify_saddle(cp.path, c.order, eps);
        csv << fmt(eps) << "," << fmt(r.rep.delta_e) << "," << fmt(r.rep.predicted) << ","
            << fmt(r.rep.ratio) << "," << fmt(r.rep.closeness) << "\n";
        rows.push_back(json{{"eps", eps}, {"delta_e", r.rep.delta_e}, {"predicted", r.rep.predicted}});
    }
    o.csv = csv.str();
    o.summary = json{{"iterations", cp.iterations},
                     {"grad_max", cp.grad_max},
                     {"critical_energy", cp.energy},
                     {"rows", rows}};
    return o;
}

Outputs run_cocycle(const Config& c) {
    Outputs o;
    std::ostringstream csv;
    csv << "seed,cocycle_identity,assoc_residual,inverse_residual,c_id_psi,c_phi_id,c_phi_phiinv\n";
    double worst_coc = 0.0, worst_assoc = 0.0, worst_inv = 0.0;
    json rows = json::array();
    for (int s = 0; s < c.co_seeds; ++s) {
        const std::uint64_t base = c.seed + std::uint64_t(s) * 1000;
        Diffeo1D f1 = random_diffeo(c.co_n, c.co_xmax, base + 1);
        Diffeo1D f2 = random_diffeo(c.co_n, c.co_xmax, base + 2);
        Diffeo1D f3 = random_diffeo(c.co_n, c.co_xmax, base + 3);
        const double coc = bott_cocycle(f2, f3) - bott_cocycle(compose(f1, f2), f3) +
                           bott_cocycle(f1, compose(f2, f3)) - bott_cocycle(f1, f2);
        VirasoroElement a{f1, 0.3}, b{f2, -0.2}, cc{f3, 0.1};
        VirasoroElement ab_c = virasoro_mul(virasoro_mul(a, b), cc);
        VirasoroElement a_bc = virasoro_mul(a, virasoro_mul(b, cc));
        double assoc = std::abs(ab_c.alpha - a_bc.alpha);
        for (int i = 0; i < c.co_n; ++i)
            assoc = std::max(assoc, std::abs(ab_c.phi.u[i] - a_bc.phi.u[i]));
        VirasoroElement e = virasoro_mul(a, virasoro_inv(a));
        double inv = std::abs(e.alpha);
        for (int i = 0; i < c.co_n; ++i) inv = std::max(inv, std::abs(e.phi.u[i]));
        Diffeo1D id(c.co_n, c.co_xmax);
        const double c_id = bott_cocycle(id, f2);
        const double c_id2 = bott_cocycle(f1, id);
        const double c_inv = std::abs(bott_cocycle(f1, invert(f1)));
        csv << s << "," << fmt(std::abs(coc)) << "," << fmt(assoc) << "," << fmt(inv) << ","
            << fmt(c_id) << "," << fmt(c_id2) << "," << fmt(c_inv) << "\n";
        worst_coc = std::max(worst_coc, std::abs(coc));
        worst_assoc = std::max(worst_assoc, assoc);
        worst_inv = std::max(worst_inv, inv);
        rows.push_back(json{{"seed", s}, {"cocycle_identity", std::abs(coc)}, {"assoc", assoc}});
    }
    o.csv = csv.str();
    o.summary = json{{"worst_cocycle_identity", worst_coc},
                     {"worst_assoc_residual", worst_assoc},
                     {"worst_inverse_residual", worst_inv},
                     {"rows", rows}};
    return o;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"virlab: energy functionals and energy-reducing perturbations on "
                 "Diff_S(R) and the Virasoro-Bott group"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false, want_svg = false;
    app.add_option("--config", config_path, "JSON experiment config")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_set = true; });
    app.add_flag("--svg", want_svg, "emit a log-log SVG plot");
    const char* names[] = {"energy", "perturb", "virasoro", "length", "saddle", "cocycle"};
    for (const char* n : names) app.add_subcommand(n)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 4;
    }

    try {
        json doc = load_json(config_path);
        Config cfg = parse_config(doc, seed_set ? std::optional<std::uint64_t>(seed)
                                                : std::nullopt);
        const std::string sub = app.get_subcommands().front()->get_name();
        Outputs o;
        if (sub == "energy") o = run_energy(cfg);
        else if (sub == "perturb") o = run_perturb(cfg);
        else if (sub == "virasoro") o = run_virasoro(cfg);
        else if (sub == "length") o = run_length(cfg);
        else if (sub == "saddle") o = run_saddle(cfg);
        else o = run_cocycle(cfg);

        std::error_code ec;
        fs::create_directories(out_dir, ec);
        json summary;
        summary["config"] = cfg.doc;
        summary["results"] = o.summary;
        write_file(fs::path(out_dir) / (sub + ".csv"), o.csv);
        write_file(fs::path(out_dir) / (sub + "_summary.json"), summary.dump(2) + "\n");
        if (want_svg && !o.svg.empty())
            write_file(fs::path(out_dir) / (sub + ".svg"), svg_loglog(o.svg));
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace virlab::cli
