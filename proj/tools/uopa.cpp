// uopa: command-line front end. Every run writes a RunArtifact JSON file; results also go to stdout.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "opa/all.hpp"
#include "opa/io.hpp"

using namespace opa;
using io::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kExitDomain = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitUsage = 64;

struct Run {
    std::string command;
    json inputs = json::object();
    json outputs;
    json diagnostics = json::object();
    std::optional<std::string> csv;
};

std::string utc_now(bool compact) {
    auto now = std::chrono::system_clock::now();
    auto t = std::chrono::system_clock::to_time_t(now);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    if (compact) {
        std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%S", &tm);
        return std::string(buf) + "." + std::to_string(1000 + ms).substr(1) + "Z";
    }
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    return std::string(buf) + "." + std::to_string(1000 + ms).substr(1) + "Z";
}

// Wall-clock fields make outputs irreproducible; move them into diagnostics.
void strip_timing(json& j, json& sink) {
    if (j.is_object()) {
        if (j.contains("elapsed_seconds")) {
            sink.push_back(j["elapsed_seconds"]);
            j.erase("elapsed_seconds");
        }
        for (auto& [k, v] : j.items()) strip_timing(v, sink);
    } else if (j.is_array()) {
        for (auto& v : j) strip_timing(v, sink);
    }
}

json file_input(const std::string& path) { return {{"path", path}, {"content", io::read_json_file(path)}}; }

Space parse_space(const std::string& s) {
    if (s == "hardy") return Space::hardy;
    if (s == "dirichlet") return Space::dirichlet;
    fail(ErrorKind::invalid_input, "space must be hardy or dirichlet", {{"space", s}});
}

std::filesystem::path artifact_path(const std::string& out, const std::string& command) {
    std::string name = utc_now(true) + "-" + command;
    for (auto& c : name)
        if (c == ' ') c = '-';
    name += ".json";
    if (!out.empty()) {
        std::filesystem::path p(out);
        if (std::filesystem::is_directory(p) || out.back() == '/') return p / name;
        return p;
    }
    if (const char* dir = std::getenv("OPA_OUT_DIR"); dir && *dir) return std::filesystem::path(dir) / name;
    return std::filesystem::path("runs") / name;
}

// ---- subcommands ----

struct Params {
    // opa
    std::string f_path, g_path, E_path, target_path, probes_path, disc_path, arcs_path, csv_path;
    std::size_t n = 0, n_max = 64;
    double alpha = 0.0;
    std::size_t probe_count = 4096;
    // rudin
    std::string space = "hardy";
    double u_width = 0.1, eps = 0.05, peak = 12.0;
    int levels = 6;
    bool coefficients = false;
    int hardy_min_grid_log2 = 14, hardy_max_grid_log2 = 23;
    double cells_per_width = 32.0;
    std::size_t dirichlet_truncation = 4096, nodes_per_arc = 128, eq_iterations = 2000;
    std::size_t nodes = 512;
    // zerofree / steer
    std::size_t level_cap = 512, degree_cap = std::size_t{1} << 15, search_cap = kSearchCap;
    double time_budget = 600.0;
};

HardyRudinOptions hardy_options(const Params& p) {
    HardyRudinOptions o;
    o.min_grid_log2 = p.hardy_min_grid_log2;
    o.max_grid_log2 = p.hardy_max_grid_log2;
    o.cells_per_width = p.cells_per_width;
    return o;
}

DirichletRudinOptions dirichlet_options(const Params& p) {
    DirichletRudinOptions o;
    o.truncation = p.dirichlet_truncation;
    o.nodes_per_arc = p.nodes_per_arc;
    o.iterations = p.eq_iterations;
    return o;
}

ZeroFreeApproxOptions zerofree_options(const Params& p) {
    ZeroFreeApproxOptions o;
    o.level_cap = p.level_cap;
    o.degree_cap = p.degree_cap;
    o.time_budget_seconds = p.time_budget;
    o.phi.hardy = hardy_options(p);
    o.phi.dirichlet = dirichlet_options(p);
    o.phi.peak = p.peak;
    o.phi.dirichlet_levels = p.levels;
    return o;
}

void cmd_opa_solve(const Params& p, Run& run) {
    auto fj = file_input(p.f_path);
    run.inputs = {{"f", fj}, {"n", p.n}, {"alpha", p.alpha}};
    auto f = io::parse_coeff_series(fj["content"]);
    AlphaWeight w(p.alpha);
    auto r = opa_solve(f, p.n, w);
    run.outputs = io::to_json(r);
    run.diagnostics["solver"] = w.is_hardy() && p.n >= OpaOptions{}.levinson_threshold ? "levinson" : "dense-llt";
}

void cmd_opa_converge(const Params& p, Run& run) {
    auto fj = file_input(p.f_path);
    run.inputs = {{"f", fj}, {"n_max", p.n_max}, {"alpha", p.alpha}};
    auto f = io::parse_coeff_series(fj["content"]);
    BoundarySet probes;
    if (!p.probes_path.empty()) {
        auto pj = file_input(p.probes_path);
        run.inputs["probes"] = pj;
        probes = io::parse_boundary_set(pj["content"]);
    } else {
        std::vector<double> t;
        for (std::size_t j = 0; j < p.probe_count; ++j)
            t.push_back(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(p.probe_count));
        probes = BoundarySet::from_points(t);
        run.inputs["probe_count"] = p.probe_count;
    }
    std::vector<cplx> disc{0.0, 0.5, cplx(0.0, 0.5), -0.5, cplx(0.0, -0.5)};
    if (!p.disc_path.empty()) {
        auto dj = file_input(p.disc_path);
        run.inputs["disc_probes"] = dj;
        disc.clear();
        for (const auto& z : dj["content"].at("disc_points")) {
            cplx c = io::parse_complex(z);
            if (!(std::abs(c) < 1.0)) fail(ErrorKind::invalid_input, "disc probes must lie in the open disc");
            disc.push_back(c);
        }
    }
    auto rows = convergence_profile(f, p.n_max, AlphaWeight(p.alpha), probes, disc);
    json table = json::array();
    std::string csv = "n,residual,sup_circle,max_interior\n";
    for (const auto& r : rows) {
        table.push_back({{"n", r.n}, {"residual", r.residual}, {"sup_circle", r.sup_circle},
                         {"max_interior", r.max_interior}});
        csv += std::to_string(r.n) + "," + io::format_double(r.residual) + "," + io::format_double(r.sup_circle) +
               "," + io::format_double(r.max_interior) + "\n";
    }
    run.outputs = {{"columns", {"n", "residual", "sup_circle", "max_interior"}}, {"rows", table}};
    run.csv = csv;
}

void cmd_rudin_build(const Params& p, Run& run) {
    auto ej = file_input(p.E_path);
    Space space = parse_space(p.space);
    run.inputs = {{"space", p.space}, {"E", ej}, {"U_width", p.u_width}, {"eps", p.eps}};
    auto E = io::parse_boundary_set(ej["content"]);
    if (!(p.u_width > 0.0)) fail(ErrorKind::invalid_parameter, "U-width must be positive");
    auto U = neighborhood(E, p.u_width);
    RudinFunction r;
    if (space == Space::hardy) {
        run.inputs["peak"] = p.peak;
        r = hardy_rudin(E, U, p.eps, p.peak, hardy_options(p));
    } else {
        run.inputs["levels"] = p.levels;
        r = dirichlet_rudin(E, U, p.eps, p.levels, dirichlet_options(p));
    }
    run.outputs = io::to_json(r, p.coefficients);
    run.diagnostics["grid_size"] = r.certified.grid_size;
}

void cmd_rudin_capacity(const Params& p, Run& run) {
    auto aj = file_input(p.arcs_path);
    run.inputs = {{"arcs", aj}, {"nodes_per_arc", p.nodes}, {"iterations", p.eq_iterations}};
    auto A = io::parse_boundary_set(aj["content"]);
    auto mu = equilibrium_measure(A, p.nodes, p.eq_iterations);
    json classical = json::array();
    for (const auto& a : A.arcs)
        classical.push_back({{"center", a.center}, {"half_width", a.half_width},
                             {"capacity", arc_capacity(2.0 * a.half_width)}});
    run.outputs = {{"measure", io::to_json(mu)},
                   {"capacity", mu.capacity},
                   {"energy", mu.energy},
                   {"classical_single_arc", classical}};
}

std::vector<std::pair<double, cplx>> read_targets(const std::string& path, const json& set_json, Run& run) {
    auto tj = file_input(path);
    run.inputs["target"] = tj;
    std::vector<double> raw;
    if (set_json.contains("points"))
        for (const auto& x : set_json["points"]) raw.push_back(x.get<double>());
    return io::parse_targets(tj["content"], raw);
}

void cmd_zerofree(const Params& p, Run& run) {
    Space space = parse_space(p.space);
    auto gj = file_input(p.g_path);
    auto ej = file_input(p.E_path);
    run.inputs = {{"space", p.space}, {"g", gj}, {"E", ej}, {"eps", p.eps},
                  {"budgets", {{"level_cap", p.level_cap}, {"degree_cap", p.degree_cap}}}};
    auto g = io::parse_coeff_series(gj["content"]);
    auto E = io::parse_boundary_set(ej["content"]);
    auto targets = read_targets(p.target_path, ej["content"], run);
    auto res = simultaneous_zero_free(g, targets, E, p.eps, space, zerofree_options(p));
    run.outputs = io::to_json(res);
}

void cmd_steer(const Params& p, Run& run) {
    Space space = parse_space(p.space);
    auto fj = file_input(p.f_path);
    auto gj = file_input(p.g_path);
    auto ej = file_input(p.E_path);
    run.inputs = {{"space", p.space}, {"f", fj}, {"g", gj}, {"E", ej}, {"eps", p.eps}, {"search_cap", p.search_cap}};
    auto f = io::parse_coeff_series(fj["content"]);
    auto g = io::parse_coeff_series(gj["content"]);
    auto E = io::parse_boundary_set(ej["content"]);
    SteerOptions opt;
    opt.zerofree = zerofree_options(p);
    opt.search_cap = p.search_cap;
    auto res = steer(f, g, E, p.eps, space, opt);
    run.outputs = io::to_json(res);
}

// ---- selftest ----

struct Check {
    std::string name;
    std::function<bool(json&)> run;
};

std::vector<Check> selftest_checks() {
    std::vector<Check> c;
    c.push_back({"opa closed form f = 1 - z", [](json& d) {
                     double worst = 0.0;
                     for (std::size_t n = 0; n <= 30; ++n) {
                         auto r = opa_solve(CoeffSeries{1.0, -1.0}, n);
                         for (std::size_t k = 0; k <= n; ++k)
                             worst = std::max(worst, std::abs(r.Q[k] - (1.0 - (k + 1.0) / (n + 2.0))));
                         worst = std::max(worst, std::abs(r.residual * r.residual - 1.0 / (n + 2.0)));
                     }
                     d = worst;
                     return worst <= 1e-10;
                 }});
    c.push_back({"gram hermitian, toeplitz at alpha 0", [](json& d) {
                     CoeffSeries f{1.0, cplx(0.3, -0.2), 0.5, cplx(0.0, 0.1)};
                     auto g = gram_matrix(f, 8, AlphaWeight::hardy());
                     double herm = (g.M - g.M.adjoint()).cwiseAbs().maxCoeff(), toep = 0.0;
                     for (Eigen::Index j = 0; j < 8; ++j)
                         for (Eigen::Index k = 0; k < 8; ++k) toep = std::max(toep, std::abs(g.M(j, k) - g.M(j + 1, k + 1)));
                     auto d1 = gram_matrix(CoeffSeries{1.0, -1.0}, 1, AlphaWeight::dirichlet());
                     d = {{"hermitian", herm}, {"toeplitz", toep}, {"dirichlet_M00", d1.M(0, 0).real()},
                          {"dirichlet_M11", d1.M(1, 1).real()}};
                     return herm <= 1e-14 && toep <= 1e-12 && cholesky_pivots(g.M).size() == 9 &&
                            std::abs(d1.M(0, 0) - d1.M(1, 1)) > 1.0;
                 }});
    c.push_back({"residual projection identity and monotonicity", [](json& d) {
                     CoeffSeries f{2.0, cplx(0.5, 1.0), -0.3};
                     double prev = 2.0, gap = 0.0;
                     bool mono = true;
                     for (std::size_t n = 0; n <= 12; ++n) {
                         auto r = opa_solve(f, n, AlphaWeight(0.5));
                         gap = std::max(gap, std::abs(r.residual - r.residual_projection));
                         mono = mono && r.residual <= prev + 1e-12;
                         prev = r.residual;
                     }
                     d = gap;
                     return mono && gap <= 1e-8;
                 }});
    c.push_back({"levinson matches dense", [](json& d) {
                     CoeffSeries f{1.0, cplx(-0.4, 0.3), 0.2};
                     OpaOptions dense;
                     dense.force_dense = true;
                     auto a = opa_solve(f, 200), b = opa_solve(f, 200, {}, dense);
                     double gap = 0.0;
                     for (std::size_t k = 0; k <= 200; ++k) gap = std::max(gap, std::abs(a.Q[k] - b.Q[k]));
                     d = gap;
                     return gap <= 1e-10;
                 }});
    c.push_back({"inner multiplier invariance", [](json& d) {
                     CoeffSeries f{1.5, -0.4, 0.2};
                     auto B = blaschke_series({cplx(0.3, 0.4), -0.5}, 256);
                     CoeffSeries fB(multiply(B, f, 260).coeffs());
                     double gap = 0.0;
                     for (std::size_t n = 0; n <= 10; ++n) {
                         auto a = opa_solve(fB, n), b = opa_solve(f, n);
                         for (std::size_t k = 0; k <= n; ++k)
                             gap = std::max(gap, std::abs(a.Q[k] - std::conj(B[0]) * b.Q[k]));
                     }
                     d = gap;
                     return gap <= 1e-8;
                 }});
    c.push_back({"inner-outer reconstruction", [](json& d) {
                     CoeffSeries p{cplx(0.2, 0.1), -1.3, 0.4, 1.0};
                     auto fac = polynomial_inner_outer(p);
                     auto rec = scale(multiply(blaschke_series(fac.inner_zeros, 256), fac.outer, 256), fac.unimodular);
                     double gap = 0.0;
                     for (std::size_t k = 0; k <= 256; ++k) gap = std::max(gap, std::abs(rec[k] - p[k]));
                     d = gap;
                     return gap <= 1e-10;
                 }});
    c.push_back({"zero-free certificate", [](json& d) {
                     auto a = zero_free_on_closed_disc(CoeffSeries{1.0, -0.5});
                     auto b = zero_free_on_closed_disc(CoeffSeries{1.0, -2.0});
                     d = {{"outside", to_string(a.status)}, {"inside", to_string(b.status)}};
                     return a.zero_free && !b.zero_free && b.winding_number == 1;
                 }});
    c.push_back({"analytic completion of cos", [](json& d) {
                     BoundaryFunction u;
                     u.grid_log2 = 8;
                     for (int j = 0; j < 256; ++j) u.grid_values.push_back(std::cos(2.0 * std::numbers::pi * j / 256.0));
                     auto cs = analytic_completion(u, 32);
                     double gap = std::abs(cs[1] - 1.0);
                     for (std::size_t k = 0; k <= 32; ++k)
                         if (k != 1) gap = std::max(gap, std::abs(cs[k]));
                     d = gap;
                     return gap <= 1e-14;
                 }});
    c.push_back({"equilibrium capacity of the full circle", [](json& d) {
                     BoundarySet c;
                     c.arcs = {{0.0, std::numbers::pi}};
                     auto mu = equilibrium_measure(c, 256, 500);
                     d = mu.capacity;
                     return std::abs(mu.capacity - 1.0) < 0.02;
                 }});
    c.push_back({"piecewise partition of constant ratio", [](json& d) {
                     auto part = piecewise_partition({{0.0, 2.0}, {std::numbers::pi, -1.0}},
                                                     BoundarySet::from_points({0.0, std::numbers::pi}), 0.1);
                     d = part.pieces.size();
                     return part.pieces.size() == 2 && std::abs(part.pieces[0].v - std::log(2.0)) < 1e-15;
                 }});
    c.push_back({"steer on the natural limit", [](json& d) {
                     auto r = steer(CoeffSeries{1.0, -0.5}, CoeffSeries{2.0}, BoundarySet::from_points({0.0}), 0.1,
                                    Space::hardy);
                     d = {{"m", r.m}, {"norm_error", r.norm_error}, {"boundary_error", r.boundary_error}};
                     return r.norm_error < 0.1 && r.boundary_error < 0.1;
                 }});
    c.push_back({"degenerate inputs rejected", [](json& d) {
                     int rejected = 0;
                     auto expect = [&](const std::function<void()>& fn) {
                         try {
                             fn();
                         } catch (const Error& e) {
                             if (is_domain_error(e.kind())) ++rejected;
                         }
                     };
                     expect([] { opa_solve(CoeffSeries{0.0}, 2); });
                     expect([] { steer(CoeffSeries{0.0, 1.0}, CoeffSeries{3.0}, BoundarySet::from_points({0.0}), 0.1,
                                       Space::hardy); });
                     BoundarySet arc;
                     arc.arcs = {{0.0, 0.3}};
                     expect([&] { simultaneous_zero_free(CoeffSeries{1.0}, {{0.0, 1.0}}, arc, 0.1, Space::hardy); });
                     auto z = opa_solve(CoeffSeries{0.0, 1.0}, 4);
                     d = rejected;
                     return rejected == 3 && z.Q.is_zero() && std::abs(z.residual - 1.0) < 1e-15;
                 }});
    return c;
}

void cmd_selftest(Run& run, bool& all_ok) {
    json results = json::array();
    all_ok = true;
    for (const auto& chk : selftest_checks()) {
        json detail;
        bool ok = false;
        try {
            ok = chk.run(detail);
        } catch (const Error& e) {
            detail = io::error_json(e);
        }
        all_ok = all_ok && ok;
        std::cerr << (ok ? "PASS " : "FAIL ") << chk.name << "\n";
        results.push_back({{"name", chk.name}, {"pass", ok}, {"detail", detail}});
    }
    run.outputs = {{"checks", results}, {"all_pass", all_ok}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uopa: optimal polynomial approximants, Rudin functions and zero-free approximation"};
    app.set_config("--config", "", "key-value config file (flags override)");
    app.require_subcommand(1);
    app.fallthrough();
    Params p;
    std::string out;
    app.add_option("--out", out, "artifact path or directory");

    auto* opa_cmd = app.add_subcommand("opa", "optimal polynomial approximants");
    opa_cmd->require_subcommand(1);
    auto* solve = opa_cmd->add_subcommand("solve", "solve the normal equations for Q_n(1/f)");
    solve->add_option("--f", p.f_path, "coefficient file")->required();
    solve->add_option("--n", p.n, "order")->required();
    solve->add_option("--alpha", p.alpha, "space weight in [0, 1]");
    auto* conv = opa_cmd->add_subcommand("converge", "convergence table for n = 0..n_max");
    conv->add_option("--f", p.f_path, "coefficient file")->required();
    conv->add_option("--n-max", p.n_max, "largest order")->required();
    conv->add_option("--alpha", p.alpha, "space weight in [0, 1]");
    conv->add_option("--probes", p.probes_path, "set file of circle probes (default: uniform grid)");
    conv->add_option("--probe-count", p.probe_count, "uniform circle probes when no set file is given");
    conv->add_option("--disc-probes", p.disc_path, "JSON file with \"disc_points\"");
    conv->add_option("--csv", p.csv_path, "CSV path (default: next to the artifact)");

    auto* rudin_cmd = app.add_subcommand("rudin", "Rudin peak functions and capacities");
    rudin_cmd->require_subcommand(1);
    auto* build = rudin_cmd->add_subcommand("build", "construct and certify a Rudin function");
    build->add_option("--space", p.space, "hardy or dirichlet");
    build->add_option("--E", p.E_path, "set file")->required();
    build->add_option("--U-width", p.u_width, "neighbourhood half-width");
    build->add_option("--eps", p.eps, "off-neighbourhood bound");
    build->add_option("--peak", p.peak, "bump height (hardy)");
    build->add_option("--levels", p.levels, "capacity levels (dirichlet)");
    build->add_flag("--coefficients", p.coefficients, "emit full coefficient arrays");
    auto* cap = rudin_cmd->add_subcommand("capacity", "discrete equilibrium measure of arcs");
    cap->add_option("--arcs", p.arcs_path, "set file with arcs")->required();
    cap->add_option("--nodes", p.nodes, "nodes per arc");
    for (auto* sc : {build, cap}) {
        sc->add_option("--hardy-min-grid-log2", p.hardy_min_grid_log2);
        sc->add_option("--hardy-max-grid-log2", p.hardy_max_grid_log2);
        sc->add_option("--cells-per-width", p.cells_per_width);
        sc->add_option("--dirichlet-truncation", p.dirichlet_truncation);
        sc->add_option("--nodes-per-arc", p.nodes_per_arc);
        sc->add_option("--iterations", p.eq_iterations);
    }

    auto* zf_cmd = app.add_subcommand("zerofree", "simultaneous zero-free approximation");
    zf_cmd->require_subcommand(1);
    auto* approx = zf_cmd->add_subcommand("approx", "approximate g in the space and f on E by a zero-free polynomial");
    approx->add_option("--space", p.space, "hardy or dirichlet");
    approx->add_option("--g", p.g_path, "coefficient file")->required();
    approx->add_option("--E", p.E_path, "set file (finite points)")->required();
    approx->add_option("--target", p.target_path, "target values on E")->required();
    approx->add_option("--eps", p.eps, "tolerance")->required();

    auto* st = app.add_subcommand("steer", "steer Q_m(1/F) towards g on E");
    st->add_option("--f", p.f_path, "coefficient file")->required();
    st->add_option("--g", p.g_path, "coefficient file")->required();
    st->add_option("--E", p.E_path, "set file (finite points)")->required();
    st->add_option("--eps", p.eps, "tolerance")->required();
    st->add_option("--space", p.space, "hardy or dirichlet");
    st->add_option("--search-cap", p.search_cap, "largest order m probed");

    for (auto* sc : {approx, st}) {
        sc->add_option("--level-cap", p.level_cap);
        sc->add_option("--degree-cap", p.degree_cap);
        sc->add_option("--time-budget", p.time_budget, "seconds");
        sc->add_option("--peak", p.peak);
        sc->add_option("--levels", p.levels);
        sc->add_option("--hardy-max-grid-log2", p.hardy_max_grid_log2);
        sc->add_option("--dirichlet-truncation", p.dirichlet_truncation);
    }

    auto* self = app.add_subcommand("selftest", "run the built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    Run run;
    int code = 0;
    json error;
    auto t0 = std::chrono::steady_clock::now();
    try {
        if (*solve) {
            run.command = "opa solve";
            cmd_opa_solve(p, run);
        } else if (*conv) {
            run.command = "opa converge";
            cmd_opa_converge(p, run);
        } else if (*build) {
            run.command = "rudin build";
            cmd_rudin_build(p, run);
        } else if (*cap) {
            run.command = "rudin capacity";
            cmd_rudin_capacity(p, run);
        } else if (*approx) {
            run.command = "zerofree approx";
            cmd_zerofree(p, run);
        } else if (*st) {
            run.command = "steer";
            cmd_steer(p, run);
        } else if (*self) {
            run.command = "selftest";
            bool ok = true;
            cmd_selftest(run, ok);
            if (!ok) code = kExitNumeric;
        }
    } catch (const Error& e) {
        error = io::error_json(e);
        code = is_domain_error(e.kind()) ? kExitDomain : kExitNumeric;
    } catch (const json::exception& e) {
        error = io::error_json(Error(ErrorKind::invalid_input, std::string("malformed input: ") + e.what()));
        code = kExitDomain;
    } catch (const std::exception& e) {
        error = {{"kind", "internal"}, {"message", e.what()}, {"details", json::object()}};
        code = kExitNumeric;
    }
    if (run.command.empty()) run.command = "unknown";

    json timings = json::array();
    strip_timing(run.outputs, timings);
    if (!error.is_null()) strip_timing(error, timings);
    run.diagnostics["timings"] = {
        {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
        {"trace_elapsed_seconds", timings}};

    json artifact = {{"command", run.command},
                     {"inputs", run.inputs},
                     {"outputs", run.outputs},
                     {"diagnostics", run.diagnostics},
                     {"created_at", utc_now(false)},
                     {"schema_version", kSchemaVersion}};
    if (!error.is_null()) artifact["error"] = error;

    try {
        auto path = artifact_path(out, run.command);
        io::write_atomic(path, io::dump(artifact));
        if (run.csv) {
            auto csv_path = p.csv_path.empty() ? std::filesystem::path(path).replace_extension(".csv")
                                               : std::filesystem::path(p.csv_path);
            io::write_atomic(csv_path, *run.csv);
        }
        std::cerr << "artifact: " << path.string() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "could not write artifact: " << e.what() << "\n";
        if (code == 0) code = kExitNumeric;
    }
    std::cout << io::dump(error.is_null() ? run.outputs : json{{"error", error}});
    return code;
}
