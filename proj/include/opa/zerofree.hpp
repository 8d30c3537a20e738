#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "opa/boundary.hpp"
#include "opa/coeff_series.hpp"
#include "opa/errors.hpp"
#include "opa/rudin.hpp"
#include "opa/spaces.hpp"

namespace opa {

enum class Space { hardy, dirichlet };

inline const char* to_string(Space s) { return s == Space::hardy ? "hardy" : "dirichlet"; }

inline AlphaWeight weight_of(Space s) { return s == Space::hardy ? AlphaWeight::hardy() : AlphaWeight::dirichlet(); }

struct PhiOptions {
    double peak = 12.0;
    int dirichlet_levels = 6;
    HardyRudinOptions hardy;
    DirichletRudinOptions dirichlet;
};

struct PhiResult {
    std::vector<RudinFunction> rudin;
    CoeffSeries exponent;
    CoeffSeries phi;
    double uniform_bound = 1.0;
    std::size_t level = 0;
};

/// h_{j,n} for every piece: Rudin functions with eps = 1/n on the 1/n-neighbourhood of the piece.
inline std::vector<RudinFunction> rudin_level(const PiecewisePartition& partition, Space space, std::size_t level,
                                              const PhiOptions& opt = {}) {
    if (level == 0) fail(ErrorKind::invalid_parameter, "level must be positive");
    double rad = 1.0 / static_cast<double>(level);
    BoundarySet all;
    std::size_t separate = 0;
    for (const auto& p : partition.pieces) {
        auto u = neighborhood(p.set, rad);
        separate += u.arcs.size();
        all.points.insert(all.points.end(), p.set.points.begin(), p.set.points.end());
        all.arcs.insert(all.arcs.end(), p.set.arcs.begin(), p.set.arcs.end());
    }
    if (!partition.pieces.empty() && neighborhood(BoundarySet::normalized(all), rad).arcs.size() != separate)
        fail(ErrorKind::level_too_small, "1/n-neighbourhoods of the pieces overlap", {{"level", level}});
    std::vector<RudinFunction> out;
    for (const auto& p : partition.pieces) {
        auto U = neighborhood(p.set, rad);
        if (space == Space::hardy)
            out.push_back(hardy_rudin(p.set, U, rad, opt.peak, opt.hardy));
        else
            out.push_back(dirichlet_rudin(p.set, U, rad, opt.dirichlet_levels, opt.dirichlet));
    }
    return out;
}

namespace detail {

inline std::vector<cplx> combine(const std::vector<RudinFunction>& hs, const std::vector<cplx>& v) {
    std::size_t n = 1;
    for (const auto& h : hs) n = std::max(n, h.h.size());
    std::vector<cplx> x(n, cplx{0.0});
    for (std::size_t j = 0; j < hs.size(); ++j)
        for (std::size_t k = 0; k < hs[j].h.size(); ++k) x[k] += v[j] * hs[j].h[k];
    return x;
}

// exp of a series through grid values at radius r; returns coefficients 0..G/2 and the aliasing mass.
inline std::vector<cplx> exp_on_grid(const std::vector<cplx>& x, std::size_t G, double r, double* alias) {
    auto v = values_on_circle(x, G, r);
    for (auto& e : v) e = std::exp(e);
    auto c = fourier_coefficients(std::move(v));
    double neg = 0.0;
    for (std::size_t k = G / 2 + 1; k < G; ++k) neg += std::norm(c[k]);
    if (alias) *alias = std::sqrt(neg);
    c.resize(G / 2 + 1);
    return c;
}

}  // namespace detail

/// Phi_n = exp(sum_j v_j h_{j,n}), with the uniform bound exp(2 m max|v_j|).
inline PhiResult phi_builder(const PiecewisePartition& partition, Space space, std::size_t level,
                             const PhiOptions& opt = {}) {
    PhiResult out;
    out.level = level;
    double vmax = 0.0;
    std::vector<cplx> v;
    for (const auto& p : partition.pieces) {
        v.push_back(p.v);
        vmax = std::max(vmax, std::abs(p.v));
    }
    out.uniform_bound = std::exp(2.0 * static_cast<double>(v.size()) * vmax);
    if (vmax == 0.0) {
        out.exponent = CoeffSeries();
        out.phi = CoeffSeries::constant(1.0);
        return out;
    }
    out.rudin = rudin_level(partition, space, level, opt);
    auto x = detail::combine(out.rudin, v);
    out.exponent = CoeffSeries(x);
    if (x.size() <= 8193) {
        out.phi = exp_series(out.exponent);
    } else {
        std::size_t G = 2 * (x.size() - 1);
        double alias = 0.0;
        auto c = detail::exp_on_grid(x, G, 1.0, &alias);
        out.phi = CoeffSeries(std::move(c), alias);
    }
    return out;
}

struct ZeroFreeApproxOptions {
    std::size_t level_start = 8;
    std::size_t level_cap = 512;
    int s_log2_start = 3;           // s = 2^-j, truncation degree 2^(j+4)
    std::size_t degree_cap = std::size_t{1} << 15;
    double saturation = 0.05;       // stop refining a level when the space error improves less than this
    ZeroFreeOptions certificate{std::size_t{1} << 14, std::size_t{1} << 22};
    PhiOptions phi;
    double time_budget_seconds = 600.0;
    std::optional<double> boundary_eps;  // separate tolerance for sup_E |P - target| (default eps)
};

struct ZeroFreeApproxResult {
    CoeffSeries P;
    ZeroFreeReport report;
    double space_error = 0.0;
    double boundary_error = 0.0;
    double r = 1.0;
    double r_prime = 1.0;
    std::size_t level = 0;
    std::size_t degree = 0;
    PiecewisePartition partition;
    nlohmann::json trace = nlohmann::json::array();
};

namespace detail {

inline double bergman_sq(const std::vector<cplx>& c) {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += std::norm(c[k]) / static_cast<double>(k + 1);
    return s;
}

inline std::vector<cplx> poly_mul(const std::vector<cplx>& a, const std::vector<cplx>& b, std::size_t n_out) {
    return convolve(a, b, n_out);
}

// Log of t closest to the reference branch value.
inline cplx log_near(cplx t, cplx ref) {
    cplx l = std::log(t);
    double k = std::round((ref.imag() - l.imag()) / kTwoPi);
    return l + cplx{0.0, k * kTwoPi};
}

}  // namespace detail

/// Zero-free polynomial P with ||P - g||_alpha < eps and sup_E |P - target| < eps.
inline ZeroFreeApproxResult simultaneous_zero_free(const CoeffSeries& g_in,
                                                   const std::vector<std::pair<double, cplx>>& target,
                                                   const BoundarySet& E, double eps, Space space,
                                                   const ZeroFreeApproxOptions& opt = {}) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    if (!(eps > 0.0)) fail(ErrorKind::invalid_parameter, "eps must be positive", {{"eps", eps}});
    if (E.empty()) fail(ErrorKind::invalid_input, "boundary set E is empty");
    if (E.positive_measure())
        fail(ErrorKind::invalid_input, "E has positive measure; only finite point sets are accepted",
             {{"total_length", E.total_length()}});
    if (g_in.is_zero()) fail(ErrorKind::invalid_input, "g is identically zero");
    const CoeffSeries g(g_in.coeffs());
    const AlphaWeight w = weight_of(space);
    const double beps = opt.boundary_eps.value_or(eps);
    if (!(beps > 0.0)) fail(ErrorKind::invalid_parameter, "boundary tolerance must be positive");

    // Targets at every point of E.
    std::vector<double> pts = E.points;
    std::vector<cplx> tv;
    for (double p : pts) {
        auto it = std::find_if(target.begin(), target.end(),
                               [&](const auto& x) { return std::abs(angle_diff(x.first, p)) < 1e-9; });
        if (it == target.end()) fail(ErrorKind::invalid_input, "no target value for a point of E", {{"theta", p}});
        if (it->second == cplx{0.0}) fail(ErrorKind::invalid_input, "target vanishes at a point of E", {{"theta", p}});
        tv.push_back(it->second);
    }

    auto open_disc = zero_free_on_closed_disc(dilate(g, 1.0 - 1e-6), opt.certificate);
    if (!open_disc.zero_free)
        fail(ErrorKind::invalid_input, "g is not certified zero-free on the open disc",
             {{"status", to_string(open_disc.status)}, {"winding_number", open_disc.winding_number}});

    // (1) g_r zero-free on the closed disc with ||g_r - g|| < eps/4.
    double r = 1.0;
    if (!zero_free_on_closed_disc(g, opt.certificate).zero_free) {
        bool found = false;
        for (int k = 1; k <= 12 && !found; ++k) {
            double rr = 1.0 - std::pow(10.0, -k);
            auto gr = dilate(g, rr);
            if (norm_alpha(subtract(gr, g), w) < eps / 4.0 && zero_free_on_closed_disc(gr, opt.certificate).zero_free) {
                r = rr;
                found = true;
            }
        }
        if (!found) fail(ErrorKind::approximation_budget, "no dilation radius makes g zero-free on the closed disc");
    }
    const CoeffSeries gr = dilate(g, r);

    // (2) piecewise-constant reduction of target / g_r on E.
    std::vector<std::pair<double, cplx>> ratios;
    double gsup = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        cplx gv = evaluate(gr, std::polar(1.0, pts[i]));
        gsup = std::max(gsup, std::abs(gv));
        ratios.emplace_back(pts[i], tv[i] / gv);
    }
    auto partition = piecewise_partition(ratios, E, eps / (4.0 * std::max(gsup, 1e-300)));

    ZeroFreeApproxResult best;
    double best_score = std::numeric_limits<double>::infinity();
    nlohmann::json trace = nlohmann::json::array();
    auto record_best = [&](const ZeroFreeApproxResult& cand) {
        double score = std::max(cand.space_error / eps, cand.boundary_error / beps);
        if (score < best_score) {
            best_score = score;
            best = cand;
        }
    };

    auto measure = [&](const std::vector<cplx>& P, double* space_err, double* bd_err) {
        CoeffSeries Ps(P);
        *space_err = norm_alpha(subtract(Ps, g), w);
        double b = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            b = std::max(b, std::abs(evaluate(Ps, std::polar(1.0, pts[i])) - tv[i]));
        *bd_err = b;
    };

    bool trivial = std::all_of(partition.pieces.begin(), partition.pieces.end(),
                               [](const auto& p) { return std::abs(p.v) < 1e-15; });
    if (trivial) {
        // Phi = 1: P is g_r itself, or a truncated dilate for long inputs.
        ZeroFreeApproxResult res;
        res.partition = partition;
        res.r = r;
        res.P = gr;
        res.degree = gr.truncation_degree();
        measure(gr.coeffs(), &res.space_error, &res.boundary_error);
        res.report = zero_free_on_closed_disc(res.P, opt.certificate);
        trace.push_back({{"r", r}, {"level", 0}, {"r_prime", 1.0}, {"degree", res.degree},
                         {"space_error", res.space_error}, {"boundary_error", res.boundary_error},
                         {"zero_free", res.report.zero_free}});
        res.trace = trace;
        if (res.report.zero_free && res.space_error < eps && res.boundary_error < beps) return res;
        fail(ErrorKind::approximation_budget, "trivial path did not meet eps",
             {{"space_error", res.space_error}, {"boundary_error", res.boundary_error}, {"trace", trace}});
    }

    const std::size_t m = partition.pieces.size();
    int j_resume = opt.s_log2_start;
    std::string stop_reason = "level cap reached";
    for (std::size_t level = opt.level_start; level <= opt.level_cap; level *= 2) {
        std::vector<RudinFunction> hs;
        try {
            hs = rudin_level(partition, space, level, opt.phi);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::level_too_small) continue;
            if (e.kind() == ErrorKind::resolution_exceeded || e.kind() == ErrorKind::construction) {
                stop_reason = std::string("Rudin construction stopped: ") + e.what();
                break;
            }
            throw;
        }
        double prev_space = std::numeric_limits<double>::infinity();
        for (int j = std::max(opt.s_log2_start, j_resume - 1);; ++j) {
            j_resume = j;
            std::size_t D = std::size_t{1} << (j + 4);
            if (D > opt.degree_cap) break;
            double s = std::ldexp(1.0, -j);
            double rp = 1.0 - s;

            // Calibrate exponents so that g_r(r' zeta_i) Phi(r' zeta_i) = target at the representatives.
            Eigen::MatrixXcd H(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
            Eigen::VectorXcd rhs(static_cast<Eigen::Index>(m));
            for (std::size_t i = 0; i < m; ++i) {
                cplx z = std::polar(rp, partition.pieces[i].representative);
                for (std::size_t k = 0; k < m; ++k)
                    H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = evaluate(hs[k].h, z);
                std::size_t ti = static_cast<std::size_t>(
                    std::distance(pts.begin(), std::min_element(pts.begin(), pts.end(), [&](double a, double b) {
                                      return std::abs(angle_diff(a, partition.pieces[i].representative)) <
                                             std::abs(angle_diff(b, partition.pieces[i].representative));
                                  })));
                rhs(static_cast<Eigen::Index>(i)) = detail::log_near(tv[ti] / evaluate(gr, z), partition.pieces[i].v);
            }
            Eigen::VectorXcd vp = H.fullPivLu().solve(rhs);
            std::vector<cplx> vcal(m);
            bool finite = true;
            for (std::size_t i = 0; i < m; ++i) {
                vcal[i] = vp(static_cast<Eigen::Index>(i));
                if (!std::isfinite(vcal[i].real()) || !std::isfinite(vcal[i].imag())) finite = false;
            }
            if (!finite)
                for (std::size_t i = 0; i < m; ++i) vcal[i] = partition.pieces[i].v;

            // W = g_r(r' z) Phi(r' z) on the grid; P = its Taylor polynomial of degree D. Samples of the long
            // series are exact (folding); aliasing in P is of order r'^G <= e^{-64}.
            std::size_t G = detail::next_pow2(4 * (D + 1));
            auto x = detail::combine(hs, vcal);
            auto Xv = values_on_circle(x, G, rp);
            auto gv = values_on_circle(gr, G, rp);
            double phi_dev = 0.0, gsup_r = 0.0;
            std::vector<cplx> Wv(G);
            for (std::size_t q = 0; q < G; ++q) {
                cplx ph = std::exp(Xv[q]);
                phi_dev += std::norm(ph - 1.0);
                gsup_r = std::max(gsup_r, std::abs(gv[q]));
                Wv[q] = gv[q] * ph;
            }
            phi_dev /= static_cast<double>(G);
            std::vector<cplx> gvd(gv);
            auto wc = fourier_coefficients(std::move(Wv));
            std::vector<cplx> P(wc.begin(), wc.begin() + static_cast<std::ptrdiff_t>(D + 1));

            ZeroFreeApproxResult cand;
            cand.partition = partition;
            cand.r = r;
            cand.r_prime = rp;
            cand.level = level;
            cand.degree = D;
            measure(P, &cand.space_error, &cand.boundary_error);

            // Error decomposition: ||g_r Phi - g_r||^2 <= sup|g_r|^2 mean|Phi - 1|^2 (at radius r').
            auto gc = fourier_coefficients(std::move(gvd));
            double lhs = 0.0;
            for (std::size_t q = 0; q <= G / 2; ++q) lhs += std::norm(wc[q] - gc[q]);
            nlohmann::json entry = {{"r", r},
                                    {"level", level},
                                    {"r_prime", rp},
                                    {"degree", D},
                                    {"grid_size", G},
                                    {"space_error", cand.space_error},
                                    {"boundary_error", cand.boundary_error},
                                    {"calibrated_v", nlohmann::json::array()},
                                    {"hardy_decomposition", {{"lhs", lhs}, {"rhs", gsup_r * gsup_r * phi_dev}}}};
            for (auto c : vcal) entry["calibrated_v"].push_back({c.real(), c.imag()});

            if (space == Space::dirichlet) {
                // (1/pi) int |(g Phi)' - g'|^2 <= 2 [(1/pi) int |g'(Phi - 1)|^2 + (1/pi) int |g Phi'|^2].
                std::size_t L = std::min(G / 2 + 1, D + 1);
                auto phv = values_on_circle(x, G, rp);
                for (auto& e : phv) e = std::exp(e);
                auto phco = fourier_coefficients(std::move(phv));
                phco.resize(L);
                std::vector<cplx> gd(gc.begin(), gc.begin() + static_cast<std::ptrdiff_t>(std::min(gc.size(), L)));
                std::vector<cplx> dg(gd.size() > 1 ? gd.size() - 1 : 1, cplx{0.0});
                for (std::size_t k = 1; k < gd.size(); ++k) dg[k - 1] = static_cast<double>(k) * gd[k];
                std::vector<cplx> pm1(phco);
                pm1[0] -= 1.0;
                std::vector<cplx> dph(L > 1 ? L - 1 : 1, cplx{0.0});
                for (std::size_t k = 1; k < L; ++k) dph[k - 1] = static_cast<double>(k) * phco[k];
                auto t1 = detail::poly_mul(dg, pm1, dg.size() + pm1.size() - 1);
                auto t2 = detail::poly_mul(gd, dph, gd.size() + dph.size() - 1);
                std::vector<cplx> diff(std::max(t1.size(), t2.size()), cplx{0.0});
                for (std::size_t k = 0; k < t1.size(); ++k) diff[k] += t1[k];
                for (std::size_t k = 0; k < t2.size(); ++k) diff[k] += t2[k];
                entry["dirichlet_derivative_bound"] = {
                    {"lhs", detail::bergman_sq(diff)},
                    {"rhs", 2.0 * (detail::bergman_sq(t1) + detail::bergman_sq(t2))}};
            }

            entry["elapsed_seconds"] = std::chrono::duration<double>(clock::now() - t0).count();
            bool meets = cand.space_error < eps && cand.boundary_error < beps;
            if (meets) {
                cand.P = CoeffSeries(P);
                cand.report = zero_free_on_closed_disc(cand.P, opt.certificate);
                entry["zero_free"] = to_string(cand.report.status);
                entry["certificate_grid"] = cand.report.grid_size;
                trace.push_back(entry);
                if (cand.report.zero_free) {
                    cand.trace = trace;
                    return cand;
                }
            } else {
                trace.push_back(entry);
            }
            record_best(cand);

            double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
            if (elapsed > opt.time_budget_seconds) {
                stop_reason = "time budget exhausted";
                level = opt.level_cap;
                break;
            }
            if (cand.space_error > (1.0 - opt.saturation) * prev_space) break;
            prev_space = cand.space_error;
        }
    }
    fail(ErrorKind::approximation_budget, "approximation budget exhausted before both errors fell below eps",
         {{"reason", stop_reason},
          {"eps", eps},
          {"boundary_eps", beps},
          {"best_space_error", std::isfinite(best_score) ? nlohmann::json(best.space_error) : nlohmann::json()},
          {"best_boundary_error", std::isfinite(best_score) ? nlohmann::json(best.boundary_error) : nlohmann::json()},
          {"best_level", best.level},
          {"best_degree", best.degree},
          {"trace", trace}});
}

}  // namespace opa
