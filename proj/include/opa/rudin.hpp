#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <json.hpp>

#include "opa/boundary.hpp"
#include "opa/coeff_series.hpp"
#include "opa/errors.hpp"
#include "opa/spaces.hpp"

namespace opa {

/// phi(t) = exp(1 - 1/(1 - t^2)) on (-1, 1), 0 outside; phi(0) = 1.
inline double bump(double t) {
    double s = 1.0 - t * t;
    return s > 0.0 ? std::exp(1.0 - 1.0 / s) : 0.0;
}

/// int_{-1}^{1} phi(t) dt (trapezoid; phi is flat to all orders at the ends).
inline double bump_integral() {
    static const double value = [] {
        const int n = 1 << 14;
        double s = 0.0;
        for (int i = 1; i < n; ++i) s += bump(-1.0 + 2.0 * i / n);
        return s * 2.0 / n;
    }();
    return value;
}

struct BoundaryFunction {
    std::vector<double> grid_values;
    int grid_log2 = 0;
    double mass = 0.0;
    std::vector<double> widths;
    std::vector<double> component_masses;
};

namespace detail {

struct Component {
    double center = 0.0;
    double plateau = 0.0;  // half-width of the arc where u = M (0 for points)
};

inline std::vector<Component> components(const BoundarySet& E) {
    std::vector<Component> c;
    for (double p : E.points) c.push_back({p, 0.0});
    for (const auto& a : E.arcs) c.push_back({a.center, std::min(a.half_width, std::numbers::pi)});
    return c;
}

// Arc of U containing the component, or nullopt.
inline std::optional<Arc> enclosing_arc(const Component& c, const BoundarySet& U) {
    for (const auto& a : U.arcs) {
        if (a.full()) return a;
        double off = std::abs(angle_diff(c.center, a.center));
        if (off + c.plateau < a.half_width) return a;
    }
    return std::nullopt;
}

inline double room_in(const Component& c, const BoundarySet& U) {
    auto a = enclosing_arc(c, U);
    if (!a) return 0.0;
    if (a->full()) return std::numbers::pi;
    return a->half_width - std::abs(angle_diff(c.center, a->center)) - c.plateau;
}

inline BoundaryFunction build_bumps(const std::vector<Component>& comps, const std::vector<double>& widths,
                                    double peak, int grid_log2) {
    std::size_t G = std::size_t{1} << grid_log2;
    BoundaryFunction u;
    u.grid_log2 = grid_log2;
    u.grid_values.assign(G, 0.0);
    u.widths = widths;
    double h = kTwoPi / static_cast<double>(G);
    for (std::size_t c = 0; c < comps.size(); ++c) {
        double reach = comps[c].plateau + widths[c];
        auto lo = static_cast<long long>(std::floor((comps[c].center - reach) / h)) - 1;
        auto hi = static_cast<long long>(std::ceil((comps[c].center + reach) / h)) + 1;
        if (hi - lo >= static_cast<long long>(G)) {
            lo = 0;
            hi = static_cast<long long>(G) - 1;
        }
        double cm = 0.0;
        for (long long j = lo; j <= hi; ++j) {
            auto idx = static_cast<std::size_t>(((j % static_cast<long long>(G)) + static_cast<long long>(G)) %
                                                static_cast<long long>(G));
            double t = static_cast<double>(idx) * h;
            double d = std::max(0.0, std::abs(angle_diff(t, comps[c].center)) - comps[c].plateau);
            double v = d == 0.0 ? peak : peak * bump(d / widths[c]);
            u.grid_values[idx] += v;
            cm += v;
        }
        u.component_masses.push_back(cm / static_cast<double>(G));
    }
    double s = 0.0;
    for (double v : u.grid_values) s += v;
    u.mass = s / static_cast<double>(G);
    return u;
}

}  // namespace detail

/// Nonnegative bump u = sum_j M phi(dist_j / w_j), supported in U, with mass (1/2pi) int u < delta.
inline BoundaryFunction bump_profile(const BoundarySet& E, const BoundarySet& U, double peak, double mass_target,
                                     int grid_log2) {
    if (!(peak > 0.0)) fail(ErrorKind::invalid_parameter, "peak must be positive");
    if (!(mass_target > 0.0)) fail(ErrorKind::invalid_parameter, "mass target must be positive");
    if (grid_log2 < 4 || grid_log2 > 26) fail(ErrorKind::invalid_parameter, "grid_log2 out of range");
    auto comps = detail::components(E);
    if (comps.empty()) return detail::build_bumps(comps, {}, peak, grid_log2);
    std::vector<double> widths;
    for (const auto& c : comps) {
        double room = detail::room_in(c, U);
        if (!(room > 0.0)) fail(ErrorKind::invalid_input, "E is not contained in U");
        widths.push_back(0.95 * std::min(room, std::numbers::pi));
    }
    double cell = kTwoPi / static_cast<double>(std::size_t{1} << grid_log2);
    for (;;) {
        auto u = detail::build_bumps(comps, widths, peak, grid_log2);
        if (u.mass < mass_target) return u;
        for (auto& w : widths) w *= 0.8;
        if (*std::min_element(widths.begin(), widths.end()) < 4.0 * cell)
            fail(ErrorKind::resolution_exceeded, "mass target needs bumps narrower than 4 grid cells; raise grid_log2",
                 {{"mass_target", mass_target}, {"grid_log2", grid_log2}, {"mass", u.mass}});
    }
}

/// c_0 = u^_0, c_k = 2 u^_k (1 <= k <= N, the Nyquist mode kept single): u + i u~ with u~(0) = 0.
inline CoeffSeries analytic_completion(const BoundaryFunction& u, std::size_t N) {
    std::size_t G = u.grid_values.size();
    if (G == 0) return CoeffSeries();
    if (N > G / 2)
        fail(ErrorKind::aliasing, "completion degree exceeds half the grid size", {{"N", N}, {"G", G}});
    std::vector<cplx> x(u.grid_values.begin(), u.grid_values.end());
    auto uh = fourier_coefficients(std::move(x));
    std::vector<cplx> c(N + 1);
    c[0] = uh[0].real();
    for (std::size_t k = 1; k <= N; ++k) c[k] = (2 * k == G) ? uh[k] : 2.0 * uh[k];
    double dropped = 0.0;
    for (std::size_t k = N + 1; k <= G / 2; ++k) dropped += std::norm(2.0 * uh[k]);
    return CoeffSeries(std::move(c), std::sqrt(dropped));
}

struct RudinCertificate {
    double sup_bound = 0.0;
    double off_neighborhood_sup = 0.0;
    double peak_deviation = 0.0;
    std::optional<double> dirichlet_energy;
    double off_neighborhood_bound = 0.0;
    double min_real_part = 0.0;
    std::size_t grid_size = 0;
};

struct RudinFunction {
    CoeffSeries completion;
    CoeffSeries h;
    BoundarySet peak_set;
    BoundarySet neighborhood;
    RudinCertificate certified;
    nlohmann::json diagnostics = nlohmann::json::object();
};

struct DiscreteMeasure {
    std::vector<double> nodes;
    std::vector<double> weights;
    double energy = 0.0;
    double capacity = 0.0;
    std::size_t iterations = 0;
};

struct HardyRudinOptions {
    int min_grid_log2 = 14;
    int max_grid_log2 = 23;
    double cells_per_width = 32.0;
    int grid_doublings = 2;
    double grid_tolerance = 1e-4;
};

namespace detail {

inline bool off_planar(cplx z, const BoundarySet& U) {
    for (const auto& a : U.arcs) {
        if (a.full()) return false;
        if (std::abs(z - std::polar(1.0, a.center)) < chord(a.half_width)) return false;
    }
    return true;
}

// sup |h| and off-U sup on the circle (2G points) and rings r in {0.5, 0.9, 0.99}; min Re(completion) on the rings,
// since on the circle it is the trigonometric interpolant of u and rings at the bump edges.
inline void certify_grid(const CoeffSeries& h, const CoeffSeries* completion, const BoundarySet& U, std::size_t G,
                         RudinCertificate& cert) {
    cert.grid_size = G;
    cert.sup_bound = 0.0;
    cert.off_neighborhood_sup = 0.0;
    cert.min_real_part = std::numeric_limits<double>::infinity();
    auto scan = [&](double r, std::size_t n) {
        auto hv = values_on_circle(h, n, r);
        std::vector<cplx> fv;
        if (completion && r < 1.0) fv = values_on_circle(*completion, n, r);
        for (std::size_t j = 0; j < n; ++j) {
            double t = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
            double m = std::abs(hv[j]);
            cert.sup_bound = std::max(cert.sup_bound, m);
            bool off = r == 1.0 ? !U.contains(t, 0.0) : off_planar(std::polar(r, t), U);
            if (off) cert.off_neighborhood_sup = std::max(cert.off_neighborhood_sup, m);
            if (completion && r < 1.0) cert.min_real_part = std::min(cert.min_real_part, fv[j].real());
        }
    };
    scan(1.0, 2 * G);
    // Inside the disc only about 40/(-log r) coefficients are visible; folding keeps the samples exact.
    for (double r : {0.5, 0.9, 0.99}) {
        std::size_t band = static_cast<std::size_t>(40.0 / -std::log(r));
        scan(r, std::min(G, std::max(std::size_t{1} << 14, next_pow2(8 * band))));
    }
    if (!completion) cert.min_real_part = 0.0;
}

inline double peak_deviation(const CoeffSeries& h, const BoundarySet& E, std::size_t G) {
    double dev = 0.0;
    for (double p : E.points) dev = std::max(dev, std::abs(evaluate(h, std::polar(1.0, p)) - 1.0));
    if (!E.arcs.empty()) {
        auto hv = values_on_circle(h, G);
        for (std::size_t j = 0; j < G; ++j) {
            double t = kTwoPi * static_cast<double>(j) / static_cast<double>(G);
            for (const auto& a : E.arcs)
                if (a.contains(t)) dev = std::max(dev, std::abs(hv[j] - 1.0));
        }
    }
    return dev;
}

inline RudinFunction zero_rudin(const BoundarySet& E, const BoundarySet& U, bool dirichlet) {
    RudinFunction r;
    r.peak_set = E;
    r.neighborhood = U;
    r.certified.peak_deviation = 0.0;
    if (dirichlet) r.certified.dirichlet_energy = 0.0;
    return r;
}

}  // namespace detail

/// Peak function h = 1 - exp(-(u + i u~)): |h| <= 2, h ~ 1 on E, |h| < eps off U.
inline RudinFunction hardy_rudin(const BoundarySet& E, const BoundarySet& U, double eps, double peak,
                                 const HardyRudinOptions& opt = {}) {
    if (!(eps > 0.0)) fail(ErrorKind::invalid_parameter, "eps must be positive", {{"eps", eps}});
    if (!(peak > 0.0)) fail(ErrorKind::invalid_parameter, "peak must be positive", {{"peak", peak}});
    auto comps = detail::components(E);
    if (comps.empty()) return detail::zero_rudin(E, U, false);

    // Off U, |h| <= |u + i u~| <= sum_c 2 delta_c / dist_c; give each component 0.9 eps / count.
    const double Iphi = bump_integral();
    const double share = 0.9 * eps / static_cast<double>(comps.size());
    std::vector<double> widths, reach_limit;
    for (const auto& c : comps) {
        auto arc = detail::enclosing_arc(c, U);
        if (!arc) fail(ErrorKind::invalid_input, "E is not contained in U", {{"center", c.center}});
        double room = detail::room_in(c, U);
        double off = std::abs(angle_diff(c.center, arc->center));
        auto dist = [&](double w) {
            if (arc->full()) return std::numeric_limits<double>::infinity();
            return chord(arc->half_width) - chord(std::min(std::numbers::pi, off + c.plateau + w));
        };
        double w = 0.95 * std::min(room, std::numbers::pi);
        for (;;) {
            double delta = peak * (w * Iphi + 2.0 * c.plateau) / kTwoPi;
            double d = dist(w);
            if (d > 0.0 && 2.0 * delta / d <= share) break;
            w *= 0.9;
            if (w < 1e-12)
                fail(ErrorKind::construction, "no bump width meets the off-neighbourhood bound",
                     {{"eps", eps}, {"plateau", c.plateau}});
        }
        widths.push_back(w);
        reach_limit.push_back(dist(w));
    }
    double wmin = *std::min_element(widths.begin(), widths.end());
    int q = opt.min_grid_log2;
    while (q < opt.max_grid_log2 && kTwoPi / static_cast<double>(std::size_t{1} << q) * opt.cells_per_width > wmin) ++q;
    if (kTwoPi / static_cast<double>(std::size_t{1} << q) * opt.cells_per_width > wmin)
        fail(ErrorKind::resolution_exceeded, "bump width needs a grid finer than the cap",
             {{"width", wmin}, {"max_grid_log2", opt.max_grid_log2}});

    RudinFunction r;
    r.peak_set = E;
    r.neighborhood = U;
    nlohmann::json attempts = nlohmann::json::array();
    for (int attempt = 0; attempt <= opt.grid_doublings; ++attempt, ++q) {
        std::size_t G = std::size_t{1} << q;
        auto u = detail::build_bumps(comps, widths, peak, q);
        double bound = 0.0;
        for (std::size_t c = 0; c < comps.size(); ++c) bound += 2.0 * u.component_masses[c] / reach_limit[c];
        r.completion = analytic_completion(u, G / 2);
        auto F = values_on_circle(r.completion, G);
        for (auto& v : F) v = 1.0 - std::exp(-v);
        auto hc = fourier_coefficients(std::move(F));
        double neg = 0.0;
        for (std::size_t k = G / 2 + 1; k < G; ++k) neg += std::norm(hc[k]);
        hc.resize(G / 2 + 1);
        r.h = CoeffSeries(std::move(hc), std::sqrt(neg));

        RudinCertificate cert;
        detail::certify_grid(r.h, &r.completion, U, G, cert);
        cert.peak_deviation = detail::peak_deviation(r.h, E, 2 * G);
        cert.off_neighborhood_bound = bound;
        r.certified = cert;
        attempts.push_back({{"grid_size", G},
                            {"sup_bound", cert.sup_bound},
                            {"off_neighborhood_sup", cert.off_neighborhood_sup},
                            {"peak_deviation", cert.peak_deviation}});
        r.diagnostics = {{"widths", widths}, {"mass", u.mass}, {"grid_log2", q}, {"attempts", attempts}};
        bool ok = cert.sup_bound <= 2.0 + 1e-6 && cert.off_neighborhood_sup < eps &&
                  cert.peak_deviation <= std::exp(-peak) + opt.grid_tolerance;
        if (ok) return r;
        if (q >= opt.max_grid_log2) break;
    }
    fail(ErrorKind::construction, "Rudin function certification failed after grid doublings",
         {{"certified",
           {{"sup_bound", r.certified.sup_bound},
            {"off_neighborhood_sup", r.certified.off_neighborhood_sup},
            {"peak_deviation", r.certified.peak_deviation}}},
          {"attempts", attempts}});
}

/// Classical logarithmic capacity of a circular arc with the given central angle.
inline double arc_capacity(double central_angle) { return std::sin(std::min(central_angle, kTwoPi) / 4.0); }

struct EquilibriumOptions {
    std::size_t checkpoint_every = 50;
    double stop_tolerance = 1e-15;
};

namespace detail {

// Euclidean projection onto the probability simplex.
inline void project_simplex(std::vector<double>& x) {
    std::vector<double> s(x);
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0, tau = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        cum += s[i];
        double t = (cum - 1.0) / static_cast<double>(i + 1);
        if (s[i] - t > 0.0) tau = t;
    }
    for (auto& v : x) v = std::max(0.0, v - tau);
}

}  // namespace detail

/// Discrete equilibrium measure on arcs: minimises sum_{i != j} w_i w_j log(1/|x_i - x_j|) over the simplex,
/// with each node's diagonal term replaced by the self-energy of its cell.
inline DiscreteMeasure equilibrium_measure(const BoundarySet& arcs, std::size_t nodes_per_arc, std::size_t iterations,
                                           const EquilibriumOptions& opt = {}) {
    if (arcs.arcs.empty() || !(arcs.total_length() > 0.0))
        fail(ErrorKind::invalid_input, "equilibrium measure needs arcs of positive length");
    if (nodes_per_arc < 8) fail(ErrorKind::invalid_parameter, "nodes_per_arc must be at least 8");
    // Nodes as (arc, offset) so that differences inside tiny arcs keep full precision.
    std::vector<std::size_t> arc_of;
    std::vector<double> off, cell;
    const auto& A = arcs.arcs;
    for (std::size_t a = 0; a < A.size(); ++a) {
        for (std::size_t i = 0; i < nodes_per_arc; ++i) {
            double o;
            if (A[a].full()) {
                o = kTwoPi * static_cast<double>(i) / static_cast<double>(nodes_per_arc);
                cell.push_back(kTwoPi / static_cast<double>(nodes_per_arc));
            } else {
                double t = std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) /
                           (2.0 * static_cast<double>(nodes_per_arc));
                o = A[a].half_width * std::cos(t);
                cell.push_back(A[a].half_width * std::numbers::pi / static_cast<double>(nodes_per_arc) * std::sin(t));
            }
            arc_of.push_back(a);
            off.push_back(o);
        }
    }
    std::size_t n = off.size();
    std::vector<double> K(n * n, 0.0);
    double L = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double k;
            if (i == j) {
                // self-energy of the uniform measure on the node's cell
                k = 1.5 - std::log(cell[i]);
            } else {
                double d = angle_diff(A[arc_of[i]].center, A[arc_of[j]].center) + (off[i] - off[j]);
                k = -std::log(2.0 * std::abs(std::sin(d / 2.0)));
            }
            K[i * n + j] = k;
            row += std::abs(k);
        }
        L = std::max(L, 2.0 * row);
    }
    std::vector<double> w(n, 1.0 / static_cast<double>(n)), g(n);
    auto energy = [&](const std::vector<double>& x) {
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += K[i * n + j] * x[j];
            e += x[i] * s;
        }
        return e;
    };
    double last = energy(w);
    int rising = 0;
    std::size_t it = 0;
    for (; it < iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += K[i * n + j] * w[j];
            g[i] = 2.0 * s;
        }
        for (std::size_t i = 0; i < n; ++i) w[i] -= g[i] / L;
        detail::project_simplex(w);
        if ((it + 1) % opt.checkpoint_every == 0) {
            double e = energy(w);
            if (e > last + 1e-14 * std::abs(last)) {
                if (++rising >= 3)
                    fail(ErrorKind::convergence, "equilibrium energy failed to decrease at 3 checkpoints",
                         {{"energy", e}, {"iteration", it + 1}});
            } else {
                rising = 0;
            }
            bool stalled = std::abs(last - e) <= opt.stop_tolerance * std::max(1.0, std::abs(e));
            last = e;
            if (stalled) {
                ++it;
                break;
            }
        }
    }
    DiscreteMeasure mu;
    mu.iterations = it;
    mu.weights = w;
    for (std::size_t i = 0; i < n; ++i) mu.nodes.push_back(wrap_angle(A[arc_of[i]].center + off[i]));
    mu.energy = energy(w);
    mu.capacity = std::exp(-mu.energy);
    return mu;
}

struct DirichletRudinOptions {
    std::size_t truncation = 4096;
    std::size_t nodes_per_arc = 128;
    std::size_t iterations = 2000;
    int max_shrinks = 60;
    double shrink = 0.8;
    std::size_t grid = std::size_t{1} << 14;
};

/// Dirichlet-space Rudin function: h = 1 - exp(-F), F = sum_n c(E_n) f_{mu_n}, with E_n nested arcs around E.
inline RudinFunction dirichlet_rudin(const BoundarySet& E, const BoundarySet& U, double eps, int levels,
                                     const DirichletRudinOptions& opt = {}) {
    if (!(eps > 0.0)) fail(ErrorKind::invalid_parameter, "eps must be positive", {{"eps", eps}});
    if (levels < 2) fail(ErrorKind::invalid_parameter, "levels must be at least 2", {{"levels", levels}});
    if (!E.arcs.empty()) fail(ErrorKind::invalid_input, "Dirichlet Rudin functions need a finite point set E");
    if (E.points.empty()) return detail::zero_rudin(E, U, true);
    double room = std::numbers::pi;
    for (double p : E.points) {
        double r = detail::room_in({p, 0.0}, U);
        if (!(r > 0.0)) fail(ErrorKind::invalid_input, "E is not contained in U", {{"point", p}});
        room = std::min(room, r);
    }
    // Arcs around distinct points must stay disjoint.
    for (std::size_t i = 0; i < E.points.size(); ++i)
        for (std::size_t j = i + 1; j < E.points.size(); ++j)
            room = std::min(room, 0.45 * std::abs(angle_diff(E.points[i], E.points[j])));
    const double amax = 0.95 * room;
    const std::size_t N = opt.truncation;

    // Level weights are the energy capacities c_n = 1/I(mu_n), I(mu) = iint log(2/|x - y|) dmu dmu, so that
    // Re(c_n f_{mu_n}) ~ 1 on E_n and D(c_n f_{mu_n}) <= c_n. Budget: c_n^{1/2} <= B 2^{-n}.
    const double resolution = 1.0 / static_cast<double>(N);
    double B = 1.0;
    nlohmann::json tried = nlohmann::json::array();
    RudinFunction r;
    r.peak_set = E;
    r.neighborhood = U;
    for (int attempt = 0; attempt <= opt.max_shrinks; ++attempt, B *= opt.shrink) {
        std::vector<double> caps, halfw, energies;
        std::vector<cplx> F(N + 1, cplx{0.0});
        double csum = 0.0;
        auto add_level = [&](const std::vector<double>& nodes, const std::vector<double>& weights, double c) {
            F[0] += c * std::log(2.0);
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                double wi = weights[i] * c;
                if (wi == 0.0) continue;
                for (std::size_t k = 1; k <= N; ++k)
                    F[k] += wi * std::polar(1.0, -static_cast<double>(k) * nodes[i]) / static_cast<double>(k);
            }
        };
        for (int n = 1; n <= levels; ++n) {
            const double Itarget = std::pow(4.0, n) / (B * B);
            // single-arc relation: I = log 2 + log(1/sin(a/2))
            double a = std::min(amax, 2.0 * std::asin(std::min(1.0, 2.0 * std::exp(-Itarget))));
            if (!halfw.empty()) a = std::min(a, halfw.back());
            double I = Itarget;
            if (a >= resolution) {
                DiscreteMeasure mu;
                for (int shrink = 0; shrink < 200; ++shrink) {
                    BoundarySet En;
                    for (double p : E.points) En.arcs.push_back({p, a});
                    mu = equilibrium_measure(En, opt.nodes_per_arc, opt.iterations);
                    if (std::log(2.0) + mu.energy >= Itarget || a < resolution) break;
                    a *= 0.8;
                }
                I = std::max(Itarget, std::log(2.0) + mu.energy);
                add_level(mu.nodes, mu.weights, 1.0 / I);
            } else {
                // Arcs below the truncation resolution: the equilibrium measure is indistinguishable from equal
                // point masses at the points of E.
                std::vector<double> wts(E.points.size(), 1.0 / static_cast<double>(E.points.size()));
                add_level(E.points, wts, 1.0 / I);
            }
            energies.push_back(I);
            caps.push_back(1.0 / I);
            halfw.push_back(a);
            csum += 1.0 / I;
        }
        CoeffSeries Fs(F, csum / std::sqrt(static_cast<double>(N)));
        CoeffSeries h = exp_series(scale(Fs, -1.0), N);
        {
            std::vector<cplx> hc(h.coeffs());
            for (auto& c : hc) c = -c;
            hc[0] += 1.0;
            h = CoeffSeries(std::move(hc), h.tail_bound());
        }
        RudinCertificate cert;
        detail::certify_grid(h, &Fs, U, std::max(opt.grid, detail::next_pow2(4 * (N + 1))), cert);
        cert.peak_deviation = detail::peak_deviation(h, E, opt.grid);
        cert.dirichlet_energy = dirichlet_integral(h);
        double dF = dirichlet_integral(Fs);
        r.completion = Fs;
        r.h = h;
        r.certified = cert;
        tried.push_back({{"B", B}, {"capacities", caps}, {"energies", energies}, {"half_widths", halfw}, {"dirichlet_F", dF},
                         {"dirichlet_h", *cert.dirichlet_energy}, {"off_neighborhood_sup", cert.off_neighborhood_sup},
                         {"sup_bound", cert.sup_bound}});
        r.diagnostics = {{"budget_B", B}, {"levels", levels}, {"capacities", caps}, {"half_widths", halfw},
                         {"dirichlet_F", dF}, {"attempts", tried}};
        bool ok = *cert.dirichlet_energy <= eps && dF <= eps && cert.off_neighborhood_sup < eps &&
                  cert.sup_bound <= 2.0 + 1e-6;
        if (ok) return r;
    }
    fail(ErrorKind::construction, "capacity budget infeasible at the shrink cap", {{"attempts", tried}});
}

}  // namespace opa
