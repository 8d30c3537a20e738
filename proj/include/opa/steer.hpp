#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "opa/blaschke.hpp"
#include "opa/boundary.hpp"
#include "opa/coeff_series.hpp"
#include "opa/errors.hpp"
#include "opa/solver.hpp"
#include "opa/spaces.hpp"
#include "opa/zerofree.hpp"

namespace opa {

inline constexpr std::size_t kSearchCap = 16384;

namespace detail {

inline double sup_error(const std::vector<cplx>& A, const std::vector<cplx>& zs, const std::vector<cplx>& target) {
    double e = 0.0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        cplx acc{0.0};
        for (std::size_t k = A.size(); k-- > 0;) acc = acc * zs[i] + A[k];
        e = std::max(e, std::abs(acc - target[i]));
    }
    return e;
}

}  // namespace detail

/// Smallest probed m with sup_E |Q_m(1/P) - target| < tol. At alpha = 0 every m is probed
/// through one Levinson sweep; otherwise doubling then bisection on dense solves.
inline std::size_t opa_search_m(const CoeffSeries& P, const std::vector<cplx>& target, const BoundarySet& E, double tol,
                                const AlphaWeight& w = {}, std::size_t cap = kSearchCap) {
    if (!(tol > 0.0)) fail(ErrorKind::invalid_parameter, "tolerance must be positive");
    if (E.empty()) fail(ErrorKind::invalid_input, "empty boundary set");
    auto angles = E.samples();
    if (target.size() != angles.size()) fail(ErrorKind::invalid_input, "one target value per sample of E is required");
    std::vector<cplx> zs;
    for (double t : angles) zs.push_back(std::polar(1.0, t));
    double best = std::numeric_limits<double>::infinity();

    if (w.is_hardy()) {
        auto col = hardy_gram_column(P, cap);
        ToeplitzSweep s(col);
        const cplx f0c = std::conj(P[0]);
        for (;;) {
            auto x = s.solution();
            for (auto& v : x) v = f0c * std::conj(v);
            double e = detail::sup_error(x, zs, target);
            best = std::min(best, e);
            if (e < tol) return s.order();
            if (s.order() >= cap) break;
            s.advance();
            check_sweep_pivot(s, col[0].real());
        }
    } else {
        auto err_at = [&](std::size_t m) {
            auto r = opa_solve_dense(P, m, w);
            double e = detail::sup_error(r.Q.coeffs(), zs, target);
            best = std::min(best, e);
            return e;
        };
        if (err_at(0) < tol) return 0;
        std::size_t lo = 0, hi = 1;
        while (hi <= cap && !(err_at(hi) < tol)) {
            lo = hi;
            hi *= 2;
        }
        if (hi <= cap) {
            while (hi - lo > 1) {
                std::size_t mid = lo + (hi - lo) / 2;
                if (err_at(mid) < tol) hi = mid;
                else lo = mid;
            }
            return hi;
        }
    }
    fail(ErrorKind::search_budget, "o.p.a. order search exceeded its cap", {{"cap", cap}, {"best_error", best}});
}

struct SteerOptions {
    ZeroFreeApproxOptions zerofree;
    std::size_t search_cap = kSearchCap;
    std::size_t extra_terms = 256;
    int delta_halvings = 6;
};

struct SteerResult {
    cplx sigma{1.0};
    std::vector<cplx> inner_zeros;
    CoeffSeries P;
    CoeffSeries h;
    CoeffSeries F_coeffs;
    std::size_t m = 0;
    CoeffSeries Q_m;
    double norm_error = 0.0;
    double boundary_error = 0.0;
    double isometry_bound = 0.0;
    double identity_deviation = 0.0;
    double reciprocal_error = 0.0;
    double delta = 0.0;
    ZeroFreeApproxResult zero_free;
    nlohmann::json diagnostics = nlohmann::json::object();
};

/// F = sigma f_I P with ||F - f|| < eps and sup_E |Q_m(1/F) - g| < eps.
inline SteerResult steer(const CoeffSeries& f, const CoeffSeries& g, const BoundarySet& E, double eps, Space space,
                         const SteerOptions& opt = {}) {
    if (!(eps > 0.0)) fail(ErrorKind::invalid_parameter, "eps must be positive", {{"eps", eps}});
    if (!f.exact() || !g.exact()) fail(ErrorKind::invalid_input, "f and g must be exact polynomials");
    if (f.is_zero()) fail(ErrorKind::invalid_input, "f is identically zero");
    if (g.is_zero()) fail(ErrorKind::invalid_input, "g is identically zero");
    if (f[0] == cplx{0.0}) fail(ErrorKind::invalid_input, "f(0) = 0; steering needs f(0) != 0");
    if (E.empty()) fail(ErrorKind::invalid_input, "boundary set E is empty");
    if (E.positive_measure())
        fail(ErrorKind::invalid_input, "E has positive measure; only finite point sets are accepted",
             {{"total_length", E.total_length()}});
    const AlphaWeight w = weight_of(space);

    std::vector<double> pts = E.points;
    std::vector<cplx> gv, recip;
    double gmax = 0.0;
    for (double p : pts) {
        cplx v = evaluate(g, std::polar(1.0, p));
        if (std::abs(v) <= 1e-300) fail(ErrorKind::invalid_input, "g vanishes at a point of E", {{"theta", p}});
        gv.push_back(v);
        recip.push_back(1.0 / v);
        gmax = std::max(gmax, std::abs(v));
    }

    SteerResult res;
    auto fac = polynomial_inner_outer(f);
    if (space == Space::dirichlet && !fac.inner_zeros.empty())
        fail(ErrorKind::invalid_input, "Dirichlet steering is limited to f without zeros in the disc",
             {{"inner_zeros", fac.inner_zeros.size()}});
    cplx fI0 = fac.unimodular;
    for (auto a : fac.inner_zeros) fI0 *= std::abs(a);
    res.sigma = std::conj(fI0);
    res.inner_zeros = fac.inner_zeros;
    res.h = scale(fac.outer, fac.unimodular / res.sigma);

    std::vector<std::pair<double, cplx>> target;
    for (std::size_t i = 0; i < pts.size(); ++i) target.emplace_back(pts[i], recip[i]);

    // |P - 1/g| < delta gives |g - 1/P| ~ delta |g|^2; refine until measured below eps/2.
    double delta = 0.5 * (eps / 2.0) / (gmax * gmax);
    nlohmann::json deltas = nlohmann::json::array();
    bool ok = false;
    for (int k = 0; k <= opt.delta_halvings; ++k, delta *= 0.5) {
        auto zopt = opt.zerofree;
        const double beps = std::min(eps, delta);
        zopt.boundary_eps = beps;
        res.zero_free = simultaneous_zero_free(res.h, target, E, eps, space, zopt);
        double rec = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            rec = std::max(rec, std::abs(gv[i] - 1.0 / evaluate(res.zero_free.P, std::polar(1.0, pts[i]))));
        deltas.push_back(nlohmann::json{{"delta", beps}, {"reciprocal_error", rec}});
        res.reciprocal_error = rec;
        res.delta = beps;
        if (rec < eps / 2.0) {
            ok = true;
            break;
        }
    }
    if (!ok)
        fail(ErrorKind::approximation_budget, "could not bring |g - 1/P| below eps/2 on E", {{"attempts", deltas}});
    res.P = res.zero_free.P;

    // 1/P on E and the order m.
    std::vector<cplx> invP;
    for (double t : E.samples()) invP.push_back(1.0 / evaluate(res.P, std::polar(1.0, t)));
    res.m = opa_search_m(res.P, invP, E, eps / 2.0, w, opt.search_cap);

    std::size_t N = std::max(res.P.truncation_degree(), res.m) + opt.extra_terms;
    CoeffSeries B = blaschke_series(res.inner_zeros, N);
    res.F_coeffs = scale(multiply(B, res.P, N), res.sigma);

    auto onF = opa_solve(res.F_coeffs, res.m, w);
    auto onP = opa_solve(res.P, res.m, w);
    res.Q_m = onF.Q;
    for (std::size_t k = 0; k <= res.m; ++k)
        res.identity_deviation = std::max(res.identity_deviation, std::abs(onF.Q[k] - onP.Q[k]));

    res.norm_error = norm_alpha(subtract(CoeffSeries(res.F_coeffs.coeffs()), f), w) + res.F_coeffs.tail_bound();
    res.isometry_bound = norm_alpha(subtract(res.P, res.h), w);
    for (std::size_t i = 0; i < pts.size(); ++i)
        res.boundary_error = std::max(res.boundary_error, std::abs(evaluate(res.Q_m, std::polar(1.0, pts[i])) - gv[i]));
    res.diagnostics = {{"delta_refinement", deltas},
                       {"f_inner_at_zero", {fI0.real(), fI0.imag()}},
                       {"blaschke_tail_bound", B.tail_bound()},
                       {"residual_F", onF.residual},
                       {"residual_P", onP.residual},
                       {"boundary_error_via_P", [&] {
                            double e = 0.0;
                            for (std::size_t i = 0; i < pts.size(); ++i)
                                e = std::max(e, std::abs(evaluate(onP.Q, std::polar(1.0, pts[i])) - gv[i]));
                            return e;
                        }()}};
    return res;
}

}  // namespace opa
