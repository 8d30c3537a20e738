#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "opa/coeff_series.hpp"
#include "opa/errors.hpp"

namespace opa {

/// Coefficients of prod_i (|a_i|/a_i)(a_i - z)/(1 - conj(a_i) z) up to z^N (a_i = 0 gives z).
inline CoeffSeries blaschke_series(const std::vector<cplx>& zeros, std::size_t N) {
    double rmax = 0.0;
    for (auto a : zeros) {
        if (!(std::abs(a) < 1.0)) fail(ErrorKind::invalid_input, "Blaschke zeros must lie in the open unit disc");
        rmax = std::max(rmax, std::abs(a));
    }
    std::vector<cplx> acc(N + 1, cplx{0.0});
    acc[0] = 1.0;
    for (auto a : zeros) {
        std::vector<cplx> fac(N + 1, cplx{0.0});
        if (a == cplx{0.0}) {
            if (N >= 1) fac[1] = 1.0;
        } else {
            double m = std::abs(a);
            cplx phase = m / a;
            fac[0] = m;
            cplx ab = std::conj(a), p = 1.0;
            for (std::size_t k = 1; k <= N; ++k) {
                fac[k] = phase * p * (m * m - 1.0);
                p *= ab;
            }
        }
        std::vector<cplx> next(N + 1, cplx{0.0});
        for (std::size_t i = 0; i <= N; ++i) {
            if (acc[i] == cplx{0.0}) continue;
            for (std::size_t j = 0; i + j <= N; ++j) next[i + j] += acc[i] * fac[j];
        }
        acc = std::move(next);
    }
    // Cauchy estimate on |z| = rho with 1 < rho < 1/rmax: |b_k| <= max|B| rho^{-k}.
    double tail = 0.0;
    if (rmax > 0.0) {
        double rho = 0.5 * (1.0 + 1.0 / rmax), logm = 0.0;
        for (auto a : zeros) {
            double m = std::abs(a);
            if (m > 0.0) logm += std::log((m + rho) / (1.0 - m * rho));
            else logm += std::log(rho);
        }
        double lt = logm - static_cast<double>(N + 1) * std::log(rho) - 0.5 * std::log1p(-1.0 / (rho * rho));
        tail = std::min(1.0, std::exp(lt));
    }
    return CoeffSeries(std::move(acc), tail);
}

struct InnerOuterFactorization {
    cplx unimodular{1.0};
    std::vector<cplx> inner_zeros;
    CoeffSeries outer;
};

/// Roots of an exact polynomial via companion-matrix eigenvalues, clustered within `cluster`.
inline std::vector<cplx> polynomial_roots(const CoeffSeries& p, double cluster = 1e-8) {
    std::size_t d = p.effective_degree();
    std::vector<cplx> roots;
    std::size_t low = 0;
    while (low < d && p[low] == cplx{0.0}) ++low;
    for (std::size_t i = 0; i < low; ++i) roots.push_back(0.0);
    std::size_t m = d - low;
    if (m == 0) return roots;
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    cplx lead = p[d];
    for (std::size_t i = 0; i < m; ++i) C(0, static_cast<Eigen::Index>(i)) = -p[d - 1 - i] / lead;
    for (std::size_t i = 1; i < m; ++i) C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    std::vector<cplx> ev;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()(i));
    // Replace each cluster of nearby eigenvalues by its mean, keeping the multiplicity.
    std::vector<bool> used(ev.size(), false);
    for (std::size_t i = 0; i < ev.size(); ++i) {
        if (used[i]) continue;
        std::vector<std::size_t> members{i};
        used[i] = true;
        for (std::size_t j = i + 1; j < ev.size(); ++j)
            if (!used[j] && std::abs(ev[j] - ev[i]) < cluster) {
                used[j] = true;
                members.push_back(j);
            }
        cplx mean{0.0};
        for (auto j : members) mean += ev[j];
        mean /= static_cast<double>(members.size());
        for (std::size_t k = 0; k < members.size(); ++k) roots.push_back(mean);
    }
    return roots;
}

/// p = unimodular * B(inner_zeros) * outer, with (z - a) = B_a(z) * [-(a/|a|)(1 - conj(a) z)].
inline InnerOuterFactorization polynomial_inner_outer(const CoeffSeries& p, double tol = 1e-9) {
    if (!p.exact()) fail(ErrorKind::invalid_input, "inner-outer factorization needs an exact polynomial");
    if (p.is_zero()) fail(ErrorKind::invalid_input, "polynomial is identically zero");
    std::size_t d = p.effective_degree();
    std::vector<cplx> q(p.coeffs().begin(), p.coeffs().begin() + static_cast<std::ptrdiff_t>(d + 1));
    InnerOuterFactorization out;
    auto roots = polynomial_roots(p);
    for (auto a : roots) {
        double m = std::abs(a);
        if (std::abs(m - 1.0) <= tol)
            fail(ErrorKind::boundary_root, "polynomial has a root on the unit circle",
                 {{"root", {a.real(), a.imag()}}, {"tol", tol}});
    }
    std::sort(roots.begin(), roots.end(), [](cplx x, cplx y) { return std::abs(x) < std::abs(y); });
    for (auto a : roots) {
        if (std::abs(a) >= 1.0) continue;
        out.inner_zeros.push_back(a);
        // Synthetic division by (z - a), highest degree first.
        std::size_t n = q.size() - 1;
        std::vector<cplx> r(n);
        cplx carry{0.0};
        for (std::size_t k = n; k-- > 0;) {
            carry = q[k + 1] + carry * a;
            r[k] = carry;
        }
        if (a == cplx{0.0}) {
            q = std::move(r);
            continue;
        }
        cplx s = -a / std::abs(a), ab = std::conj(a);
        std::vector<cplx> nq(n + 1, cplx{0.0});
        for (std::size_t k = 0; k < n; ++k) {
            nq[k] += s * r[k];
            nq[k + 1] -= s * ab * r[k];
        }
        q = std::move(nq);
    }
    out.outer = CoeffSeries(std::move(q));
    out.unimodular = 1.0;
    return out;
}

}  // namespace opa
