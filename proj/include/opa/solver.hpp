#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "opa/boundary.hpp"
#include "opa/coeff_series.hpp"
#include "opa/errors.hpp"
#include "opa/spaces.hpp"

namespace opa {

/// Normal equations A M = C with M_{jk} = <z^j f, z^k f>_alpha, C = (conj f(0), 0, ..., 0).
struct GramSystem {
    Eigen::MatrixXcd M;
    Eigen::VectorXcd C;
    std::size_t n = 0;
    AlphaWeight weight;
    double entry_error_bound = 0.0;
};

struct OpaResult {
    CoeffSeries Q;
    double residual = 1.0;
    double residual_projection = 1.0;
    double condition_estimate = 1.0;
    std::size_t n = 0;
    AlphaWeight weight;
};

namespace detail {

// R(t) = sum_l f_l conj(f_{l+t}) and S(t) = sum_l l f_l conj(f_{l+t}) for t = 0..tmax.
inline void shift_correlations(const CoeffSeries& f, std::size_t tmax, bool want_s, std::vector<cplx>& R,
                               std::vector<cplx>& S) {
    const auto& c = f.coeffs();
    std::size_t d = f.truncation_degree();
    R.assign(tmax + 1, cplx{0.0});
    S.assign(want_s ? tmax + 1 : 0, cplx{0.0});
    std::size_t tlim = std::min(tmax, d);
    if ((d + 1) * (tlim + 1) <= (std::size_t{1} << 22)) {
        for (std::size_t t = 0; t <= tlim; ++t) {
            cplx r{0.0}, s{0.0};
            for (std::size_t l = 0; l + t <= d; ++l) {
                cplx p = c[l] * std::conj(c[l + t]);
                r += p;
                if (want_s) s += static_cast<double>(l) * p;
            }
            R[t] = r;
            if (want_s) S[t] = s;
        }
        return;
    }
    std::size_t L = next_pow2(2 * (d + 1));
    std::vector<cplx> F(L, cplx{0.0});
    std::copy(c.begin(), c.end(), F.begin());
    dft(F, -1);
    std::vector<cplx> a(L);
    for (std::size_t k = 0; k < L; ++k) a[k] = std::norm(F[k]);
    dft(a, +1);
    double inv = 1.0 / static_cast<double>(L);
    for (std::size_t t = 0; t <= tlim; ++t) R[t] = std::conj(a[t]) * inv;
    if (want_s) {
        std::vector<cplx> g(L, cplx{0.0});
        for (std::size_t l = 0; l <= d; ++l) g[l] = static_cast<double>(l) * c[l];
        dft(g, -1);
        for (std::size_t k = 0; k < L; ++k) g[k] = F[k] * std::conj(g[k]);
        dft(g, +1);
        for (std::size_t t = 0; t <= tlim; ++t) S[t] = std::conj(g[t]) * inv;
    }
}

inline void check_order(const CoeffSeries& f, std::size_t n) {
    if (f.is_zero() || std::all_of(f.coeffs().begin(), f.coeffs().end(), [](cplx c) { return c == cplx{0.0}; }))
        fail(ErrorKind::invalid_input, "f is identically zero");
    if (!f.exact() && f.truncation_degree() < n + 128)
        fail(ErrorKind::invalid_input, "truncated f needs truncation degree >= n + 128",
             {{"n", n}, {"truncation_degree", f.truncation_degree()}});
}

}  // namespace detail

inline GramSystem gram_matrix(const CoeffSeries& f, std::size_t n, const AlphaWeight& w = {}) {
    detail::check_order(f, n);
    GramSystem g;
    g.n = n;
    g.weight = w;
    g.M.resize(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n + 1));
    g.C = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n + 1));
    g.C(0) = std::conj(f[0]);
    const auto& c = f.coeffs();
    std::size_t d = f.truncation_degree();

    auto set = [&](std::size_t j, std::size_t k, cplx v) {
        auto J = static_cast<Eigen::Index>(j), K = static_cast<Eigen::Index>(k);
        g.M(J, K) = v;
        if (j != k) g.M(K, J) = std::conj(v);
        else g.M(J, J) = v.real();
    };

    if (w.is_hardy() || w.is_dirichlet()) {
        std::vector<cplx> R, S;
        detail::shift_correlations(f, n, w.is_dirichlet(), R, S);
        for (std::size_t j = 0; j <= n; ++j)
            for (std::size_t k = 0; k <= j; ++k) {
                std::size_t t = j - k;
                cplx v = w.is_hardy() ? R[t] : static_cast<double>(j + 1) * R[t] + S[t];
                set(j, k, v);
            }
    } else {
        for (std::size_t j = 0; j <= n; ++j)
            for (std::size_t k = 0; k <= j; ++k) {
                std::size_t t = j - k;
                cplx v{0.0};
                for (std::size_t l = 0; l + t <= d; ++l) v += w(l + j) * c[l] * std::conj(c[l + t]);
                set(j, k, v);
            }
    }
    if (!f.exact()) {
        double tail = f.tail_bound();
        g.entry_error_bound = w(d + n + 1) * (2.0 * f.h2_norm() * tail + tail * tail);
    }
    return g;
}

/// Levinson recursion for the Hermitian Toeplitz system M_m x = e_0, one order at a time.
/// column[t] = M_{t,0}.
class ToeplitzSweep {
public:
    explicit ToeplitzSweep(std::vector<cplx> column) : col_(std::move(column)) {
        if (col_.empty() || !(col_[0].real() > 0.0)) fail(ErrorKind::invalid_input, "Toeplitz diagonal must be positive");
        y_.assign(1, cplx{1.0});
        err_ = col_[0].real();
        err0_ = err_;
    }

    std::size_t order() const { return y_.size() - 1; }
    double prediction_error() const { return err_; }
    double condition_estimate() const { return err0_ / err_; }

    /// Solution of M_m x = e_0 at the current order m.
    std::vector<cplx> solution() const {
        std::vector<cplx> x(y_.size());
        for (std::size_t i = 0; i < y_.size(); ++i) x[i] = y_[i] / err_;
        return x;
    }

    void advance() {
        std::size_t m = order();
        if (m + 1 >= col_.size()) fail(ErrorKind::invalid_input, "Toeplitz column too short for requested order");
        cplx beta{0.0};
        for (std::size_t j = 0; j <= m; ++j) beta += col_[m + 1 - j] * y_[j];
        cplx kappa = -beta / err_;
        std::vector<cplx> next(m + 2);
        for (std::size_t j = 0; j <= m + 1; ++j) {
            cplx a = j <= m ? y_[j] : cplx{0.0};
            cplx b = j >= 1 ? std::conj(y_[m + 1 - j]) : cplx{0.0};
            next[j] = a + kappa * b;
        }
        y_ = std::move(next);
        err_ *= (1.0 - std::norm(kappa));
    }

private:
    std::vector<cplx> col_;
    std::vector<cplx> y_;
    double err_ = 1.0;
    double err0_ = 1.0;
};

/// First column of the alpha = 0 Gram matrix (length n_max + 2).
inline std::vector<cplx> hardy_gram_column(const CoeffSeries& f, std::size_t n_max) {
    std::vector<cplx> R, S;
    detail::shift_correlations(f, n_max + 1, false, R, S);
    return R;
}

namespace detail {

inline OpaResult finish_opa(const CoeffSeries& f, std::size_t n, const AlphaWeight& w,
                            const std::vector<cplx>& A, double cond) {
    OpaResult r;
    r.n = n;
    r.weight = w;
    r.Q = CoeffSeries(A);
    r.condition_estimate = cond;
    CoeffSeries qf = multiply_full(r.Q, CoeffSeries(f.coeffs()));
    std::vector<cplx> e(qf.coeffs());
    e[0] -= 1.0;
    r.residual = norm_alpha(CoeffSeries(std::move(e)), w);
    double proj = 1.0 - (A[0] * f[0]).real() * w(0);
    r.residual_projection = std::sqrt(std::max(0.0, proj));
    return r;
}

}  // namespace detail

inline std::vector<double> cholesky_pivots(const Eigen::MatrixXcd& M) {
    Eigen::LLT<Eigen::MatrixXcd> llt(M);
    std::vector<double> piv;
    if (llt.info() != Eigen::Success) return piv;
    Eigen::MatrixXcd L = llt.matrixL();
    for (Eigen::Index i = 0; i < L.rows(); ++i) piv.push_back(std::norm(L(i, i)));
    return piv;
}

struct OpaOptions {
    // alpha = 0 orders at or above this use the Levinson recursion.
    std::size_t levinson_threshold = 128;
    bool force_dense = false;
};

inline OpaResult opa_solve_dense(const CoeffSeries& f, std::size_t n, const AlphaWeight& w = {}) {
    GramSystem g = gram_matrix(f, n, w);
    double trace = g.M.diagonal().real().sum();
    Eigen::LLT<Eigen::MatrixXcd> llt(g.M);
    Eigen::MatrixXcd L = llt.matrixL();
    double pmin = std::numeric_limits<double>::infinity(), pmax = 0.0;
    bool ok = llt.info() == Eigen::Success;
    for (Eigen::Index i = 0; ok && i < L.rows(); ++i) {
        double p = std::norm(L(i, i));
        pmin = std::min(pmin, p);
        pmax = std::max(pmax, p);
    }
    double cond = ok ? pmax / pmin : std::numeric_limits<double>::infinity();
    if (!ok || pmin < 1e-13 * trace)
        fail(ErrorKind::ill_conditioned, "Gram matrix is numerically singular",
             {{"condition_estimate", ok ? cond : -1.0}, {"n", n}});
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(g.M.rows());
    rhs(0) = f[0];
    Eigen::VectorXcd y = llt.solve(rhs);
    std::vector<cplx> A(n + 1);
    for (std::size_t i = 0; i <= n; ++i) A[i] = std::conj(y(static_cast<Eigen::Index>(i)));
    return detail::finish_opa(f, n, w, A, cond);
}

inline OpaResult opa_from_sweep(const CoeffSeries& f, const ToeplitzSweep& sweep) {
    auto x = sweep.solution();
    std::vector<cplx> A(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) A[i] = std::conj(f[0]) * std::conj(x[i]);
    return detail::finish_opa(f, sweep.order(), AlphaWeight::hardy(), A, sweep.condition_estimate());
}

inline void check_sweep_pivot(const ToeplitzSweep& s, double c0) {
    if (!(s.prediction_error() > 1e-13 * c0 * static_cast<double>(s.order() + 1)))
        fail(ErrorKind::ill_conditioned, "Gram matrix is numerically singular",
             {{"condition_estimate", s.condition_estimate()}, {"n", s.order()}});
}

inline OpaResult opa_solve(const CoeffSeries& f, std::size_t n, const AlphaWeight& w = {}, const OpaOptions& opt = {}) {
    detail::check_order(f, n);
    if (!w.is_hardy() || opt.force_dense || n < opt.levinson_threshold) return opa_solve_dense(f, n, w);
    auto col = hardy_gram_column(f, n);
    ToeplitzSweep s(col);
    while (s.order() < n) {
        s.advance();
        check_sweep_pivot(s, col[0].real());
    }
    return opa_from_sweep(f, s);
}

struct ProfileRow {
    std::size_t n = 0;
    double residual = 0.0;
    double sup_circle = 0.0;
    double max_interior = 0.0;
};

/// Per-order residual and errors |Q_n - 1/f| on circle probes and interior probes.
inline std::vector<ProfileRow> convergence_profile(const CoeffSeries& f, std::size_t n_max, const AlphaWeight& w,
                                                   const BoundarySet& probes, const std::vector<cplx>& disc_probes) {
    detail::check_order(f, n_max);
    std::vector<cplx> zc;
    for (double t : probes.samples()) zc.push_back(std::polar(1.0, t));
    std::vector<cplx> inv_c, inv_d;
    for (auto z : zc) inv_c.push_back(1.0 / evaluate(f, z));
    for (auto z : disc_probes) inv_d.push_back(1.0 / evaluate(f, z));

    std::vector<ProfileRow> rows;
    auto record = [&](const OpaResult& r) {
        ProfileRow row;
        row.n = r.n;
        row.residual = r.residual;
        for (std::size_t i = 0; i < zc.size(); ++i)
            row.sup_circle = std::max(row.sup_circle, std::abs(evaluate(r.Q, zc[i]) - inv_c[i]));
        for (std::size_t i = 0; i < disc_probes.size(); ++i)
            row.max_interior = std::max(row.max_interior, std::abs(evaluate(r.Q, disc_probes[i]) - inv_d[i]));
        rows.push_back(row);
    };
    if (w.is_hardy() && n_max >= 32) {
        auto col = hardy_gram_column(f, n_max);
        ToeplitzSweep s(col);
        for (;;) {
            record(opa_from_sweep(f, s));
            if (s.order() >= n_max) break;
            s.advance();
            check_sweep_pivot(s, col[0].real());
        }
    } else {
        for (std::size_t n = 0; n <= n_max; ++n) record(opa_solve_dense(f, n, w));
    }
    return rows;
}

}  // namespace opa
