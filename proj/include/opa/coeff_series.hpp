#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <vector>

#include "opa/detail/fft.hpp"
#include "opa/errors.hpp"

namespace opa {

using cplx = std::complex<double>;

inline constexpr std::size_t kDefaultTruncation = 256;

/// Truncated Taylor series a_0 + a_1 z + ... + a_N z^N. tail_bound bounds the
/// H^2 norm of the discarded part; 0 means the series is an exact polynomial.
class CoeffSeries {
public:
    CoeffSeries() : coeffs_{cplx{0.0}} {}
    CoeffSeries(std::initializer_list<cplx> c) : coeffs_(c) { check(); }
    explicit CoeffSeries(std::vector<cplx> c, double tail_bound = 0.0)
        : coeffs_(std::move(c)), tail_(tail_bound) {
        check();
    }

    static CoeffSeries constant(cplx c) { return CoeffSeries(std::vector<cplx>{c}); }
    static CoeffSeries monomial(std::size_t k, cplx c = 1.0) {
        std::vector<cplx> v(k + 1, cplx{0.0});
        v[k] = c;
        return CoeffSeries(std::move(v));
    }

    const std::vector<cplx>& coeffs() const { return coeffs_; }
    std::size_t truncation_degree() const { return coeffs_.size() - 1; }
    std::size_t size() const { return coeffs_.size(); }
    double tail_bound() const { return tail_; }
    bool exact() const { return tail_ == 0.0; }

    cplx operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : cplx{0.0}; }

    bool is_zero() const {
        return tail_ == 0.0 &&
               std::all_of(coeffs_.begin(), coeffs_.end(), [](cplx c) { return c == cplx{0.0}; });
    }

    /// Index of the last nonzero coefficient (0 for the zero series).
    std::size_t effective_degree() const {
        std::size_t d = coeffs_.size() - 1;
        while (d > 0 && coeffs_[d] == cplx{0.0}) --d;
        return d;
    }

    double h2_norm() const {
        double s = 0.0;
        for (auto c : coeffs_) s += std::norm(c);
        return std::sqrt(s);
    }

    double l1_norm() const {
        double s = 0.0;
        for (auto c : coeffs_) s += std::abs(c);
        return s;
    }

private:
    void check() {
        if (coeffs_.empty()) fail(ErrorKind::invalid_input, "coefficient vector must be nonempty");
        if (!(tail_ >= 0.0) || !std::isfinite(tail_))
            fail(ErrorKind::invalid_input, "tail_bound must be a finite nonnegative number");
        for (auto c : coeffs_)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                fail(ErrorKind::invalid_input, "coefficients must be finite");
    }

    std::vector<cplx> coeffs_;
    double tail_ = 0.0;
};

inline CoeffSeries truncate(const CoeffSeries& a, std::size_t N) {
    if (N >= a.truncation_degree()) return a;
    std::vector<cplx> c(a.coeffs().begin(), a.coeffs().begin() + static_cast<std::ptrdiff_t>(N + 1));
    double dropped = 0.0;
    for (std::size_t k = N + 1; k < a.size(); ++k) dropped += std::norm(a[k]);
    return CoeffSeries(std::move(c), a.tail_bound() + std::sqrt(dropped));
}

inline CoeffSeries scale(const CoeffSeries& a, cplx s) {
    std::vector<cplx> c(a.coeffs());
    for (auto& x : c) x *= s;
    return CoeffSeries(std::move(c), a.tail_bound() * std::abs(s));
}

inline CoeffSeries add(const CoeffSeries& a, const CoeffSeries& b, cplx sb = 1.0) {
    std::size_t n = std::max(a.size(), b.size());
    std::vector<cplx> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = a[k] + sb * b[k];
    return CoeffSeries(std::move(c), a.tail_bound() + std::abs(sb) * b.tail_bound());
}

inline CoeffSeries subtract(const CoeffSeries& a, const CoeffSeries& b) { return add(a, b, -1.0); }

namespace detail {

inline std::vector<cplx> convolve(const std::vector<cplx>& a, const std::vector<cplx>& b, std::size_t n_out) {
    std::vector<cplx> out(n_out, cplx{0.0});
    std::size_t small = std::min(a.size(), b.size());
    if (small <= 64 || a.size() * b.size() <= (std::size_t{1} << 20)) {
        for (std::size_t i = 0; i < a.size() && i < n_out; ++i) {
            if (a[i] == cplx{0.0}) continue;
            std::size_t jmax = std::min(b.size(), n_out - i);
            for (std::size_t j = 0; j < jmax; ++j) out[i + j] += a[i] * b[j];
        }
        return out;
    }
    std::size_t L = next_pow2(a.size() + b.size() - 1);
    std::vector<cplx> fa(L, cplx{0.0}), fb(L, cplx{0.0});
    std::copy(a.begin(), a.end(), fa.begin());
    std::copy(b.begin(), b.end(), fb.begin());
    dft(fa, -1);
    dft(fb, -1);
    for (std::size_t k = 0; k < L; ++k) fa[k] *= fb[k];
    dft(fa, +1);
    double inv = 1.0 / static_cast<double>(L);
    for (std::size_t k = 0; k < n_out && k < L; ++k) out[k] = fa[k] * inv;
    return out;
}

}  // namespace detail

/// Cauchy product truncated at min(deg a + deg b, max_degree).
/// Tail: ||a||_1 tail(b) + ||b||_1 tail(a) + tail(a) tail(b) plus the H^2 mass of
/// coefficients cut by the degree cap (l1 norms bound the sup of the known parts).
inline CoeffSeries multiply(const CoeffSeries& a, const CoeffSeries& b,
                            std::size_t max_degree = kDefaultTruncation) {
    std::size_t full = a.truncation_degree() + b.truncation_degree();
    std::size_t N = std::min(full, max_degree);
    std::vector<cplx> c = detail::convolve(a.coeffs(), b.coeffs(), full + 1);
    double dropped = 0.0;
    for (std::size_t k = N + 1; k <= full; ++k) dropped += std::norm(c[k]);
    c.resize(N + 1);
    double tail = a.l1_norm() * b.tail_bound() + b.l1_norm() * a.tail_bound() +
                  a.tail_bound() * b.tail_bound() + std::sqrt(dropped);
    return CoeffSeries(std::move(c), tail);
}

/// Exact polynomial product (no degree cap).
inline CoeffSeries multiply_full(const CoeffSeries& a, const CoeffSeries& b) {
    return multiply(a, b, std::numeric_limits<std::size_t>::max());
}

/// exp(a) via n b_n = sum_{k=1}^n k a_k b_{n-k}, truncated at N (default: deg a).
inline CoeffSeries exp_series(const CoeffSeries& a, std::size_t N) {
    const auto& ac = a.coeffs();
    std::size_t da = a.truncation_degree();
    std::vector<cplx> b(N + 1, cplx{0.0});
    std::vector<double> maj(N + 1, 0.0);
    b[0] = std::exp(ac[0]);
    maj[0] = 1.0;
    double s1 = 0.0;
    for (std::size_t k = 1; k <= da; ++k) s1 += std::abs(ac[k]);
    for (std::size_t n = 1; n <= N; ++n) {
        cplx acc{0.0};
        double accm = 0.0;
        std::size_t kmax = std::min(n, da);
        for (std::size_t k = 1; k <= kmax; ++k) {
            double kk = static_cast<double>(k);
            acc += kk * ac[k] * b[n - k];
            accm += kk * std::abs(ac[k]) * maj[n - k];
        }
        double nn = static_cast<double>(n);
        b[n] = acc / nn;
        maj[n] = accm / nn;
    }
    // Majorant exp(Re a_0) exp(sum |a_k| z^k) bounds |b_n|; its remainder bounds the tail.
    double partial = 0.0;
    for (double m : maj) partial += m;
    double scale0 = std::exp(ac[0].real());
    double rem = std::max(0.0, std::exp(s1) - partial);
    rem += 4.0 * std::numeric_limits<double>::epsilon() * std::exp(s1);
    double tail = scale0 * rem;
    if (da == 0) tail = 0.0;
    if (a.tail_bound() > 0.0) tail += scale0 * std::exp(s1) * std::expm1(a.tail_bound());
    return CoeffSeries(std::move(b), tail);
}

inline CoeffSeries exp_series(const CoeffSeries& a) { return exp_series(a, a.truncation_degree()); }

inline cplx evaluate(const CoeffSeries& a, cplx z) {
    const auto& c = a.coeffs();
    cplx acc{0.0};
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
    return acc;
}

inline cplx evaluate_derivative(const CoeffSeries& a, cplx z) {
    const auto& c = a.coeffs();
    cplx acc{0.0};
    for (std::size_t k = c.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * c[k];
    return acc;
}

inline CoeffSeries dilate(const CoeffSeries& a, double r) {
    if (!(r > 0.0 && r <= 1.0)) fail(ErrorKind::invalid_parameter, "dilation radius must lie in (0, 1]", {{"r", r}});
    if (r == 1.0) return a;
    std::vector<cplx> c(a.coeffs());
    double rk = 1.0;
    for (auto& x : c) {
        x *= rk;
        rk *= r;
    }
    return CoeffSeries(std::move(c), a.tail_bound() * rk);
}

inline CoeffSeries derivative(const CoeffSeries& a) {
    if (a.truncation_degree() == 0) return CoeffSeries();
    std::vector<cplx> c(a.truncation_degree());
    for (std::size_t k = 1; k < a.size(); ++k) c[k - 1] = static_cast<double>(k) * a[k];
    return CoeffSeries(std::move(c));
}

/// Values sum_k a_k r^k e^{ik theta_j} at theta_j = 2 pi j / G (coefficients folded mod G).
inline std::vector<cplx> values_on_circle(const std::vector<cplx>& c, std::size_t G, double r = 1.0) {
    std::vector<cplx> x(G, cplx{0.0});
    double rk = 1.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        x[k % G] += c[k] * rk;
        if (r != 1.0) rk *= r;
    }
    detail::dft(x, +1);
    return x;
}

inline std::vector<cplx> values_on_circle(const CoeffSeries& a, std::size_t G, double r = 1.0) {
    return values_on_circle(a.coeffs(), G, r);
}

/// Discrete Fourier coefficients (1/G) sum_j x_j e^{-ik theta_j}.
inline std::vector<cplx> fourier_coefficients(std::vector<cplx> x) {
    detail::dft(x, -1);
    double inv = 1.0 / static_cast<double>(x.size());
    for (auto& v : x) v *= inv;
    return x;
}

enum class ZeroFreeStatus { zero_free, has_zeros, indeterminate };

inline const char* to_string(ZeroFreeStatus s) {
    switch (s) {
        case ZeroFreeStatus::zero_free: return "zero-free";
        case ZeroFreeStatus::has_zeros: return "has-zeros";
        case ZeroFreeStatus::indeterminate: return "indeterminate";
    }
    return "unknown";
}

struct ZeroFreeReport {
    bool zero_free = false;
    ZeroFreeStatus status = ZeroFreeStatus::indeterminate;
    long winding_number = 0;
    double min_modulus_on_circle = 0.0;
    std::size_t grid_size = 0;
    double lipschitz_margin = 0.0;
    bool circle_certified = false;
};

struct ZeroFreeOptions {
    std::size_t initial_grid = std::size_t{1} << 14;
    std::size_t max_grid = std::size_t{1} << 20;
};

/// Certified zero-freeness on the closed disc: winding number 0 and no circle zeros,
/// the latter proved by a Lipschitz margin on the grid.
inline ZeroFreeReport zero_free_on_closed_disc(const CoeffSeries& p, const ZeroFreeOptions& opt = {}) {
    if (!p.exact()) fail(ErrorKind::invalid_input, "zero-freeness certificate needs an exact polynomial");
    if (p.is_zero()) fail(ErrorKind::invalid_input, "polynomial is identically zero");

    std::size_t d = p.effective_degree();
    std::vector<cplx> c(p.coeffs().begin(), p.coeffs().begin() + static_cast<std::ptrdiff_t>(d + 1));
    std::vector<cplx> dc(d + 1, cplx{0.0});
    double l1 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k <= d; ++k) {
        double kk = static_cast<double>(k), m = std::abs(c[k]);
        l1 += m;
        s1 += kk * m;
        s2 += kk * kk * m;
        dc[k] = kk * c[k];
    }
    const double root_floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;

    ZeroFreeReport rep;
    std::size_t G = std::max(opt.initial_grid, std::size_t{16});
    for (;;) {
        auto v = values_on_circle(c, G);
        auto dv = values_on_circle(dc, G);
        double dtheta = 2.0 * std::numbers::pi / static_cast<double>(G);
        double minmod = std::numeric_limits<double>::infinity(), maxd = 0.0;
        bool local_ok = true;
        for (std::size_t j = 0; j < G; ++j) {
            double m = std::abs(v[j]);
            minmod = std::min(minmod, m);
            double dm = std::abs(dv[j]);
            maxd = std::max(maxd, dm);
            if (m <= dm * dtheta / 2.0 + s2 * dtheta * dtheta / 8.0) local_ok = false;
        }
        double L = std::min(s1, maxd + s2 * dtheta / 2.0);
        rep.grid_size = G;
        rep.min_modulus_on_circle = minmod;
        rep.lipschitz_margin = L * dtheta;
        bool global_ok = minmod > L * dtheta;
        if (global_ok || local_ok) {
            double total = 0.0;
            for (std::size_t j = 0; j < G; ++j) total += std::arg(v[(j + 1) % G] / v[j]);
            rep.winding_number = std::lround(total / (2.0 * std::numbers::pi));
            rep.circle_certified = true;
            rep.zero_free = rep.winding_number == 0;
            rep.status = rep.zero_free ? ZeroFreeStatus::zero_free : ZeroFreeStatus::has_zeros;
            return rep;
        }
        if (minmod <= root_floor) {
            rep.status = ZeroFreeStatus::has_zeros;
            rep.zero_free = false;
            return rep;
        }
        if (G >= opt.max_grid) {
            rep.status = ZeroFreeStatus::indeterminate;
            rep.zero_free = false;
            return rep;
        }
        G *= 2;
    }
}

}  // namespace opa
