#pragma once

#include <cmath>
#include <complex>

#include "opa/coeff_series.hpp"
#include "opa/errors.hpp"

namespace opa {

/// Dirichlet-type weight (k+1)^alpha, alpha in [0, 1]. 0 is Hardy, 1 is Dirichlet.
class AlphaWeight {
public:
    AlphaWeight() = default;
    explicit AlphaWeight(double alpha) : alpha_(alpha) {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            fail(ErrorKind::invalid_parameter, "alpha must lie in [0, 1]", {{"alpha", alpha}});
    }

    static AlphaWeight hardy() { return AlphaWeight(0.0); }
    static AlphaWeight dirichlet() { return AlphaWeight(1.0); }

    double alpha() const { return alpha_; }
    bool is_hardy() const { return alpha_ == 0.0; }
    bool is_dirichlet() const { return alpha_ == 1.0; }

    double operator()(std::size_t k) const {
        if (alpha_ == 0.0) return 1.0;
        if (alpha_ == 1.0) return static_cast<double>(k + 1);
        return std::pow(static_cast<double>(k + 1), alpha_);
    }

private:
    double alpha_ = 0.0;
};

inline cplx inner_product_alpha(const CoeffSeries& a, const CoeffSeries& b, const AlphaWeight& w) {
    std::size_t n = std::min(a.size(), b.size());
    cplx s{0.0};
    for (std::size_t k = 0; k < n; ++k) s += w(k) * a[k] * std::conj(b[k]);
    return s;
}

inline double norm_alpha(const CoeffSeries& a, const AlphaWeight& w) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += w(k) * std::norm(a[k]);
    return std::sqrt(s);
}

/// Bound on |<a,b> - stored value| from the tails, with tails read as D_alpha-norm bounds.
inline double inner_product_error_bound(const CoeffSeries& a, const CoeffSeries& b, const AlphaWeight& w) {
    double ta = a.tail_bound(), tb = b.tail_bound();
    return norm_alpha(a, w) * tb + norm_alpha(b, w) * ta + ta * tb;
}

/// (1/pi) int_D |f'|^2 dA = sum_k k |a_k|^2.
inline double dirichlet_integral(const CoeffSeries& a) {
    double s = 0.0;
    for (std::size_t k = 1; k < a.size(); ++k) s += static_cast<double>(k) * std::norm(a[k]);
    return s;
}

}  // namespace opa
