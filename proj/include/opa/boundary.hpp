#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "opa/coeff_series.hpp"
#include "opa/errors.hpp"

namespace opa {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double wrap_angle(double t) {
    double r = std::fmod(t, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

/// Signed angular difference a - b in (-pi, pi].
inline double angle_diff(double a, double b) {
    double d = std::remainder(a - b, kTwoPi);
    return d == -std::numbers::pi ? std::numbers::pi : d;
}

inline double chord(double angle) { return 2.0 * std::sin(std::min(std::abs(angle), std::numbers::pi) / 2.0); }

struct Arc {
    double center = 0.0;
    double half_width = 0.0;

    bool full() const { return half_width >= std::numbers::pi; }
    bool contains(double theta, double slack = 0.0) const {
        return full() || std::abs(angle_diff(theta, center)) <= half_width + slack;
    }
};

/// Closed subset of the unit circle made of points and arcs (angles in radians).
struct BoundarySet {
    std::vector<double> points;
    std::vector<Arc> arcs;
    double sample_density = 256.0;

    bool empty() const { return points.empty() && arcs.empty(); }
    bool positive_measure() const { return !arcs.empty(); }

    double total_length() const {
        double s = 0.0;
        for (const auto& a : arcs) s += 2.0 * std::min(a.half_width, std::numbers::pi);
        return std::min(s, kTwoPi);
    }

    bool contains(double theta, double slack = 1e-12) const {
        for (double p : points)
            if (std::abs(angle_diff(theta, p)) <= slack) return true;
        for (const auto& a : arcs)
            if (a.contains(theta, slack)) return true;
        return false;
    }

    /// Samples of a single arc at sample_density, endpoints included.
    std::vector<double> arc_samples(const Arc& a) const {
        std::vector<double> out;
        if (a.full()) {
            auto n = static_cast<std::size_t>(std::max(8.0, std::ceil(kTwoPi * sample_density)));
            for (std::size_t j = 0; j < n; ++j) out.push_back(kTwoPi * static_cast<double>(j) / static_cast<double>(n));
            return out;
        }
        auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(2.0 * a.half_width * sample_density)));
        for (std::size_t j = 0; j <= n; ++j)
            out.push_back(wrap_angle(a.center - a.half_width + 2.0 * a.half_width * static_cast<double>(j) / static_cast<double>(n)));
        return out;
    }

    /// Grid spacing used on arcs (0 for point-only sets).
    double arc_spacing() const {
        double h = 0.0;
        for (const auto& a : arcs) {
            if (a.full()) {
                h = std::max(h, kTwoPi / std::max(8.0, std::ceil(kTwoPi * sample_density)));
            } else {
                h = std::max(h, 2.0 * a.half_width / std::max(1.0, std::ceil(2.0 * a.half_width * sample_density)));
            }
        }
        return h;
    }

    std::vector<double> samples() const {
        std::vector<double> out(points.begin(), points.end());
        for (const auto& a : arcs) {
            auto s = arc_samples(a);
            out.insert(out.end(), s.begin(), s.end());
        }
        return out;
    }

    static BoundarySet from_points(std::vector<double> pts, double density = 256.0) {
        BoundarySet e;
        e.points = std::move(pts);
        e.sample_density = density;
        return normalized(std::move(e));
    }

    static BoundarySet full_circle(double density) {
        BoundarySet e;
        e.arcs.push_back({std::numbers::pi, std::numbers::pi});
        e.sample_density = density;
        return e;
    }

    static BoundarySet normalized(BoundarySet e);
};

namespace detail {

// Merge circular intervals [lo, hi] (lo in [0, 2pi), hi > lo) into disjoint arcs.
inline std::vector<Arc> merge_intervals(std::vector<std::pair<double, double>> iv) {
    std::vector<Arc> out;
    if (iv.empty()) return out;
    for (auto& [lo, hi] : iv)
        if (hi - lo >= kTwoPi) return {Arc{std::numbers::pi, std::numbers::pi}};
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> m;
    for (const auto& x : iv) {
        if (!m.empty() && x.first <= m.back().second)
            m.back().second = std::max(m.back().second, x.second);
        else
            m.push_back(x);
    }
    // Wrap-around: the last interval may reach past 2 pi into the first ones.
    while (m.size() > 1 && m.back().second - kTwoPi >= m.front().first) {
        double hi = std::max(m.back().second, m.front().second + kTwoPi);
        m.back().second = hi;
        m.erase(m.begin());
    }
    for (const auto& [lo, hi] : m) {
        if (hi - lo >= kTwoPi) return {Arc{std::numbers::pi, std::numbers::pi}};
        out.push_back(Arc{wrap_angle((lo + hi) / 2.0), (hi - lo) / 2.0});
    }
    std::sort(out.begin(), out.end(), [](const Arc& a, const Arc& b) { return a.center < b.center; });
    return out;
}

}  // namespace detail

inline BoundarySet BoundarySet::normalized(BoundarySet e) {
    if (!(e.sample_density > 0.0) || !std::isfinite(e.sample_density))
        fail(ErrorKind::invalid_parameter, "sample_density must be positive");
    std::vector<std::pair<double, double>> iv;
    for (const auto& a : e.arcs) {
        if (!(a.half_width > 0.0) || !std::isfinite(a.half_width) || !std::isfinite(a.center))
            fail(ErrorKind::invalid_input, "arc half-widths must be positive and finite");
        double lo = wrap_angle(a.center - a.half_width);
        iv.emplace_back(lo, lo + 2.0 * a.half_width);
    }
    e.arcs = detail::merge_intervals(std::move(iv));
    std::vector<double> pts;
    for (double p : e.points) {
        if (!std::isfinite(p)) fail(ErrorKind::invalid_input, "point angles must be finite");
        double w = wrap_angle(p);
        bool covered = std::any_of(e.arcs.begin(), e.arcs.end(), [&](const Arc& a) { return a.contains(w); });
        bool dup = std::any_of(pts.begin(), pts.end(), [&](double q) { return std::abs(angle_diff(q, w)) < 1e-15; });
        if (!covered && !dup) pts.push_back(w);
    }
    std::sort(pts.begin(), pts.end());
    e.points = std::move(pts);
    return e;
}

/// Open neighbourhood: arcs of half-width `width` around every point, arcs widened by `width`.
inline BoundarySet neighborhood(const BoundarySet& E, double width) {
    if (!(width > 0.0)) fail(ErrorKind::invalid_parameter, "neighborhood width must be positive", {{"width", width}});
    BoundarySet u;
    u.sample_density = E.sample_density;
    for (double p : E.points) u.arcs.push_back({p, width});
    for (const auto& a : E.arcs) u.arcs.push_back({a.center, std::min(a.half_width + width, std::numbers::pi)});
    return BoundarySet::normalized(std::move(u));
}

/// Upper bound for sup_E |a|: exact values at the points; on arcs, the maximum over the global grid
/// 2 pi j / n (n from sample_density) within h/2 of the arcs, plus L h/2 with L = sum k|a_k|.
/// Grids nest under inclusion, so the bound is monotone in E.
inline double sup_on_set(const CoeffSeries& a, const BoundarySet& E) {
    if (E.empty()) fail(ErrorKind::invalid_input, "sup over an empty set");
    double m = 0.0;
    for (double t : E.points) m = std::max(m, std::abs(evaluate(a, std::polar(1.0, t))));
    if (!E.arcs.empty()) {
        auto n = static_cast<long long>(std::max(8.0, std::ceil(kTwoPi * E.sample_density)));
        double h = kTwoPi / static_cast<double>(n);
        for (const auto& arc : E.arcs) {
            long long lo = 0, hi = n - 1;
            if (!arc.full()) {
                lo = static_cast<long long>(std::ceil((arc.center - arc.half_width - h / 2.0) / h));
                hi = static_cast<long long>(std::floor((arc.center + arc.half_width + h / 2.0) / h));
            }
            for (long long j = lo; j <= hi; ++j)
                m = std::max(m, std::abs(evaluate(a, std::polar(1.0, h * static_cast<double>(j)))));
        }
        double L = 0.0;
        for (std::size_t k = 1; k < a.size(); ++k) L += static_cast<double>(k) * std::abs(a[k]);
        m += L * h / 2.0;
    }
    return m;
}

struct PiecewisePartition {
    struct Piece {
        BoundarySet set;
        cplx v;
        double representative = 0.0;
    };
    std::vector<Piece> pieces;
    double epsilon = 0.0;
    std::size_t k = 0;
};

namespace detail {

// Intersection of a closed arc with the circular interval [lo, hi) (hi - lo <= 2 pi).
inline std::vector<Arc> intersect_arc(const Arc& a, double lo, double hi) {
    std::vector<Arc> out;
    double alo = a.full() ? 0.0 : a.center - a.half_width;
    double ahi = a.full() ? kTwoPi : a.center + a.half_width;
    for (int s = -2; s <= 2; ++s) {
        double l = std::max(alo + s * kTwoPi, lo), h = std::min(ahi + s * kTwoPi, hi);
        if (h > l) out.push_back(Arc{wrap_angle((l + h) / 2.0), (h - l) / 2.0});
    }
    return out;
}

inline PiecewisePartition partition_impl(const std::vector<std::pair<double, cplx>>& ratio_values, const BoundarySet& E,
                                         double eps, std::size_t k_cap, const std::function<cplx(double)>* ratio) {
    if (!(eps > 0.0)) fail(ErrorKind::invalid_parameter, "eps must be positive", {{"eps", eps}});
    if (ratio_values.empty()) fail(ErrorKind::invalid_input, "no ratio samples");
    std::vector<std::pair<double, cplx>> samples;
    for (const auto& [t, r] : ratio_values) {
        if (r == cplx{0.0}) fail(ErrorKind::invalid_input, "ratio vanishes at a sample point", {{"theta", t}});
        samples.emplace_back(wrap_angle(t), r);
    }
    std::sort(samples.begin(), samples.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<double> angles;
    for (const auto& s : samples) angles.push_back(s.first);

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 4; k <= k_cap; k *= 2) {
        std::vector<double> bnd(k + 1);
        for (std::size_t i = 0; i < k; ++i) {
            double b = kTwoPi * static_cast<double>(i) / static_cast<double>(k);
            auto it = std::lower_bound(angles.begin(), angles.end(), b - 1e-12);
            if (it != angles.end() && std::abs(*it - b) <= 1e-12) {
                // Endpoint sits on E: move it to the middle of the following gap.
                auto nx = std::upper_bound(angles.begin(), angles.end(), *it + 1e-12);
                double next = nx != angles.end() ? *nx : angles.front() + kTwoPi;
                b = (*it + next) / 2.0;
            }
            bnd[i] = b;
        }
        // Pieces are [bnd[i], bnd[i+1]); the last one wraps to bnd[0] + 2 pi.
        bnd[k] = bnd[0] + kTwoPi;
        auto piece_of = [&](double t) {
            if (t < bnd[0]) t += kTwoPi;
            auto it = std::upper_bound(bnd.begin(), bnd.end(), t);
            return static_cast<std::size_t>(std::distance(bnd.begin(), it)) - 1;
        };
        std::vector<std::vector<std::size_t>> members(k);
        for (std::size_t s = 0; s < samples.size(); ++s) members[std::min(piece_of(samples[s].first), k - 1)].push_back(s);

        PiecewisePartition out;
        out.k = k;
        double worst = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i < k && ok; ++i) {
            if (members[i].empty()) continue;
            const auto& rep = samples[members[i].front()];
            cplx v = std::log(rep.second);
            cplx ev = std::exp(v);
            for (std::size_t s : members[i]) {
                double dev = std::abs(samples[s].second - ev);
                worst = std::max(worst, dev);
                if (!(dev < eps)) ok = false;
            }
            PiecewisePartition::Piece piece;
            piece.v = v;
            piece.representative = rep.first;
            piece.set.sample_density = E.sample_density;
            for (double p : E.points) {
                double w = wrap_angle(p);
                if (std::min(piece_of(w), k - 1) == i) piece.set.points.push_back(w);
            }
            for (const auto& a : E.arcs)
                for (const auto& x : detail::intersect_arc(a, bnd[i], bnd[i + 1])) piece.set.arcs.push_back(x);
            if (piece.set.empty()) piece.set.points.push_back(rep.first);
            piece.set = BoundarySet::normalized(std::move(piece.set));
            if (ratio && !piece.set.arcs.empty()) {
                for (double t : piece.set.samples()) {
                    double dev = std::abs((*ratio)(t) - ev);
                    worst = std::max(worst, dev);
                    if (!(dev < eps)) ok = false;
                }
            }
            out.pieces.push_back(std::move(piece));
        }
        best = std::min(best, worst);
        if (ok) {
            std::sort(out.pieces.begin(), out.pieces.end(),
                      [](const auto& x, const auto& y) { return x.representative < y.representative; });
            out.epsilon = worst;
            return out;
        }
    }
    fail(ErrorKind::resolution_exceeded, "piecewise-constant reduction did not reach eps at the k cap",
         {{"eps", eps}, {"k_cap", k_cap}, {"best_deviation", best}});
}

}  // namespace detail

/// Splits E into pieces on which the sampled ratio is within eps of e^{v_j}.
inline PiecewisePartition piecewise_partition(const std::vector<std::pair<double, cplx>>& ratio_values,
                                              const BoundarySet& E, double eps, std::size_t k_cap = 4096) {
    return detail::partition_impl(ratio_values, E, eps, k_cap, nullptr);
}

/// Samples a ratio function on E and partitions it; the bound is also checked on each piece's own samples.
inline PiecewisePartition piecewise_partition(const std::function<cplx(double)>& ratio, const BoundarySet& E,
                                              double eps, std::size_t k_cap = 4096) {
    if (E.empty()) fail(ErrorKind::invalid_input, "empty boundary set");
    std::vector<std::pair<double, cplx>> vals;
    for (double t : E.samples()) vals.emplace_back(t, ratio(t));
    return detail::partition_impl(vals, E, eps, k_cap, &ratio);
}

}  // namespace opa
