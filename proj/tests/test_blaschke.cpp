#include <gtest/gtest.h>

#include "opa/blaschke.hpp"
#include "oracles.hpp"

using namespace opa;

namespace {

constexpr double pi = std::numbers::pi;

// prod over zeros of (|a|/a)(a - z)/(1 - conj(a) z), or z for a = 0, evaluated pointwise
cplx blaschke_at(const std::vector<cplx>& zeros, cplx z) {
    cplx v{1.0};
    for (auto a : zeros) {
        if (a == cplx{0.0}) v *= z;
        else v *= std::abs(a) / a * (a - z) / (1.0 - std::conj(a) * z);
    }
    return v;
}

std::vector<cplx> random_zeros(oracle::Gen& gen, std::size_t m, double rmax) {
    std::vector<cplx> z;
    for (std::size_t i = 0; i < m; ++i) z.push_back(gen.in_disc(rmax));
    return z;
}

}  // namespace

TEST(BlaschkeSeries, Examples) {
    auto b = blaschke_series({0.5}, 2);
    ASSERT_EQ(b.truncation_degree(), 2u);
    EXPECT_NEAR(std::abs(b[0] - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(b[1] + 0.75), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(b[2] + 0.375), 0.0, 1e-15);
    auto e = blaschke_series({}, 5);
    EXPECT_EQ(e[0], cplx{1.0});
    for (std::size_t k = 1; k <= 5; ++k) EXPECT_EQ(e[k], cplx{0.0});
    auto z = blaschke_series({0.0}, 4);
    EXPECT_EQ(z[0], cplx{0.0});
    EXPECT_EQ(z[1], cplx{1.0});
    EXPECT_EQ(z.tail_bound(), 0.0);
}

TEST(BlaschkeSeries, Errors) {
    EXPECT_THROW(blaschke_series({1.0}, 4), Error);
    EXPECT_THROW(blaschke_series({cplx(0.0, 2.0)}, 4), Error);
    try {
        blaschke_series({cplx(0.6, 0.8)}, 4);
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::invalid_input);
    }
}

TEST(InnerOuter, Examples) {
    auto f = polynomial_inner_outer(CoeffSeries{-0.5, 1.0});
    ASSERT_EQ(f.inner_zeros.size(), 1u);
    EXPECT_NEAR(std::abs(f.inner_zeros[0] - 0.5), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(f.outer[0] + 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(f.outer[1] - 0.5), 0.0, 1e-14);
    EXPECT_EQ(f.unimodular, cplx{1.0});

    auto g = polynomial_inner_outer(CoeffSeries{1.0, -0.5});
    EXPECT_TRUE(g.inner_zeros.empty());
    EXPECT_NEAR(std::abs(g.outer[0] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(g.outer[1] + 0.5), 0.0, 1e-15);

    auto h = polynomial_inner_outer(CoeffSeries{0.0, 1.0});
    ASSERT_EQ(h.inner_zeros.size(), 1u);
    EXPECT_EQ(h.inner_zeros[0], cplx{0.0});
    EXPECT_NEAR(std::abs(h.outer[0] - 1.0), 0.0, 1e-15);
}

TEST(InnerOuter, Errors) {
    try {
        polynomial_inner_outer(CoeffSeries{1.0, -1.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::boundary_root);
    }
    EXPECT_THROW(polynomial_inner_outer(CoeffSeries(oracle::from_roots({std::polar(1.0 + 1e-11, 0.3)}))), Error);
    EXPECT_THROW(polynomial_inner_outer(CoeffSeries{0.0, 0.0}), Error);
    EXPECT_THROW(polynomial_inner_outer(CoeffSeries(std::vector<cplx>{1.0, 1.0}, 0.1)), Error);
}

TEST(InnerOuter, RepeatedRoots) {
    auto p = CoeffSeries(oracle::from_roots({cplx(0.3, 0.1), cplx(0.3, 0.1), cplx(0.3, 0.1), 2.0}));
    auto f = polynomial_inner_outer(p);
    EXPECT_EQ(f.inner_zeros.size(), 3u);
    EXPECT_EQ(f.outer.effective_degree(), 4u);
}

// ---- properties ----

TEST(Property, BlaschkeNormAndModulus) {
    oracle::Gen gen(51);
    for (int t = 0; t < 40; ++t) {
        auto zeros = random_zeros(gen, gen.index(1, 5), 0.9);
        std::size_t N = 256;
        auto B = blaschke_series(zeros, N);
        double rmax = 0.0;
        for (auto z : zeros) rmax = std::max(rmax, std::abs(z));
        double n2 = 0.0;
        for (auto c : B.coeffs()) n2 += std::norm(c);
        EXPECT_LE(std::sqrt(n2), 1.0 + 1e-12);
        EXPECT_GE(std::sqrt(n2), 1.0 - std::pow(rmax, static_cast<double>(N)) - 1e-12);
        // coefficient tail of the exact product is bounded by the recorded tail
        double tail_sq = std::max(0.0, 1.0 - n2);
        EXPECT_LE(std::sqrt(tail_sq), B.tail_bound() + 1e-7);
    }
}

TEST(Property, BlaschkeUnimodularOnCircle) {
    oracle::Gen gen(52);
    for (int t = 0; t < 10; ++t) {
        auto zeros = random_zeros(gen, gen.index(1, 4), 0.85);
        auto B = blaschke_series(zeros, 512);
        // pointwise remainder is controlled by the l2 tail times a generous constant
        double tail = B.tail_bound();
        for (int j = 0; j < 4096; ++j) {
            cplx z = std::polar(1.0, 2.0 * pi * j / 4096.0);
            double m = std::abs(evaluate(B, z));
            EXPECT_GE(m, 1.0 - 1e-9 - 100.0 * tail);
            EXPECT_LE(m, 1.0 + 1e-9 + 100.0 * tail);
            if (j % 512 == 0) {
                EXPECT_LE(std::abs(evaluate(B, z) - blaschke_at(zeros, z)), 1e-9 + 100.0 * tail);
            }
        }
    }
}

TEST(Property, ReconstructionAndOuterModulus) {
    oracle::Gen gen(53);
    for (int t = 0; t < 40; ++t) {
        std::vector<cplx> roots;
        std::size_t m = gen.index(1, 6);
        for (std::size_t i = 0; i < m; ++i) {
            double r = t % 2 == 0 ? gen.uniform(0.05, 0.9) : gen.uniform(1.1, 3.0);
            if (i == 0) r = gen.uniform(0.05, 0.9);
            roots.push_back(std::polar(r, gen.uniform(0.0, 2.0 * pi)));
        }
        auto p = oracle::from_roots(roots, gen.unit_box() + 1.5);
        auto f = polynomial_inner_outer(CoeffSeries(p));
        EXPECT_NEAR(std::abs(f.unimodular), 1.0, 1e-14);
        for (auto a : f.inner_zeros) EXPECT_LT(std::abs(a), 1.0);
        // reconstruction at N = 256
        auto B = blaschke_series(f.inner_zeros, 256);
        auto rec = scale(multiply(B, f.outer, 256), f.unimodular);
        double scale_p = 0.0;
        for (auto c : p) scale_p = std::max(scale_p, std::abs(c));
        for (std::size_t k = 0; k <= 256; ++k) {
            cplx want = k < p.size() ? p[k] : cplx{0.0};
            EXPECT_LE(std::abs(rec[k] - want), 1e-10 * std::max(1.0, scale_p)) << "k=" << k;
        }
        // |p| = |outer| on the circle
        for (int j = 0; j < 4096; j += 3) {
            cplx z = std::polar(1.0, 2.0 * pi * j / 4096.0);
            EXPECT_LE(std::abs(std::abs(oracle::power_sum(p, z)) - std::abs(f.unimodular * evaluate(f.outer, z))),
                      1e-8 * std::max(1.0, scale_p));
        }
        // outer zero-free on the open disc: winding on r = 1 - 1e-6
        auto w = zero_free_on_closed_disc(dilate(f.outer, 1.0 - 1e-6));
        EXPECT_EQ(w.winding_number, 0);
    }
}
