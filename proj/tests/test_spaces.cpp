#include <gtest/gtest.h>

#include "opa/spaces.hpp"
#include "oracles.hpp"

using namespace opa;

TEST(AlphaWeight, Range) {
    EXPECT_TRUE(AlphaWeight::hardy().is_hardy());
    EXPECT_TRUE(AlphaWeight::dirichlet().is_dirichlet());
    EXPECT_THROW(AlphaWeight(-0.1), Error);
    EXPECT_THROW(AlphaWeight(1.5), Error);
    EXPECT_THROW(AlphaWeight(std::nan("")), Error);
    AlphaWeight w(0.5);
    EXPECT_NEAR(w(3), 2.0, 1e-15);
}

TEST(InnerProduct, Examples) {
    CoeffSeries a{1.0, -1.0}, b{1.0, 1.0};
    EXPECT_NEAR(std::abs(inner_product_alpha(a, b, AlphaWeight::hardy())), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(inner_product_alpha(a, a, AlphaWeight::hardy()) - 2.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(inner_product_alpha(a, a, AlphaWeight::dirichlet()) - 3.0), 0.0, 1e-15);
    // conjugate-linear in the second slot
    cplx i{0.0, 1.0};
    EXPECT_NEAR(std::abs(inner_product_alpha(a, scale(b, i), AlphaWeight(0.3)) +
                         i * inner_product_alpha(a, b, AlphaWeight(0.3))),
                0.0, 1e-15);
}

TEST(InnerProduct, ErrorBoundCoversTails) {
    CoeffSeries a(std::vector<cplx>{1.0, 0.5}, 0.01), b(std::vector<cplx>{2.0}, 0.02);
    double e = inner_product_error_bound(a, b, AlphaWeight::hardy());
    EXPECT_NEAR(e, std::sqrt(1.25) * 0.02 + 2.0 * 0.01 + 0.0002, 1e-15);
}

TEST(Norm, Examples) {
    for (double al : {0.0, 0.4, 1.0}) EXPECT_NEAR(norm_alpha(CoeffSeries{1.0}, AlphaWeight(al)), 1.0, 1e-15);
    EXPECT_NEAR(norm_alpha(CoeffSeries{1.0, -1.0}, AlphaWeight::hardy()), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(norm_alpha(CoeffSeries{1.0, -1.0}, AlphaWeight::dirichlet()), std::sqrt(3.0), 1e-15);
}

TEST(DirichletIntegral, Examples) {
    EXPECT_EQ(dirichlet_integral(CoeffSeries{4.0}), 0.0);
    EXPECT_NEAR(dirichlet_integral(CoeffSeries::monomial(1)), 1.0, 1e-15);
    EXPECT_NEAR(dirichlet_integral(CoeffSeries::monomial(2)), 2.0, 1e-15);
    EXPECT_NEAR(oracle::area_dirichlet({0.0, 0.0, 1.0}), 2.0, 1e-5);
    EXPECT_NEAR(oracle::area_dirichlet({0.0, 1.0}), 1.0, 1e-5);
}

TEST(Property, NormIdentity) {
    oracle::Gen gen(31);
    for (int t = 0; t < 50; ++t) {
        auto p = gen.poly(gen.index(0, 10));
        CoeffSeries a(p);
        double lhs = std::pow(norm_alpha(a, AlphaWeight::dirichlet()), 2);
        double rhs = dirichlet_integral(a) + std::pow(norm_alpha(a, AlphaWeight::hardy()), 2);
        EXPECT_NEAR(lhs, rhs, 1e-12);
        // against the area / boundary integrals; only a few instances, the quadrature is O(512*1024*deg)
        if (t < 8) {
            double quad = oracle::area_dirichlet(p) + oracle::circle_mean_sq(p);
            EXPECT_NEAR(lhs, quad, 1e-6 * std::max(1.0, lhs));
        }
    }
}

TEST(Property, MonotoneInAlpha) {
    oracle::Gen gen(32);
    for (int t = 0; t < 100; ++t) {
        CoeffSeries a(gen.poly(gen.index(0, 10)));
        double a1 = gen.uniform(0.0, 1.0), a2 = gen.uniform(a1, 1.0);
        EXPECT_LE(norm_alpha(a, AlphaWeight(a1)), norm_alpha(a, AlphaWeight(a2)) + 1e-15);
    }
}

TEST(Property, CauchySchwarz) {
    oracle::Gen gen(33);
    for (int t = 0; t < 100; ++t) {
        CoeffSeries a(gen.poly(gen.index(0, 10))), b(gen.poly(gen.index(0, 10)));
        AlphaWeight w(gen.uniform(0.0, 1.0));
        EXPECT_LE(std::abs(inner_product_alpha(a, b, w)), norm_alpha(a, w) * norm_alpha(b, w) * (1 + 1e-14));
    }
}
