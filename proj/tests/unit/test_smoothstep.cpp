#include "cmcglue/smoothstep.hpp"
#include "cmcglue/types.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace cmcglue;

TEST(Smoothstep, ConstantOutsideUnitInterval)
{
    for (double s : {-10.0, -3.0, -1.0, -1.0 - 1e-12}) {
        EXPECT_EQ(Psi(s), 0.0);
        EXPECT_EQ(Psi_prime(s), 0.0);
    }
    for (double s : {1.0, 1.0 + 1e-12, 2.5, 40.0}) {
        EXPECT_EQ(Psi(s), 1.0);
        EXPECT_EQ(Psi_prime(s), 0.0);
    }
}

TEST(Smoothstep, OddAboutOneHalf)
{
    for (int i = 0; i <= 200; ++i) {
        const double s = -1.2 + 2.4 * i / 200.0;
        EXPECT_NEAR(Psi(s) - 0.5, -(Psi(-s) - 0.5), 1e-14) << s;
    }
    EXPECT_NEAR(Psi(0.0), 0.5, 1e-15);
}

TEST(Smoothstep, MonotoneNondecreasing)
{
    double prev = Psi(-1.0);
    for (int i = 1; i <= 1000; ++i) {
        const double v = Psi(-1.0 + 2.0 * i / 1000.0);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(Smoothstep, DerivativesMatchDifferences)
{
    const double h = 1e-5;
    for (double s : {-0.9, -0.5, -0.1, 0.0, 0.3, 0.77}) {
        EXPECT_NEAR(Psi_prime(s), (Psi(s + h) - Psi(s - h)) / (2 * h), 1e-8);
        EXPECT_NEAR(Psi_second(s), (Psi_prime(s + h) - Psi_prime(s - h)) / (2 * h), 1e-6);
    }
}

TEST(Smoothstep, CutoffEndpoints)
{
    EXPECT_EQ(psi(2.0, 5.0, 2.0), 0.0);
    EXPECT_EQ(psi(2.0, 5.0, 5.0), 1.0);
    EXPECT_NEAR(psi(2.0, 5.0, 3.5), 0.5, 1e-15);
    // Reversed endpoints give the mirrored step.
    EXPECT_EQ(psi(5.0, 2.0, 2.0), 1.0);
    EXPECT_EQ(psi(5.0, 2.0, 5.0), 0.0);
    for (double x : {2.3, 3.1, 4.4})
        EXPECT_NEAR(psi(2.0, 5.0, x) + psi(5.0, 2.0, x), 1.0, 1e-14);
}

TEST(Smoothstep, CutoffChainRule)
{
    const Cutoff c(1.0, 1.6);
    const double h = 1e-6;
    for (double x : {1.1, 1.25, 1.3, 1.45}) {
        EXPECT_NEAR(c.derivative(x), (c(x + h) - c(x - h)) / (2 * h), 1e-6);
        EXPECT_NEAR(psi_second(1.0, 1.6, x), (psi_prime(1.0, 1.6, x + h) - psi_prime(1.0, 1.6, x - h)) / (2 * h), 1e-3);
    }
}

TEST(Smoothstep, CutoffRejectsEqualEndpoints)
{
    EXPECT_ANY_THROW(Cutoff(1.0, 1.0));
}

TEST(DiscreteNorm, ConstantFieldHasItsModulus)
{
    Field1D u;
    u.h = 0.1;
    u.values.assign(50, -2.5);
    const std::vector<double> w(50, 1.0);
    EXPECT_NEAR(discrete_norm(u, 2, w, 1.0), 2.5, 1e-14);
}

TEST(DiscreteNorm, WeightDividesAndLinearSlopeCounts)
{
    Field1D u;
    u.h = 0.01;
    for (int i = 0; i < 101; ++i)
        u.values.push_back(3.0 * i * u.h);
    const std::vector<double> w(101, 2.0);
    // sup (|u| + |u'|) / 2 = (3 + 3) / 2.
    EXPECT_NEAR(discrete_norm(u, 1, w, 1.0), 3.0, 1e-9);
    EXPECT_NEAR(discrete_norm(u, 0, w, 1.0), 1.5, 1e-12);
}

TEST(DiscreteNorm, TwoDimensionalThetaDerivative)
{
    Field2D u;
    u.nt = 5;
    u.nth = 256;
    u.ht = 0.1;
    u.hth = 2.0 * kPi / u.nth;
    for (int i = 0; i < u.nt; ++i)
        for (int j = 0; j < u.nth; ++j)
            u.values.push_back(std::sin(j * u.hth));
    const std::vector<double> w(static_cast<size_t>(u.nt) * u.nth, 1.0);
    EXPECT_NEAR(discrete_norm(u, 0, w, 1.0), 1.0, 1e-3);
    EXPECT_NEAR(discrete_norm(u, 1, w, 1.0), std::sqrt(2.0), 1e-3);
}
