#include "cmcglue/conformal.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cmcglue;

TEST(Conformal, SecondFundamentalFormOfSphere)
{
    const SurfaceDiffGeom g = diff_geom(sphere_jet(Jet::var_t(0.4), Jet::var_theta(1.1)));
    EXPECT_NEAR(normsq_A(g), 2.0, 1e-12);
}

class ConformalStar : public ::testing::Test
{
protected:
    static void SetUpTestSuite() { surface_ = new InitialSurface(build_initial_surface(star_symmetric(4), 1e-4, {}, {})); }
    static void TearDownTestSuite() { delete surface_; }
    static InitialSurface* surface_;
};

InitialSurface* ConformalStar::surface_ = nullptr;

TEST_F(ConformalStar, CutoffAndRhoBlend)
{
    const ConformalData c(*surface_);
    const double a = surface_->a;
    EXPECT_EQ(c.psi_hat(0, a + 1.0), 1.0);
    EXPECT_EQ(c.psi_hat(0, a + 6.0), 0.0);
    for (double t : {a + 0.5, a + 2.0, a + 3.5}) {
        const double A = std::sqrt(c.h_factor(0, t, 0.3));
        EXPECT_NEAR(c.rho(0, t, 0.3), A, 1e-14);
    }
    for (double t : {a + 6.0, a + 9.0}) {
        EXPECT_NEAR(c.rho(0, t, 0.3), c.rho_tilde(0, t), 1e-14);
        EXPECT_NEAR(c.rho_tilde(0, t), 1.0 / surface_->elements[0].block.target_profile().r(t), 1e-12);
    }
    EXPECT_NEAR(c.underline_t(0, 3.0), 3.0, 1e-14);
    EXPECT_THROW(c.psi_hat(99, 1.0), ValidationError);
}

TEST_F(ConformalStar, MetricsAreConformalMultiples)
{
    const ConformalData c(*surface_);
    for (double t : {surface_->a + 1.0, 8.0, 12.0}) {
        const MetricCoeffs g = c.g(0, t, 0.7), h = c.h(0, t, 0.7), chi = c.chi(0, t, 0.7);
        EXPECT_NEAR(g.E, g.G, 1e-10 * g.E);
        EXPECT_NEAR(g.F, 0.0, 1e-12);
        EXPECT_NEAR(h.E, c.h_factor(0, t, 0.7) * g.E, 1e-12 * h.E);
        EXPECT_NEAR(chi.G, c.chi_factor(0, t, 0.7) * g.G, 1e-12 * chi.G);
    }
}

TEST_F(ConformalStar, ChiIsFlatFarFromTheSphere)
{
    const ConformalData c(*surface_);
    for (double t : {surface_->a + 6.0, 9.0, 13.0}) {
        const MetricCoeffs chi = c.chi(0, t, 2.0);
        EXPECT_NEAR(chi.E, 1.0, 1e-9);
        EXPECT_NEAR(chi.G, 1.0, 1e-9);
        EXPECT_NEAR(chi.F, 0.0, 1e-12);
    }
}

TEST_F(ConformalStar, HMetricOnTheDelaunayPieceMatchesTwoTauCosh)
{
    // On a Delaunay piece h = 2 tau cosh(2 w)(dt^2 + dtheta^2).
    const ConformalData c(*surface_);
    const DelaunayProfile& p = surface_->elements[0].block.target_profile();
    for (double t : {surface_->a + 6.5, 11.0, 14.0}) {
        const MetricCoeffs h = c.h(0, t, 0.2);
        EXPECT_NEAR(h.E, 2.0 * 1e-4 * std::cosh(2.0 * p.w(t)), 1e-9 * h.E);
    }
}

TEST(Conformal, CentralDiscrepancyVanishesWithoutParameters)
{
    const InitialSurface s = build_initial_surface(star_symmetric(4), 1e-4, {}, {});
    EXPECT_LT(central_limit_discrepancy(s, 0, 3.0, 24).c0, 1e-14);
}

TEST(Conformal, CentralDiscrepancyShrinksWithTau)
{
    // Dislocation only: the discrepancy is O(tau), inside the tau^{1/2} rate.
    const Graph g = star_symmetric(4);
    std::vector<double> c0;
    for (double tau : {1e-4, 1e-5, 1e-6}) {
        const auto [dv, zv] = random_parameters(g, tau, 0.0, 1.0, 3u);
        const InitialSurface s = build_initial_surface(g, tau, dv, zv);
        const Discrepancy d = central_limit_discrepancy(s, 0, 3.0, 24);
        EXPECT_GE(d.c1, d.c0);
        c0.push_back(d.c0);
    }
    EXPECT_GT(c0[0] / c0[1], std::sqrt(10.0) / 3.0);
    EXPECT_GT(c0[1] / c0[2], std::sqrt(10.0) / 3.0);
}

TEST(Conformal, CentralDiscrepancyFromUnbalancingFollowsDHat)
{
    // The rays turn with d_hat = d / tau, so d at a fixed fraction of eps * tau leaves a tau-independent floor.
    const Graph g = star_symmetric(4);
    std::vector<double> c0;
    for (double tau : {1e-4, 1e-5, 1e-6}) {
        const auto [dv, zv] = random_parameters(g, tau, 1.0, 0.0, 3u);
        c0.push_back(central_limit_discrepancy(build_initial_surface(g, tau, dv, zv), 0, 3.0, 24).c0);
    }
    EXPECT_NEAR(c0[2] / c0[0], 1.0, 0.05);
    EXPECT_LT(c0[0], 2.0 * kAdmissibleEps);
}

TEST(Conformal, StandardDiscrepancyNeedsTheReflection)
{
    const InitialSurface s = build_initial_surface(triangle_genus1(4), 1e-4, {}, {});
    const Discrepancy with = standard_limit_discrepancy(s, 0, End::Plus, 1, kSpectralB, true, 24);
    const Discrepancy without = standard_limit_discrepancy(s, 0, End::Plus, 1, kSpectralB, false, 24);
    EXPECT_LT(with.c0, 0.1);
    EXPECT_GT(without.c0, 1.0);
}

TEST(Conformal, MetricSuiteOnStar)
{
    const MetricSuite m = metric_comparison_suite(star_symmetric(4), {1e-4, 1e-5, 1e-6});
    ASSERT_EQ(m.items.size(), 8u);
    for (const MetricItem& it : m.items) {
        EXPECT_EQ(it.values.size(), 3u);
        EXPECT_TRUE(it.within_band) << it.item << " " << it.name << " k=" << it.fitted_exponent;
    }
}
