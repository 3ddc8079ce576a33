#include "cmcglue/blocks.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cmcglue;

namespace {

DelaunayBlock make_edge(double tau, const Vec3& zp = Vec3::Zero(), const Vec3& zm = Vec3::Zero(), double target = 0.0, int l = 1)
{
    EdgeBlockSpec s;
    s.tau_domain = tau;
    s.tau_target = target > 0.0 ? target : tau;
    s.l = l;
    s.zeta_plus = zp;
    s.zeta_minus = zm;
    return DelaunayBlock::edge(s);
}

} // namespace

TEST(Blocks, CollarConstant)
{
    for (double delta : {0.05, 0.15, 0.5}) {
        const double a = collar_a(delta);
        EXPECT_NEAR(std::tanh(a + 1.0), std::cos(delta / 8.0), 1e-14);
        EXPECT_GT(a, 0.0);
    }
    EXPECT_GT(collar_a(0.05), collar_a(0.15));
    EXPECT_THROW(collar_a(0.0), ValidationError);
}

TEST(Blocks, PartitionOfUnity)
{
    const DelaunayBlock e = make_edge(1e-3, Vec3(1e-4, 0, 0), Vec3(0, 2e-4, 0), 1.02e-3, 2);
    RayBlockSpec rs;
    rs.tau_domain = rs.tau_target = 1e-3;
    const DelaunayBlock r = DelaunayBlock::ray(rs);
    for (const DelaunayBlock* b : {&e, &r}) {
        const double lo = b->t_min(), hi = b->t_max();
        for (int i = 0; i <= 2000; ++i)
            EXPECT_NEAR(b->partition_defect(lo + (hi - lo) * i / 2000.0), 0.0, 1e-14);
    }
}

TEST(Blocks, BandsAndSupport)
{
    const DelaunayBlock b = make_edge(1e-3, Vec3::Zero(), Vec3::Zero(), 0.0, 2);
    const double a = b.a(), R = b.domain_length();
    EXPECT_EQ(b.error_support().size(), 4u);
    EXPECT_EQ(b.band(a + 1.0), Band::Dislocation);
    EXPECT_EQ(b.band(a + 4.0), Band::Gluing);
    EXPECT_EQ(b.band(a + 2.5), Band::Clean);
    EXPECT_EQ(b.band(0.5 * R), Band::Clean);
    EXPECT_EQ(b.band(R - a - 4.0), Band::Gluing);
    EXPECT_EQ(b.band(R - a - 1.0), Band::Dislocation);
    EXPECT_NEAR(b.t_max(), R - a, 1e-12);
    EXPECT_NEAR(R, 8.0 * DelaunayProfile::solve(1e-3).quarter_period(), 1e-12);
    EdgeBlockSpec shortest;
    EXPECT_THROW(DelaunayBlock::edge(shortest), ValidationError); // l = 1 at 1e-3 leaves no room for the bands

    RayBlockSpec rs;
    const DelaunayBlock r = DelaunayBlock::ray(rs);
    EXPECT_FALSE(r.is_edge());
    EXPECT_EQ(r.error_support().size(), 2u);
}

TEST(Blocks, PureSpheresNearTheEnds)
{
    const Vec3 zp(3e-4, -1e-4, 2e-4), zm(-2e-4, 1e-4, 1e-4);
    const DelaunayBlock b = make_edge(1e-3, zp, zm, 1.01e-3, 2);
    const double a = b.a();
    for (int i = 0; i <= 10; ++i)
        for (double th : {0.0, 1.3, 4.4}) {
            const double t = a + 0.1 * i;
            EXPECT_LT((b(t, th) - b.plus_sphere(t, th)).norm(), 1e-13);
            EXPECT_LT((b.plus_sphere(t, th) - zp - sphere_immerse(t, th)).norm(), 1e-15);
            const double s = b.t_max() - 0.1 * i;
            EXPECT_LT((b(s, th) - b.minus_sphere(s, th)).norm(), 1e-12);
        }
}

TEST(Blocks, MeanCurvatureOneOutsideBands)
{
    const DelaunayBlock b = make_edge(1e-3, Vec3(2e-4, 1e-4, 0), Vec3(0, -1e-4, 3e-4), 1.03e-3, 2);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    while (checked < 300) {
        const double t = b.t_min() + (b.t_max() - b.t_min()) * u(rng), th = 2.0 * kPi * u(rng);
        if (b.band(t) != Band::Clean)
            continue;
        ++checked;
        EXPECT_NEAR(b.mean_curvature(t, th), 1.0, 1e-8) << t;
    }
}

TEST(Blocks, HErrorFieldSeparatesBands)
{
    const DelaunayBlock b = make_edge(1e-8);
    const HErrorField f = h_error_field(b, b.t_min(), b.t_min() + 6.0, 32, 16);
    EXPECT_LT(f.sup_dislocation, 1e-9); // no dislocation with zeta = 0
    EXPECT_GT(f.sup_gluing, 1e-7);
    // The blend of sphere and Delaunay piece errs by O(tau e^{2t}) at the outer end of the gluing band.
    EXPECT_LT(f.sup_gluing, 10.0 * 1e-8 * std::exp(2.0 * (b.a() + 5.0)));
    EXPECT_LT(f.sup_clean, 1e-8);
    EXPECT_EQ(f.values.size(), static_cast<size_t>(f.nt) * f.nth);
}

TEST(Blocks, GluingErrorShrinksWithTau)
{
    auto sup = [](double tau) {
        const DelaunayBlock b = make_edge(tau);
        return h_error_field(b, b.a() + 3.0, b.a() + 5.0, 48, 16).sup_gluing;
    };
    const double r = sup(1e-6) / sup(5e-7);
    EXPECT_GT(r, 1.5);
    EXPECT_LT(r, 2.5);
}

TEST(Blocks, JetMatchesDifferences)
{
    const DelaunayBlock b = make_edge(1e-3, Vec3(1e-4, 2e-4, -1e-4), Vec3::Zero(), 1.01e-3, 2);
    const double h = 1e-6;
    for (double t : {b.a() + 0.5, b.a() + 1.5, b.a() + 4.0, 8.0}) {
        const Jet3 j = b.jet(t, 0.7);
        const Vec3 dt = (b(t + h, 0.7) - b(t - h, 0.7)) / (2 * h);
        for (int i = 0; i < 3; ++i)
            EXPECT_NEAR(j.c[i].t, dt[i], 1e-7);
    }
}

TEST(Blocks, NumericMeanCurvatureOfUnitSphere)
{
    for (double t : {-1.0, 0.0, 0.8})
        EXPECT_NEAR(mean_curvature_numeric(sphere_immerse, t, 0.3), 1.0, 1e-6);
}

TEST(Blocks, RejectsInvalidSpecs)
{
    EdgeBlockSpec s;
    s.l = 0;
    EXPECT_THROW(DelaunayBlock::edge(s), ValidationError);
    s.l = 1;
    s.tau_domain = s.tau_target = 0.2;
    EXPECT_THROW(DelaunayBlock::edge(s), ValidationError);
    RayBlockSpec r;
    r.periods = 0;
    EXPECT_THROW(DelaunayBlock::ray(r), ValidationError);
}

TEST(Blocks, GraphOverUndislocatedSphereVanishes)
{
    const DelaunayBlock b = make_edge(1e-6);
    const GraphFunction g = graph_over_dislocated_sphere(b, 8, 8);
    for (double f : g.f)
        EXPECT_LT(std::abs(f), 1e-12);
}

TEST(Blocks, GraphOverDislocatedSphereIsLinearInZeta)
{
    // Where the block is the pure dislocated sphere, f = -zeta . Y0 to first order.
    const Vec3 z(0.004, -0.002, 0.001);
    EdgeBlockSpec s;
    s.tau_domain = s.tau_target = 1e-6;
    s.zeta_plus = z;
    const DelaunayBlock b = DelaunayBlock::edge(s);
    const GraphFunction g = graph_over_dislocated_sphere(b, 8, 8, b.a() + 2.0, b.a() + 3.0);
    EXPECT_LT(g.max_residual, 1e-12);
    for (int i = 0; i < g.nt; ++i)
        for (int j = 0; j < g.nth; ++j)
            EXPECT_NEAR(g.f[static_cast<size_t>(i) * g.nth + j], -z.dot(sphere_immerse(g.t[i], g.theta[j])), 1e-4);
}

TEST(SphereBlock, RotationNearDisksIdentityAway)
{
    SphereBlockSpec spec;
    const Vec3 x1 = Vec3::UnitX(), x2 = Vec3::UnitZ();
    const Mat3 small = Eigen::AngleAxisd(0.004, Vec3(0, 1, 1).normalized()).toRotationMatrix();
    spec.x1 = {x1, -x1};
    spec.x2 = {x2, x2};
    spec.y1 = {small * x1, -x1};
    spec.y2 = {small * x2, x2};
    const SphereBlock sb(spec);
    EXPECT_LT((sb.rotation(0) - small).norm(), 1e-12);
    EXPECT_LT((sb.rotation(1) - Mat3::Identity()).norm(), 1e-12);

    const Vec3 far = Vec3(0, 1, 0.3).normalized();
    EXPECT_LT((sb(far) - far).norm(), 1e-15);
    EXPECT_EQ(sb.weight(far), 1.0);
    const Vec3 near = Vec3(1, 0.02, 0.01).normalized();
    EXPECT_LT((sb(near) - small * near).norm(), 1e-14);
    EXPECT_EQ(sb.weight(near), 0.0);
    for (int i = 0; i < 100; ++i) {
        const Vec3 x = Vec3(std::cos(0.01 * i), std::sin(0.01 * i), 0.05).normalized();
        EXPECT_NEAR(sb(x).norm(), 1.0, 1e-14);
    }
}

TEST(SphereBlock, RejectsFarTargetsAndCrowdedDisks)
{
    SphereBlockSpec spec;
    spec.x1 = {Vec3::UnitX()};
    spec.x2 = {Vec3::UnitZ()};
    spec.y1 = {Vec3(1, 0.1, 0).normalized()};
    spec.y2 = {Vec3::UnitZ()};
    EXPECT_THROW(SphereBlock{spec}, ValidationError);
    spec.x1 = {Vec3::UnitX(), Vec3(1, 0.1, 0).normalized()};
    spec.x2 = {Vec3::UnitZ(), Vec3::UnitZ()};
    spec.y1 = spec.x1;
    spec.y2 = spec.x2;
    EXPECT_THROW(SphereBlock{spec}, ValidationError);
}
