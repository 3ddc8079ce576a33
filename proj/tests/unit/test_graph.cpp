#include "cmcglue/graph.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cmcglue;

namespace {

void expect_rotation(const Mat3& R, double tol = 1e-12)
{
    EXPECT_LT((R.transpose() * R - Mat3::Identity()).norm(), tol);
    EXPECT_NEAR(R.determinant(), 1.0, tol);
}

} // namespace

TEST(Graph, LookupsAndIncidence)
{
    const Graph g = triangle_genus1();
    ASSERT_EQ(g.vertices().size(), 3u);
    ASSERT_EQ(g.edges().size(), 3u);
    for (size_t e = 0; e < g.edges().size(); ++e) {
        EXPECT_EQ(g.edge_index(g.edges()[e].id), static_cast<int>(e));
        EXPECT_NEAR(g.edge_direction(static_cast<int>(e)).norm(), 1.0, 1e-14);
        EXPECT_NEAR(g.edge_length(static_cast<int>(e)), 2.0 * g.edges()[e].l, 1e-9);
    }
    for (int p = 0; p < 3; ++p)
        for (const Incidence& inc : g.incident(p)) {
            EXPECT_NEAR(inc.direction.norm(), 1.0, 1e-14);
            EXPECT_TRUE(inc.sigma == 1.0 || inc.sigma == -1.0);
        }
    EXPECT_THROW(g.vertex_index("nope"), ValidationError);
}

TEST(Graph, FramesAreRotationsWithFirstColumnAlongElement)
{
    const Graph g = dodecahedral_22ray();
    for (size_t e = 0; e < g.edges().size(); ++e) {
        expect_rotation(g.edges()[e].frame);
        EXPECT_LT((g.edges()[e].frame.col(0) - g.edge_direction(static_cast<int>(e))).norm(), 1e-12);
    }
    for (const Ray& r : g.rays()) {
        expect_rotation(r.frame);
        EXPECT_LT((r.frame.col(0) - r.direction.normalized()).norm(), 1e-12);
    }
}

TEST(Graph, DefaultFrameRule)
{
    const Mat3 F = default_frame(Vec3(1, 0, 0));
    expect_rotation(F);
    EXPECT_LT((F.col(1) - Vec3(0, 0, 1)).norm(), 1e-14);
    const Mat3 G = default_frame(Vec3(0.1, 0, 1).normalized());
    expect_rotation(G);
    EXPECT_NEAR(std::abs(G.col(1).dot(Vec3::UnitY())), 1.0, 1e-12);
}

TEST(Graph, RotationBetweenIsSmallestRotation)
{
    std::mt19937 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const Vec3 x = Vec3(n(rng), n(rng), n(rng)).normalized();
        const Vec3 y = Vec3(n(rng), n(rng), n(rng)).normalized();
        const Mat3 R = rotation_between(x, y);
        expect_rotation(R, 1e-10);
        EXPECT_LT((R * x - y).norm(), 1e-10);
        // The axis x cross y is fixed.
        const Vec3 axis = x.cross(y);
        EXPECT_LT((R * axis - axis).norm(), 1e-10);
    }
    EXPECT_LT((rotation_between(Vec3::UnitZ(), Vec3::UnitZ()) - Mat3::Identity()).norm(), 1e-14);
    EXPECT_ANY_THROW(rotation_between(Vec3::UnitX(), -Vec3::UnitX()));
}

TEST(Graph, PieceDistance)
{
    // Skew segments one unit apart.
    EXPECT_NEAR(piece_distance(Vec3(0, 0, 0), Vec3(1, 0, 0), false, Vec3(0.5, -0.5, 1), Vec3(0, 1, 0), false), 1.0, 1e-14);
    // Endpoint to endpoint.
    EXPECT_NEAR(piece_distance(Vec3(0, 0, 0), Vec3(1, 0, 0), false, Vec3(3, 0, 0), Vec3(1, 0, 0), false), 2.0, 1e-14);
    // A ray reaches what a segment does not.
    EXPECT_NEAR(piece_distance(Vec3(0, 0, 0), Vec3(1, 0, 0), true, Vec3(5, 1, 0), Vec3(0, 1, 0), false), 1.0, 1e-14);
    // Parallel pieces.
    EXPECT_NEAR(piece_distance(Vec3(0, 0, 0), Vec3(1, 0, 0), true, Vec3(0, 2, 0), Vec3(1, 0, 0), true), 2.0, 1e-14);
}

TEST(Graph, GeneratorsAreBalancedCentralAndPreEmbedded)
{
    const std::pair<const char*, int> fams[] = {{"star", 4},        {"star", 6},        {"triangle_genus1", 0},
                                                {"double_triangle_genus2", 0}, {"tetra_chain", 4}, {"tetra_chain", 6},
                                                {"dodecahedral_22ray", 0}};
    for (const auto& [name, param] : fams) {
        const Graph g = generate_example(name, param);
        EXPECT_TRUE(is_balanced(g, 1e-9)) << name << param;
        EXPECT_TRUE(is_central(g)) << name << param;
        const PreEmbedReport r = check_pre_embedded(g, 0.1);
        EXPECT_TRUE(r.pass()) << name << param;
        EXPECT_TRUE(r.violations.empty());
    }
    EXPECT_EQ(generate_example("dodecahedral_22ray").rays().size(), 22u);
    EXPECT_THROW(generate_example("no_such_family"), ValidationError);
}

TEST(Graph, BrokenAngleFixtureWitness)
{
    const Graph g = broken_angle_fixture();
    ASSERT_TRUE(is_balanced(g, 1e-9));
    ASSERT_TRUE(is_central(g));
    const PreEmbedReport r = check_pre_embedded(g, 0.1);
    EXPECT_FALSE(r.angle_ok);
    EXPECT_TRUE(r.distance_ok);
    EXPECT_TRUE(r.ray_ok);
    ASSERT_FALSE(r.violations.empty());
    EXPECT_EQ(r.violations.front().condition, 1);
    EXPECT_LT(r.violations.front().value, kPi / 3.0);
    EXPECT_EQ(r.violations.front().first, "r0");
    EXPECT_EQ(r.violations.front().second, "r1");
}

TEST(Graph, BrokenParallelFixtureWitness)
{
    const Graph g = broken_parallel_rays_fixture();
    ASSERT_TRUE(is_balanced(g, 1e-9));
    ASSERT_TRUE(is_central(g));
    const PreEmbedReport r = check_pre_embedded(g, 0.1);
    EXPECT_FALSE(r.ray_ok);
    EXPECT_TRUE(r.angle_ok);
    ASSERT_FALSE(r.violations.empty());
    EXPECT_EQ(r.violations.front().condition, 3);
    EXPECT_EQ(r.violations.front().first, "r0");
    EXPECT_EQ(r.violations.front().second, "r2");
}

TEST(Graph, UnbalancingDetectsPerturbedWeight)
{
    const Graph g0 = star_symmetric(4);
    std::vector<Ray> rays = g0.rays();
    rays[0].tau_hat = 1.2;
    const Graph g(g0.vertices(), g0.edges(), rays);
    EXPECT_NEAR(unbalancing(g, 0).norm(), 0.2, 1e-12);
    EXPECT_FALSE(is_balanced(g, 1e-9));
}

TEST(Graph, DeformWithZeroParametersIsIdentity)
{
    const Graph g = triangle_genus1();
    const Graph d = deform(g, {});
    for (size_t p = 0; p < g.vertices().size(); ++p)
        EXPECT_LT((d.position(static_cast<int>(p)) - g.position(static_cast<int>(p))).norm(), 1e-14);
    for (double v : measure_ell(g, d))
        EXPECT_NEAR(v, 0.0, 1e-12);
    for (const Mat3& F : deformed_frames(g, d))
        expect_rotation(F);
}

TEST(Graph, DeformWithoutEllRealizesUnbalancing)
{
    const Graph g = tetra_chain(4);
    DeformationParams prm;
    prm.d_hat[g.vertices()[0].id] = Vec3(0.01, -0.005, 0.007);
    const Graph d = deform(g, prm);
    EXPECT_LT((unbalancing(d, 0) - prm.d_hat.at(g.vertices()[0].id)).norm(), 1e-12);
    for (int p = 1; p < static_cast<int>(g.vertices().size()); ++p)
        EXPECT_LT(unbalancing(d, p).norm(), 1e-12);
}

// Changing lengths may turn edges, so the unbalancing of Gamma(d, ell) only stays within O(|ell|) of d.
TEST(Graph, DeformRealizesEllWithBoundedUnbalancingDrift)
{
    const Graph g = tetra_chain(4);
    DeformationParams prm;
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const Edge& e : g.edges())
        prm.ell[e.id] = 0.01 * u(rng);
    prm.d_hat[g.vertices()[0].id] = Vec3(0.01, -0.005, 0.007);
    const Graph d = deform(g, prm);
    const std::vector<double> ell = measure_ell(g, d);
    for (size_t e = 0; e < g.edges().size(); ++e)
        EXPECT_NEAR(ell[e], prm.ell.at(g.edges()[e].id), 1e-9);
    const Graph d0 = deform(g, {prm.d_hat, {}});
    for (int p = 0; p < static_cast<int>(g.vertices().size()); ++p)
        EXPECT_LT((unbalancing(d, p) - unbalancing(d0, p)).norm(), 20.0 * prm.norm_L(g));
}

TEST(Graph, DeformRejectsLargeParameters)
{
    const Graph g = triangle_genus1();
    DeformationParams prm;
    prm.ell[g.edges()[0].id] = 1.0;
    EXPECT_THROW(deform(g, prm), ValidationError);
}
