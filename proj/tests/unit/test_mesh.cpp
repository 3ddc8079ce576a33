#include "cmcglue/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

using namespace cmcglue;

TEST(Mesh, SphereHullOfOctahedron)
{
    const std::vector<Vec3> pts = {Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitY(), Vec3::UnitZ(), -Vec3::UnitZ()};
    const auto faces = sphere_hull(pts);
    ASSERT_EQ(faces.size(), 8u);
    for (const auto& f : faces) {
        const Vec3 n = (pts[f[1]] - pts[f[0]]).cross(pts[f[2]] - pts[f[0]]);
        EXPECT_GT(n.dot(pts[f[0]] + pts[f[1]] + pts[f[2]]), 0.0);
    }
}

TEST(Mesh, SphereHullOfRandomPointsIsClosed)
{
    std::mt19937 rng(8);
    std::normal_distribution<double> n;
    std::vector<Vec3> pts;
    for (int i = 0; i < 200; ++i)
        pts.push_back(Vec3(n(rng), n(rng), n(rng)).normalized());
    TriangleMesh m;
    m.vertices = pts;
    m.triangles = sphere_hull(pts);
    EXPECT_EQ(m.triangles.size(), 2 * pts.size() - 4);
    EXPECT_EQ(m.euler_characteristic(), 2);
    EXPECT_EQ(m.boundary_loops(), 0);
    EXPECT_EQ(m.nonmanifold_edges(), 0);
    EXPECT_GT(m.min_area(), 0.0);
}

TEST(Mesh, SphereHullResolvesCocircularPoints)
{
    std::vector<Vec3> pts;
    for (int i = 0; i < 12; ++i)
        pts.emplace_back(std::cos(kPi * i / 6.0), std::sin(kPi * i / 6.0), 0.0);
    pts.push_back(Vec3::UnitZ());
    pts.push_back(-Vec3::UnitZ());
    const auto faces = sphere_hull(pts);
    EXPECT_EQ(faces.size(), 2 * pts.size() - 4);
}

TEST(Mesh, TriangleIntersectionPredicate)
{
    const Vec3 a0(0, 0, 0), a1(1, 0, 0), a2(0, 1, 0);
    EXPECT_TRUE(triangles_intersect(a0, a1, a2, Vec3(0.2, 0.2, -1), Vec3(0.2, 0.2, 1), Vec3(0.3, 0.25, 1)));
    EXPECT_FALSE(triangles_intersect(a0, a1, a2, Vec3(0, 0, 1), Vec3(1, 0, 1), Vec3(0, 1, 1)));
    EXPECT_FALSE(triangles_intersect(a0, a1, a2, Vec3(2, 2, -1), Vec3(2, 2, 1), Vec3(3, 2, 1)));
}

TEST(Mesh, SelfIntersectionFindsCrossingPair)
{
    TriangleMesh m;
    m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0.2, 0.2, -1), Vec3(0.2, 0.2, 1), Vec3(0.3, 0.25, 1)};
    m.triangles = {{0, 1, 2}, {3, 4, 5}};
    const IntersectionReport r = self_intersection_check(m);
    EXPECT_EQ(r.count, 1);
    ASSERT_EQ(r.pairs.size(), 1u);
    m.vertices[3].z() = 0.5;
    EXPECT_TRUE(self_intersection_check(m).empty());
}

TEST(Mesh, StarTessellationTopology)
{
    const InitialSurface s = build_initial_surface(star_symmetric(4), 1e-3, {}, {});
    TessellationReport rep;
    const TriangleMesh m = tessellate(s, 8, &rep);
    EXPECT_EQ(m.tags.size(), m.vertices.size());
    EXPECT_EQ(m.nonmanifold_edges(), 0);
    EXPECT_EQ(m.boundary_loops(), 4);
    EXPECT_EQ(m.euler_characteristic(), 2 - 4);
    EXPECT_GT(m.min_area(), 0.0);
    EXPECT_LT(rep.max_stitch_mismatch, 1e-10);
    EXPECT_TRUE(self_intersection_check(m).empty());
}

TEST(Mesh, GenusOneTessellationTopology)
{
    const Graph g = triangle_genus1();
    const InitialSurface s = build_initial_surface(g, 1e-3, {}, {});
    const TriangleMesh m = tessellate(s, 8);
    const int b = static_cast<int>(g.rays().size());
    EXPECT_EQ(m.nonmanifold_edges(), 0);
    EXPECT_EQ(m.boundary_loops(), b);
    EXPECT_EQ(m.euler_characteristic(), 2 - 2 * 1 - b);
}

TEST(Mesh, BlockTessellationIsAnnulus)
{
    EdgeBlockSpec spec;
    spec.tau_domain = spec.tau_target = 1e-3;
    spec.l = 2;
    const TriangleMesh m = tessellate_block(DelaunayBlock::edge(spec), 8);
    EXPECT_EQ(m.euler_characteristic(), 0);
    EXPECT_EQ(m.boundary_loops(), 2);
    EXPECT_EQ(m.nonmanifold_edges(), 0);
}

TEST(Mesh, RejectsCoarseResolution)
{
    const InitialSurface s = build_initial_surface(star_symmetric(4), 1e-3, {}, {});
    EXPECT_THROW(tessellate(s, 4), ValidationError);
}

TEST(Mesh, WritesObjAndTags)
{
    TriangleMesh m;
    m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    m.triangles = {{0, 1, 2}};
    m.tags = {"a", "b", "c"};
    const auto dir = std::filesystem::temp_directory_path() / "cmcglue_mesh_test";
    std::filesystem::create_directories(dir);
    const std::string obj = (dir / "m.obj").string(), tags = (dir / "m.tags.json").string();
    write_obj(m, obj);
    write_tags(m, tags);
    std::ifstream in(obj);
    int v = 0, f = 0;
    for (std::string line; std::getline(in, line);) {
        v += line.rfind("v ", 0) == 0;
        f += line.rfind("f ", 0) == 0;
    }
    EXPECT_EQ(v, 3);
    EXPECT_EQ(f, 1);
    EXPECT_GT(std::filesystem::file_size(tags), 0u);
    EXPECT_THROW(write_obj(m, (dir / "missing" / "x.obj").string()), IoError);
    std::filesystem::remove_all(dir);
}
