#pragma once

#include "cmcglue/assembly.hpp"

#include <array>
#include <string>
#include <vector>

namespace cmcglue {

struct TriangleMesh
{
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::string> tags; // region label per vertex

    double min_area() const;
    int euler_characteristic() const;
    int boundary_loops() const;
    // Edges used by more than two triangles.
    int nonmanifold_edges() const;
};

// Faces of the convex hull of points on the unit sphere, oriented outward. Co-circular inputs are
// resolved by a deterministic tangential perturbation.
std::vector<std::array<int, 3>> sphere_hull(const std::vector<Vec3>& points);

struct TessellationReport
{
    double max_stitch_mismatch = 0.0; // chart disagreement at shared boundary vertices
};

// Structured (t, theta) grids per block, resolution rows per unit t and ceil(2 pi resolution) columns;
// sphere pieces triangulated on the unit sphere and stitched to the collar rows by shared vertices.
TriangleMesh tessellate(const InitialSurface& s, int resolution, TessellationReport* report = nullptr);

// Rotationally symmetric mesh of one block in its own coordinates (no sphere pieces).
TriangleMesh tessellate_block(const DelaunayBlock& block, int resolution);

void write_obj(const TriangleMesh& mesh, const std::string& path);
void write_tags(const TriangleMesh& mesh, const std::string& path);

struct IntersectionReport
{
    std::vector<std::pair<int, int>> pairs; // first max_pairs hits
    long long count = 0;                    // all intersecting pairs
    long long candidate_pairs = 0;

    bool empty() const { return count == 0; }
};

// Spatial-hash broad phase and triangle-triangle narrow phase; pairs sharing a vertex are skipped.
IntersectionReport self_intersection_check(const TriangleMesh& mesh, size_t max_pairs = 1000);

bool triangles_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0, const Vec3& b1, const Vec3& b2);

} // namespace cmcglue
