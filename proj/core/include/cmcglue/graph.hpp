#pragma once

#include "cmcglue/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cmcglue {

struct Vertex
{
    std::string id;
    Vec3 position;
};

// Frame columns are (v1, v2, v3); v1 points from p_plus toward p_minus.
struct Edge
{
    std::string id;
    std::string p_plus;
    std::string p_minus;
    int l = 1;
    double tau_hat = 1.0;
    Mat3 frame = Mat3::Identity();
};

struct Ray
{
    std::string id;
    std::string vertex;
    Vec3 direction = Vec3::UnitX();
    double tau_hat = 1.0;
    Mat3 frame = Mat3::Identity();
};

enum class ElementKind { Edge, Ray };

// One element of E_p: the edge or ray together with v_{e,p} and sigma_{e,p}.
struct Incidence
{
    ElementKind kind;
    int index;
    Vec3 direction;
    double sigma;
    double tau_hat;
};

// Immutable finite graph; elements are addressed by position, ids resolve through lookups.
class Graph
{
public:
    Graph() = default;
    // Frames left as identity are replaced by the default frame rule.
    Graph(std::vector<Vertex> vertices, std::vector<Edge> edges, std::vector<Ray> rays, std::string family = "");

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Ray>& rays() const { return rays_; }
    const std::string& family() const { return family_; }

    int vertex_index(const std::string& id) const;
    int edge_index(const std::string& id) const;
    int ray_index(const std::string& id) const;
    const Vec3& position(int vertex) const { return vertices_[vertex].position; }
    int plus_index(int edge) const { return vertex_index(edges_[edge].p_plus); }
    int minus_index(int edge) const { return vertex_index(edges_[edge].p_minus); }
    int ray_vertex_index(int ray) const { return vertex_index(rays_[ray].vertex); }

    double edge_length(int edge) const;
    Vec3 edge_direction(int edge) const; // unit, from p_plus toward p_minus

    std::vector<Incidence> incident(int vertex) const;

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<Ray> rays_;
    std::string family_;
    std::map<std::string, int> vidx_, eidx_, ridx_;
};

Vec3 unbalancing(const Graph& g, const std::string& vertex);
Vec3 unbalancing(const Graph& g, int vertex);
bool is_balanced(const Graph& g, double tol);
bool is_central(const Graph& g, double tol = 1e-9);

struct PreEmbedViolation
{
    int condition; // 1 angle, 2 distance, 3 ray directions
    std::string first;
    std::string second;
    double value;
};

struct PreEmbedReport
{
    bool angle_ok = true;
    bool distance_ok = true;
    bool ray_ok = true;
    std::vector<PreEmbedViolation> violations;

    bool pass() const { return angle_ok && distance_ok && ray_ok; }
};

PreEmbedReport check_pre_embedded(const Graph& g, double eps);

// Closest distance between two pieces x0 + s dx, y0 + u dy with s, u in [0, 1] (segment) or [0, inf) (ray).
double piece_distance(const Vec3& x0, const Vec3& dx, bool x_ray, const Vec3& y0, const Vec3& dy, bool y_ray);

// Smallest rotation taking x to y.
Mat3 rotation_between(const Vec3& x, const Vec3& y);

// v2 is the normalized part of e3 orthogonal to v1 (e2 when |v1 . e3| > 0.9), v3 = v1 x v2.
Mat3 default_frame(const Vec3& v1);

struct DeformationParams
{
    std::map<std::string, Vec3> d_hat;  // by vertex id
    std::map<std::string, double> ell; // by edge id

    double norm_D() const;
    double norm_L(const Graph& g) const;
};

inline constexpr double kFlexibilityRadius = 0.1;

// The family member Gamma(d_hat, ell). The last ray at each vertex absorbs d_hat (added to the vertex's own
// unbalancing, which is zero for balanced graphs), vertices move by
// minimum-norm Gauss-Newton steps to realize ell; weights and other ray directions are unchanged.
Graph deform(const Graph& g, const DeformationParams& params, double eps = kFlexibilityRadius);

// Per edge (then per ray) the frame R[v1, v1'] F_Gamma[e].
std::vector<Mat3> deformed_frames(const Graph& g0, const Graph& gd);

std::vector<double> measure_ell(const Graph& g0, const Graph& gd);

// Example generators.
Graph star(const std::vector<Vec3>& dirs, const std::vector<double>& weights);
Graph star_tetrahedral();
Graph star_symmetric(int k);
Graph triangle_genus1(int l = 2, const std::vector<double>& tau_hat = {1.0, 1.0, 1.0});
Graph double_triangle_genus2(int l = 2, const std::vector<double>& tau_hat = {1.0, 1.0, 1.0, 1.0, 1.0},
                             double dihedral = 0.8 * kPi);
Graph tetra_chain(int v, int l = 0); // l = 0 picks the smallest pre-embedded length
// The default twist keeps cross-vertex ray pairs 0.1 away from parallel with the shortest pre-embedded edge.
Graph dodecahedral_22ray(int l = 0, double twist = 29.5 * kPi / 180.0);


// Balanced, central graphs that violate one pre-embedded condition each.
Graph broken_angle_fixture(double angle = kPi / 3.0 - 0.01);
Graph broken_parallel_rays_fixture(int l = 2);

// Dispatch by family name: star (param = ray count, 4 gives the tetrahedral star), triangle_genus1,
// double_triangle_genus2, tetra_chain (param = vertex count), dodecahedral_22ray.
Graph generate_example(const std::string& family, int param = 0);

} // namespace cmcglue
