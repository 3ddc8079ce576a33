#pragma once

#include "cmcglue/blocks.hpp"
#include "cmcglue/graph.hpp"
#include "cmcglue/regions.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cmcglue {

// Dislocation vectors per attachment [p, e], keyed by (vertex id, element id).
struct ZetaAssignment
{
    std::map<std::pair<std::string, std::string>, Vec3> values;

    Vec3 at(const std::string& vertex, const std::string& element) const;
    void set(const std::string& vertex, const std::string& element, const Vec3& z) { values[{vertex, element}] = z; }
    double norm() const;
};

// Admissibility constants: ||zeta|| <= kZetaCap * tau_bar and ||d|| <= eps * tau_bar with eps small enough
// that attachment directions move by less than delta/16.
inline constexpr double kZetaCap = 1.0;
inline constexpr double kAdmissibleEps = kDefaultDelta / 24.0;

struct BuildOptions
{
    double delta = kDefaultDelta;
    double b = 0.0;           // region constant, 0 selects 5 + a + 1
    int ray_periods = 6;      // ray truncation l_max
    double eps = kAdmissibleEps;
    bool enforce_caps = true; // reject d, zeta beyond the admissible norms
};

// 2 ell(e) = |zeta[p+] - (zeta[p-] + (ltilde, 0, 0))| - 2 l(e), ltilde = (2 + 2 p_{tau_e}) l(e). One entry per edge.
std::vector<double> ell_from_zeta(const Graph& g, const std::vector<DelaunayProfile>& edge_profiles, const ZetaAssignment& zeta);

// Columns (e1bar, e2bar, e3bar) with e1bar parallel to (zeta_minus + (ltilde, 0, 0)) - zeta_plus.
Mat3 zeta_frame(const Vec3& zeta_plus, const Vec3& zeta_minus, double ltilde);

struct PlacedElement
{
    ElementKind kind = ElementKind::Edge;
    int index = 0;
    std::string id;
    int vertex_plus = -1;
    int vertex_minus = -1; // -1 for rays
    int l = 1;
    double tau_e = 0.0; // domain parameter tau * tau_hat(e)
    double tau_d = 0.0; // target parameter tau * tau_hat of the deformed graph
    double ell = 0.0;
    Mat3 frame0 = Mat3::Identity();  // F_Gamma[e]
    Mat3 zframe = Mat3::Identity();  // F_zeta[e]
    Mat3 rotation = Mat3::Identity(); // R'[e]
    Vec3 translation = Vec3::Zero();  // U[e](x) = R' x + translation
    DelaunayBlock block;

    Vec3 to_world(const Vec3& x) const { return rotation * x + translation; }
    Vec3 point(double t, double theta) const { return to_world(block(t, theta)); }
    // Geometry with the normal rotated into world coordinates.
    SurfaceDiffGeom geometry(double t, double theta) const;
    double t_min() const { return block.t_min(); }
    double t_max() const { return block.t_max(); }
};

struct PlacedSphere
{
    int vertex = 0;
    Vec3 center = Vec3::Zero(); // p' in the deformed graph
    SphereBlock block;
    std::vector<int> elements; // positions in InitialSurface::elements
    std::vector<double> sigma; // +1 at p+ ends and rays, -1 at p- ends

    Vec3 point(const Vec3& x) const { return center + block(x); }
};

struct AttachmentResidual
{
    std::string vertex;
    std::string element;
    double residual;
};

struct InitialSurface
{
    Graph graph;
    Graph deformed;
    double tau_bar = 0.0;
    double delta = kDefaultDelta;
    double a = 0.0;
    double b = 0.0;
    std::map<std::string, Vec3> d;
    ZetaAssignment zeta;
    std::vector<PlacedElement> elements; // edges in graph order, then rays
    std::vector<PlacedSphere> spheres;   // one per vertex

    const PlacedElement& edge(int e) const { return elements[e]; }
    const PlacedElement& ray(int r) const { return elements[graph.edges().size() + r]; }
    // Angular radius of the removed disks on M[p].
    double disk_radius() const;
    // Sphere-side coordinate of the collar point (t, theta) of element k at the end sigma.
    Vec3 collar_sphere_coordinate(int k, double sigma, double t, double theta) const;
    std::vector<AttachmentResidual> chart_report(int nth = 48) const;
    double chart_residual(int nth = 48) const;
    // Pi * sum tau_d sigma R'[e] e1 (the Delaunay axis), the vertex vector the flux identity predicts.
    Vec3 predicted_flux(int vertex) const;
};

// d by vertex id (scaled, ||d|| <= eps tau); missing entries are zero.
InitialSurface build_initial_surface(const Graph& g, double tau, const std::map<std::string, Vec3>& d,
                                     const ZetaAssignment& zeta, const BuildOptions& opts = {});

// Random d and zeta with ||d|| = scale_d * eps * tau and ||zeta|| = scale_zeta * kZetaCap * tau.
std::pair<std::map<std::string, Vec3>, ZetaAssignment> random_parameters(const Graph& g, double tau, double scale_d,
                                                                         double scale_zeta, unsigned seed,
                                                                         double eps = kAdmissibleEps);

struct FluxReport
{
    Vec3 quadrature = Vec3::Zero(); // integral of H_gluing N dg with the outward normal
    Vec3 formula = Vec3::Zero();    // pi d_zeta(p)
    // |quadrature + formula| / max(|formula|, pi tau_bar): with the outward normal the integral is -pi d_zeta(p).
    double relative_error = 0.0;
};

// Integrates H_gluing N over the gluing bands of S+[p]: Gauss-Legendre on sixth-unit pieces in t, trapezoid in theta.
FluxReport flux_balance_check(const InitialSurface& s, int vertex, int t_nodes_per_unit = 64, int nth = 256);

} // namespace cmcglue
