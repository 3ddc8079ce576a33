#pragma once

#include "cmcglue/delaunay.hpp"
#include "cmcglue/jet.hpp"
#include "cmcglue/smoothstep.hpp"
#include "cmcglue/types.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace cmcglue {

inline constexpr double kDefaultDelta = 0.15;

// Collar size a with tanh(a + 1) = cos(delta / 8).
double collar_a(double delta);

struct EdgeBlockSpec
{
    double tau_domain = 1e-3; // sets the domain length 4 P l
    double tau_target = 1e-3; // parameter of the immersed Delaunay piece
    int l = 1;
    Vec3 zeta_plus = Vec3::Zero();
    Vec3 zeta_minus = Vec3::Zero();
    double a = 0.0; // 0 selects collar_a(kDefaultDelta)
};

struct RayBlockSpec
{
    double tau_domain = 1e-3;
    double tau_target = 1e-3;
    Vec3 zeta_plus = Vec3::Zero();
    double a = 0.0;
    int periods = 6; // truncation t_max = 4 P l_max
};

enum class Band { Dislocation, Gluing, Clean };

// A perturbed Delaunay piece: the blend of dislocated spheres and a Delaunay surface composed with
// the domain reparameterization.
class DelaunayBlock
{
public:
    static DelaunayBlock edge(const EdgeBlockSpec& spec);
    static DelaunayBlock ray(const RayBlockSpec& spec);
    // Reuses already solved profiles.
    static DelaunayBlock edge(const EdgeBlockSpec& spec, const DelaunayProfile& domain, const DelaunayProfile& target);
    static DelaunayBlock ray(const RayBlockSpec& spec, const DelaunayProfile& domain, const DelaunayProfile& target);

    bool is_edge() const { return is_edge_; }
    double a() const { return a_; }
    int l() const { return l_; }
    double t_min() const { return a_; }
    double t_max() const { return t_max_; }
    double domain_length() const { return R_; } // 4 P_tau l for the domain parameter
    const Vec3& zeta_plus() const { return zp_; }
    const Vec3& zeta_minus() const { return zm_; }
    const DelaunayProfile& domain_profile() const { return dom_; }
    const DelaunayProfile& target_profile() const { return tgt_; }
    // Axial length (2 + 2 p_tau') l of the target piece.
    double axial_length() const;

    Vec3 operator()(double t, double theta) const;
    Jet3 jet(double t, double theta) const;
    SurfaceDiffGeom geometry(double t, double theta) const { return diff_geom(jet(t, theta)); }
    double mean_curvature(double t, double theta) const { return geometry(t, theta).H; }

    // Reparameterized coordinate and its derivative.
    Jet reparam(double t) const;

    // Band of the H_error decomposition that contains t.
    Band band(double t) const;
    // Support bands where H may differ from 1.
    std::vector<std::pair<double, double>> error_support() const;

    // Sum of the five (edge) or three (ray) blend weights minus one.
    double partition_defect(double t) const;

    // Pure sphere Y0 + zeta+ on [a, a+1] in block coordinates.
    Vec3 plus_sphere(double t, double theta) const;
    // Pure sphere Y0^- + zeta- near the far end.
    Vec3 minus_sphere(double t, double theta) const;

private:
    bool is_edge_ = true;
    double a_ = 0.0;
    int l_ = 1;
    double R_ = 0.0;      // 4 P_tau l
    double Rt_ = 0.0;     // 4 P_tau' l
    double t_max_ = 0.0;
    double ratio_ = 1.0;  // P_tau' / P_tau
    Vec3 zp_ = Vec3::Zero();
    Vec3 zm_ = Vec3::Zero();
    DelaunayProfile dom_;
    DelaunayProfile tgt_;

    Jet3 raw(const Jet& t, const Jet& theta) const;
};

Jet3 sphere_jet(const Jet& t, const Jet& theta);
Jet3 delaunay_jet(const DelaunayProfile& profile, const Jet& t, const Jet& theta);

// H from central differences with one Richardson level; unit sphere with outward normal gives +1.
double mean_curvature_numeric(const std::function<Vec3(double, double)>& X, double t, double theta, double step = 1e-4);

struct HErrorField
{
    int nt = 0;
    int nth = 0;
    std::vector<double> t;
    std::vector<double> values; // H - 1, index it * nth + ith
    double sup_dislocation = 0.0;
    double sup_gluing = 0.0;
    double sup_clean = 0.0; // outside the stated bands; should be at noise level
};

// Samples H - 1 on [t0, t1] (clamped to the block domain) with samples_per_unit in t and nth in theta.
HErrorField h_error_field(const DelaunayBlock& block, double t0, double t1, int samples_per_unit, int nth);

struct GraphFunction
{
    int nt = 0;
    int nth = 0;
    std::vector<double> t;
    std::vector<double> theta;
    std::vector<double> f; // index it * nth + ith
    double max_residual = 0.0;
    int max_iterations = 0;
};

// f+ on [t0, t1] within [a, a+3] (default the whole range) with block(x) = (Y0 + zeta+)(x') + f(x') N(x'),
// N = Y0(x'). Solved by damped Newton in (t, theta, f) from (t', theta', 0).
GraphFunction graph_over_dislocated_sphere(const DelaunayBlock& block, int samples_per_unit, int nth,
                                           double t0 = std::nan(""), double t1 = std::nan(""));

// Data for the spherical building block.
struct SphereBlockSpec
{
    std::vector<Vec3> x1; // disk centers
    std::vector<Vec3> x2; // secondary frame vectors, x1[i] . x2[i] = 0
    std::vector<Vec3> y1; // targets
    std::vector<Vec3> y2;
    double delta = kDefaultDelta;
};

// Twisted diffeomorphism of the punctured sphere: identity away from the disks, the rotation
// R[Yhat x2, y2] R[x1, y1] near each disk, blended by psi_V and renormalized onto the sphere.
// Requires angle(x_i, y_i) < delta/16 and disk centers more than 3 delta apart.
class SphereBlock
{
public:
    SphereBlock() = default;
    explicit SphereBlock(SphereBlockSpec spec);

    const SphereBlockSpec& spec() const { return spec_; }
    const Mat3& rotation(int i) const { return Q_[i]; }
    Vec3 operator()(const Vec3& x) const;
    // psi_V at x: 0 near the disks, 1 away from them.
    double weight(const Vec3& x) const;
    // Angular radius below which the map is the pure rotation.
    double rotation_radius() const { return 0.4 * spec_.delta; }
    double blend_radius() const { return 1.4 * spec_.delta; }

private:
    SphereBlockSpec spec_;
    std::vector<Mat3> Q_;
};

} // namespace cmcglue
