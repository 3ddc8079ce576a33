#pragma once

#include "cmcglue/assembly.hpp"

#include <string>
#include <vector>

namespace cmcglue {

struct MetricCoeffs
{
    double E = 0.0;
    double F = 0.0;
    double G = 0.0;
};

// |A|^2 = 4 H^2 - 2 K.
double normsq_A(const SurfaceDiffGeom& g);

// Conformal factors of h = (|A|^2 / 2) g and chi = rho^2 g over a built surface.
// Block points are addressed by (element, t, theta) in the domain coordinates of that element; the sphere
// pieces are exact unit spheres, so |A|^2 = 2 and rho = 1 there.
class ConformalData
{
public:
    explicit ConformalData(const InitialSurface& s) : s_(&s) {}

    const InitialSurface& surface() const { return *s_; }

    // psi[a+5, a+4] in the distance from the nearer attached end.
    double psi_hat(int element, double t) const;
    // t_ = (P_target / P_domain) t.
    double underline_t(int element, double t) const;
    // 1 / r_{tau_e}(t_).
    double rho_tilde(int element, double t) const;
    double rho(int element, double t, double theta) const;
    double h_factor(int element, double t, double theta) const;
    double chi_factor(int element, double t, double theta) const;

    MetricCoeffs g(int element, double t, double theta) const;
    MetricCoeffs h(int element, double t, double theta) const;
    MetricCoeffs chi(int element, double t, double theta) const;

private:
    const InitialSurface* s_;
};

struct Discrepancy
{
    double c0 = 0.0;
    double c1 = 0.0; // c0 plus the sup of first derivatives in the limit metric
};

// || (Y - p') - Y~[p] || on S[p]: the sphere piece outside the disks and the collars t in [a, a + collar].
Discrepancy central_limit_discrepancy(const InitialSurface& s, int vertex, double collar = 3.0, int samples = 48);

// || R'^{-1} N - Y~[p,e,n] || on [2nP - half_width, 2nP + half_width] (mirrored at the minus end).
// With reflect_odd = false the odd-n limit is taken unreflected, which exposes the reflection rule.
Discrepancy standard_limit_discrepancy(const InitialSurface& s, int element, End end, int n,
                                       double half_width = kSpectralB, bool reflect_odd = true, int samples = 48);

struct MetricItem
{
    int item = 0;
    std::string name;
    double claimed_exponent = 0.0; // 0 for the uniformly bounded items
    std::vector<double> values;    // one per tau
    double fitted_exponent = 0.0;
    double r2 = 0.0;
    // k >= claimed - 0.3: every stated rate is an upper bound, and bounded items must not grow as tau -> 0.
    bool within_band = false;
};

struct MetricSuite
{
    std::vector<double> taus;
    std::vector<MetricItem> items;
};

// Builds the surface at each tau with seeded random (d, zeta) at `scale` times the admissible caps and measures
// discrete C^0/C^1 surrogates of the eight metric comparisons at the first vertex, its first incident element and
// the first standard region past the gluing bands. S_x[p] is sampled up to t = a + 3 and item 8 skips the gluing
// bands, where |A| carries H_gluing. Meaningful once 2 P_tau > a + 5, i.e. tau <= 1e-4.
MetricSuite metric_comparison_suite(const Graph& g, const std::vector<double>& taus, const BuildOptions& opts = {},
                                    double scale = 1e-3, int samples = 32);

} // namespace cmcglue
