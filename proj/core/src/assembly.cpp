#include "cmcglue/assembly.hpp"
#include "cmcglue/quadrature.hpp"

#include <cmath>
#include <random>

namespace cmcglue {

Vec3 ZetaAssignment::at(const std::string& vertex, const std::string& element) const
{
    auto it = values.find({vertex, element});
    return it == values.end() ? Vec3::Zero() : it->second;
}

double ZetaAssignment::norm() const
{
    double m = 0.0;
    for (const auto& [k, v] : values)
        m = std::max(m, v.norm());
    return m;
}

std::vector<double> ell_from_zeta(const Graph& g, const std::vector<DelaunayProfile>& edge_profiles, const ZetaAssignment& zeta)
{
    if (edge_profiles.size() != g.edges().size())
        throw ValidationError("ell_from_zeta: one profile per edge required");
    std::vector<double> ell;
    for (size_t e = 0; e < g.edges().size(); ++e) {
        const Edge& E = g.edges()[e];
        const double lt = (2.0 + 2.0 * edge_profiles[e].period_excess()) * E.l;
        const Vec3 zp = zeta.at(E.p_plus, E.id), zm = zeta.at(E.p_minus, E.id);
        ell.push_back(0.5 * ((zm + Vec3(lt, 0, 0) - zp).norm() - 2.0 * E.l));
    }
    return ell;
}

Mat3 zeta_frame(const Vec3& zeta_plus, const Vec3& zeta_minus, double ltilde)
{
    const Vec3 diff = zeta_minus + Vec3(ltilde, 0, 0) - zeta_plus;
    if (!(diff.norm() > 1e-12) || diff[0] <= 0.0)
        throw ValidationError("zeta_frame: degenerate difference vector");
    return rotation_between(Vec3::UnitX(), diff.normalized());
}

SurfaceDiffGeom PlacedElement::geometry(double t, double theta) const
{
    SurfaceDiffGeom g = block.geometry(t, theta);
    g.normal = rotation * g.normal;
    return g;
}

double InitialSurface::disk_radius() const { return std::acos(std::tanh(a)); }

Vec3 InitialSurface::collar_sphere_coordinate(int k, double sigma, double t, double theta) const
{
    const PlacedElement& el = elements[k];
    const double s = sigma > 0 ? t : t - el.block.domain_length();
    return el.frame0 * sphere_immerse(s, theta);
}

std::vector<AttachmentResidual> InitialSurface::chart_report(int nth) const
{
    std::vector<AttachmentResidual> out;
    for (const auto& sp : spheres) {
        for (size_t j = 0; j < sp.elements.size(); ++j) {
            const int k = sp.elements[j];
            const PlacedElement& el = elements[k];
            const double sg = sp.sigma[j];
            double worst = 0.0;
            for (int s = 0; s <= 4; ++s) {
                const double off = 0.25 * s;
                const double t = sg > 0 ? el.t_min() + off : el.t_max() - off;
                for (int i = 0; i < nth; ++i) {
                    const double th = 2.0 * kPi * i / nth;
                    const Vec3 x = collar_sphere_coordinate(k, sg, t, th);
                    worst = std::max(worst, (sp.point(x) - el.point(t, th)).norm());
                }
            }
            out.push_back({graph.vertices()[sp.vertex].id, el.id, worst});
        }
    }
    return out;
}

double InitialSurface::chart_residual(int nth) const
{
    double m = 0.0;
    for (const auto& r : chart_report(nth))
        m = std::max(m, r.residual);
    return m;
}

Vec3 InitialSurface::predicted_flux(int vertex) const
{
    const PlacedSphere& sp = spheres[vertex];
    Vec3 f = Vec3::Zero();
    for (size_t j = 0; j < sp.elements.size(); ++j) {
        const PlacedElement& el = elements[sp.elements[j]];
        f += el.tau_d * sp.sigma[j] * el.rotation.col(0);
    }
    return kPi * f;
}

InitialSurface build_initial_surface(const Graph& g, double tau, const std::map<std::string, Vec3>& d,
                                     const ZetaAssignment& zeta, const BuildOptions& opts)
{
    if (!(tau > 0.0 && tau < 0.25))
        throw ValidationError("build_initial_surface: tau must lie in (0, 1/4)");
    double dnorm = 0.0;
    for (const auto& [k, v] : d) {
        (void)g.vertex_index(k);
        dnorm = std::max(dnorm, v.norm());
    }
    if (opts.enforce_caps) {
        if (dnorm > opts.eps * tau * (1.0 + 1e-12))
            throw ValidationError("build_initial_surface: ||d|| exceeds eps * tau");
        if (zeta.norm() > kZetaCap * tau * (1.0 + 1e-12))
            throw ValidationError("build_initial_surface: ||zeta|| exceeds the admissible cap");
    }
    for (const auto& [key, v] : zeta.values) {
        const int p = g.vertex_index(key.first);
        bool found = false;
        for (const auto& inc : g.incident(p)) {
            const std::string& id = inc.kind == ElementKind::Edge ? g.edges()[inc.index].id : g.rays()[inc.index].id;
            found = found || id == key.second;
        }
        if (!found)
            throw ValidationError("build_initial_surface: zeta given for a non-attachment [" + key.first + "," + key.second + "]");
    }

    InitialSurface s;
    s.graph = g;
    s.tau_bar = tau;
    s.delta = opts.delta;
    s.a = collar_a(opts.delta);
    s.b = opts.b > 0.0 ? opts.b : 5.0 + s.a + 1.0;
    s.d = d;
    s.zeta = zeta;

    std::map<double, DelaunayProfile> cache;
    auto profile = [&](double t) -> const DelaunayProfile& {
        auto it = cache.find(t);
        if (it == cache.end())
            it = cache.emplace(t, DelaunayProfile::solve(t)).first;
        return it->second;
    };

    const size_t ne = g.edges().size(), nr = g.rays().size();
    std::vector<DelaunayProfile> eprof;
    for (const auto& e : g.edges())
        eprof.push_back(profile(tau * e.tau_hat));
    const auto ell = ell_from_zeta(g, eprof, zeta);

    DeformationParams params;
    for (const auto& [k, v] : d)
        params.d_hat[k] = v / tau;
    for (size_t e = 0; e < ne; ++e)
        params.ell[g.edges()[e].id] = ell[e];
    s.deformed = deform(g, params, kFlexibilityRadius);
    const Graph& gd = s.deformed;

    for (size_t e = 0; e < ne; ++e) {
        const Edge& E = g.edges()[e];
        PlacedElement el;
        el.kind = ElementKind::Edge;
        el.index = static_cast<int>(e);
        el.id = E.id;
        el.vertex_plus = g.plus_index(static_cast<int>(e));
        el.vertex_minus = g.minus_index(static_cast<int>(e));
        el.l = E.l;
        el.tau_e = tau * E.tau_hat;
        el.tau_d = tau * gd.edges()[e].tau_hat;
        el.ell = ell[e];
        el.frame0 = E.frame;
        EdgeBlockSpec spec;
        spec.tau_domain = el.tau_e;
        spec.tau_target = el.tau_d;
        spec.l = E.l;
        spec.zeta_plus = zeta.at(E.p_plus, E.id);
        spec.zeta_minus = zeta.at(E.p_minus, E.id);
        spec.a = s.a;
        el.block = DelaunayBlock::edge(spec, profile(el.tau_e), profile(el.tau_d));
        el.zframe = zeta_frame(spec.zeta_plus, spec.zeta_minus, el.block.axial_length());
        el.rotation = gd.edges()[e].frame * el.zframe.transpose();
        el.translation = gd.position(el.vertex_plus) - el.rotation * spec.zeta_plus;
        s.elements.push_back(std::move(el));
    }
    for (size_t r = 0; r < nr; ++r) {
        const Ray& Rr = g.rays()[r];
        PlacedElement el;
        el.kind = ElementKind::Ray;
        el.index = static_cast<int>(r);
        el.id = Rr.id;
        el.vertex_plus = g.ray_vertex_index(static_cast<int>(r));
        el.l = opts.ray_periods;
        el.tau_e = tau * Rr.tau_hat;
        el.tau_d = tau * gd.rays()[r].tau_hat;
        el.frame0 = Rr.frame;
        RayBlockSpec spec;
        spec.tau_domain = el.tau_e;
        spec.tau_target = el.tau_d;
        spec.zeta_plus = zeta.at(Rr.vertex, Rr.id);
        spec.a = s.a;
        spec.periods = opts.ray_periods;
        el.block = DelaunayBlock::ray(spec, profile(el.tau_e), profile(el.tau_d));
        el.rotation = gd.rays()[r].frame;
        el.translation = gd.position(el.vertex_plus) - el.rotation * spec.zeta_plus;
        s.elements.push_back(std::move(el));
    }

    for (size_t p = 0; p < g.vertices().size(); ++p) {
        PlacedSphere sp;
        sp.vertex = static_cast<int>(p);
        sp.center = gd.position(static_cast<int>(p));
        SphereBlockSpec bs;
        bs.delta = opts.delta;
        for (const auto& inc : g.incident(static_cast<int>(p))) {
            const int k = inc.kind == ElementKind::Edge ? inc.index : static_cast<int>(ne) + inc.index;
            const PlacedElement& el = s.elements[k];
            sp.elements.push_back(k);
            sp.sigma.push_back(inc.sigma);
            bs.x1.push_back(inc.sigma * el.frame0.col(0));
            bs.x2.push_back(el.frame0.col(1));
            bs.y1.push_back(inc.sigma * el.rotation.col(0));
            bs.y2.push_back(el.rotation.col(1));
        }
        sp.block = SphereBlock(std::move(bs));
        s.spheres.push_back(std::move(sp));
    }
    return s;
}

std::pair<std::map<std::string, Vec3>, ZetaAssignment> random_parameters(const Graph& g, double tau, double scale_d,
                                                                         double scale_zeta, unsigned seed, double eps)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal;
    auto unit = [&] {
        Vec3 v(normal(rng), normal(rng), normal(rng));
        return Vec3(v.normalized());
    };
    std::map<std::string, Vec3> d;
    for (size_t p = 0; p < g.vertices().size(); ++p) {
        bool has_ray = false;
        for (const auto& inc : g.incident(static_cast<int>(p)))
            has_ray = has_ray || inc.kind == ElementKind::Ray;
        if (has_ray)
            d[g.vertices()[p].id] = scale_d * eps * tau * unit();
    }
    ZetaAssignment z;
    for (size_t p = 0; p < g.vertices().size(); ++p)
        for (const auto& inc : g.incident(static_cast<int>(p))) {
            const std::string& id = inc.kind == ElementKind::Edge ? g.edges()[inc.index].id : g.rays()[inc.index].id;
            z.set(g.vertices()[p].id, id, scale_zeta * kZetaCap * tau * unit());
        }
    return {d, z};
}

FluxReport flux_balance_check(const InitialSurface& s, int vertex, int t_nodes_per_unit, int nth)
{
    if (vertex < 0 || vertex >= static_cast<int>(s.spheres.size()))
        throw ValidationError("flux_balance_check: vertex out of range");
    if (t_nodes_per_unit < 2 || nth < 8)
        throw ValidationError("flux_balance_check: quadrature too coarse");
    const PlacedSphere& sp = s.spheres[vertex];
    FluxReport rep;
    for (size_t j = 0; j < sp.elements.size(); ++j) {
        const PlacedElement& el = s.elements[sp.elements[j]];
        const double a = el.block.a();
        const double lo = sp.sigma[j] > 0 ? a + 3.0 : el.block.domain_length() - (a + 5.0);
        const auto rule = composite_gauss_legendre(t_nodes_per_unit, 12, lo, lo + 2.0);
        Vec3 acc = Vec3::Zero();
        for (size_t q = 0; q < rule.nodes.size(); ++q)
            for (int i = 0; i < nth; ++i) {
                const auto geo = el.geometry(rule.nodes[q], 2.0 * kPi * i / nth);
                acc += rule.weights[q] * (geo.H - 1.0) * geo.area_element * geo.normal;
            }
        rep.quadrature += acc * (2.0 * kPi / nth);
    }
    if (!rep.quadrature.allFinite())
        throw NumericalError("flux_balance_check: quadrature produced non-finite values");
    rep.formula = s.predicted_flux(vertex);
    rep.relative_error = (rep.quadrature + rep.formula).norm() / std::max(rep.formula.norm(), kPi * s.tau_bar);
    return rep;
}

} // namespace cmcglue
