#include "cmcglue/conformal.hpp"
#include "cmcglue/fit.hpp"
#include "cmcglue/smoothstep.hpp"

#include <algorithm>
#include <cmath>

namespace cmcglue {

double normsq_A(const SurfaceDiffGeom& g)
{
    const double det = g.E * g.G - g.F * g.F;
    const double K = (g.L * g.N - g.M * g.M) / det;
    return 4.0 * g.H * g.H - 2.0 * K;
}

namespace {

const PlacedElement& element_at(const InitialSurface& s, int element)
{
    if (element < 0 || element >= static_cast<int>(s.elements.size()))
        throw ValidationError("conformal: element index out of range");
    return s.elements[element];
}

// Distance from the nearer attached end in domain coordinates.
double end_distance(const PlacedElement& el, double t)
{
    const double R = el.block.domain_length();
    if (el.kind == ElementKind::Edge && t > 0.5 * R)
        return R - t;
    return t;
}

MetricCoeffs scaled(const SurfaceDiffGeom& g, double f) { return {f * g.E, f * g.F, f * g.G}; }

// Third fundamental form N*g_{S^2} = -2H II - K I with II measured against the outward normal.
MetricCoeffs third_form(const SurfaceDiffGeom& g)
{
    const double det = g.E * g.G - g.F * g.F;
    const double K = (g.L * g.N - g.M * g.M) / det;
    return {-2.0 * g.H * g.L - K * g.E, -2.0 * g.H * g.M - K * g.F, -2.0 * g.H * g.N - K * g.G};
}

// Operator norm of ref^{-1} (a - b) for symmetric 2x2 forms.
double relative_form_gap(const MetricCoeffs& a, const MetricCoeffs& b, const MetricCoeffs& ref)
{
    Eigen::Matrix2d D, R;
    D << a.E - b.E, a.F - b.F, a.F - b.F, a.G - b.G;
    R << ref.E, ref.F, ref.F, ref.G;
    Eigen::LLT<Eigen::Matrix2d> llt(R);
    const Eigen::Matrix2d Li = llt.matrixL().solve(Eigen::Matrix2d::Identity());
    const Eigen::Matrix2d S = Li * D * Li.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

MetricCoeffs round_metric(double s) // Y0^* g_{S^2} at Y0(s, .)
{
    const double c = 1.0 / (std::cosh(s) * std::cosh(s));
    return {c, 0.0, c};
}

// Orthonormal tangent pair at a unit vector.
std::pair<Vec3, Vec3> tangent_frame(const Vec3& x)
{
    const Vec3 seed = std::abs(x[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 u = (seed - seed.dot(x) * x).normalized();
    return {u, x.cross(u)};
}

Vec3 sphere_step(const Vec3& x, const Vec3& u, double h) { return std::cos(h) * x + std::sin(h) * u; }

std::vector<Vec3> fibonacci_sphere(int n)
{
    std::vector<Vec3> pts;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n;
        const double r = std::sqrt(1.0 - z * z);
        pts.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
    }
    return pts;
}

bool outside_disks(const SphereBlock& b, const Vec3& x, double radius)
{
    for (const auto& c : b.spec().x1)
        if (std::acos(std::clamp(x.dot(c), -1.0, 1.0)) <= radius)
            return false;
    return true;
}

} // namespace

double ConformalData::psi_hat(int element, double t) const
{
    const PlacedElement& el = element_at(*s_, element);
    return psi(s_->a + 5.0, s_->a + 4.0, end_distance(el, t));
}

double ConformalData::underline_t(int element, double t) const
{
    const PlacedElement& el = element_at(*s_, element);
    return el.block.target_profile().quarter_period() / el.block.domain_profile().quarter_period() * t;
}

double ConformalData::rho_tilde(int element, double t) const
{
    const PlacedElement& el = element_at(*s_, element);
    return 1.0 / el.block.target_profile().r(underline_t(element, t));
}

double ConformalData::rho(int element, double t, double theta) const
{
    const double ph = psi_hat(element, t);
    const double rt = ph < 1.0 ? rho_tilde(element, t) : 0.0;
    if (ph == 0.0)
        return rt;
    const double A = std::sqrt(0.5 * normsq_A(element_at(*s_, element).block.geometry(t, theta)));
    return ph * A + (1.0 - ph) * rt;
}

double ConformalData::h_factor(int element, double t, double theta) const
{
    return 0.5 * normsq_A(element_at(*s_, element).block.geometry(t, theta));
}

double ConformalData::chi_factor(int element, double t, double theta) const
{
    const double r = rho(element, t, theta);
    return r * r;
}

MetricCoeffs ConformalData::g(int element, double t, double theta) const
{
    return scaled(element_at(*s_, element).block.geometry(t, theta), 1.0);
}

MetricCoeffs ConformalData::h(int element, double t, double theta) const
{
    const SurfaceDiffGeom geo = element_at(*s_, element).block.geometry(t, theta);
    return scaled(geo, 0.5 * normsq_A(geo));
}

MetricCoeffs ConformalData::chi(int element, double t, double theta) const
{
    return scaled(element_at(*s_, element).block.geometry(t, theta), chi_factor(element, t, theta));
}

Discrepancy central_limit_discrepancy(const InitialSurface& s, int vertex, double collar, int samples)
{
    if (vertex < 0 || vertex >= static_cast<int>(s.spheres.size()))
        throw ValidationError("central_limit_discrepancy: vertex index out of range");
    const PlacedSphere& sp = s.spheres[vertex];
    Discrepancy out;
    double dmax = 0.0;
    const double hs = 1e-4;

    // Sphere piece: Y~[p] is the untwisted sphere, so Y - p' - Y~[p] = block(x) - x.
    auto D = [&](const Vec3& x) -> Vec3 { return sp.block(x) - x; };
    const double radius = s.disk_radius();
    for (const Vec3& x : fibonacci_sphere(samples * samples)) {
        if (!outside_disks(sp.block, x, radius + 2 * hs))
            continue;
        out.c0 = std::max(out.c0, D(x).norm());
        const auto [u, v] = tangent_frame(x);
        const Vec3 du = (D(sphere_step(x, u, hs)) - D(sphere_step(x, u, -hs))) / (2 * hs);
        const Vec3 dv = (D(sphere_step(x, v, hs)) - D(sphere_step(x, v, -hs))) / (2 * hs);
        dmax = std::max(dmax, std::sqrt(du.squaredNorm() + dv.squaredNorm()));
    }

    // Collars: Y~[p] = F[e] Y0(s) with s = t (p+) or t - R (p-).
    for (size_t j = 0; j < sp.elements.size(); ++j) {
        const PlacedElement& el = s.elements[sp.elements[j]];
        const double sg = sp.sigma[j];
        const double R = el.block.domain_length();
        auto Dc = [&](double u, double th) -> Vec3 {
            const double t = sg > 0 ? u : R - u;
            const double sv = sg > 0 ? u : -u;
            return el.point(t, th) - sp.center - el.frame0 * sphere_immerse(sv, th);
        };
        const int nt = samples, nth = samples;
        for (int i = 0; i <= nt; ++i) {
            const double u = s.a + collar * i / nt;
            const double sech = 1.0 / std::cosh(u);
            for (int k = 0; k < nth; ++k) {
                const double th = 2.0 * kPi * k / nth;
                out.c0 = std::max(out.c0, Dc(u, th).norm());
                const Vec3 dt = (Dc(u + hs, th) - Dc(u - hs, th)) / (2 * hs);
                const Vec3 dh = (Dc(u, th + hs) - Dc(u, th - hs)) / (2 * hs);
                dmax = std::max(dmax, std::sqrt(dt.squaredNorm() + dh.squaredNorm()) / sech);
            }
        }
    }
    out.c1 = out.c0 + dmax;
    return out;
}

Discrepancy standard_limit_discrepancy(const InitialSurface& s, int element, End end, int n, double half_width,
                                       bool reflect_odd, int samples)
{
    const PlacedElement& el = element_at(s, element);
    const double P = el.block.domain_profile().quarter_period();
    const int lmax = el.kind == ElementKind::Edge ? el.l : el.l * 2 - 1;
    if (end == End::Minus && el.kind != ElementKind::Edge)
        throw ValidationError("standard_limit_discrepancy: rays have no minus end");
    if (n < 1 || n > (end == End::Plus ? lmax : el.l - 1))
        throw ValidationError("standard_limit_discrepancy: standard region label out of range");
    // Location index along the block; parity is preserved by the mirror n -> 2l - n.
    const int m = end == End::Plus ? n : 2 * el.l - n;
    const double c = 2.0 * m * P;
    const bool odd = m % 2 != 0;
    auto D = [&](double t, double th) -> Vec3 {
        const double u = (odd && reflect_odd) ? c - t : t - c;
        return el.block.geometry(t, th).normal - sphere_immerse(u, th);
    };
    Discrepancy out;
    double dmax = 0.0;
    const double hs = 1e-4;
    for (int i = 0; i <= samples; ++i) {
        const double u = -half_width + 2.0 * half_width * i / samples;
        const double t = c + u;
        const double sech = 1.0 / std::cosh(u);
        for (int k = 0; k < samples; ++k) {
            const double th = 2.0 * kPi * k / samples;
            out.c0 = std::max(out.c0, D(t, th).norm());
            const Vec3 dt = (D(t + hs, th) - D(t - hs, th)) / (2 * hs);
            const Vec3 dh = (D(t, th + hs) - D(t, th - hs)) / (2 * hs);
            dmax = std::max(dmax, std::sqrt(dt.squaredNorm() + dh.squaredNorm()) / sech);
        }
    }
    out.c1 = out.c0 + dmax;
    return out;
}

MetricSuite metric_comparison_suite(const Graph& g, const std::vector<double>& taus, const BuildOptions& opts, double scale,
                                    int samples)
{
    if (taus.size() < 3)
        throw ValidationError("metric_comparison_suite: at least three tau values are required");
    MetricSuite suite;
    suite.taus = taus;
    const char* names[8] = {"h in C^1(S_x[p], g)",
                            "h - Y~[p]^* g_S2 on S_x[p]",
                            "chi in C^0(S_x[p], h)",
                            "h - N^* g on S_x[p,e,n]",
                            "h - Y~[p,e,n]^* g_S2 on S_x[p,e,n]",
                            "chi in C^0(S_x[p,e,n], h)",
                            "rho^{+-1} in C^1(S_x[p], chi)",
                            "weighted rho^{+-1} in C^1(M, chi)"};
    const double claimed[8] = {0.0, 0.5, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < 8; ++i) {
        MetricItem it;
        it.item = i + 1;
        it.name = names[i];
        it.claimed_exponent = claimed[i];
        suite.items.push_back(it);
    }

    for (double tau : taus) {
        const auto [d, zeta] = random_parameters(g, tau, scale, scale, 7u, opts.eps);
        const InitialSurface s = build_initial_surface(g, tau, d, zeta, opts);
        const ConformalData cd(s);
        const PlacedSphere& sp = s.spheres.front();
        const int k = sp.elements.front();
        const PlacedElement& el = s.elements[k];
        const bool plus = sp.sigma.front() > 0;
        const double R = el.block.domain_length();
        auto at = [&](double u) { return plus ? u : R - u; }; // end coordinate -> domain t
        const double a = s.a;
        const double P = el.block.domain_profile().quarter_period();
        const double hs = 1e-4;

        double v[8] = {0, 0, 0, 0, 0, 0, 0, 0};

        // Sphere piece: |A|^2 = 2, h = g = round metric up to the twist; rho = 1.
        {
            const double radius = s.disk_radius();
            for (const Vec3& x : fibonacci_sphere(samples * samples)) {
                if (!outside_disks(sp.block, x, radius + 2 * hs))
                    continue;
                const auto [u, w] = tangent_frame(x);
                const Vec3 du = (sp.block(sphere_step(x, u, hs)) - sp.block(sphere_step(x, u, -hs))) / (2 * hs);
                const Vec3 dw = (sp.block(sphere_step(x, w, hs)) - sp.block(sphere_step(x, w, -hs))) / (2 * hs);
                const MetricCoeffs hm{du.dot(du), du.dot(dw), dw.dot(dw)};
                v[0] = std::max(v[0], 1.0);
                v[1] = std::max(v[1], relative_form_gap(hm, {1, 0, 1}, {1, 0, 1}));
                v[2] = std::max(v[2], 1.0);
                v[6] = std::max(v[6], 1.0);
            }
        }
        // Collar of S_x[p] up to the gluing band.
        for (int i = 0; i <= samples; ++i) {
            const double u = a + 3.0 * i / samples;
            const double t = at(u);
            for (int j = 0; j < samples; ++j) {
                const double th = 2.0 * kPi * j / samples;
                const SurfaceDiffGeom geo = el.block.geometry(t, th);
                const double hf = 0.5 * normsq_A(geo);
                const double dhf = std::abs(cd.h_factor(k, t + hs, th) - cd.h_factor(k, t - hs, th)) / (2 * hs);
                const double gnorm = std::sqrt(geo.E);
                v[0] = std::max(v[0], hf + dhf / gnorm);
                v[1] = std::max(v[1], relative_form_gap(scaled(geo, hf), round_metric(u), round_metric(u)));
                const double r = cd.rho(k, t, th);
                v[2] = std::max(v[2], r * r / hf);
                const double dr = std::abs(cd.rho(k, t + hs, th) - cd.rho(k, t - hs, th)) / (2 * hs);
                const double chi_len = r * gnorm;
                v[6] = std::max(v[6], std::max(r, 1.0 / r) + std::max(dr, dr / (r * r)) / chi_len);
            }
        }
        // First standard region S_x[p, e, n] clear of the gluing bands.
        const int n = std::max(1, static_cast<int>(std::ceil((a + 5.0 + kSpectralB) / (2.0 * P))));
        if (el.kind == ElementKind::Edge && n > el.l)
            throw ValidationError("metric_comparison_suite: the first edge is too short for a clean standard region");
        const double c = 2.0 * n * P;
        for (int i = 0; i <= samples; ++i) {
            const double u = -kSpectralB + 2.0 * kSpectralB * i / samples;
            const double t = at(c + u);
            for (int j = 0; j < samples; ++j) {
                const double th = 2.0 * kPi * j / samples;
                const SurfaceDiffGeom geo = el.block.geometry(t, th);
                const double hf = 0.5 * normsq_A(geo);
                const MetricCoeffs hm = scaled(geo, hf);
                v[3] = std::max(v[3], relative_form_gap(hm, third_form(geo), hm));
                v[4] = std::max(v[4], relative_form_gap(hm, round_metric(u), round_metric(u)));
                v[5] = std::max(v[5], cd.chi_factor(k, t, th) / hf);
            }
        }
        // Weighted rho norm over the block outside the gluing bands: sup (1 + |d log rho|_chi).
        {
            const int nt = static_cast<int>(std::ceil((el.t_max() - el.t_min()) * samples / 4.0));
            for (int i = 0; i <= nt; ++i) {
                const double t = el.t_min() + (el.t_max() - el.t_min()) * i / nt;
                if (el.block.band(t) == Band::Gluing)
                    continue;
                const double r = cd.rho(k, t, 0.0);
                const double dlog = std::abs(std::log(cd.rho(k, t + hs, 0.0)) - std::log(cd.rho(k, t - hs, 0.0))) / (2 * hs);
                const double chi_len = r * std::sqrt(el.block.geometry(t, 0.0).E);
                v[7] = std::max(v[7], 1.0 + dlog / chi_len);
            }
        }
        for (int i = 0; i < 8; ++i)
            suite.items[i].values.push_back(v[i]);
    }
    for (auto& it : suite.items) {
        const LinearFit f = loglog_fit(taus, it.values);
        it.fitted_exponent = f.slope;
        it.r2 = f.r2;
        it.within_band = f.slope >= it.claimed_exponent - 0.3;
    }
    return suite;
}

} // namespace cmcglue
