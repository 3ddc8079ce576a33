#include "cmcglue/blocks.hpp"
#include "cmcglue/graph.hpp"

#include <algorithm>
#include <cmath>

namespace cmcglue {

namespace {

Jet psi_jet(double a, double b, const Jet& x) { return x.apply(psi(a, b, x.v), psi_prime(a, b, x.v), psi_second(a, b, x.v)); }

bool is_zero(const Jet& j) { return j.v == 0.0 && j.t == 0.0 && j.h == 0.0 && j.tt == 0.0 && j.th == 0.0 && j.hh == 0.0; }

Jet3 scaled(const Jet& s, const Jet3& x) { return s * x; }

double resolve_a(double a) { return a > 0.0 ? a : collar_a(kDefaultDelta); }

} // namespace

double collar_a(double delta)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw ValidationError("collar_a: delta must lie in (0, 1)");
    return std::atanh(std::cos(delta / 8.0)) - 1.0;
}

SurfaceDiffGeom diff_geom(const Jet3& X)
{
    const Vec3 xt = X.d_t();
    const Vec3 xh = X.d_theta();
    const Vec3 cr = xh.cross(xt);
    const double nrm = cr.norm();
    if (!(nrm > 0.0))
        throw NumericalError("diff_geom: degenerate parameterization");
    const Vec3 n = cr / nrm;
    SurfaceDiffGeom g{};
    g.E = xt.dot(xt);
    g.F = xt.dot(xh);
    g.G = xh.dot(xh);
    g.L = X.d_tt().dot(n);
    g.M = X.d_ttheta().dot(n);
    g.N = X.d_thetatheta().dot(n);
    const double det = g.E * g.G - g.F * g.F;
    g.H = -(g.E * g.N - 2.0 * g.F * g.M + g.G * g.L) / (2.0 * det);
    g.normal = n;
    g.area_element = std::sqrt(det);
    return g;
}

Jet3 sphere_jet(const Jet& t, const Jet& theta)
{
    const Jet s = sech(t);
    return {{tanh(t), s * cos(theta), s * sin(theta)}};
}

Jet3 delaunay_jet(const DelaunayProfile& profile, const Jet& t, const Jet& theta)
{
    const double s = std::abs(profile.tau());
    const double sigma = profile.tau() > 0.0 ? 1.0 : -1.0;
    const ProfileState st = profile.state(t.v);
    const double e2 = std::exp(2.0 * st.w);
    const Jet w = t.apply(st.w, st.wp, -2.0 * s * std::sinh(2.0 * st.w));
    const Jet k = t.apply(st.k, s * (e2 + sigma), 2.0 * s * e2 * st.wp);
    const Jet r = std::sqrt(s) * exp(w);
    return {{k, r * cos(theta), r * sin(theta)}};
}

DelaunayBlock DelaunayBlock::edge(const EdgeBlockSpec& spec)
{
    const auto dom = DelaunayProfile::solve(spec.tau_domain);
    if (spec.tau_target == spec.tau_domain)
        return edge(spec, dom, dom);
    return edge(spec, dom, DelaunayProfile::solve(spec.tau_target));
}

DelaunayBlock DelaunayBlock::ray(const RayBlockSpec& spec)
{
    const auto dom = DelaunayProfile::solve(spec.tau_domain);
    if (spec.tau_target == spec.tau_domain)
        return ray(spec, dom, dom);
    return ray(spec, dom, DelaunayProfile::solve(spec.tau_target));
}

DelaunayBlock DelaunayBlock::edge(const EdgeBlockSpec& spec, const DelaunayProfile& domain, const DelaunayProfile& target)
{
    if (spec.l < 1)
        throw ValidationError("edge block: l must be positive");
    DelaunayBlock b;
    b.is_edge_ = true;
    b.a_ = resolve_a(spec.a);
    b.l_ = spec.l;
    b.dom_ = domain;
    b.tgt_ = target;
    b.R_ = 4.0 * domain.quarter_period() * spec.l;
    b.Rt_ = 4.0 * target.quarter_period() * spec.l;
    b.t_max_ = b.R_ - b.a_;
    b.ratio_ = target.quarter_period() / domain.quarter_period();
    b.zp_ = spec.zeta_plus;
    b.zm_ = spec.zeta_minus;
    if (b.R_ < 2.0 * (b.a_ + 5.0))
        throw ValidationError("edge block: domain too short for the collar bands (tau too large)");
    return b;
}

DelaunayBlock DelaunayBlock::ray(const RayBlockSpec& spec, const DelaunayProfile& domain, const DelaunayProfile& target)
{
    if (spec.periods < 1)
        throw ValidationError("ray block: periods must be positive");
    DelaunayBlock b;
    b.is_edge_ = false;
    b.a_ = resolve_a(spec.a);
    b.l_ = spec.periods;
    b.dom_ = domain;
    b.tgt_ = target;
    b.R_ = 4.0 * domain.quarter_period() * spec.periods;
    b.Rt_ = 4.0 * target.quarter_period() * spec.periods;
    b.t_max_ = b.R_;
    b.ratio_ = target.quarter_period() / domain.quarter_period();
    b.zp_ = spec.zeta_plus;
    if (b.R_ < b.a_ + 5.0)
        throw ValidationError("ray block: truncation shorter than the collar bands");
    return b;
}

double DelaunayBlock::axial_length() const { return (2.0 + 2.0 * tgt_.period_excess()) * l_; }

Jet DelaunayBlock::reparam(double t) const
{
    const Jet x = Jet::var_t(t);
    const double a = a_;
    Jet out = psi_jet(a + 5, a + 4, x) * x;
    Jet mid = psi_jet(a + 4, a + 5, x) * (ratio_ * x);
    if (is_edge_) {
        mid = mid * psi_jet(R_ - (a + 4), R_ - (a + 5), x);
        out = out + psi_jet(R_ - (a + 5), R_ - (a + 4), x) * (x + 4.0 * l_ * (tgt_.quarter_period() - dom_.quarter_period()));
    }
    return out + mid;
}

Jet3 DelaunayBlock::raw(const Jet& t, const Jet& theta) const
{
    const double a = a_;
    const Jet dp = psi_jet(a + 2, a + 1, t);
    const Jet gp = psi_jet(a + 3, a + 4, t);
    Jet3 out = Jet3::constant(Vec3::Zero());
    auto add = [&](const Jet& wgt, auto&& term) {
        if (!is_zero(wgt))
            out = out + scaled(wgt, term());
    };
    if (!is_edge_) {
        add(dp, [&] { return sphere_jet(t, theta) + zp_; });
        add((1.0 - dp) * (1.0 - gp), [&] { return sphere_jet(t, theta); });
        add(gp, [&] { return delaunay_jet(tgt_, t, theta); });
        return out;
    }
    const double R = Rt_;
    const Jet dm = psi_jet(R - (a + 2), R - (a + 1), t);
    const Jet gm = psi_jet(R - (a + 3), R - (a + 4), t);
    const Vec3 shift(axial_length(), 0.0, 0.0);
    add(dp, [&] { return sphere_jet(t, theta) + zp_; });
    add((1.0 - dp) * (1.0 - gp), [&] { return sphere_jet(t, theta); });
    add(gp * gm, [&] { return delaunay_jet(tgt_, t, theta); });
    add((1.0 - dm) * (1.0 - gm), [&] { return sphere_jet(t - R, theta) + shift; });
    add(dm, [&] { return sphere_jet(t - R, theta) + shift + zm_; });
    return out;
}

Jet3 DelaunayBlock::jet(double t, double theta) const { return raw(reparam(t), Jet::var_theta(theta)); }

Vec3 DelaunayBlock::operator()(double t, double theta) const { return jet(t, theta).value(); }

Band DelaunayBlock::band(double t) const
{
    const double a = a_;
    auto in = [&](double lo, double hi) { return t >= lo && t <= hi; };
    if (in(a - 1e300, a + 2) || (is_edge_ && in(R_ - (a + 2), 1e300)))
        return Band::Dislocation;
    if (in(a + 3, a + 5) || (is_edge_ && in(R_ - (a + 5), R_ - (a + 3))))
        return Band::Gluing;
    return Band::Clean;
}

std::vector<std::pair<double, double>> DelaunayBlock::error_support() const
{
    const double a = a_;
    std::vector<std::pair<double, double>> s{{a, a + 2}, {a + 3, a + 5}};
    if (is_edge_) {
        s.emplace_back(R_ - (a + 5), R_ - (a + 3));
        s.emplace_back(R_ - (a + 2), R_ - a);
    }
    return s;
}

double DelaunayBlock::partition_defect(double t) const
{
    const double a = a_;
    const double x = reparam(t).v;
    const double dp = psi(a + 2, a + 1, x);
    const double gp = psi(a + 3, a + 4, x);
    if (!is_edge_)
        return dp + (1 - dp) * (1 - gp) + gp - 1.0;
    const double R = Rt_;
    const double dm = psi(R - (a + 2), R - (a + 1), x);
    const double gm = psi(R - (a + 3), R - (a + 4), x);
    return dp + (1 - dp) * (1 - gp) + gp * gm + (1 - dm) * (1 - gm) + dm - 1.0;
}

Vec3 DelaunayBlock::plus_sphere(double t, double theta) const { return sphere_immerse(t, theta) + zp_; }

Vec3 DelaunayBlock::minus_sphere(double t, double theta) const
{
    return sphere_immerse(reparam(t).v - Rt_, theta) + Vec3(axial_length(), 0.0, 0.0) + zm_;
}

double mean_curvature_numeric(const std::function<Vec3(double, double)>& X, double t, double theta, double step)
{
    auto estimate = [&](double h) {
        const Vec3 x0 = X(t, theta);
        const Vec3 xtp = X(t + h, theta), xtm = X(t - h, theta);
        const Vec3 xhp = X(t, theta + h), xhm = X(t, theta - h);
        const Vec3 xpp = X(t + h, theta + h), xpm = X(t + h, theta - h);
        const Vec3 xmp = X(t - h, theta + h), xmm = X(t - h, theta - h);
        Jet3 j;
        for (int i = 0; i < 3; ++i) {
            j.c[i].v = x0[i];
            j.c[i].t = (xtp[i] - xtm[i]) / (2 * h);
            j.c[i].h = (xhp[i] - xhm[i]) / (2 * h);
            j.c[i].tt = (xtp[i] - 2 * x0[i] + xtm[i]) / (h * h);
            j.c[i].hh = (xhp[i] - 2 * x0[i] + xhm[i]) / (h * h);
            j.c[i].th = (xpp[i] - xpm[i] - xmp[i] + xmm[i]) / (4 * h * h);
        }
        return diff_geom(j).H;
    };
    const double coarse = estimate(step);
    const double fine = estimate(0.5 * step);
    return (4.0 * fine - coarse) / 3.0;
}

HErrorField h_error_field(const DelaunayBlock& block, double t0, double t1, int samples_per_unit, int nth)
{
    if (samples_per_unit < 1 || nth < 3)
        throw ValidationError("h_error_field: grid too coarse");
    t0 = std::max(t0, block.t_min());
    t1 = std::min(t1, block.t_max());
    if (!(t1 > t0))
        throw ValidationError("h_error_field: empty interval");
    HErrorField f;
    f.nt = std::max(2, static_cast<int>(std::ceil((t1 - t0) * samples_per_unit)) + 1);
    f.nth = nth;
    f.t.resize(f.nt);
    f.values.resize(static_cast<size_t>(f.nt) * nth);
    for (int i = 0; i < f.nt; ++i) {
        const double t = t0 + (t1 - t0) * i / (f.nt - 1);
        f.t[i] = t;
        const Band b = block.band(t);
        for (int j = 0; j < nth; ++j) {
            const double th = 2.0 * kPi * j / nth;
            const double e = block.mean_curvature(t, th) - 1.0;
            f.values[static_cast<size_t>(i) * nth + j] = e;
            double& slot = b == Band::Dislocation ? f.sup_dislocation : b == Band::Gluing ? f.sup_gluing : f.sup_clean;
            slot = std::max(slot, std::abs(e));
        }
    }
    return f;
}

GraphFunction graph_over_dislocated_sphere(const DelaunayBlock& block, int samples_per_unit, int nth, double t0, double t1)
{
    if (samples_per_unit < 1 || nth < 3)
        throw ValidationError("graph_over_dislocated_sphere: grid too coarse");
    const double a = block.a();
    if (std::isnan(t0))
        t0 = a;
    if (std::isnan(t1))
        t1 = a + 3.0;
    if (!(t0 >= a - 1e-12 && t1 <= a + 3.0 + 1e-12 && t1 > t0))
        throw ValidationError("graph_over_dislocated_sphere: interval must lie in [a, a+3]");
    const Vec3 zeta = block.zeta_plus();
    if (zeta.norm() > 0.05)
        throw ValidationError("graph_over_dislocated_sphere: |zeta| exceeds 0.05");
    GraphFunction g;
    g.nt = std::max(2, static_cast<int>(std::ceil((t1 - t0) * samples_per_unit)) + 1);
    g.nth = nth;
    g.t.resize(g.nt);
    g.theta.resize(nth);
    g.f.resize(static_cast<size_t>(g.nt) * nth);
    for (int j = 0; j < nth; ++j)
        g.theta[j] = 2.0 * kPi * j / nth;
    for (int i = 0; i < g.nt; ++i) {
        const double tp = t0 + (t1 - t0) * i / (g.nt - 1);
        g.t[i] = tp;
        for (int j = 0; j < nth; ++j) {
            const Vec3 u = sphere_immerse(tp, g.theta[j]);
            auto residual = [&](const Eigen::Vector3d& x) { return Vec3(block(x[0], x[1]) - zeta - (1.0 + x[2]) * u); };
            Eigen::Vector3d x(tp, g.theta[j], 0.0);
            Vec3 F = residual(x);
            double res = F.norm();
            int it = 0;
            for (; it < 60 && res >= 1e-13; ++it) {
                const Jet3 J = block.jet(x[0], x[1]);
                Mat3 D;
                D.col(0) = J.d_t();
                D.col(1) = J.d_theta();
                D.col(2) = -u;
                const Eigen::Vector3d step = D.partialPivLu().solve(F);
                double lambda = 1.0;
                for (int k = 0; k < 30; ++k, lambda *= 0.5) {
                    const Eigen::Vector3d trial = x - lambda * step;
                    const Vec3 Ft = residual(trial);
                    if (Ft.norm() < res || k == 29) {
                        x = trial;
                        F = Ft;
                        break;
                    }
                }
                res = F.norm();
            }
            if (!(res < 1e-11))
                throw NumericalError("graph_over_dislocated_sphere: Newton did not converge (normal graph may not exist)");
            g.max_residual = std::max(g.max_residual, res);
            g.max_iterations = std::max(g.max_iterations, it);
            g.f[static_cast<size_t>(i) * nth + j] = x[2];
        }
    }
    return g;
}

SphereBlock::SphereBlock(SphereBlockSpec spec) : spec_(std::move(spec))
{
    const size_t n = spec_.x1.size();
    if (spec_.x2.size() != n || spec_.y1.size() != n || spec_.y2.size() != n)
        throw ValidationError("SphereBlock: frame lists differ in length");
    if (!(spec_.delta > 0.0 && spec_.delta < 1.0))
        throw ValidationError("SphereBlock: delta must lie in (0, 1)");
    for (size_t i = 0; i < n; ++i) {
        auto ang = [](const Vec3& u, const Vec3& v) { return std::acos(std::clamp(u.dot(v), -1.0, 1.0)); };
        if (ang(spec_.x1[i], spec_.y1[i]) >= spec_.delta / 16.0 || ang(spec_.x2[i], spec_.y2[i]) >= spec_.delta / 16.0)
            throw ValidationError("SphereBlock: target frame farther than delta/16 from the source frame");
        for (size_t j = 0; j < i; ++j)
            if (ang(spec_.x1[i], spec_.x1[j]) <= 3.0 * spec_.delta)
                throw ValidationError("SphereBlock: disk centers closer than 3 delta");
    }
    Q_.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const Mat3 R1 = rotation_between(spec_.x1[i], spec_.y1[i]);
        const Vec3 u = R1 * spec_.x2[i];
        const Vec3& v = spec_.y2[i];
        Mat3 R2;
        if (u.dot(v) < -1.0 + 1e-12)
            R2 = 2.0 * spec_.y1[i] * spec_.y1[i].transpose() - Mat3::Identity();
        else
            R2 = rotation_between(u, v);
        Q_[i] = R2 * R1;
    }
}

double SphereBlock::weight(const Vec3& x) const
{
    double w = 1.0;
    for (const auto& c : spec_.x1) {
        const double ang = std::acos(std::clamp(x.dot(c), -1.0, 1.0));
        w *= Psi(2.0 * (ang - rotation_radius()) / (blend_radius() - rotation_radius()) - 1.0);
    }
    return w;
}

Vec3 SphereBlock::operator()(const Vec3& x) const
{
    for (size_t i = 0; i < spec_.x1.size(); ++i) {
        const double ang = std::acos(std::clamp(x.dot(spec_.x1[i]), -1.0, 1.0));
        if (ang < blend_radius()) {
            const double w = Psi(2.0 * (ang - rotation_radius()) / (blend_radius() - rotation_radius()) - 1.0);
            return (w * x + (1.0 - w) * (Q_[i] * x)).normalized();
        }
    }
    return x;
}

} // namespace cmcglue
