#include "cmcglue/delaunay.hpp"

#include "chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cmcglue {

using detail::Chebyshev;

struct DelaunayProfile::Series
{
    Chebyshev T;  // t(u) on [0, U]
    Chebyshev Ka; // k(t(u)) on [0, U]
    Chebyshev Kb; // integral of s (e^{-2w} + sigma) dt
};

namespace {

double x_over_sinh(double x)
{
    if (std::abs(x) < 1e-4)
        return 1.0 - x * x / 6.0;
    return x / std::sinh(x);
}

double log_sinh(double y)
{
    if (y > 20.0)
        return y - std::log(2.0) + std::log1p(-std::exp(-2.0 * y));
    return std::log(std::sinh(y));
}

} // namespace

double DelaunayProfile::g(double v) const
{
    const double v2 = v * v;
    return std::sqrt(x_over_sinh(v2)) * std::exp(-0.5 * log_sinh(2.0 * w0_ - v2)) / std::sqrt(s_);
}

DelaunayProfile DelaunayProfile::solve(double tau, double tol)
{
    if (!(tau < 0.0 || (tau > 0.0 && tau <= 0.25)) || !std::isfinite(tau)) {
        std::ostringstream os;
        os << "tau = " << tau << " outside (-inf,0) U (0,1/4]";
        throw ValidationError(os.str());
    }
    if (!(tol >= 1e-13 && tol <= 1e-6))
        throw ValidationError("solve_profile: tol must lie in [1e-13, 1e-6]");
    if (std::abs(tau) < 1e-280)
        throw ValidationError("solve_profile: |tau| too small to represent");

    DelaunayProfile prof;
    prof.tau_ = tau;
    prof.s_ = std::abs(tau);
    prof.sigma_ = tau > 0.0 ? 1.0 : -1.0;

    if (tau == 0.25) {
        prof.w0_ = 0.0;
        prof.U_ = 0.0;
        prof.P_ = M_PI / 2.0;
        prof.k2P_ = M_PI / 2.0;
        prof.p_ = prof.k2P_ - 1.0;
        return prof;
    }

    const double x = 1.0 / (2.0 * std::sqrt(prof.s_));
    prof.w0_ = tau > 0.0 ? std::acosh(x) : std::asinh(x);
    prof.U_ = std::sqrt(prof.w0_);

    const double s = prof.s_, sigma = prof.sigma_, w0 = prof.w0_;
    const double cheb_tol = std::max(2e-15, 1e-3 * tol);
    const int max_n = 2048;
    bool ok1 = false, ok2 = false, ok3 = false;
    auto gfun = [&prof](double v) { return prof.g(v); };
    auto ka = [&](double v) {
        const double w = w0 - v * v;
        return s * (std::exp(2.0 * w) + sigma) * prof.g(v);
    };
    auto kb = [&](double v) {
        const double w = w0 - v * v;
        return s * (std::exp(-2.0 * w) + sigma) * prof.g(v);
    };
    auto series = std::make_shared<Series>();
    series->T = Chebyshev::fit(gfun, 0.0, prof.U_, cheb_tol, max_n, &ok1).integral();
    series->Ka = Chebyshev::fit(ka, 0.0, prof.U_, cheb_tol, max_n, &ok2).integral();
    series->Kb = Chebyshev::fit(kb, 0.0, prof.U_, cheb_tol, max_n, &ok3).integral();
    if (!(ok1 && ok2 && ok3))
        throw NumericalError("solve_profile: spectral quadrature did not converge within the iteration budget");

    prof.P_ = series->T(prof.U_);
    prof.k2P_ = series->Ka(prof.U_) + series->Kb(prof.U_);
    prof.p_ = prof.k2P_ - 1.0;
    prof.series_ = std::move(series);

    double worst = 0.0;
    for (int i = 0; i <= 64; ++i) {
        const double t = prof.P_ * i / 64.0;
        worst = std::max(worst, std::abs(prof.energy_residual(t)));
    }
    if (!(worst <= std::max(tol, 1e-10)))
        throw NumericalError("solve_profile: ODE residual above tolerance");
    return prof;
}

double DelaunayProfile::invert_T(double t) const
{
    const auto& T = series_->T;
    double lo = 0.0, hi = U_;
    double u = U_ * std::clamp(t / P_, 0.0, 1.0);
    for (int it = 0; it < 100; ++it) {
        const double f = T(u) - t;
        if (f > 0.0)
            hi = u;
        else
            lo = u;
        double un = u - f / g(u);
        if (!(un > lo && un < hi))
            un = 0.5 * (lo + hi);
        const double du = std::abs(un - u);
        u = un;
        if (du <= 4e-16 * std::max(1.0, U_) || hi - lo <= 4e-16 * std::max(1.0, U_))
            break;
    }
    return u;
}

void DelaunayProfile::quarter(double a, double& w, double& wp, double& k) const
{
    const double u = invert_T(a);
    w = w0_ - u * u;
    wp = u == 0.0 ? 0.0 : -2.0 * u / g(u);
    k = series_->Ka(u);
}

ProfileState DelaunayProfile::state(double t) const
{
    if (tau_ == 0.25)
        return {0.0, 0.0, 0.5 * t};
    const double period = 4.0 * P_;
    const double n = std::round(t / period);
    const double tr = t - n * period;
    const double sgn = tr < 0.0 ? -1.0 : 1.0;
    const double a = std::abs(tr);
    double w, wp, k;
    if (a <= P_) {
        quarter(a, w, wp, k);
    } else {
        const double b = std::max(0.0, 2.0 * P_ - a);
        const double u = invert_T(b);
        w = -(w0_ - u * u);
        wp = u == 0.0 ? 0.0 : -2.0 * u / g(u);
        k = k2P_ - series_->Kb(u);
    }
    return {w, sgn * wp, sgn * k + 2.0 * n * k2P_};
}

double DelaunayProfile::q(double w) const { return tau_ > 0.0 ? std::cosh(w) : std::sinh(w); }

double DelaunayProfile::r(double t) const { return std::sqrt(s_) * std::exp(w(t)); }

double DelaunayProfile::kp(double t) const { return s_ * (std::exp(2.0 * w(t)) + sigma_); }

Vec3 DelaunayProfile::immerse(double t, double theta) const
{
    const auto st = state(t);
    const double rr = std::sqrt(s_) * std::exp(st.w);
    return {st.k, rr * std::cos(theta), rr * std::sin(theta)};
}

Vec3 DelaunayProfile::normal(double t, double theta) const
{
    const auto st = state(t);
    const double c = 2.0 * std::sqrt(s_) * q(st.w);
    return {-st.wp, c * std::cos(theta), c * std::sin(theta)};
}

CurvatureData DelaunayProfile::curvature(double t) const
{
    const double ww = w(t);
    const double e4 = std::exp(-4.0 * ww);
    return {2.0 + 2.0 * e4, 1.0 - e4, s_ * std::exp(2.0 * ww)};
}

double DelaunayProfile::r_max() const { return std::sqrt(s_) * std::exp(w0_); }

double DelaunayProfile::r_min() const { return std::sqrt(s_) * std::exp(-w0_); }

double DelaunayProfile::r_max_closed_form() const
{
    if (tau_ > 0.0)
        return 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * tau_));
    return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * s_));
}

double DelaunayProfile::r_min_closed_form() const
{
    if (tau_ > 0.0)
        return 2.0 * tau_ / (1.0 + std::sqrt(1.0 - 4.0 * tau_));
    return 2.0 * s_ / (1.0 + std::sqrt(1.0 + 4.0 * s_));
}

double DelaunayProfile::energy_residual(double t) const
{
    const double h = 1e-3;
    auto D = [this, t](double hh) { return (w(t + hh) - w(t - hh)) / (2.0 * hh); };
    const double wp = (4.0 * D(0.5 * h) - D(h)) / 3.0;
    const double qq = q(w(t));
    return wp * wp + 4.0 * s_ * qq * qq - 1.0;
}

Vec3 sphere_immerse(double t, double theta)
{
    const double sech = 1.0 / std::cosh(t);
    return {std::tanh(t), sech * std::cos(theta), sech * std::sin(theta)};
}

Vec3 sphere_normal(double t, double theta) { return sphere_immerse(t, theta); }

std::vector<PeriodLimitRow> period_limit_report(const std::vector<double>& taus)
{
    std::vector<PeriodLimitRow> rows;
    for (double tau : taus) {
        if (!(tau > 0.0 && tau < 0.25))
            throw ValidationError("period_limit_report: tau must lie in (0, 1/4)");
        const auto prof = DelaunayProfile::solve(tau);
        const double h = 1e-3;
        const double pp = DelaunayProfile::solve(tau * (1.0 + h)).period_excess();
        const double pm = DelaunayProfile::solve(tau * (1.0 - h)).period_excess();
        const double dp = (pp - pm) / (2.0 * tau * h);
        const double L = -std::log(tau);
        rows.push_back({tau, prof.quarter_period(), prof.period_excess(), prof.period_excess() / (tau * L), dp / L});
    }
    return rows;
}

} // namespace cmcglue
