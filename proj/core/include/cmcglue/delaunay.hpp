#pragma once

#include "cmcglue/types.hpp"

#include <memory>
#include <vector>

namespace cmcglue {

struct ProfileState
{
    double w;
    double wp;
    double k;
};

struct CurvatureData
{
    double normsq_A;
    double gauss_K;
    double metric_factor;
};

// Rotationally symmetric CMC (H = 1) profile with parameter tau.
// tau in (0, 1/4] gives unduloids, tau < 0 nodoids.
class DelaunayProfile
{
public:
    static DelaunayProfile solve(double tau, double tol = 1e-12);

    double tau() const { return tau_; }
    double w0() const { return w0_; }
    double quarter_period() const { return P_; }
    double period_excess() const { return p_; }
    bool is_nodoid() const { return tau_ < 0.0; }

    ProfileState state(double t) const;
    double w(double t) const { return state(t).w; }
    double wp(double t) const { return state(t).wp; }
    double k(double t) const { return state(t).k; }
    double r(double t) const;
    double kp(double t) const;

    // q = cosh for unduloids, sinh for nodoids.
    double q(double w) const;

    Vec3 immerse(double t, double theta) const;
    Vec3 normal(double t, double theta) const;
    CurvatureData curvature(double t) const;

    double r_max() const;
    double r_min() const;
    double r_max_closed_form() const;
    double r_min_closed_form() const;

    // (w')^2 + 4|tau| q(w)^2 - 1 with w' from a Richardson finite difference of the sampler.
    double energy_residual(double t) const;

private:
    struct Series;

    double tau_ = 0.25;
    double s_ = 0.25;
    double sigma_ = 1.0;
    double w0_ = 0.0;
    double U_ = 0.0;
    double P_ = 0.0;
    double p_ = 0.0;
    double k2P_ = 0.0;
    std::shared_ptr<const Series> series_;

    double g(double v) const;
    double invert_T(double t) const;
    void quarter(double a, double& w, double& wp, double& k) const;
};

Vec3 sphere_immerse(double t, double theta);
Vec3 sphere_normal(double t, double theta);

struct PeriodLimitRow
{
    double tau;
    double P;
    double p;
    double ratio_p;  // p / (-tau log tau)
    double ratio_dp; // (dp/dtau) / (-log tau)
};

std::vector<PeriodLimitRow> period_limit_report(const std::vector<double>& taus);

} // namespace cmcglue
