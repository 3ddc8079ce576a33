#include "cmcglue/jacobi.hpp"
#include "cmcglue/fit.hpp"
#include "cmcglue/quadrature.hpp"
#include "cmcglue/smoothstep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cmcglue {

namespace {

// Solves sub_i x_{i-1} + diag_i x_i + sup_i x_{i+1} = rhs_i with constant off-diagonals.
std::vector<double> thomas(double off, std::vector<double> diag, std::vector<double> rhs)
{
    const size_t n = diag.size();
    for (size_t i = 1; i < n; ++i) {
        if (std::abs(diag[i - 1]) < 1e-300)
            throw NumericalError("dirichlet_solve: singular mode system (eigenvalue at zero)");
        const double m = off / diag[i - 1];
        diag[i] -= m * off;
        rhs[i] -= m * rhs[i - 1];
    }
    if (n > 0 && std::abs(diag[n - 1]) < 1e-300)
        throw NumericalError("dirichlet_solve: singular mode system (eigenvalue at zero)");
    std::vector<double> x(n);
    for (size_t k = n; k-- > 0;)
        x[k] = (rhs[k] - (k + 1 < n ? off * x[k + 1] : 0.0)) / diag[k];
    return x;
}

// Number of eigenvalues below mu of A - mu B, A = tridiag(off, diag, off), B = diag(weight).
int sturm_count(const std::vector<double>& diag, double off, const std::vector<double>& weight, double mu)
{
    int neg = 0;
    double d = 1.0;
    const double tiny = std::numeric_limits<double>::min();
    for (size_t i = 0; i < diag.size(); ++i) {
        const double a = diag[i] - mu * weight[i];
        d = i == 0 ? a : a - off * off / d;
        if (d == 0.0)
            d = -tiny;
        if (d < 0.0)
            ++neg;
    }
    return neg;
}

// k-th smallest (0-based) eigenvalue by bisection on the Sturm count.
double kth_eigenvalue(const std::vector<double>& diag, double off, const std::vector<double>& weight, int k, double lo,
                      double hi)
{
    while (sturm_count(diag, off, weight, lo) > k)
        lo -= 2.0 * (std::abs(lo) + 1.0);
    while (sturm_count(diag, off, weight, hi) <= k)
        hi += 2.0 * (std::abs(hi) + 1.0);
    for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(std::abs(lo), std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(diag, off, weight, mid) > k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Inverse iteration for the eigenvector of A - mu B.
std::vector<double> eigenvector(const std::vector<double>& diag, double off, const std::vector<double>& weight, double mu)
{
    const size_t n = diag.size();
    std::vector<double> shifted(n), v(n, 1.0);
    const double nudge = 1e-10 * (std::abs(mu) + 1.0);
    for (size_t i = 0; i < n; ++i)
        shifted[i] = diag[i] - (mu + nudge) * weight[i];
    for (int it = 0; it < 4; ++it) {
        std::vector<double> rhs(n);
        for (size_t i = 0; i < n; ++i)
            rhs[i] = weight[i] * v[i];
        v = thomas(off, shifted, rhs);
        double nrm = 0.0;
        for (size_t i = 0; i < n; ++i)
            nrm += weight[i] * v[i] * v[i];
        nrm = std::sqrt(nrm);
        for (double& x : v)
            x /= nrm;
    }
    return v;
}

struct ModeGrid
{
    std::vector<double> diag; // interior rows of -(f'' - m^2 f) - q f
    double off = 0.0;
};

ModeGrid mode_grid(const TransitionProblem& p, int m)
{
    const int n = p.intervals();
    const double h = p.step();
    ModeGrid g;
    g.off = -1.0 / (h * h);
    g.diag.resize(n - 1);
    for (int i = 1; i < n; ++i)
        g.diag[i - 1] = 2.0 / (h * h) + m * m - p.q()[i];
    return g;
}

ModeSolution solve_once(const TransitionProblem& p, int m, double left, double right, const std::function<double(double)>& src)
{
    const int n = p.intervals();
    const double h = p.step();
    std::vector<double> diag(n - 1), rhs(n - 1);
    for (int i = 1; i < n; ++i) {
        diag[i - 1] = -2.0 + h * h * (p.q()[i] - m * m);
        rhs[i - 1] = src ? h * h * src(p.x_under(i)) : 0.0;
    }
    rhs.front() -= left;
    rhs.back() -= right;
    const auto inner = thomas(1.0, diag, rhs);
    ModeSolution s;
    s.mode = m;
    s.values.resize(n + 1);
    s.x_under.resize(n + 1);
    s.values[0] = left;
    s.values[n] = right;
    for (int i = 1; i < n; ++i)
        s.values[i] = inner[i - 1];
    for (int i = 0; i <= n; ++i)
        s.x_under[i] = p.x_under(i);
    for (int i = 1; i < n; ++i) {
        const double r = s.values[i - 1] + s.values[i + 1] + diag[i - 1] * s.values[i] - (src ? h * h * src(p.x_under(i)) : 0.0);
        s.residual = std::max(s.residual, std::abs(r));
    }
    return s;
}

std::vector<int> middle_half(const std::vector<double>& x, double length)
{
    std::vector<int> idx;
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] >= 0.25 * length && x[i] <= 0.75 * length)
            idx.push_back(static_cast<int>(i));
    return idx;
}

void check_mode(const TransitionProblem& p, int m)
{
    if (m < 0 || m > p.modes())
        throw ValidationError("jacobi: mode index outside 0..M");
}

} // namespace

TransitionProblem::TransitionProblem(double tau, double b, int intervals, bool potential, int modes, double x, double y)
    : tau_(tau), b_(b), x_(x), y_(y), modes_(modes), potential_(potential)
{
    if (!(tau > 0.0 && tau < 0.25))
        throw ValidationError("TransitionProblem: tau must lie in (0, 1/4)");
    if (modes < 1)
        throw ValidationError("TransitionProblem: mode cutoff must be positive");
    profile_ = std::make_shared<DelaunayProfile>(DelaunayProfile::solve(tau));
    length_ = 2.0 * profile_->quarter_period() - 2.0 * b - x - y;
    if (!(length_ > 0.0))
        throw ValidationError("TransitionProblem: region length 2P - 2b - x - y must be positive");
    const int minimum = static_cast<int>(std::ceil(64.0 * length_));
    n_ = intervals > 0 ? intervals : std::max(minimum, 1024);
    if (potential && n_ < minimum)
        throw ValidationError("TransitionProblem: grid must have at least 64 l intervals");
    q_.resize(n_ + 1);
    for (int i = 0; i <= n_; ++i)
        q_[i] = q_at(x_under(i));
}

TransitionProblem TransitionProblem::flat(double length, int intervals, int modes)
{
    if (!(length > 0.0))
        throw ValidationError("TransitionProblem: length must be positive");
    TransitionProblem p;
    p.length_ = length;
    p.modes_ = modes;
    p.n_ = intervals > 0 ? intervals : std::max(static_cast<int>(std::ceil(64.0 * length)), 1024);
    p.q_.assign(p.n_ + 1, 0.0);
    return p;
}

double TransitionProblem::q_at(double xu) const
{
    if (!potential_ || !profile_)
        return 0.0;
    return 4.0 * tau_ * std::cosh(2.0 * profile_->w(b_ + x_ + xu));
}

double TransitionProblem::q_sup() const { return *std::max_element(q_.begin(), q_.end()); }

TransitionProblem TransitionProblem::refined() const
{
    TransitionProblem p = *this;
    p.n_ = 2 * n_;
    p.q_.resize(p.n_ + 1);
    for (int i = 0; i <= p.n_; ++i)
        p.q_[i] = p.q_at(p.x_under(i));
    return p;
}

ModeSolution dirichlet_solve(const TransitionProblem& p, int mode, double left, double right,
                             const std::function<double(double)>& source, bool extrapolate)
{
    check_mode(p, mode);
    ModeSolution coarse = solve_once(p, mode, left, right, source);
    if (!extrapolate)
        return coarse;
    const ModeSolution fine = solve_once(p.refined(), mode, left, right, source);
    for (size_t i = 0; i < coarse.values.size(); ++i)
        coarse.values[i] = (4.0 * fine.values[2 * i] - coarse.values[i]) / 3.0;
    coarse.residual = fine.residual;
    return coarse;
}

EigenReport lowest_eigenvalue(const TransitionProblem& p)
{
    EigenReport r;
    const double l = p.length();
    r.flat_value = kPi * kPi / (l * l);
    const TransitionProblem fine = p.refined();
    r.lambda_min = std::numeric_limits<double>::infinity();
    for (int m = 0; m <= p.modes(); ++m) {
        auto lowest = [&](const TransitionProblem& q) {
            const ModeGrid g = mode_grid(q, m);
            const std::vector<double> ones(g.diag.size(), 1.0);
            const double lo = *std::min_element(g.diag.begin(), g.diag.end()) - 2.0 * std::abs(g.off);
            const double hi = *std::max_element(g.diag.begin(), g.diag.end()) + 2.0 * std::abs(g.off);
            return kth_eigenvalue(g.diag, g.off, ones, 0, lo, hi);
        };
        const double v = (4.0 * lowest(fine) - lowest(p)) / 3.0;
        r.mode_lowest.push_back(v);
        if (v < r.lambda_min) {
            r.lambda_min = v;
            r.mode = m;
        }
    }
    r.lambda_l2 = r.lambda_min * l * l;
    r.within_perturbation_bound = std::abs(r.lambda_min - r.flat_value) <= p.q_sup() + 1e-12;
    return r;
}

KernelReport kernel_solutions(const TransitionProblem& p)
{
    KernelReport k;
    const ModeSolution v1 = dirichlet_solve(p, 0, 1.0, 0.0);
    const ModeSolution v2 = dirichlet_solve(p, 1, 1.0, 0.0);
    const int nth = 16;
    std::vector<double> plus(nth), minus(nth, 0.0);
    for (int j = 0; j < nth; ++j)
        plus[j] = std::sin(2.0 * kPi * j / nth);
    const GridSolution v3 = solve_boundary_problem(p, plus, minus);

    const double l = p.length();
    k.x_under = v1.x_under;
    k.V1 = v1.values;
    k.V2 = v2.values;
    k.V3.resize(v3.nx);
    for (int i = 0; i < v3.nx; ++i) {
        double s = 0.0;
        for (int j = 0; j < nth; ++j)
            s += v3.at(i, j) * std::sin(2.0 * kPi * j / nth);
        k.V3[i] = 2.0 * s / nth;
    }
    for (double xu : k.x_under) {
        const double xo = l - xu;
        k.V1_flat.push_back(xo / l);
        k.V2_flat.push_back(std::sinh(xo) / std::sinh(l));
    }
    for (size_t i = 0; i < k.x_under.size(); ++i) {
        k.max_closed_form_error = std::max({k.max_closed_form_error, std::abs(k.V1[i] - k.V1_flat[i]),
                                            std::abs(k.V2[i] - k.V2_flat[i]), std::abs(k.V3[i] - k.V2_flat[i])});
    }

    const auto mid = middle_half(k.x_under, l);
    std::vector<double> xs, ys;
    double s22 = 0, s2v = 0, s3v = 0;
    for (int i : mid) {
        xs.push_back(k.x_under[i]);
        ys.push_back(k.V1[i]);
        s22 += k.V2_flat[i] * k.V2_flat[i];
        s2v += k.V2_flat[i] * k.V2[i];
        s3v += k.V2_flat[i] * k.V3[i];
    }
    const LinearFit f = linear_fit(xs, ys);
    k.A1_plus = f.intercept;
    k.A1_minus = f.intercept + f.slope * l;
    k.A2 = s2v / s22;
    k.A3 = s3v / s22;

    for (size_t i = 0; i < k.x_under.size(); ++i) {
        const double xu = k.x_under[i], xo = l - xu;
        const double cmp1 = k.A1_plus * xo / l + k.A1_minus * xu / l;
        k.item2 = std::max(k.item2, std::abs(k.V1[i] - cmp1) / (std::exp(-kGamma * xu) + std::exp(-kGamma * xo) / l));
        const double wt = std::exp(-(kGamma + 1.0) * xu) + std::exp(-l);
        k.item4 = std::max(k.item4, std::abs(k.V2[i] - k.A2 * k.V2_flat[i]) / wt);
        k.item5 = std::max(k.item5, std::abs(k.V3[i] - k.A3 * k.V2_flat[i]) / wt);
    }
    return k;
}

DecayReport decay_measure(const TransitionProblem& p, const std::vector<std::pair<int, double>>& cos_modes)
{
    if (cos_modes.empty())
        throw ValidationError("decay_measure: no boundary modes given");
    std::vector<ModeSolution> sols;
    for (const auto& [m, a] : cos_modes) {
        if (m < 2)
            throw ValidationError("decay_measure: boundary data must be orthogonal to modes 0 and 1");
        sols.push_back(dirichlet_solve(p, m, 1.0, 0.0));
    }
    DecayReport r;
    r.x_under = sols.front().x_under;
    const int nth = 256;
    for (size_t i = 0; i < r.x_under.size(); ++i) {
        double env = 0.0;
        for (int j = 0; j < nth; ++j) {
            const double th = 2.0 * kPi * j / nth;
            double v = 0.0;
            for (size_t k = 0; k < sols.size(); ++k)
                v += cos_modes[k].second * sols[k].values[i] * std::cos(cos_modes[k].first * th);
            env = std::max(env, std::abs(v));
        }
        r.envelope.push_back(env);
    }
    std::vector<double> xs, ys;
    for (int i : middle_half(r.x_under, p.length())) {
        if (r.envelope[i] <= 0.0)
            throw NumericalError("decay_measure: envelope vanished inside the fit window");
        xs.push_back(r.x_under[i]);
        ys.push_back(std::log(r.envelope[i]));
    }
    const LinearFit f = linear_fit(xs, ys);
    r.gamma_hat = -f.slope;
    r.r2 = f.r2;
    r.resolved = f.r2 >= 0.99;
    return r;
}

GridSolution solve_boundary_problem(const TransitionProblem& p, const std::vector<double>& plus_data,
                                    const std::vector<double>& minus_data)
{
    const int nth = static_cast<int>(plus_data.size());
    if (nth < 4 || minus_data.size() != plus_data.size())
        throw ValidationError("solve_boundary_problem: need matching samples on both circles");
    const int top = nth / 2;
    auto coeffs = [&](const std::vector<double>& f, int m, double& a, double& b) {
        a = b = 0.0;
        for (int j = 0; j < nth; ++j) {
            const double th = 2.0 * kPi * j / nth;
            a += f[j] * std::cos(m * th);
            b += f[j] * std::sin(m * th);
        }
        const double scale = (m == 0 || 2 * m == nth) ? 1.0 / nth : 2.0 / nth;
        a *= scale;
        b *= scale;
    };
    double amp = 0.0;
    for (double v : plus_data)
        amp = std::max(amp, std::abs(v));
    for (double v : minus_data)
        amp = std::max(amp, std::abs(v));

    GridSolution u;
    u.nx = p.intervals() + 1;
    u.nth = nth;
    u.values.assign(static_cast<size_t>(u.nx) * nth, 0.0);
    for (int m = 0; m <= top; ++m) {
        double ap, bp, am, bm;
        coeffs(plus_data, m, ap, bp);
        coeffs(minus_data, m, am, bm);
        const double size = std::max({std::abs(ap), std::abs(bp), std::abs(am), std::abs(bm)});
        if (size <= 1e-13 * std::max(amp, 1.0))
            continue;
        if (m > p.modes())
            throw ValidationError("solve_boundary_problem: boundary data contains modes above the cutoff");
        const ModeSolution c = dirichlet_solve(p, m, ap, am);
        const ModeSolution s = dirichlet_solve(p, m, bp, bm);
        for (int i = 0; i < u.nx; ++i)
            for (int j = 0; j < nth; ++j) {
                const double th = 2.0 * kPi * j / nth;
                u.values[static_cast<size_t>(i) * nth + j] += c.values[i] * std::cos(m * th) + s.values[i] * std::sin(m * th);
            }
    }
    return u;
}

double mode_leakage(const GridSolution& u, int mode)
{
    double worst = 0.0;
    for (int i = 0; i < u.nx; ++i) {
        for (int m = 0; m <= u.nth / 2; ++m) {
            if (m == mode)
                continue;
            double a = 0, b = 0;
            for (int j = 0; j < u.nth; ++j) {
                const double th = 2.0 * kPi * j / u.nth;
                a += u.at(i, j) * std::cos(m * th);
                b += u.at(i, j) * std::sin(m * th);
            }
            worst = std::max(worst, std::hypot(a, b) * 2.0 / u.nth);
        }
    }
    return worst;
}

double ApproxKernelResult::max_principal_angle() const
{
    return principal_angles.empty() ? 0.0 : *std::max_element(principal_angles.begin(), principal_angles.end());
}

ApproxKernelResult approx_kernel_standard(double tau, int n, double b, int intervals, int modes, double window, double eps)
{
    if (n < 1)
        throw ValidationError("approx_kernel_standard: standard region label must be positive");
    const DelaunayProfile prof = DelaunayProfile::solve(tau);
    const double P = prof.quarter_period();
    if (!(P > b))
        throw ValidationError("approx_kernel_standard: region too small for b (P_tau <= b)");
    const double t0 = (2.0 * n - 2.0) * P + b, t1 = (2.0 * n + 2.0) * P - b;
    const double len = t1 - t0;
    const int N = intervals > 0 ? intervals : std::max(static_cast<int>(std::ceil(64.0 * len)), 1024);
    const double h = len / N;

    std::vector<double> t(N - 1), q(N - 1), beta(N - 1), f1(N - 1), f2(N - 1);
    for (int i = 1; i < N; ++i) {
        const double ti = t0 + h * i;
        const ProfileState st = prof.state(ti);
        t[i - 1] = ti;
        q[i - 1] = 4.0 * tau * std::cosh(2.0 * st.w);
        beta[i - 1] = 0.5 * q[i - 1];
        f1[i - 1] = -st.wp / kPi;
        f2[i - 1] = 2.0 * std::sqrt(tau) * std::cosh(st.w) / kPi;
    }

    struct Pair
    {
        double lambda;
        int mode;
        std::vector<double> v;
    };
    std::vector<Pair> found;
    ApproxKernelResult res;
    res.unknowns = (N - 1) * (2 * modes + 1);
    for (int m = 0; m <= modes; ++m) {
        std::vector<double> diag(N - 1);
        for (int i = 0; i < N - 1; ++i)
            diag[i] = 2.0 / (h * h) + m * m - q[i];
        const double off = -1.0 / (h * h);
        // mu = -lambda, A u = mu B u.
        const int lo = sturm_count(diag, off, beta, -window);
        const int hi = sturm_count(diag, off, beta, window);
        const int mult = m == 0 ? 1 : 2;
        res.count_window += mult * (hi - lo);
        res.count_eps += mult * (sturm_count(diag, off, beta, eps) - sturm_count(diag, off, beta, -eps));
        for (int k = lo; k < hi; ++k) {
            const double mu = kth_eigenvalue(diag, off, beta, k, -window, window);
            const auto v = eigenvector(diag, off, beta, mu);
            for (int c = 0; c < mult; ++c)
                found.push_back({-mu, m, v});
        }
    }
    std::sort(found.begin(), found.end(), [](const Pair& a, const Pair& b) { return a.lambda < b.lambda; });
    for (const auto& f : found) {
        res.eigenvalues.push_back(f.lambda);
        res.eigen_modes.push_back(f.mode);
    }
    std::vector<const Pair*> near;
    for (const auto& f : found)
        near.push_back(&f);
    std::sort(near.begin(), near.end(), [](const Pair* a, const Pair* b) { return std::abs(a->lambda) < std::abs(b->lambda); });
    auto angle = [&](const Pair& pr) {
        if (pr.mode > 1)
            return kPi / 2;
        const std::vector<double>& f = pr.mode == 0 ? f1 : f2;
        double uf = 0, uu = 0, ff = 0;
        for (size_t i = 0; i < f.size(); ++i) {
            uf += beta[i] * pr.v[i] * f[i];
            uu += beta[i] * pr.v[i] * pr.v[i];
            ff += beta[i] * f[i] * f[i];
        }
        return std::acos(std::min(1.0, std::abs(uf) / std::sqrt(uu * ff)));
    };
    for (size_t i = 0; i < near.size() && i < 3; ++i) {
        res.kernel_eigenvalues.push_back(near[i]->lambda);
        res.principal_angles.push_back(angle(*near[i]));
    }
    std::sort(res.kernel_eigenvalues.begin(), res.kernel_eigenvalues.end());
    std::sort(res.principal_angles.begin(), res.principal_angles.end());
    return res;
}

SubstituteCoefficients substitute_kernel_coeffs_standard(double tau, int n, int t_nodes, int nth)
{
    if (n < 1)
        throw ValidationError("substitute_kernel_coeffs_standard: standard region label must be positive");
    const DelaunayProfile prof = DelaunayProfile::solve(tau);
    const double c = 2.0 * n * prof.quarter_period();
    const QuadratureRule rule = composite_gauss_legendre(8, std::max(1, t_nodes / 8), c - 1.0, c + 1.0);
    SubstituteCoefficients out;
    double G[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double W[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    for (size_t k = 0; k < rule.nodes.size(); ++k) {
        const double t = rule.nodes[k];
        const ProfileState st = prof.state(t);
        const double cut = psi(c - 1.0, c, t) * psi(c + 1.0, c, t);
        const double dh = 2.0 * tau * std::cosh(2.0 * st.w) * rule.weights[k] * 2.0 * kPi / nth;
        const double radial = 2.0 * std::sqrt(tau) * std::cosh(st.w) / kPi;
        for (int j = 0; j < nth; ++j) {
            const double th = 2.0 * kPi * j / nth;
            const double f[3] = {-st.wp / kPi, radial * std::cos(th), radial * std::sin(th)};
            for (int a = 0; a < 3; ++a)
                for (int bb = 0; bb < 3; ++bb) {
                    G[a][bb] += cut * f[a] * f[bb] * dh;
                    W[a][bb] += f[a] * f[bb] * dh;
                }
        }
    }
    (void)W;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(G[i][i]) < 1e-6)
            throw NumericalError("substitute_kernel_coeffs_standard: near-singular normalization");
        out.c[i] = 1.0 / G[i][i];
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            out.gram[i][j] = out.c[i] * G[i][j];
            if (i != j)
                out.max_off_diagonal = std::max(out.max_off_diagonal, std::abs(out.gram[i][j]));
        }
    return out;
}

} // namespace cmcglue
