// Acceptance run: one PASS/FAIL line per criterion. Exit status is 0 once every criterion has been evaluated;
// --strict makes any FAIL a nonzero exit.
#include "cmcglue/assembly.hpp"
#include "cmcglue/blocks.hpp"
#include "cmcglue/delaunay.hpp"
#include "cmcglue/jacobi.hpp"
#include "cmcglue/mesh.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace cmcglue;

namespace {

struct Outcome
{
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome criterion1()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream os;
    bool ok = true;
    const DelaunayProfile cyl = DelaunayProfile::solve(0.25);
    double dev = 0.0;
    for (int i = 0; i <= 1000; ++i)
        dev = std::max(dev, std::abs(cyl.r(0.02 * i) - 0.5));
    ok = ok && dev < 1e-10;
    os << "cylinder max|r-1/2|=" << fmt("%.1e", dev);
    double closed = 0.0, energy = 0.0;
    for (double tau : {0.1, 0.01, 1e-3}) {
        const DelaunayProfile p = DelaunayProfile::solve(tau);
        closed = std::max({closed, std::abs(p.r_max() - p.r_max_closed_form()), std::abs(p.r_min() - p.r_min_closed_form())});
        const double span = 4.0 * p.quarter_period();
        for (int i = 0; i < 10000 / 3 + 1; ++i)
            energy = std::max(energy, std::abs(p.energy_residual(span * i / 3334.0)));
    }
    ok = ok && closed < 1e-8 && energy < 1e-9;
    const double dt = seconds_since(t0);
    ok = ok && dt < 1.0;
    os << " radii=" << fmt("%.1e", closed) << " energy=" << fmt("%.1e", energy) << " time=" << fmt("%.2fs", dt);
    return {ok, os.str()};
}

Outcome criterion2()
{
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = 0.0, worst_block = 0.0;
    for (double tau : {0.05, 1e-3}) {
        const DelaunayProfile p = DelaunayProfile::solve(tau);
        for (int i = 0; i < 200; ++i) {
            const double t = 4.0 * p.quarter_period() * uni(rng), th = 2.0 * kPi * uni(rng);
            worst = std::max(worst, std::abs(diff_geom(delaunay_jet(p, Jet::var_t(t), Jet::var_theta(th))).H - 1.0));
        }
        EdgeBlockSpec spec;
        spec.tau_domain = tau;
        spec.tau_target = tau * 1.01;
        spec.l = 2;
        spec.zeta_plus = Vec3(0.3, -0.2, 0.1) * tau;
        spec.zeta_minus = Vec3(-0.1, 0.2, 0.25) * tau;
        const DelaunayBlock b = DelaunayBlock::edge(spec);
        int taken = 0;
        while (taken < 200) {
            const double t = b.t_min() + (b.t_max() - b.t_min()) * uni(rng), th = 2.0 * kPi * uni(rng);
            if (b.band(t) != Band::Clean)
                continue;
            ++taken;
            worst_block = std::max(worst_block, std::abs(b.mean_curvature(t, th) - 1.0));
        }
    }
    return {worst < 1e-6 && worst_block < 1e-6,
            "profile max|H-1|=" + fmt("%.1e", worst) + " blocks outside bands=" + fmt("%.1e", worst_block)};
}

Outcome criterion3()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = period_limit_report({1e-2, 1e-4, 1e-6});
    const bool dec = rows[0].ratio_p > rows[1].ratio_p && rows[1].ratio_p > rows[2].ratio_p;
    const bool close = std::abs(rows[2].ratio_p - 1.0) < 0.2;
    const double ell_ratio = (2.0 * rows[2].P - 2.0 * kSpectralB) / (-std::log(1e-6));
    const bool ell_ok = std::abs(ell_ratio - 1.0) < 0.2;
    const double dt = seconds_since(t0);
    std::ostringstream os;
    os << "p/(-tau log tau)=" << fmt("%.4f", rows[0].ratio_p) << "," << fmt("%.4f", rows[1].ratio_p) << ","
       << fmt("%.4f", rows[2].ratio_p) << " (2P-2b)/(-log tau)=" << fmt("%.4f", ell_ratio) << " b=" << fmt("%.4f", kSpectralB)
       << " time=" << fmt("%.2fs", dt);
    return {dec && close && ell_ok && dt < 10.0, os.str()};
}

double sup_band(const DelaunayBlock& b, bool gluing)
{
    const double a = b.a();
    const HErrorField f = gluing ? h_error_field(b, a + 3.0, a + 5.0, 64, 32) : h_error_field(b, a, a + 2.0, 64, 32);
    return gluing ? f.sup_gluing : f.sup_dislocation;
}

Outcome criterion4()
{
    const auto t0 = std::chrono::steady_clock::now();
    auto gluing = [](double tau) {
        EdgeBlockSpec s;
        s.tau_domain = s.tau_target = tau;
        return sup_band(DelaunayBlock::edge(s), true);
    };
    auto dislocation = [](double zeta) {
        EdgeBlockSpec s;
        s.tau_domain = s.tau_target = 1e-6;
        s.zeta_plus = zeta * Vec3(1.0, 1.0, 1.0).normalized();
        return sup_band(DelaunayBlock::edge(s), false);
    };
    const double rg = gluing(1e-8) / gluing(5e-9);
    const double rd = dislocation(1e-5) / dislocation(5e-6);
    const double dt = seconds_since(t0);
    const bool ok = rg >= 1.3 && rg <= 2.7 && rd >= 1.3 && rd <= 2.7 && dt < 30.0;
    return {ok, "gluing ratio=" + fmt("%.4f", rg) + " dislocation ratio=" + fmt("%.4f", rd) + " time=" + fmt("%.2fs", dt)};
}

Outcome criterion5()
{
    std::ostringstream os;
    bool ok = true;
    for (const char* name : {"star", "triangle_genus1"}) {
        const Graph g = generate_example(name, std::string(name) == "star" ? 4 : 0);
        const auto [d, z] = random_parameters(g, 1e-3, 1.0, 1.0, 5u);
        const InitialSurface s = build_initial_surface(g, 1e-3, d, z);
        double coarse = 0.0, fine = 0.0;
        for (size_t v = 0; v < s.spheres.size(); ++v) {
            const FluxReport c = flux_balance_check(s, static_cast<int>(v), 32, 128);
            const FluxReport f = flux_balance_check(s, static_cast<int>(v), 64, 256);
            coarse = std::max(coarse, (c.quadrature + c.formula).norm() / c.formula.norm());
            fine = std::max(fine, (f.quadrature + f.formula).norm() / f.formula.norm());
        }
        ok = ok && fine < 5e-2 && fine < coarse;
        os << name << " |Q+F|/|F|=" << fmt("%.2e", coarse) << "->" << fmt("%.2e", fine) << " ";
    }
    return {ok, os.str()};
}

Outcome criterion6()
{
    std::ostringstream os;
    const TransitionProblem flat = TransitionProblem::flat(3.7);
    const double flat_err = std::abs(lowest_eigenvalue(flat).lambda_min - kPi * kPi / (3.7 * 3.7));
    bool ok = flat_err < 1e-8;
    os << "flat err=" << fmt("%.1e", flat_err);
    for (double tau : {1e-3, 1e-4, 1e-5}) {
        const TransitionProblem p(tau);
        const double v = lowest_eigenvalue(p).lambda_l2;
        const double v2 = lowest_eigenvalue(p.refined()).lambda_l2;
        const bool stable = std::abs(v2 - v) <= 1e-3 * std::abs(v);
        ok = ok && v > 5.0 && stable;
        os << " lambda*l^2(" << fmt("%g", tau) << ")=" << fmt("%.5f", v);
    }
    return {ok, os.str()};
}

Outcome criterion7()
{
    std::ostringstream os;
    const KernelReport flat = kernel_solutions(TransitionProblem::flat(4.2));
    bool ok = flat.max_closed_form_error < 1e-8;
    os << "closed forms err=" << fmt("%.1e", flat.max_closed_form_error);
    double prev[3] = {1e300, 1e300, 1e300};
    bool decreasing = true;
    for (double tau : {1e-3, 1e-4, 1e-5}) {
        const KernelReport k = kernel_solutions(TransitionProblem(tau));
        const double e[3] = {std::abs(k.A1_plus - 1.0), std::abs(k.A2 - 1.0), std::abs(k.A3 - 1.0)};
        for (int i = 0; i < 3; ++i) {
            decreasing = decreasing && e[i] < prev[i];
            prev[i] = e[i];
        }
        if (tau == 1e-4)
            ok = ok && e[0] < 0.1 && e[1] < 0.1 && e[2] < 0.1;
        os << " |A-1|(" << fmt("%g", tau) << ")=" << fmt("%.5f", e[0]) << "," << fmt("%.5f", e[1]) << "," << fmt("%.5f", e[2]);
    }
    os << (decreasing ? " decreasing" : " not decreasing as tau decreases");
    return {ok && decreasing, os.str()};
}

Outcome criterion8()
{
    const DecayReport d = decay_measure(TransitionProblem(1e-4), {{2, 1.0}, {3, 0.5}, {4, 0.25}});
    return {d.gamma_hat >= 1.5 && d.r2 >= 0.99, "gamma_hat=" + fmt("%.4f", d.gamma_hat) + " R2=" + fmt("%.6f", d.r2)};
}

Outcome criterion9()
{
    std::ostringstream os;
    bool ok = true;
    auto judge = [&](const std::string& name, const ApproxKernelResult& r, const ApproxKernelResult& r2, double dt) {
        const bool good = r.count_eps == 3 && r.count_window == 3 && r2.count_eps == r.count_eps &&
                          r2.count_window == r.count_window && r.max_principal_angle() < 0.1 && dt < 120.0;
        ok = ok && good;
        os << name << ": in[-0.1,0.1]=" << r.count_eps << " in[-0.5,0.5]=" << r.count_window << " doubled=" << r2.count_eps << "/"
           << r2.count_window << " angle=" << fmt("%.3f", r.max_principal_angle()) << " lambda=";
        for (size_t i = 0; i < r.eigenvalues.size(); ++i)
            os << (i ? "," : "") << fmt("%.4f", r.eigenvalues[i]);
        os << " time=" << fmt("%.1fs", dt) << "; ";
    };
    const double tau = 1e-4;
    {
        const auto t0 = std::chrono::steady_clock::now();
        const ApproxKernelResult r = approx_kernel_standard(tau, 1);
        const double len = 4.0 * DelaunayProfile::solve(tau).quarter_period() - 2.0 * kSpectralB;
        const int n = std::max(1024, static_cast<int>(std::ceil(64.0 * len)));
        const ApproxKernelResult r2 = approx_kernel_standard(tau, 1, kSpectralB, 2 * n);
        judge("S~[p,e,1]", r, r2, seconds_since(t0));
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        const InitialSurface s = build_initial_surface(generate_example("star", 4), tau, {}, {});
        const ApproxKernelResult r = approx_kernel_central(s, 0, kSpectralB, 10);
        const ApproxKernelResult r2 = approx_kernel_central(s, 0, kSpectralB, 20);
        judge("S~[p]", r, r2, seconds_since(t0));
    }
    return {ok, os.str()};
}

Outcome criterion10()
{
    std::ostringstream os;
    auto sup = [](double zeta) {
        EdgeBlockSpec s;
        s.tau_domain = s.tau_target = 1e-6;
        s.zeta_plus = Vec3(zeta, 0.0, 0.0);
        const DelaunayBlock b = DelaunayBlock::edge(s);
        const GraphFunction g = graph_over_dislocated_sphere(b, 16, 16, b.a() + 2.0, b.a() + 3.0);
        double m = 0.0;
        for (int i = 0; i < g.nt; ++i)
            for (int j = 0; j < g.nth; ++j)
                m = std::max(m, std::abs(g.f[static_cast<size_t>(i) * g.nth + j] + s.zeta_plus.dot(sphere_immerse(g.t[i], g.theta[j]))));
        return m;
    };
    EdgeBlockSpec s0;
    s0.tau_domain = s0.tau_target = 1e-6;
    const DelaunayBlock b0 = DelaunayBlock::edge(s0);
    const GraphFunction g0 = graph_over_dislocated_sphere(b0, 16, 16);
    double zero = 0.0;
    for (double f : g0.f)
        zero = std::max(zero, std::abs(f));
    const double v1 = sup(0.04), v2 = sup(0.02), v3 = sup(0.01);
    const double r1 = v1 / v2, r2 = v2 / v3;
    const bool ok = zero < 1e-12 && r1 >= 2.0 && r1 <= 8.0 && r2 >= 2.0 && r2 <= 8.0;
    os << "zeta=0 sup|f|=" << fmt("%.1e", zero) << " ratios=" << fmt("%.3f", r1) << "," << fmt("%.3f", r2);
    return {ok, os.str()};
}

Outcome criterion11()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream os;
    bool ok = true;
    const std::pair<const char*, int> graphs[] = {{"star", 4}, {"triangle_genus1", 0}, {"tetra_chain", 4}};
    for (const auto& [name, param] : graphs) {
        const Graph g = generate_example(name, param);
        for (int mode = 0; mode < 2; ++mode) {
            std::map<std::string, Vec3> d;
            ZetaAssignment z;
            if (mode == 1)
                std::tie(d, z) = random_parameters(g, 1e-3, 1.0, 1.0, 11u);
            const InitialSurface s = build_initial_surface(g, 1e-3, d, z);
            const TriangleMesh m = tessellate(s, 8);
            const IntersectionReport ir = self_intersection_check(m);
            const double chart = s.chart_residual();
            ok = ok && ir.empty() && chart < 1e-9;
            os << name << (mode ? "(caps)" : "(0)") << " pairs=" << ir.count << " chart=" << fmt("%.1e", chart) << " ";
        }
    }
    const double dt = seconds_since(t0);
    ok = ok && dt < 300.0;
    os << "time=" << fmt("%.1fs", dt);
    return {ok, os.str()};
}

Outcome criterion12()
{
    std::ostringstream os;
    bool ok = true;
    const std::pair<const char*, int> fams[] = {{"star", 4},           {"star", 6},   {"triangle_genus1", 0}, {"double_triangle_genus2", 0},
                                                {"tetra_chain", 4},    {"tetra_chain", 6}, {"dodecahedral_22ray", 0}};
    int good = 0;
    for (const auto& [name, param] : fams) {
        const Graph g = generate_example(name, param);
        const bool pass = is_balanced(g, 1e-9) && check_pre_embedded(g, 0.1).pass();
        good += pass;
        ok = ok && pass;
    }
    os << "generators " << good << "/" << std::size(fams);
    const PreEmbedReport angle = check_pre_embedded(broken_angle_fixture(), 0.1);
    const PreEmbedReport parallel = check_pre_embedded(broken_parallel_rays_fixture(), 0.1);
    const bool angle_ok = !angle.pass() && !angle.angle_ok && angle.distance_ok && angle.ray_ok && !angle.violations.empty() &&
                          angle.violations.front().condition == 1;
    const bool par_ok = !parallel.pass() && !parallel.ray_ok && parallel.angle_ok && !parallel.violations.empty() &&
                        parallel.violations.front().condition == 3;
    ok = ok && angle_ok && par_ok;
    os << " angle fixture witness=" << (angle.violations.empty() ? "none" : angle.violations.front().first + "/" + angle.violations.front().second)
       << " parallel fixture witness="
       << (parallel.violations.empty() ? "none" : parallel.violations.front().first + "/" + parallel.violations.front().second);
    return {ok, os.str()};
}

} // namespace

int main(int argc, char** argv)
{
    bool strict = false;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0)
            strict = true;
        else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
            only = std::atoi(argv[++i]);
    }
    const std::function<Outcome()> all[] = {criterion1, criterion2, criterion3, criterion4,  criterion5,  criterion6,
                                            criterion7, criterion8, criterion9, criterion10, criterion11, criterion12};
    int passed = 0, run = 0;
    for (int i = 0; i < 12; ++i) {
        if (only && only != i + 1)
            continue;
        Outcome o;
        try {
            o = all[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        ++run;
        passed += o.pass;
        std::printf("criterion %2d: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", passed, run);
    return strict && passed != run ? 1 : 0;
}
