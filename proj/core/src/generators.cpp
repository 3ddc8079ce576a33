#include "cmcglue/graph.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

namespace cmcglue {

namespace {

std::string idx(const char* prefix, size_t i) { return prefix + std::to_string(i); }

// Adds one ray per vertex carrying whatever the edges leave unbalanced.
std::vector<Ray> balancing_rays(const std::vector<Vertex>& verts, const std::vector<Edge>& edges)
{
    Graph g(verts, edges, {});
    std::vector<Ray> rays;
    for (size_t p = 0; p < verts.size(); ++p) {
        const Vec3 W = -unbalancing(g, static_cast<int>(p));
        if (W.norm() < 1e-12)
            continue;
        Ray r;
        r.id = idx("r", rays.size());
        r.vertex = verts[p].id;
        r.direction = W.normalized();
        r.tau_hat = W.norm();
        rays.push_back(r);
    }
    return rays;
}

Edge make_edge(size_t i, const std::string& a, const std::string& b, int l, double tau)
{
    Edge e;
    e.id = idx("e", i);
    e.p_plus = a;
    e.p_minus = b;
    e.l = l;
    e.tau_hat = tau;
    return e;
}

// Equal-weight repulsion on the sphere; deterministic Fibonacci start.
std::vector<Vec3> spread_points(int k)
{
    std::vector<Vec3> x(k);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < k; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / k;
        const double r = std::sqrt(1.0 - z * z);
        x[i] = Vec3(r * std::cos(golden * i), r * std::sin(golden * i), z);
    }
    for (int it = 0; it < 20000; ++it) {
        const double power = it < 5000 ? 6.0 : 40.0;
        std::vector<Vec3> f(k, Vec3::Zero());
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (i != j) {
                    const Vec3 d = x[i] - x[j];
                    f[i] += d / std::pow(d.norm(), power + 2);
                }
        double step = 0.0;
        for (int i = 0; i < k; ++i) {
            Vec3 t = f[i] - f[i].dot(x[i]) * x[i];
            const double n = t.norm();
            const double h = std::min(0.01, 0.01 * n) / std::max(n, 1e-300);
            x[i] = (x[i] + h * t).normalized();
            step = std::max(step, h * n);
        }
        if (step < 1e-15)
            break;
    }
    return x;
}

} // namespace

Graph star(const std::vector<Vec3>& dirs, const std::vector<double>& weights)
{
    if (dirs.size() < 2)
        throw ValidationError("star: need at least two rays");
    if (weights.size() != dirs.size() && weights.size() + 1 != dirs.size())
        throw ValidationError("star: weights must match rays, or omit the last one to have it solved");
    std::vector<Vertex> verts{{"p0", Vec3::Zero()}};
    std::vector<Ray> rays;
    Vec3 sum = Vec3::Zero();
    for (size_t i = 0; i < dirs.size(); ++i) {
        if (dirs[i].norm() == 0.0)
            throw ValidationError("star: zero direction");
        Ray r;
        r.id = idx("r", i);
        r.vertex = "p0";
        r.direction = dirs[i].normalized();
        if (i < weights.size()) {
            r.tau_hat = weights[i];
            sum += r.tau_hat * r.direction;
        }
        rays.push_back(r);
    }
    if (weights.size() + 1 == dirs.size()) {
        Ray& last = rays.back();
        const double c = -sum.dot(last.direction);
        if ((sum + c * last.direction).norm() > 1e-9 * std::max(1.0, sum.norm()) || c <= 0.0)
            throw ValidationError("star: the last ray cannot balance the others");
        last.tau_hat = c;
    } else if (sum.norm() > 1e-9) {
        throw ValidationError("star: weights do not balance");
    }
    return Graph(std::move(verts), {}, std::move(rays), "star");
}

Graph star_tetrahedral()
{
    const double s = 1.0 / std::sqrt(3.0);
    return star({Vec3(s, s, s), Vec3(s, -s, -s), Vec3(-s, s, -s), Vec3(-s, -s, s)}, {1.0, 1.0, 1.0, 1.0});
}

Graph star_symmetric(int k)
{
    if (k < 3 || k > 12)
        throw ValidationError("star_symmetric: ray count must be in 3..12");
    if (k == 4)
        return star_tetrahedral();
    auto x = spread_points(k);
    Eigen::MatrixXd U(3, k);
    for (int i = 0; i < k; ++i)
        U.col(i) = x[i];
    // Minimum-norm correction of unit weights onto the balanced subspace.
    Eigen::VectorXd w = Eigen::VectorXd::Ones(k);
    const Eigen::Vector3d r = U * w;
    w -= U.transpose() * (U * U.transpose()).ldlt().solve(r);
    if (w.minCoeff() <= 0.0)
        throw NumericalError("star_symmetric: balancing produced a non-positive weight");
    Graph g = star(x, std::vector<double>(w.data(), w.data() + k));
    return g;
}

Graph triangle_genus1(int l, const std::vector<double>& tau_hat)
{
    if (l < 1 || tau_hat.size() != 3)
        throw ValidationError("triangle_genus1: need l >= 1 and three weights");
    for (double t : tau_hat)
        if (t <= 0.0)
            throw ValidationError("triangle_genus1: weights must be positive");
    const double L = 2.0 * l;
    std::vector<Vertex> v{{"p0", Vec3(0, 0, 0)}, {"p1", Vec3(L, 0, 0)}, {"p2", Vec3(L / 2, L * std::sqrt(3.0) / 2, 0)}};
    std::vector<Edge> e{make_edge(0, "p0", "p1", l, tau_hat[0]), make_edge(1, "p1", "p2", l, tau_hat[1]),
                        make_edge(2, "p2", "p0", l, tau_hat[2])};
    auto rays = balancing_rays(v, e);
    return Graph(std::move(v), std::move(e), std::move(rays), "triangle_genus1");
}

Graph double_triangle_genus2(int l, const std::vector<double>& tau_hat, double dihedral)
{
    if (l < 1 || tau_hat.size() != 5)
        throw ValidationError("double_triangle_genus2: need l >= 1 and five weights");
    for (double t : tau_hat)
        if (t <= 0.0)
            throw ValidationError("double_triangle_genus2: weights must be positive");
    if (!(dihedral > 0.0 && dihedral < 2.0 * kPi))
        throw ValidationError("double_triangle_genus2: dihedral angle must be in (0, 2pi)");
    const double L = 2.0 * l;
    const double h = L * std::sqrt(3.0) / 2;
    std::vector<Vertex> v{{"p0", Vec3(-L / 2, 0, 0)},
                          {"p1", Vec3(L / 2, 0, 0)},
                          {"p2", Vec3(0, h, 0)},
                          {"p3", Vec3(0, h * std::cos(dihedral), h * std::sin(dihedral))}};
    std::vector<Edge> e{make_edge(0, "p0", "p1", l, tau_hat[0]), make_edge(1, "p1", "p2", l, tau_hat[1]),
                        make_edge(2, "p2", "p0", l, tau_hat[2]), make_edge(3, "p1", "p3", l, tau_hat[3]),
                        make_edge(4, "p3", "p0", l, tau_hat[4])};
    auto rays = balancing_rays(v, e);
    return Graph(std::move(v), std::move(e), std::move(rays), "double_triangle_genus2");
}

Graph tetra_chain(int nv, int l)
{
    if (nv < 4)
        throw ValidationError("tetra_chain: need at least 4 vertices");
    if (l < 0)
        throw ValidationError("tetra_chain: l must be non-negative");
    // Unit-edge Boerdijk-Coxeter chain: each new vertex mirrors p[k-4] across the last face.
    std::vector<Vec3> P{Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
    for (auto& p : P)
        p /= std::sqrt(8.0);
    for (int k = 4; k < nv; ++k) {
        const Vec3 &a = P[k - 3], &b = P[k - 2], &c = P[k - 1];
        const Vec3 n = (b - a).cross(c - a).normalized();
        P.push_back(P[k - 4] - 2.0 * (P[k - 4] - a).dot(n) * n);
    }
    auto build = [&](int ll) {
        std::vector<Vertex> v;
        for (int i = 0; i < nv; ++i)
            v.push_back({idx("p", i), 2.0 * ll * P[i]});
        std::vector<Edge> e;
        for (int i = 0; i < nv; ++i)
            for (int j = i + 1; j < std::min(i + 4, nv); ++j)
                e.push_back(make_edge(e.size(), idx("p", i), idx("p", j), ll, 1.0));
        auto rays = balancing_rays(v, e);
        return Graph(std::move(v), std::move(e), std::move(rays), "tetra_chain");
    };
    if (l > 0)
        return build(l);
    for (int ll = 1; ll <= 64; ++ll) {
        Graph g = build(ll);
        if (check_pre_embedded(g, kFlexibilityRadius).pass())
            return g;
    }
    throw NumericalError("tetra_chain: no pre-embedded edge length found");
}

Graph dodecahedral_22ray(int l, double twist)
{
    if (l < 0)
        throw ValidationError("dodecahedral_22ray: l must be non-negative");
    // Face normals of a dodecahedron with a five-fold axis along e1.
    std::vector<Vec3> n{Vec3::UnitX(), -Vec3::UnitX()};
    const double c = 1.0 / std::sqrt(5.0), s = 2.0 / std::sqrt(5.0);
    for (int i = 0; i < 5; ++i) {
        const double a = 2.0 * kPi * i / 5.0;
        n.emplace_back(c, s * std::cos(a), s * std::sin(a));
        n.emplace_back(-c, s * std::cos(a + kPi / 5.0), s * std::sin(a + kPi / 5.0));
    }
    const Mat3 R = Eigen::AngleAxisd(twist, Vec3::UnitX()).toRotationMatrix();
    auto build = [&](int ll) {
        std::vector<Vertex> v{{"p0", Vec3::Zero()}, {"p1", Vec3(2.0 * ll, 0, 0)}};
        std::vector<Edge> e{make_edge(0, "p0", "p1", ll, 1.0)};
        std::vector<Ray> rays;
        for (size_t i = 1; i < n.size(); ++i) {
            Ray r;
            r.id = idx("r", rays.size());
            r.vertex = "p0";
            r.direction = n[i];
            rays.push_back(r);
        }
        for (size_t i = 1; i < n.size(); ++i) {
            Ray r;
            r.id = idx("r", rays.size());
            r.vertex = "p1";
            r.direction = (R * n[i == 1 ? 0 : i]).normalized();
            rays.push_back(r);
        }
        return Graph(std::move(v), std::move(e), std::move(rays), "dodecahedral_22ray");
    };
    if (l > 0)
        return build(l);
    for (int ll = 1; ll <= 64; ++ll) {
        Graph g = build(ll);
        if (check_pre_embedded(g, kFlexibilityRadius).pass())
            return g;
    }
    throw NumericalError("dodecahedral_22ray: no pre-embedded edge length found");
}

Graph broken_angle_fixture(double angle)
{
    Graph g = star({Vec3::UnitX(), Vec3(std::cos(angle), std::sin(angle), 0.0), -Vec3(1 + std::cos(angle), std::sin(angle), 0)},
                   {1.0, 1.0});
    return Graph(g.vertices(), g.edges(), g.rays(), "broken_angle");
}

Graph broken_parallel_rays_fixture(int l)
{
    if (l < 1)
        throw ValidationError("broken_parallel_rays_fixture: need l >= 1");
    std::vector<Vertex> v{{"p0", Vec3::Zero()}, {"p1", Vec3(2.0 * l, 0, 0)}};
    std::vector<Edge> e{make_edge(0, "p0", "p1", l, 1.0)};
    const double r2 = std::sqrt(2.0);
    std::vector<Ray> rays(4);
    rays[0] = {"r0", "p0", Vec3::UnitZ(), 1.0, Mat3::Identity()};
    rays[1] = {"r1", "p0", Vec3(-1, 0, -1) / r2, r2, Mat3::Identity()};
    rays[2] = {"r2", "p1", Vec3::UnitZ(), 1.0, Mat3::Identity()};
    rays[3] = {"r3", "p1", Vec3(1, 0, -1) / r2, r2, Mat3::Identity()};
    return Graph(std::move(v), std::move(e), std::move(rays), "broken_parallel_rays");
}

Graph generate_example(const std::string& family, int param)
{
    if (family == "star")
        return star_symmetric(param == 0 ? 4 : param);
    if (family == "triangle_genus1")
        return triangle_genus1(param == 0 ? 2 : param);
    if (family == "double_triangle_genus2")
        return double_triangle_genus2(param == 0 ? 2 : param);
    if (family == "tetra_chain")
        return tetra_chain(param == 0 ? 4 : param);
    if (family == "dodecahedral_22ray")
        return dodecahedral_22ray(param);
    if (family == "broken_angle")
        return broken_angle_fixture();
    if (family == "broken_parallel_rays")
        return broken_parallel_rays_fixture();
    throw ValidationError("unknown example family '" + family + "'");
}

} // namespace cmcglue
