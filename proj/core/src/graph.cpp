#include "cmcglue/graph.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cmcglue {

namespace {

bool is_identity(const Mat3& m) { return (m - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0; }

void check_frame(const Mat3& f, const std::string& id)
{
    if ((f.transpose() * f - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 || std::abs(f.determinant() - 1.0) > 1e-9)
        throw ValidationError("frame of '" + id + "' is not orthonormal with determinant +1");
}

} // namespace

Graph::Graph(std::vector<Vertex> vertices, std::vector<Edge> edges, std::vector<Ray> rays, std::string family)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), rays_(std::move(rays)), family_(std::move(family))
{
    for (size_t i = 0; i < vertices_.size(); ++i)
        if (!vidx_.emplace(vertices_[i].id, static_cast<int>(i)).second)
            throw ValidationError("duplicate vertex id '" + vertices_[i].id + "'");
    for (size_t i = 0; i < edges_.size(); ++i) {
        auto& e = edges_[i];
        if (!eidx_.emplace(e.id, static_cast<int>(i)).second)
            throw ValidationError("duplicate edge id '" + e.id + "'");
        if (!vidx_.count(e.p_plus) || !vidx_.count(e.p_minus))
            throw ValidationError("edge '" + e.id + "' refers to an unknown vertex");
        if (e.p_plus == e.p_minus)
            throw ValidationError("edge '" + e.id + "' has identical endpoints");
        if (e.l <= 0)
            throw ValidationError("edge '" + e.id + "' must have positive l");
        if (e.tau_hat == 0.0 || !std::isfinite(e.tau_hat))
            throw ValidationError("edge '" + e.id + "' has zero weight");
        const Vec3 d = position(vidx_[e.p_minus]) - position(vidx_[e.p_plus]);
        if (d.norm() == 0.0)
            throw ValidationError("edge '" + e.id + "' has coincident endpoints");
        if (is_identity(e.frame))
            e.frame = default_frame(d.normalized());
        check_frame(e.frame, e.id);
    }
    for (size_t i = 0; i < rays_.size(); ++i) {
        auto& r = rays_[i];
        if (!ridx_.emplace(r.id, static_cast<int>(i)).second)
            throw ValidationError("duplicate ray id '" + r.id + "'");
        if (!vidx_.count(r.vertex))
            throw ValidationError("ray '" + r.id + "' refers to an unknown vertex");
        if (std::abs(r.direction.norm() - 1.0) > 1e-9)
            throw ValidationError("ray '" + r.id + "' direction is not a unit vector");
        if (r.tau_hat == 0.0 || !std::isfinite(r.tau_hat))
            throw ValidationError("ray '" + r.id + "' has zero weight");
        if (is_identity(r.frame))
            r.frame = default_frame(r.direction);
        check_frame(r.frame, r.id);
        if ((r.frame.col(0) - r.direction).norm() > 1e-9)
            throw ValidationError("ray '" + r.id + "' frame does not start with its direction");
    }
}

int Graph::vertex_index(const std::string& id) const
{
    auto it = vidx_.find(id);
    if (it == vidx_.end())
        throw ValidationError("unknown vertex id '" + id + "'");
    return it->second;
}

int Graph::edge_index(const std::string& id) const
{
    auto it = eidx_.find(id);
    if (it == eidx_.end())
        throw ValidationError("unknown edge id '" + id + "'");
    return it->second;
}

int Graph::ray_index(const std::string& id) const
{
    auto it = ridx_.find(id);
    if (it == ridx_.end())
        throw ValidationError("unknown ray id '" + id + "'");
    return it->second;
}

double Graph::edge_length(int edge) const { return (position(minus_index(edge)) - position(plus_index(edge))).norm(); }

Vec3 Graph::edge_direction(int edge) const
{
    return (position(minus_index(edge)) - position(plus_index(edge))).normalized();
}

std::vector<Incidence> Graph::incident(int vertex) const
{
    std::vector<Incidence> out;
    for (size_t i = 0; i < edges_.size(); ++i) {
        const int ip = plus_index(static_cast<int>(i));
        const int im = minus_index(static_cast<int>(i));
        const Vec3 v1 = edge_direction(static_cast<int>(i));
        if (ip == vertex)
            out.push_back({ElementKind::Edge, static_cast<int>(i), v1, 1.0, edges_[i].tau_hat});
        if (im == vertex)
            out.push_back({ElementKind::Edge, static_cast<int>(i), -v1, -1.0, edges_[i].tau_hat});
    }
    for (size_t i = 0; i < rays_.size(); ++i)
        if (ray_vertex_index(static_cast<int>(i)) == vertex)
            out.push_back({ElementKind::Ray, static_cast<int>(i), rays_[i].direction, 1.0, rays_[i].tau_hat});
    return out;
}

Vec3 unbalancing(const Graph& g, int vertex)
{
    Vec3 d = Vec3::Zero();
    for (const auto& inc : g.incident(vertex))
        d += inc.tau_hat * inc.direction;
    return d;
}

Vec3 unbalancing(const Graph& g, const std::string& vertex) { return unbalancing(g, g.vertex_index(vertex)); }

bool is_balanced(const Graph& g, double tol)
{
    if (!(tol > 0.0))
        throw ValidationError("is_balanced: tol must be positive");
    for (size_t i = 0; i < g.vertices().size(); ++i)
        if (unbalancing(g, static_cast<int>(i)).norm() > tol)
            return false;
    return true;
}

bool is_central(const Graph& g, double tol)
{
    if (!is_balanced(g, tol))
        return false;
    for (size_t i = 0; i < g.edges().size(); ++i)
        if (std::abs(g.edge_length(static_cast<int>(i)) - 2.0 * g.edges()[i].l) > tol)
            return false;
    return true;
}

double piece_distance(const Vec3& x0, const Vec3& dx, bool x_ray, const Vec3& y0, const Vec3& dy, bool y_ray)
{
    const double inf = std::numeric_limits<double>::infinity();
    const double sx = x_ray ? inf : 1.0;
    const double sy = y_ray ? inf : 1.0;
    auto clampu = [](double v, double hi) { return std::clamp(v, 0.0, hi); };
    auto point_piece = [&](const Vec3& p, const Vec3& q0, const Vec3& dq, double hi) {
        const double dd = dq.squaredNorm();
        const double u = dd > 0.0 ? clampu((p - q0).dot(dq) / dd, hi) : 0.0;
        return (q0 + u * dq - p).norm();
    };
    double best = inf;
    const Vec3 r = x0 - y0;
    const double a = dx.squaredNorm(), b = dx.dot(dy), c = dy.squaredNorm();
    const double d = dx.dot(r), e = dy.dot(r);
    const double den = a * c - b * b;
    if (den > 1e-14 * a * c) {
        const double s = (b * e - c * d) / den;
        const double u = (a * e - b * d) / den;
        if (s >= 0.0 && s <= sx && u >= 0.0 && u <= sy)
            best = (x0 + s * dx - (y0 + u * dy)).norm();
    }
    best = std::min(best, point_piece(x0, y0, dy, sy));
    best = std::min(best, point_piece(y0, x0, dx, sx));
    if (!x_ray)
        best = std::min(best, point_piece(x0 + dx, y0, dy, sy));
    if (!y_ray)
        best = std::min(best, point_piece(y0 + dy, x0, dx, sx));
    return best;
}

PreEmbedReport check_pre_embedded(const Graph& g, double eps)
{
    if (!(eps > 0.0))
        throw ValidationError("check_pre_embedded: eps must be positive");
    if (!is_central(g, 1e-9))
        throw ValidationError("check_pre_embedded: graph is not central (balanced with even integer edge lengths)");
    for (const auto& e : g.edges())
        if (e.tau_hat <= 0.0)
            throw ValidationError("check_pre_embedded: edge '" + e.id + "' has non-positive weight");
    for (const auto& r : g.rays())
        if (r.tau_hat <= 0.0)
            throw ValidationError("check_pre_embedded: ray '" + r.id + "' has non-positive weight");

    PreEmbedReport rep;
    auto name = [&g](const Incidence& inc) {
        return inc.kind == ElementKind::Edge ? g.edges()[inc.index].id : g.rays()[inc.index].id;
    };
    for (size_t p = 0; p < g.vertices().size(); ++p) {
        const auto inc = g.incident(static_cast<int>(p));
        for (size_t i = 0; i < inc.size(); ++i)
            for (size_t j = i + 1; j < inc.size(); ++j) {
                const double ang = std::acos(std::clamp(inc[i].direction.dot(inc[j].direction), -1.0, 1.0));
                if (ang < kPi / 3.0 - 1e-9) {
                    rep.angle_ok = false;
                    rep.violations.push_back({1, name(inc[i]), name(inc[j]), ang});
                }
            }
    }

    struct Piece
    {
        std::string id;
        Vec3 origin;
        Vec3 dir;
        bool ray;
        int ends[2];
    };
    std::vector<Piece> pieces;
    for (size_t i = 0; i < g.edges().size(); ++i) {
        const int ip = g.plus_index(static_cast<int>(i)), im = g.minus_index(static_cast<int>(i));
        pieces.push_back({g.edges()[i].id, g.position(ip), g.position(im) - g.position(ip), false, {ip, im}});
    }
    for (size_t i = 0; i < g.rays().size(); ++i) {
        const int iv = g.ray_vertex_index(static_cast<int>(i));
        pieces.push_back({g.rays()[i].id, g.position(iv), g.rays()[i].direction, true, {iv, -1}});
    }
    for (size_t i = 0; i < pieces.size(); ++i)
        for (size_t j = i + 1; j < pieces.size(); ++j) {
            const auto& A = pieces[i];
            const auto& B = pieces[j];
            bool share = false;
            for (int x : A.ends)
                for (int y : B.ends)
                    if (x >= 0 && x == y)
                        share = true;
            if (share)
                continue;
            const double dist = piece_distance(A.origin, A.dir, A.ray, B.origin, B.dir, B.ray);
            if (!(dist > 2.0 + eps)) {
                rep.distance_ok = false;
                rep.violations.push_back({2, A.id, B.id, dist});
            }
        }

    for (size_t i = 0; i < g.rays().size(); ++i)
        for (size_t j = i + 1; j < g.rays().size(); ++j) {
            const double gap = 1.0 - g.rays()[i].direction.dot(g.rays()[j].direction);
            if (!(gap > eps)) {
                rep.ray_ok = false;
                rep.violations.push_back({3, g.rays()[i].id, g.rays()[j].id, gap});
            }
        }
    return rep;
}

Mat3 rotation_between(const Vec3& x, const Vec3& y)
{
    if (std::abs(x.norm() - 1.0) > 1e-9 || std::abs(y.norm() - 1.0) > 1e-9)
        throw ValidationError("rotation_between: inputs must be unit vectors");
    const double c = x.dot(y);
    if (c <= -1.0 + 1e-12)
        throw ValidationError("rotation_between: antipodal vectors have no smallest rotation");
    const Vec3 k = x.cross(y);
    Mat3 K;
    K << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
    return Mat3::Identity() + K + K * K / (1.0 + c);
}

Mat3 default_frame(const Vec3& v1)
{
    const Vec3 ref = std::abs(v1.dot(Vec3::UnitZ())) > 0.9 ? Vec3::UnitY() : Vec3::UnitZ();
    const Vec3 v2 = (ref - ref.dot(v1) * v1).normalized();
    Mat3 f;
    f.col(0) = v1;
    f.col(1) = v2;
    f.col(2) = v1.cross(v2);
    return f;
}

double DeformationParams::norm_D() const
{
    double m = 0.0;
    for (const auto& [k, v] : d_hat)
        m = std::max(m, v.norm());
    return m;
}

double DeformationParams::norm_L(const Graph& g) const
{
    double m = 0.0;
    for (const auto& [k, v] : ell)
        m = std::max(m, std::abs(v) / g.edges()[g.edge_index(k)].l);
    return m;
}

Graph deform(const Graph& g, const DeformationParams& params, double eps)
{
    if (params.norm_D() > eps + 1e-15 || params.norm_L(g) > eps + 1e-15)
        throw ValidationError("deform: parameters outside the flexibility radius");
    for (const auto& [k, v] : params.d_hat)
        (void)g.vertex_index(k);

    std::vector<Vertex> verts = g.vertices();
    std::vector<Edge> edges = g.edges();
    std::vector<Ray> rays = g.rays();

    // Gamma(d_hat): the last ray at each vertex absorbs the prescribed unbalancing.
    for (size_t p = 0; p < verts.size(); ++p) {
        auto it = params.d_hat.find(verts[p].id);
        const Vec3 target = unbalancing(g, static_cast<int>(p)) + (it == params.d_hat.end() ? Vec3::Zero() : it->second);
        int free_ray = -1;
        for (size_t r = 0; r < rays.size(); ++r)
            if (g.ray_vertex_index(static_cast<int>(r)) == static_cast<int>(p))
                free_ray = static_cast<int>(r);
        if (free_ray < 0) {
            if (it != params.d_hat.end() && it->second.norm() > 0.0)
                throw ValidationError("deform: vertex '" + verts[p].id + "' has no ray to absorb the unbalancing");
            continue;
        }
        Vec3 rest = Vec3::Zero();
        for (const auto& inc : g.incident(static_cast<int>(p)))
            if (!(inc.kind == ElementKind::Ray && inc.index == free_ray))
                rest += inc.tau_hat * inc.direction;
        const Vec3 W = target - rest;
        if (W.norm() < 1e-12)
            throw ValidationError("deform: free ray at '" + verts[p].id + "' degenerates");
        Ray& ray = rays[free_ray];
        const Vec3 dir = W.normalized();
        if (dir.dot(ray.direction) <= -1.0 + 1e-9)
            throw ValidationError("deform: free ray at '" + verts[p].id + "' flips direction");
        ray.frame = rotation_between(ray.direction, dir) * ray.frame;
        ray.direction = dir;
        ray.tau_hat = W.norm();
    }

    // Gamma(d_hat, ell): slide vertices to the prescribed edge lengths.
    const int nv = static_cast<int>(verts.size());
    const int ne = static_cast<int>(edges.size());
    std::vector<double> target(ne);
    bool any = false;
    for (int e = 0; e < ne; ++e) {
        auto it = params.ell.find(edges[e].id);
        const double le = it == params.ell.end() ? 0.0 : it->second;
        any = any || le != 0.0;
        target[e] = 2.0 * edges[e].l + 2.0 * le;
    }
    for (const auto& [k, v] : params.ell)
        (void)g.edge_index(k);
    if (any) {
        Eigen::VectorXd x(3 * nv);
        for (int p = 0; p < nv; ++p)
            x.segment<3>(3 * p) = verts[p].position;
        for (int it = 0; it < 50; ++it) {
            Eigen::MatrixXd J = Eigen::MatrixXd::Zero(ne, 3 * nv);
            Eigen::VectorXd res(ne);
            for (int e = 0; e < ne; ++e) {
                const int ip = g.plus_index(e), im = g.minus_index(e);
                const Vec3 d = x.segment<3>(3 * im) - x.segment<3>(3 * ip);
                const double len = d.norm();
                res[e] = len - target[e];
                J.block<1, 3>(e, 3 * im) = d.transpose() / len;
                J.block<1, 3>(e, 3 * ip) = -d.transpose() / len;
            }
            if (res.cwiseAbs().maxCoeff() < 1e-14)
                break;
            const Eigen::VectorXd dx = J.completeOrthogonalDecomposition().solve(-res);
            x += dx;
        }
        for (int p = 0; p < nv; ++p)
            verts[p].position = x.segment<3>(3 * p);
    }

    Graph tmp(verts, edges, rays, g.family());
    const auto frames = deformed_frames(g, tmp);
    for (int e = 0; e < ne; ++e)
        edges[e].frame = frames[e];
    return Graph(std::move(verts), std::move(edges), std::move(rays), g.family());
}

std::vector<Mat3> deformed_frames(const Graph& g0, const Graph& gd)
{
    if (g0.edges().size() != gd.edges().size() || g0.rays().size() != gd.rays().size())
        throw ValidationError("deformed_frames: graphs are not isomorphic");
    std::vector<Mat3> out;
    for (size_t e = 0; e < g0.edges().size(); ++e) {
        const Mat3& F = g0.edges()[e].frame;
        const Vec3 v1p = gd.edge_direction(static_cast<int>(e));
        out.push_back(rotation_between(F.col(0), v1p) * F);
    }
    for (size_t r = 0; r < g0.rays().size(); ++r) {
        const Mat3& F = g0.rays()[r].frame;
        out.push_back(rotation_between(F.col(0), gd.rays()[r].direction) * F);
    }
    return out;
}

std::vector<double> measure_ell(const Graph& g0, const Graph& gd)
{
    std::vector<double> out;
    for (size_t e = 0; e < g0.edges().size(); ++e)
        out.push_back(0.5 * gd.edge_length(static_cast<int>(e)) - g0.edges()[e].l);
    return out;
}

} // namespace cmcglue
