#include "cmcglue/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace cmcglue {

namespace {

using Vec2 = Eigen::Vector2d;

double orient2(const Vec2& a, const Vec2& b, const Vec2& c) { return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x(); }

bool segments_cross_2d(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2)
{
    const double d1 = orient2(q1, q2, p1), d2 = orient2(q1, q2, p2);
    const double d3 = orient2(p1, p2, q1), d4 = orient2(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on = [](const Vec2& a, const Vec2& b, const Vec2& c, double d) {
        return d == 0.0 && std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= c.y() &&
               c.y() <= std::max(a.y(), b.y());
    };
    return on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4);
}

bool point_in_tri_2d(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c)
{
    const double d1 = orient2(a, b, p), d2 = orient2(b, c, p), d3 = orient2(c, a, p);
    const bool neg = d1 < 0 || d2 < 0 || d3 < 0, pos = d1 > 0 || d2 > 0 || d3 > 0;
    return !(neg && pos);
}

bool coplanar_overlap(const Vec3& n, const std::array<Vec3, 3>& A, const std::array<Vec3, 3>& B)
{
    int drop = 0;
    n.cwiseAbs().maxCoeff(&drop);
    const int i0 = (drop + 1) % 3, i1 = (drop + 2) % 3;
    std::array<Vec2, 3> a, b;
    for (int k = 0; k < 3; ++k) {
        a[k] = {A[k][i0], A[k][i1]};
        b[k] = {B[k][i0], B[k][i1]};
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (segments_cross_2d(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3]))
                return true;
    return point_in_tri_2d(a[0], b[0], b[1], b[2]) || point_in_tri_2d(b[0], a[0], a[1], a[2]);
}

// Interval of the line L = {x : x = O + s D} cut out by a triangle whose vertices have signed plane
// distances d relative to the other triangle's plane.
void line_interval(const std::array<Vec3, 3>& T, const std::array<double, 3>& d, const Vec3& D, double& lo, double& hi)
{
    // Find the vertex alone on its side.
    int solo = 0;
    if ((d[0] > 0) == (d[1] > 0) && d[0] != 0 && d[1] != 0)
        solo = 2;
    else if ((d[0] > 0) == (d[2] > 0) && d[0] != 0 && d[2] != 0)
        solo = 1;
    else if (d[1] != 0 && d[2] != 0 && (d[1] > 0) == (d[2] > 0))
        solo = 0;
    else {
        // A vertex lies on the plane: pick the one with distinct sign structure.
        for (int k = 0; k < 3; ++k)
            if (d[k] != 0 && d[(k + 1) % 3] * d[k] <= 0 && d[(k + 2) % 3] * d[k] <= 0) {
                solo = k;
                break;
            }
    }
    const int o1 = (solo + 1) % 3, o2 = (solo + 2) % 3;
    const double ps = D.dot(T[solo]), p1 = D.dot(T[o1]), p2 = D.dot(T[o2]);
    double s1, s2;
    if (d[solo] == 0.0) {
        s1 = s2 = ps;
        if (d[o1] == 0.0)
            s2 = p1;
        else if (d[o2] == 0.0)
            s2 = p2;
    } else {
        s1 = d[o1] == d[solo] ? p1 : ps + (p1 - ps) * d[solo] / (d[solo] - d[o1]);
        s2 = d[o2] == d[solo] ? p2 : ps + (p2 - ps) * d[solo] / (d[solo] - d[o2]);
    }
    lo = std::min(s1, s2);
    hi = std::max(s1, s2);
}

} // namespace

bool triangles_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0, const Vec3& b1, const Vec3& b2)
{
    const std::array<Vec3, 3> A{a0, a1, a2}, B{b0, b1, b2};
    const Vec3 nB = (b1 - b0).cross(b2 - b0);
    std::array<double, 3> da;
    for (int k = 0; k < 3; ++k)
        da[k] = nB.dot(A[k] - b0);
    if ((da[0] > 0 && da[1] > 0 && da[2] > 0) || (da[0] < 0 && da[1] < 0 && da[2] < 0))
        return false;
    const Vec3 nA = (a1 - a0).cross(a2 - a0);
    std::array<double, 3> db;
    for (int k = 0; k < 3; ++k)
        db[k] = nA.dot(B[k] - a0);
    if ((db[0] > 0 && db[1] > 0 && db[2] > 0) || (db[0] < 0 && db[1] < 0 && db[2] < 0))
        return false;
    if (da[0] == 0 && da[1] == 0 && da[2] == 0)
        return coplanar_overlap(nA, A, B);
    const Vec3 D = nA.cross(nB);
    if (D.squaredNorm() == 0.0)
        return coplanar_overlap(nA, A, B);
    double alo, ahi, blo, bhi;
    line_interval(A, da, D, alo, ahi);
    line_interval(B, db, D, blo, bhi);
    return !(ahi < blo || bhi < alo);
}

IntersectionReport self_intersection_check(const TriangleMesh& mesh, size_t max_pairs)
{
    IntersectionReport rep;
    const int nt = static_cast<int>(mesh.triangles.size());
    if (nt == 0)
        return rep;
    std::vector<Eigen::AlignedBox3d> boxes(nt);
    double base = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nt; ++i) {
        for (int k = 0; k < 3; ++k)
            boxes[i].extend(mesh.vertices[mesh.triangles[i][k]]);
        base = std::min(base, boxes[i].sizes().maxCoeff());
    }
    base = std::max(base, 1e-12);

    // Hierarchical grid: each triangle is stored on the level whose cell size bounds its extent and
    // queries its own and every coarser level.
    struct Key
    {
        int level;
        long long x, y, z;
        bool operator==(const Key& o) const { return level == o.level && x == o.x && y == o.y && z == o.z; }
    };
    struct KeyHash
    {
        size_t operator()(const Key& k) const
        {
            const size_t h = std::hash<long long>()(k.x * 73856093LL ^ k.y * 19349663LL ^ k.z * 83492791LL);
            return h ^ (static_cast<size_t>(k.level) * 0x9e3779b97f4a7c15ULL);
        }
    };
    std::unordered_map<Key, std::vector<int>, KeyHash> grid;
    std::vector<int> level(nt);
    std::vector<char> used(64, 0);
    auto cell_size = [&](int L) { return base * std::ldexp(1.0, L); };
    auto cell_of = [&](double x, int L) { return static_cast<long long>(std::floor(x / cell_size(L))); };
    auto for_cells = [&](const Eigen::AlignedBox3d& bx, int L, auto&& fn) {
        for (long long x = cell_of(bx.min().x(), L); x <= cell_of(bx.max().x(), L); ++x)
            for (long long y = cell_of(bx.min().y(), L); y <= cell_of(bx.max().y(), L); ++y)
                for (long long z = cell_of(bx.min().z(), L); z <= cell_of(bx.max().z(), L); ++z)
                    fn(Key{L, x, y, z});
    };
    for (int i = 0; i < nt; ++i) {
        const double ext = boxes[i].sizes().maxCoeff();
        int L = 0;
        while (cell_size(L) < ext && L < 63)
            ++L;
        level[i] = L;
        used[L] = 1;
        for_cells(boxes[i], L, [&](const Key& k) { grid[k].push_back(i); });
    }
    std::vector<int> stamp(nt, -1);
    for (int i = 0; i < nt; ++i) {
        const auto& bi = boxes[i];
        const auto& ti = mesh.triangles[i];
        for (int L = level[i]; L < 64; ++L) {
            if (!used[L])
                continue;
            for_cells(bi, L, [&](const Key& k) {
                auto it = grid.find(k);
                if (it == grid.end())
                    return;
                for (int j : it->second) {
                    if (j == i || stamp[j] == i || (level[j] == level[i] && j < i))
                        continue;
                    stamp[j] = i;
                    if (!bi.intersects(boxes[j]))
                        continue;
                    const auto& tj = mesh.triangles[j];
                    bool shared = false;
                    for (int p = 0; p < 3; ++p)
                        for (int q = 0; q < 3; ++q)
                            shared = shared || ti[p] == tj[q];
                    if (shared)
                        continue;
                    ++rep.candidate_pairs;
                    if (triangles_intersect(mesh.vertices[ti[0]], mesh.vertices[ti[1]], mesh.vertices[ti[2]],
                                            mesh.vertices[tj[0]], mesh.vertices[tj[1]], mesh.vertices[tj[2]])) {
                        ++rep.count;
                        if (rep.pairs.size() < max_pairs)
                            rep.pairs.emplace_back(std::min(i, j), std::max(i, j));
                    }
                }
            });
        }
    }
    std::sort(rep.pairs.begin(), rep.pairs.end());
    return rep;
}

} // namespace cmcglue
