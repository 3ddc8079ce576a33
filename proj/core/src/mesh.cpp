#include "cmcglue/mesh.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <unordered_map>

namespace cmcglue {

namespace {

long long edge_key(int u, int v) { return (static_cast<long long>(u) << 32) | static_cast<unsigned>(v); }

std::string region_tag(const RegionTable* table, const InitialSurface& s, const PlacedElement& el, double t)
{
    const std::string& pid = s.graph.vertices()[el.vertex_plus].id;
    if (!table)
        return "M[" + el.id + "]";
    const RegionLabel lab = table->label(t);
    const std::string& vid = lab.end == End::Plus ? pid : s.graph.vertices()[el.vertex_minus].id;
    switch (lab.kind) {
    case RegionKind::Central:
        return "S[" + vid + "]";
    case RegionKind::Standard:
        return "S[" + vid + "," + el.id + "," + std::to_string(lab.n) + "]";
    case RegionKind::Transition:
        return "L[" + vid + "," + el.id + "," + std::to_string(lab.n) + "]";
    }
    return "M[" + el.id + "]";
}

int columns(int resolution) { return std::max(8, static_cast<int>(std::ceil(2.0 * kPi * resolution))); }

} // namespace

double TriangleMesh::min_area() const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : triangles)
        m = std::min(m, 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm());
    return m;
}

int TriangleMesh::euler_characteristic() const
{
    std::unordered_map<long long, int> edges;
    for (const auto& t : triangles)
        for (int k = 0; k < 3; ++k) {
            const int u = t[k], v = t[(k + 1) % 3];
            edges[edge_key(std::min(u, v), std::max(u, v))]++;
        }
    return static_cast<int>(vertices.size()) - static_cast<int>(edges.size()) + static_cast<int>(triangles.size());
}

int TriangleMesh::nonmanifold_edges() const
{
    std::unordered_map<long long, int> edges;
    for (const auto& t : triangles)
        for (int k = 0; k < 3; ++k) {
            const int u = t[k], v = t[(k + 1) % 3];
            edges[edge_key(std::min(u, v), std::max(u, v))]++;
        }
    int bad = 0;
    for (const auto& [k, c] : edges)
        bad += c > 2;
    return bad;
}

int TriangleMesh::boundary_loops() const
{
    std::unordered_map<long long, int> count;
    for (const auto& t : triangles)
        for (int k = 0; k < 3; ++k) {
            const int u = t[k], v = t[(k + 1) % 3];
            count[edge_key(std::min(u, v), std::max(u, v))]++;
        }
    std::unordered_map<int, std::vector<int>> adj;
    for (const auto& [key, c] : count)
        if (c == 1) {
            const int u = static_cast<int>(key >> 32), v = static_cast<int>(key & 0xffffffff);
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
    std::unordered_map<int, bool> seen;
    int loops = 0;
    for (const auto& [start, nb] : adj) {
        if (seen[start])
            continue;
        ++loops;
        std::vector<int> stack{start};
        seen[start] = true;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v : adj[u])
                if (!seen[v]) {
                    seen[v] = true;
                    stack.push_back(v);
                }
        }
    }
    return loops;
}

std::vector<std::array<int, 3>> sphere_hull(const std::vector<Vec3>& input)
{
    const int n = static_cast<int>(input.size());
    if (n < 4)
        throw ValidationError("sphere_hull: at least four points required");
    std::mt19937 rng(12345);
    std::normal_distribution<double> nd;
    std::vector<Vec3> pts(input.size());
    for (int i = 0; i < n; ++i) {
        Vec3 j(nd(rng), nd(rng), nd(rng));
        j -= j.dot(input[i]) * input[i];
        pts[i] = (input[i] + 1e-9 * j).normalized();
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i)
        order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    struct Face
    {
        int v[3];
        Vec3 normal;
        bool alive;
    };
    std::vector<Face> faces;
    std::unordered_map<long long, int> owner; // directed edge -> face
    auto add_face = [&](int a, int b, int c) {
        Face f{{a, b, c}, (pts[b] - pts[a]).cross(pts[c] - pts[a]), true};
        faces.push_back(f);
        const int id = static_cast<int>(faces.size()) - 1;
        owner[edge_key(a, b)] = id;
        owner[edge_key(b, c)] = id;
        owner[edge_key(c, a)] = id;
    };
    auto visible = [&](const Face& f, const Vec3& p) { return f.normal.dot(p - pts[f.v[0]]) > 0.0; };

    // Initial tetrahedron from the first four shuffled points that span a volume.
    int i0 = order[0], i1 = order[1], i2 = -1, i3 = -1;
    size_t k = 2;
    for (; k < order.size() && i2 < 0; ++k)
        if ((pts[order[k]] - pts[i0]).cross(pts[i1] - pts[i0]).norm() > 1e-12)
            i2 = order[k];
    for (; k < order.size() && i3 < 0; ++k)
        if (std::abs((pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).dot(pts[order[k]] - pts[i0])) > 1e-14)
            i3 = order[k];
    if (i2 < 0 || i3 < 0)
        throw NumericalError("sphere_hull: degenerate point set");
    if ((pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).dot(pts[i3] - pts[i0]) > 0.0)
        std::swap(i1, i2);
    add_face(i0, i1, i2);
    add_face(i0, i3, i1);
    add_face(i1, i3, i2);
    add_face(i2, i3, i0);

    std::vector<int> alive;
    std::vector<int> vis;
    for (const int p : order) {
        if (p == i0 || p == i1 || p == i2 || p == i3)
            continue;
        alive.clear();
        for (int f = 0; f < static_cast<int>(faces.size()); ++f)
            if (faces[f].alive)
                alive.push_back(f);
        vis.clear();
        for (int f : alive)
            if (visible(faces[f], pts[p]))
                vis.push_back(f);
        if (vis.empty())
            throw NumericalError("sphere_hull: point inside hull");
        for (int f : vis)
            faces[f].alive = false;
        std::vector<std::pair<int, int>> horizon;
        for (int f : vis)
            for (int e = 0; e < 3; ++e) {
                const int a = faces[f].v[e], b = faces[f].v[(e + 1) % 3];
                const int nb = owner.at(edge_key(b, a));
                if (faces[nb].alive)
                    horizon.emplace_back(a, b);
            }
        for (int f : vis)
            for (int e = 0; e < 3; ++e)
                owner.erase(edge_key(faces[f].v[e], faces[f].v[(e + 1) % 3]));
        for (const auto& [a, b] : horizon)
            add_face(a, b, p);
        // Drop dead faces now and then to keep the scan linear in the hull size.
        if (faces.size() > 4 * static_cast<size_t>(n)) {
            std::vector<Face> keep;
            for (const auto& f : faces)
                if (f.alive)
                    keep.push_back(f);
            faces.clear();
            owner.clear();
            for (const auto& f : keep)
                add_face(f.v[0], f.v[1], f.v[2]);
        }
    }
    std::vector<std::array<int, 3>> out;
    for (const auto& f : faces)
        if (f.alive)
            out.push_back({f.v[0], f.v[1], f.v[2]});
    return out;
}

TriangleMesh tessellate_block(const DelaunayBlock& block, int resolution)
{
    if (resolution < 8)
        throw ValidationError("tessellate_block: resolution must be at least 8");
    TriangleMesh m;
    const int nth = columns(resolution);
    const int rows = static_cast<int>(std::ceil((block.t_max() - block.t_min()) * resolution)) + 1;
    for (int i = 0; i < rows; ++i) {
        const double t = block.t_min() + (block.t_max() - block.t_min()) * i / (rows - 1);
        for (int j = 0; j < nth; ++j) {
            m.vertices.push_back(block(t, 2.0 * kPi * j / nth));
            m.tags.push_back("t=" + std::to_string(t));
        }
    }
    for (int i = 0; i + 1 < rows; ++i)
        for (int j = 0; j < nth; ++j) {
            const int jn = (j + 1) % nth;
            const int a = i * nth + j, b = i * nth + jn, c = (i + 1) * nth + j, d = (i + 1) * nth + jn;
            m.triangles.push_back({a, b, c});
            m.triangles.push_back({c, b, d});
        }
    return m;
}

TriangleMesh tessellate(const InitialSurface& s, int resolution, TessellationReport* report)
{
    if (resolution < 8)
        throw ValidationError("tessellate: resolution must be at least 8 samples per unit");
    const int nth = columns(resolution);
    const double h = 1.0 / resolution;
    TriangleMesh m;
    TessellationReport rep;

    // Shared collar rings, keyed by (element, end).
    std::map<std::pair<int, int>, std::vector<int>> rings;

    // Sphere pieces.
    const double t_stop = std::acosh(1.0 / 0.35);
    const double cap_angle = std::acos(std::tanh(t_stop));
    for (const auto& sp : s.spheres) {
        std::vector<Vec3> dom;
        std::vector<int> ring_of; // attachment slot for ring-0 points, -1 otherwise
        for (size_t j = 0; j < sp.elements.size(); ++j) {
            const int k = sp.elements[j];
            const PlacedElement& el = s.elements[k];
            const double tb = sp.sigma[j] > 0 ? el.t_min() : el.t_max();
            for (int r = 0;; ++r) {
                const double off = r * h;
                if (s.a - off < t_stop)
                    break;
                for (int c = 0; c < nth; ++c) {
                    const double th = 2.0 * kPi * c / nth;
                    dom.push_back(s.collar_sphere_coordinate(k, sp.sigma[j], sp.sigma[j] > 0 ? tb - off : tb + off, th));
                    ring_of.push_back(r == 0 ? static_cast<int>(j) : -1);
                }
            }
        }
        const int nfill = static_cast<int>(std::ceil(4.0 * kPi / (0.866 * h * h)));
        const double golden = kPi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < nfill; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / nfill;
            const double rr = std::sqrt(1.0 - z * z);
            const Vec3 x(rr * std::cos(golden * i), rr * std::sin(golden * i), z);
            bool keep = true;
            for (const auto& c : sp.block.spec().x1)
                keep = keep && std::acos(std::clamp(x.dot(c), -1.0, 1.0)) > cap_angle + 0.5 * h;
            if (keep) {
                dom.push_back(x);
                ring_of.push_back(-1);
            }
        }
        const auto faces = sphere_hull(dom);
        const int base = static_cast<int>(m.vertices.size());
        const std::string tag = "S[" + s.graph.vertices()[sp.vertex].id + "]";
        for (const auto& x : dom) {
            m.vertices.push_back(sp.point(x));
            m.tags.push_back(tag);
        }
        for (const auto& f : faces) {
            const int r0 = ring_of[f[0]];
            if (r0 >= 0 && ring_of[f[1]] == r0 && ring_of[f[2]] == r0)
                continue;
            m.triangles.push_back({base + f[0], base + f[1], base + f[2]});
        }
        size_t cursor = 0;
        for (size_t j = 0; j < sp.elements.size(); ++j) {
            while (ring_of[cursor] != static_cast<int>(j))
                ++cursor;
            std::vector<int> ids(nth);
            for (int c = 0; c < nth; ++c)
                ids[c] = base + static_cast<int>(cursor) + c;
            rings[{sp.elements[j], sp.sigma[j] > 0 ? 0 : 1}] = ids;
            cursor += nth;
        }
    }

    // Blocks.
    for (size_t k = 0; k < s.elements.size(); ++k) {
        const PlacedElement& el = s.elements[k];
        std::unique_ptr<RegionTable> table;
        try {
            table = std::make_unique<RegionTable>(s.a, s.b, el.block.domain_profile().quarter_period(), el.l,
                                                  el.kind == ElementKind::Edge, el.l);
        } catch (const ValidationError&) {
        }
        const double t0 = el.t_min(), t1 = el.t_max();
        const int rows = static_cast<int>(std::ceil((t1 - t0) * resolution)) + 1;
        std::vector<int> prev = rings.at({static_cast<int>(k), 0});
        for (int c = 0; c < nth; ++c)
            rep.max_stitch_mismatch = std::max(rep.max_stitch_mismatch, (m.vertices[prev[c]] - el.point(t0, 2.0 * kPi * c / nth)).norm());
        for (int i = 1; i < rows; ++i) {
            const double t = t0 + (t1 - t0) * i / (rows - 1);
            std::vector<int> cur(nth);
            const bool last_edge_row = i == rows - 1 && el.kind == ElementKind::Edge;
            if (last_edge_row) {
                cur = rings.at({static_cast<int>(k), 1});
                for (int c = 0; c < nth; ++c)
                    rep.max_stitch_mismatch =
                        std::max(rep.max_stitch_mismatch, (m.vertices[cur[c]] - el.point(t, 2.0 * kPi * c / nth)).norm());
            } else {
                const std::string tag = region_tag(table.get(), s, el, t);
                for (int c = 0; c < nth; ++c) {
                    cur[c] = static_cast<int>(m.vertices.size());
                    m.vertices.push_back(el.point(t, 2.0 * kPi * c / nth));
                    m.tags.push_back(tag);
                }
            }
            for (int c = 0; c < nth; ++c) {
                const int cn = (c + 1) % nth;
                m.triangles.push_back({prev[c], prev[cn], cur[c]});
                m.triangles.push_back({cur[c], prev[cn], cur[cn]});
            }
            prev = std::move(cur);
        }
    }
    if (report)
        *report = rep;
    return m;
}

void write_obj(const TriangleMesh& mesh, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("write_obj: cannot open " + path);
    out << std::setprecision(17);
    for (const auto& v : mesh.vertices)
        out << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    for (const auto& t : mesh.triangles)
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    if (!out)
        throw IoError("write_obj: write failed for " + path);
}

void write_tags(const TriangleMesh& mesh, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("write_tags: cannot open " + path);
    out << nlohmann::json(mesh.tags).dump() << '\n';
    if (!out)
        throw IoError("write_tags: write failed for " + path);
}

} // namespace cmcglue
