#include "cmcglue/jacobi.hpp"
#include "cmcglue/mesh.hpp"
#include "cmcglue/quadrature.hpp"
#include "cmcglue/smoothstep.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <array>
#include <cmath>

namespace cmcglue {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

struct FemModel
{
    int n = 0;                    // free unknowns
    SpMat K, M;
    Eigen::MatrixXd F;            // f^_i = e_i . N / pi at the free nodes
};

// P1 stiffness and weighted consistent mass of a triangle given its corners in R^3 (or R^2 padded with 0).
void add_triangle(const std::array<int, 3>& ids, const std::array<Vec3, 3>& x, double weight, Triplets& k, Triplets& m)
{
    const Vec3 n = (x[1] - x[0]).cross(x[2] - x[0]);
    const double area = 0.5 * n.norm();
    if (area <= 0.0)
        return;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, l = (i + 2) % 3;
        // Cotangent of the angle at vertex i couples j and l.
        const Vec3 u = x[j] - x[i], v = x[l] - x[i];
        const double cot = u.dot(v) / u.cross(v).norm();
        const double c = 0.5 * cot;
        k.emplace_back(ids[j], ids[l], -c);
        k.emplace_back(ids[l], ids[j], -c);
        k.emplace_back(ids[j], ids[j], c);
        k.emplace_back(ids[l], ids[l], c);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m.emplace_back(ids[i], ids[j], weight * area * (i == j ? 2.0 : 1.0) / 12.0);
}

FemModel build_model(const InitialSurface& s, int vertex, double b, int res)
{
    const PlacedSphere& sp = s.spheres.at(vertex);
    const int nth = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * res)));
    const double h = 1.0 / res;

    // Sphere piece, generated as in tessellate.
    const double t_stop = std::acosh(1.0 / 0.35);
    const double cap_angle = std::acos(std::tanh(t_stop));
    std::vector<Vec3> dom;
    std::vector<int> ring_of;
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

    std::vector<Vec3> pos;  // sphere positions (unit vectors about the center)
    std::vector<Vec3> normal;
    for (const auto& x : dom) {
        const Vec3 y = sp.block(x).normalized();
        pos.push_back(y);
        normal.push_back(y);
    }
    Triplets kt, mt;
    for (const auto& f : faces) {
        const int r0 = ring_of[f[0]];
        if (r0 >= 0 && ring_of[f[1]] == r0 && ring_of[f[2]] == r0)
            continue;
        add_triangle({f[0], f[1], f[2]}, {pos[f[0]], pos[f[1]], pos[f[2]]}, 1.0, kt, mt);
    }

    // Collars t in [a, 2 P - b] with the h metric of the target profile.
    std::vector<char> fixed(dom.size(), 0);
    int total = static_cast<int>(dom.size());
    size_t cursor = 0;
    for (size_t j = 0; j < sp.elements.size(); ++j) {
        while (ring_of[cursor] != static_cast<int>(j))
            ++cursor;
        const PlacedElement& el = s.elements[sp.elements[j]];
        const DelaunayProfile& dp = el.block.domain_profile();
        const DelaunayProfile& tp = el.block.target_profile();
        const double ratio = tp.quarter_period() / dp.quarter_period();
        const double u0 = s.a, u1 = 2.0 * dp.quarter_period() - b;
        if (!(u1 > u0 + h))
            throw ValidationError("approx_kernel_central: collar too short (2 P - b <= a)");
        const int rows = std::max(2, static_cast<int>(std::ceil((u1 - u0) * res)));
        std::vector<int> prev(nth);
        for (int c = 0; c < nth; ++c)
            prev[c] = static_cast<int>(cursor) + c;
        cursor += nth;
        auto coord = [&](int i) { return ratio * (u0 + (u1 - u0) * i / rows); };
        auto omega = [&](double tu) { return 2.0 * tp.tau() * std::cosh(2.0 * tp.w(tu)); };
        for (int i = 1; i <= rows; ++i) {
            std::vector<int> cur(nth);
            const double u = u0 + (u1 - u0) * i / rows;
            const double tblock = sp.sigma[j] > 0 ? u : el.block.domain_length() - u;
            for (int c = 0; c < nth; ++c) {
                cur[c] = total++;
                const double th = 2.0 * kPi * c / nth;
                pos.emplace_back(coord(i), th, 0.0);
                normal.push_back(el.rotation * tp.normal(ratio * tblock, th));
                fixed.push_back(i == rows ? 1 : 0);
            }
            const double wbar_prev = omega(coord(i - 1)), wbar_cur = omega(coord(i));
            const double t_prev = coord(i - 1), t_cur = coord(i);
            for (int c = 0; c < nth; ++c) {
                const int cn = (c + 1) % nth;
                const double th0 = 2.0 * kPi * c / nth, th1 = 2.0 * kPi * (c + 1) / nth;
                const Vec3 p00(t_prev, th0, 0), p01(t_prev, th1, 0), p10(t_cur, th0, 0), p11(t_cur, th1, 0);
                add_triangle({prev[c], prev[cn], cur[c]}, {p00, p01, p10}, (2.0 * wbar_prev + wbar_cur) / 3.0, kt, mt);
                add_triangle({cur[c], prev[cn], cur[cn]}, {p10, p01, p11}, (wbar_prev + 2.0 * wbar_cur) / 3.0, kt, mt);
            }
            prev = std::move(cur);
        }
    }

    std::vector<int> map(total, -1);
    FemModel model;
    for (int i = 0; i < total; ++i)
        if (!fixed[i])
            map[i] = model.n++;
    auto restrict_ = [&](const Triplets& in) {
        Triplets out;
        out.reserve(in.size());
        for (const auto& t : in)
            if (map[t.row()] >= 0 && map[t.col()] >= 0)
                out.emplace_back(map[t.row()], map[t.col()], t.value());
        SpMat A(model.n, model.n);
        A.setFromTriplets(out.begin(), out.end());
        return A;
    };
    model.K = restrict_(kt);
    model.M = restrict_(mt);
    model.F.resize(model.n, 3);
    for (int i = 0; i < total; ++i)
        if (map[i] >= 0)
            model.F.row(map[i]) = normal[i].transpose() / kPi;
    return model;
}

// Eigenvalues of (A, M) below sigma.
int count_below(const SpMat& A, const SpMat& M, double sigma)
{
    Eigen::SimplicialLDLT<SpMat> ldlt;
    ldlt.compute(SpMat(A - sigma * M));
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("approx_kernel_central: LDL^T factorization failed");
    const Eigen::VectorXd d = ldlt.vectorD();
    return static_cast<int>((d.array() < 0.0).count());
}

// M-orthonormal basis of the columns of X.
Eigen::MatrixXd m_orthonormalize(const Eigen::MatrixXd& X, const SpMat& M)
{
    const Eigen::MatrixXd G = X.transpose() * (M * X);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-300);
    return X * es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal();
}

} // namespace

ApproxKernelResult approx_kernel_central(const InitialSurface& s, int vertex, double b, int resolution, double window,
                                         double eps)
{
    if (vertex < 0 || vertex >= static_cast<int>(s.spheres.size()))
        throw ValidationError("approx_kernel_central: vertex index out of range");
    if (resolution < 8)
        throw ValidationError("approx_kernel_central: resolution must be at least 8");
    const FemModel fem = build_model(s, vertex, b, resolution);
    const SpMat A = fem.K - 2.0 * fem.M; // (K - 2M) u = mu M u with lambda = -mu

    ApproxKernelResult res;
    res.unknowns = fem.n;
    res.count_window = count_below(A, fem.M, window) - count_below(A, fem.M, -window);
    res.count_eps = count_below(A, fem.M, eps) - count_below(A, fem.M, -eps);

    const int k = std::max(6, res.count_window + 4);
    const double shift = 1e-3 * window;
    Eigen::SimplicialLDLT<SpMat> solver;
    solver.compute(SpMat(A - shift * fem.M));
    if (solver.info() != Eigen::Success)
        throw NumericalError("approx_kernel_central: shifted factorization failed");

    Eigen::MatrixXd X(fem.n, k);
    X.leftCols(3) = fem.F;
    for (int j = 3; j < k; ++j)
        for (int i = 0; i < fem.n; ++i)
            X(i, j) = std::sin(0.37 * (i + 1) * (j + 1)) + 0.1 * std::cos(1.3 * i + j);
    X = m_orthonormalize(X, fem.M);
    Eigen::VectorXd ritz = Eigen::VectorXd::Constant(k, 1e300);
    for (int it = 0; it < 500; ++it) {
        Eigen::MatrixXd Y(fem.n, k);
        for (int j = 0; j < k; ++j)
            Y.col(j) = solver.solve(fem.M * X.col(j));
        Y = m_orthonormalize(Y, fem.M);
        const Eigen::MatrixXd Ar = Y.transpose() * (A * Y);
        const Eigen::MatrixXd Mr = Y.transpose() * (fem.M * Y);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(0.5 * (Ar + Ar.transpose()), 0.5 * (Mr + Mr.transpose()));
        X = Y * ges.eigenvectors();
        const Eigen::VectorXd next = ges.eigenvalues();
        const double change = (next - ritz).cwiseAbs().maxCoeff();
        ritz = next;
        if (it > 2 && change < 1e-11)
            break;
    }

    std::vector<int> order(k);
    for (int j = 0; j < k; ++j)
        order[j] = j;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return std::abs(ritz[i]) < std::abs(ritz[j]); });
    std::vector<double> in_window;
    for (int j = 0; j < k; ++j)
        if (std::abs(ritz[j]) <= window)
            in_window.push_back(-ritz[j]);
    std::sort(in_window.begin(), in_window.end());
    res.eigenvalues = in_window;
    res.eigen_modes.assign(in_window.size(), -1);

    Eigen::MatrixXd U(fem.n, 3);
    for (int j = 0; j < 3; ++j) {
        U.col(j) = X.col(order[j]);
        res.kernel_eigenvalues.push_back(-ritz[order[j]]);
    }
    std::sort(res.kernel_eigenvalues.begin(), res.kernel_eigenvalues.end());
    U = m_orthonormalize(U, fem.M);
    const Eigen::MatrixXd Fo = m_orthonormalize(fem.F, fem.M);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(U.transpose() * (fem.M * Fo));
    for (int j = 0; j < 3; ++j)
        res.principal_angles.push_back(std::acos(std::clamp(svd.singularValues()[j], -1.0, 1.0)));
    std::sort(res.principal_angles.begin(), res.principal_angles.end());
    return res;
}

double central_window(const InitialSurface& s, int vertex, const Vec3& y)
{
    const PlacedSphere& sp = s.spheres.at(vertex);
    const double rd = s.disk_radius();
    const double delta = s.delta;
    double dmin = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < 8; ++mask) {
        const Vec3 f((mask & 1) ? -y.x() : y.x(), (mask & 2) ? -y.y() : y.y(), (mask & 4) ? -y.z() : y.z());
        for (const auto& c : sp.block.spec().y1)
            dmin = std::min(dmin, std::acos(std::clamp(f.dot(c), -1.0, 1.0)) - rd - delta);
    }
    return psi(delta, 2.0 * delta, dmin);
}

SubstituteCoefficients substitute_kernel_coeffs_central(const InitialSurface& s, int vertex, int nz, int nphi)
{
    if (vertex < 0 || vertex >= static_cast<int>(s.spheres.size()))
        throw ValidationError("substitute_kernel_coeffs_central: vertex index out of range");
    if (nz < 2 || nphi < 4 || nphi % 2 != 0)
        throw ValidationError("substitute_kernel_coeffs_central: need nz >= 2 and an even nphi >= 4");
    const QuadratureRule rule = composite_gauss_legendre(8, std::max(1, nz / 8), -1.0, 1.0);
    double G[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    for (size_t a = 0; a < rule.nodes.size(); ++a) {
        const double z = rule.nodes[a];
        const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int k = 0; k < nphi; ++k) {
            const double phi = (k + 0.5) * 2.0 * kPi / nphi;
            const Vec3 y(rr * std::cos(phi), rr * std::sin(phi), z);
            const double wgt = central_window(s, vertex, y) * rule.weights[a] * 2.0 * kPi / nphi;
            if (wgt == 0.0)
                continue;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    G[i][j] += wgt * y[i] * y[j] / (kPi * kPi);
        }
    }
    SubstituteCoefficients out;
    for (int i = 0; i < 3; ++i) {
        if (G[i][i] < 1e-6)
            throw NumericalError("substitute_kernel_coeffs_central: near-singular normalization");
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
