#include "cmcglue/quadrature.hpp"
#include "cmcglue/types.hpp"

#include <Eigen/Eigenvalues>

namespace cmcglue {

QuadratureRule gauss_legendre(int n, double lo, double hi)
{
    if (n < 1)
        throw ValidationError("gauss_legendre: n must be positive");
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(std::max(n - 1, 1));
    for (int k = 1; k < n; ++k)
        sub[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    QuadratureRule q;
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int i = 0; i < n; ++i) {
        const double v = es.eigenvectors()(0, i);
        q.nodes.push_back(mid + half * es.eigenvalues()[i]);
        q.weights.push_back(2.0 * v * v * half);
    }
    return q;
}

QuadratureRule composite_gauss_legendre(int n, int pieces, double lo, double hi)
{
    if (pieces < 1)
        throw ValidationError("composite_gauss_legendre: pieces must be positive");
    QuadratureRule q;
    const double h = (hi - lo) / pieces;
    for (int k = 0; k < pieces; ++k) {
        const auto r = gauss_legendre(n, lo + k * h, lo + (k + 1) * h);
        q.nodes.insert(q.nodes.end(), r.nodes.begin(), r.nodes.end());
        q.weights.insert(q.weights.end(), r.weights.begin(), r.weights.end());
    }
    return q;
}

} // namespace cmcglue
