#include "cmcglue/smoothstep.hpp"
#include "cmcglue/types.hpp"

#include <algorithm>
#include <cmath>

namespace cmcglue {

namespace {

double E(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }


} // namespace

double Psi(double s)
{
    if (s <= -1.0)
        return 0.0;
    if (s >= 1.0)
        return 1.0;
    const double x = 0.5 * (s + 1.0);
    const double e0 = E(x);
    const double e1 = E(1.0 - x);
    return e0 / (e0 + e1);
}

namespace {

// Psi((2x - 1)) = 1 / (1 + e^{phi(x)}), phi(x) = 1/x - 1/(1-x); returns G, G', G'' in x.
void sigmoid_form(double x, double& G, double& G1, double& G2)
{
    const double phi = 1.0 / x - 1.0 / (1.0 - x);
    const double phi1 = -1.0 / (x * x) - 1.0 / ((1.0 - x) * (1.0 - x));
    const double phi2 = 2.0 / (x * x * x) - 2.0 / ((1.0 - x) * (1.0 - x) * (1.0 - x));
    const double c = std::cosh(0.5 * phi);
    const double gg = std::isfinite(c) ? 1.0 / (4.0 * c * c) : 0.0; // G (1 - G)
    G = phi > 0.0 ? std::exp(-phi) / (1.0 + std::exp(-phi)) : 1.0 / (1.0 + std::exp(phi));
    G1 = -gg * phi1;
    G2 = -G1 * (1.0 - 2.0 * G) * phi1 - gg * phi2;
}

} // namespace

double Psi_prime(double s)
{
    if (s <= -1.0 || s >= 1.0)
        return 0.0;
    double G, G1, G2;
    sigmoid_form(0.5 * (s + 1.0), G, G1, G2);
    return 0.5 * G1;
}

double Psi_second(double s)
{
    if (s <= -1.0 || s >= 1.0)
        return 0.0;
    double G, G1, G2;
    sigmoid_form(0.5 * (s + 1.0), G, G1, G2);
    return 0.25 * G2;
}

double psi(double a, double b, double x)
{
    if (a == b)
        throw ValidationError("psi: endpoints must differ");
    const double L = -3.0 + 6.0 * (x - a) / (b - a);
    return Psi(L);
}

double psi_prime(double a, double b, double x)
{
    if (a == b)
        throw ValidationError("psi: endpoints must differ");
    const double L = -3.0 + 6.0 * (x - a) / (b - a);
    return Psi_prime(L) * 6.0 / (b - a);
}

double psi_second(double a, double b, double x)
{
    if (a == b)
        throw ValidationError("psi: endpoints must differ");
    const double L = -3.0 + 6.0 * (x - a) / (b - a);
    const double d = 6.0 / (b - a);
    return Psi_second(L) * d * d;
}

Cutoff::Cutoff(double a_, double b_) : a(a_), b(b_)
{
    if (a == b)
        throw ValidationError("Cutoff: endpoints must differ");
}

double discrete_norm(const Field1D& u, int k, const std::vector<double>& weight, double scale)
{
    const int n = static_cast<int>(u.values.size());
    if (k < 0 || k > 2)
        throw ValidationError("discrete_norm: order must be 0, 1 or 2");
    if (n < 2 * k + 1)
        throw ValidationError("discrete_norm: grid too coarse for requested order");
    if (static_cast<int>(weight.size()) != n)
        throw ValidationError("discrete_norm: weight size mismatch");
    const auto& v = u.values;
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = std::abs(v[i]);
        if (k >= 1) {
            double d1;
            if (i == 0)
                d1 = (v[1] - v[0]) / u.h;
            else if (i == n - 1)
                d1 = (v[n - 1] - v[n - 2]) / u.h;
            else
                d1 = (v[i + 1] - v[i - 1]) / (2.0 * u.h);
            s += scale * std::abs(d1);
        }
        if (k >= 2) {
            const int c = std::clamp(i, 1, n - 2);
            const double d2 = (v[c + 1] - 2.0 * v[c] + v[c - 1]) / (u.h * u.h);
            s += scale * scale * std::abs(d2);
        }
        sup = std::max(sup, s / weight[i]);
    }
    return sup;
}

double discrete_norm(const Field2D& u, int k, const std::vector<double>& weight, double scale)
{
    if (k < 0 || k > 2)
        throw ValidationError("discrete_norm: order must be 0, 1 or 2");
    if (u.nt < 2 * k + 1 || (k > 0 && u.nth < 3))
        throw ValidationError("discrete_norm: grid too coarse for requested order");
    if (weight.size() != u.values.size())
        throw ValidationError("discrete_norm: weight size mismatch");
    const int nt = u.nt, nth = u.nth;
    auto wrap = [nth](int j) { return (j % nth + nth) % nth; };
    double sup = 0.0;
    for (int i = 0; i < nt; ++i) {
        const int c = std::clamp(i, 1, nt - 2);
        for (int j = 0; j < nth; ++j) {
            double s = std::abs(u.at(i, j));
            if (k >= 1) {
                double dt;
                if (i == 0)
                    dt = (u.at(1, j) - u.at(0, j)) / u.ht;
                else if (i == nt - 1)
                    dt = (u.at(nt - 1, j) - u.at(nt - 2, j)) / u.ht;
                else
                    dt = (u.at(i + 1, j) - u.at(i - 1, j)) / (2.0 * u.ht);
                const double dth = (u.at(i, wrap(j + 1)) - u.at(i, wrap(j - 1))) / (2.0 * u.hth);
                s += scale * (std::abs(dt) + std::abs(dth));
            }
            if (k >= 2) {
                const double dtt = (u.at(c + 1, j) - 2.0 * u.at(c, j) + u.at(c - 1, j)) / (u.ht * u.ht);
                const double dhh = (u.at(i, wrap(j + 1)) - 2.0 * u.at(i, j) + u.at(i, wrap(j - 1))) / (u.hth * u.hth);
                const double dth = (u.at(c + 1, wrap(j + 1)) - u.at(c + 1, wrap(j - 1)) - u.at(c - 1, wrap(j + 1))
                                    + u.at(c - 1, wrap(j - 1)))
                                   / (4.0 * u.ht * u.hth);
                s += scale * scale * (std::abs(dtt) + 2.0 * std::abs(dth) + std::abs(dhh));
            }
            sup = std::max(sup, s / weight[static_cast<size_t>(i) * nth + j]);
        }
    }
    return sup;
}

} // namespace cmcglue
