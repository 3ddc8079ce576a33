#include "chebyshev.hpp"

#include <algorithm>
#include <cmath>

namespace cmcglue::detail {

Chebyshev::Chebyshev(double a, double b, std::vector<double> coeffs) : a_(a), b_(b), c_(std::move(coeffs)) {}

namespace {

std::vector<double> coefficients(const std::vector<double>& vals)
{
    // vals at x_j = cos(pi j / n), j = 0..n
    const int n = static_cast<int>(vals.size()) - 1;
    std::vector<double> c(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        double s = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double wj = (j == 0 || j == n) ? 0.5 : 1.0;
            s += wj * vals[j] * std::cos(M_PI * k * j / n);
        }
        c[k] = 2.0 * s / n;
    }
    c[0] *= 0.5;
    c[n] *= 0.5;
    return c;
}

} // namespace

Chebyshev Chebyshev::fit(const std::function<double(double)>& f, double a, double b, double tol, int max_n,
                         bool* converged)
{
    std::vector<double> c;
    bool ok = false;
    for (int n = 16; n <= max_n; n *= 2) {
        std::vector<double> vals(n + 1);
        for (int j = 0; j <= n; ++j) {
            const double x = std::cos(M_PI * j / n);
            vals[j] = f(0.5 * (a + b) + 0.5 * (b - a) * x);
        }
        c = coefficients(vals);
        double cmax = 0.0;
        for (double v : c)
            cmax = std::max(cmax, std::abs(v));
        double tail = 0.0;
        for (int k = n - 3; k <= n; ++k)
            tail = std::max(tail, std::abs(c[k]));
        if (tail <= tol * std::max(cmax, 1e-300)) {
            ok = true;
            break;
        }
    }
    if (converged)
        *converged = ok;
    while (c.size() > 2 && c.back() == 0.0)
        c.pop_back();
    return Chebyshev(a, b, std::move(c));
}

double Chebyshev::operator()(double x) const
{
    const double y = (2.0 * x - a_ - b_) / (b_ - a_);
    double b1 = 0.0, b2 = 0.0;
    for (int k = static_cast<int>(c_.size()) - 1; k >= 1; --k) {
        const double t = 2.0 * y * b1 - b2 + c_[k];
        b2 = b1;
        b1 = t;
    }
    return y * b1 - b2 + c_[0];
}

Chebyshev Chebyshev::integral() const
{
    const int n = static_cast<int>(c_.size());
    std::vector<double> C(n + 1, 0.0);
    const double scale = 0.5 * (b_ - a_);
    for (int k = 1; k <= n; ++k) {
        const double cm = c_[k - 1] * (k == 1 ? 2.0 : 1.0);
        const double cp = (k + 1 < n) ? c_[k + 1] : 0.0;
        C[k] = scale * (cm - cp) / (2.0 * k);
    }
    Chebyshev out(a_, b_, C);
    const double at_a = out(a_);
    out.c_[0] -= at_a;
    return out;
}

Chebyshev Chebyshev::derivative() const
{
    const int n = static_cast<int>(c_.size());
    if (n <= 1)
        return Chebyshev(a_, b_, {0.0});
    std::vector<double> d(n, 0.0);
    for (int k = n - 2; k >= 0; --k)
        d[k] = (k + 2 < n ? d[k + 2] : 0.0) + 2.0 * (k + 1) * c_[k + 1];
    d[0] *= 0.5;
    const double scale = 2.0 / (b_ - a_);
    for (double& v : d)
        v *= scale;
    d.pop_back();
    return Chebyshev(a_, b_, d);
}

} // namespace cmcglue::detail
