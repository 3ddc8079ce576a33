#pragma once

#include <functional>
#include <vector>

namespace cmcglue::detail {

// Chebyshev series on [a, b].
class Chebyshev
{
public:
    Chebyshev() = default;
    Chebyshev(double a, double b, std::vector<double> coeffs);

    // Adaptive fit: doubles the degree until the trailing coefficients fall below tol * max|c|.
    static Chebyshev fit(const std::function<double(double)>& f, double a, double b, double tol, int max_n,
                         bool* converged = nullptr);

    double operator()(double x) const;
    Chebyshev integral() const; // antiderivative vanishing at a
    Chebyshev derivative() const;

    double lower() const { return a_; }
    double upper() const { return b_; }
    int size() const { return static_cast<int>(c_.size()); }

private:
    double a_ = 0.0;
    double b_ = 1.0;
    std::vector<double> c_;
};

} // namespace cmcglue::detail
