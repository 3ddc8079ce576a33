#pragma once

#include <vector>

namespace cmcglue {

struct LinearFit
{
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Least-squares line through (x, y).
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Exponent of y ~ C x^k from a fit of log y against log x; nonpositive y are rejected.
LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

} // namespace cmcglue
