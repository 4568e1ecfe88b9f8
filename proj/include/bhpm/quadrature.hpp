#pragma once

#include "bhpm/jet.hpp"

#include <functional>
#include <vector>

namespace bhpm {

// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussRule {
    std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int n);

struct QuadResult {
    cplx value{};
    double error = 0;
    bool converged = false;
};

// Adaptive composite Gauss-Legendre: 15-point panels compared against the two
// halves, recursive bisection until |coarse - fine| <= max(atol, rtol |fine|) or the
// panel shrinks below min_width.
QuadResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b, double atol = 1e-10,
                              double rtol = 1e-10, double min_width = 0);

} // namespace bhpm
