#include "bhpm/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace bhpm {

namespace {

GaussRule build_rule(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1, p1 = z;
            dp = n * (z * p1 - p0) / (z * z - 1);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.x[i] = z;
        r.w[i] = 2 / ((1 - z * z) * dp * dp);
    }
    return r;
}

cplx panel(const std::function<cplx(double)>& f, double a, double b, const GaussRule& g) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx s{};
    for (size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
    return s * h;
}

void recurse(const std::function<cplx(double)>& f, double a, double b, cplx whole, double atol, double rtol,
             double min_width, int depth, QuadResult& out, const GaussRule& g) {
    const double m = 0.5 * (a + b);
    cplx left = panel(f, a, m, g), right = panel(f, m, b, g);
    cplx fine = left + right;
    double err = std::abs(fine - whole);
    if (err <= std::max(atol, rtol * std::abs(fine)) || depth >= 50 || (b - a) <= min_width) {
        if (err > std::max(atol, rtol * std::abs(fine))) out.converged = false;
        out.value += fine;
        out.error += err;
        return;
    }
    recurse(f, a, m, left, 0.5 * atol, rtol, min_width, depth + 1, out, g);
    recurse(f, m, b, right, 0.5 * atol, rtol, min_width, depth + 1, out, g);
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

QuadResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b, double atol, double rtol,
                              double min_width) {
    QuadResult out;
    out.converged = true;
    if (a == b) return out;
    const auto& g = gauss_legendre(15);
    recurse(f, a, b, panel(f, a, b, g), atol, rtol, min_width, 0, out, g);
    return out;
}

} // namespace bhpm
