#include "bhpm/cutoff.hpp"

#include "bhpm/smooth_step.hpp"

#include <algorithm>
#include <cmath>

namespace bhpm {

std::string to_string(Regime r) {
    switch (r) {
    case Regime::theorem1: return "theorem1";
    case Regime::theorem1_decaying: return "theorem1-decaying";
    case Regime::theorem2: return "theorem2";
    case Regime::semiclassical: return "semiclassical";
    }
    return "?";
}

Regime regime_from_string(const std::string& s) {
    for (Regime r : {Regime::theorem1, Regime::theorem1_decaying, Regime::theorem2, Regime::semiclassical})
        if (to_string(r) == s) return r;
    throw Error(ErrorKind::usage, "unknown regime '" + s + "'");
}

double eta1_from_eps(double eps1) { return eps1 / (4 + eps1); }
double eta2_from_eps(double eps2) { return 9 * eps2 / (4 - 3 * eps2); }

namespace {

double tau_side(const PotentialSpec& p, int side, double x) { return side > 0 ? p.tau_plus(x) : p.tau_minus(x); }

// log(|Im V(s x)| / tau(s x)) - target; increasing in x on a tail by assumption
double log_g_gap(const PotentialSpec& p, int side, double x, double target) {
    const double y = side * x;
    return std::log(std::abs(p.value(y).imag())) - std::log(tau_side(p, side, y)) - target;
}

double unbounded_root(const PotentialSpec& p, int side, double alpha, const GeometryOptions& opt) {
    const double c = (3 + opt.eps1) / (4 + opt.eps1);
    const double target = c * std::log(alpha);
    const double cap = side > 0 ? p.tail_cap_plus : p.tail_cap_minus;
    if (!(log_g_gap(p, side, 0.0, target) < 0))
        throw Error(ErrorKind::regime, "alpha does not exceed g(0) on the " + std::string(side > 0 ? "+" : "-") + " side");
    double lo = 0, hi = 1e-3;
    while (!(log_g_gap(p, side, hi, target) >= 0)) {
        lo = hi;
        hi *= 2;
        if (hi > cap)
            throw Error(ErrorKind::geometry, "no root of g = alpha below the tail cap of " + p.id);
    }
    for (int i = 0; i < opt.bisections; ++i) {
        const double mid = 0.5 * (lo + hi);
        (log_g_gap(p, side, mid, target) >= 0 ? hi : lo) = mid;
    }
    return hi;
}

} // namespace

double eta_dyadic(const PotentialSpec& p, int side) {
    const double nu = side > 0 ? p.nu_plus : p.nu_minus;
    double m = kInf;
    for (double x : tail_points(p, side)) {
        const double ax = std::abs(x);
        m = std::min(m, std::log(tau_side(p, side, x)) - nu * std::log(ax) - std::log(4.0));
    }
    return std::exp2(std::floor(m / std::log(2.0)));
}

Boundaries solve_boundary_theorem1(const PotentialSpec& p, double alpha, const GeometryOptions& opt) {
    if (!p.has_left_tail()) throw Error(ErrorKind::regime, p.id + " lives on a half-line; large-Re-lambda geometry needs both tails");
    if (!(opt.eps2 > 0 && opt.eps2 < 1.0 / 3)) throw Error(ErrorKind::usage, "eps2 must lie in (0, 1/3)");
    if (!(opt.eps1 > 0)) throw Error(ErrorKind::usage, "eps1 must be positive");
    if (!(alpha > 0)) throw Error(ErrorKind::regime, "alpha must be positive");
    Boundaries b;
    for (int side : {-1, 1}) {
        const bool bounded = side > 0 ? p.bounded_plus : p.bounded_minus;
        double delta, width;
        if (bounded) {
            delta = std::pow(alpha, 3 / (4 - 3 * opt.eps2));
            width = delta / 4;
        } else {
            delta = unbounded_root(p, side, alpha, opt);
            width = std::min(eta_dyadic(p, side) / tau_side(p, side, side * delta), delta / 4);
        }
        (side > 0 ? b.delta_plus : b.delta_minus) = delta;
        (side > 0 ? b.width_plus : b.width_minus) = width;
    }
    return b;
}

double solve_turning_point(const PotentialSpec& p, double beta) {
    auto f = [&](double x) { return p.value(x).imag() - beta; };
    double hi = 1;
    while (!(f(hi) > 0)) {
        hi *= 2;
        if (hi > p.tail_cap_plus) throw Error(ErrorKind::geometry, "Im V stays below beta up to the tail cap of " + p.id);
    }
    double lo = hi / 2;
    while (!(f(lo) < 0)) {
        lo /= 2;
        if (lo < 1e-300 || !p.in_domain(lo)) throw Error(ErrorKind::geometry, "no turning point x_beta > 0 for beta = " + std::to_string(beta));
    }
    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) < 0 ? lo : hi) = mid;
    }
    return std::abs(f(lo)) < std::abs(f(hi)) ? lo : hi;
}

double width_theorem2(const PotentialSpec& p, double x_beta) {
    const double eta = eta_dyadic(p, 1);
    const double tau = p.tau_plus(x_beta);
    if (eta / tau > std::pow(x_beta, -p.nu_plus) / 4 * (1 + 1e-12))
        throw Error(ErrorKind::geometry, "eta/tau(x) <= x^-nu/4 fails at x_beta; increase beta");
    const double d = eta / tau;
    if (x_beta - 2 * d < x_beta / 2) throw Error(ErrorKind::geometry, "support of the pseudomode leaves (x_beta/2, inf)");
    return d;
}

double decaying_admissibility(double alpha, double beta, double gamma) {
    return std::abs(beta) * std::pow(alpha, 0.75 * gamma / (1 - gamma));
}

Boundaries solve_boundary_decaying(const PotentialSpec& p, double alpha, double beta, const GeometryOptions& opt) {
    if (p.family != "decay") throw Error(ErrorKind::regime, p.id + " is not a decaying potential");
    const double g = p.params.at("gamma");
    const double q = decaying_admissibility(alpha, beta, g);
    if (!(q < opt.decay_threshold))
        throw Error(ErrorKind::regime, "|beta| alpha^(3g/(4(1-g))) = " + std::to_string(q) + " is not small");
    Boundaries b;
    b.delta_plus = b.delta_minus = beta != 0 ? std::pow(alpha, 0.75) / std::abs(beta) : std::pow(alpha, 1 / (1 - g));
    b.width_plus = b.width_minus = b.delta_plus / 4;
    return b;
}

namespace {
CutoffSpec from_boundaries(Regime r, const Boundaries& b) {
    CutoffSpec s;
    s.regime = r;
    s.left = -b.delta_minus;
    s.right = b.delta_plus;
    s.band_left = b.width_minus;
    s.band_right = b.width_plus;
    s.anchor = 0;
    return s;
}
} // namespace

CutoffSpec cutoff_theorem1(const PotentialSpec& p, double alpha, const GeometryOptions& opt) {
    return from_boundaries(Regime::theorem1, solve_boundary_theorem1(p, alpha, opt));
}

CutoffSpec cutoff_decaying(const PotentialSpec& p, double alpha, double beta, const GeometryOptions& opt) {
    return from_boundaries(Regime::theorem1_decaying, solve_boundary_decaying(p, alpha, beta, opt));
}

CutoffSpec cutoff_theorem2(const PotentialSpec& p, double beta) {
    const double xb = solve_turning_point(p, beta);
    const double d = width_theorem2(p, xb);
    CutoffSpec s;
    s.regime = Regime::theorem2;
    s.left = xb - 2 * d;
    s.right = xb + 2 * d;
    s.band_left = s.band_right = d;
    s.anchor = xb;
    return s;
}

CutoffSpec cutoff_semiclassical(double x0, double width) {
    if (!(width > 0)) throw Error(ErrorKind::usage, "semiclassical width must be positive");
    CutoffSpec s;
    s.regime = Regime::semiclassical;
    s.left = x0 - 2 * width;
    s.right = x0 + 2 * width;
    s.band_left = s.band_right = width;
    s.anchor = x0;
    return s;
}

RealJet bump(const CutoffSpec& spec, double x, int max_deriv) {
    if (max_deriv < 0 || max_deriv > 4) throw Error(ErrorKind::structural, "bump derivatives are available up to order 4");
    if (x <= spec.left || x >= spec.right) return RealJet::zero(x, max_deriv);
    if (x >= spec.plateau_left() && x <= spec.plateau_right()) return RealJet::one(x, max_deriv);
    const RealJet v = RealJet::variable(x, max_deriv);
    if (x < spec.plateau_left()) return smooth_step((v + (-spec.left)) * (1 / spec.band_left));
    return smooth_step((-v + spec.right) * (1 / spec.band_right));
}

const std::array<double, 5>& step_constants() {
    static const std::array<double, 5> c = [] {
        std::array<double, 5> m{};
        for (int i = 1; i < 4000; ++i) {
            const RealJet s = smooth_step(RealJet::variable(i / 4000.0, 4));
            for (int j = 0; j <= 4; ++j) m[size_t(j)] = std::max(m[size_t(j)], std::abs(s.derivative(j)));
        }
        return m;
    }();
    return c;
}

} // namespace bhpm
