#include "bhpm/residual.hpp"

#include "bhpm/regions.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

namespace bhpm {

int natural_sign(const PotentialSpec& p) {
    if (!p.has_left_tail()) return 1;
    if (p.im_limit_plus > p.im_limit_minus) return 1;
    if (p.im_limit_plus < p.im_limit_minus) return -1;
    return p.value(1.0).imag() >= p.value(-1.0).imag() ? 1 : -1;
}

PseudomodeProblem problem_theorem1(const PotentialSpec& p, double alpha, double beta, int N, const GeometryOptions& opt) {
    if (!(beta > p.im_limit_minus && beta < p.im_limit_plus))
        throw Error(ErrorKind::regime, "beta outside the limits of Im V for " + p.id);
    PseudomodeProblem pr;
    pr.potential = p;
    pr.lambda = {alpha, beta};
    pr.N = N;
    pr.sign = natural_sign(p);
    pr.cutoff = cutoff_theorem1(p, alpha, opt);
    const Sigma1 s = theorem1_sigma(p, alpha, N, opt);
    pr.sigma_bound = std::pow(alpha, -(N + 1) / 4.0) + s.minus + s.plus;
    return pr;
}

PseudomodeProblem problem_decaying(const PotentialSpec& p, double alpha, double beta, int N, const GeometryOptions& opt) {
    PseudomodeProblem pr;
    pr.potential = p;
    pr.lambda = {alpha, beta};
    pr.N = N;
    pr.sign = natural_sign(p);
    pr.cutoff = cutoff_decaying(p, alpha, beta, opt);
    pr.sigma_bound = std::pow(alpha, -(N + 1) / 4.0);
    return pr;
}

PseudomodeProblem problem_theorem2(const PotentialSpec& p, double alpha, double beta, int N, double kappa_c) {
    const Theorem2Bounds b = theorem2_bounds(p, alpha, beta, N, kappa_c);
    PseudomodeProblem pr;
    pr.potential = p;
    pr.lambda = {alpha, beta};
    pr.N = N;
    pr.sign = 1;
    pr.cutoff = cutoff_theorem2(p, beta);
    pr.sigma_bound = b.kappa + b.sigma;
    return pr;
}

double semiclassical_width(const PotentialSpec& W, double x0, double mu, double cap) {
    const Jet w0 = W.eval_jet(x0, 1);
    const double s = w0.derivative(1).imag() > 0 ? 1 : -1;
    const cplx z = mu + w0[0];
    auto ok = [&](double d) {
        const int n = 256;
        for (int i = 1; i < n; ++i) {
            const double x = x0 - 2 * d + 4 * d * i / n;
            if (x == x0) continue;
            if (!W.in_domain(x)) return false;
            const cplx v = W.value(x);
            if (!(z.real() - v.real() > 0)) return false;
            if (s * (v.imag() - w0[0].imag()) * (x - x0) <= 0) return false;
        }
        return true;
    };
    for (double d = cap; d > 1e-6; d /= 2)
        if (ok(d)) return d;
    throw Error(ErrorKind::regime, "no neighbourhood of x0 where Im W - Im W(x0) changes sign once and Re(z - W) > 0");
}

PseudomodeProblem problem_semiclassical(const PotentialSpec& W, double x0, double mu, double h, int N, double width) {
    if (!(h > 0)) throw Error(ErrorKind::usage, "h must be positive");
    if (!(mu > 0)) throw Error(ErrorKind::usage, "mu must be positive");
    const Jet w = W.eval_jet(x0, 1);
    const double slope = w.derivative(1).imag();
    if (slope == 0) throw Error(ErrorKind::regime, "Im W' vanishes at x0");
    if (!(width > 0)) width = semiclassical_width(W, x0, mu);
    PseudomodeProblem pr;
    pr.potential = W;
    const cplx z = mu + w[0];
    const double h4 = h * h * h * h;
    pr.lambda = z / h4;
    pr.v_scale = 1 / h4;
    pr.out_scale = h4;
    pr.N = N;
    pr.sign = slope > 0 ? 1 : -1;
    pr.cutoff = cutoff_semiclassical(x0, width);
    pr.sigma_bound = std::pow(h, N + 1);
    return pr;
}

double LogNorm::log() const { return shift + std::log(scaled); }
double LogNorm::value() const { return std::exp(log()); }

namespace {

// Simpson on |f|^2 for possibly uneven pairs, trapezoid on a leftover interval.
double simpson_sq(const std::vector<double>& x, const std::vector<double>& la, double shift) {
    auto f = [&](size_t i) { return std::isfinite(la[i]) ? std::exp(2 * (la[i] - shift)) : 0.0; };
    const size_t n = x.size();
    double s = 0;
    size_t i = 0;
    for (; i + 2 < n; i += 2) {
        const double h0 = x[i + 1] - x[i], h1 = x[i + 2] - x[i + 1], H = h0 + h1;
        s += H / 6 * ((2 - h1 / h0) * f(i) + H * H / (h0 * h1) * f(i + 1) + (2 - h0 / h1) * f(i + 2));
    }
    if (i + 1 < n) s += 0.5 * (x[i + 1] - x[i]) * (f(i) + f(i + 1));
    return s;
}

} // namespace

LogNorm l2_norm(const std::vector<double>& grid, const std::vector<double>& log_abs) {
    if (grid.size() != log_abs.size() || grid.size() < 2) throw Error(ErrorKind::structural, "l2_norm needs matching grids of >= 2 points");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw Error(ErrorKind::structural, "l2_norm grid must increase strictly");
    LogNorm r;
    r.shift = *std::max_element(log_abs.begin(), log_abs.end());
    if (!std::isfinite(r.shift)) {
        r.shift = 0;
        r.scaled = 0;
        return r;
    }
    r.scaled = std::sqrt(std::max(0.0, simpson_sq(grid, log_abs, r.shift)));
    return r;
}

namespace {

// Everything needed at one grid point.
struct Node {
    double x = 0;
    cplx P1, P2, P3; // P', P'', P'''
    cplx R;
    std::array<cplx, 3> c{}; // c3, c2, c1
    RealJet xi;
    cplx V;
    cplx P; // cumulative from the anchor
};

Node evaluate(const PhaseExpansion& pe, const CutoffSpec& cs, double x) {
    Node n;
    n.x = x;
    const LocalPhase loc = pe.at(x);
    n.P1 = loc.dP[1];
    n.P2 = loc.dP[2];
    n.P3 = loc.dP[3];
    n.R = pe.remainder(loc).value;
    n.c = pe.conjugated_coeffs(loc);
    n.xi = bump(cs, x, 4);
    n.V = loc.V[0];
    return n;
}

// Quintic Hermite integral of f over [a, b] from f, f', f'' at the ends.
cplx hermite(const Node& a, const Node& b) {
    const double h = b.x - a.x;
    return h / 2 * (a.P1 + b.P1) + h * h / 10 * (a.P2 - b.P2) + h * h * h / 120 * (a.P3 + b.P3);
}

// log |(e^{-P} ...)|^2 integrands: 0 numerator, 1 cutoff term, 2 denominator
std::array<double, 3> log_integrands(const Node& n, double off) {
    const double lxi = n.xi[0] > 0 ? std::log(n.xi[0]) : -kInf;
    const cplx d = n.xi.derivative(4) + n.c[0] * n.xi.derivative(3) + n.c[1] * n.xi.derivative(2) + n.c[2] * n.xi.derivative(1);
    const cplx num = d + n.xi[0] * n.R;
    auto lg = [](cplx v) { return std::abs(v) > 0 ? 2 * std::log(std::abs(v)) : -kInf; };
    const double e = -2 * n.P.real() + 2 * off;
    return {lg(num) + e, lg(d) + e, 2 * lxi + e};
}

struct Built {
    std::vector<Node> nodes;
    std::vector<std::array<double, 3>> logs;
    std::array<double, 3> total{};     // Simpson sums with shift removed
    std::array<double, 3> shift{};     // max log integrand
    std::array<double, 3> gap{};       // sum of per-cell gaps (same scaling as total)
    double remainder_sup = 0;
};

void integrate_phase(std::vector<Node>& nodes, double anchor) {
    // anchor sits on a node by construction
    size_t k = 0;
    double best = kInf;
    for (size_t i = 0; i < nodes.size(); ++i)
        if (std::abs(nodes[i].x - anchor) < best) best = std::abs(nodes[i].x - anchor), k = i;
    nodes[k].P = 0;
    for (size_t i = k + 1; i < nodes.size(); ++i) nodes[i].P = nodes[i - 1].P + hermite(nodes[i - 1], nodes[i]);
    for (size_t i = k; i-- > 0;) nodes[i].P = nodes[i + 1].P - hermite(nodes[i], nodes[i + 1]);
}

std::vector<double> initial_boundaries(const PseudomodeProblem& pr, const GridOptions& o) {
    const CutoffSpec& c = pr.cutoff;
    std::vector<double> b;
    const int nb = std::max(2, o.base_cells);
    for (int i = 0; i <= nb; ++i) b.push_back(c.left + (c.right - c.left) * i / nb);
    const int nc = std::max(2, o.band_cells);
    for (int i = 0; i <= nc; ++i) {
        b.push_back(c.left + c.band_left * i / nc);
        b.push_back(c.plateau_right() + c.band_right * i / nc);
    }
    b.push_back(c.anchor);
    for (int k = 0; k < 60; ++k) {
        const double d = 1e-3 * std::ldexp(1.0, k);
        if (c.anchor - d > c.left) b.push_back(c.anchor - d);
        if (c.anchor + d < c.right) b.push_back(c.anchor + d);
    }
    for (double f : pr.potential.features)
        if (f > c.left && f < c.right) b.push_back(f);
    std::sort(b.begin(), b.end());
    std::vector<double> u;
    for (double v : b)
        if (u.empty() || v - u.back() > 1e-12 * std::max(1.0, std::abs(v))) u.push_back(v);
    return u;
}

Built build(const PseudomodeProblem& pr, const GridOptions& o) {
    PhaseExpansion pe(pr.potential, pr.lambda, pr.N, pr.sign, pr.v_scale);
    const CutoffSpec& cs = pr.cutoff;
    const auto bnd = initial_boundaries(pr, o);
    std::vector<Node> nodes;
    for (size_t i = 0; i + 1 < bnd.size(); ++i) {
        nodes.push_back(evaluate(pe, cs, bnd[i]));
        nodes.push_back(evaluate(pe, cs, 0.5 * (bnd[i] + bnd[i + 1])));
    }
    nodes.push_back(evaluate(pe, cs, bnd.back()));

    for (;;) {
        integrate_phase(nodes, cs.anchor);
        const size_t nn = nodes.size();
        std::vector<std::array<double, 3>> L(nn);
        for (size_t i = 0; i < nn; ++i) L[i] = log_integrands(nodes[i], o.log_offset);
        Built b;
        for (int q = 0; q < 3; ++q) {
            double m = -kInf;
            for (auto& l : L) m = std::max(m, l[size_t(q)]);
            b.shift[size_t(q)] = std::isfinite(m) ? m : 0;
        }
        const size_t ncell = (nn - 1) / 2;
        std::vector<std::array<double, 3>> simp(ncell), gaps(ncell);
        std::vector<double> pgap(ncell);
        for (size_t c = 0; c < ncell; ++c) {
            const Node &A = nodes[2 * c], &M = nodes[2 * c + 1], &B = nodes[2 * c + 2];
            const double w = B.x - A.x;
            for (int q = 0; q < 3; ++q) {
                auto f = [&](size_t i) {
                    const double v = L[i][size_t(q)];
                    return std::isfinite(v) ? std::exp(v - b.shift[size_t(q)]) : 0.0;
                };
                const double fa = f(2 * c), fm = f(2 * c + 1), fb = f(2 * c + 2);
                const double s = w / 6 * (fa + 4 * fm + fb);
                const double t = w / 4 * (fa + 2 * fm + fb);
                simp[c][size_t(q)] = s;
                gaps[c][size_t(q)] = std::abs(s - t);
                b.total[size_t(q)] += s;
            }
            const cplx whole = hermite(A, B), split = hermite(A, M) + hermite(M, B);
            pgap[c] = std::abs(whole.real() - split.real()) / std::max(1.0, std::abs(whole.real()));
        }
        std::vector<char> split(ncell, 0);
        size_t nsplit = 0;
        for (size_t c = 0; c < ncell; ++c) {
            const double w = nodes[2 * c + 2].x - nodes[2 * c].x;
            if (w < 1e-13 * std::max(1.0, std::abs(nodes[2 * c].x))) continue;
            bool bad = pgap[c] > o.phase_tol;
            for (int q = 0; q < 3 && !bad; ++q) {
                if (!(b.total[size_t(q)] > 0)) continue;
                // log of the scale this integrand is judged against; the cutoff term only
                // has to be accurate relative to the numerator it is part of
                double ref = std::log(b.total[size_t(q)]) + b.shift[size_t(q)];
                if (q == 1 && b.total[0] > 0) ref = std::max(ref, std::log(b.total[0]) + b.shift[0]);
                double cm = -kInf;
                for (size_t i = 2 * c; i <= 2 * c + 2; ++i) cm = std::max(cm, L[i][size_t(q)]);
                // negligible cells do not need resolving
                if (cm + std::log(w) < ref - o.skip_log) continue;
                bad = std::log(gaps[c][size_t(q)]) + b.shift[size_t(q)] > std::log(o.rel_tol) + ref;
            }
            if (bad) split[c] = 1, ++nsplit;
        }
        if (nsplit == 0) {
            for (size_t c = 0; c < ncell; ++c)
                for (int q = 0; q < 3; ++q) b.gap[size_t(q)] += gaps[c][size_t(q)];
            // Simpson totals recomputed so that they match l2_norm on the same samples
            b.nodes = std::move(nodes);
            b.logs = std::move(L);
            for (const Node& n : b.nodes)
                if (n.xi[0] > 0) b.remainder_sup = std::max(b.remainder_sup, std::abs(n.R));
            return b;
        }
        if (nn + 4 * nsplit > o.max_points) {
            std::ostringstream m;
            m << "adaptive grid for lambda = " << pr.lambda << " needs more than " << o.max_points << " points";
            throw Error(ErrorKind::accuracy, m.str());
        }
        std::vector<Node> next;
        next.reserve(nn + 2 * nsplit);
        for (size_t c = 0; c < ncell; ++c) {
            const Node &A = nodes[2 * c], &M = nodes[2 * c + 1];
            const Node& B = nodes[2 * c + 2];
            next.push_back(A);
            if (split[c]) {
                next.push_back(evaluate(pe, cs, 0.5 * (A.x + M.x)));
                next.push_back(M);
                next.push_back(evaluate(pe, cs, 0.5 * (M.x + B.x)));
            } else {
                next.push_back(M);
            }
        }
        next.push_back(nodes.back());
        nodes = std::move(next);
    }
}

} // namespace

SampledPseudomode assemble(const PseudomodeProblem& prob, const GridOptions& opt) {
    const Built b = build(prob, opt);
    SampledPseudomode s;
    s.grid.reserve(b.nodes.size());
    for (size_t i = 0; i < b.nodes.size(); ++i) {
        const Node& n = b.nodes[i];
        s.grid.push_back(n.x);
        s.log_magnitude.push_back(0.5 * b.logs[i][2]);
        s.phase.push_back(-n.P.imag());
    }
    s.normalization_shift = *std::max_element(s.log_magnitude.begin(), s.log_magnitude.end());
    return s;
}

ResidualReport residual_analytic(const PseudomodeProblem& prob, const GridOptions& opt) {
    const Built b = build(prob, opt);
    ResidualReport r;
    r.lambda = prob.lambda;
    r.N = prob.N;
    r.regime = to_string(prob.cutoff.regime);
    r.sigma_bound = prob.sigma_bound;
    r.grid_size = b.nodes.size();
    if (!(b.total[2] > 0)) throw Error(ErrorKind::accuracy, "pseudomode norm vanished on the grid");
    auto ratio = [&](int q) {
        if (!(b.total[size_t(q)] > 0)) return 0.0;
        return std::sqrt(b.total[size_t(q)] / b.total[2]) * std::exp(0.5 * (b.shift[size_t(q)] - b.shift[2]));
    };
    r.ratio_analytic = ratio(0) * prob.out_scale;
    r.bound_cutoff_term = ratio(1) * prob.out_scale;
    r.bound_remainder_term = b.remainder_sup * prob.out_scale;
    double err = 0;
    for (int q = 0; q < 3; ++q) {
        if (!(b.total[size_t(q)] > 0)) continue;
        double rel = b.gap[size_t(q)] / b.total[size_t(q)];
        if (q == 1 && b.total[0] > 0)
            rel = std::min(rel, b.gap[1] / b.total[0] * std::exp(b.shift[1] - b.shift[0]));
        err = std::max(err, rel);
    }
    r.quadrature_error_estimate = err;
    r.log_norm = 0.5 * (std::log(b.total[2]) + b.shift[2]);
    return r;
}

std::optional<double> residual_direct(const PseudomodeProblem& prob, const DirectOptions& opt) {
    using ld = long double;
    using cld = std::complex<long double>;
    PhaseExpansion pe(prob.potential, prob.lambda, prob.N, prob.sign, prob.v_scale);
    const CutoffSpec& cs = prob.cutoff;

    // coarse pass: largest |P'| and lowest Re P over the support
    const int nc = 4096;
    double maxp = 0;
    std::vector<Node> coarse;
    for (int i = 0; i <= nc; ++i) {
        const double x = cs.left + (cs.right - cs.left) * i / nc;
        Node n;
        n.x = x;
        const LocalPhase loc = pe.at(x);
        n.P1 = loc.dP[1];
        n.P2 = loc.dP[2];
        n.P3 = loc.dP[3];
        maxp = std::max(maxp, std::abs(n.P1));
        coarse.push_back(n);
    }
    Node an;
    {
        const LocalPhase loc = pe.at(cs.anchor);
        an.x = cs.anchor;
        an.P1 = loc.dP[1];
        an.P2 = loc.dP[2];
        an.P3 = loc.dP[3];
    }
    // Re P on the coarse grid, integrated from the anchor
    double minre = 0;
    {
        size_t k = size_t(std::clamp((cs.anchor - cs.left) / (cs.right - cs.left) * nc, 0.0, double(nc)));
        cplx P = -hermite(coarse[k], an);
        std::vector<cplx> Pc(coarse.size());
        Pc[k] = P;
        for (size_t i = k + 1; i < coarse.size(); ++i) Pc[i] = Pc[i - 1] + hermite(coarse[i - 1], coarse[i]);
        for (size_t i = k; i-- > 0;) Pc[i] = Pc[i + 1] - hermite(coarse[i], coarse[i + 1]);
        for (size_t i = 0; i < coarse.size(); ++i)
            if (bump(cs, coarse[i].x, 0)[0] > 0) minre = std::min(minre, Pc[i].real());
    }

    const double h = std::min(2 * M_PI / (std::max(maxp, 1e-300) * opt.points_per_wavelength),
                              std::min(cs.band_left, cs.band_right) / opt.points_per_band);
    const long i0 = long(std::floor((cs.left - cs.anchor) / h)) - 5;
    const long i1 = long(std::ceil((cs.right - cs.anchor) / h)) + 5;
    const std::size_t n = std::size_t(i1 - i0 + 1);
    if (n > opt.max_points) return std::nullopt;

    // march outward from the anchor so P accumulates in long double
    auto node_at = [&](double x) {
        Node m;
        m.x = x;
        const LocalPhase loc = pe.at(x);
        m.P1 = loc.dP[1];
        m.P2 = loc.dP[2];
        m.P3 = loc.dP[3];
        return m;
    };
    std::vector<cld> psi(n);
    const ld shift = ld(minre) + ld(opt.log_offset);
    auto fill = [&](long i, double x, cld P) {
        const double xi = bump(cs, x, 0)[0];
        psi[std::size_t(i - i0)] = xi > 0 ? cld(xi) * std::exp(-P + cld(shift)) : cld(0);
    };
    for (int dir : {1, -1}) {
        Node prev = node_at(cs.anchor);
        cld P = 0;
        if (dir > 0) fill(0, cs.anchor, P);
        for (long i = dir; dir > 0 ? i <= i1 : i >= i0; i += dir) {
            const double x = cs.anchor + double(i) * h;
            if (x <= cs.left || x >= cs.right) {
                psi[std::size_t(i - i0)] = 0;
                continue;
            }
            Node cur = node_at(x);
            const cplx d = dir > 0 ? hermite(prev, cur) : -hermite(cur, prev);
            P += cld(d.real(), d.imag());
            fill(i, x, P);
            prev = cur;
        }
    }
    ld num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) den += std::norm(psi[i]);
    for (std::size_t i = 5; i + 5 < n; ++i) {
        if (psi[i - 5] == cld(0) && psi[i + 5] == cld(0) && psi[i] == cld(0)) continue;
        const double x = cs.anchor + double(long(i) + i0) * h;
        const cplx vml = pe.potential_jet(x, 0)[0] - prob.lambda;
        const cld r = fourth_derivative_stencil<cld>(psi, i, h) + cld(vml.real(), vml.imag()) * psi[i];
        num += std::norm(r);
    }
    if (!(den > 0)) return std::nullopt;
    return double(std::sqrt(num / den)) * prob.out_scale;
}

ResidualReport residual_both(const PseudomodeProblem& prob, const GridOptions& g, const DirectOptions& d) {
    ResidualReport r = residual_analytic(prob, g);
    r.ratio_direct = residual_direct(prob, d);
    return r;
}

FitResult fit_decay_exponent(const std::vector<std::pair<double, double>>& sweep) {
    if (sweep.size() < 5) throw Error(ErrorKind::data, "fit needs at least 5 points");
    for (const auto& [s, v] : sweep)
        if (!(s > 0) || !(v > 0) || !std::isfinite(v)) throw Error(ErrorKind::data, "fit needs positive finite scales and ratios");
    auto fit = [](const std::vector<std::pair<double, double>>& pts) {
        const double n = double(pts.size());
        double sx = 0, sy = 0;
        for (const auto& [s, v] : pts) sx += std::log(s), sy += std::log(v);
        const double mx = sx / n, my = sy / n;
        double sxx = 0, sxy = 0, syy = 0;
        for (const auto& [s, v] : pts) {
            const double dx = std::log(s) - mx, dy = std::log(v) - my;
            sxx += dx * dx;
            sxy += dx * dy;
            syy += dy * dy;
        }
        if (!(sxx > 0)) throw Error(ErrorKind::data, "fit needs at least two distinct scales");
        FitResult f;
        f.slope = sxy / sxx;
        f.intercept = my - f.slope * mx;
        f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
        f.used = pts.size();
        return f;
    };
    FitResult f = fit(sweep);
    if (f.r2 < 0.99) {
        double lo = kInf;
        for (const auto& [s, v] : sweep) lo = std::min(lo, s);
        std::vector<std::pair<double, double>> kept;
        for (const auto& pt : sweep)
            if (pt.first >= 10 * lo) kept.push_back(pt);
        if (kept.size() >= 3) {
            f = fit(kept);
            f.dropped_below = 10 * lo;
        }
    }
    return f;
}

} // namespace bhpm
