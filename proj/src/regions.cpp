#include "bhpm/regions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace bhpm {

namespace {

struct Example {
    std::string kind; // log, poly, superexp2, decay
    double gamma = 0;
};

Example parse_example(const std::string& s) {
    Example e;
    const auto colon = s.find(':');
    e.kind = s.substr(0, colon);
    if (e.kind == "ilog") e.kind = "log";
    if (e.kind == "poly" || e.kind == "decay") {
        if (colon == std::string::npos) throw Error(ErrorKind::usage, "example '" + s + "' needs gamma=...");
        const std::string rest = s.substr(colon + 1);
        if (rest.rfind("gamma=", 0) != 0) throw Error(ErrorKind::usage, "example '" + s + "' needs gamma=...");
        try {
            e.gamma = std::stod(rest.substr(6));
        } catch (const std::exception&) {
            throw Error(ErrorKind::usage, "bad gamma in '" + s + "'");
        }
        if (e.kind == "poly" && !(e.gamma > 0)) throw Error(ErrorKind::usage, "poly example needs gamma > 0");
        if (e.kind == "decay" && !(e.gamma > 0 && e.gamma < 1)) throw Error(ErrorKind::usage, "decay example needs 0 < gamma < 1");
    } else if (e.kind != "log" && e.kind != "superexp2") {
        throw Error(ErrorKind::usage, "unknown region example '" + s + "'");
    }
    return e;
}

double decay_exponent(double g, double eps) { return -0.75 * g / (1 - g) - eps; }

std::string fmt(double v) {
    std::ostringstream o;
    o << std::setprecision(6) << v;
    return o.str();
}

std::string closed_form(const Example& e, bool upper, double eps) {
    if (e.kind == "log")
        return upper ? "alpha = beta^(" + fmt(4.0 / 3 - eps) + ") exp(" + fmt(4.0 / 3 - eps) + " beta)"
                     : "alpha = beta^(4/5) exp(-4 beta/5)";
    if (e.kind == "poly") {
        const double lo = 0.8 * (1 - 1 / e.gamma) + (e.gamma > 1 ? eps : 0);
        const double hi = 4.0 / 3 * (1 + 1 / e.gamma) - eps;
        return "alpha = beta^(" + fmt(upper ? hi : lo) + ")";
    }
    if (e.kind == "superexp2")
        return upper ? "alpha = (beta/ln beta)^(" + fmt(4.0 / 3 - eps) + ")"
                     : "alpha = beta^(" + fmt(0.8 + eps) + ") ln(beta)^(4/5)";
    const double q = decay_exponent(e.gamma, eps);
    return std::string(upper ? "beta = " : "beta = -") + "alpha^(" + fmt(q) + ")";
}

std::vector<double> geometric(double lo, double hi, int n) {
    if (!(lo > 0 && hi > lo) || n < 2) throw Error(ErrorKind::usage, "need 0 < lo < hi and n >= 2");
    std::vector<double> t(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) t[size_t(i)] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return t;
}

} // namespace

RegionPair omega_band(const PotentialSpec& p, double beta_minus, double beta_plus, double alpha_min, double alpha_max,
                      int n) {
    if (!(beta_minus >= 0 && beta_plus >= 0)) throw Error(ErrorKind::usage, "beta_minus and beta_plus must be >= 0");
    if (!(-beta_minus > p.im_limit_minus && beta_plus < p.im_limit_plus))
        throw Error(ErrorKind::regime, "band [-" + fmt(beta_minus) + ", " + fmt(beta_plus) + "] is not inside (" +
                                           fmt(p.im_limit_minus) + ", " + fmt(p.im_limit_plus) + ")");
    RegionPair r;
    r.by_beta = false;
    r.lower.label = "beta = -beta_minus";
    r.upper.label = "beta = beta_plus";
    r.lower.closed_form = "beta = " + fmt(-beta_minus);
    r.upper.closed_form = "beta = " + fmt(beta_plus);
    for (double a : geometric(alpha_min, alpha_max, n)) {
        r.lower.samples.emplace_back(a, -beta_minus);
        r.upper.samples.emplace_back(a, beta_plus);
    }
    return r;
}

double omega_lower(const std::string& example, double t, double eps) {
    const Example e = parse_example(example);
    if (e.kind == "log") return std::pow(t, 0.8) * std::exp(-0.8 * t);
    if (e.kind == "poly") return std::pow(t, 0.8 * (1 - 1 / e.gamma) + (e.gamma > 1 ? eps : 0));
    if (e.kind == "superexp2") {
        if (!(t > 1)) throw Error(ErrorKind::usage, "superexp2 curves need beta > 1");
        return std::pow(t, 0.8 + eps) * std::pow(std::log(t), 0.8);
    }
    return -std::pow(t, decay_exponent(e.gamma, eps));
}

double omega_upper(const std::string& example, double t, double eps) {
    const Example e = parse_example(example);
    const double k = 4.0 / 3 - eps;
    if (e.kind == "log") return std::pow(t, k) * std::exp(k * t);
    if (e.kind == "poly") return std::pow(t, 4.0 / 3 * (1 + 1 / e.gamma) - eps);
    if (e.kind == "superexp2") {
        if (!(t > 1)) throw Error(ErrorKind::usage, "superexp2 curves need beta > 1");
        return std::pow(t / std::log(t), k);
    }
    return std::pow(t, decay_exponent(e.gamma, eps));
}

RegionPair omega_curves(const std::string& example, double lo, double hi, int n, double eps) {
    const Example e = parse_example(example);
    RegionPair r;
    r.by_beta = e.kind != "decay";
    r.lower.label = "lower";
    r.upper.label = "upper";
    r.lower.closed_form = closed_form(e, false, eps);
    r.upper.closed_form = closed_form(e, true, eps);
    for (double t : geometric(lo, hi, n)) {
        const double a = omega_lower(example, t, eps), b = omega_upper(example, t, eps);
        if (e.kind == "decay") {
            r.lower.samples.emplace_back(t, a);
            r.upper.samples.emplace_back(t, b);
        } else {
            r.lower.samples.emplace_back(a, t);
            r.upper.samples.emplace_back(b, t);
        }
    }
    return r;
}

std::string region_csv(const RegionPair& r) {
    if (r.lower.samples.size() != r.upper.samples.size()) throw Error(ErrorKind::structural, "curves sampled differently");
    // shortest text that reads back to the same double
    auto num = [](double v) {
        char buf[32];
        return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
    };
    std::string o = "# lower: " + r.lower.closed_form + "\n# upper: " + r.upper.closed_form + "\n";
    o += r.by_beta ? "beta,alpha_lower,alpha_upper\n" : "alpha,beta_lower,beta_upper\n";
    for (size_t i = 0; i < r.lower.samples.size(); ++i) {
        const auto [a0, b0] = r.lower.samples[i];
        const auto [a1, b1] = r.upper.samples[i];
        if (r.by_beta)
            o += num(b0) + ',' + num(a0) + ',' + num(a1) + '\n';
        else
            o += num(a0) + ',' + num(b0) + ',' + num(b1) + '\n';
    }
    return o;
}

std::string region_svg(const RegionPair& r, bool log_axes) {
    // log axes apply to alpha always and to beta only when every beta is positive
    double ax0 = kInf, ax1 = -kInf, by0 = kInf, by1 = -kInf;
    bool beta_pos = true;
    for (const auto* c : {&r.lower, &r.upper})
        for (const auto& [a, b] : c->samples) beta_pos = beta_pos && b > 0;
    const bool logx = log_axes, logy = log_axes && beta_pos;
    auto X = [&](double a) { return logx ? std::log10(a) : a; };
    auto Y = [&](double b) { return logy ? std::log10(b) : b; };
    for (const auto* c : {&r.lower, &r.upper})
        for (const auto& [a, b] : c->samples) {
            if (!std::isfinite(X(a)) || !std::isfinite(Y(b))) continue;
            ax0 = std::min(ax0, X(a));
            ax1 = std::max(ax1, X(a));
            by0 = std::min(by0, Y(b));
            by1 = std::max(by1, Y(b));
        }
    if (!(ax1 > ax0)) ax1 = ax0 + 1;
    if (!(by1 > by0)) by1 = by0 + 1;
    const double W = 640, H = 480, m = 50;
    auto px = [&](double a) { return m + (X(a) - ax0) / (ax1 - ax0) * (W - 2 * m); };
    auto py = [&](double b) { return H - m - (Y(b) - by0) / (by1 - by0) * (H - 2 * m); };
    std::ostringstream o;
    o << std::setprecision(6);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    o << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << W - 2 * m << "\" height=\"" << H - 2 * m
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
    o << "<polygon fill=\"#7fdfef\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
    for (const auto& [a, b] : r.lower.samples)
        if (std::isfinite(X(a)) && std::isfinite(Y(b))) o << px(a) << ',' << py(b) << ' ';
    for (auto it = r.upper.samples.rbegin(); it != r.upper.samples.rend(); ++it)
        if (std::isfinite(X(it->first)) && std::isfinite(Y(it->second))) o << px(it->first) << ',' << py(it->second) << ' ';
    o << "\"/>\n";
    const char* colors[] = {"#1f5fbf", "#bf3f1f"};
    int ci = 0;
    for (const auto* c : {&r.lower, &r.upper}) {
        o << "<polyline fill=\"none\" stroke=\"" << colors[ci++] << "\" stroke-width=\"2\" points=\"";
        for (const auto& [a, b] : c->samples)
            if (std::isfinite(X(a)) && std::isfinite(Y(b))) o << px(a) << ',' << py(b) << ' ';
        o << "\"><title>" << c->closed_form << "</title></polyline>\n";
    }
    o << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << (logx ? "log10 Re lambda" : "Re lambda")
      << "</text>\n";
    o << "<text x=\"14\" y=\"" << H / 2 << "\" transform=\"rotate(-90 14 " << H / 2 << ")\" text-anchor=\"middle\">"
      << (logy ? "log10 Im lambda" : "Im lambda") << "</text>\n";
    o << "<text x=\"" << m << "\" y=\"" << m - 8 << "\">" << fmt(ax0) << " .. " << fmt(ax1) << " x " << fmt(by0) << " .. "
      << fmt(by1) << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

double sup_tau_v(const PotentialSpec& p, int side, double a, double b, int N) {
    if (!(b > a && a >= 0)) return 0;
    auto f = [&](double t) {
        const double x = side * t;
        const double tau = side > 0 ? p.tau_plus(x) : p.tau_minus(x);
        return std::pow(tau, N + 1) * std::abs(p.value(x));
    };
    std::vector<double> ts;
    const int n = 1024;
    for (int i = 0; i <= n; ++i) ts.push_back(a + (b - a) * i / n);
    const double g0 = std::max(a, 1e-6 * b);
    for (int i = 0; i <= n; ++i) ts.push_back(g0 * std::pow(b / g0, double(i) / n));
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    double best = 0;
    size_t bi = 0;
    for (size_t i = 0; i < ts.size(); ++i) {
        const double v = f(ts[i]);
        if (v > best) best = v, bi = i;
    }
    // zoom in on the bracket around the sampled max four times
    double lo = ts[bi ? bi - 1 : 0], hi = ts[std::min(bi + 1, ts.size() - 1)];
    for (int round = 0; round < 4; ++round) {
        double arg = 0.5 * (lo + hi);
        const int m = 64;
        for (int i = 0; i <= m; ++i) {
            const double t = lo + (hi - lo) * i / m;
            const double v = f(t);
            if (v >= best) best = v, arg = t;
        }
        const double w = (hi - lo) / m;
        lo = std::max(a, arg - w);
        hi = std::min(b, arg + w);
    }
    return best;
}

Sigma1 theorem1_sigma(const PotentialSpec& p, double alpha, int N, const GeometryOptions& opt) {
    const Boundaries bd = solve_boundary_theorem1(p, alpha, opt);
    const double s = std::pow(alpha, -(N + 1) / 4.0);
    return {s * sup_tau_v(p, -1, 0, bd.delta_minus, N), s * sup_tau_v(p, 1, 0, bd.delta_plus, N)};
}

namespace {
double log_sum_exp(const std::vector<double>& v) {
    double m = -kInf;
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}
} // namespace

std::pair<double, double> theorem2_alpha_window(const PotentialSpec& p, double beta, double eps1) {
    const double xb = solve_turning_point(p, beta);
    const double tau = p.tau_plus(xb);
    return {std::pow(beta * tau, 0.8), std::pow(beta / tau, (4 + eps1) / (3 + eps1))};
}

Theorem2Bounds theorem2_bounds(const PotentialSpec& p, double alpha, double beta, int N, double c, double eps1,
                               bool require_admissible) {
    if (N < 0) throw Error(ErrorKind::usage, "N must be >= 0");
    Theorem2Bounds r;
    r.kappa_c = c;
    r.x_beta = solve_turning_point(p, beta);
    const double xb = r.x_beta;
    const double tau = p.tau_plus(xb);
    const double d = width_theorem2(p, xb);
    const Jet v = p.eval_jet(xb, 1);
    const double imv1 = v.derivative(1).imag();
    const double aa = std::abs(alpha);
    r.kappa_exponent = imv1 / (tau * tau) / (std::pow(aa, 0.75) + std::pow(beta, 0.75));
    r.kappa = std::exp(-c * r.kappa_exponent);

    // sigma: the sup over J_beta of |Re V| enters through the j-sums
    double rv = 0;
    for (int i = 0; i <= 64; ++i) rv = std::max(rv, std::abs(p.value(xb - 2 * d + 4 * d * i / 64).real()));
    std::vector<double> logs;
    const int kmax = N == 0 ? 2 : 3 * N - 1;
    const int shift = N == 0 ? 0 : N;
    for (int k = 0; k <= kmax; ++k)
        for (int j = 1; j <= k + shift + 1; ++j) {
            const double num = std::log(std::pow(rv, j) + std::pow(beta, j));
            logs.push_back((k + shift + 1) * std::log(tau) + num - ((k + shift - 3) / 4.0 + j) * std::log(aa));
        }
    r.sigma_terms = int(logs.size());
    r.sigma = std::exp(log_sum_exp(logs));

    // admissibility with unit constants: alpha - Re V comparable to |alpha| on J_beta, alpha inside the window
    std::ostringstream note;
    bool ok = true;
    for (int i = 0; i <= 64; ++i) {
        const double x = xb - 2 * d + 4 * d * i / 64;
        const double q = std::abs(alpha - p.value(x).real()) / aa;
        if (q < 0.5 || q > 2) {
            ok = false;
            note << "alpha - Re V not comparable to |alpha| at x = " << x << "; ";
            break;
        }
    }
    const auto [lo, hi] = theorem2_alpha_window(p, beta, eps1);
    if (aa < lo * (1 - 1e-9)) ok = false, note << "|alpha| below (beta tau)^(4/5) = " << lo << "; ";
    if (aa > hi * (1 + 1e-9)) ok = false, note << "|alpha| above (beta/tau)^((4+e1)/(3+e1)) = " << hi << "; ";
    r.admissible = ok;
    r.note = note.str();
    if (!ok && require_admissible) throw Error(ErrorKind::regime, "(alpha, beta) not admissible: " + r.note);
    return r;
}

std::vector<SymbolSample> semiclassical_lambda(const PotentialSpec& W, const std::vector<double>& xs,
                                               const std::vector<double>& xis, int p_max) {
    if (p_max < 0 || 2 * p_max + 1 > kMaxJetOrder) throw Error(ErrorKind::usage, "p_max out of range");
    std::vector<SymbolSample> out;
    out.reserve(xs.size() * xis.size());
    for (double x : xs) {
        const Jet w = W.eval_jet(x, 2 * p_max + 1);
        // first j >= 1 with Im W^(j)(x) != 0, relative to the jet's size
        double scale = 0;
        for (int j = 0; j <= 2 * p_max + 1; ++j) scale = std::max(scale, std::abs(w[j]));
        const double tol = 1e-12 * std::max(scale, 1.0);
        int first = -1;
        for (int j = 1; j <= 2 * p_max + 1; ++j)
            if (std::abs(w[j].imag()) > tol) {
                first = j;
                break;
            }
        for (double xi : xis) {
            SymbolSample s;
            s.x = x;
            s.xi = xi;
            s.z = std::pow(xi, 4) + w[0];
            if (xi != 0 && first > 0) {
                s.in_lambda = first == 1;
                if (first % 2 == 1) {
                    s.in_lambda_tilde = true;
                    s.p = (first - 1) / 2;
                }
            }
            out.push_back(s);
        }
    }
    return out;
}

bool symbol_set_contains(const std::vector<SymbolSample>& cloud, std::size_t nx, std::size_t nxi, cplx z, bool tilde,
                         double threshold) {
    if (cloud.size() != nx * nxi || cloud.empty()) throw Error(ErrorKind::structural, "cloud size does not match the grid");
    double best = kInf;
    size_t bi = 0;
    for (size_t i = 0; i < cloud.size(); ++i) {
        const bool ok = tilde ? cloud[i].in_lambda_tilde : cloud[i].in_lambda;
        if (!ok) continue;
        const double d = std::abs(cloud[i].z - z);
        if (d < best) best = d, bi = i;
    }
    if (!std::isfinite(best)) return false;
    if (threshold <= 0) {
        const size_t ix = bi / nxi, ik = bi % nxi;
        double sp = 0;
        if (ix > 0) sp = std::max(sp, std::abs(cloud[bi - nxi].z - cloud[bi].z));
        if (ix + 1 < nx) sp = std::max(sp, std::abs(cloud[bi + nxi].z - cloud[bi].z));
        if (ik > 0) sp = std::max(sp, std::abs(cloud[bi - 1].z - cloud[bi].z));
        if (ik + 1 < nxi) sp = std::max(sp, std::abs(cloud[bi + 1].z - cloud[bi].z));
        threshold = 2 * sp;
    }
    return best <= threshold;
}

} // namespace bhpm
