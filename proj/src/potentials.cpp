#include "bhpm/potentials.hpp"

#include "bhpm/smooth_step.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace bhpm {

namespace {

const cplx I{0.0, 1.0};

Jet algebraic_tau(const Jet& v) { return pow(v * v + 1.0, -0.5); }
Jet unit_tau(const Jet& v) { return Jet::one(v.base(), v.order()); }

// sgn-type formulas are only meaningful for |x| >= 1; blend with a smooth inner
// function over [1/2, 1] so the result is C-infinity.
Jet blended(const Jet& v, const std::function<Jet(const Jet&, double)>& outer,
            const std::function<Jet(const Jet&)>& inner) {
    const double x = v[0].real();
    const double sg = x < 0 ? -1.0 : 1.0;
    const double ax = std::abs(x);
    if (ax >= 1.0) return outer(sg * v, sg);
    if (ax <= 0.5) return inner(v);
    Jet absv = sg * v;
    Jet chi = smooth_step(2.0 * absv + (-1.0));
    Jet one = Jet::one(v.base(), v.order());
    return inner(v) * (one - chi) + outer(absv, sg) * chi;
}

double param(const std::map<std::string, double>& m, const std::string& k, double dflt) {
    auto it = m.find(k);
    return it == m.end() ? dflt : it->second;
}

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::map<std::string, double> parse_params(const std::string& s, const std::string& id) {
    std::map<std::string, double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::usage, "bad potential parameter '" + item + "' in " + id);
        std::string key = item.substr(0, eq);
        try {
            size_t used = 0;
            double v = std::stod(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
            out[key] = v;
        } catch (const std::exception&) {
            throw Error(ErrorKind::usage, "bad numeric value in potential parameter '" + item + "'");
        }
    }
    return out;
}

void check_keys(const std::map<std::string, double>& m, std::initializer_list<const char*> allowed, const std::string& id) {
    for (const auto& [k, v] : m) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw Error(ErrorKind::usage, "unknown parameter '" + k + "' for potential " + id);
    }
}

} // namespace

Jet PotentialSpec::eval_scaled(double x, int order, double s) const {
    if (!in_domain(x)) throw Error(ErrorKind::domain, "x = " + fmt_num(x) + " outside the domain of " + id);
    Jet j = fn(Jet::variable(x, order, s));
    if (!j.all_finite()) throw Error(ErrorKind::domain, "non-finite jet of " + id + " at x = " + fmt_num(x));
    return j;
}

Jet PotentialSpec::eval_jet(double x, int order) const { return eval_scaled(x, order, 1.0); }

double PotentialSpec::tau_plus(double x) const { return tau_plus_fn(Jet::variable(x, 0))[0].real(); }
double PotentialSpec::tau_minus(double x) const { return tau_minus_fn(Jet::variable(x, 0))[0].real(); }

PotentialSpec make_potential(const std::string& id_in) {
    std::string family = id_in, rest;
    if (auto c = id_in.find(':'); c != std::string::npos) {
        family = id_in.substr(0, c);
        rest = id_in.substr(c + 1);
    }
    PotentialSpec p;
    p.family = family;
    p.params = parse_params(rest, id_in);
    p.tau_plus_fn = p.tau_minus_fn = algebraic_tau;
    p.nu_minus = p.nu_plus = -1;
    p.features = {0.0};
    const auto& prm = p.params;
    const double pi2 = std::numbers::pi / 2;

    if (family == "zero") {
        check_keys(prm, {}, id_in);
        p.fn = [](const Jet& v) { return Jet::zero(v.base(), v.order()); };
        p.tau_plus_fn = p.tau_minus_fn = unit_tau;
        p.nu_minus = p.nu_plus = 0;
    } else if (family == "const") {
        check_keys(prm, {"re", "im"}, id_in);
        const cplx c{param(prm, "re", 0), param(prm, "im", 1)};
        p.params = {{"re", c.real()}, {"im", c.imag()}};
        p.fn = [c](const Jet& v) { return Jet::constant(v.base(), v.order(), c); };
        p.tau_plus_fn = p.tau_minus_fn = unit_tau;
        p.nu_minus = p.nu_plus = 0;
        p.im_limit_minus = p.im_limit_plus = c.imag();
    } else if (family == "arctan") {
        check_keys(prm, {}, id_in);
        p.fn = [](const Jet& v) { return I * atan(v); };
        p.im_limit_minus = -pi2;
        p.im_limit_plus = pi2;
    } else if (family == "xsqrt") {
        check_keys(prm, {}, id_in);
        p.fn = [](const Jet& v) { return I * (v * pow(v * v + 1.0, -0.5)); };
        p.im_limit_minus = -1;
        p.im_limit_plus = 1;
    } else if (family == "exp-shift") {
        check_keys(prm, {}, id_in);
        p.fn = [](const Jet& v) { return I * (exp(v) + (-1.0)); };
        p.tau_plus_fn = p.tau_minus_fn = unit_tau;
        p.nu_minus = p.nu_plus = 0;
        p.bounded_plus = false;
        p.im_limit_minus = -1;
        p.im_limit_plus = kInf;
        p.tail_cap_minus = 700;
        p.tail_cap_plus = 700;
    } else if (family == "log") {
        check_keys(prm, {}, id_in);
        p.fn = [](const Jet& v) { return I * asinh(v); };
        p.bounded_minus = p.bounded_plus = false;
        p.im_limit_minus = -kInf;
        p.im_limit_plus = kInf;
        p.tail_cap_minus = p.tail_cap_plus = 1e150;
    } else if (family == "poly") {
        check_keys(prm, {"gamma", "rho", "re"}, id_in);
        const double g = param(prm, "gamma", 2), rho = param(prm, "rho", 0), re = param(prm, "re", 0);
        if (!(g > 0)) throw Error(ErrorKind::usage, "poly needs gamma > 0");
        p.params = {{"gamma", g}, {"rho", rho}, {"re", re}};
        auto outer = [g, rho, re](const Jet& a, double sg) {
            Jet r = (I * sg) * pow(a, g);
            if (re != 0.0) r += cplx(re) * pow(a, rho);
            return r;
        };
        auto inner = [re](const Jet& v) { return I * v + cplx(re); };
        p.fn = [outer, inner](const Jet& v) { return blended(v, outer, inner); };
        p.bounded_minus = p.bounded_plus = false;
        p.im_limit_minus = -kInf;
        p.im_limit_plus = kInf;
        p.smoothing_halfwidth = 1;
        p.features = {-1, -0.5, 0, 0.5, 1};
        p.tail_cap_minus = p.tail_cap_plus = std::pow(1e100, 1.0 / std::max(1.0, g));
    } else if (family == "superexp") {
        check_keys(prm, {}, id_in);
        p.fn = [](const Jet& v) {
            Jet s = sinh(v);
            return cosh(s) + I * sinh(s);
        };
        p.tau_plus_fn = p.tau_minus_fn = [](const Jet& v) { return cosh(v); };
        p.nu_minus = p.nu_plus = 0;
        p.bounded_minus = p.bounded_plus = false;
        p.im_limit_minus = -kInf;
        p.im_limit_plus = kInf;
        p.tail_cap_minus = p.tail_cap_plus = 6;
    } else if (family == "decay") {
        check_keys(prm, {"gamma"}, id_in);
        const double g = param(prm, "gamma", 0.5);
        if (!(g > 0 && g < 1)) throw Error(ErrorKind::usage, "decay needs gamma in (0,1)");
        p.params = {{"gamma", g}};
        auto outer = [g](const Jet& a, double sg) { return (I * sg) * pow(a, -g); };
        auto inner = [](const Jet& v) { return I * v; };
        p.fn = [outer, inner](const Jet& v) { return blended(v, outer, inner); };
        p.smoothing_halfwidth = 1;
        p.features = {-1, -0.5, 0, 0.5, 1};
        p.tail_cap_minus = p.tail_cap_plus = 1e100;
    } else if (family == "ilog") {
        check_keys(prm, {}, id_in);
        p.fn = [](const Jet& v) { return I * log(v); };
        p.domain_lo = 0;
        p.bounded_plus = false;
        p.im_limit_minus = -kInf;
        p.im_limit_plus = kInf;
        p.tail_cap_plus = 1e150;
        p.features = {1};
    } else if (family == "superexp2") {
        check_keys(prm, {}, id_in);
        p.fn = [](const Jet& v) { return I * exp(exp(v)); };
        // only the right tail matters here; on the left V -> i and a unit tau suffices
        p.tau_plus_fn = [](const Jet& v) { return exp(v); };
        p.tau_minus_fn = unit_tau;
        p.nu_minus = p.nu_plus = 0;
        p.bounded_plus = false;
        p.im_limit_minus = 1;
        p.im_limit_plus = kInf;
        p.tail_cap_minus = 700;
        p.tail_cap_plus = 6.5;
    } else if (family == "ipow") {
        check_keys(prm, {"p"}, id_in);
        const double pw = param(prm, "p", 1);
        if (pw < 0 || pw != std::floor(pw) || pw > 16) throw Error(ErrorKind::usage, "ipow needs an integer p in [0, 16]");
        p.params = {{"p", pw}};
        const int n = int(pw);
        p.fn = [n](const Jet& v) { return I * pow_int(v, n); };
        p.bounded_minus = p.bounded_plus = n == 0;
        const bool odd = n % 2 == 1;
        p.im_limit_plus = n == 0 ? 1 : kInf;
        p.im_limit_minus = n == 0 ? 1 : (odd ? -kInf : kInf);
        p.tail_cap_minus = p.tail_cap_plus = n == 0 ? 1e6 : std::pow(1e100, 1.0 / n);
    } else if (family == "isinh") {
        check_keys(prm, {}, id_in);
        p.fn = [](const Jet& v) { return I * sinh(v); };
        p.tau_plus_fn = p.tau_minus_fn = unit_tau;
        p.nu_minus = p.nu_plus = 0;
        p.bounded_minus = p.bounded_plus = false;
        p.im_limit_minus = -kInf;
        p.im_limit_plus = kInf;
        p.tail_cap_minus = p.tail_cap_plus = 700;
    } else if (family == "harmonic") {
        check_keys(prm, {}, id_in);
        p.fn = [](const Jet& v) { return v * v; };
        p.bounded_minus = p.bounded_plus = false;
    } else {
        throw Error(ErrorKind::usage, "unknown potential id '" + id_in + "'");
    }

    p.id = family;
    if (!p.params.empty()) {
        p.id += ':';
        bool first = true;
        for (const auto& [k, v] : p.params) {
            if (!first) p.id += ',';
            p.id += k + "=" + fmt_num(v);
            first = false;
        }
    }
    return p;
}

std::vector<std::string> catalog_ids() {
    return {"zero", "const:re=0,im=1", "arctan", "xsqrt", "exp-shift", "log", "poly:gamma=2,rho=0",
            "superexp", "decay:gamma=0.5", "ilog", "superexp2", "ipow:p=1", "ipow:p=2", "ipow:p=3", "isinh", "harmonic"};
}

std::vector<PotentialSpec> catalog() {
    std::vector<PotentialSpec> out;
    for (const auto& id : catalog_ids()) out.push_back(make_potential(id));
    return out;
}

std::vector<double> epsilon_candidates() {
    std::vector<double> e;
    for (int i = 0; i < 8; ++i) e.push_back(1e-3 * std::pow(300.0, i / 7.0));
    return e;
}

// ---------------------------------------------------------------- checkers

std::vector<double> tail_points(const PotentialSpec& p, double side, const SampleSet& g) {
    double a = g.inner >= 0 ? g.inner : p.smoothing_halfwidth + 2.0;
    double b = side > 0 ? p.tail_cap_plus : p.tail_cap_minus;
    if (b <= a) b = 2 * a;
    std::vector<double> xs;
    const int n = std::max(8, g.points_per_side);
    for (int i = 0; i < n; ++i) xs.push_back(side * a * std::pow(b / a, double(i) / (n - 1)));
    return xs;
}

namespace {

// Fills worst ratio / growth / pass from per-point log ratios (-inf allowed).
// "O(.) as |x| -> infinity" is judged on the outer half of the (geometric) sample:
// its maximum is the fitted implicit constant and must stay under the cap, and it may
// not exceed the inner-half maximum by more than growth_tol (no slow blow-up).
void judge(AssumptionReport& r, const std::vector<double>& xs, const std::vector<double>& logr, const SampleSet& g) {
    r.sample_lo = std::min(std::abs(xs.front()), std::abs(xs.back()));
    r.sample_hi = std::max(std::abs(xs.front()), std::abs(xs.back()));
    r.cap = g.cap;
    const size_t h = logr.size() / 2;
    double in_max = -kInf, out_max = -kInf;
    bool nan = false;
    for (size_t i = 0; i < logr.size(); ++i) {
        if (std::isnan(logr[i])) nan = true;
        double& m = i < h ? in_max : out_max;
        m = std::max(m, logr[i]);
    }
    r.worst_ratio = std::exp(out_max);
    if (out_max == -kInf)
        r.growth = 0;
    else if (in_max == -kInf)
        r.growth = kInf;
    else
        r.growth = std::exp(out_max - in_max);
    std::ostringstream os;
    os << "max over whole sample " << std::exp(std::max(in_max, out_max));
    r.note = os.str();
    r.pass = !nan && out_max <= std::log(g.cap) && r.growth <= g.growth_tol;
}

double log_abs(double v) { return v == 0.0 ? -kInf : std::log(std::abs(v)); }

} // namespace

std::vector<AssumptionReport> check_assumption1(const PotentialSpec& p, int N, const SampleSet& g) {
    std::vector<AssumptionReport> out;

    {
        AssumptionReport r;
        r.condition = "A1.1";
        bool ok = p.im_limit_minus < 0 && 0 < p.im_limit_plus;
        std::ostringstream note;
        note << "Im V limits " << p.im_limit_minus << " / " << p.im_limit_plus;
        if (!p.has_left_tail()) {
            ok = p.im_limit_plus > 0;
            note << " (half-line potential, right tail only)";
        }
        // sampled far tails must lean toward the stated limits
        if (p.has_left_tail()) {
            double xl = -tail_points(p, -1, g).back();
            note << "; Im V(" << -xl << ") = " << p.value(-xl).imag();
        }
        double xr = tail_points(p, 1, g).back();
        note << "; Im V(" << xr << ") = " << p.value(xr).imag();
        r.pass = ok;
        r.note = note.str();
        out.push_back(r);
    }

    for (double side : {-1.0, 1.0}) {
        if (side < 0 && !p.has_left_tail()) continue;
        const auto xs = tail_points(p, side, g);
        const std::string s = side < 0 ? "-" : "+";
        auto tau_at = [&](double x) { return side < 0 ? p.tau_minus(x) : p.tau_plus(x); };
        const bool bounded = side < 0 ? p.bounded_minus : p.bounded_plus;
        const double nu = side < 0 ? p.nu_minus : p.nu_plus;

        // derivative control |V^(n)| <= C tau^n |V|, n = 1..N+3
        {
            AssumptionReport r;
            r.condition = "A1.2";
            r.side = s;
            std::vector<double> lr;
            for (double x : xs) {
                const double t = tau_at(x);
                Jet j = p.eval_scaled(x, N + 3, 1.0 / t);
                double m = -kInf;
                double fact = 1;
                for (int n = 1; n <= N + 3; ++n) {
                    fact *= n;
                    m = std::max(m, log_abs(std::abs(j[n])) + std::log(fact));
                }
                // V == 0 with vanishing derivatives counts as trivially controlled
                lr.push_back(m == -kInf ? -kInf : m - log_abs(std::abs(j[0])));
            }
            judge(r, xs, lr, g);
            out.push_back(r);
        }

        if (!bounded) {
            AssumptionReport r;
            r.condition = "A1.3a-tau";
            r.side = s;
            std::vector<double> lr;
            for (double x : xs) {
                Jet tj = (side < 0 ? p.tau_minus_fn : p.tau_plus_fn)(Jet::variable(x, 1));
                const double t = tj[0].real(), dt = tj[1].real();
                const double lx = nu * std::log(std::abs(x));
                lr.push_back(std::max(lx - std::log(t), log_abs(dt) - lx - std::log(t)));
            }
            judge(r, xs, lr, g);
            out.push_back(r);

            AssumptionReport v1;
            v1.condition = "A1.3a-V1";
            v1.side = s;
            lr.clear();
            for (double x : xs) {
                Jet j = p.eval_scaled(x, 1, 1.0 / tau_at(x));
                lr.push_back(log_abs(j[1].imag()) - log_abs(j[0].imag()));
            }
            judge(v1, xs, lr, g);
            out.push_back(v1);

            AssumptionReport b;
            b.condition = "A1.3a-ReIm";
            b.side = s;
            for (double e : epsilon_candidates()) {
                AssumptionReport trial = b;
                lr.clear();
                for (double x : xs) {
                    const double lt = std::log(tau_at(x));
                    const cplx v = p.value(x);
                    const double a1 = (12 + 4 * e) * lt, a2 = (3 + e) * log_abs(v.real());
                    const double mx = std::max(a1, a2);
                    const double lse = mx == -kInf ? -kInf : mx + std::log(std::exp(a1 - mx) + std::exp(a2 - mx));
                    lr.push_back(4 * lt + lse - 4 * log_abs(v.imag()));
                }
                judge(trial, xs, lr, g);
                trial.epsilon = e;
                if (trial.pass || !b.epsilon) b = trial;
            }
            out.push_back(b);
        } else {
            AssumptionReport b;
            b.condition = "A1.3b";
            b.side = s;
            for (double e : epsilon_candidates()) {
                if (e >= 1.0 / 3) continue;
                AssumptionReport trial = b;
                std::vector<double> lr;
                for (double x : xs) lr.push_back(std::log(tau_at(x)) - (1.0 / 3 - e) * std::log(std::abs(x)));
                judge(trial, xs, lr, g);
                trial.epsilon = e;
                if (trial.pass || !b.epsilon) b = trial;
            }
            out.push_back(b);
        }
    }
    return out;
}

std::vector<AssumptionReport> check_assumption2(const PotentialSpec& p, const SampleSet& g, std::optional<double> eps1) {
    std::vector<AssumptionReport> out;
    const auto xs = tail_points(p, 1, g);

    if (!eps1) {
        eps1 = 0.3;
        if (!p.bounded_plus)
            for (const auto& r : check_assumption1(p, 0, g))
                if (r.condition == "A1.3a-ReIm" && r.side == "+" && r.pass) eps1 = r.epsilon;
    }
    const double e1 = *eps1;

    {
        AssumptionReport r;
        r.condition = "A2.1";
        r.side = "+";
        bool increasing = true;
        double prev = -kInf;
        for (double x : xs) {
            const double v = p.value(x).imag();
            if (!(v > prev)) increasing = false;
            prev = v;
        }
        r.pass = p.im_limit_plus == kInf && increasing;
        r.sample_lo = xs.front();
        r.sample_hi = xs.back();
        r.note = increasing ? "Im V increasing on the sampled tail" : "Im V not increasing on the sampled tail";
        out.push_back(r);
    }

    // Scaled jets: c1 = V'/tau, c2 = V''/(2 tau^2).
    std::vector<Jet> js;
    std::vector<double> taus;
    for (double x : xs) {
        taus.push_back(p.tau_plus(x));
        js.push_back(p.eval_scaled(x, 2, 1.0 / taus.back()));
    }

    {
        AssumptionReport r;
        r.condition = "A2.2";
        r.side = "+";
        const double box = e1 / (20 * (3 + e1));
        const double rhs = e1 / (20 * (4 + e1));
        bool found = false;
        AssumptionReport first_fail;
        for (int i = 0; i <= 8 && !found; ++i) {
            for (int k = 0; k <= 8 && !found; ++k) {
                const double t1 = box * i / 8, t2 = box * k / 8;
                if (!(t1 - t2 / (4 + e1) < rhs)) continue;
                AssumptionReport trial = r;
                std::vector<double> lr;
                for (size_t q = 0; q < xs.size(); ++q) {
                    const double im = js[q][0].imag(), d1 = js[q][1].imag();
                    lr.push_back((1 - t1) * log_abs(im) + t2 * std::log(taus[q]) - log_abs(d1) +
                                 (d1 <= 0 ? kInf : 0.0));
                }
                judge(trial, xs, lr, g);
                trial.t_pair = std::make_pair(t1, t2);
                trial.epsilon = e1;
                if (trial.pass) {
                    r = trial;
                    found = true;
                } else if (i == 0 && k == 0) {
                    first_fail = trial;
                }
            }
        }
        if (!found) {
            r = first_fail;
            r.pass = false;
            r.note = "no admissible (t1, t2) on the lattice";
        }
        out.push_back(r);
    }

    {
        AssumptionReport r;
        r.condition = "A2.3";
        r.side = "+";
        std::vector<double> lr;
        for (const auto& j : js) lr.push_back(log_abs(2 * j[2].imag()) - log_abs(j[1].imag()) + (j[1].imag() <= 0 ? kInf : 0.0));
        judge(r, xs, lr, g);
        out.push_back(r);
    }
    return out;
}

} // namespace bhpm
