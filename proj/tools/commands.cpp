#include "commands.hpp"

#include "pool.hpp"

#include "bhpm/regions.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace bhpm::cli {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorKind::usage, msg); }

const std::set<std::string> kGridKeys{"base_cells", "band_cells", "rel_tol", "max_points",
                                      "direct",     "direct_ppw", "direct_ppb", "direct_max_points"};

std::set<std::string> keys(std::initializer_list<std::string> own, bool grid = false) {
    std::set<std::string> s(own);
    s.insert({"out", "threads", "seed"});
    if (grid) s.insert(kGridKeys.begin(), kGridKeys.end());
    return s;
}

std::string header(const Config& c, const std::string& schema) {
    return "# bhpm " + std::string(kVersion) + " config " + c.hash() + " schema " + schema + "\n";
}

json json_header(const Config& c, const std::string& schema) {
    json j;
    j["schema"] = schema;
    j["tool"] = "bhpm";
    j["version"] = kVersion;
    j["config_hash"] = c.hash();
    return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string out_prefix(const Config& c, const std::string& def) { return c.str("out", def); }

unsigned threads(const Config& c) {
    const int t = c.integer("threads", 0);
    if (t < 0) usage("threads must be >= 0");
    return t == 0 ? default_threads() : unsigned(t);
}

GridOptions grid_options(const Config& c) {
    GridOptions g;
    g.base_cells = c.power_of_two("base_cells", g.base_cells);
    g.band_cells = c.power_of_two("band_cells", g.band_cells);
    g.rel_tol = c.num("rel_tol", g.rel_tol);
    g.max_points = std::size_t(c.power_of_two("max_points", int(g.max_points)));
    if (!(g.rel_tol > 0)) usage("rel_tol must be positive");
    return g;
}

DirectOptions direct_options(const Config& c) {
    DirectOptions d;
    d.points_per_wavelength = c.power_of_two("direct_ppw", 64);
    d.points_per_band = c.power_of_two("direct_ppb", d.points_per_band);
    d.max_points = std::size_t(c.power_of_two("direct_max_points", int(d.max_points)));
    return d;
}

GeometryOptions geometry(const Config& c) {
    GeometryOptions g;
    g.eps1 = c.num("eps1", g.eps1);
    g.eps2 = c.num("eps2", g.eps2);
    if (!(g.eps1 > 0)) usage("eps1 must be positive");
    if (!(g.eps2 > 0 && g.eps2 < 1.0 / 3)) usage("eps2 must lie in (0, 1/3)");
    return g;
}

std::vector<int> orders(const Config& c, std::vector<int> def) {
    auto Ns = c.ints("N", def);
    if (Ns.empty()) usage("N list is empty");
    for (int n : Ns)
        if (n < 0 || n > 12) usage("N must lie in [0, 12]");
    return Ns;
}

int apply_sign(const Config& c, int natural) {
    const std::string s = c.str("sign", "natural");
    if (s == "natural") return natural;
    if (s == "flip") return -natural;
    if (s == "+1" || s == "1") return 1;
    if (s == "-1") return -1;
    usage("sign must be natural, flip, +1 or -1");
}

std::string regime_name(const Config& c) {
    std::string r = c.str("regime", "theorem1");
    if (r == "decaying") r = "theorem1-decaying";
    if (r == "semiclassical") usage("use the semiclassical command for h sweeps");
    if (r != "theorem1" && r != "theorem1-decaying" && r != "theorem2") usage("unknown regime '" + r + "'");
    return r;
}

PseudomodeProblem build_problem(const Config& c, const PotentialSpec& p, const std::string& regime, double alpha,
                                double beta, int N) {
    PseudomodeProblem pr;
    if (regime == "theorem1")
        pr = problem_theorem1(p, alpha, beta, N, geometry(c));
    else if (regime == "theorem1-decaying")
        pr = problem_decaying(p, alpha, beta, N, geometry(c));
    else
        pr = problem_theorem2(p, alpha, beta, N, c.num("kappa_c", 1));
    pr.sign = apply_sign(c, pr.sign);
    return pr;
}

ResidualReport evaluate(const Config& c, const PseudomodeProblem& pr) {
    ResidualReport r = residual_analytic(pr, grid_options(c));
    if (c.flag("direct", false)) r.ratio_direct = residual_direct(pr, direct_options(c));
    return r;
}

json report_json(const ResidualReport& r) {
    json j;
    j["alpha"] = r.lambda.real();
    j["beta"] = r.lambda.imag();
    j["N"] = r.N;
    j["regime"] = r.regime;
    j["ratio_analytic"] = r.ratio_analytic;
    j["ratio_direct"] = r.ratio_direct ? json(*r.ratio_direct) : json(nullptr);
    j["cutoff_term"] = r.bound_cutoff_term;
    j["remainder_sup"] = r.bound_remainder_term;
    j["sigma_bound"] = r.sigma_bound;
    j["grid_size"] = r.grid_size;
    j["quadrature_error_estimate"] = r.quadrature_error_estimate;
    j["log_norm"] = r.log_norm;
    return j;
}

json fit_json(const FitResult& f) {
    json j;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["r2"] = f.r2;
    j["used"] = f.used;
    j["dropped_below"] = f.dropped_below;
    return j;
}

// sweep points in output order: N, then beta, then alpha
struct Point {
    double alpha, beta;
    int N;
};

std::vector<Point> sweep_points(const Config& c) {
    const auto Ns = orders(c, {0});
    const auto betas = c.nums("beta", {0.0});
    if (betas.empty()) usage("beta list is empty");
    std::vector<Point> pts;
    if (c.has("alpha_power")) {
        if (c.has("alpha")) usage("give either alpha or alpha_power");
        const double pw = c.num("alpha_power");
        for (int N : Ns)
            for (double b : betas) {
                if (b <= 0) usage("alpha_power needs beta > 0");
                pts.push_back({std::pow(b, pw), b, N});
            }
    } else {
        if (!c.has("alpha")) usage("missing key 'alpha'");
        const auto alphas = c.nums("alpha");
        if (alphas.empty()) usage("alpha list is empty");
        for (int N : Ns)
            for (double b : betas)
                for (double a : alphas) pts.push_back({a, b, N});
    }
    return pts;
}

std::vector<SweepRow> run_sweep(const Config& c) {
    const auto pts = sweep_points(c);
    const PotentialSpec p = make_potential(c.str("potential"));
    const std::string regime = regime_name(c);
    geometry(c), grid_options(c), direct_options(c); // fail on bad options before any work
    return parallel_map<SweepRow>(pts.size(), threads(c), [&](std::size_t i) {
        const Point& q = pts[i];
        const auto pr = build_problem(c, p, regime, q.alpha, q.beta, q.N);
        return SweepRow{q.alpha, q.beta, q.N, evaluate(c, pr)};
    });
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

// (N, x, y) triples from a CSV with a header row; '#' lines are skipped
std::vector<std::tuple<int, double, double>> read_xy(const std::string& path, const std::string& xcol,
                                                    const std::string& ycol) {
    std::ifstream f(path);
    if (!f) usage("cannot read '" + path + "'");
    std::vector<std::string> head;
    std::vector<std::tuple<int, double, double>> rows;
    int ix = -1, iy = -1, in = -1;
    for (std::string line; std::getline(f, line);) {
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv(line);
        if (head.empty()) {
            head = cells;
            for (int i = 0; i < int(head.size()); ++i) {
                if (head[size_t(i)] == xcol) ix = i;
                if (head[size_t(i)] == ycol) iy = i;
                if (head[size_t(i)] == "N") in = i;
            }
            if (ix < 0 || iy < 0) usage("columns '" + xcol + "' and '" + ycol + "' not both in " + path);
            continue;
        }
        if (cells.size() != head.size()) throw Error(ErrorKind::data, "ragged row in " + path);
        if (cells[size_t(iy)].empty()) continue; // e.g. ratio_direct that did not fit
        const int N = in >= 0 ? int(parse_number(cells[size_t(in)])) : 0;
        rows.emplace_back(N, parse_number(cells[size_t(ix)]), parse_number(cells[size_t(iy)]));
    }
    if (head.empty()) throw Error(ErrorKind::data, path + " has no header row");
    return rows;
}

json fits_by_order(const std::vector<std::tuple<int, double, double>>& rows, bool invert_x) {
    std::map<int, std::vector<std::pair<double, double>>> by;
    for (auto [N, x, y] : rows) by[N].emplace_back(invert_x ? 1 / x : x, y);
    json arr = json::array();
    for (auto& [N, pts] : by) {
        json j;
        j["N"] = N;
        j["points"] = pts.size();
        j.update(fit_json(fit_decay_exponent(pts)));
        arr.push_back(j);
    }
    return arr;
}

json assumption_json(const AssumptionReport& a) {
    json j;
    j["condition"] = a.condition;
    j["side"] = a.side;
    j["sample_lo"] = a.sample_lo;
    j["sample_hi"] = a.sample_hi;
    j["worst_ratio"] = a.worst_ratio;
    j["growth"] = a.growth;
    j["cap"] = a.cap;
    j["pass"] = a.pass;
    j["epsilon"] = a.epsilon ? json(*a.epsilon) : json(nullptr);
    j["t_pair"] = a.t_pair ? json::array({a.t_pair->first, a.t_pair->second}) : json(nullptr);
    j["note"] = a.note;
    return j;
}

double uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

} // namespace

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int exit_code_for(ErrorKind k) {
    switch (k) {
    case ErrorKind::usage:
    case ErrorKind::data: return 2;
    case ErrorKind::regime:
    case ErrorKind::geometry:
    case ErrorKind::domain:
    case ErrorKind::branch_cut: return 3;
    case ErrorKind::accuracy:
    case ErrorKind::structural:
    case ErrorKind::division: return 4;
    }
    return 4;
}

void write_outputs(const CommandResult& r) {
    for (const auto& f : r.files) {
        std::ofstream o(f.path, std::ios::binary);
        if (!o) throw Error(ErrorKind::usage, "cannot write '" + f.path + "'");
        o << f.content;
    }
}

std::string sweep_csv_header() {
    return "alpha,beta,N,regime,ratio_analytic,ratio_direct,cutoff_term,remainder_sup,sigma_bound,grid_size\n";
}

std::string sweep_csv_line(const SweepRow& r) {
    const ResidualReport& q = r.report;
    return fmt(r.alpha) + "," + fmt(r.beta) + "," + std::to_string(r.N) + "," + q.regime + "," +
           fmt(q.ratio_analytic) + "," + (q.ratio_direct ? fmt(*q.ratio_direct) : "") + "," +
           fmt(q.bound_cutoff_term) + "," + fmt(q.bound_remainder_term) + "," + fmt(q.sigma_bound) + "," +
           std::to_string(q.grid_size) + "\n";
}

std::vector<TransportCheck> verify_transport(const std::vector<std::string>& ids, int N, int points,
                                             unsigned long long seed, double alpha_lo, double alpha_hi,
                                             double corrupt_psi0) {
    if (ids.empty()) usage("no potentials to check");
    if (points < 1) usage("points must be positive");
    if (N < 4) usage("the transport check needs N >= 4 so that phi_{-1..3} are all solved");
    std::vector<TransportCheck> out;
    std::mt19937_64 rng(seed);
    for (const auto& id : ids) {
        const PotentialSpec p = make_potential(id);
        TransportCheck tc;
        tc.potential = p.id;
        tc.worst.assign(5, 0.0);
        const double xlo = std::max(-4.0, std::isfinite(p.domain_lo) ? p.domain_lo + 1e-3 : -4.0);
        const double xhi = std::min(4.0, std::isfinite(p.domain_hi) ? p.domain_hi - 1e-3 : 4.0);
        for (int tries = 0; tc.points < points; ++tries) {
            if (tries > 100 * points) throw Error(ErrorKind::regime, "too few admissible draws for " + p.id);
            const double alpha = alpha_lo * std::pow(alpha_hi / alpha_lo, uniform(rng));
            const double beta = uniform(rng) - 0.5;
            const double x = xlo + (xhi - xlo) * uniform(rng);
            // admissible: |V| well below |lambda| so lambda - V stays off the cut
            if (!(std::abs(p.value(x)) < 0.5 * alpha)) {
                ++tc.rejected;
                continue;
            }
            PhaseExpansion pe(p, cplx(alpha, beta), N);
            if (corrupt_psi0 != 0) pe.set_perturbation(0, corrupt_psi0);
            LocalPhase loc;
            try {
                loc = pe.at(x);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::branch_cut) throw;
                ++tc.rejected;
                continue;
            }
            for (int j = -1; j <= 3; ++j) {
                const double s = pe.phi_scale(loc, j);
                const double r = s > 0 ? std::abs(pe.phi(loc, j)) / s : std::abs(pe.phi(loc, j));
                tc.worst[size_t(j + 1)] = std::max(tc.worst[size_t(j + 1)], r);
            }
            ++tc.points;
        }
        out.push_back(tc);
    }
    return out;
}

CommandResult cmd_verify_transport(const Config& c) {
    c.restrict_to(keys({"potentials", "N", "points", "tol", "alpha_lo", "alpha_hi", "corrupt_psi0"}));
    const auto ids = c.words("potentials", {"arctan", "exp-shift", "log", "poly:gamma=2", "superexp"});
    const double tol = c.num("tol", 1e-9);
    const auto checks = verify_transport(ids, c.integer("N", 4), c.integer("points", 200),
                                         (unsigned long long)c.integer("seed", 1), c.num("alpha_lo", 10),
                                         c.num("alpha_hi", 1e3), c.num("corrupt_psi0", 0));
    json j = json_header(c, "bhpm.verify-transport/1");
    j["tol"] = tol;
    json arr = json::array();
    bool ok = true;
    double worst = 0;
    for (const auto& t : checks) {
        json e;
        e["potential"] = t.potential;
        e["points"] = t.points;
        e["rejected"] = t.rejected;
        json w;
        for (int k = -1; k <= 3; ++k) w["phi_" + std::to_string(k)] = t.worst[size_t(k + 1)];
        e["max_relative"] = w;
        const double m = *std::max_element(t.worst.begin(), t.worst.end());
        e["pass"] = m <= tol;
        ok = ok && m <= tol;
        worst = std::max(worst, m);
        arr.push_back(e);
    }
    j["checks"] = arr;
    j["pass"] = ok;
    CommandResult r;
    r.files.push_back({out_prefix(c, "verify-transport") + ".json", dump(j)});
    r.exit_code = ok ? 0 : 4;
    r.summary = std::string(ok ? "pass" : "FAIL") + ": max relative |phi| " + fmt(worst) + " (tol " + fmt(tol) + ")";
    return r;
}

CommandResult cmd_pseudomode(const Config& c) {
    c.restrict_to(keys({"potential", "regime", "alpha", "beta", "N", "sign", "eps1", "eps2", "kappa_c", "x0", "mu",
                        "h", "width", "stride"},
                       true));
    const PotentialSpec p = make_potential(c.str("potential"));
    const int N = c.integer("N", 0);
    if (N < 0 || N > 12) usage("N must lie in [0, 12]");
    PseudomodeProblem pr;
    if (c.str("regime", "theorem1") == "semiclassical") {
        pr = problem_semiclassical(p, c.num("x0", 0), c.num("mu", 1), c.num("h"), N, c.num("width", 0));
        pr.sign = apply_sign(c, pr.sign);
    } else {
        pr = build_problem(c, p, regime_name(c), c.num("alpha"), c.num("beta", 0), N);
    }
    const int stride = c.integer("stride", 1);
    if (stride < 1) usage("stride must be positive");

    const GridOptions g = grid_options(c);
    const SampledPseudomode s = assemble(pr, g);
    const ResidualReport rep = evaluate(c, pr);

    std::string csv = header(c, "bhpm.profile/1") + "x,log_abs_psi,arg_psi\n";
    for (std::size_t i = 0; i < s.grid.size(); i += size_t(stride)) {
        const double arg = std::remainder(s.phase[i], 2 * M_PI);
        csv += fmt(s.grid[i]) + "," + fmt(s.log_magnitude[i] - s.normalization_shift) + "," + fmt(arg) + "\n";
    }
    json j = json_header(c, "bhpm.pseudomode/1");
    j["potential"] = p.id;
    j["sign"] = pr.sign;
    j["v_scale"] = pr.v_scale;
    j["out_scale"] = pr.out_scale;
    j["cutoff"] = {{"regime", to_string(pr.cutoff.regime)}, {"left", pr.cutoff.left},
                   {"right", pr.cutoff.right},           {"band_left", pr.cutoff.band_left},
                   {"band_right", pr.cutoff.band_right}, {"anchor", pr.cutoff.anchor}};
    j["normalization_shift"] = s.normalization_shift;
    j["report"] = report_json(rep);

    CommandResult r;
    const std::string pre = out_prefix(c, "pseudomode");
    r.files.push_back({pre + ".profile.csv", csv});
    r.files.push_back({pre + ".json", dump(j)});
    r.summary = "ratio " + fmt(rep.ratio_analytic) + " on " + std::to_string(rep.grid_size) + " nodes";
    return r;
}

CommandResult cmd_sweep(const Config& c) {
    c.restrict_to(keys({"potential", "regime", "alpha", "alpha_power", "beta", "N", "sign", "eps1", "eps2", "kappa_c"},
                       true));
    const auto rows = run_sweep(c);
    std::string csv = header(c, "bhpm.sweep/1") + sweep_csv_header();
    for (const auto& row : rows) csv += sweep_csv_line(row);
    CommandResult r;
    r.files.push_back({out_prefix(c, "sweep") + ".csv", csv});
    r.summary = std::to_string(rows.size()) + " points";
    return r;
}

CommandResult cmd_fit(const Config& c) {
    c.restrict_to(keys({"input", "x", "y", "invert_x", "potential", "regime", "alpha", "alpha_power", "beta", "N",
                        "sign", "eps1", "eps2", "kappa_c"},
                       true));
    const std::string xcol = c.str("x", "alpha"), ycol = c.str("y", "ratio_analytic");
    std::vector<std::tuple<int, double, double>> rows;
    if (c.has("input")) {
        rows = read_xy(c.str("input"), xcol, ycol);
    } else {
        for (const auto& s : run_sweep(c)) {
            const std::map<std::string, double> cols{{"alpha", s.alpha},
                                                     {"beta", s.beta},
                                                     {"ratio_analytic", s.report.ratio_analytic},
                                                     {"cutoff_term", s.report.bound_cutoff_term},
                                                     {"remainder_sup", s.report.bound_remainder_term},
                                                     {"sigma_bound", s.report.sigma_bound}};
            if (ycol == "ratio_direct") {
                if (s.report.ratio_direct) rows.emplace_back(s.N, cols.at(xcol), *s.report.ratio_direct);
                continue;
            }
            if (!cols.count(xcol) || !cols.count(ycol)) usage("cannot fit '" + ycol + "' against '" + xcol + "'");
            rows.emplace_back(s.N, cols.at(xcol), cols.at(ycol));
        }
    }
    json j = json_header(c, "bhpm.fit/1");
    j["x"] = xcol;
    j["y"] = ycol;
    j["invert_x"] = c.flag("invert_x", false);
    j["fits"] = fits_by_order(rows, c.flag("invert_x", false));
    CommandResult r;
    r.files.push_back({out_prefix(c, "fit") + ".json", dump(j)});
    std::string s;
    for (const auto& f : j["fits"]) s += "N=" + f["N"].dump() + " slope " + fmt(f["slope"].get<double>()) + "  ";
    r.summary = s;
    return r;
}

CommandResult cmd_region(const Config& c) {
    c.restrict_to(keys({"example", "potential", "lo", "hi", "n", "eps", "beta_minus", "beta_plus", "alpha_min",
                        "alpha_max", "log_axes"}));
    const int n = c.integer("n", 50);
    if (n < 2) usage("n must be at least 2");
    RegionPair rp;
    if (c.has("example") == c.has("potential")) usage("give exactly one of example (curves) or potential (band)");
    if (c.has("example")) {
        rp = omega_curves(c.str("example"), c.num("lo"), c.num("hi"), n, c.num("eps", 0.01));
    } else {
        const PotentialSpec p = make_potential(c.str("potential"));
        const double bp = c.num("beta_plus");
        rp = omega_band(p, c.num("beta_minus", bp), bp, c.num("alpha_min", 1), c.num("alpha_max", 1e6), n);
    }
    const std::string pre = out_prefix(c, "region");
    CommandResult r;
    r.files.push_back({pre + ".csv", header(c, "bhpm.region/1") + region_csv(rp)});
    r.files.push_back({pre + ".svg", "<!-- bhpm " + std::string(kVersion) + " config " + c.hash() + " -->\n" +
                                         region_svg(rp, c.flag("log_axes", true))});
    r.summary = rp.lower.closed_form + "  ..  " + rp.upper.closed_form;
    return r;
}

CommandResult cmd_check_assumptions(const Config& c) {
    c.restrict_to(keys({"potential", "N", "which", "eps1", "points_per_side", "cap", "growth_tol", "inner"}));
    const PotentialSpec p = make_potential(c.str("potential"));
    const int N = c.integer("N", 0);
    SampleSet g;
    g.points_per_side = c.integer("points_per_side", g.points_per_side);
    g.cap = c.num("cap", g.cap);
    g.growth_tol = c.num("growth_tol", g.growth_tol);
    g.inner = c.num("inner", g.inner);
    const std::string which = c.str("which", "1");
    if (which != "1" && which != "2" && which != "both") usage("which must be 1, 2 or both");

    json j = json_header(c, "bhpm.assumptions/1");
    j["potential"] = p.id;
    j["N"] = N;
    bool ok = true;
    auto add = [&](const char* name, const std::vector<AssumptionReport>& v) {
        json arr = json::array();
        for (const auto& a : v) {
            arr.push_back(assumption_json(a));
            ok = ok && a.pass;
        }
        j[name] = arr;
    };
    if (which != "2") add("assumption1", check_assumption1(p, N, g));
    if (which != "1") {
        std::optional<double> e1;
        if (c.has("eps1")) e1 = c.num("eps1");
        add("assumption2", check_assumption2(p, g, e1));
    }
    j["pass"] = ok;
    CommandResult r;
    r.files.push_back({out_prefix(c, "assumptions") + ".json", dump(j)});
    r.exit_code = ok ? 0 : 3;
    r.summary = std::string(ok ? "all conditions hold" : "some conditions fail") + " for " + p.id;
    return r;
}

CommandResult cmd_semiclassical(const Config& c) {
    c.restrict_to(keys({"potential", "x0", "mu", "N", "h", "width", "sign"}, true));
    const PotentialSpec W = make_potential(c.str("potential"));
    const double x0 = c.num("x0", 0), mu = c.num("mu", 1);
    const auto Ns = orders(c, {0, 1, 2});
    const auto hs = c.nums("h", parse_list("geom(2^-12, 2^-3, 10)"));
    if (hs.empty()) usage("h list is empty");
    for (double h : hs)
        if (!(h > 0)) usage("h must be positive");
    const double width = c.has("width") ? c.num("width") : semiclassical_width(W, x0, mu);
    grid_options(c), direct_options(c);

    struct Job {
        int N;
        double h;
    };
    std::vector<Job> jobs;
    for (int N : Ns)
        for (double h : hs) jobs.push_back({N, h});
    const auto reps = parallel_map<ResidualReport>(jobs.size(), threads(c), [&](std::size_t i) {
        auto pr = problem_semiclassical(W, x0, mu, jobs[i].h, jobs[i].N, width);
        pr.sign = apply_sign(c, pr.sign);
        return evaluate(c, pr);
    });

    std::string csv = header(c, "bhpm.semiclassical/1") +
                      "h,x0,mu,width,N,ratio_analytic,ratio_direct,cutoff_term,remainder_sup,sigma_bound,grid_size\n";
    std::vector<std::tuple<int, double, double>> xy;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& q = reps[i];
        csv += fmt(jobs[i].h) + "," + fmt(x0) + "," + fmt(mu) + "," + fmt(width) + "," + std::to_string(jobs[i].N) +
               "," + fmt(q.ratio_analytic) + "," + (q.ratio_direct ? fmt(*q.ratio_direct) : "") + "," +
               fmt(q.bound_cutoff_term) + "," + fmt(q.bound_remainder_term) + "," + fmt(q.sigma_bound) + "," +
               std::to_string(q.grid_size) + "\n";
        xy.emplace_back(jobs[i].N, jobs[i].h, q.ratio_analytic);
    }
    json j = json_header(c, "bhpm.semiclassical-fit/1");
    j["potential"] = W.id;
    j["width"] = width;
    j["x"] = "1/h";
    json fits = fits_by_order(xy, true);
    for (auto& f : fits) f["rate"] = -f["slope"].get<double>(); // ratio ~ h^rate
    j["fits"] = fits;

    CommandResult r;
    const std::string pre = out_prefix(c, "semiclassical");
    r.files.push_back({pre + ".csv", csv});
    r.files.push_back({pre + ".fit.json", dump(j)});
    std::string s;
    for (const auto& f : fits) s += "N=" + f["N"].dump() + " rate " + fmt(f["rate"].get<double>()) + "  ";
    r.summary = s;
    return r;
}

} // namespace bhpm::cli
