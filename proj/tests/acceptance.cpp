// Acceptance run: one PASS/FAIL line per criterion, measured numbers alongside.
// Exit status is the number of failed criteria (capped at 100).
#include "commands.hpp"
#include "pool.hpp"

#include "bhpm/regions.hpp"
#include "bhpm/residual.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace bhpm;
using cli::fmt;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    std::vector<std::string> notes; // printed indented under the criterion line
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = f();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("threw: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = s <= budget_s;
    const bool ok = o.pass && in_time;
    if (!ok) ++failures;
    char t[64];
    std::snprintf(t, sizeof t, "%.1f s of %.0f s%s", s, budget_s, in_time ? "" : " OVER BUDGET");
    std::printf("[%s] %2d %s: %s (%s)\n", ok ? "PASS" : "FAIL", id, name, o.detail.c_str(), t);
    for (const auto& n : o.notes) std::printf("         %s\n", n.c_str());
    std::fflush(stdout);
}

double u01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

std::string g3(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

std::string f3(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3f", v);
    return b;
}

const unsigned kThreads = cli::default_threads();

std::vector<double> geom(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
    return v;
}

// ratio_analytic over alphas for each N (analytic pipeline), problem factory given
using Factory = std::function<PseudomodeProblem(double alpha, int N)>;
std::vector<std::vector<double>> sweep(const Factory& make, const std::vector<double>& alphas,
                                       const std::vector<int>& Ns) {
    const std::size_t na = alphas.size();
    auto flat = cli::parallel_map<double>(na * Ns.size(), kThreads, [&](std::size_t i) {
        return residual_analytic(make(alphas[i % na], Ns[i / na])).ratio_analytic;
    });
    std::vector<std::vector<double>> out(Ns.size());
    for (std::size_t i = 0; i < flat.size(); ++i) out[i / na].push_back(flat[i]);
    return out;
}

FitResult fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < xs.size(); ++i) pts.emplace_back(xs[i], ys[i]);
    return fit_decay_exponent(pts);
}

// random (potential, lambda, x) with lambda - V away from the cut
struct Draw {
    PotentialSpec p;
    cplx lambda;
    double x;
};

Draw draw(std::mt19937_64& rng, const std::vector<PotentialSpec>& ps, double alo, double ahi) {
    for (;;) {
        const PotentialSpec& p = ps[rng() % ps.size()];
        const double a = alo * std::pow(ahi / alo, u01(rng));
        const double b = 1.8 * u01(rng) - 0.9;
        const double xlo = std::max(-4.0, std::isfinite(p.domain_lo) ? p.domain_lo + 1e-3 : -4.0);
        const double xhi = std::min(4.0, std::isfinite(p.domain_hi) ? p.domain_hi - 1e-3 : 4.0);
        const double x = xlo + (xhi - xlo) * u01(rng);
        if (std::abs(p.value(x)) < 0.5 * a) return {p, {a, b}, x};
    }
}

std::vector<PotentialSpec> potentials(std::initializer_list<const char*> ids) {
    std::vector<PotentialSpec> v;
    for (const char* id : ids) v.push_back(make_potential(id));
    return v;
}

const std::vector<double> kAlphas5 = geom(1e2, 1e6, 9);
const std::vector<int> kN4{0, 1, 2, 3};

} // namespace

int main() {
    std::printf("bhpm %s acceptance run, %u worker threads\n", cli::kVersion, kThreads);
    const PotentialSpec arctan = make_potential("arctan");

    criterion(1, "transport self-consistency", 10, [] {
        const auto checks =
            cli::verify_transport({"arctan", "exp-shift", "log", "poly:gamma=2", "superexp"}, 4, 200, 20240601);
        double worst = 0;
        Outcome o;
        for (const auto& c : checks) {
            const double m = *std::max_element(c.worst.begin(), c.worst.end());
            worst = std::max(worst, m);
            o.notes.push_back(c.potential + ": " + std::to_string(c.points) + " points, max " + g3(m));
        }
        o.pass = worst <= 1e-9;
        o.detail = "max relative |phi_k|, k = -1..3, N = 4: " + g3(worst) + " (need <= 1e-9)";
        return o;
    });

    criterion(2, "eikonal identity", 5, [] {
        std::mt19937_64 rng(2);
        const auto ps = potentials({"arctan", "exp-shift", "log", "poly:gamma=2", "superexp", "xsqrt",
                                    "decay:gamma=0.5", "ilog", "superexp2", "isinh"});
        double worst = 0;
        for (int t = 0; t < 1000; ++t) {
            const Draw d = draw(rng, ps, 1, 1e4);
            const cplx psi = eikonal(d.p, {d.lambda.real(), d.lambda.imag()}, t % 2 ? 1 : -1, d.x, 0)[0];
            const cplx V = d.p.value(d.x);
            const cplx lhs = std::pow(d.lambda, 4) * std::pow(psi, 4) + V - d.lambda;
            worst = std::max(worst, std::abs(lhs) / std::abs(d.lambda - V));
        }
        return Outcome{worst <= 1e-10, "1000 triples, max |lambda^4 psi'^4 + V - lambda| / |lambda - V| " + g3(worst) +
                                           " (need <= 1e-10)"};
    });

    criterion(3, "N = 0 remainder cross-check", 5, [] {
        std::mt19937_64 rng(3);
        Outcome o;
        double worst = 0;
        for (const char* id : {"arctan", "exp-shift", "log", "poly:gamma=2", "superexp", "xsqrt", "ilog"}) {
            const auto ps = potentials({id});
            double w = 0;
            for (int t = 0; t < 100; ++t) {
                const Draw d = draw(rng, ps, 1, 1e3);
                PhaseExpansion pe(d.p, d.lambda, 0);
                const cplx closed = pe.remainder_n0_closed_form(d.x);
                const cplx sum = pe.remainder(d.x).value;
                w = std::max(w, std::abs(closed - sum) / std::max(std::abs(closed), 1e-300));
            }
            o.notes.push_back(std::string(id) + ": " + g3(w));
            worst = std::max(worst, w);
        }
        o.pass = worst <= 1e-12;
        o.detail = "closed form vs phi-sum, 100 points per potential, max relative gap " + g3(worst) + " (need <= 1e-12)";
        return o;
    });

    criterion(4, "analytic vs direct residual", 60, [&] {
        struct Job {
            double lambda;
            int N;
        };
        std::vector<Job> jobs;
        for (double l : {50.0, 100.0, 200.0})
            for (int N : {0, 2}) jobs.push_back({l, N});
        const auto gaps = cli::parallel_map<double>(jobs.size(), kThreads, [&](std::size_t i) {
            const auto r = residual_both(problem_theorem1(arctan, jobs[i].lambda, 0, jobs[i].N));
            if (!r.ratio_direct) return kInf;
            return std::abs(*r.ratio_direct - r.ratio_analytic) / r.ratio_analytic;
        });
        Outcome o;
        double worst = 0;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            worst = std::max(worst, gaps[i]);
            o.notes.push_back("lambda " + fmt(jobs[i].lambda) + ", N " + std::to_string(jobs[i].N) + ": " + g3(gaps[i]));
        }
        o.pass = worst <= 1e-4;
        o.detail = "arctan, max relative gap " + g3(worst) + " (need <= 1e-4)";
        return o;
    });

    std::vector<double> slopes0(4, NAN);
    criterion(5, "large-alpha rate, arctan", 300, [&] {
        const auto r = sweep([&](double a, int N) { return problem_theorem1(arctan, a, 0, N); }, kAlphas5, kN4);
        Outcome o;
        o.pass = true;
        std::string d = "slopes";
        for (int N : kN4) {
            const FitResult f = fit(kAlphas5, r[size_t(N)]);
            slopes0[size_t(N)] = f.slope;
            const double want = -(N + 1) / 4.0;
            const bool ok = std::abs(f.slope - want) <= 0.15 && f.r2 >= 0.98;
            o.pass = o.pass && ok;
            d += " N" + std::to_string(N) + " " + f3(f.slope) + " (want " + f3(want) + ", r2 " + f3(f.r2) + ")";
        }
        o.detail = d;
        // the cutoff term dominates at these alpha; sup |R| shows the predicted power
        auto sup = cli::parallel_map<double>(kAlphas5.size() * 4, kThreads, [&](std::size_t i) {
            return residual_analytic(problem_theorem1(arctan, kAlphas5[i % 9], 0, int(i / 9))).bound_remainder_term;
        });
        std::string s = "sup |R| slopes:";
        for (int N : kN4) {
            std::vector<double> ys(sup.begin() + N * 9, sup.begin() + N * 9 + 9);
            s += " N" + std::to_string(N) + " " + f3(fit(kAlphas5, ys).slope);
        }
        o.notes.push_back(s);
        return o;
    });

    criterion(6, "band freedom, beta = +-0.5", 600, [&] {
        Outcome o;
        o.pass = true;
        std::string d;
        for (double beta : {-0.5, 0.5}) {
            const auto r =
                sweep([&](double a, int N) { return problem_theorem1(arctan, a, beta, N); }, kAlphas5, kN4);
            d += "beta " + fmt(beta) + ":";
            for (int N : kN4) {
                const double s = fit(kAlphas5, r[size_t(N)]).slope;
                const bool ok = std::abs(s - slopes0[size_t(N)]) <= 0.15;
                o.pass = o.pass && ok;
                d += " N" + std::to_string(N) + " " + f3(s);
            }
            d += "; ";
        }
        o.detail = d + "need within 0.15 of the beta = 0 slopes";
        return o;
    });

    criterion(7, "semiclassical rate, W = ix", 120, [] {
        Outcome o;
        o.pass = true;
        const std::vector<double> hs = geom(std::ldexp(1.0, -12), std::ldexp(1.0, -3), 10);
        std::vector<double> inv;
        for (double h : hs) inv.push_back(1 / h);
        auto rates = [&](const char* id) {
            const PotentialSpec W = make_potential(id);
            const double width = semiclassical_width(W, 0, 1);
            const auto r = sweep([&](double h, int N) { return problem_semiclassical(W, 0, 1, h, N, width); }, hs,
                                 {0, 1, 2});
            std::vector<FitResult> fs;
            for (int N = 0; N < 3; ++N) fs.push_back(fit(inv, r[size_t(N)]));
            return std::make_pair(width, fs);
        };
        const auto [w, fs] = rates("ipow:p=1");
        std::string d = "width " + fmt(w) + ", rate of ratio in h:";
        for (int N = 0; N < 3; ++N) {
            const double rate = -fs[size_t(N)].slope;
            o.pass = o.pass && std::abs(rate - (N + 1)) <= 0.15 && fs[size_t(N)].r2 >= 0.98;
            d += " N" + std::to_string(N) + " " + f3(rate) + " (r2 " + f3(fs[size_t(N)].r2) + ")";
        }
        o.detail = d + "; need N+1 +- 0.15";
        const auto [ws, gs] = rates("isinh");
        std::string s = "i sinh x, width " + fmt(ws) + ":";
        for (int N = 0; N < 3; ++N) s += " N" + std::to_string(N) + " " + f3(-gs[size_t(N)].slope);
        o.notes.push_back(s);
        return o;
    });

    criterion(8, "large-Im-lambda construction, poly gamma = 2", 300, [] {
        const PotentialSpec p = make_potential("poly:gamma=2");
        const std::vector<double> betas = geom(10, 1e3, 9);
        Outcome o;
        double xerr = 0;
        for (double b : betas) xerr = std::max(xerr, std::abs(solve_turning_point(p, b) / std::sqrt(b) - 1));
        struct Row {
            double ratio, bound;
        };
        auto rows = cli::parallel_map<Row>(betas.size() * 4, kThreads, [&](std::size_t i) {
            const double b = betas[i % betas.size()];
            const int N = int(i / betas.size());
            const auto pr = problem_theorem2(p, b, b, N);
            const auto t = theorem2_bounds(p, b, b, N);
            return Row{residual_analytic(pr).ratio_analytic, t.kappa + t.sigma};
        });
        // N = 2 is the reported setting; the other orders are listed for comparison
        bool main_ok = false;
        std::string main_detail;
        for (int N = 0; N < 4; ++N) {
            bool dec = true;
            double lo = kInf, hi = 0;
            for (std::size_t k = 0; k < betas.size(); ++k) {
                const Row& r = rows[size_t(N) * betas.size() + k];
                if (k > 0 && !(r.ratio < rows[size_t(N) * betas.size() + k - 1].ratio)) dec = false;
                lo = std::min(lo, r.ratio / r.bound);
                hi = std::max(hi, r.ratio / r.bound);
            }
            const bool ok = dec && hi / lo <= 10;
            const std::string line = "N" + std::to_string(N) + ": ratio decreasing " + (dec ? "yes" : "no") +
                                     ", ratio/(kappa+sigma) in [" + g3(lo) + ", " + g3(hi) + "], spread " +
                                     g3(hi / lo) + (ok ? "" : " (would fail)");
            if (N == 2) {
                main_ok = ok;
                main_detail = line;
            } else {
                o.notes.push_back(line);
            }
        }
        o.pass = xerr <= 1e-10 && main_ok;
        o.detail = "x_beta vs beta^(1/2) max rel " + g3(xerr) + "; " + main_detail + " (need <= 10)";
        return o;
    });

    criterion(9, "decaying potential rate, gamma = 1/2", 120, [] {
        const PotentialSpec p = make_potential("decay:gamma=0.5");
        const std::vector<double> as = geom(1e2, 1e5, 7);
        const auto r = sweep([&](double a, int N) { return problem_decaying(p, a, 0, N); }, as, {0, 1, 2});
        Outcome o;
        const FitResult f = fit(as, r[2]);
        o.pass = std::abs(f.slope + 0.75) <= 0.2;
        o.detail = "N2 slope " + f3(f.slope) + " (want -0.750 +- 0.2, r2 " + f3(f.r2) + ")";
        o.notes.push_back("N0 slope " + f3(fit(as, r[0]).slope) + ", N1 slope " + f3(fit(as, r[1]).slope));
        return o;
    });

    criterion(10, "region curve transcription", 5, [] {
        struct Fig {
            const char* id;
            double lo, hi;
            std::function<double(double)> lower, upper;
        };
        const double e = 0.01, k = 4.0 / 3 - e;
        const std::vector<Fig> figs{
            {"log", 1, 10, [](double b) { return std::pow(b, 0.8) * std::exp(-0.8 * b); },
             [&](double b) { return std::pow(b, k) * std::exp(k * b); }},
            {"poly:gamma=0.5", 1, 100, [](double b) { return std::pow(b, -0.8); },
             [&](double b) { return std::pow(b, 4 - e); }},
            {"poly:gamma=2", 1, 100, [&](double b) { return std::pow(b, 0.4 + e); },
             [&](double b) { return std::pow(b, 2 - e); }},
            {"superexp2", 1e5, 1e10, [&](double b) { return std::pow(b, 0.8 + e) * std::pow(std::log(b), 0.8); },
             [&](double b) { return std::pow(b / std::log(b), k); }},
            {"decay:gamma=0.5", 1, 100, [&](double a) { return -std::pow(a, -0.75 - e); },
             [&](double a) { return std::pow(a, -0.75 - e); }},
        };
        double worst = 0;
        for (const auto& f : figs) {
            const RegionPair r = omega_curves(f.id, f.lo, f.hi, 50, e);
            if (r.lower.samples.size() != 50 || r.upper.samples.size() != 50) return Outcome{false, "wrong sample count"};
            for (std::size_t i = 0; i < 50; ++i) {
                const auto [a0, b0] = r.lower.samples[i];
                const auto [a1, b1] = r.upper.samples[i];
                const double t = r.by_beta ? b0 : a0;
                const double lo = r.by_beta ? a0 : b0, hi = r.by_beta ? a1 : b1;
                worst = std::max(worst, std::abs(lo - f.lower(t)) / std::abs(f.lower(t)));
                worst = std::max(worst, std::abs(hi - f.upper(t)) / std::abs(f.upper(t)));
            }
        }
        return Outcome{worst <= 1e-12, "5 figures x 50 points, max relative gap " + g3(worst) + " (need <= 1e-12)"};
    });

    criterion(11, "norm stability under e^-500", 60, [&] {
        std::vector<PseudomodeProblem> probs{problem_theorem1(arctan, 200, 0, 2),
                                             problem_theorem1(make_potential("exp-shift"), 1e3, 0.2, 1),
                                             problem_decaying(make_potential("decay:gamma=0.5"), 300, 0, 1),
                                             problem_theorem2(make_potential("poly:gamma=2"), 100, 100, 2),
                                             problem_semiclassical(make_potential("ipow:p=1"), 0, 1, 1.0 / 32, 1)};
        const auto gaps = cli::parallel_map<double>(probs.size(), kThreads, [&](std::size_t i) {
            GridOptions g;
            g.log_offset = -500;
            DirectOptions d;
            d.log_offset = -500;
            const auto a = residual_analytic(probs[i]), b = residual_analytic(probs[i], g);
            double w = std::max(std::abs(b.ratio_analytic / a.ratio_analytic - 1),
                                std::abs(b.bound_cutoff_term / a.bound_cutoff_term - 1));
            const auto da = residual_direct(probs[i]), db = residual_direct(probs[i], d);
            if (da && db) w = std::max(w, std::abs(*db / *da - 1));
            if (bool(da) != bool(db)) w = kInf;
            return w;
        });
        const double worst = *std::max_element(gaps.begin(), gaps.end());
        return Outcome{worst <= 1e-10,
                       "5 problems, analytic and direct ratios, max relative change " + g3(worst) + " (need <= 1e-10)"};
    });

    criterion(12, "negative controls", 300, [&] {
        const auto r = sweep(
            [&](double a, int N) {
                auto pr = problem_theorem1(arctan, a, 0, N);
                pr.sign = -pr.sign;
                return pr;
            },
            kAlphas5, kN4);
        Outcome o;
        bool flat = true;
        std::string d = "flipped sign slopes";
        for (int N : kN4) {
            const FitResult f = fit(kAlphas5, r[size_t(N)]);
            flat = flat && f.slope > -0.05;
            d += " N" + std::to_string(N) + " " + f3(f.slope);
        }
        d += " (need > -0.05)";
        const auto rep = check_assumption1(make_potential("decay:gamma=0.5"), 2);
        std::string failed;
        for (const auto& a : rep)
            if (!a.pass) failed += (failed.empty() ? "" : " ") + a.condition + a.side;
        bool sign_fails = false; // A1.1 is the Im V limit / sign condition
        for (const auto& a : rep) sign_fails = sign_fails || (a.condition == "A1.1" && !a.pass);
        d += std::string("; decaying potential assumption check ") + (sign_fails ? "fails on " + failed : "passes");
        o.pass = flat && sign_fails;
        o.detail = d;
        return o;
    });

    std::printf("%d of 12 criteria failed\n", failures);
    return std::min(failures, 100);
}
