#pragma once

#include "bhpm/jet.hpp"

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bhpm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A catalog potential. `fn` maps a variable jet (x, s, 0, ...) to the jet of V,
// so a stretched variable gives scaled derivatives s^n V^(n)/n! for free.
struct PotentialSpec {
    std::string id;                        // canonical id, e.g. "poly:gamma=2,rho=0,re=0"
    std::string family;                    // part before ':'
    std::map<std::string, double> params;
    std::function<Jet(const Jet&)> fn;
    std::function<Jet(const Jet&)> tau_plus_fn;
    std::function<Jet(const Jet&)> tau_minus_fn;
    double nu_minus = 0, nu_plus = 0;
    bool bounded_minus = true, bounded_plus = true;
    double im_limit_minus = 0, im_limit_plus = 0;   // limits of Im V at -inf / +inf
    double smoothing_halfwidth = 0;
    double domain_lo = -kInf, domain_hi = kInf;     // open interval
    double tail_cap_minus = 1e6, tail_cap_plus = 1e6; // how far tails can be sampled in double
    std::vector<double> features;                   // points with O(1) structure

    Jet eval_jet(double x, int order) const;
    // Jet in the stretched variable x + s t: coefficients s^n V^(n)(x)/n!.
    Jet eval_scaled(double x, int order, double s) const;
    cplx value(double x) const { return eval_jet(x, 0)[0]; }
    double tau_plus(double x) const;
    double tau_minus(double x) const;
    double tau(double x) const { return x >= 0 ? tau_plus(x) : tau_minus(x); }
    bool in_domain(double x) const { return x > domain_lo && x < domain_hi; }
    bool has_left_tail() const { return domain_lo == -kInf; }
};

// Parses ids such as "arctan", "poly:gamma=2,rho=0", "decay:gamma=0.5".
PotentialSpec make_potential(const std::string& id);

// One entry per family with default parameters.
std::vector<PotentialSpec> catalog();
std::vector<std::string> catalog_ids();

struct AssumptionReport {
    std::string condition;          // A1.1, A1.2, A1.3a-tau, ...
    std::string side;               // "-", "+" or ""
    double sample_lo = 0, sample_hi = 0;
    double worst_ratio = 0;         // largest sampled ratio (the fitted implicit constant)
    double growth = 0;              // outer-half max over inner-half max
    double cap = 0;
    bool pass = false;
    std::optional<double> epsilon;  // eps1 / eps2 found by the search
    std::optional<std::pair<double, double>> t_pair;
    std::string note;
};

struct SampleSet {
    double inner = -1;              // start of the tails; <0 means smoothing window + 2
    int points_per_side = 200;
    double cap = 1e3;               // ratio cap for "bounded"
    double growth_tol = 1.1;        // outer-half max may exceed inner-half max by this factor
};

std::vector<AssumptionReport> check_assumption1(const PotentialSpec& p, int N, const SampleSet& grid = {});
std::vector<AssumptionReport> check_assumption2(const PotentialSpec& p, const SampleSet& grid = {},
                                                std::optional<double> eps1 = std::nullopt);

// Geometric sample of one tail, from the inner point out to the tail cap (side = +1 or -1).
std::vector<double> tail_points(const PotentialSpec& p, double side, const SampleSet& g = {});

// Candidate list for eps1 / eps2 searches (8 log-spaced values in [1e-3, 0.3]).
std::vector<double> epsilon_candidates();

} // namespace bhpm
