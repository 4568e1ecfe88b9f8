#pragma once

#include "bhpm/jet.hpp"
#include "bhpm/potentials.hpp"

#include <array>
#include <string>

namespace bhpm {

enum class Regime { theorem1, theorem1_decaying, theorem2, semiclassical };

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);

// xi = 1 on (left + band_left, right - band_right), 0 outside (left, right).
struct CutoffSpec {
    Regime regime = Regime::theorem1;
    double left = -1;
    double right = 1;
    double band_left = 0.25;  // Delta^-
    double band_right = 0.25; // Delta^+
    double anchor = 0;        // where the phase is pinned to zero
    double plateau_left() const { return left + band_left; }
    double plateau_right() const { return right - band_right; }
};

// delta^-, delta^+ and the transition widths Delta^-, Delta^+
struct Boundaries {
    double delta_minus = 0;
    double delta_plus = 0;
    double width_minus = 0;
    double width_plus = 0;
};

struct GeometryOptions {
    double eps1 = 0.1;           // unbounded tails
    double eps2 = 0.3;           // bounded tails, in (0, 1/3)
    int bisections = 80;
    double decay_threshold = 0.1; // admissibility of the decaying regime
};

// eta_1, eta_2 from eps_1, eps_2: 4 + e1 = 4/(1 - eta1), 1/3 - e2 = (1 - eta2)/(3 + eta2)
double eta1_from_eps(double eps1);
double eta2_from_eps(double eps2);

// Boundaries for large Re lambda. Bounded tail: delta = alpha^{3/(4-3 eps2)}, Delta = delta/4.
// Unbounded tail: smallest root of |Im V(+-x)|/tau(+-x) = alpha^{(3+eps1)/(4+eps1)}, Delta = eta/tau(delta).
Boundaries solve_boundary_theorem1(const PotentialSpec& p, double alpha, const GeometryOptions& opt = {});

// Largest power of two eta with eta/tau(x) <= |x|^{-nu}/4 over the sampled tail (side = +1 or -1).
double eta_dyadic(const PotentialSpec& p, int side);

// x_beta > 0 with Im V(x_beta) = beta.
double solve_turning_point(const PotentialSpec& p, double beta);

// Delta_beta = eta/tau(x_beta); throws unless x_beta - 2 Delta_beta >= x_beta/2.
double width_theorem2(const PotentialSpec& p, double x_beta);

// |beta| alpha^{(3/4) gamma/(1-gamma)}, which has to be small.
double decaying_admissibility(double alpha, double beta, double gamma);
Boundaries solve_boundary_decaying(const PotentialSpec& p, double alpha, double beta, const GeometryOptions& opt = {});

CutoffSpec cutoff_theorem1(const PotentialSpec& p, double alpha, const GeometryOptions& opt = {});
CutoffSpec cutoff_decaying(const PotentialSpec& p, double alpha, double beta, const GeometryOptions& opt = {});
CutoffSpec cutoff_theorem2(const PotentialSpec& p, double beta);
// Fixed support (x0 - 2 Delta, x0 + 2 Delta) around the sign change of Im W.
CutoffSpec cutoff_semiclassical(double x0, double width);

// xi and its derivatives up to max_deriv (<= 4) at x.
RealJet bump(const CutoffSpec& spec, double x, int max_deriv);

// sup over t of |S^{(j)}(t)| for the unit step, j = 0..4; |xi^{(j)}| <= C_j Delta^{-j}.
const std::array<double, 5>& step_constants();

} // namespace bhpm
