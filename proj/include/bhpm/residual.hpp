#pragma once

#include "bhpm/cutoff.hpp"
#include "bhpm/wkb.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bhpm {

// One pseudomode construction: potential (times v_scale), lambda, N, eikonal sign and cutoff.
// Ratios are multiplied by out_scale, which is h^4 in the semiclassical setting.
struct PseudomodeProblem {
    PotentialSpec potential;
    cplx lambda{};
    int N = 0;
    int sign = 1;
    double v_scale = 1;
    double out_scale = 1;
    CutoffSpec cutoff;
    double sigma_bound = 0; // the theorem's predicted bound for this lambda
    double alpha() const { return lambda.real(); }
    double beta() const { return lambda.imag(); }
};

// +1 when Im V is larger on the right tail than on the left, -1 otherwise.
int natural_sign(const PotentialSpec& p);

PseudomodeProblem problem_theorem1(const PotentialSpec& p, double alpha, double beta, int N,
                                   const GeometryOptions& opt = {});
PseudomodeProblem problem_decaying(const PotentialSpec& p, double alpha, double beta, int N,
                                   const GeometryOptions& opt = {});
PseudomodeProblem problem_theorem2(const PotentialSpec& p, double alpha, double beta, int N, double kappa_c = 1);
// Largest Delta <= cap (halving) such that on (x0 - 2 Delta, x0 + 2 Delta) Im W - Im W(x0) changes sign
// only at x0 and Re(z - W) > 0, z = mu + W(x0).
double semiclassical_width(const PotentialSpec& W, double x0, double mu, double cap = 2);
// H_h - z = h^4 (d^4 + W/h^4 - z/h^4) with z = mu + W(x0); support (x0 - 2 width, x0 + 2 width).
// width <= 0 picks semiclassical_width.
PseudomodeProblem problem_semiclassical(const PotentialSpec& W, double x0, double mu, double h, int N,
                                        double width = 0);

struct GridOptions {
    int base_cells = 2048;     // uniform cells over the support before refinement
    int band_cells = 64;       // minimum cells per transition band
    double rel_tol = 1e-10;    // per-cell Simpson/trapezoid gap relative to the total
    double phase_tol = 1e-10;  // per-cell error of the integrated Re P
    double skip_log = 50;      // cells this far (in log) below the peak are not refined for the norms
    std::size_t max_points = std::size_t(1) << 22;
    double log_offset = 0;     // multiplies the whole pseudomode by e^{log_offset}
};

// Psi = xi e^{-P} in log form on the adaptive grid.
struct SampledPseudomode {
    std::vector<double> grid;
    std::vector<double> log_magnitude; // -Re P + log xi (+ log_offset), -inf where xi = 0
    std::vector<double> phase;         // -Im P
    double normalization_shift = 0;    // max of log_magnitude
};

struct ResidualReport {
    cplx lambda{};
    int N = 0;
    std::string regime;
    double ratio_analytic = 0;
    std::optional<double> ratio_direct;
    double bound_cutoff_term = 0;    // ||e^{-P} D xi|| / ||Psi||
    double bound_remainder_term = 0; // sup |R| over the support
    double sigma_bound = 0;
    std::size_t grid_size = 0;
    double quadrature_error_estimate = 0;
    double log_norm = 0;             // log ||Psi||
};

// log of an L2 norm, computed with the largest sample factored out
struct LogNorm {
    double shift = 0;  // max log|f|
    double scaled = 0; // ||f e^{-shift}||
    double log() const;
    double value() const;
};

// Composite Simpson on |f|^2 for samples given as log|f| (-inf allowed) on a strictly increasing grid.
LogNorm l2_norm(const std::vector<double>& grid, const std::vector<double>& log_abs);

SampledPseudomode assemble(const PseudomodeProblem& prob, const GridOptions& opt = {});
ResidualReport residual_analytic(const PseudomodeProblem& prob, const GridOptions& opt = {});

struct DirectOptions {
    int points_per_wavelength = 40;
    int points_per_band = 256;
    std::size_t max_points = std::size_t(1) << 22;
    double log_offset = 0;
};
// ||(d^4 + V - lambda) Psi|| / ||Psi|| on a uniform grid with the 11-point stencil; empty when the
// step requirement does not fit in max_points.
std::optional<double> residual_direct(const PseudomodeProblem& prob, const DirectOptions& opt = {});

// Analytic report plus the direct oracle.
ResidualReport residual_both(const PseudomodeProblem& prob, const GridOptions& g = {}, const DirectOptions& d = {});

// 8th-order central fourth derivative at interior index i (5 neighbours each side).
template <class T, class Vec>
T fourth_derivative_stencil(const Vec& f, std::size_t i, double h) {
    static constexpr long double w[] = {-41.0L / 7560, 1261.0L / 15120, -541.0L / 840, 4369.0L / 1260,
                                        -1669.0L / 180, 1529.0L / 120};
    T acc = T(w[5]) * f[i];
    for (std::size_t k = 1; k <= 5; ++k) acc += T(w[5 - k]) * (f[i + k] + f[i - k]);
    T hh = T(h);
    return acc / (hh * hh * hh * hh);
}

struct FitResult {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
    std::size_t used = 0;
    double dropped_below = 0; // scales below this were dropped (0 when nothing was)
};

// Least-squares fit of log ratio against log scale; drops the lowest decade once if r^2 < 0.99.
FitResult fit_decay_exponent(const std::vector<std::pair<double, double>>& sweep);

} // namespace bhpm
