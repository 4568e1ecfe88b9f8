#pragma once

#include "bhpm/cutoff.hpp"
#include "bhpm/potentials.hpp"

#include <string>
#include <utility>
#include <vector>

namespace bhpm {

// Boundary of a pseudospectral region as sampled (alpha, beta) points.
struct RegionCurve {
    std::string label;
    std::vector<std::pair<double, double>> samples; // (alpha, beta)
    std::string closed_form;
};

struct RegionPair {
    RegionCurve lower;
    RegionCurve upper;
    bool by_beta = true; // curves are alpha(beta); false for beta(alpha)
};

// Horizontal lines beta = -beta_minus and beta = beta_plus for alpha in [alpha_min, alpha_max].
// Throws a regime error unless -beta_minus and beta_plus sit strictly inside the limits of Im V.
RegionPair omega_band(const PotentialSpec& p, double beta_minus, double beta_plus, double alpha_min,
                      double alpha_max = 1e6, int n = 50);

// Closed-form boundaries of the large-Im-lambda examples, as alpha(beta):
//   "log" (or "ilog"): beta^{4/5} e^{-4 beta/5} .. beta^{4/3-eps} e^{(4/3-eps) beta}
//   "poly:gamma=g":    beta^{(4/5)(1-1/g) [+eps if g > 1]} .. beta^{(4/3)(1+1/g) - eps}
//   "superexp2":       beta^{4/5+eps} ln(beta)^{4/5} .. (beta/ln beta)^{4/3-eps}
// and for "decay:gamma=g" as beta(alpha) = -+ alpha^{-(3/4) g/(1-g) - eps}.
double omega_lower(const std::string& example, double t, double eps = 0.01);
double omega_upper(const std::string& example, double t, double eps = 0.01);
// Sampled at n geometric points of the parameter (beta, or alpha for "decay") in [lo, hi].
RegionPair omega_curves(const std::string& example, double lo, double hi, int n = 50, double eps = 0.01);

// Columns beta,alpha_lower,alpha_upper (or alpha,beta_lower,beta_upper when !by_beta).
std::string region_csv(const RegionPair& r);
// Both curves with the region between them shaded.
std::string region_svg(const RegionPair& r, bool log_axes = true);

struct Sigma1 {
    double minus = 0;
    double plus = 0;
};
// alpha^{-(N+1)/4} sup tau^{N+1}|V| over [-delta^-, 0] and [0, delta^+].
Sigma1 theorem1_sigma(const PotentialSpec& p, double alpha, int N, const GeometryOptions& opt = {});
// sup of tau^{N+1}|V| over [a, b] (0 <= a < b) on one side, dense sampling plus refinement near the max
double sup_tau_v(const PotentialSpec& p, int side, double a, double b, int N);

struct Theorem2Bounds {
    double x_beta = 0;
    double kappa = 1;
    double kappa_exponent = 0; // Im V'(x_beta) tau(x_beta)^{-2} / (|alpha|^{3/4} + beta^{3/4})
    double kappa_c = 1;
    double sigma = 0;
    int sigma_terms = 0;
    bool admissible = true;
    std::string note;
};
// Throws a regime error when the admissibility sampling on J_beta fails, unless require_admissible is false.
Theorem2Bounds theorem2_bounds(const PotentialSpec& p, double alpha, double beta, int N, double c = 1,
                               double eps1 = 0.1, bool require_admissible = true);

// Theorem-2 alpha window [beta tau(x_beta)]^{4/5} .. [beta/tau(x_beta)]^{(4+eps1)/(3+eps1)}.
std::pair<double, double> theorem2_alpha_window(const PotentialSpec& p, double beta, double eps1 = 0.1);

struct SymbolSample {
    double x = 0;
    double xi = 0;
    cplx z{};
    bool in_lambda = false;       // xi != 0 and Im W'(x) != 0
    bool in_lambda_tilde = false; // xi != 0 and the first non-zero Im W^{(j)}, j >= 1, has odd j <= 2 p_max + 1
    int p = -1;                   // that odd order is 2p+1
};

// z = xi^4 + W(x) over the tensor grid xs x xis (row-major in x).
std::vector<SymbolSample> semiclassical_lambda(const PotentialSpec& W, const std::vector<double>& xs,
                                               const std::vector<double>& xis, int p_max = 3);
// Nearest eligible sample within `threshold` of z; threshold <= 0 means twice the local grid spacing.
bool symbol_set_contains(const std::vector<SymbolSample>& cloud, std::size_t nx, std::size_t nxi, cplx z,
                         bool tilde = false, double threshold = 0);

} // namespace bhpm
