#pragma once

#include "bhpm/jet.hpp"
#include "bhpm/potentials.hpp"

#include <array>
#include <utility>
#include <vector>

namespace bhpm {

struct SpectralParam {
    double alpha = 0;
    double beta = 0;
    cplx lambda() const { return {alpha, beta}; }
};

// Value of R_{lambda,N} at x with the per-k split lambda^{-k} phi_{k+3}.
struct RemainderValue {
    double x = 0;
    cplx value{};
    std::vector<std::pair<int, cplx>> terms;
};

// Everything the pseudomode needs at one point.
struct LocalPhase {
    double x = 0;
    Jet V;                   // V (times the potential scale), order N+3
    std::vector<Jet> dpsi;   // dpsi[k+1] = jet of psi_k', order N+2-k
    std::array<cplx, 5> dP{}; // P', P'', P''', P'''' (index 1..4)
};

// psi_{-1}' = sign * i * lambda^{-1} (lambda - V)^{1/4}
Jet eikonal(const Jet& V, cplx lambda, int sign);
Jet eikonal(const PotentialSpec& p, SpectralParam lam, int sign, double x, int order);

// The WKB phase for fixed (potential, lambda, N, sign). The potential is used as
// v_scale * V, which covers the semiclassical rescaling W/h^4.
class PhaseExpansion {
public:
    PhaseExpansion(PotentialSpec p, cplx lambda, int N, int sign = 1, double v_scale = 1.0);
    PhaseExpansion(PotentialSpec p, SpectralParam lam, int N, int sign = 1)
        : PhaseExpansion(std::move(p), lam.lambda(), N, sign) {}

    int N() const { return N_; }
    int sign() const { return sign_; }
    cplx lambda() const { return lambda_; }
    const PotentialSpec& potential() const { return p_; }
    double v_scale() const { return v_scale_; }

    // lambda^{-k} for k in [-4, 4N]
    cplx lambda_pow(int k) const;

    // Jet depth carried for psi_k'.
    int psi_order(int k) const { return N_ + 2 - k; }
    // Highest V derivative the construction ever touches.
    int v_order() const { return N_ + 3; }

    Jet potential_jet(double x, int order) const;

    // Solve eikonal + transport at x. Throws on the branch cut.
    LocalPhase at(double x) const;

    // Transport step: jet of psi_m' from psi_{-1}', ..., psi_{m-1}' (m >= 0).
    Jet transport(const std::vector<Jet>& known, const Jet& V, int m) const;

    // phi_j at x (coefficient of lambda^{-(j-3)}); uses whatever psi's are solved.
    cplx phi(const LocalPhase& loc, int j) const;
    // phi_j built from an arbitrary list of psi' jets (entries beyond the list are zero).
    Jet phi_jet(const std::vector<Jet>& dpsi, const Jet& V, int j, int order) const;

    // Largest term magnitude in phi_j's assembly, the scale for "phi_j = 0" checks.
    double phi_scale(const LocalPhase& loc, int j) const;

    RemainderValue remainder(const LocalPhase& loc) const;
    RemainderValue remainder(double x) const { return remainder(at(x)); }
    // Closed form for N = 0.
    cplx remainder_n0_closed_form(double x) const;

    // (c3, c2, c1) of the conjugated operator d^4 + c3 d^3 + c2 d^2 + c1 d.
    std::array<cplx, 3> conjugated_coeffs(const LocalPhase& loc) const;

    // P'(x) and P(x) = int_anchor^x P'.
    cplx dphase(double x) const { return at(x).dP[1]; }
    cplx phase(double anchor, double x, double tol = 1e-10) const;

    // Test hook: add `delta` to the value of psi_k' after solving.
    void set_perturbation(int k, cplx delta) {
        perturb_k_ = k;
        perturb_ = delta;
    }

private:
    PotentialSpec p_;
    cplx lambda_;
    int N_;
    int sign_;
    double v_scale_;
    std::vector<cplx> lampow_; // index k+4
    cplx inv4_{};
    int perturb_k_ = -100;
    cplx perturb_{};
};

// Conjugated-operator coefficients from P', P'', P'''.
std::array<cplx, 3> conjugated_coeffs(cplx P1, cplx P2, cplx P3);

} // namespace bhpm
