#include "bhpm/wkb.hpp"

#include "bhpm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bhpm {

namespace {
const cplx I{0.0, 1.0};
}

Jet eikonal(const Jet& V, cplx lambda, int sign) {
    Jet vl = -V + lambda;
    return quarter_root(vl) * (double(sign) * I / lambda);
}

Jet eikonal(const PotentialSpec& p, SpectralParam lam, int sign, double x, int order) {
    return eikonal(p.eval_jet(x, order), lam.lambda(), sign);
}

PhaseExpansion::PhaseExpansion(PotentialSpec p, cplx lambda, int N, int sign, double v_scale)
    : p_(std::move(p)), lambda_(lambda), N_(N), sign_(sign), v_scale_(v_scale) {
    if (N < 0) throw Error(ErrorKind::structural, "N must be non-negative");
    if (N + 3 > kMaxJetOrder) throw Error(ErrorKind::structural, "N too large for the jet order cap");
    if (sign != 1 && sign != -1) throw Error(ErrorKind::structural, "eikonal sign must be +1 or -1");
    if (lambda == cplx(0)) throw Error(ErrorKind::structural, "lambda must be non-zero");
    const cplx inv = cplx(1) / lambda;
    lampow_.assign(4 * N + 5, cplx(1));
    // index k+4 holds lambda^{-k}
    for (int k = 1; k <= 4 * N; ++k) lampow_[k + 4] = lampow_[k + 3] * inv;
    for (int k = -1; k >= -4; --k) lampow_[k + 4] = lampow_[k + 5] * lambda;
    inv4_ = inv * inv * inv * inv;
}

cplx PhaseExpansion::lambda_pow(int k) const {
    if (k < -4 || k > 4 * N_) throw Error(ErrorKind::structural, "lambda power outside the stored range");
    return lampow_[k + 4];
}

Jet PhaseExpansion::potential_jet(double x, int order) const {
    if (order > v_order())
        throw Error(ErrorKind::structural, "requested V derivative beyond order N+3");
    Jet V = p_.eval_jet(x, order);
    if (v_scale_ != 1.0) V *= cplx(v_scale_);
    return V;
}

namespace {

// psi_a^{(m)} truncated to `order`; zero when a is outside the solved range.
struct PsiTable {
    const std::vector<Jet>& dpsi;
    int order;
    std::array<std::vector<Jet>, 5> cache; // cache[m][a+1]
    std::array<std::vector<char>, 5> have;

    PsiTable(const std::vector<Jet>& d, int ord) : dpsi(d), order(ord) {
        for (int m = 1; m <= 4; ++m) {
            cache[m].resize(d.size());
            have[m].assign(d.size(), 0);
        }
    }
    bool present(int a) const { return a >= -1 && a + 1 < int(dpsi.size()); }
    const Jet& get(int a, int m) {
        const size_t i = size_t(a + 1);
        if (!have[m][i]) {
            Jet j = dpsi[i];
            for (int r = 1; r < m; ++r) j = j.differentiate();
            if (j.order() < order)
                throw Error(ErrorKind::structural, "insufficient jet depth for psi_" + std::to_string(a) + " derivative " +
                                                       std::to_string(m));
            cache[m][i] = j.truncated(order);
            have[m][i] = 1;
        }
        return cache[m][i];
    }
};

} // namespace

Jet PhaseExpansion::phi_jet(const std::vector<Jet>& dpsi, const Jet& V, int j, int order) const {
    // phi_{k+3} = -psi_k'''' + 4 sum psi' psi''' + 3 sum psi'' psi'' - 6 sum psi' psi' psi''
    //             + sum psi' psi' psi' psi'  (+ (V - lambda)/lambda^4 when k = -4)
    const int k = j - 3;
    const double x = V.base();
    PsiTable t(dpsi, order);
    const int top = int(dpsi.size()) - 2; // highest solved index
    Jet acc = Jet::zero(x, order);
    if (t.present(k)) acc -= t.get(k, 4);
    for (int a = -1; a <= top; ++a) {
        const int b = k - a;
        if (!t.present(b)) continue;
        acc += 4.0 * (t.get(a, 1) * t.get(b, 3)) + 3.0 * (t.get(a, 2) * t.get(b, 2));
    }
    // pair sums Q[s] = sum_{a+b=s} psi_a' psi_b'
    const int smin = -2, smax = 2 * top;
    std::vector<Jet> Q;
    if (smax >= smin) {
        Q.assign(size_t(smax - smin + 1), Jet::zero(x, order));
        for (int a = -1; a <= top; ++a)
            for (int b = -1; b <= top; ++b) Q[size_t(a + b - smin)] += t.get(a, 1) * t.get(b, 1);
        for (int s = smin; s <= smax; ++s) {
            const int c = k - s;
            if (t.present(c)) acc -= 6.0 * (Q[size_t(s - smin)] * t.get(c, 2));
            if (c >= smin && c <= smax) acc += Q[size_t(s - smin)] * Q[size_t(c - smin)];
        }
    }
    if (j == -1) acc += (V.truncated(order) + (-lambda_)) * inv4_;
    return acc;
}

double PhaseExpansion::phi_scale(const LocalPhase& loc, int j) const {
    const int k = j - 3;
    PsiTable t(loc.dpsi, 0);
    const int top = int(loc.dpsi.size()) - 2;
    auto v = [&](int a, int m) { return std::abs(t.get(a, m)[0]); };
    double s = 0;
    if (t.present(k)) s = std::max(s, v(k, 4));
    for (int a = -1; a <= top; ++a) {
        const int b = k - a;
        if (!t.present(b)) continue;
        s = std::max({s, 4 * v(a, 1) * v(b, 3), 3 * v(a, 2) * v(b, 2)});
    }
    for (int a = -1; a <= top; ++a)
        for (int c = -1; c <= top; ++c) {
            const int d = k - a - c;
            if (t.present(d)) s = std::max(s, 6 * v(a, 1) * v(c, 1) * v(d, 2));
            for (int e = -1; e <= top; ++e) {
                const int f = k - a - c - e;
                if (t.present(f)) s = std::max(s, v(a, 1) * v(c, 1) * v(e, 1) * v(f, 1));
            }
        }
    if (j == -1) s = std::max(s, std::abs((loc.V[0] - lambda_) * inv4_));
    return s;
}

Jet PhaseExpansion::transport(const std::vector<Jet>& known, const Jet& V, int m) const {
    if (int(known.size()) != m + 1) throw Error(ErrorKind::structural, "transport needs psi_{-1}..psi_{m-1}");
    const int order = psi_order(m);
    Jet S = phi_jet(known, V, m, order);
    Jet d = known[0].truncated(order);
    return -(S * recip(4.0 * (d * d * d)));
}

LocalPhase PhaseExpansion::at(double x) const {
    LocalPhase loc;
    loc.x = x;
    loc.V = potential_jet(x, v_order());
    loc.dpsi.reserve(size_t(N_ + 1));
    loc.dpsi.push_back(eikonal(loc.V, lambda_, sign_));
    if (perturb_k_ == -1) loc.dpsi[0][0] += perturb_;
    for (int m = 0; m < N_; ++m) {
        loc.dpsi.push_back(transport(loc.dpsi, loc.V.truncated(psi_order(m)), m));
        if (perturb_k_ == m) loc.dpsi.back()[0] += perturb_;
    }
    for (int r = 1; r <= 4; ++r) {
        cplx s{};
        for (int k = -1; k < N_; ++k) s += lampow_[k + 4] * loc.dpsi[size_t(k + 1)].derivative(r - 1);
        loc.dP[size_t(r)] = s;
    }
    return loc;
}

cplx PhaseExpansion::phi(const LocalPhase& loc, int j) const {
    return phi_jet(loc.dpsi, loc.V.truncated(0), j, 0)[0];
}

RemainderValue PhaseExpansion::remainder(const LocalPhase& loc) const {
    RemainderValue r;
    r.x = loc.x;
    const int kmax = std::max(N_ - 1, 4 * N_ - 4);
    for (int k = N_ - 3; k <= kmax; ++k) {
        const cplx term = lampow_[k + 4] * phi(loc, k + 3);
        r.terms.emplace_back(k, term);
        r.value += term;
    }
    return r;
}

cplx PhaseExpansion::remainder_n0_closed_form(double x) const {
    Jet V = potential_jet(x, 3);
    const cplx v1 = V.derivative(1), v2 = V.derivative(2), v3 = V.derivative(3);
    const cplx vl = lambda_ - V[0];
    const cplx q = principal_quarter_root(vl);
    const double s = sign_;
    return s * I * q * (0.25 * v3 / vl + (9.0 / 16) * v1 * v2 / (vl * vl) + (21.0 / 64) * v1 * v1 * v1 / (vl * vl * vl)) +
           q * q * (v2 / vl + (9.0 / 16) * v1 * v1 / (vl * vl)) + s * I * q * q * q * (-1.5 * v1 / vl);
}

std::array<cplx, 3> conjugated_coeffs(cplx P1, cplx P2, cplx P3) {
    return {-4.0 * P1, 6.0 * (P1 * P1 - P2), -4.0 * (P3 - 3.0 * P1 * P2 + P1 * P1 * P1)};
}

std::array<cplx, 3> PhaseExpansion::conjugated_coeffs(const LocalPhase& loc) const {
    return bhpm::conjugated_coeffs(loc.dP[1], loc.dP[2], loc.dP[3]);
}

cplx PhaseExpansion::phase(double anchor, double x, double tol) const {
    const double floor = 1e-6 * std::abs(x - anchor);
    QuadResult q = integrate_adaptive([this](double t) { return dphase(t); }, anchor, x, tol, tol, floor);
    if (!q.converged)
        throw Error(ErrorKind::accuracy, "phase quadrature did not converge (error estimate " + std::to_string(q.error) + ")");
    return q.value;
}

} // namespace bhpm
