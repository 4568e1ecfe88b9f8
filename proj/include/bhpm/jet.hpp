#pragma once

// Truncated Taylor series at a point. Coefficients are f^(j)(x)/j!, not raw
// derivatives, so Cauchy products stay well scaled at high order.

#include "bhpm/errors.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <string>

namespace bhpm {

using cplx = std::complex<double>;

inline constexpr int kMaxJetOrder = 16;

namespace detail {
inline double abs_of(double v) { return std::abs(v); }
inline double abs_of(const cplx& v) { return std::abs(v); }
inline bool finite_of(double v) { return std::isfinite(v); }
inline bool finite_of(const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
} // namespace detail

template <class S>
class BasicJet {
public:
    using scalar = S;

    BasicJet() = default;

    BasicJet(double base, int order) : base_(base), order_(order) {
        if (order < 0 || order > kMaxJetOrder)
            throw Error(ErrorKind::structural, "jet order " + std::to_string(order) + " outside [0, 16]");
        c_.fill(S{});
    }

    static BasicJet constant(double base, int order, S value) {
        BasicJet j(base, order);
        j.c_[0] = value;
        return j;
    }
    static BasicJet zero(double base, int order) { return BasicJet(base, order); }
    static BasicJet one(double base, int order) { return constant(base, order, S(1)); }

    // The identity map x -> x, optionally stretched: value x, slope `scale`.
    static BasicJet variable(double base, int order, double scale = 1.0) {
        BasicJet j = constant(base, order, S(base));
        if (order >= 1) j.c_[1] = S(scale);
        return j;
    }

    // From raw derivatives f, f', f'', ...
    template <class Range>
    static BasicJet from_derivatives(double base, const Range& ders) {
        int order = static_cast<int>(std::size(ders)) - 1;
        BasicJet j(base, order);
        double fact = 1.0;
        int k = 0;
        for (const auto& d : ders) {
            if (k > 0) fact *= k;
            j.c_[k] = S(d) / fact;
            ++k;
        }
        return j;
    }

    double base() const { return base_; }
    int order() const { return order_; }

    const S& operator[](int k) const { return c_[k]; }
    S& operator[](int k) { return c_[k]; }

    S value() const { return c_[0]; }
    // k-th raw derivative
    S derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c_[k] * f;
    }

    // Jet of f' (one order lower).
    BasicJet differentiate() const {
        if (order_ == 0) throw Error(ErrorKind::structural, "cannot differentiate an order-0 jet");
        BasicJet d(base_, order_ - 1);
        for (int k = 0; k < order_; ++k) d.c_[k] = c_[k + 1] * double(k + 1);
        return d;
    }

    // Antiderivative with given constant term (one order higher).
    BasicJet integrate(S c0) const {
        BasicJet r(base_, order_ + 1);
        r.c_[0] = c0;
        for (int k = 0; k <= order_; ++k) r.c_[k + 1] = c_[k] / double(k + 1);
        return r;
    }

    BasicJet truncated(int order) const {
        if (order > order_) throw Error(ErrorKind::structural, "cannot raise jet order by truncation");
        BasicJet r(base_, order);
        for (int k = 0; k <= order; ++k) r.c_[k] = c_[k];
        return r;
    }

    bool all_finite() const {
        for (int k = 0; k <= order_; ++k)
            if (!detail::finite_of(c_[k])) return false;
        return true;
    }

    double max_abs() const {
        double m = 0;
        for (int k = 0; k <= order_; ++k) m = std::max(m, detail::abs_of(c_[k]));
        return m;
    }

    BasicJet operator-() const {
        BasicJet r = *this;
        for (int k = 0; k <= order_; ++k) r.c_[k] = -r.c_[k];
        return r;
    }

    BasicJet& operator+=(const BasicJet& o) {
        check_compatible(o);
        for (int k = 0; k <= order_; ++k) c_[k] += o.c_[k];
        return *this;
    }
    BasicJet& operator-=(const BasicJet& o) {
        check_compatible(o);
        for (int k = 0; k <= order_; ++k) c_[k] -= o.c_[k];
        return *this;
    }
    BasicJet& operator*=(const S& s) {
        for (int k = 0; k <= order_; ++k) c_[k] *= s;
        return *this;
    }

    void check_compatible(const BasicJet& o) const {
        if (o.order_ != order_ || o.base_ != base_)
            throw Error(ErrorKind::structural, "jet order/base mismatch");
    }

private:
    double base_ = 0.0;
    int order_ = 0;
    std::array<S, kMaxJetOrder + 1> c_{};
};

using Jet = BasicJet<cplx>;
using RealJet = BasicJet<double>;

template <class S>
BasicJet<S> operator+(BasicJet<S> a, const BasicJet<S>& b) { return a += b; }
template <class S>
BasicJet<S> operator-(BasicJet<S> a, const BasicJet<S>& b) { return a -= b; }
template <class S>
BasicJet<S> operator*(BasicJet<S> a, const S& s) { return a *= s; }
template <class S>
BasicJet<S> operator*(const S& s, BasicJet<S> a) { return a *= s; }
inline Jet operator*(Jet a, double s) { return a *= cplx(s); }
inline Jet operator*(double s, Jet a) { return a *= cplx(s); }

template <class S>
BasicJet<S> operator+(BasicJet<S> a, const S& s) {
    a[0] += s;
    return a;
}
inline Jet operator+(Jet a, double s) {
    a[0] += s;
    return a;
}

template <class S>
BasicJet<S> operator*(const BasicJet<S>& a, const BasicJet<S>& b) {
    a.check_compatible(b);
    BasicJet<S> r(a.base(), a.order());
    for (int k = 0; k <= a.order(); ++k) {
        S s{};
        for (int i = 0; i <= k; ++i) s += a[i] * b[k - i];
        r[k] = s;
    }
    return r;
}

template <class S>
BasicJet<S> scale(const BasicJet<S>& a, const S& s) { return a * s; }

template <class S>
BasicJet<S> pow_int(const BasicJet<S>& a, int p) {
    if (p < 0) throw Error(ErrorKind::structural, "pow_int needs p >= 0");
    BasicJet<S> r = BasicJet<S>::one(a.base(), a.order());
    BasicJet<S> b = a;
    while (p > 0) {
        if (p & 1) r = r * b;
        p >>= 1;
        if (p) b = b * b;
    }
    return r;
}

template <class S>
BasicJet<S> recip(const BasicJet<S>& a) {
    if (detail::abs_of(a[0]) == 0.0)
        throw Error(ErrorKind::division, "reciprocal of a jet with zero constant term");
    BasicJet<S> r(a.base(), a.order());
    S inv = S(1) / a[0];
    r[0] = inv;
    for (int k = 1; k <= a.order(); ++k) {
        S s{};
        for (int i = 1; i <= k; ++i) s += a[i] * r[k - i];
        r[k] = -s * inv;
    }
    return r;
}

template <class S>
BasicJet<S> operator/(const BasicJet<S>& a, const BasicJet<S>& b) { return a * recip(b); }

// Generic power a^r given the base value b0 = a0^r (branch already chosen).
// Recurrence from a*b' = r*a'*b.
template <class S>
BasicJet<S> pow_with_value(const BasicJet<S>& a, double r, const S& b0) {
    if (detail::abs_of(a[0]) == 0.0)
        throw Error(ErrorKind::division, "power of a jet with zero constant term");
    BasicJet<S> b(a.base(), a.order());
    b[0] = b0;
    for (int k = 1; k <= a.order(); ++k) {
        S s{};
        for (int j = 1; j <= k; ++j) s += ((r + 1.0) * j - k) * a[j] * b[k - j];
        b[k] = s / (double(k) * a[0]);
    }
    return b;
}

template <class S>
BasicJet<S> pow(const BasicJet<S>& a, double r) {
    using std::pow;
    return pow_with_value(a, r, S(pow(a[0], r)));
}

template <class S>
BasicJet<S> sqrt(const BasicJet<S>& a) {
    using std::sqrt;
    return pow_with_value(a, 0.5, S(sqrt(a[0])));
}

template <class S>
BasicJet<S> exp(const BasicJet<S>& a) {
    using std::exp;
    BasicJet<S> b(a.base(), a.order());
    b[0] = exp(a[0]);
    for (int k = 1; k <= a.order(); ++k) {
        S s{};
        for (int j = 1; j <= k; ++j) s += double(j) * a[j] * b[k - j];
        b[k] = s / double(k);
    }
    return b;
}

template <class S>
BasicJet<S> log(const BasicJet<S>& a) {
    using std::log;
    if (detail::abs_of(a[0]) == 0.0) throw Error(ErrorKind::division, "log of a jet with zero constant term");
    BasicJet<S> b(a.base(), a.order());
    b[0] = log(a[0]);
    for (int k = 1; k <= a.order(); ++k) {
        S s{};
        for (int j = 1; j < k; ++j) s += double(j) * b[j] * a[k - j];
        b[k] = (a[k] - s / double(k)) / a[0];
    }
    return b;
}

namespace detail {
// (f, g) with f' = g a', g' = sgn f a'. sgn=-1 gives (sin, cos), +1 (sinh, cosh).
template <class S>
void trig_pair(const BasicJet<S>& a, BasicJet<S>& f, BasicJet<S>& g, const S& f0, const S& g0, double sgn) {
    f = BasicJet<S>(a.base(), a.order());
    g = BasicJet<S>(a.base(), a.order());
    f[0] = f0;
    g[0] = g0;
    for (int k = 1; k <= a.order(); ++k) {
        S sf{}, sg{};
        for (int j = 1; j <= k; ++j) {
            sf += double(j) * a[j] * g[k - j];
            sg += double(j) * a[j] * f[k - j];
        }
        f[k] = sf / double(k);
        g[k] = sgn * sg / double(k);
    }
}
} // namespace detail

template <class S>
BasicJet<S> sin(const BasicJet<S>& a) {
    using std::cos;
    using std::sin;
    BasicJet<S> f, g;
    detail::trig_pair(a, f, g, S(sin(a[0])), S(cos(a[0])), -1.0);
    return f;
}
template <class S>
BasicJet<S> cos(const BasicJet<S>& a) {
    using std::cos;
    using std::sin;
    BasicJet<S> f, g;
    detail::trig_pair(a, f, g, S(sin(a[0])), S(cos(a[0])), -1.0);
    return g;
}
template <class S>
BasicJet<S> sinh(const BasicJet<S>& a) {
    using std::cosh;
    using std::sinh;
    BasicJet<S> f, g;
    detail::trig_pair(a, f, g, S(sinh(a[0])), S(cosh(a[0])), 1.0);
    return f;
}
template <class S>
BasicJet<S> cosh(const BasicJet<S>& a) {
    using std::cosh;
    using std::sinh;
    BasicJet<S> f, g;
    detail::trig_pair(a, f, g, S(sinh(a[0])), S(cosh(a[0])), 1.0);
    return g;
}

template <class S>
BasicJet<S> atan(const BasicJet<S>& a) {
    using std::atan;
    if (a.order() == 0) return BasicJet<S>::constant(a.base(), 0, S(atan(a[0])));
    BasicJet<S> one_plus = a * a + S(1);
    BasicJet<S> d = a.differentiate() * recip(one_plus.truncated(a.order() - 1));
    return d.integrate(S(atan(a[0])));
}

template <class S>
BasicJet<S> asinh(const BasicJet<S>& a) {
    using std::asinh;
    if (a.order() == 0) return BasicJet<S>::constant(a.base(), 0, S(asinh(a[0])));
    BasicJet<S> one_plus = a * a + S(1);
    BasicJet<S> d = a.differentiate() * pow(one_plus.truncated(a.order() - 1), -0.5);
    return d.integrate(S(asinh(a[0])));
}

// Principal fourth root, written as an explicit real/imaginary split.
// Throws on the closed negative real axis.
cplx principal_quarter_root(cplx z);

// Jet of a^{1/4} on the principal branch; higher coefficients from w' = w a'/(4a).
Jet quarter_root(const Jet& a);

// Derivative <-> coefficient conversion.
template <class S>
std::array<S, kMaxJetOrder + 1> to_derivatives(const BasicJet<S>& a) {
    std::array<S, kMaxJetOrder + 1> d{};
    for (int k = 0; k <= a.order(); ++k) d[k] = a.derivative(k);
    return d;
}

} // namespace bhpm
