#include "doctest.h"

#include "bhpm/cutoff.hpp"

#include <cmath>

using namespace bhpm;

TEST_CASE("bounded tails use the closed form") {
    auto p = make_potential("arctan");
    for (double e2 : {0.05, 0.2, 0.3}) {
        GeometryOptions o;
        o.eps2 = e2;
        for (double a : {1e2, 1e4, 1e6}) {
            auto b = solve_boundary_theorem1(p, a, o);
            const double closed = std::pow(a, 3 / (4 - 3 * e2));
            CHECK(b.delta_plus == doctest::Approx(closed).epsilon(1e-14));
            CHECK(b.delta_minus == doctest::Approx(closed).epsilon(1e-14));
            // same thing written through eta_2
            CHECK(b.delta_plus == doctest::Approx(std::pow(a, (3 + eta2_from_eps(e2)) / 4)).epsilon(1e-12));
            CHECK(b.width_plus == doctest::Approx(b.delta_plus / 4));
        }
    }
    CHECK(eta1_from_eps(0.1) == doctest::Approx(0.1 / 4.1));
    // 4 + e1 = 4/(1 - eta1)
    CHECK(4 / (1 - eta1_from_eps(0.37)) == doctest::Approx(4.37));
    // 1/3 - e2 = (1 - eta2)/(3 + eta2)
    const double h = eta2_from_eps(0.21);
    CHECK((1 - h) / (3 + h) == doctest::Approx(1.0 / 3 - 0.21));
}

TEST_CASE("exponential tail boundary") {
    auto p = make_potential("exp-shift");
    for (double e1 : {0.01, 0.1}) {
        GeometryOptions o;
        o.eps1 = e1;
        for (double a : {10.0, 1e3, 1e5}) {
            auto b = solve_boundary_theorem1(p, a, o);
            INFO("alpha " << a);
            CHECK(b.delta_plus == doctest::Approx(std::log1p(std::pow(a, (3 + e1) / (4 + e1)))).epsilon(1e-12));
            CHECK(b.width_plus <= b.delta_plus / 4);
            CHECK(b.width_plus == doctest::Approx(0.25)); // tau = 1, nu = 0: eta = 1/4
            CHECK(b.delta_minus == doctest::Approx(std::pow(a, 3 / (4 - 3 * o.eps2))));
        }
    }
}

TEST_CASE("boundaries grow with alpha") {
    for (const char* id : {"arctan", "exp-shift", "log", "poly:gamma=2", "superexp"}) {
        auto p = make_potential(id);
        double prev_m = 0, prev_p = 0;
        for (double a = 10; a < 2e6; a *= 2) {
            auto b = solve_boundary_theorem1(p, a);
            INFO(id << " alpha " << a);
            CHECK(b.delta_plus >= prev_p);
            CHECK(b.delta_minus >= prev_m);
            CHECK(b.width_plus <= b.delta_plus / 4);
            CHECK(b.width_minus <= b.delta_minus / 4);
            prev_p = b.delta_plus;
            prev_m = b.delta_minus;
        }
    }
    CHECK_THROWS_AS(solve_boundary_theorem1(make_potential("ilog"), 100), Error);
}

TEST_CASE("turning points") {
    auto lg = make_potential("ilog");
    auto pl = make_potential("poly:gamma=2");
    auto p3 = make_potential("poly:gamma=1.5");
    auto se = make_potential("superexp2");
    for (double b : {3.0, 10.0, 100.0, 1e3, 1e5}) {
        INFO("beta " << b);
        if (b <= 100) CHECK(solve_turning_point(lg, b) == doctest::Approx(std::exp(b)).epsilon(1e-12));
        CHECK(solve_turning_point(pl, b) == doctest::Approx(std::sqrt(b)).epsilon(1e-12));
        CHECK(solve_turning_point(p3, b) == doctest::Approx(std::pow(b, 1 / 1.5)).epsilon(1e-12));
        CHECK(solve_turning_point(se, b) == doctest::Approx(std::log(std::log(b))).epsilon(1e-12));
        for (const auto* p : {&lg, &pl, &se}) {
            if (p == &lg && b > 100) continue;
            const double x = solve_turning_point(*p, b);
            CHECK(std::abs(p->value(x).imag() - b) <= 1e-10 * (1 + b));
        }
    }
    CHECK_THROWS_AS(solve_turning_point(se, 0.5), Error);
    CHECK_THROWS_AS(solve_turning_point(make_potential("arctan"), 5), Error);
}

TEST_CASE("theorem 2 widths") {
    auto pl = make_potential("poly:gamma=2");
    CHECK(eta_dyadic(pl, 1) == 0.125);
    for (double b : {10.0, 1e2, 1e3, 1e4}) {
        const double x = solve_turning_point(pl, b);
        const double d = width_theorem2(pl, x);
        CHECK(d == doctest::Approx(0.125 * std::sqrt(1 + x * x)));
        CHECK(d / x == doctest::Approx(0.125).epsilon(0.02));
        CHECK(x - 2 * d >= x / 2);
    }
    auto se = make_potential("superexp2");
    const double eta = eta_dyadic(se, 1);
    // x_beta = ln ln 10 is not yet in the tail where eta/tau <= 1/4
    CHECK_THROWS_AS(width_theorem2(se, solve_turning_point(se, 10.0)), Error);
    for (double b : {1e3, 1e5, 1e8}) {
        const double x = solve_turning_point(se, b);
        const double d = width_theorem2(se, x);
        CHECK(d == doctest::Approx(eta / std::log(b)).epsilon(1e-9));
        CHECK(x - 2 * d >= x / 2);
    }
    auto lg = make_potential("ilog");
    for (double b : {5.0, 20.0}) {
        auto s = cutoff_theorem2(lg, b);
        CHECK(s.anchor == doctest::Approx(std::exp(b)));
        CHECK(s.left >= s.anchor / 2);
        CHECK(s.right - s.left == doctest::Approx(4 * s.band_left));
    }
}

TEST_CASE("decaying boundaries") {
    auto p = make_potential("decay:gamma=0.5");
    auto b0 = solve_boundary_decaying(p, 256, 0);
    CHECK(b0.delta_plus == doctest::Approx(65536));
    CHECK(b0.delta_minus == doctest::Approx(65536));
    CHECK(b0.width_plus == doctest::Approx(65536 / 4.0));
    auto b1 = solve_boundary_decaying(p, 256, 1e-6);
    CHECK(b1.delta_plus == doctest::Approx(6.4e7));
    CHECK(decaying_admissibility(1e4, 1e-2, 0.5) == doctest::Approx(10));
    CHECK_THROWS_AS(solve_boundary_decaying(p, 1e4, 1e-2), Error);
    CHECK_THROWS_AS(solve_boundary_decaying(make_potential("arctan"), 1e4, 0), Error);
}

TEST_CASE("bump values") {
    CutoffSpec s;
    s.left = -3;
    s.right = 5;
    s.band_left = 1;
    s.band_right = 2;
    for (double x : {-1.9, 0.0, 2.9}) {
        RealJet j = bump(s, x, 4);
        CHECK(j[0] == 1.0);
        for (int k = 1; k <= 4; ++k) CHECK(j[k] == 0.0);
    }
    for (double x : {-7.0, -3.0, 5.0, 11.0}) {
        RealJet j = bump(s, x, 4);
        for (int k = 0; k <= 4; ++k) CHECK(j[k] == 0.0);
    }
    for (double x = -3.5; x < 5.5; x += 0.01) {
        const double v = bump(s, x, 0)[0];
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    // derivatives against finite differences
    const double h = 2.5e-4;
    for (double x : {-2.7, -2.2, -2.05, 3.4, 4.1, 4.8}) {
        auto f = [&](double t) { return bump(s, t, 0)[0]; };
        auto sec = [&](double t) { return bump(s, t, 2).derivative(2); };
        RealJet j = bump(s, x, 4);
        const double fd1 = (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
        const double fd2 = (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
        const double fd4 = (-sec(x + 2 * h) + 16 * sec(x + h) - 30 * sec(x) + 16 * sec(x - h) - sec(x - 2 * h)) / (12 * h * h);
        CHECK(std::abs(fd1 - j.derivative(1)) <= 1e-6 * std::max(1.0, std::abs(j.derivative(1))));
        CHECK(std::abs(fd2 - j.derivative(2)) <= 1e-6 * std::max(1.0, std::abs(j.derivative(2))));
        CHECK(std::abs(fd4 - j.derivative(4)) <= 1e-6 * std::max(1.0, std::abs(j.derivative(4))));
    }
    CHECK_THROWS_AS(bump(s, 0.0, 5), Error);
}

TEST_CASE("bump is C4 across band edges") {
    CutoffSpec s;
    s.left = 0;
    s.right = 10;
    s.band_left = s.band_right = 2;
    for (double e : {0.0, 2.0, 8.0, 10.0}) {
        RealJet a = bump(s, e - 1e-8, 4), b = bump(s, e + 1e-8, 4);
        for (int k = 0; k <= 4; ++k) CHECK(std::abs(a.derivative(k) - b.derivative(k)) < 1e-6);
    }
}

TEST_CASE("scaled bump derivatives are uniform across a sweep") {
    auto p = make_potential("arctan");
    const auto& C = step_constants();
    CHECK(C[0] == doctest::Approx(1.0).epsilon(1e-3));
    std::array<double, 5> lo, hi;
    lo.fill(1e300);
    hi.fill(0);
    for (double a : {1e2, 1e3, 1e4, 1e5, 1e6}) {
        auto s = cutoff_theorem1(p, a);
        std::array<double, 5> m{};
        for (int i = 0; i <= 2000; ++i) {
            const double x = s.plateau_right() + s.band_right * i / 2000.0;
            RealJet j = bump(s, x, 4);
            for (int k = 1; k <= 4; ++k) m[k] = std::max(m[k], std::abs(j.derivative(k)) * std::pow(s.band_right, k));
        }
        for (int k = 1; k <= 4; ++k) {
            CHECK(m[k] <= C[k] * (1 + 1e-6));
            lo[k] = std::min(lo[k], m[k]);
            hi[k] = std::max(hi[k], m[k]);
        }
    }
    for (int k = 1; k <= 4; ++k) CHECK(hi[k] <= 2 * lo[k]);
}

TEST_CASE("semiclassical support") {
    auto s = cutoff_semiclassical(0.0, 0.5);
    CHECK(s.left == -1.0);
    CHECK(s.right == 1.0);
    CHECK(s.plateau_left() == -0.5);
    CHECK(s.plateau_right() == 0.5);
    CHECK(regime_from_string("theorem1-decaying") == Regime::theorem1_decaying);
    CHECK_THROWS_AS(regime_from_string("x"), Error);
}
