#include "doctest.h"

#include "p2gle/errors.hpp"
#include "p2gle/pressure.hpp"
#include "p2gle/spectrum.hpp"

#include <cmath>
#include <limits>

using namespace p2gle;

namespace {

const double L2 = std::log(2.0);

// Independent oracle: plain forward summation in extended precision with a
// fixed term count, no scaling, no compensation, two passes for the central
// moments. Only usable where the terms neither overflow nor need millions of
// summands; that is exactly the cross-check regime.
struct BruteMoments {
    double value, Ef, En, Vff, Vnn, Vnf;
};

template <class F>
BruteMoments brute(double t, double q, F f, long N) {
    long double S0 = 0, Sf = 0, Sn = 0;
    for (long n = 1; n <= N; ++n) {
        long double w = std::exp((long double)(-n * t * L2) + (long double)q * f(n));
        S0 += w;
        Sf += w * f(n);
        Sn += w * n;
    }
    long double Ef = Sf / S0, En = Sn / S0;
    long double Vff = 0, Vnn = 0, Vnf = 0;
    for (long n = 1; n <= N; ++n) {
        long double w = std::exp((long double)(-n * t * L2) + (long double)q * f(n));
        long double df = f(n) - Ef, dn = n - En;
        Vff += w * df * df;
        Vnn += w * dn * dn;
        Vnf += w * dn * df;
    }
    return {(double)std::log(S0), (double)Ef, (double)En,
            (double)(Vff / S0), (double)(Vnn / S0), (double)(Vnf / S0)};
}

void check_against_brute(const PressureEval& e, const BruteMoments& b, double tol) {
    CHECK(e.value == doctest::Approx(b.value).epsilon(tol));
    CHECK(e.dP_dq == doctest::Approx(b.Ef).epsilon(tol));
    CHECK(e.dP_dt == doctest::Approx(-L2 * b.En).epsilon(tol));
    CHECK(e.d2P_dq2 == doctest::Approx(b.Vff).epsilon(tol));
    CHECK(e.d2P_dtdq == doctest::Approx(-L2 * b.Vnf).epsilon(tol));
    CHECK(e.d2P_dt2 == doctest::Approx(L2 * L2 * b.Vnn).epsilon(tol));
}

double hessian_det(const PressureEval& e) {
    return e.d2P_dt2 * e.d2P_dq2 - e.d2P_dtdq * e.d2P_dtdq;
}

}  // namespace

TEST_CASE("domain predicates match the definition of each pressure") {
    CHECK(pressure_in_domain(PotentialKind::khintchine, 1.0, 0.0));
    CHECK(pressure_in_domain(PotentialKind::khintchine, 0.1, -5.0));
    CHECK_FALSE(pressure_in_domain(PotentialKind::khintchine, 1.0, L2));
    CHECK_FALSE(pressure_in_domain(PotentialKind::khintchine, 1.0, 1.0));

    CHECK(pressure_in_domain(PotentialKind::log_digit, 0.5, 10.0));
    CHECK(pressure_in_domain(PotentialKind::log_digit, 0.0, -1.5));
    CHECK_FALSE(pressure_in_domain(PotentialKind::log_digit, 0.0, -1.0));
    CHECK_FALSE(pressure_in_domain(PotentialKind::log_digit, -0.1, 0.0));

    CHECK(pressure_in_domain(PotentialKind::exp_digit, 0.5, 0.0));
    CHECK(pressure_in_domain(PotentialKind::exp_digit, 0.0, -0.5));
    CHECK_FALSE(pressure_in_domain(PotentialKind::exp_digit, 0.0, 0.0));
    CHECK_FALSE(pressure_in_domain(PotentialKind::exp_digit, 1.0, 0.1));

    CHECK(pressure_in_domain(PotentialKind::lyapunov, 1.0, 0.5));
    CHECK_FALSE(pressure_in_domain(PotentialKind::lyapunov, 1.0, 1.0));

    CHECK(classify_point(PotentialKind::khintchine, 1.0, 0.0).in_domain);
    CHECK_THROWS_AS(pressure_khintchine(1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(pressure_logdigit(-0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(pressure_expdigit(0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(pressure(PotentialKind::lyapunov, 1.0, 2.0), std::domain_error);
}

TEST_CASE("khintchine pressure on the q = 0 slice is -log(2^t - 1)") {
    // geometric weights: P(t,0) = log(2^-t / (1 - 2^-t))
    for (double t : {0.5, 1.0, 2.0, 3.7}) {
        PressureEval e = pressure_khintchine(t, 0.0);
        CHECK(e.value == doctest::Approx(-std::log(std::exp2(t) - 1.0)).epsilon(1e-15));
    }
    PressureEval e = pressure_khintchine(1.0, 0.0);
    CHECK(e.value == 0.0);  // exactly, not merely approximately
    CHECK(e.dP_dq == 2.0);  // mean digit of the fair law
    CHECK(e.dP_dt == -2.0 * L2);
    CHECK(e.d2P_dq2 == doctest::Approx(2.0).epsilon(1e-15));  // Var[n] under p_n = 2^-n
}

TEST_CASE("khintchine pressure matches brute-force geometric sums") {
    for (auto [t, q] : {std::pair{0.8, -0.5}, {1.5, 0.3}, {0.3, -2.0}, {2.0, 1.2}}) {
        PressureEval e = pressure_khintchine(t, q);
        BruteMoments b = brute(t, q, [](long n) { return (double)n; }, 400);
        check_against_brute(e, b, 1e-13);
    }
}

TEST_CASE("khintchine hessian is rank one") {
    // d2P/dt2 * d2P/dq2 - (d2P/dtdq)^2 vanishes identically: both rows of the
    // hessian are proportional to (log2, -1).
    for (auto [t, q] : {std::pair{1.0, 0.0}, {0.6, -1.0}, {2.0, 0.2}}) {
        PressureEval e = pressure_khintchine(t, q);
        double scale = e.d2P_dt2 * e.d2P_dq2;
        CHECK(std::fabs(hessian_det(e)) <= 1e-14 * scale);
    }
}

TEST_CASE("lyapunov pressure is the khintchine pressure at a rescaled q") {
    for (auto [t, q] : {std::pair{1.0, 0.3}, {0.7, -1.1}, {1.8, 1.5}}) {
        PressureEval a = pressure(PotentialKind::lyapunov, t, q);
        PressureEval k = pressure_khintchine(t, q * L2);
        CHECK(a.value == doctest::Approx(k.value).epsilon(1e-15));
        CHECK(a.dP_dt == doctest::Approx(k.dP_dt).epsilon(1e-15));
        CHECK(a.dP_dq == doctest::Approx(k.dP_dq * L2).epsilon(1e-15));
        CHECK(a.d2P_dq2 == doctest::Approx(k.d2P_dq2 * L2 * L2).epsilon(1e-15));
        CHECK(a.d2P_dtdq == doctest::Approx(k.d2P_dtdq * L2).epsilon(1e-15));
        CHECK(a.d2P_dt2 == doctest::Approx(k.d2P_dt2).epsilon(1e-15));
    }
}

TEST_CASE("log-digit series matches brute-force sums") {
    auto logn = [](long n) { return std::log((double)n); };
    for (auto [t, q] : {std::pair{1.2, 0.7}, {0.7, -1.3}, {2.0, 3.0}, {0.3, 0.0}, {1.0, 0.0}}) {
        PressureEval e = pressure_logdigit(t, q);
        BruteMoments b = brute(t, q, logn, 600);
        check_against_brute(e, b, 1e-13);
        CHECK(e.truncation_N > 0);
        CHECK(e.tail_bound < 1e-12);
        CHECK(hessian_det(e) > 0.0);
    }
}

TEST_CASE("log-digit pressure at (1,0) vanishes with slope xi0") {
    PressureEval e = pressure_logdigit(1.0, 0.0);
    CHECK(std::fabs(e.value) < 1e-16);
    CHECK(e.dP_dq == doctest::Approx(logdigit_xi0()).epsilon(1e-13));
    CHECK(e.dP_dt == doctest::Approx(-2.0 * L2).epsilon(1e-14));  // mean digit 2
}

TEST_CASE("wide-peak log-digit evaluation agrees with the literal series") {
    // parameters where the summand is a broad bump: the closed form and the
    // raw sum are computed by entirely different code paths
    for (auto [t, q] : {std::pair{0.0005, 10.0}, {0.001, 15.0}}) {
        PressureEval fast = pressure_logdigit(t, q);
        CHECK(fast.truncation_N == 0);  // closed form, no summation
        PressureEval slow = pressure_logdigit_series(t, q);
        CHECK(fast.value == doctest::Approx(slow.value).epsilon(1e-11));
        CHECK(fast.dP_dq == doctest::Approx(slow.dP_dq).epsilon(1e-11));
        CHECK(fast.dP_dt == doctest::Approx(slow.dP_dt).epsilon(1e-11));
        CHECK(fast.d2P_dq2 == doctest::Approx(slow.d2P_dq2).epsilon(1e-10));
        CHECK(fast.d2P_dtdq == doctest::Approx(slow.d2P_dtdq).epsilon(1e-10));
        CHECK(fast.d2P_dt2 == doctest::Approx(slow.d2P_dt2).epsilon(1e-10));
    }
}

TEST_CASE("riemann zeta evaluations") {
    const double pi = 3.14159265358979323846;
    CHECK(zeta(2.0) == doctest::Approx(pi * pi / 6.0).epsilon(1e-14));
    CHECK(zeta(4.0) == doctest::Approx(pi * pi * pi * pi / 90.0).epsilon(1e-14));
    CHECK(zeta(3.0) == doctest::Approx(1.2020569031595943).epsilon(1e-14));
    CHECK(zeta(1.5) == doctest::Approx(2.6123753486854883).epsilon(1e-14));
    CHECK(zeta(60.0) == doctest::Approx(1.0 + std::exp2(-60.0)).epsilon(1e-15));
    CHECK_THROWS_AS(zeta(1.0), std::domain_error);
    CHECK_THROWS_AS(zeta(0.5), std::domain_error);
}

TEST_CASE("log-digit pressure on the t = 0 edge routes through zeta") {
    PressureEval e = pressure_logdigit(0.0, -2.0);
    CHECK(e.value == doctest::Approx(std::log(zeta(2.0))).epsilon(1e-14));
    // E[log n] under n^-2/zeta(2) is -zeta'(2)/zeta(2); zeta'(2) is a known constant
    double Elogn = 0.93754825431584375 / zeta(2.0);
    CHECK(e.dP_dq == doctest::Approx(Elogn).epsilon(1e-8));
    CHECK(std::isinf(e.dP_dt));
    CHECK(e.dP_dt < 0.0);
    CHECK(std::isinf(e.d2P_dt2));

    PressureEval f = pressure_logdigit(0.0, -2.5);
    CHECK(f.dP_dt == doctest::Approx(-L2 * zeta(1.5) / zeta(2.5)).epsilon(1e-13));
    CHECK(std::isinf(f.d2P_dt2));  // E[n^2] needs s > 3

    PressureEval g = pressure_logdigit(0.0, -4.5);
    double En = zeta(3.5) / zeta(4.5);
    CHECK(g.d2P_dt2 == doctest::Approx(L2 * L2 * (zeta(2.5) / zeta(4.5) - En * En)).epsilon(1e-12));
}

TEST_CASE("exp-digit series matches brute-force sums") {
    auto exp2n = [](long n) { return std::exp2((double)n); };
    for (auto [t, q] : {std::pair{0.9, -0.4}, {1.5, -2.0}, {0.2, -0.05}, {0.0, -0.7}}) {
        PressureEval e = pressure_expdigit(t, q);
        BruteMoments b = brute(t, q, exp2n, 60);
        check_against_brute(e, b, 1e-13);
        CHECK(hessian_det(e) > 0.0);
    }
}

TEST_CASE("exp-digit pressure on the q = 0 edge has geometric closed forms") {
    PressureEval e = pressure_expdigit(3.0, 0.0);
    CHECK(e.value == doctest::Approx(-std::log(7.0)).epsilon(1e-15));
    CHECK(e.dP_dq == doctest::Approx(7.0 / 3.0).epsilon(1e-15));    // E[2^n]
    CHECK(e.d2P_dq2 == doctest::Approx(7.0 - 49.0 / 9.0).epsilon(1e-14));  // E[4^n] = 7
    BruteMoments b = brute(3.0, 0.0, [](long n) { return std::exp2((double)n); }, 60);
    check_against_brute(e, b, 1e-13);

    PressureEval diverging = pressure_expdigit(0.8, 0.0);
    CHECK(std::isinf(diverging.dP_dq));  // E[2^n] diverges for t <= 1
    PressureEval var_edge = pressure_expdigit(1.5, 0.0);
    CHECK(std::isfinite(var_edge.dP_dq));
    CHECK(std::isinf(var_edge.d2P_dq2));  // Var[2^n] diverges for t <= 2

    // q = 0 slice agrees with the khintchine value (identical weights)
    for (double t : {0.5, 1.0, 2.0}) {
        CHECK(pressure_expdigit(t, 0.0).value ==
              doctest::Approx(pressure_khintchine(t, 0.0).value).epsilon(1e-15));
    }
}

TEST_CASE("exp-digit slope at (1, -30) collapses to the first branch") {
    // weights beyond n = 1 are crushed by e^(-30 * 2^n); the law concentrates
    // on digit 1 and E[2^n] -> 2
    PressureEval e = pressure_expdigit(1.0, -30.0);
    CHECK(e.dP_dq == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(e.value == doctest::Approx(-L2 - 30.0 * 2.0).epsilon(1e-12));
}

TEST_CASE("analytic derivatives agree with central finite differences") {
    SeriesOptions opts;
    auto fd_check = [&](PotentialKind kind, double t, double q) {
        const double h = 1e-6;
        PressureEval e = pressure(kind, t, q, opts);
        double dt = (pressure(kind, t + h, q, opts).value - pressure(kind, t - h, q, opts).value) / (2 * h);
        double dq = (pressure(kind, t, q + h, opts).value - pressure(kind, t, q - h, opts).value) / (2 * h);
        CHECK(e.dP_dt == doctest::Approx(dt).epsilon(1e-6));
        CHECK(e.dP_dq == doctest::Approx(dq).epsilon(1e-6));
    };
    fd_check(PotentialKind::khintchine, 1.0, 0.2);
    fd_check(PotentialKind::log_digit, 0.9, 1.4);
    fd_check(PotentialKind::exp_digit, 0.6, -0.8);
    fd_check(PotentialKind::lyapunov, 1.1, 0.4);
}

TEST_CASE("series reports a certified truncation") {
    PressureEval e = pressure_logdigit(0.8, 2.0);
    CHECK(e.truncation_N > 1);
    CHECK(e.tail_bound >= 0.0);
    CHECK(e.tail_bound < 1e-12);
    PressureEval x = pressure_expdigit(0.5, -1.0);
    CHECK(x.truncation_N > 1);
    CHECK(x.tail_bound < 1e-12);
}

TEST_CASE("term caps raise convergence errors rather than returning junk") {
    SeriesOptions tight;
    tight.max_terms = 3;
    CHECK_THROWS_AS(pressure_logdigit_series(0.1, 5.0, tight), convergence_error);
    // exp-digit weights with q microscopically negative need digits past
    // double range before certification and must refuse
    CHECK_THROWS_AS(pressure_expdigit(1.0, -1e-320), convergence_error);
}

TEST_CASE("potential helpers name and evaluate each functional") {
    CHECK(potential_value(PotentialKind::khintchine, 5) == 5.0);
    CHECK(potential_value(PotentialKind::log_digit, 3) == doctest::Approx(std::log(3.0)));
    CHECK(potential_value(PotentialKind::exp_digit, 10) == 1024.0);
    CHECK(potential_value(PotentialKind::lyapunov, 2) == doctest::Approx(2.0 * L2));
    CHECK(parse_potential("khintchine") == PotentialKind::khintchine);
    CHECK(parse_potential("logdigit") == PotentialKind::log_digit);
    CHECK(parse_potential("expdigit") == PotentialKind::exp_digit);
    CHECK(parse_potential("lyapunov") == PotentialKind::lyapunov);
    CHECK(potential_name(PotentialKind::exp_digit) == std::string("expdigit"));
    CHECK_THROWS_AS(parse_potential("gauss"), std::domain_error);
}
